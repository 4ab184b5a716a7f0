'''
Finite-difference checks of complete desk-scale networks
'''
import numpy

from pointkan.autodiff import parameter, log_softmax_cross_entropy, grad_check
from pointkan.models import ModelConfig, build_model

settings = [-0.5, 0., 0.5, 1.]

def random_config(i):
  rng = numpy.random.RandomState(100 + i)
  branch = ['classification', 'part_seg', 'semantic_seg'][i % 3]
  widths = [int(rng.randint(2, 9)) for _ in range(2)]
  kwargs = dict(d=int(rng.choice([3, 6])), k=int(rng.randint(2, 5)),
                degree=int(rng.randint(1, 5)), alpha=float(rng.choice(settings)),
                beta=float(rng.choice(settings)), seed=i)
  if branch == 'classification':
    kwargs.update(encoder_widths=widths[:1], decoder_widths=[] if i % 2 else widths[1:])
  else:
    kwargs.update(encoder_widths=widths, decoder_widths=[int(rng.randint(2, 9))])
    if branch == 'part_seg':
      kwargs['one_hot_size'] = 3
  return ModelConfig(branch, **kwargs)

def check_network(cfg, mode, n_points=12, n_clouds=2):
  rng = numpy.random.RandomState(cfg.seed)
  model = build_model(cfg)
  model.set_mode(mode)
  x = parameter(rng.uniform(-1., 1., size=(n_clouds, n_points, cfg.d)))
  categories = rng.randint(3, size=n_clouds)
  if cfg.is_segmentation:
    targets = rng.randint(cfg.k, size=(n_clouds, n_points))
  else:
    targets = rng.randint(cfg.k, size=n_clouds)
  inputs = [value for _, value in model.parameters()]
  if cfg.branch != 'hybridpp':
    inputs.append(x)
  def loss():
    return log_softmax_cross_entropy(model.forward(x, categories=categories, mode=mode), targets)
  return grad_check(loss, inputs, h=1e-5, tol=1e-4)

def test_random_networks():
  for i in range(20):
    cfg = random_config(i)
    report = check_network(cfg, 'train' if i % 2 else 'eval')
    assert report.passed, (i, cfg, report.max_rel_error)

def test_mlp_decoder():
  cfg = ModelConfig('part_seg', d=3, k=3, encoder_widths=[6, 8], decoder_widths=[5],
                    decoder_kind='mlp', one_hot_size=3, degree=2, alpha=-0.5, beta=-0.5,
                    seed=3)
  report = check_network(cfg, 'train')
  assert report.passed, report.max_rel_error

def test_hierarchical_network():
  cfg = ModelConfig('hybridpp', d=3, k=3, sa_centroids=[6, 3], sa_radii=[0.8, 1.2],
                    sa_neighbors=[4, 4], sa_widths=[[4], [5], [6]], decoder_widths=[],
                    head_kind='kan', dropout=0., degree=2, seed=5)
  report = check_network(cfg, 'train', n_points=16)
  assert report.passed, report.max_rel_error
  cfg = cfg.replace(decoder_widths=[4])
  report = check_network(cfg, 'eval', n_points=16)
  assert report.passed, report.max_rel_error
