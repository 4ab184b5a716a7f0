'''
Test the assembled networks: shapes, point-order symmetry, state and FLOPs
'''
import numpy

from pointkan.models import (ModelConfig, build_model, build_classifier,
                             build_segmenter, forward, predict_proba,
                             flops_estimate, flops_convention, canonical_branch)
from pointkan.layers import param_count
from pointkan.tools import ConfigError, ContractError, DataError
from pointkan.test.tools import equal, raises

def small(branch, **kwargs):
  widths = dict(classification=dict(encoder_widths=[16], decoder_widths=[8]),
                part_seg=dict(encoder_widths=[8, 16], decoder_widths=[8], k=6,
                              one_hot_size=4),
                semantic_seg=dict(encoder_widths=[8, 16], decoder_widths=[8], d=9, k=5))
  values = dict(widths[branch])
  values.update(kwargs)
  return ModelConfig(branch, **values)

def clouds(n_clouds, n_points, d, seed=0):
  return numpy.random.RandomState(seed).uniform(-1., 1., size=(n_clouds, n_points, d))

def test_output_shapes():
  x = clouds(3, 20, 6)
  model = build_model(small('classification', k=7))
  assert forward(model, x).shape == (3, 7)
  assert forward(model, x[0]).shape == (1, 7)
  model = build_model(small('part_seg', d=6))
  assert forward(model, _Batch(x, [0, 3, 1])).shape == (3, 20, 6)
  model = build_model(small('semantic_seg'))
  assert forward(model, clouds(2, 11, 9)).shape == (2, 11, 5)

class _Batch(object):
  def __init__(self, features, categories):
    self.features = features
    self.categories = numpy.array(categories)

def test_classification_is_permutation_invariant():
  model = build_model(small('classification'))
  x = clouds(2, 30, 6, seed=1)
  a = forward(model, x).data
  for seed in range(100):
    perm = numpy.random.RandomState(seed).permutation(30)
    b = forward(model, x[:, perm]).data
    assert numpy.max(numpy.abs(a - b)) < 1e-9, seed

def test_segmentation_is_permutation_equivariant():
  for cfg in [small('part_seg'), small('semantic_seg'),
              small('part_seg', decoder_kind='mlp')]:
    model = build_model(cfg)
    x = clouds(2, 25, cfg.d, seed=3)
    a = forward(model, _Batch(x, [1, 2])).data
    for seed in range(100):
      perm = numpy.random.RandomState(seed).permutation(25)
      b = forward(model, _Batch(x[:, perm], [1, 2])).data
      assert numpy.max(numpy.abs(a[:, perm] - b)) < 1e-9, (cfg.branch, seed)

def test_single_cloud_single_point():
  x = clouds(1, 1, 6, seed=5)
  model = build_model(small('classification', k=3))
  for mode in ['train', 'eval']:
    logits = forward(model, x, mode=mode).data
    assert logits.shape == (1, 3) and numpy.all(numpy.isfinite(logits))
  model = build_model(small('part_seg'))
  for mode in ['train', 'eval']:
    logits = forward(model, _Batch(clouds(1, 1, 3), [2]), mode=mode).data
    assert logits.shape == (1, 1, 6) and numpy.all(numpy.isfinite(logits))

def test_duplicated_points_keep_logits():
  model = build_model(small('classification'))
  forward(model, clouds(4, 20, 6, seed=7), mode='train')
  x = clouds(2, 15, 6, seed=6)
  doubled = numpy.concatenate([x, x[:, ::-1]], axis=1)
  equal(forward(model, doubled).data, forward(model, x).data, tol=1e-12)

def test_pooled_normalization_scale():
  model = build_model(small('part_seg', pool_bn_scale=0.5))
  bns = [bn for _, bn in model.encoder]
  equal(bns[0].state.scale.data, numpy.ones(8), tol=0.)
  equal(bns[1].state.scale.data, numpy.full(16, 0.5), tol=0.)
  model = build_model(small('classification'))
  equal(model.encoder[0][1].state.scale.data, numpy.full(16, 0.35), tol=0.)
  raises(ConfigError, ModelConfig, 'classification', pool_bn_scale=0.)

def test_probabilities():
  model = build_model(small('classification'))
  p = predict_proba(model, clouds(4, 10, 6))
  equal(p.sum(axis=1), numpy.ones(4), tol=1e-12)
  assert numpy.all(p >= 0.)

def test_hybrid_decoder_keeps_encoder():
  kan = build_model(small('part_seg'))
  mlp = build_model(small('part_seg', decoder_kind='mlp'))
  x = _Batch(clouds(2, 9, 3), [0, 1])
  assert forward(kan, x).shape == forward(mlp, x).shape
  encoder = lambda m: [l for l in param_count(m)['layers'] if l[0].startswith('encoder')]
  assert encoder(kan) == encoder(mlp)
  assert param_count(mlp)['mlp'] > 0

def test_part_seg_needs_categories():
  model = build_model(small('part_seg'))
  raises(DataError, forward, model, clouds(2, 5, 3))
  raises(DataError, forward, model, _Batch(clouds(2, 5, 3), [0, 1, 2]))

def test_wrong_feature_count():
  model = build_model(small('classification'))
  raises(ContractError, forward, model, clouds(2, 5, 3))
  raises(ContractError, forward, model, numpy.zeros(6))

def test_state_dict_round_trip():
  cfg = small('part_seg')
  model = build_model(cfg)
  x = _Batch(clouds(4, 12, 3), [0, 1, 2, 3])
  forward(model, x, mode='train')
  state = model.state_dict()
  assert 'encoder0.omega' in state and 'encoder0_bn.running_var' in state
  other = build_model(cfg.replace(seed=99))
  assert not numpy.allclose(forward(model, x).data, forward(other, x).data)
  other.load_state_dict(state)
  equal(forward(model, x).data, forward(other, x).data, tol=1e-14)
  del state['output.omega']
  raises(DataError, other.load_state_dict, state)
  state = model.state_dict()
  state['encoder0.omega'] = state['encoder0.omega'][:, :2]
  raises(DataError, other.load_state_dict, state)

def test_same_seed_same_model():
  cfg = small('semantic_seg', seed=11)
  a = build_model(cfg).state_dict()
  b = build_model(cfg).state_dict()
  equal(dict(a), dict(b), tol=0.)

def test_config_echo():
  cfg = ModelConfig('seg', preset='seg128', degree=3, alpha=0.5)
  assert cfg.branch == 'part_seg'
  assert cfg.encoder_widths == [128, 1024]
  echo = cfg.todict()
  assert echo['concat_order'] == 'local,global,one_hot'
  assert ModelConfig.fromdict(echo) == cfg
  assert cfg.replace(degree=4) != cfg
  assert canonical_branch('pp') == 'hybridpp'

def test_config_errors():
  raises(ConfigError, ModelConfig, 'regression')
  raises(ConfigError, ModelConfig, 'classification', widths=[3])
  raises(ConfigError, ModelConfig, 'classification', preset='huge')
  raises(ConfigError, ModelConfig, 'classification', encoder_widths=[])
  raises(ConfigError, ModelConfig, 'classification', encoder_widths=[0])
  raises(ConfigError, ModelConfig, 'classification', alpha=-1.)
  raises(ConfigError, ModelConfig, 'part_seg', decoder_kind='conv')
  raises(ConfigError, ModelConfig, 'semantic_seg', one_hot_size=16)
  raises(ConfigError, ModelConfig, 'hybridpp', dropout=1.)
  raises(ConfigError, ModelConfig, 'hybridpp', sa_radii=[0.2])
  raises(ConfigError, build_classifier, small('part_seg'))
  raises(ConfigError, build_segmenter, small('classification'))

def test_flops():
  cfg = ModelConfig('classification', d=6, k=40, encoder_widths=[64], degree=2)
  flops = flops_estimate(build_model(cfg), 1024)
  assert flops['convention'] == flops_convention
  names = [name for name, _ in flops['terms']]
  assert names == ['encoder0', 'encoder0_bn', 'max_pool', 'output']
  kan = 1024*(2*3*6*64 + 6*2*6 + 6)
  output = 2*3*64*40 + 6*2*64 + 64
  equal(flops['total'], kan + 1024*64 + 1024*64 + output)
  double = flops_estimate(build_model(cfg), 2048)['total']
  assert double > flops['total']
