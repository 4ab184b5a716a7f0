'''
Test the point-dropping robustness sweep and the polynomial ablations
'''
import numpy

from pointkan.experiments import (dropped_dataset, robustness_sweep, sweep_settings,
                                  ablation, degree_sweep, alpha_beta_sweep)
from pointkan.layers import kan_width_sum
from pointkan.metrics import evaluate
from pointkan.models import ModelConfig, build_model
from pointkan.synthetic import make_dataset
from pointkan.tools import ConfigError, DataError
from pointkan.train import TrainConfig
from pointkan.test import long_test
from pointkan.test.tools import equal, raises, desk_classifier

def small_dataset(classes=('sphere', 'cube', 'torus'), n_points=32):
  return make_dataset(list(classes), train=3, test=3, n_points=n_points, seed=5)

def test_dropped_dataset():
  dataset = small_dataset()
  dropped = dropped_dataset(dataset, 10, seed=1)
  assert len(dropped) == len(dataset) and dropped.splits == dataset.splits
  assert all(pc.N == 10 for pc in dropped)
  again = dropped_dataset(dataset, 10, seed=1)
  assert all(a == b for a, b in zip(dropped, again))
  other = dropped_dataset(dataset, 10, seed=2)
  assert any(a != b for a, b in zip(dropped, other))
  raises(DataError, dropped_dataset, dataset, 33)

def test_full_keep_matches_plain_evaluation():
  dataset = small_dataset().split('test')
  model = build_model(ModelConfig('classification', d=3, k=3, encoder_widths=[10], degree=2))
  table = robustness_sweep(model, dataset, [32, 8], seed=0)
  assert list(table) == ['keep', 'mean_class_accuracy', 'overall_accuracy']
  assert table['keep'] == [32, 8]
  plain = evaluate(model, dataset)
  equal(table['overall_accuracy'][0], plain.overall_accuracy, tol=1e-12)
  equal(table['mean_class_accuracy'][0], plain.mean_class_accuracy, tol=1e-12)
  again = robustness_sweep(model, dataset, [32, 8], seed=0)
  assert again == table

def test_segmentation_robustness():
  dataset = small_dataset(('cube', 'mug')).split('test')
  cfg = ModelConfig('part_seg', d=3, k=2, one_hot_size=2, encoder_widths=[6, 8],
                    decoder_widths=[4])
  model = build_model(cfg)
  table = robustness_sweep(model, dataset, [32, 16])
  assert list(table) == ['keep', 'mean_iou']
  equal(table['mean_iou'][0], evaluate(model, dataset).mean_iou, tol=1e-12)

@long_test
def test_accuracy_degrades_with_fewer_points():
  model, dataset = desk_classifier()
  table = robustness_sweep(model, dataset.split('test'), [256, 128, 64, 32], seed=0)
  accuracy = table['overall_accuracy']
  # non-increasing within two points of noise
  for more, fewer in zip(accuracy, accuracy[1:]):
    assert fewer <= more + 0.02, accuracy

def test_sweep_settings():
  settings = sweep_settings('degree')
  assert [s['degree'] for s in settings] == degree_sweep
  assert all(s['alpha'] == s['beta'] == 1. for s in settings)
  settings = sweep_settings('alpha_beta')
  assert [(s['alpha'], s['beta']) for s in settings] == alpha_beta_sweep
  assert all(s['degree'] == 2 for s in settings)
  assert sweep_settings('degree', [3])[0]['degree'] == 3
  raises(ConfigError, sweep_settings, 'width')

def test_small_ablation():
  dataset = small_dataset()
  cfg = ModelConfig('classification', d=3, k=3, encoder_widths=[8], decoder_widths=[])
  train_cfg = TrainConfig('cls', epochs=1, batch_size=9)
  table = ablation(dataset, cfg, train_cfg, sweep='degree', values=[1, 2])
  assert list(table) == ['degree', 'alpha', 'beta', 'params', 'mean_class_accuracy',
                         'overall_accuracy']
  assert table['degree'] == [1, 2] and table['alpha'] == [1., 1.]
  assert table['params'][1] - table['params'][0] == kan_width_sum(build_model(cfg))
  assert all(0. <= a <= 1. for a in table['overall_accuracy'])
  table = ablation(dataset, cfg, train_cfg, sweep='alpha_beta', values=[(0., 0.), (1., 2.)])
  assert table['beta'] == [0., 2.] and table['degree'] == [2, 2]
  assert numpy.all(numpy.diff(table['params']) == 0)
