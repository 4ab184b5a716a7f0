'''
Test the optimizer, the schedule and the training loop
'''
import os
import shutil
import tempfile

import numpy

from pointkan.autodiff import parameter
from pointkan.metrics import evaluate
from pointkan.models import ModelConfig, build_model
from pointkan.output import read_table
from pointkan.synthetic import make_dataset
from pointkan.tools import ConfigError, DataError, NumericError
from pointkan.train import (TrainConfig, AdamState, adam_step, lr_at, train,
                            load_checkpoint)
from pointkan.test import long_test
from pointkan.test.tools import equal, raises, desk_classifier

def tiny_dataset(classes=('sphere', 'cube'), train=6, test=3, n_points=24, seed=0, val=0):
  return make_dataset(list(classes), train=train, test=test, n_points=n_points, seed=seed,
                      val=val)

def tiny_classifier(seed=0, **kwargs):
  values = dict(d=3, k=2, encoder_widths=[12], degree=2, seed=seed)
  values.update(kwargs)
  return ModelConfig('classification', **values)

def test_adam_scalar_step():
  w = parameter(numpy.array([1.]))
  w.grad = numpy.array([2.])
  state = AdamState()
  adam_step([('w', w)], state, 0.001)
  equal(w.data[0] - 1., -0.000999999995, tol=1e-13)
  assert state.step == 1
  w.grad = numpy.array([0.])
  before = w.data.copy()
  state = AdamState()
  adam_step([('w', w)], state, 0.001)
  equal(w.data, before, tol=0.)

def test_adam_state_tensors():
  w = parameter(numpy.ones((2, 2)))
  w.grad = numpy.ones((2, 2))
  state = AdamState()
  adam_step([('w', w)], state, 0.01)
  adam_step([('w', w)], state, 0.01)
  tensors = state.tensors()
  assert list(tensors) == ['adam.m.w', 'adam.v.w', 'adam.step']
  again = AdamState()
  again.load(tensors)
  assert again.step == 2
  equal(again.m['w'], state.m['w'], tol=0.)
  w.grad = numpy.ones(3)
  raises(ConfigError, adam_step, [('w', w)], state, 0.01)

def test_lr_schedule():
  cfg = TrainConfig('cls')
  equal(lr_at(0, cfg), 0.0005)
  equal(lr_at(19, cfg), 0.0005)
  equal(lr_at(20, cfg), 0.00025, tol=1e-15)
  equal(lr_at(45, cfg), 0.000125, tol=1e-15)
  equal(lr_at(0, TrainConfig('part_seg')), 0.001)

def test_train_config():
  cfg = TrainConfig('cls')
  assert cfg.batch_size == 64 and cfg.epochs == 100 and cfg.lr_step == 20
  assert TrainConfig('sem_seg').batch_size == 32
  assert TrainConfig.for_model(ModelConfig('hybridpp')).task == 'cls'
  assert cfg.replace(lr=0.1).lr == 0.1
  assert cfg.todict()['augment'] == 'false'
  raises(ConfigError, TrainConfig, 'regression')
  raises(ConfigError, TrainConfig, 'cls', momentum=0.9)
  raises(ConfigError, TrainConfig, 'cls', lr=0.)
  raises(ConfigError, TrainConfig, 'cls', beta1=1.)
  raises(ConfigError, TrainConfig, 'cls', epochs=-1)

def test_one_step_per_batch():
  dataset = tiny_dataset(train=5)
  model = build_model(tiny_classifier())
  cfg = TrainConfig('cls', epochs=1, batch_size=4, val_split='none')
  tmp = tempfile.mkdtemp(prefix='pointkan_test_')
  try:
    result = train(model, dataset, cfg, outputname=os.path.join(tmp, 'run'))
    _, meta, adam = load_checkpoint(result['checkpoint'])
    log = read_table(os.path.join(tmp, 'run_log.csv'))
  finally:
    shutil.rmtree(tmp, ignore_errors=True)
  assert adam.step == 3
  assert meta['best_epoch'] == '0' and meta['train.batch_size'] == '4'
  assert result['best_metric'] is None and result['metrics'] is None
  assert log['epoch'] == [0.]

def test_loss_decreases():
  dataset = tiny_dataset(train=10, val=3)
  model = build_model(tiny_classifier())
  cfg = TrainConfig('cls', epochs=15, batch_size=5, lr=0.01)
  result = train(model, dataset, cfg)
  losses = result['log']['train_loss']
  assert len(losses) == 15
  assert losses[-1] < losses[0]
  assert 0 <= result['best_epoch'] < 15
  equal(result['best_metric'], result['metrics'].overall_accuracy)
  # the retained state is the best one on the validation split
  equal(evaluate(model, dataset.split('val')).overall_accuracy, result['best_metric'])

def test_final_state_without_validation():
  dataset = tiny_dataset(train=4)
  assert not dataset.has_split('val')
  model = build_model(tiny_classifier())
  cfg = TrainConfig('cls', epochs=3, batch_size=4, lr=0.01)
  result = train(model, dataset, cfg)
  assert result['best_epoch'] == 2 and result['best_metric'] is None
  # selection on the test split only when asked for
  result = train(build_model(tiny_classifier()), dataset, cfg.replace(val_split='test'))
  assert 0. <= result['best_metric'] <= 1.

def test_reproducible():
  dataset = tiny_dataset()
  cfg = TrainConfig('cls', epochs=3, batch_size=4, lr=0.01, augment=True)
  a = train(build_model(tiny_classifier(seed=4)), dataset, cfg)
  b = train(build_model(tiny_classifier(seed=4)), dataset, cfg)
  assert a['log'] == b['log']

def test_segmentation_training():
  dataset = tiny_dataset(classes=('cube', 'mug'), train=3, test=2, val=1)
  cfg = ModelConfig('part_seg', d=3, k=2, one_hot_size=2, encoder_widths=[6, 10],
                    decoder_widths=[6], seed=1)
  result = train(build_model(cfg), dataset, TrainConfig('part_seg', epochs=2, batch_size=3))
  assert 0. <= result['best_metric'] <= 1.
  assert result['metrics'].per_category_iou is not None

def test_non_finite_loss():
  dataset = tiny_dataset()
  model = build_model(tiny_classifier())
  model.layers[0].omega.data[...] = numpy.nan
  raises(NumericError, train, model, dataset, TrainConfig('cls', epochs=1))

def test_training_errors():
  dataset = tiny_dataset()
  raises(ConfigError, train, build_model(tiny_classifier()), dataset, TrainConfig('part_seg'))
  raises(ConfigError, train, build_model(tiny_classifier(d=6)), dataset, TrainConfig('cls'))
  empty = dataset.split('test')
  raises(DataError, train, build_model(tiny_classifier()), empty, TrainConfig('cls', epochs=1))

def _desk_classification(decoder_kind):
  model, dataset = desk_classifier(decoder_kind)
  accuracy = evaluate(model, dataset.split('test')).overall_accuracy
  assert accuracy >= 0.9, (decoder_kind, accuracy)

@long_test
def test_desk_scale_classification():
  _desk_classification('kan')

@long_test
def test_desk_scale_classification_mlp_decoder():
  _desk_classification('mlp')

def _desk_part_segmentation(decoder_kind):
  dataset = make_dataset(['mug'], train=200, test=50, val=25, n_points=256, seed=0)
  cfg = ModelConfig('part_seg', d=3, k=2, one_hot_size=1, encoder_widths=[64, 256],
                    decoder_widths=[64], degree=2, alpha=-0.5, beta=-0.5,
                    decoder_kind=decoder_kind)
  model = build_model(cfg)
  train(model, dataset, TrainConfig('part_seg', epochs=60))
  mean_iou = evaluate(model, dataset.split('test')).mean_iou
  assert mean_iou >= 0.8, (decoder_kind, mean_iou)

@long_test
def test_desk_scale_part_segmentation():
  _desk_part_segmentation('kan')

@long_test
def test_desk_scale_part_segmentation_mlp_decoder():
  _desk_part_segmentation('mlp')
