# -*- coding: iso-8859-1 -*-
'''Module for the optimizer, the learning-rate schedule, the training loop
and the checkpoint handling.'''
'''
pointkan

This file is part of pointkan.

pointkan is free software: you can redistribute it and/or modify
it under the terms of the GNU Lesser General Public License as
published by the Free Software Foundation, either version 3 of
the License, or any later version.
'''

from collections import OrderedDict
import copy

import numpy

from .autodiff import log_softmax_cross_entropy
from .display import display
from .models import ModelConfig, build_model, forward
from .output import MetricsLog, write_checkpoint
from .read import read_checkpoint
from .tools import ConfigError, DataError, NumericError, get_rng, parse_value, format_value

tasks = ['cls', 'part_seg', 'sem_seg'] #: Training tasks.

task_of_branch = {'classification': 'cls', 'hybridpp': 'cls',
                  'part_seg': 'part_seg', 'semantic_seg': 'sem_seg'}

#: Type of every TrainConfig field.
field_kinds = OrderedDict([
  ('task', 'str'),
  ('batch_size', 'int'),
  ('lr', 'float'),
  ('beta1', 'float'),
  ('beta2', 'float'),
  ('adam_epsilon', 'float'),
  ('lr_decay', 'float'),
  ('lr_step', 'int'),
  ('epochs', 'int'),
  ('seed', 'int'),
  ('val_split', 'str'),
  ('restrict_parts', 'bool'),
  ('augment', 'bool'),
  ])

task_defaults = {'cls': {'batch_size': 64, 'lr': 0.0005},
                 'part_seg': {'batch_size': 32, 'lr': 0.001},
                 'sem_seg': {'batch_size': 32, 'lr': 0.001}}

_common = {'beta1': 0.9, 'beta2': 0.999, 'adam_epsilon': 1e-8, 'lr_decay': 0.5,
           'lr_step': 20, 'epochs': 100, 'seed': 0, 'val_split': 'val',
           'restrict_parts': True, 'augment': False}

class TrainConfig(object):
  '''Optimizer and schedule settings. Defaults depend on the task.'''
  def __init__(self, task='cls', **kwargs):
    if task not in tasks:
      raise ConfigError('Unknown task "%s" (choose from "%s").' % (task, '", "'.join(tasks)))
    unknown = set(kwargs) - set(field_kinds)
    if unknown:
      raise ConfigError('Unknown train field(s): %s.' % ', '.join(sorted(unknown)))
    values = dict(_common)
    values.update(task_defaults[task])
    values.update(kwargs)
    values['task'] = task
    for key in field_kinds:
      setattr(self, key, parse_value(values[key], field_kinds[key]))
    self.check()

  @classmethod
  def for_model(cls, cfg, **kwargs):
    return cls(task_of_branch[cfg.branch], **kwargs)

  def check(self):
    if self.batch_size < 1:
      raise ConfigError('train.batch_size has to be positive.')
    if not self.lr > 0:
      raise ConfigError('train.lr has to be positive.')
    if not (0 <= self.beta1 < 1 and 0 <= self.beta2 < 1):
      raise ConfigError('Adam betas have to lie in [0,1).')
    if not self.adam_epsilon > 0:
      raise ConfigError('train.adam_epsilon has to be positive.')
    if self.lr_step < 1 or not self.lr_decay > 0:
      raise ConfigError('Invalid learning-rate schedule.')
    if self.epochs < 0:
      raise ConfigError('train.epochs has to be non-negative.')

  def todict(self):
    return OrderedDict((key, format_value(getattr(self, key), field_kinds[key]))
                       for key in field_kinds)

  def replace(self, **kwargs):
    values = dict((key, getattr(self, key)) for key in field_kinds)
    values.update(kwargs)
    return TrainConfig(values.pop('task'), **values)

  def __repr__(self):
    return 'TrainConfig(%s)' % ', '.join('%s=%s' % i for i in self.todict().items())

class AdamState(object):
  '''First and second moments per parameter name and the step counter.'''
  def __init__(self, beta1=0.9, beta2=0.999, epsilon=1e-8):
    self.beta1 = beta1
    self.beta2 = beta2
    self.epsilon = epsilon
    self.step = 0
    self.m = OrderedDict()
    self.v = OrderedDict()

  def tensors(self):
    out = OrderedDict()
    for name in self.m:
      out['adam.m.%s' % name] = self.m[name]
      out['adam.v.%s' % name] = self.v[name]
    out['adam.step'] = numpy.array([float(self.step)])
    return out

  def load(self, tensors):
    self.step = int(tensors['adam.step'][0])
    for key, value in tensors.items():
      if key.startswith('adam.m.'):
        self.m[key[7:]] = numpy.array(value)
      elif key.startswith('adam.v.'):
        self.v[key[7:]] = numpy.array(value)

def adam_step(parameters, state, lr):
  '''Applies one bias-corrected Adam update in place.

  **Parameters:**

    parameters : list of (str, Value)
      Named weights; their ``grad`` holds the gradient.
    state : AdamState
    lr : float
  '''
  state.step += 1
  t = state.step
  b1, b2 = state.beta1, state.beta2
  for name, value in parameters:
    g = value.grad
    if name not in state.m:
      state.m[name] = numpy.zeros_like(value.data)
      state.v[name] = numpy.zeros_like(value.data)
    if state.m[name].shape != g.shape:
      raise ConfigError('Adam moments of "%s" do not match the weight shape.' % name)
    state.m[name] = b1*state.m[name] + (1. - b1)*g
    state.v[name] = b2*state.v[name] + (1. - b2)*g*g
    m_hat = state.m[name] / (1. - b1**t)
    v_hat = state.v[name] / (1. - b2**t)
    value.data = value.data - lr*m_hat/(numpy.sqrt(v_hat) + state.epsilon)
  return state

def lr_at(epoch, cfg):
  '''Step schedule: lr * decay**(epoch // step).'''
  return cfg.lr * cfg.lr_decay**(int(epoch) // cfg.lr_step)

def targets_of(batch, task):
  if task == 'cls':
    if numpy.any(batch.shape_labels < 0):
      raise DataError('Classification requires a shape label for every cloud.')
    return batch.shape_labels
  if batch.point_labels is None:
    raise DataError('Segmentation requires per-point labels for every cloud.')
  return batch.point_labels

def _augment(features, rng):
  features = features.copy()
  features[..., :3] += numpy.clip(rng.normal(0., 0.01, size=features[..., :3].shape), -0.05, 0.05)
  return features

def save_checkpoint(filename, model, adam=None, meta=None):
  '''Writes weights, running statistics, Adam moments and the config echo.'''
  echo = OrderedDict(('model.%s' % k, v) for k, v in model.config.todict().items())
  for key, value in (meta or {}).items():
    echo['meta.%s' % key] = value
  tensors = model.state_dict()
  if adam is not None:
    tensors.update(adam.tensors())
  return write_checkpoint(filename, echo, tensors)

def load_checkpoint(filename):
  '''Rebuilds the model stored in a checkpoint.

  **Returns:**

    model : Model
    meta : OrderedDict
    adam : AdamState or None
  '''
  echo, tensors = read_checkpoint(filename)
  model_echo = OrderedDict((k[6:], v) for k, v in echo.items() if k.startswith('model.'))
  if 'branch' not in model_echo:
    raise DataError('%s carries no model configuration.' % filename)
  model = build_model(ModelConfig.fromdict(model_echo))
  model.load_state_dict(tensors)
  meta = OrderedDict((k[5:], v) for k, v in echo.items() if k.startswith('meta.'))
  adam = None
  if 'adam.step' in tensors:
    adam = AdamState()
    adam.load(tensors)
    model.step = adam.step
  return model, meta, adam

def train(model, dataset, cfg, outputname=None, numproc=1):
  '''Trains ``model`` on the ``train`` split of ``dataset``.

  Every epoch shuffles the training clouds (seeded), runs train-mode forward
  and backward passes with one Adam step per mini-batch and evaluates the
  split ``cfg.val_split``. The state with the best validation metric (overall
  accuracy for classification, mean IoU for segmentation) is retained. If the
  dataset has no such split the final state is kept; the test split is never
  used for selection unless named explicitly.

  **Parameters:**

    model : Model
    dataset : Dataset
    cfg : TrainConfig
    outputname : str, optional
      If given, the metrics log is written to ``<outputname>_log.csv`` and
      the best checkpoint to ``<outputname>.pkan``.

  **Returns:**

    result : dict
      ``log`` (column table), ``best_epoch``, ``best_metric``, ``metrics``
      (validation Metrics of the best epoch) and ``checkpoint``.
  '''
  from .metrics import evaluate
  if cfg.task != task_of_branch[model.config.branch]:
    raise ConfigError('Task %s does not fit the %s branch.' % (cfg.task, model.config.branch))
  if dataset.d != model.config.d:
    raise ConfigError('Dataset has d=%d features per point, the model expects d=%d.'
                      % (dataset.d, model.config.d))
  train_set = dataset.split('train')
  if not len(train_set):
    raise DataError('The training split is empty.')
  val_set = dataset.split(cfg.val_split) if dataset.has_split(cfg.val_split) else None
  if val_set is not None and not len(val_set):
    val_set = None
  selection = 'overall_accuracy' if cfg.task == 'cls' else 'mean_iou'

  log = MetricsLog(None if outputname is None else '%s_log.csv' % outputname,
                   ['epoch', 'lr', 'train_loss', 'val_' + selection])
  rng = get_rng(cfg.seed)
  adam = AdamState(cfg.beta1, cfg.beta2, cfg.adam_epsilon)
  best = {'metric': -numpy.inf, 'epoch': None, 'state': None, 'adam': None, 'metrics': None}

  for epoch in range(cfg.epochs):
    lr = lr_at(epoch, cfg)
    order = rng.permutation(len(train_set))
    losses = []
    for i, batch in enumerate(train_set.batches(cfg.batch_size, order)):
      if cfg.augment:
        batch = batch._replace(features=_augment(batch.features, rng))
      model.zero_grad()
      model.step = adam.step
      logits = forward(model, batch, mode='train')
      loss = log_softmax_cross_entropy(logits, targets_of(batch, cfg.task))
      if not numpy.isfinite(loss.data):
        raise NumericError('Non-finite loss in epoch %d, batch %d (lr=%g).' % (epoch, i, lr))
      loss.backward()
      adam_step(model.parameters(), adam, lr)
      losses.append(loss.item())
    train_loss = float(numpy.mean(losses))

    if val_set is not None:
      metrics = evaluate(model, val_set, restrict_parts=cfg.restrict_parts, numproc=numproc)
      value = getattr(metrics, selection)
    else:
      metrics = None
      value = -train_loss
    log.append(epoch=epoch, lr=lr, train_loss=train_loss,
               **{'val_' + selection: '' if metrics is None else value})
    display('Epoch %3d  lr %.3g  loss %.6f%s' % (
        epoch, lr, train_loss,
        '' if metrics is None else '  val %s %.4f' % (selection, value)))
    if val_set is None or value > best['metric']:
      best.update(metric=value, epoch=epoch, state=model.state_dict(),
                  adam=copy.deepcopy(adam), metrics=metrics)

  if best['state'] is not None:
    model.load_state_dict(best['state'])
  checkpoint = None
  if outputname is not None:
    meta = OrderedDict([('best_epoch', '' if best['epoch'] is None else str(best['epoch'])),
                        ('best_%s' % selection, repr(float(best['metric']))
                         if best['epoch'] is not None and val_set is not None else '')])
    meta.update(('train.%s' % k, v) for k, v in cfg.todict().items())
    checkpoint = save_checkpoint('%s.pkan' % outputname, model, adam=best['adam'] or adam,
                                 meta=meta)
    display('Checkpoint written to %s' % checkpoint)
  return {'log': log.table(), 'best_epoch': best['epoch'],
          'best_metric': best['metric'] if val_set is not None else None,
          'metrics': best['metrics'], 'checkpoint': checkpoint}
