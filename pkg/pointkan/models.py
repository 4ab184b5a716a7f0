# -*- coding: iso-8859-1 -*-
'''Module for the declarative description and assembly of the point-cloud
networks.

Supported branches:

  - ``classification``: shared KAN encoder, batch normalization, max-pool and
    a KAN (or MLP) head producing one logit vector per cloud.
  - ``part_seg``: two-level shared KAN encoder; the local feature of the first
    level, the tiled global feature and the one-hot category vector are
    concatenated and decoded point-wise.
  - ``semantic_seg``: as ``part_seg`` without the one-hot vector.
  - ``hybridpp``: set-abstraction hierarchy with shared KAN layers and an MLP
    head (see :mod:`pointkan.hierarchy`).
'''
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

from .autodiff import (constant, relu, max_pool_points, tile_global,
                       concat_features, softmax, modes)
from .jacobi import JacobiParams
from .layers import KanLayer, MlpLayer, BatchNorm
from .tools import (ConfigError, ContractError, DataError, derive_seed, one_hot,
                    parse_value, format_value)

branches = ['classification', 'part_seg', 'semantic_seg', 'hybridpp'] #: Network branches.
branch_aliases = {'cls': 'classification',
                  'seg': 'part_seg',
                  'sem_seg': 'semantic_seg',
                  'pp': 'hybridpp'}
layer_kinds = ['kan', 'mlp'] #: Possible decoder and head layer kinds.

#: Order of the decoder input blocks of the segmentation branches.
concat_order = 'local,global,one_hot'

#: Type of every ModelConfig field (see :func:`pointkan.tools.parse_value`).
field_kinds = OrderedDict([
  ('branch', 'str'),
  ('preset', 'str'),
  ('d', 'int'),
  ('k', 'int'),
  ('encoder_widths', 'ints'),
  ('decoder_widths', 'ints'),
  ('decoder_kind', 'str'),
  ('head_kind', 'str'),
  ('degree', 'int'),
  ('alpha', 'float'),
  ('beta', 'float'),
  ('one_hot_size', 'int'),
  ('bn_momentum', 'float'),
  ('bn_epsilon', 'float'),
  ('pool_bn_scale', 'float'),
  ('dropout', 'float'),
  ('sa_centroids', 'ints'),
  ('sa_radii', 'floats'),
  ('sa_neighbors', 'ints'),
  ('sa_widths', 'intss'),
  ('fps_random_start', 'bool'),
  ('seed', 'int'),
  ])

_common = {'preset': 'default',
           'decoder_kind': 'kan',
           'head_kind': 'mlp',
           'bn_momentum': 0.9,
           'bn_epsilon': 1e-5,
           'pool_bn_scale': 0.35,
           'dropout': 0.,
           'sa_centroids': [512, 128],
           'sa_radii': [0.2, 0.4],
           'sa_neighbors': [32, 32],
           'sa_widths': [[64, 64, 128], [128, 128, 256], [256, 512, 1024]],
           'fps_random_start': False,
           'seed': 0}

#: Defaults of each branch.
branch_defaults = {
  'classification': dict(d=6, k=40, encoder_widths=[3072], decoder_widths=[],
                         degree=4, alpha=1., beta=1., one_hot_size=0),
  'part_seg': dict(d=3, k=50, encoder_widths=[640, 5120], decoder_widths=[640],
                   degree=2, alpha=-0.5, beta=-0.5, one_hot_size=16),
  'semantic_seg': dict(d=9, k=13, encoder_widths=[640, 5120], decoder_widths=[640],
                       degree=2, alpha=-0.5, beta=-0.5, one_hot_size=0),
  'hybridpp': dict(d=3, k=40, encoder_widths=[], decoder_widths=[512, 256],
                   degree=2, alpha=-0.5, beta=-0.5, one_hot_size=0, dropout=0.4),
  }

#: Named width presets (tensor-size sweep and stacked-KAN variant).
presets = {
  'default': {},
  'cls1024': {'encoder_widths': [1024]},
  'cls2048': {'encoder_widths': [2048]},
  'seg128': {'encoder_widths': [128, 1024], 'decoder_widths': [128]},
  'seg384': {'encoder_widths': [384, 3072], 'decoder_widths': [384]},
  'deep': {'encoder_widths': [64, 64, 64, 128, 1024], 'decoder_widths': [512, 256],
           'degree': 2, 'alpha': 1., 'beta': 1.},
  }

flops_convention = ('FLOPs per sample: KAN layer 2*(n+1)*d_in*d_out per row '
                    '(multiply and add counted separately) + 6*n per input '
                    'scalar for the basis recursion + 1 per input scalar for '
                    'tanh; MLP layer 2*d_in*d_out + d_out per row; batch '
                    'normalization, pooling, tiling and concatenation 1 per '
                    'element.')

def canonical_branch(branch):
  branch = branch_aliases.get(branch, branch)
  if branch not in branches:
    raise ConfigError('Unknown branch "%s" (choose from "%s").' %
                      (branch, '", "'.join(branches)))
  return branch

class ModelConfig(object):
  '''Declarative description of a network.

  Values are taken, in increasing priority, from the branch defaults, the
  named preset and the keyword arguments.

  **Parameters:**

    branch : {'classification', 'part_seg', 'semantic_seg', 'hybridpp'}
    preset : str, optional
      One of :data:`presets`.
    **kwargs
      Any field of :data:`field_kinds`.
  '''
  def __init__(self, branch='classification', preset=None, **kwargs):
    branch = canonical_branch(branch)
    unknown = set(kwargs) - set(field_kinds)
    if unknown:
      raise ConfigError('Unknown model field(s): %s.' % ', '.join(sorted(unknown)))
    values = copy.deepcopy(_common)
    values.update(copy.deepcopy(branch_defaults[branch]))
    preset = preset or kwargs.pop('preset', None) or 'default'
    kwargs.pop('preset', None)
    if preset not in presets:
      raise ConfigError('Unknown preset "%s" (choose from "%s").' %
                        (preset, '", "'.join(sorted(presets))))
    values.update(copy.deepcopy(presets[preset]))
    values.update(kwargs)
    values['branch'] = branch
    values['preset'] = preset
    for key in field_kinds:
      setattr(self, key, parse_value(values[key], field_kinds[key]))
    self.check()

  @property
  def polynomial(self):
    return JacobiParams(self.alpha, self.beta, self.degree)

  @property
  def is_segmentation(self):
    return self.branch in ['part_seg', 'semantic_seg']

  def check(self):
    '''Validates the configuration and raises :class:`ConfigError`.'''
    for key in ['d', 'k']:
      if getattr(self, key) < 1:
        raise ConfigError('model.%s has to be positive, got %d.' % (key, getattr(self, key)))
    widths = self.encoder_widths + self.decoder_widths + sum(self.sa_widths, [])
    if any(w < 1 for w in widths):
      raise ConfigError('Layer widths have to be positive, got %s.' % widths)
    if self.branch != 'hybridpp' and not self.encoder_widths:
      raise ConfigError('The %s branch needs at least one encoder width.' % self.branch)
    for key in ['decoder_kind', 'head_kind']:
      if getattr(self, key) not in layer_kinds:
        raise ConfigError('model.%s has to be one of "%s", got "%s".' %
                          (key, '", "'.join(layer_kinds), getattr(self, key)))
    if self.one_hot_size < 0:
      raise ConfigError('model.one_hot_size has to be non-negative.')
    if self.branch == 'semantic_seg' and self.one_hot_size > 0:
      raise ConfigError('The semantic_seg branch takes no one-hot vector '
                        '(one_hot_size=%d).' % self.one_hot_size)
    if not 0 <= self.dropout < 1:
      raise ConfigError('model.dropout has to lie in [0,1), got %g.' % self.dropout)
    if not 0 <= self.bn_momentum <= 1 or self.bn_epsilon <= 0:
      raise ConfigError('Invalid batch normalization momentum/epsilon.')
    if not self.pool_bn_scale > 0:
      raise ConfigError('model.pool_bn_scale has to be positive, got %g.' % self.pool_bn_scale)
    if self.branch == 'hybridpp':
      n = len(self.sa_centroids)
      if (len(self.sa_radii) != n or len(self.sa_neighbors) != n
          or len(self.sa_widths) != n + 1):
        raise ConfigError('Set abstraction settings need equally many centroid '
                          'counts, radii and neighbor counts and one more '
                          'width list (global stage).')
      if any(r <= 0 for r in self.sa_radii):
        raise ConfigError('Ball query radii have to be positive.')
      if any(not w for w in self.sa_widths):
        raise ConfigError('Every set abstraction stage needs at least one width.')
    self.polynomial # validates the Jacobi parameters

  def todict(self):
    '''Returns the configuration as text values (config echo).'''
    echo = OrderedDict((key, format_value(getattr(self, key), field_kinds[key]))
                       for key in field_kinds)
    echo['concat_order'] = concat_order
    return echo

  @classmethod
  def fromdict(cls, echo):
    '''Rebuilds a configuration from :meth:`todict` output.'''
    echo = dict(echo)
    order = echo.pop('concat_order', concat_order)
    if order != concat_order:
      raise ConfigError('Unsupported decoder concatenation order "%s".' % order)
    branch = echo.pop('branch')
    preset = echo.pop('preset', 'default')
    return cls(branch, preset=preset, **echo)

  def replace(self, **kwargs):
    '''Returns a copy with some fields replaced.'''
    values = dict((key, getattr(self, key)) for key in field_kinds)
    values.update(kwargs)
    branch = values.pop('branch')
    return ModelConfig(branch, **values)

  def __eq__(self, other):
    return isinstance(other, ModelConfig) and self.todict() == other.todict()

  def __ne__(self, other):
    return not self == other

  def __repr__(self):
    return 'ModelConfig(%s)' % ', '.join('%s=%s' % i for i in self.todict().items())

class Model(object):
  '''Container of named layers with parameter and state access.'''
  def __init__(self, config):
    self.config = config
    self.layers = []
    self.mode = 'eval'
    self.step = 0 #: Optimizer steps taken; selects the dropout masks.

  def add(self, layer):
    if any(l.name == layer.name for l in self.layers):
      raise ContractError('Duplicate layer name "%s".' % layer.name)
    self.layers.append(layer)
    return layer

  def _seed(self):
    return derive_seed(self.config.seed, len(self.layers))

  def dropout_seed(self, index):
    '''Seed of the dropout mask ``index`` at the current optimizer step.

    The mask depends only on the model seed, :attr:`step` and ``index``, so a
    train-mode forward pass is reproducible and a resumed run draws the same
    masks as an uninterrupted one.
    '''
    return derive_seed(derive_seed(self.config.seed, 0x5EED), (self.step << 10) + index)

  def parameters(self):
    return [p for layer in self.layers for p in layer.parameters()]

  def zero_grad(self):
    for _, value in self.parameters():
      value.zero_grad()

  def set_mode(self, mode):
    if mode not in modes:
      raise ContractError('Unknown mode "%s" (choose from "%s").' % (mode, '", "'.join(modes)))
    self.mode = mode
    for layer in self.layers:
      if layer.kind == 'bn':
        layer.state.mode = mode

  def state_dict(self):
    '''Returns all trainable tensors and batch-normalization running
    statistics as an ordered name -> array mapping (copies).'''
    tensors = OrderedDict()
    for layer in self.layers:
      for name, value in layer.parameters():
        tensors[name] = value.data.copy()
      for name, attr in layer.buffers():
        tensors[name] = numpy.array(getattr(layer.state, attr), dtype=numpy.float64)
    return tensors

  def load_state_dict(self, tensors):
    '''Loads the tensors of :meth:`state_dict`; missing names or shape
    mismatches raise :class:`DataError`.'''
    for layer in self.layers:
      for name, value in layer.parameters():
        value.data = _checked(tensors, name, value.shape)
        value.zero_grad()
      for name, attr in layer.buffers():
        current = getattr(layer.state, attr)
        setattr(layer.state, attr, _checked(tensors, name, current.shape))

  def hidden(self, layer, bn, x, mode):
    '''Layer -> batch normalization (-> relu for MLP layers).'''
    x = bn.forward(layer.forward(x, mode), mode)
    return relu(x) if layer.kind == 'mlp' else x

  def make_layer(self, kind, d_in, d_out, name):
    if kind == 'kan':
      return self.add(KanLayer(d_in, d_out, self.config.polynomial,
                               seed=self._seed(), name=name))
    return self.add(MlpLayer(d_in, d_out, activation='none', seed=self._seed(),
                             name=name))

  def make_bn(self, channels, name, scale=1.):
    return self.add(BatchNorm(channels, momentum=self.config.bn_momentum,
                              epsilon=self.config.bn_epsilon, name=name, scale=scale))

  def make_encoder(self):
    '''Shared KAN layers, each followed by batch normalization. The last
    normalization feeds the max-pool and starts at ``config.pool_bn_scale``
    so that the pooled maxima stay inside the responsive range of tanh.'''
    width = self.config.d
    widths = self.config.encoder_widths
    encoder = []
    for i, w in enumerate(widths):
      kan = self.make_layer('kan', width, w, 'encoder%d' % i)
      scale = self.config.pool_bn_scale if i == len(widths) - 1 else 1.
      encoder.append((kan, self.make_bn(w, 'encoder%d_bn' % i, scale=scale)))
      width = w
    return encoder

  def __repr__(self):
    return '%s(%s)' % (self.__class__.__name__,
                       ', '.join(repr(l) for l in self.layers))

def _checked(tensors, name, shape):
  if name not in tensors:
    raise DataError('Tensor "%s" missing from checkpoint.' % name)
  array = numpy.array(tensors[name], dtype=numpy.float64)
  if array.shape != tuple(shape):
    raise DataError('Tensor "%s" has shape %s, expected %s.' % (name, array.shape, tuple(shape)))
  return array

def layer_flops(layer, rows):
  '''FLOPs of a shared layer applied to ``rows`` rows (see :data:`flops_convention`).'''
  if layer.kind == 'kan':
    n = layer.params.degree
    per_row = 2*(n + 1)*layer.d_in*layer.d_out + 6*n*layer.d_in + layer.d_in
  elif layer.kind == 'mlp':
    per_row = 2*layer.d_in*layer.d_out + layer.d_out
  else:
    per_row = layer.d_in
  return rows * per_row

class Classifier(Model):
  '''Shared KAN encoder -> max-pool -> head.'''
  def __init__(self, config):
    Model.__init__(self, config)
    self.encoder = self.make_encoder()
    width = config.encoder_widths[-1]
    self.global_width = width
    self.head = []
    for i, w in enumerate(config.decoder_widths):
      layer = self.make_layer(config.decoder_kind, width, w, 'head%d' % i)
      self.head.append((layer, self.make_bn(w, 'head%d_bn' % i)))
      width = w
    self.output = self.make_layer(config.decoder_kind, width, config.k, 'output')

  def forward(self, x, categories=None, mode='eval'):
    for kan, bn in self.encoder:
      x = bn.forward(kan.forward(x, mode), mode)
    g = max_pool_points(x)
    for layer, bn in self.head:
      g = self.hidden(layer, bn, g, mode)
    return self.output.forward(g, mode)

  def flop_terms(self, n_points):
    terms = []
    for kan, bn in self.encoder:
      terms += [(kan.name, layer_flops(kan, n_points)), (bn.name, layer_flops(bn, n_points))]
    terms.append(('max_pool', n_points*self.global_width))
    for layer, bn in self.head:
      terms += [(layer.name, layer_flops(layer, 1)), (bn.name, layer_flops(bn, 1))]
    terms.append((self.output.name, layer_flops(self.output, 1)))
    return terms

class Segmenter(Model):
  '''Shared KAN encoder; decoder on [local, tiled global, one-hot].'''
  def __init__(self, config):
    Model.__init__(self, config)
    self.encoder = self.make_encoder()
    width = config.encoder_widths[-1]
    self.local_width = config.encoder_widths[0]
    self.global_width = width
    self.concat_width = self.local_width + self.global_width + config.one_hot_size
    width = self.concat_width
    self.decoder = []
    for i, w in enumerate(config.decoder_widths):
      layer = self.make_layer(config.decoder_kind, width, w, 'decoder%d' % i)
      self.decoder.append((layer, self.make_bn(w, 'decoder%d_bn' % i)))
      width = w
    self.output = self.make_layer(config.decoder_kind, width, config.k, 'output')

  def forward(self, x, categories=None, mode='eval'):
    n_points = x.shape[-2]
    local = None
    for i, (kan, bn) in enumerate(self.encoder):
      x = bn.forward(kan.forward(x, mode), mode)
      if i == 0:
        local = x
    g = max_pool_points(x)
    parts = [local, tile_global(g, n_points)]
    if self.config.one_hot_size:
      if categories is None:
        raise DataError('The part_seg branch requires the category of every cloud.')
      oh = one_hot(numpy.asarray(categories).reshape(-1), self.config.one_hot_size)
      if oh.shape[0] != x.shape[0]:
        raise DataError('%d categories given for %d clouds.' % (oh.shape[0], x.shape[0]))
      parts.append(constant(numpy.repeat(oh[:, numpy.newaxis, :], n_points, axis=1)))
    y = concat_features(parts)
    for layer, bn in self.decoder:
      y = self.hidden(layer, bn, y, mode)
    return self.output.forward(y, mode)

  def flop_terms(self, n_points):
    terms = []
    for kan, bn in self.encoder:
      terms += [(kan.name, layer_flops(kan, n_points)), (bn.name, layer_flops(bn, n_points))]
    terms.append(('max_pool', n_points*self.global_width))
    terms.append(('tile_concat', n_points*self.concat_width))
    for layer, bn in self.decoder:
      terms += [(layer.name, layer_flops(layer, n_points)), (bn.name, layer_flops(bn, n_points))]
    terms.append((self.output.name, layer_flops(self.output, n_points)))
    return terms

def build_classifier(cfg):
  '''Builds the classification branch described by ``cfg``.'''
  if cfg.branch != 'classification':
    raise ConfigError('build_classifier requires branch=classification, got %s.' % cfg.branch)
  return Classifier(cfg)

def build_segmenter(cfg):
  '''Builds the part or semantic segmentation branch described by ``cfg``.'''
  if not cfg.is_segmentation:
    raise ConfigError('build_segmenter requires a segmentation branch, got %s.' % cfg.branch)
  return Segmenter(cfg)

def build_model(cfg):
  '''Builds the network of any branch.'''
  if cfg.branch == 'classification':
    return build_classifier(cfg)
  elif cfg.is_segmentation:
    return build_segmenter(cfg)
  from .hierarchy import build_hybridpp
  return build_hybridpp(cfg)

def _features_of(model, batch):
  features = getattr(batch, 'features', batch)
  categories = getattr(batch, 'categories', None)
  features = numpy.asarray(features, dtype=numpy.float64)
  if features.ndim == 2:
    features = features[numpy.newaxis]
  if features.ndim != 3:
    raise ContractError('Expected a batch of clouds (B x N x d), got shape %s.'
                        % (features.shape,))
  if features.shape[-1] != model.config.d:
    raise ContractError('Clouds carry %d features per point, the model expects %d.'
                        % (features.shape[-1], model.config.d))
  return features, categories

def forward(model, batch, mode='eval'):
  '''Runs ``model`` on a batch.

  **Parameters:**

    model : Model
    batch : Batch or numpy.ndarray, shape=(B,N,d) or (N,d)
      Anything with ``features`` (and ``categories`` for part segmentation)
      or a plain feature array.
    mode : {'train', 'eval'}

  **Returns:**

    logits : Value
      B x k (classification) or B x N x m (segmentation).
  '''
  features, categories = _features_of(model, batch)
  model.set_mode(mode)
  return model.forward(constant(features), categories=categories, mode=mode)

def predict_proba(model, batch):
  '''Class probabilities (eval mode).'''
  return softmax(forward(model, batch, mode='eval')).data

def flops_estimate(model, n_points):
  '''Estimates the FLOPs of one sample of ``n_points`` points.

  **Returns:**

    flops : dict
      ``total``, ``terms`` (list of (name, flops)) and ``convention``.
  '''
  terms = model.flop_terms(int(n_points))
  return {'total': sum(t for _, t in terms), 'terms': terms,
          'convention': flops_convention}
