# -*- coding: iso-8859-1 -*-
'''Module containing the shared layers (KAN, MLP and batch normalization),
their initialization and the parameter accounting.

A shared layer applies the same parameters to every point, i.e., it acts on
the last axis of its input and treats all leading axes as independent rows.
'''
'''
pointkan

This file is part of pointkan.

pointkan is free software: you can redistribute it and/or modify
it under the terms of the GNU Lesser General Public License as
published by the Free Software Foundation, either version 3 of
the License, or any later version.
'''

import numpy

from .autodiff import (BatchNormState, parameter, tanh, basis_contract, dense,
                       relu, batch_norm)
from .tools import ConfigError, ContractError, get_rng

activations = ['relu', 'none'] #: Activations of the MLP layer.

def _check_width(d_in, d_out):
  for w in (d_in, d_out):
    if int(w) != w or w < 1:
      raise ConfigError('Layer widths have to be positive integers, got %r -> %r.'
                        % (d_in, d_out))
  return int(d_in), int(d_out)

def kan_init(d_in, d_out, params, seed=None):
  '''Draws KAN coefficients i.i.d. from N(0, 1/(d_in*(n+1))).

  **Returns:**

    omega : numpy.ndarray, shape=(n+1, d_in, d_out)
  '''
  n1 = params.degree + 1
  std = numpy.sqrt(1. / (d_in * n1))
  return get_rng(seed).normal(0., std, size=(n1, d_in, d_out))

def mlp_init(d_in, d_out, activation='relu', seed=None):
  '''Draws MLP weights from N(0, 2/d_in) for relu and N(0, 1/d_in) otherwise.
  Biases start at zero.'''
  gain = 2. if activation == 'relu' else 1.
  weight = get_rng(seed).normal(0., numpy.sqrt(gain / d_in), size=(d_in, d_out))
  return weight, numpy.zeros(d_out)

def kan_forward(layer, x):
  '''Applies the KAN layer to every row (last axis) of ``x``.'''
  if x.ndim == 0 or x.shape[-1] != layer.d_in:
    raise ContractError('%s expects %d input features per row, got shape %s.'
                        % (layer.name, layer.d_in, x.shape))
  return basis_contract(tanh(x), layer.omega, layer.params)

class KanLayer(object):
  '''Shared KAN layer: ``out = basis_contract(tanh(x), omega)``.'''
  kind = 'kan'
  def __init__(self, d_in, d_out, params, seed=None, name='kan'):
    self.d_in, self.d_out = _check_width(d_in, d_out)
    self.params = params
    self.name = name
    self.omega = parameter(kan_init(self.d_in, self.d_out, params, seed=seed))

  def forward(self, x, mode='train'):
    return kan_forward(self, x)

  def parameters(self):
    return [('%s.omega' % self.name, self.omega)]

  def buffers(self):
    return []

  def count(self):
    return (self.params.degree + 1) * self.d_in * self.d_out

  def __repr__(self):
    return 'KanLayer(%d -> %d, %r)' % (self.d_in, self.d_out, self.params)

class MlpLayer(object):
  '''Shared affine layer with an optional relu.'''
  kind = 'mlp'
  def __init__(self, d_in, d_out, activation='relu', seed=None, name='mlp'):
    self.d_in, self.d_out = _check_width(d_in, d_out)
    if activation not in activations:
      raise ConfigError('Unknown activation "%s" (choose from "%s").' %
                        (activation, '", "'.join(activations)))
    self.activation = activation
    self.name = name
    weight, bias = mlp_init(self.d_in, self.d_out, activation, seed=seed)
    self.weight = parameter(weight)
    self.bias = parameter(bias)

  def forward(self, x, mode='train'):
    y = dense(x, self.weight, self.bias)
    return relu(y) if self.activation == 'relu' else y

  def parameters(self):
    return [('%s.weight' % self.name, self.weight),
            ('%s.bias' % self.name, self.bias)]

  def buffers(self):
    return []

  def count(self):
    return self.d_in * self.d_out + self.d_out

  def __repr__(self):
    return 'MlpLayer(%d -> %d, %s)' % (self.d_in, self.d_out, self.activation)

class BatchNorm(object):
  '''Batch normalization over the channel (last) axis.'''
  kind = 'bn'
  def __init__(self, channels, momentum=0.9, epsilon=1e-5, name='bn', scale=1.):
    self.d_in, self.d_out = _check_width(channels, channels)
    self.name = name
    self.state = BatchNormState(self.d_in, momentum=momentum, epsilon=epsilon, scale=scale)

  def forward(self, x, mode='train'):
    self.state.mode = mode
    return batch_norm(x, self.state)

  def parameters(self):
    return [('%s.scale' % self.name, self.state.scale),
            ('%s.shift' % self.name, self.state.shift)]

  def buffers(self):
    return [('%s.running_mean' % self.name, 'running_mean'),
            ('%s.running_var' % self.name, 'running_var')]

  def count(self):
    return 2 * self.d_in

  def __repr__(self):
    return 'BatchNorm(%d)' % self.d_in

def param_count(model):
  '''Returns the trainable-parameter breakdown of ``model``.

  KAN layers count (n+1)*d_in*d_out, MLP layers d_in*d_out + d_out and batch
  normalizations 2*C (scale and shift).

  **Returns:**

    count : dict
      ``layers`` (list of (name, kind, count)), the totals per kind
      (``kan``, ``mlp``, ``bn``) and ``total``.
  '''
  count = {'layers': [], 'kan': 0, 'mlp': 0, 'bn': 0}
  for layer in model.layers:
    c = layer.count()
    count['layers'].append((layer.name, layer.kind, c))
    count[layer.kind] += c
  count['total'] = count['kan'] + count['mlp'] + count['bn']
  return count

def kan_width_sum(model):
  '''Sum of d_in*d_out over all KAN layers, i.e., the increase of the
  parameter count per polynomial degree.'''
  return sum(l.d_in * l.d_out for l in model.layers if l.kind == 'kan')
