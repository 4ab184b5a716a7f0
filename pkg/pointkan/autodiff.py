# -*- coding: iso-8859-1 -*-
'''Module containing a minimal reverse-mode differentiation engine.

Only the operations required by the point-cloud networks are provided. All
arrays are channels-last: point-shared operations act on the last axis and
treat every leading axis as an independent point.
'''
'''
pointkan

This file is part of pointkan.

pointkan is free software: you can redistribute it and/or modify
it under the terms of the GNU Lesser General Public License as
published by the Free Software Foundation, either version 3 of
the License, or any later version.
'''

import itertools
from collections import namedtuple

import numpy
from scipy.special import logsumexp

from .jacobi import eval_basis, eval_basis_derivative
from .tools import ContractError, DataError, get_rng

_node_ids = itertools.count()

modes = ['train', 'eval'] #: Possible forward modes.

class Value(object):
  '''Node of the computation record.

  **Attributes:**

    data : numpy.ndarray
      Value of the node (float64).
    grad : numpy.ndarray
      Accumulated gradient, same shape as ``data``.
    requires_grad : bool
      If False, no gradient is propagated into this node.
  '''
  def __init__(self, data, requires_grad=False, parents=(), op='leaf'):
    self.data = numpy.ascontiguousarray(data, dtype=numpy.float64)
    self.grad = numpy.zeros_like(self.data)
    self.requires_grad = bool(requires_grad)
    self.op = op
    self._parents = tuple(p for p in parents if p.requires_grad)
    self._backward = None
    self._id = next(_node_ids)

  @property
  def shape(self):
    return self.data.shape

  @property
  def ndim(self):
    return self.data.ndim

  def item(self):
    return float(self.data)

  def zero_grad(self):
    self.grad = numpy.zeros_like(self.data)

  def __repr__(self):
    return 'Value(shape=%s, op=%s, requires_grad=%s)' % (self.shape, self.op,
                                                         self.requires_grad)

  def __getstate__(self):
    # Closures are not picklable; a pickled node is a detached leaf.
    state = self.__dict__.copy()
    state['_backward'] = None
    state['_parents'] = ()
    return state

  def _topological_order(self):
    order = []
    visited = set()
    stack = [(self, False)]
    while stack:
      node, expanded = stack.pop()
      if expanded:
        order.append(node)
        continue
      if node._id in visited:
        continue
      visited.add(node._id)
      stack.append((node, True))
      for parent in reversed(node._parents):
        if parent._id not in visited:
          stack.append((parent, False))
    return order

  def backward(self, grad=None):
    '''Propagates ``grad`` (default: 1 for scalar nodes) to all nodes of the
    record in reverse topological order. Every node is visited exactly once.'''
    if grad is None:
      if self.data.size != 1:
        raise ContractError('backward() without an explicit gradient requires '
                            'a scalar node, got shape %s.' % (self.shape,))
      grad = numpy.ones_like(self.data)
    grad = numpy.asarray(grad, dtype=numpy.float64)
    if grad.shape != self.shape:
      raise ContractError('Gradient shape %s does not match node shape %s.'
                          % (grad.shape, self.shape))
    self.grad = self.grad + grad
    for node in reversed(self._topological_order()):
      if node._backward is not None:
        node._backward()

  def __add__(self, other):
    return add(self, other)

  __radd__ = __add__

  def __mul__(self, other):
    return mul(self, other)

  __rmul__ = __mul__

  def __neg__(self):
    return mul(self, -1.)

  def __sub__(self, other):
    return add(self, -other if isinstance(other, Value) else -numpy.asarray(other))

  def sum(self):
    return sum_all(self)

def _as_value(x):
  return x if isinstance(x, Value) else Value(x)

def _node(data, parents, op):
  return Value(data, requires_grad=any(p.requires_grad for p in parents),
               parents=parents, op=op)

def _accumulate(node, g):
  if node.requires_grad:
    node.grad += g

def constant(data):
  '''Wraps ``data`` as a node without gradient.'''
  return Value(data, requires_grad=False)

def parameter(data):
  '''Wraps ``data`` as a trainable leaf node.'''
  return Value(data, requires_grad=True)

#--- Elementwise operations ---#

def add(a, b):
  '''Elementwise sum of two equally shaped nodes (or node and scalar).'''
  a, b = _as_value(a), _as_value(b)
  if a.shape != b.shape and b.data.size != 1 and a.data.size != 1:
    raise ContractError('add: shapes %s and %s differ.' % (a.shape, b.shape))
  out = _node(a.data + b.data, (a, b), 'add')
  def _backward():
    for p in (a, b):
      if p.requires_grad:
        g = out.grad
        if p.data.size == 1 and out.data.size != 1:
          g = g.sum().reshape(p.shape)
        p.grad += g
  out._backward = _backward
  return out

def mul(a, b):
  '''Elementwise product of two equally shaped nodes (or node and scalar).'''
  a, b = _as_value(a), _as_value(b)
  if a.shape != b.shape and b.data.size != 1 and a.data.size != 1:
    raise ContractError('mul: shapes %s and %s differ.' % (a.shape, b.shape))
  out = _node(a.data * b.data, (a, b), 'mul')
  def _backward():
    for p, q in ((a, b), (b, a)):
      if p.requires_grad:
        g = out.grad * q.data
        if p.data.size == 1 and out.data.size != 1:
          g = g.sum().reshape(p.shape)
        p.grad += g
  out._backward = _backward
  return out

def sum_all(x):
  '''Sum over all elements (scalar node).'''
  out = _node(numpy.sum(x.data), (x,), 'sum')
  def _backward():
    _accumulate(x, numpy.broadcast_to(out.grad, x.shape))
  out._backward = _backward
  return out

def tanh(x):
  '''Elementwise hyperbolic tangent.'''
  t = numpy.tanh(x.data)
  out = _node(t, (x,), 'tanh')
  def _backward():
    _accumulate(x, (1. - t*t) * out.grad)
  out._backward = _backward
  return out

def relu(x):
  '''Elementwise rectifier.'''
  mask = x.data > 0
  out = _node(x.data * mask, (x,), 'relu')
  def _backward():
    _accumulate(x, out.grad * mask)
  out._backward = _backward
  return out

#--- Layer operations ---#

def basis_contract(x, omega, params):
  '''Contracts the Jacobi basis of ``x`` with the coefficient tensor ``omega``:

    out[p,j] = sum_i sum_c omega[i,c,j] f_i(x[p,c])

  **Parameters:**

    x : Value, shape=(..., d_in)
      Inputs, already scaled to [-1,1].
    omega : Value, shape=(n+1, d_in, d_out)
    params : JacobiParams

  **Returns:**

    out : Value, shape=(..., d_out)
  '''
  n1 = params.degree + 1
  d_in = x.shape[-1]
  if omega.ndim != 3 or omega.shape[:2] != (n1, d_in):
    raise ContractError('basis_contract: omega of shape %s does not match '
                        '(n+1, d_in) = (%d, %d).' % (omega.shape, n1, d_in))
  d_out = omega.shape[2]
  lead = x.shape[:-1]
  xf = x.data.reshape(-1, d_in)
  m = xf.shape[0]
  basis = eval_basis(params, xf)                               # (m, d_in, n+1)
  phi = basis.transpose(0, 2, 1).reshape(m, n1*d_in)
  w = omega.data.reshape(n1*d_in, d_out)
  out = _node(numpy.dot(phi, w).reshape(lead + (d_out,)), (x, omega), 'basis_contract')
  def _backward():
    g = out.grad.reshape(m, d_out)
    if omega.requires_grad:
      omega.grad += numpy.dot(phi.T, g).reshape(omega.shape)
    if x.requires_grad:
      dphi = numpy.dot(g, w.T).reshape(m, n1, d_in)
      dbasis = eval_basis_derivative(params, xf, basis).transpose(0, 2, 1)
      x.grad += numpy.sum(dphi*dbasis, axis=1).reshape(x.shape)
  out._backward = _backward
  return out

def dense(x, weight, bias=None):
  '''Shared affine map ``x @ weight + bias`` over the last axis.'''
  d_in = x.shape[-1]
  if weight.ndim != 2 or weight.shape[0] != d_in:
    raise ContractError('dense: weight of shape %s does not match d_in=%d.'
                        % (weight.shape, d_in))
  d_out = weight.shape[1]
  lead = x.shape[:-1]
  xf = x.data.reshape(-1, d_in)
  y = numpy.dot(xf, weight.data)
  parents = (x, weight)
  if bias is not None:
    y = y + bias.data
    parents = parents + (bias,)
  out = _node(y.reshape(lead + (d_out,)), parents, 'dense')
  def _backward():
    g = out.grad.reshape(-1, d_out)
    if weight.requires_grad:
      weight.grad += numpy.dot(xf.T, g)
    if bias is not None and bias.requires_grad:
      bias.grad += g.sum(axis=0)
    if x.requires_grad:
      x.grad += numpy.dot(g, weight.data.T).reshape(x.shape)
  out._backward = _backward
  return out

class BatchNormState(object):
  '''Trainable scale/shift and running statistics of one batch normalization.

  ``momentum`` weights the running statistics:
  running <- momentum*running + (1-momentum)*batch.
  '''
  def __init__(self, channels, momentum=0.9, epsilon=1e-5, mode='train', scale=1.):
    self.channels = int(channels)
    self.scale = parameter(numpy.full(self.channels, float(scale)))
    self.shift = parameter(numpy.zeros(channels))
    self.running_mean = numpy.zeros(channels)
    self.running_var = numpy.ones(channels)
    self.momentum = float(momentum)
    self.epsilon = float(epsilon)
    self.mode = mode

def batch_norm(x, state):
  '''Batch normalization over all non-channel axes of ``x`` (channels last).

  In train mode the batch statistics are used and the running statistics are
  updated; in eval mode only the running statistics are used.
  '''
  c = x.shape[-1]
  if c != state.channels:
    raise ContractError('batch_norm: %d channels expected, got %d.'
                        % (state.channels, c))
  xf = x.data.reshape(-1, c)
  m = xf.shape[0]
  scale, shift = state.scale, state.shift
  if state.mode == 'train':
    mean = xf.mean(axis=0)
    var = xf.var(axis=0)
    unbiased = var * m / (m - 1.) if m > 1 else var
    state.running_mean = state.momentum*state.running_mean + (1. - state.momentum)*mean
    state.running_var = state.momentum*state.running_var + (1. - state.momentum)*unbiased
  elif state.mode == 'eval':
    mean = state.running_mean
    var = state.running_var
  else:
    raise ContractError('Unknown mode "%s" (choose from "%s").' % (state.mode, '", "'.join(modes)))
  inv = 1. / numpy.sqrt(var + state.epsilon)
  xhat = (xf - mean) * inv
  y = scale.data*xhat + shift.data
  out = _node(y.reshape(x.shape), (x, scale, shift), 'batch_norm')
  train = (state.mode == 'train')
  def _backward():
    g = out.grad.reshape(m, c)
    if scale.requires_grad:
      scale.grad += numpy.sum(g*xhat, axis=0)
    if shift.requires_grad:
      shift.grad += numpy.sum(g, axis=0)
    if x.requires_grad:
      dxhat = g * scale.data
      if train:
        dx = inv/m * (m*dxhat - dxhat.sum(axis=0) - xhat*numpy.sum(dxhat*xhat, axis=0))
      else:
        dx = dxhat * inv
      x.grad += dx.reshape(x.shape)
  out._backward = _backward
  return out

def max_pool_points(x, axis=-2):
  '''Per-channel maximum over the point axis (default: second to last).
  The gradient of each channel is routed to its argmax point only; ties go to
  the lowest point index.'''
  if x.ndim < 2:
    raise ContractError('max_pool_points expects at least a 2d node (N x C).')
  if x.shape[axis] == 0:
    raise ContractError('max_pool_points: empty point cloud.')
  idx = numpy.expand_dims(numpy.argmax(x.data, axis=axis), axis)
  y = numpy.take_along_axis(x.data, idx, axis=axis)
  out = _node(numpy.squeeze(y, axis=axis), (x,), 'max_pool')
  def _backward():
    if x.requires_grad:
      g = numpy.zeros_like(x.data)
      numpy.put_along_axis(g, idx, numpy.expand_dims(out.grad, axis), axis=axis)
      x.grad += g
  out._backward = _backward
  return out

def concat_features(parts, axis=-1):
  '''Concatenates nodes along the channel axis.'''
  parts = [_as_value(p) for p in parts]
  if not parts:
    raise ContractError('concat_features: nothing to concatenate.')
  lead = parts[0].shape[:-1]
  for p in parts:
    if p.shape[:-1] != lead:
      raise ContractError('concat_features: leading shapes %s and %s differ.'
                          % (lead, p.shape[:-1]))
  sizes = [p.shape[-1] for p in parts]
  offsets = numpy.cumsum([0] + sizes)
  out = _node(numpy.concatenate([p.data for p in parts], axis=-1), parts, 'concat')
  def _backward():
    for p, i0, i1 in zip(parts, offsets[:-1], offsets[1:]):
      if p.requires_grad:
        p.grad += out.grad[..., i0:i1]
  out._backward = _backward
  return out

def tile_global(g, n):
  '''Replicates the global feature ``g`` (..., C) to (..., n, C).'''
  n = int(n)
  data = numpy.repeat(numpy.expand_dims(g.data, -2), n, axis=-2)
  out = _node(data, (g,), 'tile')
  def _backward():
    _accumulate(g, out.grad.sum(axis=-2))
  out._backward = _backward
  return out

def gather_points(x, idx):
  '''Gathers rows of ``x`` (B, N, C) with integer indices ``idx`` (B, ...),
  returning (B, ..., C). Gradients of repeated indices are summed.'''
  idx = numpy.asarray(idx, dtype=int)
  if x.ndim != 3 or idx.shape[0] != x.shape[0]:
    raise ContractError('gather_points: expected x (B,N,C) and idx (B,...), got %s and %s.'
                        % (x.shape, idx.shape))
  if idx.size and (idx.min() < 0 or idx.max() >= x.shape[1]):
    raise ContractError('gather_points: index outside [0,%d).' % x.shape[1])
  bidx = numpy.arange(x.shape[0]).reshape((-1,) + (1,)*(idx.ndim - 1))
  bidx = numpy.broadcast_to(bidx, idx.shape)
  out = _node(x.data[bidx, idx], (x,), 'gather')
  def _backward():
    if x.requires_grad:
      numpy.add.at(x.grad, (bidx, idx), out.grad)
  out._backward = _backward
  return out

#--- Output operations ---#

def softmax(logits):
  '''Class probabilities over the last axis.'''
  lse = logsumexp(logits.data, axis=-1, keepdims=True)
  p = numpy.exp(logits.data - lse)
  out = _node(p, (logits,), 'softmax')
  def _backward():
    g = out.grad
    _accumulate(logits, p*(g - numpy.sum(g*p, axis=-1, keepdims=True)))
  out._backward = _backward
  return out

def log_softmax_cross_entropy(logits, targets):
  '''Mean negative log-likelihood of integer ``targets`` under the softmax of
  ``logits`` (last axis), computed with a fused log-sum-exp.

  **Parameters:**

    logits : Value, shape=(B,k) or (B,N,m)
    targets : array of int, shape=logits.shape[:-1]

  **Returns:**

    loss : Value (scalar)
  '''
  k = logits.shape[-1]
  targets = numpy.asarray(targets)
  if targets.shape != logits.shape[:-1]:
    raise ContractError('Targets of shape %s do not match logits of shape %s.'
                        % (targets.shape, logits.shape))
  lf = logits.data.reshape(-1, k)
  t = targets.reshape(-1).astype(int)
  bad = numpy.flatnonzero((t < 0) | (t >= k))
  if bad.size:
    raise DataError('Target %d at index %d outside [0,%d).' % (t[bad[0]], bad[0], k))
  m = lf.shape[0]
  rows = numpy.arange(m)
  lse = logsumexp(lf, axis=1)
  out = _node(numpy.mean(lse - lf[rows, t]), (logits,), 'cross_entropy')
  def _backward():
    if logits.requires_grad:
      p = numpy.exp(lf - lse[:, numpy.newaxis])
      p[rows, t] -= 1.
      logits.grad += (p * (out.grad / m)).reshape(logits.shape)
  out._backward = _backward
  return out

def dropout(x, rate, mode='train', seed=None):
  '''Inverted dropout. Identity in eval mode or for ``rate=0``.

  **Parameters:**

    rate : float, 0 <= rate < 1
    seed : int or numpy.random.RandomState, optional
      Source of the mask; a fixed seed reproduces the mask.
  '''
  if not 0 <= rate < 1:
    raise ContractError('Dropout rate has to lie in [0,1), got %g.' % rate)
  if mode != 'train' or rate == 0:
    return x
  rng = get_rng(seed)
  mask = (rng.random_sample(x.shape) >= rate) / (1. - rate)
  out = _node(x.data * mask, (x,), 'dropout')
  def _backward():
    _accumulate(x, out.grad * mask)
  out._backward = _backward
  return out

#--- Gradient checking ---#

GradCheckReport = namedtuple('GradCheckReport', ['max_rel_error', 'passed', 'tol', 'errors'])

def grad_check(fn, inputs, h=1e-5, tol=1e-4):
  '''Compares analytic gradients with central finite differences.

  **Parameters:**

    fn : callable
      Builds a fresh record from ``inputs`` and returns a scalar Value.
    inputs : list of Value
      Leaf nodes with ``requires_grad=True``; their data is perturbed in place.
    h : float
      Finite-difference step.
    tol : float
      Acceptance threshold on the maximum relative error.

  **Returns:**

    report : GradCheckReport
      ``errors`` holds one array of relative errors
      |a-b|/max(|a|,|b|,1e-8) per input.
  '''
  for v in inputs:
    v.zero_grad()
  fn().backward()
  analytic = [v.grad.copy() for v in inputs]
  errors = []
  for v, a in zip(inputs, analytic):
    flat = v.data.reshape(-1)
    numeric = numpy.empty(flat.size)
    for i in range(flat.size):
      old = flat[i]
      flat[i] = old + h
      fp = fn().item()
      flat[i] = old - h
      fm = fn().item()
      flat[i] = old
      numeric[i] = (fp - fm) / (2.*h)
    a = a.reshape(-1)
    scale = numpy.maximum(numpy.maximum(numpy.abs(a), numpy.abs(numeric)), 1e-8)
    errors.append((numpy.abs(a - numeric) / scale).reshape(v.shape))
  max_err = max([float(e.max()) if e.size else 0. for e in errors] + [0.])
  return GradCheckReport(max_err, max_err < tol, tol, errors)
