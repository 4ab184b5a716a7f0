# -*- coding: iso-8859-1 -*-
'''Module for the hierarchical set-abstraction encoder.

Every stage samples centroids with farthest-point sampling, groups up to n_b
neighbors per centroid with a fixed-radius ball query, applies stacked shared
KAN layers (each followed by batch normalization) to the centroid-relative
groups and max-pools over the neighbor axis. The last stage groups all
remaining points around the origin. An MLP (or KAN) head maps the global
descriptor to the class logits.
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
from scipy.spatial.distance import cdist

from .autodiff import (constant, concat_features, gather_points, max_pool_points,
                       dropout)
from .models import Model, layer_flops, _features_of
from .tools import ConfigError, DataError, derive_seed, get_rng

def farthest_point_sample(points, count, seed=None, random_start=False):
  '''Greedy max-min selection of ``count`` centroid indices.

  The first centroid is point 0 unless ``random_start`` is set, in which case
  it is drawn with ``seed``. Each further pick maximizes the distance to the
  already selected set (ties go to the lowest index); selected points are
  never picked twice.

  **Parameters:**

    points : numpy.ndarray, shape=(N,3)
    count : int

  **Returns:**

    indices : numpy.ndarray, shape=(count,), dtype=int
  '''
  points = numpy.asarray(points, dtype=numpy.float64)
  n = len(points)
  if count > n:
    raise DataError('Cannot sample %d centroids from %d points.' % (count, n))
  selected = numpy.empty(int(count), dtype=int)
  if count <= 0:
    return selected
  current = get_rng(seed).randint(n) if random_start else 0
  distance = numpy.full(n, numpy.inf)
  for i in range(count):
    selected[i] = current
    d = numpy.sum((points - points[current])**2, axis=1)
    distance = numpy.minimum(distance, d)
    distance[selected[:i+1]] = -1.
    current = int(numpy.argmax(distance))
  return selected

def ball_query(points, centroids, radius, n_b):
  '''Returns up to ``n_b`` neighbor indices within ``radius`` of each centroid,
  in ascending index order, padded by repeating the first neighbor.

  **Parameters:**

    points : numpy.ndarray, shape=(N,3)
    centroids : int or array of int
      Indices of the centroids in ``points``.
    radius : float, > 0
    n_b : int

  **Returns:**

    groups : numpy.ndarray, shape=(n_b,) or (S,n_b), dtype=int
  '''
  if radius <= 0:
    raise ConfigError('The ball query radius has to be positive, got %g.' % radius)
  points = numpy.asarray(points, dtype=numpy.float64)
  single = numpy.ndim(centroids) == 0
  centroids = numpy.atleast_1d(numpy.asarray(centroids, dtype=int))
  n = len(points)
  distance = cdist(points[centroids], points)
  candidates = numpy.where(distance <= radius, numpy.arange(n), n)
  groups = numpy.sort(candidates, axis=1)[:, :n_b]
  if groups.shape[1] < n_b:
    groups = numpy.concatenate([groups, numpy.full((len(centroids), n_b - groups.shape[1]), n)],
                               axis=1)
  first = numpy.where(groups[:, 0] < n, groups[:, 0], centroids)
  groups = numpy.where(groups < n, groups, first[:, numpy.newaxis])
  return groups[0] if single else groups

def group_normalize(points, features, centroid):
  '''Shifts grouped coordinates by ``-centroid``; other features pass unshifted.

  **Parameters:**

    points : numpy.ndarray, shape=(..., n_b, 3)
    features : numpy.ndarray, shape=(..., n_b, c), or None
    centroid : numpy.ndarray, shape=(..., 3)

  **Returns:**

    group : numpy.ndarray, shape=(..., n_b, 3+c)
  '''
  points = numpy.asarray(points, dtype=numpy.float64)
  relative = points - numpy.expand_dims(centroid, -2)
  if features is None:
    return relative
  return numpy.concatenate([relative, features], axis=-1)

class SetAbstraction(object):
  '''One set-abstraction stage. ``count=None`` groups all points (global stage).'''
  def __init__(self, model, index, d_in, widths, count=None, radius=None, n_b=None):
    self.index = index
    self.count = count
    self.radius = radius
    self.n_b = n_b
    self.layers = []
    width = d_in
    for j, w in enumerate(widths):
      kan = model.make_layer('kan', width, w, 'sa%d_%d' % (index, j))
      self.layers.append((kan, model.make_bn(w, 'sa%d_%d_bn' % (index, j))))
      width = w
    self.d_in = d_in
    self.d_out = width

  @property
  def group_all(self):
    return self.count is None

  def sample_and_group(self, xyz, seed=0, random_start=False):
    '''Returns the centroid coordinates (B,S,3) and neighbor indices (B,S,n_b).'''
    n_clouds, n_points = xyz.shape[:2]
    if self.group_all:
      idx = numpy.broadcast_to(numpy.arange(n_points), (n_clouds, 1, n_points))
      return numpy.zeros((n_clouds, 1, 3)), numpy.array(idx)
    if n_points < self.count:
      raise DataError('Set abstraction stage %d needs at least %d points, got %d.'
                      % (self.index, self.count, n_points))
    centroids = numpy.empty((n_clouds, self.count), dtype=int)
    idx = numpy.empty((n_clouds, self.count, self.n_b), dtype=int)
    for b in range(n_clouds):
      centroids[b] = farthest_point_sample(xyz[b], self.count, seed=derive_seed(seed, b),
                                           random_start=random_start)
      idx[b] = ball_query(xyz[b], centroids[b], self.radius, self.n_b)
    new_xyz = numpy.take_along_axis(xyz, centroids[..., numpy.newaxis], axis=1)
    return new_xyz, idx

  def forward(self, xyz, features, mode='eval', seed=0, random_start=False):
    new_xyz, idx = self.sample_and_group(xyz, seed=seed, random_start=random_start)
    bidx = numpy.arange(len(xyz)).reshape(-1, 1, 1)
    if self.group_all:
      grouped_xyz = xyz[bidx, idx]
    else:
      grouped_xyz = group_normalize(xyz[bidx, idx], None, new_xyz)
    x = constant(grouped_xyz)
    if features is not None:
      x = concat_features([x, gather_points(features, idx)])
    for kan, bn in self.layers:
      x = bn.forward(kan.forward(x, mode), mode)
    return new_xyz, max_pool_points(x, axis=-2)

  def flop_terms(self, rows):
    terms = []
    for kan, bn in self.layers:
      terms += [(kan.name, layer_flops(kan, rows)), (bn.name, layer_flops(bn, rows))]
    terms.append(('sa%d_pool' % self.index, rows*self.d_out))
    return terms

class HybridPP(Model):
  '''Set-abstraction KAN encoder with an MLP (or KAN) classification head.'''
  def __init__(self, config):
    Model.__init__(self, config)
    extra = config.d - 3
    if extra < 0:
      raise ConfigError('The hierarchical branch needs xyz coordinates (d >= 3).')
    self.stages = []
    width = extra
    for i, widths in enumerate(config.sa_widths):
      if i < len(config.sa_centroids):
        stage = SetAbstraction(self, i, 3 + width, widths, count=config.sa_centroids[i],
                               radius=config.sa_radii[i], n_b=config.sa_neighbors[i])
      else:
        stage = SetAbstraction(self, i, 3 + width, widths)
      self.stages.append(stage)
      width = stage.d_out
    self.head = []
    for i, w in enumerate(config.decoder_widths):
      layer = self.make_layer(config.head_kind, width, w, 'head%d' % i)
      self.head.append((layer, self.make_bn(w, 'head%d_bn' % i)))
      width = w
    self.output = self.make_layer(config.head_kind, width, config.k, 'output')

  def encode(self, x, mode='eval'):
    '''Runs the set-abstraction stages.

    **Returns:**

      outputs : list of (centroid coordinates, Value)
        One entry per stage, features of shape (B, S, C).
    '''
    xyz = x.data[..., :3]
    features = constant(x.data[..., 3:]) if x.shape[-1] > 3 else None
    outputs = []
    for stage in self.stages:
      xyz, features = stage.forward(xyz, features, mode=mode, seed=self.config.seed,
                                    random_start=self.config.fps_random_start)
      outputs.append((xyz, features))
    return outputs

  def forward(self, x, categories=None, mode='eval'):
    g = self.encode(x, mode)[-1][1]
    g = max_pool_points(g, axis=-2)
    for i, (layer, bn) in enumerate(self.head):
      g = self.hidden(layer, bn, g, mode)
      g = dropout(g, self.config.dropout, mode=mode, seed=self.dropout_seed(i))
    return self.output.forward(g, mode)

  def flop_terms(self, n_points):
    terms = []
    for stage in self.stages:
      if stage.group_all:
        rows = n_points
      else:
        rows = stage.count * stage.n_b
        terms.append(('sa%d_fps' % stage.index, 3*stage.count*n_points))
      terms += stage.flop_terms(rows)
      n_points = stage.count or 1
    for layer, bn in self.head:
      terms += [(layer.name, layer_flops(layer, 1)), (bn.name, layer_flops(bn, 1))]
    terms.append((self.output.name, layer_flops(self.output, 1)))
    return terms

def build_hybridpp(cfg):
  '''Builds the hierarchical branch described by ``cfg``.'''
  if cfg.branch != 'hybridpp':
    raise ConfigError('build_hybridpp requires branch=hybridpp, got %s.' % cfg.branch)
  return HybridPP(cfg)

def sa_forward(stage, points, features=None, mode='eval'):
  '''Runs one stage on ``points`` (B,N,3) with optional per-point features
  (Value, (B,N,C)) and returns the centroid coordinates and pooled features.'''
  points = numpy.asarray(points, dtype=numpy.float64)
  if points.ndim == 2:
    points = points[numpy.newaxis]
  return stage.forward(points, features, mode=mode)

def hybridpp_forward(model, points, mode='eval'):
  '''Class logits of the hierarchical branch for a batch of clouds.'''
  features, _ = _features_of(model, points)
  model.set_mode(mode)
  return model.forward(constant(features), mode=mode)
