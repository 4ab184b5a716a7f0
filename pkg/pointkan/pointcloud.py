# -*- coding: iso-8859-1 -*-
'''Module containing the point-cloud, mesh and dataset classes.

Feature columns of a :class:`PointCloud` are xyz first, followed by the
optional normals (nx, ny, nz) and further extras (e.g. rgb and the
room-normalized position of scene blocks).
'''
'''
pointkan

This file is part of pointkan.

pointkan is free software: you can redistribute it and/or modify
it under the terms of the GNU Lesser General Public License as
published by the Free Software Foundation, either version 3 of
the License, or any later version.
'''

from collections import OrderedDict, namedtuple
import hashlib

import numpy

from .tools import DataError

#: A stacked mini-batch of equally sized clouds.
Batch = namedtuple('Batch', ['features', 'shape_labels', 'point_labels',
                             'categories', 'indices'])

class PointCloud(object):
  '''N x d matrix of per-point features with optional labels.

  **Attributes:**

    features : numpy.ndarray, shape=(N,d)
    point_labels : numpy.ndarray of int, shape=(N,), or None
    shape_label : int or None
    category : int or None
      Object category (one-hot input of the part segmentation).
    name : str or None
  '''
  def __init__(self, features, point_labels=None, shape_label=None, category=None,
               name=None):
    features = numpy.array(features, dtype=numpy.float64)
    if features.ndim == 1 and features.size == 0:
      features = features.reshape(0, 3)
    if features.ndim != 2:
      raise DataError('Point features have to be an N x d matrix, got shape %s.'
                      % (features.shape,))
    self.features = features
    if point_labels is not None:
      point_labels = numpy.array(point_labels, dtype=int).reshape(-1)
      if len(point_labels) != len(features):
        raise DataError('%d point labels given for %d points.'
                        % (len(point_labels), len(features)))
    self.point_labels = point_labels
    self.shape_label = None if shape_label is None or shape_label < 0 else int(shape_label)
    self.category = None if category is None or category < 0 else int(category)
    self.name = name

  @property
  def N(self):
    return self.features.shape[0]

  @property
  def d(self):
    return self.features.shape[1]

  @property
  def xyz(self):
    return self.features[:, :3]

  @property
  def normals(self):
    return self.features[:, 3:6] if self.d >= 6 else None

  @property
  def has_point_labels(self):
    return self.point_labels is not None

  def copy(self, features=None):
    return PointCloud(self.features.copy() if features is None else features,
                      point_labels=None if self.point_labels is None else self.point_labels.copy(),
                      shape_label=self.shape_label, category=self.category,
                      name=self.name)

  def subset(self, indices):
    '''Returns the cloud restricted to ``indices`` with aligned labels.'''
    indices = numpy.asarray(indices, dtype=int)
    return PointCloud(self.features[indices],
                      point_labels=None if self.point_labels is None else self.point_labels[indices],
                      shape_label=self.shape_label, category=self.category,
                      name=self.name)

  def __eq__(self, other):
    if not isinstance(other, PointCloud):
      return NotImplemented
    same_labels = ((self.point_labels is None and other.point_labels is None) or
                   (self.point_labels is not None and other.point_labels is not None
                    and numpy.array_equal(self.point_labels, other.point_labels)))
    return (self.features.shape == other.features.shape
            and numpy.array_equal(self.features, other.features) and same_labels
            and self.shape_label == other.shape_label
            and self.category == other.category)

  def __ne__(self, other):
    return not self == other

  def __repr__(self):
    return 'PointCloud(N=%d, d=%d, shape_label=%s, category=%s)' % (
        self.N, self.d, self.shape_label, self.category)

class TriangleMesh(object):
  '''Triangle mesh with V x 3 vertices and F x 3 vertex indices.'''
  def __init__(self, vertices, faces):
    self.vertices = numpy.array(vertices, dtype=numpy.float64).reshape(-1, 3)
    self.faces = numpy.array(faces, dtype=int).reshape(-1, 3)
    if self.faces.size and (self.faces.min() < 0 or
                            self.faces.max() >= len(self.vertices)):
      raise DataError('Face indices outside [0,%d).' % len(self.vertices))

  def cross(self):
    v = self.vertices[self.faces]
    return numpy.cross(v[:, 1] - v[:, 0], v[:, 2] - v[:, 0])

  def areas(self):
    '''Face areas (zero for degenerate faces).'''
    return 0.5*numpy.linalg.norm(self.cross(), axis=1)

  def face_normals(self):
    '''Unit face normals; degenerate faces get the zero vector.'''
    c = self.cross()
    norm = numpy.linalg.norm(c, axis=1)
    out = numpy.zeros_like(c)
    ok = norm > 0
    out[ok] = c[ok] / norm[ok, numpy.newaxis]
    return out

  def __repr__(self):
    return 'TriangleMesh(V=%d, F=%d)' % (len(self.vertices), len(self.faces))

class Dataset(object):
  '''Collection of clouds with class names and named splits.

  **Attributes:**

    clouds : list of PointCloud
      Every cloud carries a unique ``name`` (its file name on disk).
    class_names : list of str
    splits : OrderedDict
      Split name -> list of cloud names. Splits may be empty.
    parts : dict or None
      Category -> list of part labels (part segmentation).
  '''
  version = 1

  def __init__(self, clouds, class_names=(), splits=None, parts=None):
    self.clouds = list(clouds)
    for i, pc in enumerate(self.clouds):
      if pc.name is None:
        pc.name = 'cloud_%06d.txt' % i
    names = [pc.name for pc in self.clouds]
    if len(set(names)) != len(names):
      raise DataError('Cloud names of a dataset have to be unique.')
    self._index = dict((name, i) for i, name in enumerate(names))
    self.class_names = list(class_names)
    if splits is None:
      splits = OrderedDict([('train', names)])
    self.splits = OrderedDict((key, list(value)) for key, value in splits.items())
    for key, value in self.splits.items():
      missing = [v for v in value if v not in self._index]
      if missing:
        raise DataError('Split "%s" lists unknown cloud "%s".' % (key, missing[0]))
    self.parts = None if parts is None else dict((int(c), sorted(int(p) for p in v))
                                                 for c, v in parts.items())
    ds = set(pc.d for pc in self.clouds)
    if len(ds) > 1:
      raise DataError('All clouds of a dataset need the same number of features, got %s.'
                      % sorted(ds))

  @property
  def d(self):
    return self.clouds[0].d if self.clouds else 0

  def __len__(self):
    return len(self.clouds)

  def __getitem__(self, index):
    return self.clouds[index]

  def __iter__(self):
    return iter(self.clouds)

  def split(self, name):
    '''Returns the clouds of split ``name`` as a new dataset.'''
    if name not in self.splits:
      raise DataError('Dataset has no split "%s" (available: %s).'
                      % (name, ', '.join(self.splits) or 'none'))
    clouds = [self.clouds[self._index[n]] for n in self.splits[name]]
    return Dataset(clouds, self.class_names, OrderedDict([(name, self.splits[name])]),
                   parts=self.parts)

  def has_split(self, name):
    return name in self.splits

  def shape_labels(self):
    return numpy.array([-1 if pc.shape_label is None else pc.shape_label
                        for pc in self.clouds], dtype=int)

  def category_parts(self):
    '''Category -> sorted part labels, from ``parts`` or from the point labels.'''
    if self.parts is not None:
      return self.parts
    parts = {}
    for pc in self.clouds:
      if pc.point_labels is not None and pc.category is not None:
        parts.setdefault(pc.category, set()).update(numpy.unique(pc.point_labels).tolist())
    return dict((c, sorted(v)) for c, v in parts.items())

  def batch(self, indices):
    '''Stacks the clouds ``indices`` into a :class:`Batch`.'''
    clouds = [self.clouds[i] for i in indices]
    if not clouds:
      raise DataError('Cannot build an empty batch.')
    sizes = set(pc.N for pc in clouds)
    if len(sizes) > 1:
      raise DataError('Clouds of one batch need the same number of points, got %s.'
                      % sorted(sizes))
    features = numpy.stack([pc.features for pc in clouds])
    shape_labels = numpy.array([-1 if pc.shape_label is None else pc.shape_label
                                for pc in clouds], dtype=int)
    point_labels = None
    if all(pc.point_labels is not None for pc in clouds):
      point_labels = numpy.stack([pc.point_labels for pc in clouds])
    categories = None
    if all(pc.category is not None for pc in clouds):
      categories = numpy.array([pc.category for pc in clouds], dtype=int)
    return Batch(features, shape_labels, point_labels, categories,
                 numpy.asarray(indices, dtype=int))

  def batches(self, batch_size, order=None):
    '''Yields consecutive batches following ``order`` (default: stored order).'''
    order = numpy.arange(len(self)) if order is None else numpy.asarray(order)
    for start in range(0, len(order), batch_size):
      yield self.batch(order[start:start + batch_size])

  def content_hash(self):
    '''SHA-1 over features, labels and split lists.'''
    h = hashlib.sha1()
    for pc in self.clouds:
      h.update(pc.name.encode('utf-8'))
      h.update(numpy.ascontiguousarray(pc.features).tobytes())
      if pc.point_labels is not None:
        h.update(numpy.ascontiguousarray(pc.point_labels, dtype='<i8').tobytes())
      h.update(('%s %s' % (pc.shape_label, pc.category)).encode('utf-8'))
    for key, value in self.splits.items():
      h.update(('%s:%s' % (key, ','.join(value))).encode('utf-8'))
    return h.hexdigest()

  def __eq__(self, other):
    if not isinstance(other, Dataset):
      return NotImplemented
    return (self.class_names == other.class_names and self.splits == other.splits
            and len(self) == len(other)
            and all(a == b and a.name == b.name for a, b in zip(self.clouds, other.clouds)))

  def __ne__(self, other):
    return not self == other

  def __repr__(self):
    return 'Dataset(%d clouds, d=%d, classes=%s, splits=%s)' % (
        len(self), self.d, self.class_names,
        dict((k, len(v)) for k, v in self.splits.items()))
