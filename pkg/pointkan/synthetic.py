# -*- coding: iso-8859-1 -*-
'''Module for the generation of desk-scale synthetic datasets.

Shapes are sampled analytically on their surface, randomly rotated, jittered
and normalized into the unit sphere. Every item uses its own seed
(seed xor item index), so datasets are reproducible item by item.

Shape classes: sphere, cube, cylinder, torus and a two-part mug (body with
part label 0, handle with part label 1).
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

import numpy
from scipy.spatial.transform import Rotation

from .pointcloud import PointCloud, Dataset
from .sampling import normalize_unit_sphere
from .tools import ConfigError, derive_seed, get_rng

_torus_radii = (1.0, 0.35)  # major and minor radius
_mug_body = (0.6, 1.6)      # radius and height
_mug_handle = (0.45, 0.12)  # ring and tube radius

def _sphere(n, rng):
  p = rng.normal(size=(n, 3))
  p /= numpy.linalg.norm(p, axis=1)[:, None]
  return p, p.copy()

def _cube(n, rng):
  axis = rng.randint(3, size=n)
  sign = rng.choice([-1., 1.], size=n)
  p = rng.uniform(-1., 1., size=(n, 3))
  normals = numpy.zeros((n, 3))
  rows = numpy.arange(n)
  p[rows, axis] = sign
  normals[rows, axis] = sign
  return p, normals

def _cylinder_parts(n, rng, radius, height, caps=(True, True)):
  '''Open or closed cylinder around z with its base at z=-height/2.'''
  areas = [2*numpy.pi*radius*height] + [numpy.pi*radius**2 if c else 0. for c in caps]
  areas = numpy.array(areas)
  part = rng.choice(3, size=n, p=areas/areas.sum())
  phi = rng.uniform(0., 2*numpy.pi, size=n)
  r = radius*numpy.sqrt(rng.random_sample(n))
  z = rng.uniform(-0.5*height, 0.5*height, size=n)
  p = numpy.empty((n, 3))
  normals = numpy.zeros((n, 3))
  side = part == 0
  p[side] = numpy.column_stack([radius*numpy.cos(phi[side]), radius*numpy.sin(phi[side]), z[side]])
  normals[side] = numpy.column_stack([numpy.cos(phi[side]), numpy.sin(phi[side]),
                                      numpy.zeros(side.sum())])
  for index, zc, nz in [(1, -0.5*height, -1.), (2, 0.5*height, 1.)]:
    m = part == index
    p[m] = numpy.column_stack([r[m]*numpy.cos(phi[m]), r[m]*numpy.sin(phi[m]),
                               numpy.full(m.sum(), zc)])
    normals[m, 2] = nz
  return p, normals

def _cylinder(n, rng):
  return _cylinder_parts(n, rng, 1.0, 2.0)

def _torus_points(n, rng, major, minor, theta_range=(0., 2*numpy.pi)):
  '''Area-uniform samples of a torus around z (rejection on the tube angle).'''
  out_phi = numpy.empty(0)
  out_theta = numpy.empty(0)
  while len(out_phi) < n:
    m = 2*(n - len(out_phi)) + 8
    phi = rng.uniform(0., 2*numpy.pi, size=m)
    theta = rng.uniform(theta_range[0], theta_range[1], size=m)
    keep = rng.random_sample(m) * (major + minor) <= major + minor*numpy.cos(phi)
    out_phi = numpy.concatenate([out_phi, phi[keep]])
    out_theta = numpy.concatenate([out_theta, theta[keep]])
  phi, theta = out_phi[:n], out_theta[:n]
  normals = numpy.column_stack([numpy.cos(phi)*numpy.cos(theta), numpy.cos(phi)*numpy.sin(theta),
                                numpy.sin(phi)])
  ring = numpy.column_stack([major*numpy.cos(theta), major*numpy.sin(theta), numpy.zeros(n)])
  return ring + minor*normals, normals

def _torus(n, rng):
  return _torus_points(n, rng, *_torus_radii)

def _mug(n, rng):
  '''Open-top cylindrical body (label 0) with a half-ring handle (label 1).'''
  radius, height = _mug_body
  major, minor = _mug_handle
  body_area = 2*numpy.pi*radius*height + numpy.pi*radius**2
  handle_area = 2*numpy.pi**2*major*minor
  n_handle = int(round(n*handle_area/(body_area + handle_area)))
  n_handle = min(max(n_handle, 1), n - 1)
  body, body_normals = _cylinder_parts(n - n_handle, rng, radius, height, caps=(True, False))
  handle, handle_normals = _torus_points(n_handle, rng, major, minor,
                                         theta_range=(-0.5*numpy.pi, 0.5*numpy.pi))
  # ring in the xz plane, attached to the body at x=radius
  swap = numpy.array([[1., 0., 0.], [0., 0., 1.], [0., 1., 0.]])
  handle = handle.dot(swap) + numpy.array([radius, 0., 0.])
  handle_normals = handle_normals.dot(swap)
  labels = numpy.concatenate([numpy.zeros(n - n_handle, dtype=int),
                              numpy.ones(n_handle, dtype=int)])
  return (numpy.vstack([body, handle]), numpy.vstack([body_normals, handle_normals]),
          labels)

generators = OrderedDict([('sphere', _sphere),
                          ('cube', _cube),
                          ('cylinder', _cylinder),
                          ('torus', _torus),
                          ('mug', _mug),
                          ]) #: Synthetic shape classes.

part_shapes = ['mug'] #: Classes carrying per-point part labels.

def sample_shape(name, n_points, seed=None, with_normals=False, jitter=0.02,
                 rotate=True, normalize=True):
  '''Samples one synthetic shape.

  **Parameters:**

    name : str
      One of :data:`generators`.
    n_points : int
    seed : int or numpy.random.RandomState
    with_normals : bool
      If True, the analytic surface normals are appended (d=6).
    jitter : float
      Standard deviation of the Gaussian coordinate noise.
    rotate : bool
      If True, a uniformly random rotation is applied.
    normalize : bool
      If True, the cloud is normalized into the unit sphere.

  **Returns:**

    pc : PointCloud
      Part labels are set for the part shapes only.
  '''
  if name not in generators:
    raise ConfigError('Unknown synthetic shape "%s" (choose from "%s").' %
                      (name, '", "'.join(generators)))
  rng = get_rng(seed)
  result = generators[name](int(n_points), rng)
  points, normals = result[:2]
  labels = result[2] if len(result) > 2 else None
  if jitter:
    points = points + rng.normal(0., jitter, size=points.shape)
  if rotate:
    rot = Rotation.random(random_state=rng).as_matrix()
    points = points.dot(rot.T)
    normals = normals.dot(rot.T)
  features = numpy.hstack([points, normals]) if with_normals else points
  pc = PointCloud(features, point_labels=labels)
  if normalize:
    pc = normalize_unit_sphere(pc)
  return pc

def gen_synthetic(classes=('sphere', 'cube', 'cylinder', 'torus'), counts=10,
                  n_points=256, seed=0, with_normals=False, jitter=0.02,
                  rotate=True, offset=0):
  '''Generates labeled synthetic clouds.

  **Parameters:**

    classes : sequence of str
      Shape classes; the shape label is the position in this sequence.
    counts : int or sequence of int
      Clouds per class.
    n_points : int
    seed : int
      Item i is generated with seed xor (offset + i).
    offset : int
      Item counter offset (e.g. to draw a test split with the same seed).

  **Returns:**

    clouds : list of PointCloud
      Mug clouds carry part labels (body=0, handle=1); every cloud has the
      category equal to its shape label.
  '''
  classes = list(classes)
  if isinstance(counts, int):
    counts = [counts]*len(classes)
  if len(counts) != len(classes):
    raise ConfigError('%d counts given for %d classes.' % (len(counts), len(classes)))
  with_parts = any(c in part_shapes for c in classes)
  clouds = []
  item = int(offset)
  for label, (name, count) in enumerate(zip(classes, counts)):
    for _ in range(count):
      pc = sample_shape(name, n_points, seed=derive_seed(seed, item),
                        with_normals=with_normals, jitter=jitter, rotate=rotate)
      if with_parts and pc.point_labels is None:
        pc.point_labels = numpy.zeros(pc.N, dtype=int)
      pc.shape_label = label
      pc.category = label
      pc.name = '%s_%06d.txt' % (name, item)
      clouds.append(pc)
      item += 1
  return clouds

def make_dataset(classes=('sphere', 'cube', 'cylinder', 'torus'), train=200, test=50,
                 n_points=256, seed=0, with_normals=False, jitter=0.02, val=0):
  '''Generates a synthetic dataset with ``train`` and ``test`` clouds per class.

  With ``val`` > 0 a third split ``val`` of as many clouds per class is drawn
  after the test clouds; the train and test clouds do not depend on it.
  '''
  classes = list(classes)
  def total(counts):
    return len(classes)*counts if isinstance(counts, int) else sum(counts)
  train_clouds = gen_synthetic(classes, train, n_points, seed, with_normals, jitter)
  test_clouds = gen_synthetic(classes, test, n_points, seed, with_normals, jitter,
                              offset=total(train))
  splits = OrderedDict([('train', [pc.name for pc in train_clouds])])
  val_clouds = []
  if total(val):
    val_clouds = gen_synthetic(classes, val, n_points, seed, with_normals, jitter,
                               offset=total(train) + total(test))
    splits['val'] = [pc.name for pc in val_clouds]
  splits['test'] = [pc.name for pc in test_clouds]
  parts = None
  if any(c in part_shapes for c in classes):
    parts = dict((i, [0, 1] if c in part_shapes else [0]) for i, c in enumerate(classes))
  return Dataset(train_clouds + val_clouds + test_clouds, classes, splits, parts=parts)
