# -*- coding: iso-8859-1 -*-
'''Module for mesh surface sampling, normalization, point dropping and the
block partition of labeled scenes.'''
'''
pointkan

This file is part of pointkan.

pointkan is free software: you can redistribute it and/or modify
it under the terms of the GNU Lesser General Public License as
published by the Free Software Foundation, either version 3 of
the License, or any later version.
'''

import numpy

from .pointcloud import PointCloud
from .tools import DataError, get_rng

def sample_mesh(mesh, n_points, seed=None, with_normals=False, shape_label=None,
                name=None):
  '''Samples points uniformly on the surface of a triangle mesh.

  Faces are drawn with probability proportional to their area, points are
  barycentric-uniform within the face. Degenerate faces are never drawn.

  **Parameters:**

    mesh : TriangleMesh
    n_points : int
    seed : int or numpy.random.RandomState
    with_normals : bool
      If True, the unit normal of the source face is appended (d=6).

  **Returns:**

    pc : PointCloud
  '''
  areas = mesh.areas()
  total = areas.sum() if areas.size else 0.
  if not total > 0:
    raise DataError('Cannot sample a mesh with zero total area.')
  rng = get_rng(seed)
  faces = rng.choice(len(areas), size=int(n_points), p=areas/total)
  r1 = numpy.sqrt(rng.random_sample(int(n_points)))
  r2 = rng.random_sample(int(n_points))
  v = mesh.vertices[mesh.faces[faces]]
  points = ((1. - r1)[:, None]*v[:, 0] + (r1*(1. - r2))[:, None]*v[:, 1]
            + (r1*r2)[:, None]*v[:, 2])
  if with_normals:
    points = numpy.hstack([points, mesh.face_normals()[faces]])
  return PointCloud(points, shape_label=shape_label, name=name)

def normalize_unit_sphere(pc):
  '''Subtracts the centroid and divides the coordinates by the largest point
  norm. Normals and other columns are left unchanged.'''
  if pc.N < 1:
    raise DataError('Cannot normalize an empty cloud.')
  xyz = pc.xyz - pc.xyz.mean(axis=0)
  scale = numpy.max(numpy.linalg.norm(xyz, axis=1))
  if not scale > 0:
    raise DataError('Cannot normalize a cloud consisting of a single repeated point.')
  features = pc.features.copy()
  features[:, :3] = xyz / scale
  return pc.copy(features=features)

normalize_unit_ball = normalize_unit_sphere

def drop_points(pc, keep, seed=None):
  '''Keeps a uniform random subset of ``keep`` points (without replacement).'''
  if keep > pc.N:
    raise DataError('Cannot keep %d of %d points.' % (keep, pc.N))
  if keep < 1:
    raise DataError('At least one point has to be kept, got keep=%d.' % keep)
  return pc.subset(get_rng(seed).permutation(pc.N)[:keep])

def resample(pc, n_points, seed=None):
  '''Draws exactly ``n_points`` points: without replacement if the cloud is
  large enough, otherwise all points plus random repetitions.'''
  rng = get_rng(seed)
  if pc.N >= n_points:
    idx = rng.choice(pc.N, n_points, replace=False)
  else:
    idx = numpy.concatenate([numpy.arange(pc.N), rng.choice(pc.N, n_points - pc.N)])
  return pc.subset(idx)

def block_partition(scene, block=1.0, points_per_block=4096, seed=None):
  '''Partitions a labeled scene into block x block columns of the xy plane.

  **Parameters:**

    scene : PointCloud
      Features xyz + rgb (rgb in [0,1]) and per-point labels.
    block : float
      Edge length of the blocks (m).
    points_per_block : int
      Every block is resampled to this size; with replacement if it holds
      fewer points.

  **Returns:**

    blocks : list of PointCloud
      Features xyz, rgb and the position normalized to the room extents
      (d=9). Empty blocks are skipped.
  '''
  if scene.d < 6:
    raise DataError('Scenes need xyz and rgb columns, got d=%d.' % scene.d)
  if scene.point_labels is None:
    raise DataError('Scenes need per-point labels.')
  rng = get_rng(seed)
  xyz = scene.xyz
  lo = xyz.min(axis=0)
  hi = xyz.max(axis=0)
  extent = hi - lo
  room = numpy.where(extent > 0, extent, 1.)
  normalized = (xyz - lo) / room
  n_blocks = numpy.maximum(numpy.ceil(extent[:2]/block - 1e-9), 1).astype(int)
  cell = numpy.minimum(numpy.floor((xyz[:, :2] - lo[:2])/block).astype(int), n_blocks - 1)
  features = numpy.hstack([xyz, scene.features[:, 3:6], normalized])
  full = PointCloud(features, point_labels=scene.point_labels, category=scene.category,
                    name=scene.name)
  blocks = []
  for ix in range(n_blocks[0]):
    for iy in range(n_blocks[1]):
      idx = numpy.flatnonzero((cell[:, 0] == ix) & (cell[:, 1] == iy))
      if not idx.size:
        continue
      pc = resample(full.subset(idx), points_per_block, seed=rng)
      if scene.name is not None:
        pc.name = '%s_%d_%d' % (scene.name, ix, iy)
      blocks.append(pc)
  return blocks
