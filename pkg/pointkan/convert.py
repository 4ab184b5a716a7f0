# -*- coding: iso-8859-1 -*-
'''Module for the conversion of mesh and part-labeled trees into the native
dataset format.'''
'''
pointkan

This file is part of pointkan.

pointkan is free software: you can redistribute it and/or modify
it under the terms of the GNU Lesser General Public License as
published by the Free Software Foundation, either version 3 of
the License, or any later version.
'''

import os
from collections import OrderedDict

from . import omp_functions
from .display import display
from .output import write_dataset
from .pointcloud import Dataset
from .read import load_off, find_off_files, find_itype, read_shapenet
from .sampling import sample_mesh, normalize_unit_sphere
from .tools import ConfigError, DataError, derive_seed

def _convert_mesh(x):
  filename, name, label, n_points, with_normals, seed = x
  pc = sample_mesh(load_off(filename), n_points, seed=seed, with_normals=with_normals,
                   shape_label=label, name=name)
  return normalize_unit_sphere(pc)

def _convert_slice(x):
  return [_convert_mesh(i) for i in x]

def convert_modelnet(root, n_points=1024, with_normals=True, seed=0, numproc=1):
  '''Samples every mesh of a ModelNet-style OFF tree.

  **Parameters:**

    root : str
      Directory laid out as ``root/<class>/<split>/<name>.off``.
    n_points : int
      Points sampled per mesh (area-weighted).
    with_normals : bool
      If True, face normals are appended (d=6).
    seed : int
      Mesh i is sampled with seed xor i.

  **Returns:**

    dataset : Dataset
      Class index = position of the class directory in sorted order.
  '''
  class_names, entries = find_off_files(root)
  if not entries:
    raise DataError('No .off files found below %s.' % root)
  jobs = []
  splits = OrderedDict()
  for i, (split, label, path) in enumerate(entries):
    name = '%s_%s.txt' % (class_names[label], os.path.splitext(os.path.basename(path))[0])
    splits.setdefault(split, []).append(name)
    jobs.append((path, name, label, int(n_points), with_normals, derive_seed(seed, i)))
  display('Sampling %d meshes of %d classes' % (len(jobs), len(class_names)))
  slices = omp_functions.slicer(len(jobs), slice_length=32, numproc=numproc)
  chunks = omp_functions.run(_convert_slice, [jobs[s:e] for s, e in slices],
                             numproc=numproc, display=display)
  return Dataset([pc for chunk in chunks for pc in chunk], class_names, splits)

converters = {'modelnet': convert_modelnet,
              'shapenet': read_shapenet,
              } #: Source trees that can be converted.

def convert(root, outdir, itype='auto', n_points=None, with_normals=True, seed=0,
            numproc=1):
  '''Converts ``root`` and writes the dataset to ``outdir``.

  **Returns:**

    dataset : Dataset
  '''
  if itype == 'auto':
    itype = find_itype(root)
  if itype not in converters:
    raise ConfigError('Cannot convert input type "%s" (choose from "%s").'
                      % (itype, '", "'.join(sorted(converters))))
  if n_points is None:
    n_points = 1024 if itype == 'modelnet' else 2048
  dataset = converters[itype](root, n_points=n_points, with_normals=with_normals,
                              seed=seed, numproc=numproc)
  write_dataset(dataset, outdir)
  display('Wrote %d clouds (d=%d) to %s' % (len(dataset), dataset.d, outdir))
  return dataset
