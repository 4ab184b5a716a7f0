'''Input module for the ShapeNet-part text layout

  root/synsetoffset2category.txt          category name and synset per line
  root/<synset>/<token>.txt               rows "x y z nx ny nz part"
  root/train_test_split/shuffled_<split>_file_list.json
'''
from collections import OrderedDict
import json
import os

import numpy

from pointkan import omp_functions
from pointkan.display import display
from pointkan.pointcloud import PointCloud, Dataset
from pointkan.sampling import normalize_unit_ball, resample
from pointkan.tools import DataError, ParseError, derive_seed

from .tools import numbered_lines

#: Part labels of the 16 ShapeNet-part categories.
category_parts = OrderedDict([
  ('Airplane', [0, 1, 2, 3]), ('Bag', [4, 5]), ('Cap', [6, 7]),
  ('Car', [8, 9, 10, 11]), ('Chair', [12, 13, 14, 15]), ('Earphone', [16, 17, 18]),
  ('Guitar', [19, 20, 21]), ('Knife', [22, 23]), ('Lamp', [24, 25, 26, 27]),
  ('Laptop', [28, 29]), ('Motorbike', [30, 31, 32, 33, 34, 35]), ('Mug', [36, 37]),
  ('Pistol', [38, 39, 40]), ('Rocket', [41, 42, 43]), ('Skateboard', [44, 45, 46]),
  ('Table', [47, 48, 49]),
  ])

splits = ['train', 'val', 'test'] #: Splits of the official file lists.

def read_categories(root):
  filename = os.path.join(root, 'synsetoffset2category.txt')
  categories = OrderedDict()
  with open(filename, 'r') as fd:
    for lineno, line in numbered_lines(fd):
      tokens = line.split()
      if len(tokens) != 2:
        raise ParseError('expected "<name> <synset>"', filename, lineno)
      categories[tokens[1]] = tokens[0]
  return categories

def _read_shape(x):
  filename, name, category, n_points, with_normals, seed = x
  try:
    rows = numpy.loadtxt(filename, ndmin=2)
  except ValueError as err:
    raise ParseError(str(err), filename)
  if rows.shape[1] != 7:
    raise DataError('%s: expected 7 columns (x y z nx ny nz part), found %d.'
                    % (filename, rows.shape[1]))
  features = rows[:, :6] if with_normals else rows[:, :3]
  pc = PointCloud(features, point_labels=rows[:, 6].astype(int), shape_label=category,
                  category=category, name=name)
  return normalize_unit_ball(resample(pc, n_points, seed=seed))

def _read_slice(x):
  return [_read_shape(i) for i in x]

def read_shapenet(root, n_points=2048, with_normals=False, seed=0, numproc=1, **kwargs):
  '''Converts a ShapeNet-part tree to a :class:`Dataset`.

  Every shape is resampled to ``n_points`` points (item seed = seed xor
  item index) and normalized into the unit ball. The category index follows
  the order of ``synsetoffset2category.txt``.
  '''
  categories = read_categories(root)
  synsets = list(categories)
  names = [categories[s] for s in synsets]
  jobs = []
  split_lists = OrderedDict()
  for split in splits:
    filename = os.path.join(root, 'train_test_split', 'shuffled_%s_file_list.json' % split)
    split_lists[split] = []
    if not os.path.isfile(filename):
      display('No %s file list in %s.' % (split, root))
      continue
    with open(filename, 'r') as fd:
      entries = json.load(fd)
    for entry in entries:
      synset, token = entry.split('/')[-2:]
      if synset not in categories:
        raise DataError('%s lists unknown synset %s.' % (filename, synset))
      name = '%s_%s.txt' % (synset, token)
      split_lists[split].append(name)
      jobs.append((os.path.join(root, synset, token + '.txt'), name,
                   synsets.index(synset), n_points, with_normals,
                   derive_seed(seed, len(jobs))))
  slices = omp_functions.slicer(len(jobs), slice_length=64, numproc=numproc)
  chunks = omp_functions.run(_read_slice, [jobs[s:e] for s, e in slices],
                             numproc=numproc, display=display)
  clouds = [pc for chunk in chunks for pc in chunk]
  parts = dict((i, category_parts.get(n, [])) for i, n in enumerate(names))
  if any(not p for p in parts.values()):
    parts = None
  return Dataset(clouds, names, split_lists, parts=parts)
