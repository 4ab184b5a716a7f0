'''Output module for the pointkan native formats
'''
from collections import OrderedDict
import os

import numpy

from pointkan.display import warn
from pointkan.read.native import manifest_header
from pointkan.read.tools import checkpoint_magic
from pointkan.tools import DataError

def write_cloud(pc, filename):
  '''Writes one cloud: header ``N d has_point_labels shape_label category``,
  then N rows with 17 significant digits (lossless for float64).'''
  has_labels = pc.point_labels is not None
  header = '%d %d %d %d %d' % (pc.N, pc.d, int(has_labels),
                               -1 if pc.shape_label is None else pc.shape_label,
                               -1 if pc.category is None else pc.category)
  with open(filename, 'w') as fd:
    fd.write(header + '\n')
    for i in range(pc.N):
      row = ' '.join('%.17g' % v for v in pc.features[i])
      if has_labels:
        row += ' %d' % pc.point_labels[i]
      fd.write(row + '\n')
  return filename

def write_dataset(dataset, path):
  '''Writes ``dataset`` to the directory ``path`` (manifest + one file per
  cloud). Clouds listed in no split are written to the split "unassigned".

  **Returns:**

    path : str
  '''
  if not os.path.isdir(path):
    os.makedirs(path)
  splits = OrderedDict(dataset.splits)
  listed = set(n for value in splits.values() for n in value)
  unassigned = [pc.name for pc in dataset.clouds if pc.name not in listed]
  if unassigned:
    warn('%d clouds belong to no split; listing them as "unassigned".' % len(unassigned))
    splits['unassigned'] = unassigned
  for pc in dataset.clouds:
    if os.sep in pc.name or ' ' in pc.name:
      raise DataError('Cloud name "%s" is not a plain file name.' % pc.name)
    write_cloud(pc, os.path.join(path, pc.name))
  lines = ['%s %d' % (manifest_header, dataset.version),
           'd %d' % dataset.d,
           'classes %s' % ' '.join(dataset.class_names)]
  for category, labels in sorted((dataset.parts or {}).items()):
    lines.append('parts %d %s' % (category, ','.join(str(l) for l in labels)))
  for key, value in splits.items():
    lines.append(' '.join(['split', key] + list(value)))
  with open(os.path.join(path, 'manifest'), 'w') as fd:
    fd.write('\n'.join(lines) + '\n')
  return path

def write_checkpoint(filename, echo, tensors):
  '''Writes a checkpoint container.

  Layout (little endian): magic ``PKAN1``; uint32 length and UTF-8 text of
  the config echo (``key = value`` lines); uint32 tensor count; per tensor
  uint16 name length, name, uint32 rank, uint64 dims and the row-major
  float64 values.
  '''
  text = ''.join('%s = %s\n' % (key, value) for key, value in echo.items()).encode('utf-8')
  chunks = [checkpoint_magic, numpy.array([len(text)], dtype='<u4').tobytes(), text,
            numpy.array([len(tensors)], dtype='<u4').tobytes()]
  for name, array in tensors.items():
    array = numpy.ascontiguousarray(array, dtype='<f8')
    encoded = name.encode('utf-8')
    chunks += [numpy.array([len(encoded)], dtype='<u2').tobytes(), encoded,
               numpy.array([array.ndim], dtype='<u4').tobytes(),
               numpy.array(array.shape, dtype='<u8').tobytes(),
               array.tobytes()]
  with open(filename, 'wb') as fd:
    fd.write(b''.join(chunks))
  return filename
