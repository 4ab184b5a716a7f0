'''Input module for the pointkan native formats (dataset directories and
checkpoint containers)
'''
from collections import OrderedDict
import os

import numpy

from pointkan import omp_functions
from pointkan.pointcloud import PointCloud, Dataset
from pointkan.tools import DataError, ParseError

from .tools import checkpoint_magic, descriptor_from_file, numbered_lines

manifest_header = 'pointkan-dataset' #: First token of a dataset manifest.

def read_manifest(path):
  '''Parses ``path/manifest``.

  **Returns:**

    manifest : dict
      ``version``, ``d``, ``classes``, ``parts`` and ``splits`` (OrderedDict).
  '''
  filename = os.path.join(path, 'manifest')
  if not os.path.isfile(filename):
    raise DataError('%s is not a dataset directory (no manifest).' % path)
  manifest = {'version': None, 'd': None, 'classes': [], 'parts': None,
              'splits': OrderedDict()}
  with open(filename, 'r') as fd:
    for lineno, line in numbered_lines(fd):
      tokens = line.split()
      key, values = tokens[0], tokens[1:]
      if key == manifest_header:
        manifest['version'] = int(values[0]) if values else None
      elif key == 'd' and len(values) == 1:
        manifest['d'] = int(values[0])
      elif key == 'classes':
        manifest['classes'] = values
      elif key == 'parts' and len(values) == 2:
        if manifest['parts'] is None:
          manifest['parts'] = {}
        manifest['parts'][int(values[0])] = [int(v) for v in values[1].split(',') if v]
      elif key == 'split' and values:
        manifest['splits'][values[0]] = values[1:]
      else:
        raise ParseError('unknown manifest entry "%s"' % line, filename, lineno)
  if manifest['version'] != Dataset.version:
    raise ParseError('unsupported or missing dataset version', filename)
  if manifest['d'] is None:
    raise ParseError('manifest does not state the feature count d', filename)
  return manifest

def read_cloud(filename, name=None):
  '''Reads one cloud file: header ``N d has_point_labels shape_label category``
  followed by N rows (features, then the point label if present).'''
  with descriptor_from_file(filename) as fd:
    header = fd.readline().split()
    try:
      n, d, has_labels, shape_label, category = [int(v) for v in header]
    except ValueError:
      raise ParseError('invalid header "%s"' % ' '.join(header), filename, 1)
    columns = d + (1 if has_labels else 0)
    text = fd.read().split()
  try:
    values = numpy.array(text, dtype=numpy.float64)
  except ValueError:
    raise ParseError('non-numeric entry', filename)
  if values.size != n*columns:
    rows = values.size / float(columns) if columns else 0
    raise DataError('%s: header announces %d rows of %d columns, found %g rows.'
                    % (filename, n, columns, rows))
  values = values.reshape(n, columns)
  labels = values[:, d].astype(int) if has_labels else None
  return PointCloud(values[:, :d], point_labels=labels, shape_label=shape_label,
                    category=category, name=name or os.path.basename(filename))

def _read_slice(x):
  path, names = x
  return [read_cloud(os.path.join(path, n), name=n) for n in names]

def read_dataset(path, numproc=1, **kwargs):
  '''Reads a dataset directory written by :func:`pointkan.output.write_dataset`.

  **Parameters:**

    path : str
    numproc : int
      Number of worker processes reading the cloud files.

  **Returns:**

    dataset : Dataset
  '''
  manifest = read_manifest(path)
  names = []
  for value in manifest['splits'].values():
    names += [n for n in value if n not in names]
  for n in names:
    if not os.path.isfile(os.path.join(path, n)):
      raise DataError('Cloud file %s listed in the manifest is missing.'
                      % os.path.join(path, n))
  slices = omp_functions.slicer(len(names), slice_length=64, numproc=numproc)
  chunks = omp_functions.run(_read_slice, [(path, names[s:e]) for s, e in slices],
                             numproc=numproc, display=None)
  clouds = [pc for chunk in chunks for pc in chunk]
  for pc in clouds:
    if pc.d != manifest['d']:
      raise DataError('%s has d=%d, the manifest states d=%d.'
                      % (os.path.join(path, pc.name), pc.d, manifest['d']))
  return Dataset(clouds, manifest['classes'], manifest['splits'], parts=manifest['parts'])

def _take(data, pos, dtype, count=1):
  dtype = numpy.dtype(dtype)
  end = pos + dtype.itemsize*count
  if end > len(data):
    raise DataError('Checkpoint is truncated.')
  return numpy.frombuffer(data, dtype=dtype, count=count, offset=pos), end

def read_checkpoint(fname, **kwargs):
  '''Reads a checkpoint container.

  **Returns:**

    echo : OrderedDict
      The config echo (``section.key`` -> text value).
    tensors : OrderedDict
      Tensor name -> numpy.ndarray (float64).
  '''
  with descriptor_from_file(fname, mode='rb') as fd:
    data = fd.read()
  if data[:len(checkpoint_magic)] != checkpoint_magic:
    raise DataError('%s is not a checkpoint (magic string missing).' % fname)
  pos = len(checkpoint_magic)
  length, pos = _take(data, pos, '<u4')
  end = pos + int(length[0])
  if end > len(data):
    raise DataError('Checkpoint is truncated.')
  echo = OrderedDict()
  for line in data[pos:end].decode('utf-8').splitlines():
    if '=' in line:
      key, value = line.split('=', 1)
      echo[key.strip()] = value.strip()
  pos = end
  count, pos = _take(data, pos, '<u4')
  tensors = OrderedDict()
  for _ in range(int(count[0])):
    n, pos = _take(data, pos, '<u2')
    name = data[pos:pos + int(n[0])].decode('utf-8')
    pos += int(n[0])
    rank, pos = _take(data, pos, '<u4')
    dims, pos = _take(data, pos, '<u8', int(rank[0]))
    shape = tuple(int(i) for i in dims)
    values, pos = _take(data, pos, '<f8', int(numpy.prod(shape)))
    tensors[name] = values.astype(numpy.float64).reshape(shape)
  if pos != len(data):
    raise DataError('Checkpoint has %d trailing bytes.' % (len(data) - pos))
  return echo, tensors
