'''Input module for OFF triangle meshes and ModelNet-style OFF trees
'''
import os

import numpy

from pointkan.pointcloud import TriangleMesh
from pointkan.tools import ParseError

from .tools import descriptor_from_file, numbered_lines, next_line

def _numbers(line, dtype, lineno, filename, what):
  try:
    return [dtype(v) for v in line.split()]
  except ValueError:
    raise ParseError('cannot read %s from "%s"' % (what, line), filename, lineno)

def load_off(fname, **kwargs):
  '''Reads an OFF mesh; polygon faces are fan-triangulated.

  **Parameters:**

  fname: str, file descriptor
    Specifies the filename for the input file.
    fname can also be used with a file descriptor instead of a filename.

  **Returns:**

    mesh : TriangleMesh
  '''
  if isinstance(fname, str):
    filename = fname
    fname = descriptor_from_file(filename)
    was_str = True
  else:
    filename = getattr(fname, 'name', '<stream>')
    was_str = False

  try:
    lines = numbered_lines(fname)
    lineno, line = next_line(lines, filename, 'the header')
    if not line.startswith('OFF'):
      raise ParseError('missing "OFF" header', filename, lineno)
    rest = line[3:].strip()
    # Some ModelNet files merge the counts into the header line
    if not rest:
      lineno, rest = next_line(lines, filename, 'the counts')
    counts = _numbers(rest, int, lineno, filename, 'the vertex/face counts')
    if len(counts) < 2 or min(counts[:2]) < 0:
      raise ParseError('invalid counts line "%s"' % rest, filename, lineno)
    n_vertices, n_faces = counts[:2]

    vertices = numpy.empty((n_vertices, 3))
    for i in range(n_vertices):
      lineno, line = next_line(lines, filename, 'vertex %d' % i)
      v = _numbers(line, float, lineno, filename, 'vertex coordinates')
      if len(v) < 3:
        raise ParseError('vertex with fewer than 3 coordinates', filename, lineno)
      vertices[i] = v[:3]

    faces = []
    for i in range(n_faces):
      lineno, line = next_line(lines, filename, 'face %d' % i)
      f = _numbers(line, int, lineno, filename, 'face indices')
      if not f or f[0] < 3 or len(f) < f[0] + 1:
        raise ParseError('invalid face "%s"' % line, filename, lineno)
      idx = f[1:f[0] + 1]
      if min(idx) < 0 or max(idx) >= n_vertices:
        raise ParseError('face index outside [0,%d)' % n_vertices, filename, lineno)
      for j in range(1, len(idx) - 1):
        faces.append((idx[0], idx[j], idx[j + 1]))
  finally:
    if was_str:
      fname.close()

  return TriangleMesh(vertices, numpy.array(faces, dtype=int).reshape(-1, 3))

def find_off_files(root):
  '''Lists a ModelNet-style tree ``root/<class>/<split>/<name>.off``.

  **Returns:**

    class_names : list of str
      Sorted class directory names.
    entries : list of (split, class index, path)
  '''
  class_names = sorted(d for d in os.listdir(root)
                       if os.path.isdir(os.path.join(root, d)))
  entries = []
  for label, name in enumerate(class_names):
    for split in sorted(os.listdir(os.path.join(root, name))):
      directory = os.path.join(root, name, split)
      if not os.path.isdir(directory):
        continue
      for f in sorted(os.listdir(directory)):
        if f.lower().endswith('.off'):
          entries.append((split, label, os.path.join(directory, f)))
  return class_names, entries
