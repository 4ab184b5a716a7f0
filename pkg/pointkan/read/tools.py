'''
Some tools needed by the pointkan reading functions
'''

import gzip
import os

from pointkan.tools import ParseError

checkpoint_magic = b'PKAN1' #: Magic string of the checkpoint container.

def descriptor_from_file(filename, mode='r'):
  '''Opens ``filename`` for reading; ``.gz`` files are decompressed on the fly.'''
  binary = 'b' in mode
  if os.path.splitext(filename)[1] == '.gz':
    return gzip.open(filename, 'rb' if binary else 'rt')
  return open(filename, 'rb' if binary else 'r')

def numbered_lines(fname):
  '''Yields (line number, stripped line) for all non-empty lines, skipping
  ``#`` comments.'''
  for lineno, line in enumerate(fname, 1):
    line = line.split('#', 1)[0].strip()
    if line:
      yield lineno, line

def next_line(lines, filename, what):
  try:
    return next(lines)
  except StopIteration:
    raise ParseError('unexpected end of file while reading %s' % what, filename)

def find_itype(fname):
  '''
  This function is used by the high-level read
  to determine what reader to use.
  Filetypes are determined either by extension, by the
  layout of a directory or by a magic string.

  **Parameters:**

  fname: str
    Specifies the file or directory name.

  **Returns:**

  itype, str
    One of 'off', 'dataset', 'shapenet', 'modelnet', 'checkpoint'.
  '''
  if os.path.isdir(fname):
    if os.path.isfile(os.path.join(fname, 'manifest')):
      return 'dataset'
    if os.path.isfile(os.path.join(fname, 'synsetoffset2category.txt')):
      return 'shapenet'
    for root, _, files in os.walk(fname):
      if any(f.lower().endswith('.off') for f in files):
        return 'modelnet'
    raise NotImplementedError('Directory layout of %s not recognized!' % fname)

  name = fname[:-3] if fname.endswith('.gz') else fname
  extension = name.split('.')[-1].lower()
  if extension == 'off':
    return 'off'
  if extension in ['pkan', 'ckpt']:
    return 'checkpoint'

  fd = descriptor_from_file(fname, mode='rb')
  try:
    head = fd.read(len(checkpoint_magic))
  finally:
    fd.close()
  if head == checkpoint_magic:
    return 'checkpoint'
  if head[:3] == b'OFF':
    return 'off'
  raise NotImplementedError('File format not recognized or reader not implemented!')
