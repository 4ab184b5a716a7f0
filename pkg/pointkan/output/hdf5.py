'''HDF5 and compressed numpy output of tables and predictions

Every column of a table becomes one dataset (HDF5) or one ``.npy`` member
(npz). Text columns are stored as fixed-length byte strings.
'''
from contextlib import contextmanager
import io
import os
import zipfile

import numpy

from pointkan.tools import DataError

def column_array(values):
  '''Converts one table column into an array h5py and ``numpy.save`` accept.'''
  values = numpy.asarray(values)
  if values.dtype.kind in 'UO':
    values = values.astype(str).astype(numpy.bytes_)
  return values

def npz_write(filename, gname='', mode='w', compress=True, **columns):
  '''Writes the columns to a ``.npz`` archive.

  **Parameters:**

  filename : str
    Name of the archive; ``.npz`` is appended if missing.
  gname : str, optional
    Member prefix inside the archive (``gname/column.npy``).
  mode : str={'w', 'a'}, optional
    Create a new archive or append members to an existing one.

  **Returns:**

  filename : str
  '''
  if not filename.endswith('.npz'):
    filename += '.npz'
  compression = zipfile.ZIP_DEFLATED if compress else zipfile.ZIP_STORED
  with zipfile.ZipFile(filename, mode=mode, compression=compression, allowZip64=True) as archive:
    for key, values in columns.items():
      if values is None:
        continue
      buf = io.BytesIO()
      numpy.lib.format.write_array(buf, column_array(values), allow_pickle=False)
      archive.writestr(os.path.join(gname, key + '.npy'), buf.getvalue())
  return filename

@contextmanager
def hdf5_open(fid, mode='w'):
  '''Opens an HDF5 file; ``.h5`` is appended if the name has no HDF5 extension.

  **Usage:**

    with hdf5_open('metrics', mode='w') as f:
      ...
  '''
  try:
    import h5py
  except ImportError:
    raise DataError('HDF5 output was requested but the module h5py is not installed.')
  if not fid.endswith(('.h5', '.hdf5')):
    fid += '.h5'
  f = h5py.File(fid, mode)
  try:
    yield f
  finally:
    f.close()

def hdf5_append(columns, group):
  '''Stores a mapping below an open HDF5 group.

  Sequences become datasets, nested mappings become sub-groups and scalars
  become attributes of ``group``.
  '''
  for key, value in columns.items():
    key = str(key)
    if isinstance(value, dict):
      hdf5_append(value, group.require_group(key))
    elif isinstance(value, (list, tuple, numpy.ndarray)):
      if key in group:
        del group[key]
      group.create_dataset(key, data=column_array(value))
    elif value is not None:
      group.attrs[key] = str(value) if isinstance(value, bool) else value

def hdf5_write(fid, mode='w', gname='', **columns):
  '''Writes the columns to an HDF5 file, optionally below the group ``gname``.

  **Returns:**

  filename : str
  '''
  with hdf5_open(fid, mode=mode) as f:
    hdf5_append(columns, f.require_group(gname) if gname else f)
    return f.filename
