# -*- coding: iso-8859-1 -*-
'''Module for creating the requested output files.
'''
'''
pointkan

This file is part of pointkan.

pointkan is free software: you can redistribute it and/or modify
it under the terms of the GNU Lesser General Public License as
published by the Free Software Foundation, either version 3 of
the License, or any later version.
'''

from os import path

from pointkan.display import display
from pointkan.tools import ConfigError

from .hdf5 import hdf5_write, npz_write
from .tables import write_table

synonyms = {'auto': 'auto',
            'h5': 'h5', 'hdf5': 'h5',
            'npz': 'npz', 'numpy': 'npz',
            'csv': 'csv', 'txt': 'txt', 'tsv': 'txt',
            '': None
            }

def main_output(data, outputname='data', otype='auto', gname='', mode='w', **kwargs):
  '''Creates the requested output.

  **Parameters:**

  data : dict
    Column name -> sequence (tables) or array (predictions).
  outputname : str
    Contains the base name of the output file. If outputname contains @, string
    will be split and first part interpreted as outputname and second as gname.
  otype : str or list of str, optional
    Contains the output file type. Possible options:
    'auto', 'csv', 'txt' (tab separated), 'h5', 'npz'.
    With 'auto', the type is taken from the extension of outputname.
  gname : str, optional
    For HDF5 or npz output, specifies the group where the data will be stored.
  mode : str={'w', 'a'}, optional
    Specifies the mode used to open the file (HDF5 or npz).

  **Returns:**

    output_written : list of str
  '''
  if otype is None or otype == []:
    return []

  if '@' in outputname:
    outputname, gname = outputname.split('@')
  if isinstance(otype, str):
    otype = [otype]
  otype = list(otype)
  for i, o in enumerate(otype):
    if o == 'auto':
      base, ext = path.splitext(outputname)
      otype[i] = ext[1:] if ext else 'csv'
      if ext:
        outputname = base
  unknown = [o for o in otype if o not in synonyms]
  if unknown:
    raise ConfigError('Invalid output file format "%s" (choose from "%s").'
                     % (unknown[0], '", "'.join(k for k in synonyms if k)))

  output_written = []
  for o in otype:
    kind = synonyms[o]
    if kind in ['csv', 'txt']:
      filename = '%s.%s' % (outputname, o)
      display('Saving table to %s' % filename)
      write_table(data, filename, delimiter=',' if kind == 'csv' else '\t')
    elif kind == 'h5':
      filename = '%s.%s' % (outputname, o)
      display('Saving to Hierarchical Data Format file (HDF5)...\n\t%s' % filename)
      hdf5_write(filename, mode=mode, gname=gname, **data)
    elif kind == 'npz':
      display('Saving to a compressed .npz archive...\n\t%s.npz' % outputname)
      filename = npz_write(outputname, gname=gname, mode=mode, **data)
    else:
      continue
    output_written.append(filename)
  return output_written
