'''
High level interface to the pointkan reading functions
'''

from pointkan.display import display

from .off import load_off
from .native import read_dataset, read_checkpoint
from .shapenet import read_shapenet
from .tools import find_itype

readers = {'off': load_off,
           'dataset': read_dataset,
           'checkpoint': read_checkpoint,
           'shapenet': read_shapenet,
          }                        #: Specifies possible input types.

def main_read(fname, itype='auto', **kwargs):
  '''
  This is the high-level interface for the
  pointkan reading routines.

  **Parameters:**

  fname: str
    Specifies the input file or directory.
  itype : str, optional
    Can be used to manually specify the input type
    ('off', 'dataset', 'checkpoint', 'shapenet').

  **Note:**

    All additional keyword arguments are forwarded to the reading functions.

  **Returns:**

    TriangleMesh (off), Dataset (dataset, shapenet) or
    (echo, tensors) (checkpoint).
  '''
  if itype == 'auto':
    itype = find_itype(fname)
  if itype not in readers:
    raise NotImplementedError('No reader for input type "%s" (choose from "%s").'
                              % (itype, '", "'.join(sorted(readers))))

  display('Loading data from {0} {1}'.format(itype, fname))

  return readers[itype](fname, **kwargs)
