'''
pointkan output interface
'''

__all__ = ['main_output', 'write_dataset', 'write_cloud', 'write_checkpoint',
           'hdf5_open', 'hdf5_write', 'hdf5_append', 'npz_write',
           'write_table', 'read_table', 'pretty_table', 'MetricsLog']

from .high_level import main_output
from .native import write_dataset, write_cloud, write_checkpoint
from .hdf5 import hdf5_open, hdf5_write, hdf5_append, npz_write
from .tables import write_table, read_table, pretty_table, MetricsLog
