'''
pointkan input interface
'''

from .high_level import main_read
from .off import load_off, find_off_files
from .native import read_dataset, read_checkpoint, read_cloud, read_manifest
from .shapenet import read_shapenet
from .tools import find_itype
