# -*- coding: iso-8859-1 -*-
'''Module containing and processing all pointkan options.

Besides the command-line options, the module holds the run configuration:
a flat table of ``section.key`` values (sections ``model``, ``train``,
``data`` and ``run``) merged from the built-in defaults, a config file
(``-c FILE``), ``--set key=value`` flags and the dedicated flags
``--seed``, ``--workers`` and ``--epochs`` (in increasing priority).
'''

lgpl = '''pointkan

This file is part of pointkan.

pointkan is free software: you can redistribute it and/or modify
it under the terms of the GNU Lesser General Public License as
published by the Free Software Foundation, either version 3 of
the License, or any later version.

pointkan is distributed in the hope that it will be useful,
but WITHOUT ANY WARRANTY; without even the implied warranty of
MERCHANTABILITY or FITNESS FOR A PARTICULAR PURPOSE.  See the
GNU Lesser General Public License for more details.

You should have received a copy of the GNU Lesser General Public
License along with pointkan.  If not, see <http://www.gnu.org/licenses/>.
'''

lgpl_short = '''This is pointkan.
This program comes with ABSOLUTELY NO WARRANTY.
This is free software, and you are welcome to redistribute it
under certain conditions. Type '-l' for details.
'''

import os
import sys
from collections import OrderedDict
thismodule = sys.modules[__name__]

from pointkan.tools import ConfigError, ParseError, parse_value, format_value

available = [
  'command', 'args', 'config_file', 'overrides', 'seed', 'workers', 'epochs',
  'outputname', 'otype', 'itype', 'quiet', 'no_log'
  ]

commands = ['synth',
            'convert-off',
            'train',
            'eval',
            'robustness',
            'count',
            'predict',
            'ablation',
            'test']                        #: Specifies possible subcommands.

#: Positional arguments of every subcommand.
command_args = {'synth': [],
                'convert-off': ['TREE'],
                'train': ['DATASET'],
                'eval': ['CHECKPOINT', 'DATASET'],
                'robustness': ['CHECKPOINT', 'DATASET'],
                'count': [],
                'predict': ['CHECKPOINT', 'DATASET'],
                'ablation': ['DATASET'],
                'test': []}

itypes = ['auto',
          'modelnet',
          'shapenet']                        #: Specifies possible conversion input types.

otypes = ['csv', 'txt',
          'h5', 'hdf5',
          'npz',
          'auto'] #: Specifies possible output types.

branch_default = 'depends on model.branch'
task_default = 'depends on the task'

#: Every run-configuration key: (default, type, provenance). A default of
#: None takes the value of the model branch or the training task.
config_keys = OrderedDict([
  ('model.branch', ('classification', 'str', 'gap-fill')),
  ('model.preset', ('default', 'str', 'gap-fill')),
  ('model.d', (None, 'int', 'gap-fill: taken from the dataset')),
  ('model.k', (None, 'int', 'gap-fill: taken from the dataset')),
  ('model.encoder_widths', (None, 'ints', 'published: 3072 (cls); 640,5120 (seg)')),
  ('model.decoder_widths', (None, 'ints', 'published: none (cls); 640 (seg); 512,256 (hybridpp)')),
  ('model.decoder_kind', ('kan', 'str', 'published')),
  ('model.head_kind', ('mlp', 'str', 'published (hybridpp)')),
  ('model.degree', (None, 'int', 'published: 4 (cls); 2 (seg)')),
  ('model.alpha', (None, 'float', 'published: 1 (cls); -0.5 (seg)')),
  ('model.beta', (None, 'float', 'published: 1 (cls); -0.5 (seg)')),
  ('model.one_hot_size', (None, 'int', 'published: 16 (part_seg)')),
  ('model.bn_momentum', (0.9, 'float', 'gap-fill')),
  ('model.bn_epsilon', (1e-5, 'float', 'gap-fill')),
  ('model.pool_bn_scale', (0.35, 'float', 'gap-fill')),
  ('model.dropout', (None, 'float', 'published: 0.4 (hybridpp)')),
  ('model.sa_centroids', ([512, 128], 'ints', 'published')),
  ('model.sa_radii', ([0.2, 0.4], 'floats', 'published')),
  ('model.sa_neighbors', ([32, 32], 'ints', 'published')),
  ('model.sa_widths', ([[64, 64, 128], [128, 128, 256], [256, 512, 1024]], 'intss', 'published')),
  ('model.fps_random_start', (False, 'bool', 'gap-fill')),
  ('train.batch_size', (None, 'int', 'published: 64 (cls); 32 (seg)')),
  ('train.lr', (None, 'float', 'published: 0.0005 (cls); 0.001 (seg)')),
  ('train.beta1', (0.9, 'float', 'published')),
  ('train.beta2', (0.999, 'float', 'published')),
  ('train.adam_epsilon', (1e-8, 'float', 'published')),
  ('train.lr_decay', (0.5, 'float', 'published')),
  ('train.lr_step', (20, 'int', 'published')),
  ('train.epochs', (0, 'int', 'gap-fill: 0 = 60 (synthetic) or 100 (real data)')),
  ('train.val_split', ('val', 'str', 'gap-fill')),
  ('train.restrict_parts', (True, 'bool', 'gap-fill')),
  ('train.augment', (False, 'bool', 'gap-fill')),
  ('data.classes', ('sphere,cube,cylinder,torus', 'str', 'gap-fill')),
  ('data.train_per_class', (200, 'int', 'gap-fill')),
  ('data.test_per_class', (50, 'int', 'gap-fill')),
  ('data.val_per_class', (0, 'int', 'gap-fill')),
  ('data.n_points', (256, 'int', 'gap-fill')),
  ('data.convert_points', (0, 'int', 'published: 1024 (ModelNet), 2048 (ShapeNet); 0 = auto')),
  ('data.with_normals', (False, 'bool', 'gap-fill')),
  ('data.jitter', (0.02, 'float', 'gap-fill')),
  ('data.split', ('test', 'str', 'gap-fill')),
  ('data.keep_counts', ([256, 128, 64, 32], 'ints', 'gap-fill')),
  ('run.seed', (0, 'int', 'gap-fill')),
  ('run.workers', (1, 'int', 'gap-fill')),
  ('run.batch_size', (32, 'int', 'gap-fill')),
  ('run.sweep', ('degree', 'str', 'gap-fill')),
  ('run.per_shape', (True, 'bool', 'gap-fill')),
  ])

def get_options():
  '''Returns all possible options and their value.'''
  opts = [(i, globals()[i]) for i in available]
  return dict(opts)

def config_help():
  '''Lists every config key with its default and provenance.'''
  lines = ['Configuration keys (-c FILE or --set KEY=VALUE):']
  width = max(len(k) for k in config_keys)
  for key, (default, kind, provenance) in config_keys.items():
    text = branch_default if default is None else format_value(default, kind)
    lines.append('  %s  %s [%s] (%s)' % (key.ljust(width), text, kind, provenance))
  return '\n'.join(lines)

def init_parser(argv=None):
  '''Initializes parser and processes the options.
  '''
  import optparse
  global parser

  class Parser(optparse.OptionParser):
    def format_epilog(self, formatter):
      return '\n' + self.epilog + '\n'

  usage = ('Usage: %prog COMMAND [ARGS] [options]\n\n'
           'Commands:\n' +
           '\n'.join('  %s %s' % (c, ' '.join(command_args[c])) for c in commands))
  parser = Parser(usage=usage, description=lgpl_short, epilog=config_help(),
                  prog='pointkan')

  parser.add_option("-l", dest="show_lgpl",
                      default=False, action="store_true",
                      help="show license information and exit")
  parser.add_option("--quiet", dest="quiet",
                      default=False, action="store_true",
                      help="suppress terminal output")
  parser.add_option("--no_log", dest="no_log",
                      default=False, action="store_true",
                      help="suppress output of a OUTPUTNAME.pklog logfile")
  group = optparse.OptionGroup(parser, "Input/Output Options")
  group.add_option("-o", "--output", dest="outputname",
                      type="string",
                      help='''name of the output dataset directory or the base
                      name of the output files''')
  group.add_option("-t", "--otype", dest="otype",
                      type="choice", action="append", choices=otypes,
                      help='''table formats (multiple calls possible):
                      '{0}', '{1}' (tab separated), '{2}' or '{3}' (HDF5 file),
                      '{4}' (compressed numpy file), '{5}' (determine from
                      OUTPUTNAME) [default: '{0}']'''.format(*otypes))
  group.add_option("-e", "--itype", dest="itype",
                      default='auto', type="choice", choices=itypes,
                      help="input tree type of convert-off: '" + "', '".join(itypes) +
                      "' [default: '%default']")
  parser.add_option_group(group)

  group = optparse.OptionGroup(parser, "Configuration Options")
  group.add_option("-c", "--config", dest="config_file",
                      type="string",
                      help="read the run configuration from CONFIG_FILE")
  group.add_option("--set", dest="overrides", metavar="KEY=VALUE",
                      default=[], type="string", action="append",
                      help='''override a configuration key (multiple calls
                      possible)''')
  group.add_option("--seed", dest="seed",
                      type="int",
                      help="random seed (run.seed)")
  group.add_option("-p", "--workers", dest="workers",
                      type="int",
                      help='''number of subprocesses for the evaluation and
                      the conversion (run.workers)''')
  group.add_option("--epochs", dest="epochs",
                      type="int",
                      help="number of training epochs (train.epochs)")
  parser.add_option_group(group)

  (kwargs, args) = parser.parse_args(argv)

  # Print the licence, if requested
  if kwargs.show_lgpl:
    print(lgpl)
    sys.exit(0)

  if not args:
    parser.print_help()
    sys.exit(0)

  setattr(thismodule, 'command', args[0])
  setattr(thismodule, 'args', args[1:])
  for i, j in vars(kwargs).items():
    if i != 'show_lgpl':
      setattr(thismodule, i, j)

  # Check the options for compatibility and correctness
  check_options()

  return
  # init_parser

def raise_error(string, error=ConfigError):
  raise error(string)

def print_message(string):
  print(string)

def read_config_file(filename):
  '''Reads a flat ``section.key = value`` file.

  **Returns:**

    values : OrderedDict
      Raw text values by key.
  '''
  values = OrderedDict()
  with open(filename, 'r') as fd:
    for lineno, line in enumerate(fd, 1):
      line = line.split('#', 1)[0].strip()
      if not line:
        continue
      if '=' not in line:
        raise ParseError('expected "section.key = value"', filename, lineno)
      key, value = [i.strip() for i in line.split('=', 1)]
      if key not in config_keys:
        raise ConfigError('%s (line %d): unknown config key "%s".' % (filename, lineno, key))
      values[key] = value
  return values

def parse_overrides(overrides):
  '''Converts ``['key=value', ...]`` into an OrderedDict.'''
  values = OrderedDict()
  for item in overrides or []:
    if '=' not in item:
      raise ConfigError('--set expects KEY=VALUE, got "%s".' % item)
    key, value = [i.strip() for i in item.split('=', 1)]
    if key not in config_keys:
      raise ConfigError('Unknown config key "%s".' % key)
    values[key] = value
  return values

def merge_config(file_values=None, overrides=None, seed=None, workers=None, epochs=None):
  '''Merges the configuration layers and converts the values.

  **Returns:**

    config : OrderedDict
      Typed value (or None for branch/task defaults) of every key.
  '''
  merged = OrderedDict((k, v[0]) for k, v in config_keys.items())
  for layer in [file_values or {}, overrides or {}]:
    for key, value in layer.items():
      if key not in config_keys:
        raise ConfigError('Unknown config key "%s".' % key)
      merged[key] = parse_value(value, config_keys[key][1])
  for key, value in [('run.seed', seed), ('run.workers', workers), ('train.epochs', epochs)]:
    if value is not None:
      merged[key] = value
  return merged

def section(name, cfg=None):
  '''Returns the set (not None) values of one section without prefix.'''
  cfg = config if cfg is None else cfg
  prefix = name + '.'
  return OrderedDict((k[len(prefix):], v) for k, v in cfg.items()
                     if k.startswith(prefix) and v is not None)

def model_config_from_options(dataset=None, cfg=None):
  '''Builds the :class:`pointkan.models.ModelConfig` of the run.

  Unset ``model.d`` and ``model.k`` (and the one-hot size of the part
  segmentation) are taken from ``dataset`` if given.
  '''
  from pointkan.models import ModelConfig
  cfg = config if cfg is None else cfg
  values = section('model', cfg)
  branch = values.pop('branch')
  values['seed'] = cfg['run.seed']
  defaults = ModelConfig(branch, preset=values.get('preset'))
  if dataset is not None and len(dataset):
    values.setdefault('d', dataset.d)
    if defaults.branch in ['classification', 'hybridpp']:
      values.setdefault('k', max(len(dataset.class_names), 1))
    else:
      parts = dataset.category_parts()
      labels = [p for v in parts.values() for p in v]
      if labels:
        values.setdefault('k', max(labels) + 1)
      if defaults.branch == 'part_seg':
        values.setdefault('one_hot_size', max(len(dataset.class_names), 1))
  return ModelConfig(branch, **values)

def train_config_from_options(model_cfg, dataset=None, cfg=None):
  '''Builds the :class:`pointkan.train.TrainConfig` of the run.

  ``train.epochs = 0`` selects 60 epochs for synthetic datasets and 100
  otherwise.
  '''
  from pointkan.train import TrainConfig
  from pointkan.synthetic import generators
  cfg = config if cfg is None else cfg
  values = section('train', cfg)
  values['seed'] = cfg['run.seed']
  if not values.get('epochs'):
    synthetic = (dataset is not None and dataset.class_names and
                 all(c in generators for c in dataset.class_names))
    values['epochs'] = 60 if synthetic else 100
  return TrainConfig.for_model(model_cfg, **values)

def check_options(error=raise_error, display=print_message, check_io=True):
  '''Checks options for errors and merges the run configuration.

  **Parameters:**

    error : function, optional
      Handles the errors.
    display :  function, optional
      Handles the print commands.
    check_io : bool, optional
      If True, the positional input paths are checked for existence.

  :Default Error and Exception Handling:
    Raises :class:`pointkan.tools.ConfigError`.
  '''
  global config

  if command not in commands:
    error('Unknown command "%s" (choose from "%s").' % (command, '", "'.join(commands)))
  expected = command_args[command]
  n_optional = 1 if command == 'count' else 0
  if not len(expected) <= len(args) <= len(expected) + n_optional:
    error('%s expects the argument(s) %s, got %d.'
          % (command, ' '.join(expected) or 'none', len(args)))

  #--- Input/Output Options ---#
  if check_io:
    for i, fid in enumerate(args):
      setattr(thismodule, 'args', args[:i] + [check_if_exists(fid, what='input path',
                                                              error=error)] + args[i+1:])
    if config_file is not None:
      check_if_exists(config_file, what='config file', error=error)

  if command in ['synth', 'convert-off', 'predict'] and not outputname:
    error('%s requires an output name (-o).' % command)
  if outputname:
    outpath = os.path.dirname(outputname.split('@')[0])
    if not (outpath == '' or os.path.exists(outpath)):
      error('Output path "%s" does not exist!' % outpath)

  if otype is None:
    setattr(thismodule, 'otype', ['csv'])
  elif not isinstance(otype, list):
    setattr(thismodule, 'otype', [otype])
  if not all(i in otypes for i in thismodule.otype):
    error('Invalid output file formats (choose from "%s")' % '", "'.join(otypes))
  if any(i in ['h5', 'hdf5'] for i in thismodule.otype):
    try:
      __import__('h5py')
    except ImportError:
      error('HDF5 output was requested but the module h5py is not installed.')
  if itype not in itypes:
    error('Invalid input tree type (choose from "%s")' % '", "'.join(itypes))

  #--- Configuration Options ---#
  for name, value in [('--seed', seed), ('--workers', workers), ('--epochs', epochs)]:
    if value is not None and not isinstance(value, int):
      error('The option %s has to be an integer value.' % name)
  file_values = read_config_file(config_file) if config_file else None
  config = merge_config(file_values, parse_overrides(overrides), seed, workers, epochs)
  if config['run.workers'] < 1:
    error('The number of workers (--workers) has to be positive.')
  if config['train.epochs'] < 0:
    error('The number of epochs (--epochs) has to be non-negative.')
  if any(k < 1 for k in config['data.keep_counts']):
    error('data.keep_counts have to be positive.')
  if config['data.val_per_class'] < 0:
    error('data.val_per_class has to be non-negative.')
  if config['run.sweep'] not in ['degree', 'alpha_beta']:
    error('run.sweep has to be "degree" or "alpha_beta".')
  # validates the model keys
  model_config_from_options(cfg=config)
  return True

def check_if_exists(fid, what='', error=IOError, display=sys.stdout.write):
  '''Checks the existence of a file or directory.

  **Returns:**

    fid : string
      Specifies filename of the requested file.
  '''
  if not (isinstance(fid, str) and os.path.exists(fid)):
    if fid:
      display('%s does not exist!\n' % fid)
    error('Insert a correct %s!' % what)
  return fid

# initiating the parser variables
# the names are chosen according to init_parser()

#--- Command ---
command         = None          #: Specifies the subcommand. See :data:`commands`. (str)
args            = []            #: Positional arguments of the subcommand. (list of str)
#--- Input/Output Options ---
outputname      = ''            #: Specifies output directory or file base name. (str)
otype           = ['csv']       #: Specifies table output types. See :data:`otypes`. (list of str)
itype           = 'auto'        #: Specifies the input tree type of convert-off. (str)
#--- Configuration Options ---
config_file     = None          #: Specifies the run configuration file. (str)
overrides       = []            #: ``--set`` overrides. (list of str)
seed            = None          #: If not None, overrides run.seed. (int)
workers         = None          #: If not None, overrides run.workers. (int)
epochs          = None          #: If not None, overrides train.epochs. (int)
config          = merge_config() #: Merged run configuration. (OrderedDict)
#--- Options for Advanced Users ---
quiet           = False         #: If True, omits terminal output. (bool)
no_log          = False         #: If True, omits logfile output. (bool)
