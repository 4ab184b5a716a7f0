'''
Some tools needed by pointkan functions
'''

import numpy

class PointkanError(Exception):
  '''Base class of all pointkan errors. ``exit_code`` is returned by the
  standalone program.'''
  exit_code = 1

class ConfigError(PointkanError, ValueError):
  '''Invalid configuration or parameter set.'''
  exit_code = 2

class ContractError(PointkanError, ValueError):
  '''Shape or precondition violation inside an operation.'''
  exit_code = 2

class DataError(PointkanError, IOError):
  '''Invalid or inconsistent input data.'''
  exit_code = 3

class ParseError(DataError):
  '''Malformed input file.'''
  def __init__(self, message, filename=None, lineno=None):
    if filename is not None and lineno is not None:
      message = '%s (line %d): %s' % (filename, lineno, message)
    elif filename is not None:
      message = '%s: %s' % (filename, message)
    DataError.__init__(self, message)
    self.filename = filename
    self.lineno = lineno

class NumericError(PointkanError, FloatingPointError):
  '''Non-finite values during optimization.'''
  exit_code = 4

def require(data, dtype='f', requirements='C'):
  '''Returns a contiguous float64 (``'f'``) or intc (``'i'``) copy-free view
  of ``data`` whenever possible.'''
  if dtype == 'f':
    dtype = numpy.float64
  elif dtype == 'i':
    dtype = numpy.intc
  return numpy.require(data, dtype=dtype, requirements=requirements)

def derive_seed(seed, index):
  '''Per-item seed used by all generators (seed xor item index).'''
  return (int(seed) ^ int(index)) & 0xFFFFFFFF

def get_rng(seed):
  '''Returns a ``numpy.random.RandomState`` for ``seed`` (or passes an
  existing one through).'''
  if isinstance(seed, numpy.random.RandomState):
    return seed
  return numpy.random.RandomState(seed)

def one_hot(labels, size):
  '''Returns the one-hot encoding of integer ``labels``, shape=labels.shape + (size,).'''
  labels = numpy.asarray(labels, dtype=int)
  out = numpy.zeros(labels.shape + (size,))
  if size:
    if numpy.any(labels < 0) or numpy.any(labels >= size):
      raise DataError('Category label outside [0,%d).' % size)
    numpy.put_along_axis(out, labels[..., numpy.newaxis], 1., axis=-1)
  return out

def parse_int_list(value):
  '''Converts ``'64,64,128'`` (or a sequence) into a list of ints.'''
  if isinstance(value, str):
    value = [v for v in value.replace(' ', '').strip('[]()').split(',') if v]
  return [int(v) for v in value]

value_kinds = ['int', 'float', 'str', 'bool', 'ints', 'floats', 'intss'] #: Types of config values.

def parse_value(text, kind):
  '''Converts the config text ``text`` to a value of type ``kind``.

  Lists are comma separated; ``intss`` (list of int lists) separates the
  inner lists with semicolons, e.g. ``64,64,128;128,128,256``.
  '''
  if not isinstance(text, str):
    if kind == 'int':
      return int(text)
    elif kind == 'float':
      return float(text)
    elif kind == 'bool':
      return bool(text)
    return text
  text = text.strip()
  try:
    if kind == 'int':
      value = float(text)
      if value != int(value):
        raise ValueError
      return int(value)
    elif kind == 'float':
      return float(text)
    elif kind == 'str':
      return text
    elif kind == 'bool':
      if text.lower() in ['1', 'true', 'yes', 'on']:
        return True
      if text.lower() in ['0', 'false', 'no', 'off']:
        return False
      raise ValueError
    elif kind == 'ints':
      return parse_int_list(text)
    elif kind == 'floats':
      return [float(v) for v in text.replace(' ', '').strip('[]()').split(',') if v]
    elif kind == 'intss':
      return [parse_int_list(v) for v in text.split(';') if v.strip()]
  except ValueError:
    raise ConfigError('Cannot interpret "%s" as %s.' % (text, kind))
  raise ConfigError('Unknown value type "%s".' % kind)

def format_value(value, kind):
  '''Inverse of :func:`parse_value`.'''
  if value is None:
    return ''
  if kind == 'bool':
    return 'true' if value else 'false'
  if kind in ['ints', 'floats']:
    return ','.join(repr(v) if isinstance(v, float) else str(v) for v in value)
  if kind == 'intss':
    return ';'.join(','.join(str(v) for v in inner) for inner in value)
  if kind == 'float':
    return repr(float(value))
  return str(value)
