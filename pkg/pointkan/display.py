# -*- coding: iso-8859-1 -*-
'''Module for the terminal output of pointkan and its .pklog run logs.'''
import os
import sys
import warnings

from pointkan import options

try:
  import resource
except ImportError: # not available on Windows
  resource = None

is_initiated = False #: If True, the log file of the run has been truncated.
log_fid = None #: Specifies the filename of the .pklog file.

def _logname(name):
  return name if name.endswith('.pklog') else '%s.pklog' % name

def init_display(name=None):
  '''Selects the .pklog file of the run and truncates an old log of the same name.

  **Parameters:**

    name : str, optional
      Base name (or full name) of the log file. Defaults to the output name.
  '''
  global log_fid, is_initiated
  if name:
    log_fid = _logname(name)
  if not options.no_log and log_fid is not None:
    if os.path.exists(log_fid):
      os.remove(log_fid)
    if not options.quiet:
      print('Writing log to %s\n' % os.path.relpath(log_fid))
  is_initiated = True

def display(string):
  '''Prints ``string`` and appends it to the .pklog file of the run.

  Nothing is logged if neither a log file nor an output name is set.
  '''
  global log_fid
  if not options.quiet:
    print(string)
  if options.no_log:
    return
  if log_fid is None:
    if not options.outputname:
      return
    log_fid = _logname(options.outputname)
  if not is_initiated:
    init_display()
  with open(log_fid, 'a') as fd:
    fd.write('%s\n' % string)

def warn(string):
  '''Issues a ``UserWarning`` and writes it to the log.'''
  warnings.warn(string, UserWarning, stacklevel=2)
  display('Warning: %s' % string)

def tForm(string, T, extra=''):
  '''Formats the duration ``T`` (in s) of the step ``string``.'''
  if T < 60:
    return '\n%s took %.3fs%s.\n' % (string, T, extra)
  minutes, seconds = divmod(int(round(T)), 60)
  hours, minutes = divmod(minutes, 60)
  if hours:
    return '\n%s took %dh, %dmin and %ds%s.\n' % (string, hours, minutes, seconds, extra)
  return '\n%s took %dmin and %ds%s.\n' % (string, minutes, seconds, extra)

def peak_memory():
  '''Returns the peak resident memory of the process in MB (None if unknown).'''
  if resource is None:
    return None
  rss = resource.getrusage(resource.RUSAGE_SELF).ru_maxrss
  # kB on Linux, bytes on macOS
  return rss / 1e6 if sys.platform == 'darwin' else rss / 1e3

def good_bye_message(t):
  '''Displays the wall time between ``t[0]`` and ``t[-1]`` and the peak memory.'''
  memory = peak_memory()
  extra = '' if memory is None else '\nand required %.2f MB of RAM' % memory
  msg = tForm('The run', t[-1] - t[0], extra=extra) + '\nDone.'
  display(msg)
  return msg
