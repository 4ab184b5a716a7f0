# -*- coding: iso-8859-1 -*-
'''Module for organizing multiprocessing tasks.

Results are always returned in the order of the input slices, so reductions
over them are deterministic regardless of the number of workers.
'''
'''
pointkan

This file is part of pointkan.

pointkan is free software: you can redistribute it and/or modify
it under the terms of the GNU Lesser General Public License as
published by the Free Software Foundation, either version 3 of
the License, or any later version.
'''
import numpy
from time import time
from multiprocessing import Pool

from pointkan import options

global_args = None #: Shared read-only arguments of the worker processes.

def slicer(N, slice_length=1e4, numproc=1):
  '''Splits range(N) into [start, stop) slices of at most ``slice_length``
  items. With a single process, one slice covers everything.'''
  if numproc <= 1:
    return [numpy.array([0, N], dtype=int)]
  slice_length = 1 if int(slice_length) <= 0 else int(slice_length)
  return [numpy.array([i, min(i + slice_length, N)], dtype=int)
          for i in range(0, N, slice_length)]

def initializer(gargs):
  global global_args
  global_args = gargs

def _progress(display, done, total, t):
  if options.quiet or display is None:
    return
  t.append(time())
  display('\tFinished %d of %d slices (%.3fs since the last report)' % (done, total, t[-1] - t[-2]))

def run(f, x, numproc=1, display=None, initializer=initializer, global_args=None):
  '''Maps ``f`` over ``x`` on ``numproc`` worker processes.

  **Parameters:**

    f : callable
      Picklable (module-level) function of one item of ``x``.
    x : list
    numproc : int
    display : callable, optional
      Receives progress messages, about one per tenth of ``x``.
    initializer : callable
      Called once per worker with ``global_args``.

  **Returns:**

    return_val : list
      ``f(x[i])`` in the order of ``x``.
  '''
  x = list(x)
  report_every = max(len(x) // 10, 1)
  t = [time()]
  return_val = []
  if numproc > 1 and len(x) > 1:
    with Pool(processes=numproc, initializer=initializer, initargs=(global_args,)) as pool:
      for item in pool.imap(f, x):
        return_val.append(item)
        if len(return_val) % report_every == 0:
          _progress(display, len(return_val), len(x), t)
  else:
    initializer(global_args)
    for item in x:
      return_val.append(f(item))
      if len(return_val) % report_every == 0:
        _progress(display, len(return_val), len(x), t)

  if not options.quiet and display is not None:
    display('\t' + 40*'-')
    display('\tComputation required %.3fs' % (time() - t[0]))
  return return_val
