'''
Module for systematic testing of pointkan functions

Every ``test_*`` function of the modules listed in :data:`tests` becomes one
test case. Long acceptance runs are skipped unless the environment variable
``POINTKAN_LONG_TESTS=1`` is set.
'''

import importlib.util
import os
import unittest

from pointkan import __file__
from pointkan.display import display

tests = ['numerics/test_jacobi',
         'numerics/test_autodiff',
         'numerics/test_gradients',
         'network/test_layers',
         'network/test_models',
         'network/test_hierarchy',
         'data/test_pointcloud',
         'data/test_io',
         'training/test_train',
         'training/test_metrics',
         'training/test_experiments',
         'cli/test_cli']

def long_tests_enabled():
  return os.environ.get('POINTKAN_LONG_TESTS', '') == '1'

def long_test(func):
  '''Marks a test as a long acceptance run.'''
  def wrapper(*args, **kwargs):
    if not long_tests_enabled():
      raise unittest.SkipTest('set POINTKAN_LONG_TESTS=1 to run')
    return func(*args, **kwargs)
  wrapper.__name__ = func.__name__
  wrapper.__doc__ = func.__doc__
  return wrapper

def load_module(filename):
  name = 'pointkan_test_' + os.path.splitext(os.path.basename(filename))[0]
  spec = importlib.util.spec_from_file_location(name, filename)
  module = importlib.util.module_from_spec(spec)
  spec.loader.exec_module(module)
  return module

class FunctionTestCase(unittest.FunctionTestCase):
  def __init__(self, func, filename):
    unittest.FunctionTestCase.__init__(self, func)
    self.filename = filename

  def id(self):
    return '%s::%s' % (self.filename, self._testFunc.__name__)

  def __str__(self):
    return '%s (%s)' % (self._testFunc.__name__, os.path.basename(self.filename)[:-3])

def suite(names=None):
  ts = unittest.TestSuite()
  tests_home = os.path.join(os.path.dirname(os.path.abspath(__file__)), 'test')
  for test in (names or tests):
    filename = os.path.join(tests_home, test + '.py')
    module = load_module(filename)
    for key in sorted(vars(module)):
      func = getattr(module, key)
      if key.startswith('test_') and callable(func):
        ts.addTest(FunctionTestCase(func, filename))
  return ts

def test(names=None):
  '''Runs the test suite; returns True if every test passed.'''
  display('----------------------------------------------------------------------')
  display('                  Testing pointkan functionality                      ')
  display('----------------------------------------------------------------------\n')
  results = unittest.TextTestRunner(verbosity=2).run(suite(names))
  return results.wasSuccessful()
