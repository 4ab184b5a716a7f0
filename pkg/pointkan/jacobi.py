# -*- coding: iso-8859-1 -*-
'''Module for the evaluation of Jacobi polynomial bases and their derivatives.

The basis functions f_0..f_n are generated with the three-term recursion

  f_k = (a_k x + b_k) f_{k-1} + c_k f_{k-2},   f_0 = 1,
  f_1 = (alpha+beta+2)/2 x + (alpha-beta)/2,

which is evaluated iteratively in double precision, O(n) per input value.
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

from .tools import ConfigError

special_cases = {'legendre':   0.0,
                 'chebyshev1': -0.5,
                 'chebyshev2': 0.5,
                 } #: alpha = beta for the named special cases. 'gegenbauer' takes lambda.

class JacobiParams(object):
  '''Parameters of a Jacobi basis: ``alpha``, ``beta`` and the degree ``n``.

  The parameter set is validated on construction; any set for which one of
  the recursion denominators vanishes is rejected with a
  :class:`pointkan.tools.ConfigError`.
  '''
  def __init__(self, alpha=1.0, beta=1.0, degree=4):
    self.alpha = float(alpha)
    self.beta = float(beta)
    if int(degree) != degree:
      raise ConfigError('The polynomial degree has to be an integer, got %r.' % degree)
    self.degree = int(degree)
    self.check()
    # a_k, b_k, c_k for k = 2..n
    self._coeffs = [recursion_coeffs(self, k) for k in range(2, self.degree + 1)]

  @property
  def n(self):
    return self.degree

  def check(self):
    alpha, beta, n = self.alpha, self.beta, self.degree
    if n < 0:
      raise ConfigError('The polynomial degree has to be non-negative, got %d.' % n)
    if not (numpy.isfinite(alpha) and numpy.isfinite(beta)):
      raise ConfigError('alpha and beta have to be finite.')
    if alpha <= -1 or beta <= -1:
      raise ConfigError('Jacobi parameters require alpha > -1 and beta > -1 '
                        '(got alpha=%g, beta=%g).' % (alpha, beta))
    for k in range(2, n + 1):
      if 2*k*(k + alpha + beta) == 0 or (2*k + alpha + beta - 2) == 0:
        raise ConfigError('Recursion denominator vanishes at k=%d for '
                          'alpha=%g, beta=%g.' % (k, alpha, beta))

  def todict(self):
    return {'alpha': self.alpha, 'beta': self.beta, 'degree': self.degree}

  def __eq__(self, other):
    if not isinstance(other, JacobiParams):
      return NotImplemented
    return self.todict() == other.todict()

  def __ne__(self, other):
    return not self == other

  def __hash__(self):
    return hash((self.alpha, self.beta, self.degree))

  def __repr__(self):
    return 'JacobiParams(alpha=%g, beta=%g, degree=%d)' % (self.alpha, self.beta,
                                                          self.degree)

def recursion_coeffs(params, k):
  '''Returns the coefficients (a_k, b_k, c_k) of the Jacobi recursion.

  **Parameters:**

    params : JacobiParams
    k : int
      Recursion index, k >= 2.

  **Returns:**

    a_k, b_k, c_k : float
  '''
  if k < 2:
    raise ValueError('Recursion coefficients are defined for k >= 2 only.')
  alpha, beta = params.alpha, params.beta
  s = alpha + beta
  den = 2.*k*(k + s)
  a = (2*k + s - 1)*(2*k + s) / den
  b = (2*k + s - 1)*(alpha*alpha - beta*beta) / (den*(2*k + s - 2))
  c = -2.*(k + alpha - 1)*(k + beta - 1)*(2*k + s) / (den*(2*k + s - 2))
  return a, b, c

def _first(params, gamma):
  return 0.5*(params.alpha + params.beta + 2.)*gamma + 0.5*(params.alpha - params.beta)

def eval_basis(params, gamma):
  '''Evaluates f_0..f_n at ``gamma``.

  **Parameters:**

    params : JacobiParams
    gamma : float or numpy.ndarray, values in [-1,1]

  **Returns:**

    values : numpy.ndarray, shape=(gamma.shape + (n+1,))
  '''
  gamma = numpy.asarray(gamma, dtype=numpy.float64)
  assert numpy.all(numpy.abs(gamma) <= 1.), 'Jacobi input outside [-1,1].'
  n = params.degree
  values = numpy.empty(gamma.shape + (n + 1,))
  values[..., 0] = 1.
  if n >= 1:
    values[..., 1] = _first(params, gamma)
  for k in range(2, n + 1):
    a, b, c = params._coeffs[k - 2]
    values[..., k] = (a*gamma + b)*values[..., k-1] + c*values[..., k-2]
  return values

def eval_basis_derivative(params, gamma, values=None):
  '''Evaluates df_k/dgamma for k = 0..n by differentiating the recursion term
  by term: f'_k = a_k f_{k-1} + (a_k gamma + b_k) f'_{k-1} + c_k f'_{k-2}.

  **Parameters:**

    params : JacobiParams
    gamma : float or numpy.ndarray, values in [-1,1]
    values : numpy.ndarray, optional
      Output of :func:`eval_basis` for the same input, if already available.

  **Returns:**

    derivative : numpy.ndarray, shape=(gamma.shape + (n+1,))
  '''
  gamma = numpy.asarray(gamma, dtype=numpy.float64)
  if values is None:
    values = eval_basis(params, gamma)
  n = params.degree
  deriv = numpy.empty(gamma.shape + (n + 1,))
  deriv[..., 0] = 0.
  if n >= 1:
    deriv[..., 1] = 0.5*(params.alpha + params.beta + 2.)
  for k in range(2, n + 1):
    a, b, c = params._coeffs[k - 2]
    deriv[..., k] = (a*values[..., k-1] + (a*gamma + b)*deriv[..., k-1]
                     + c*deriv[..., k-2])
  return deriv

def special_case(name, n, lam=None):
  '''Returns the :class:`JacobiParams` of a named special case.

  **Parameters:**

    name : {'legendre', 'chebyshev1', 'chebyshev2', 'gegenbauer'}
    n : int
      Polynomial degree.
    lam : float, optional
      Parameter of the Gegenbauer case (alpha = beta = lam), lam > -1.
  '''
  name = name.lower()
  if name == 'gegenbauer':
    if lam is None:
      raise ConfigError('The Gegenbauer case requires a parameter lambda.')
    if lam <= -1:
      raise ConfigError('Gegenbauer parameter has to be > -1, got %g.' % lam)
    return JacobiParams(lam, lam, n)
  if name not in special_cases:
    raise ConfigError('Unknown polynomial family "%s" (choose from "%s").' %
                      (name, '", "'.join(sorted(special_cases) + ['gegenbauer'])))
  return JacobiParams(special_cases[name], special_cases[name], n)
