'''
Test the Jacobi basis against closed forms
'''
import numpy
from scipy import special

from pointkan.jacobi import (JacobiParams, eval_basis, eval_basis_derivative,
                             recursion_coeffs, special_case)
from pointkan.tools import ConfigError
from pointkan.test.tools import equal, raises

gamma = numpy.random.RandomState(1).uniform(-1., 1., 1000)

def test_legendre():
  values = eval_basis(JacobiParams(0., 0., 6), gamma)
  assert values.shape == (1000, 7)
  for k in range(7):
    numpy.testing.assert_allclose(values[:, k], special.eval_legendre(k, gamma),
                                  rtol=1e-12, atol=1e-13)

def test_chebyshev_cosine_identity():
  theta = numpy.arccos(gamma)
  values = eval_basis(special_case('chebyshev1', 6), gamma)
  for k in range(7):
    # P_k^(-1/2,-1/2) = binom(2k,k)/4^k T_k
    scale = special.comb(2*k, k, exact=True) / 4.**k
    numpy.testing.assert_allclose(values[:, k], scale*numpy.cos(k*theta), atol=1e-10)

def test_general_parameters():
  for alpha, beta in [(1., 1.), (-0.5, 0.5), (1., 2.), (2., 1.), (0.3, -0.7)]:
    values = eval_basis(JacobiParams(alpha, beta, 5), gamma)
    for k in range(6):
      numpy.testing.assert_allclose(values[:, k], special.eval_jacobi(k, alpha, beta, gamma),
                                    rtol=1e-10, atol=1e-11)

def test_first_polynomials():
  p = JacobiParams(1., 2., 1)
  values = eval_basis(p, numpy.array([0.5]))
  equal(values[0, 0], 1.)
  equal(values[0, 1], 0.5*(1. + 2. + 2.)*0.5 + 0.5*(1. - 2.), tol=1e-14)
  assert eval_basis(JacobiParams(1., 1., 0), gamma).shape == (1000, 1)
  assert numpy.all(eval_basis(JacobiParams(1., 1., 0), gamma) == 1.)

def test_recursion_coeffs():
  a, b, c = recursion_coeffs(JacobiParams(0., 0., 2), 2)
  # Legendre: P_2 = 3/2 x P_1 - 1/2 P_0
  equal(a, 1.5, tol=1e-14)
  equal(b, 0., tol=1e-14)
  equal(c, -0.5, tol=1e-14)

def test_derivative():
  for alpha, beta in [(0., 0.), (-0.5, -0.5), (1., 2.)]:
    p = JacobiParams(alpha, beta, 5)
    deriv = eval_basis_derivative(p, gamma)
    equal(deriv[:, 0], numpy.zeros(1000), tol=1e-14)
    for k in range(1, 6):
      # d/dx P_k^(a,b) = (k+a+b+1)/2 P_{k-1}^(a+1,b+1)
      ref = 0.5*(k + alpha + beta + 1)*special.eval_jacobi(k - 1, alpha + 1, beta + 1, gamma)
      numpy.testing.assert_allclose(deriv[:, k], ref, rtol=1e-10, atol=1e-10)

def test_derivative_finite_differences():
  x = numpy.linspace(-0.99, 0.99, 101)
  h = 1e-6
  for alpha, beta, n in [(-0.5, -0.5, 2), (0., 0., 4), (1., 1., 6), (2., 0.5, 5)]:
    p = JacobiParams(alpha, beta, n)
    fd = (eval_basis(p, x + h) - eval_basis(p, x - h)) / (2*h)
    numpy.testing.assert_allclose(eval_basis_derivative(p, x), fd, rtol=1e-6, atol=1e-6)
    values = eval_basis(p, x)
    equal(eval_basis_derivative(p, x, values=values), eval_basis_derivative(p, x), tol=0.)

def test_input_shape():
  x = gamma[:24].reshape(2, 3, 4)
  values = eval_basis(JacobiParams(1., 1., 3), x)
  assert values.shape == (2, 3, 4, 4)
  equal(values[1, 2, 3], eval_basis(JacobiParams(1., 1., 3), x[1, 2, 3]))

def test_invalid_parameters():
  raises(ConfigError, JacobiParams, -1., 0., 3)
  raises(ConfigError, JacobiParams, 0., -1.5, 3)
  raises(ConfigError, JacobiParams, 0., 0., -1)
  raises(ConfigError, JacobiParams, 0., 0., 2.5)
  raises(ConfigError, special_case, 'gegenbauer', 3)
  raises(ConfigError, special_case, 'hermite', 3)

def test_special_cases():
  assert special_case('legendre', 4) == JacobiParams(0., 0., 4)
  assert special_case('chebyshev2', 2) == JacobiParams(0.5, 0.5, 2)
  assert special_case('gegenbauer', 3, lam=1.5) == JacobiParams(1.5, 1.5, 3)
