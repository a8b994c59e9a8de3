import math

import numpy as np
import pytest

from anisoexciton.special import (
    assoc_legendre,
    gauss_jacobi,
    gauss_legendre,
    gegenbauer,
    gegenbauer_at_one,
    hydrogen_radial,
    laguerre,
    legendre_norm,
)
from scipy import special as sp


def test_gegenbauer_low_degrees():
    x = np.linspace(-1, 1, 7)
    assert np.all(gegenbauer(0, 1.5, x) == 1.0)
    assert np.allclose(gegenbauer(1, 1.5, x), 3.0 * x)


@pytest.mark.parametrize("k,nu", [(0, 1), (3, 1), (5, 2), (8, 4)])
def test_gegenbauer_at_one(k, nu):
    factorial_form = math.factorial(k + 2 * nu - 1) / (math.factorial(2 * nu - 1) * math.factorial(k))
    assert gegenbauer(k, nu, 1.0) == pytest.approx(factorial_form, rel=1e-12)
    assert gegenbauer_at_one(k, nu) == pytest.approx(factorial_form, rel=1e-12)


def test_gegenbauer_against_scipy():
    x = np.linspace(-0.9, 0.9, 11)
    for k in range(9):
        assert np.allclose(gegenbauer(k, 3, x), sp.eval_gegenbauer(k, 3, x), rtol=1e-12)


def test_assoc_legendre():
    x = np.linspace(-1, 1, 9)
    assert np.all(assoc_legendre(0, 0, x) == 1.0)
    assert np.allclose(assoc_legendre(1, 0, x), x)
    assert np.allclose(assoc_legendre(2, 1, x), sp.lpmv(1, 2, x))
    rule = gauss_legendre(20)
    vals = (legendre_norm(3, 2) * assoc_legendre(3, 2, rule.nodes)) ** 2
    assert rule.integrate(vals) == pytest.approx(1.0, abs=1e-13)
    with pytest.raises(ValueError):
        assoc_legendre(2, 3, 0.1)
    with pytest.raises(ValueError):
        assoc_legendre(2, 1, 1.5)


def test_laguerre_against_scipy():
    x = np.linspace(0, 20, 13)
    for k in range(7):
        assert np.allclose(laguerre(k, 3, x), sp.eval_genlaguerre(k, 3, x), rtol=1e-10)


def test_hydrogen_radial_normalized():
    r = np.linspace(0, 120, 24001)
    for n, l in [(1, 0), (2, 1), (3, 0), (4, 3)]:
        dens = hydrogen_radial(n, l, r) ** 2 * r**2
        assert np.trapezoid(dens, r) == pytest.approx(1.0, abs=1e-6)
    assert hydrogen_radial(1, 0, 0.0) == pytest.approx(2.0)


def test_quadrature_weights_sum_to_weight_integral():
    for a, b in [(0.5, 0.5), (1.5, 2.5), (0.0, 0.0)]:
        rule = gauss_jacobi(12, a, b)
        assert rule.weights.sum() == pytest.approx(rule.weight_integral(), rel=1e-12)
    leg = gauss_legendre(10)
    assert leg.weights.sum() == pytest.approx(2.0)


def test_quadrature_polynomial_exactness():
    rule = gauss_legendre(6)
    for deg in range(12):
        exact = 0.0 if deg % 2 else 2.0 / (deg + 1)
        assert rule.integrate(rule.nodes**deg) == pytest.approx(exact, abs=1e-14)
    assert rule.order == 6
