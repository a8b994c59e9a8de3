"""Orthogonal-polynomial recurrences and Gauss quadrature rules.

Everything here is written against the three-term recurrences directly so the
quadrature oracle does not share code with the closed-form matrix elements.
Node/weight generation is delegated to :mod:`scipy.special`.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from math import lgamma, exp, pi, sqrt

import numpy as np
from scipy import special as sp


def gegenbauer(k: int, nu: float, x):
    """Gegenbauer polynomial ``C_k^nu(x)`` by upward recurrence.

    Uses ``(j + 1) C_{j+1} = 2 (nu + j) x C_j - (2 nu + j - 1) C_{j-1}``.
    Works elementwise on arrays.
    """
    if k < 0:
        raise ValueError("degree must be non-negative")
    x = np.asarray(x, dtype=float)
    prev = np.ones_like(x)
    if k == 0:
        return prev if prev.ndim else float(prev)
    cur = 2.0 * nu * x
    for j in range(1, k):
        prev, cur = cur, (2.0 * (nu + j) * x * cur - (2.0 * nu + j - 1.0) * prev) / (j + 1.0)
    return cur if cur.ndim else float(cur)


def gegenbauer_at_one(k: int, nu: float) -> float:
    """``C_k^nu(1) = Gamma(k + 2 nu) / (Gamma(2 nu) k!)``."""
    return exp(lgamma(k + 2 * nu) - lgamma(2 * nu) - lgamma(k + 1))


def assoc_legendre(l: int, m: int, x):
    """Associated Legendre function ``P_l^m(x)`` with the Condon-Shortley phase.

    Starts from ``P_m^m`` and recurs upward in ``l``.
    """
    if m < 0 or m > l:
        raise ValueError(f"need 0 <= m <= l, got l={l}, m={m}")
    x = np.asarray(x, dtype=float)
    if np.any(np.abs(x) > 1.0):
        raise ValueError("P_l^m is defined on [-1, 1]")
    somx2 = np.sqrt((1.0 - x) * (1.0 + x))
    pmm = np.ones_like(x)
    fact = 1.0
    for _ in range(m):
        pmm = -pmm * fact * somx2
        fact += 2.0
    if l == m:
        return pmm if pmm.ndim else float(pmm)
    pmm1 = x * (2 * m + 1) * pmm
    for ll in range(m + 1, l):
        pmm, pmm1 = pmm1, ((2 * ll + 1) * x * pmm1 - (ll + m) * pmm) / (ll - m + 1)
    return pmm1 if pmm1.ndim else float(pmm1)


def legendre_norm(l: int, m: int) -> float:
    """Factor making ``N_lm P_l^m`` unit normalized on [-1, 1]."""
    m = abs(m)
    return sqrt((2 * l + 1) / 2.0 * exp(lgamma(l - m + 1) - lgamma(l + m + 1)))


def laguerre(k: int, alpha: float, x):
    """Generalized Laguerre polynomial ``L_k^alpha(x)`` by recurrence."""
    x = np.asarray(x, dtype=float)
    prev = np.ones_like(x)
    if k == 0:
        return prev if prev.ndim else float(prev)
    cur = 1.0 + alpha - x
    for j in range(1, k):
        prev, cur = cur, ((2 * j + 1 + alpha - x) * cur - (j + alpha) * prev) / (j + 1)
    return cur if cur.ndim else float(cur)


def hydrogen_radial(n: int, l: int, r):
    """Normalized hydrogen radial function in Bohr units (``E = -1/n^2`` Ry)."""
    r = np.asarray(r, dtype=float)
    rho = 2.0 * r / n
    log_norm = 0.5 * (3 * np.log(2.0 / n) + lgamma(n - l) - np.log(2.0 * n) - lgamma(n + l + 1))
    return exp(log_norm) * rho**l * np.exp(-rho / 2) * laguerre(n - l - 1, 2 * l + 1, rho)


def real_spherical_harmonic(l: int, m_abs: int, theta, phi):
    """``Y_lm`` for ``m = 0`` and ``sqrt(2) Re Y_lm`` for ``m > 0``."""
    cos_t = np.cos(theta)
    base = legendre_norm(l, m_abs) * assoc_legendre(l, m_abs, cos_t) / sqrt(2 * pi)
    if m_abs == 0:
        return base
    return sqrt(2.0) * base * np.cos(m_abs * phi)


@dataclass(frozen=True)
class QuadratureRule:
    """Gauss rule on (-1, 1) for the weight ``(1 - x)^alpha (1 + x)^beta``."""

    kind: str
    alpha: float
    beta: float
    nodes: np.ndarray
    weights: np.ndarray

    @property
    def order(self) -> int:
        return self.nodes.size

    def integrate(self, values) -> float:
        return float(np.dot(self.weights, values))

    def weight_integral(self) -> float:
        """Exact integral of the weight function."""
        a, b = self.alpha, self.beta
        return exp((a + b + 1) * np.log(2.0) + lgamma(a + 1) + lgamma(b + 1) - lgamma(a + b + 2))


@lru_cache(maxsize=None)
def gauss_jacobi(order: int, alpha: float, beta: float) -> QuadratureRule:
    nodes, weights = sp.roots_jacobi(order, alpha, beta)
    for arr in (nodes, weights):
        arr.setflags(write=False)
    return QuadratureRule("gauss-jacobi", float(alpha), float(beta), nodes, weights)


@lru_cache(maxsize=None)
def gauss_legendre(order: int) -> QuadratureRule:
    nodes, weights = sp.roots_legendre(order)
    for arr in (nodes, weights):
        arr.setflags(write=False)
    return QuadratureRule("gauss-legendre", 0.0, 0.0, nodes, weights)
