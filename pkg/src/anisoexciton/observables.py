"""Normalizations, oscillator strengths, wavefunctions and analytic estimates.

Oscillator strengths are relative: the isotropic ground state has ``f = 1``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .basis import BasisError, SectorBasis
from .elements import q_angular
from .special import hydrogen_radial, real_spherical_harmonic

# second-order coefficients (first order, second order) of the Fock eigenvalue
# lambda = n [1 + a eps + b eps^2]
_SECOND_ORDER = {
    "1S": (1, 1 / 6, math.pi**2 / 45 - 59 / 216),
    "2S": (2, 1 / 6, -4 * math.pi**2 / 45 + 173 / 216),
    "2P0": (2, 3 / 10, 4 * math.pi**2 / 35 - 25441 / 21000),
    "2Ppm": (2, 1 / 10, 8 * math.pi**2 / 105 - 49307 / 63000),
}


def s_norm_squared(basis: SectorBasis, coeffs) -> float:
    """``sum C_nl [n C_nl - sqrt((n+l+1)(n-l)) C_{n+1,l}]``.

    This is the ``(1 - cos alpha)``-weighted norm of the expansion, i.e. the
    physical momentum-space norm.
    """
    c = np.asarray(coeffs, dtype=float)
    if c.shape != (len(basis),):
        raise ValueError(f"expected {len(basis)} coefficients, got shape {c.shape}")
    total = 0.0
    states = basis.states
    for i, s in enumerate(states):
        total += s.n * c[i] * c[i]
        if i + 1 < len(states) and states[i + 1].l == s.l:
            total -= math.sqrt((s.n + s.l + 1) * (s.n - s.l)) * c[i] * c[i + 1]
    return total


def normalization_S(basis: SectorBasis, coeffs) -> float:
    c = np.asarray(coeffs, dtype=float)
    if not np.any(c):
        raise ValueError("normalization of the zero vector is undefined")
    return math.sqrt(s_norm_squared(basis, c))


def s_wave_amplitude(basis: SectorBasis, coeffs) -> float:
    """``sum_n C_{n00} sqrt(n)``; zero for sectors without ``l = m = 0``."""
    if not basis.sector.is_optically_active:
        return 0.0
    c = np.asarray(coeffs, dtype=float)
    return float(sum(c[i] * math.sqrt(s.n) for i, s in enumerate(basis.states) if s.l == 0))


def relative_oscillator_strength(basis: SectorBasis, coeffs, p: float,
                                 density_scale: float = 1.0) -> float:
    """``density_scale * p^3 / S^2 * |sum_n C_n00 sqrt(n)|^2``."""
    if not basis.sector.is_optically_active:
        return 0.0
    amp = s_wave_amplitude(basis, coeffs)
    return density_scale * p**3 * amp * amp / s_norm_squared(basis, coeffs)


def oscillator_strength(result, nu: int) -> float:
    """Relative oscillator strength of state ``nu`` of a solved spectrum.

    Raises
    ------
    ValueError
        For sectors other than ``m = 0`` even, which carry no dipole strength.
    """
    if not result.sector.is_optically_active:
        raise ValueError(f"oscillator strengths need the m=0 even sector, got {result.sector}")
    return relative_oscillator_strength(result.basis, result.coefficients[:, nu],
                                        1.0 / result.aux_eigenvalues[nu],
                                        result.length_scale**-3)


def _cartesian_to_spherical(r):
    r = np.asarray(r, dtype=float)
    x, y, z = r[..., 0], r[..., 1], r[..., 2]
    rad = np.sqrt(x * x + y * y + z * z)
    with np.errstate(invalid="ignore", divide="ignore"):
        cos_t = np.where(rad > 0, z / np.where(rad > 0, rad, 1.0), 1.0)
    theta = np.arccos(np.clip(cos_t, -1.0, 1.0))
    phi = np.arctan2(y, x)
    return rad, theta, phi


def wavefunction(result, nu: int, r):
    """Coordinate-space amplitude of state ``nu`` at points ``r`` (shape ``(..., 3)``).

    Lengths are in effective Bohr radii with the z axis rescaled so the
    Coulomb term is isotropic.  For ``m > 0`` the real ``cos(m phi)``
    combination of the ``+-m`` pair is returned.
    """
    basis = result.basis
    c = result.coefficients[:, nu]
    p = 1.0 / result.aux_eigenvalues[nu]
    scale = result.length_scale
    rad, theta, phi = _cartesian_to_spherical(r)
    rad = rad / scale
    out = np.zeros_like(rad)
    angular: dict[int, np.ndarray] = {}
    for i, s in enumerate(basis.states):
        if c[i] == 0.0:
            continue
        if s.l not in angular:
            angular[s.l] = real_spherical_harmonic(s.l, basis.sector.m_abs, theta, phi)
        out = out + c[i] * s.n**2 * hydrogen_radial(s.n, s.l, rad * p * s.n) * angular[s.l]
    amp = p**1.5 / math.sqrt(s_norm_squared(basis, c)) * scale**-1.5
    out = amp * out
    return out if out.ndim else float(out)


def spherical_energy(n: int, l: int, m: int, epsilon: float) -> float:
    """Energy with only the ``l``-diagonal part of the anisotropy kept."""
    denom = 1.0 + epsilon * q_angular(l, m)
    if denom <= 0:
        raise ValueError(f"spherical approximation breaks down: 1 + eps*Q = {denom}")
    return -1.0 / (n * n * denom)


def spherical_oscillator(n: int, epsilon: float) -> float:
    denom = 1.0 + epsilon / 3.0
    if denom <= 0:
        raise ValueError(f"spherical approximation breaks down: 1 + eps/3 = {denom}")
    return denom**-3 / n**3


@dataclass(frozen=True)
class AnalyticLevel:
    name: str
    n: int
    first: float
    second: float

    def fock_eigenvalue(self, epsilon: float) -> float:
        return self.n * (1.0 + self.first * epsilon + self.second * epsilon**2)

    def energy(self, epsilon: float) -> float:
        return -1.0 / self.fock_eigenvalue(epsilon) ** 2

    @property
    def energy_fn(self) -> Callable[[float], float]:
        return self.energy


ANALYTIC_LEVELS = {name: AnalyticLevel(name, *vals) for name, vals in _SECOND_ORDER.items()}


def second_order_energy(level: str, epsilon: float) -> float:
    """Second-order perturbative energy of ``1S``, ``2S``, ``2P0`` or ``2Ppm``."""
    try:
        return ANALYTIC_LEVELS[level].energy(epsilon)
    except KeyError:
        raise ValueError(f"no second-order formula for {level!r}; "
                         f"choose from {sorted(ANALYTIC_LEVELS)}") from None


def ground_state_pade(gamma: float) -> float:
    if not gamma > 0:
        raise ValueError("gamma must be positive")
    return -4.0 / (1.0 + gamma ** (1.0 / 3.0)) ** 2


def anisotropy_measure(e1s: float, e2s: float) -> float:
    """``(E_1S - E_2S) / E_1S``: 3/4 for the isotropic exciton."""
    if not (e1s <= e2s < 0):
        raise ValueError(f"need E_1S <= E_2S < 0, got {e1s}, {e2s}")
    return (e1s - e2s) / e1s


__all__ = [
    "ANALYTIC_LEVELS",
    "AnalyticLevel",
    "BasisError",
    "anisotropy_measure",
    "ground_state_pade",
    "normalization_S",
    "oscillator_strength",
    "relative_oscillator_strength",
    "s_norm_squared",
    "s_wave_amplitude",
    "second_order_energy",
    "spherical_energy",
    "spherical_oscillator",
    "wavefunction",
]
