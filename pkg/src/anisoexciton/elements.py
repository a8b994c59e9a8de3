"""Closed-form perturbation matrix elements in the hyperspherical basis.

The effective Hamiltonian of one sector is

    M = diag(n) + (eps / 2) * V

with ``V`` the matrix of ``(1 + cos(alpha)) cos^2(theta)`` scaled by
``sqrt(n n')``.  ``V`` is tridiagonal within a fixed ``l`` and couples ``l``
to ``l - 2`` through ``v_lower_l``; the ``(l, l + 2)`` blocks are the
transpose.  The ``l - 2`` formula is used exactly as printed in the source
derivation: the ``(n - l) / (2n(2l - 1))`` factor multiplies only the three
near-diagonal branches, and the far branch ``n' <= n - 2`` is ``-1``.
Quadrature (see :mod:`anisoexciton.oracle`) confirms this placement, and the
overall sign absorbs the ``(-2i)^l`` phases of the basis functions.

For elongated excitons the in-plane form is used instead:

    M = diag(n) + (eps / 2) * (T - V)

where ``T`` is the ``(1 + cos(alpha))`` operator, since
``sin^2(theta) = 1 - cos^2(theta)``.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from fractions import Fraction
from typing import Literal

import numpy as np

from . import kernels
from ._kernels_py import hyper as _hyper, lower_l as _lower_l
from .basis import BasisError, Sector, SectorBasis, sector_states

Mode = Literal["z-axis", "xy-plane"]

SYMMETRY_TOL = 1e-10


class ConsistencyError(RuntimeError):
    """An assembled matrix violated a structural identity."""


def _check_state(n: int, l: int, m: int = 0) -> None:
    if n < 1 or not 0 <= l <= n - 1 or abs(m) > l:
        raise BasisError(f"invalid quantum numbers (n={n}, l={l}, m={m})")


def q_angular_exact(l: int, m: int) -> Fraction:
    """``<l m| cos^2(theta) |l m>`` as an exact fraction."""
    if l < 0 or abs(m) > l:
        raise ValueError(f"|m| must not exceed l (l={l}, m={m})")
    return Fraction(1, 2) + Fraction(1 - 4 * m * m, 2 * (2 * l - 1) * (2 * l + 3))


def q_angular(l: int, m: int) -> float:
    return float(q_angular_exact(l, m))


def t_hyper(n: int, n2: int, l: int) -> float:
    """Matrix of ``(1 + cos(alpha))`` within fixed ``(l, m)``, times sqrt(n n')."""
    _check_state(n, l)
    _check_state(n2, l)
    return _hyper(n, n2, l)


def v_same_l(n: int, n2: int, l: int, m: int) -> float:
    _check_state(n, l, m)
    _check_state(n2, l, m)
    return q_angular(l, m) * _hyper(n, n2, l)


def v_lower_l(n: int, n2: int, l: int, m: int) -> float:
    """Element between ``(n, l, m)`` and ``(n2, l - 2, m)``.

    Vanishes for ``n2 >= n + 2`` and whenever ``|m| > l - 2``.
    """
    if l < 2:
        raise ValueError(f"v_lower_l needs l >= 2, got l={l}")
    _check_state(n, l, m)
    if n2 < l - 1:
        raise BasisError(f"invalid quantum numbers (n={n2}, l={l - 2})")
    return _lower_l(n, n2, l, abs(m))


@dataclass(frozen=True)
class HamiltonianMatrix:
    sector: Sector
    epsilon: float
    mode: Mode
    entries: np.ndarray

    @property
    def size(self) -> int:
        return self.entries.shape[0]


@lru_cache(maxsize=64)
def _operators(sector: Sector, n_max: int, l_max: int) -> tuple[np.ndarray, np.ndarray]:
    basis = sector_states(sector, n_max, l_max)
    v, t = kernels.fill_perturbation(basis.ns, basis.ls, sector.m_abs)
    for name, mat in (("V", v), ("T", t)):
        asym = np.max(np.abs(mat - mat.T)) if mat.size else 0.0
        if asym > SYMMETRY_TOL:
            raise ConsistencyError(f"{name} asymmetric by {asym:.3e} in {sector}")
    v.setflags(write=False)
    t.setflags(write=False)
    return v, t


def perturbation_operators(basis: SectorBasis) -> tuple[np.ndarray, np.ndarray]:
    """``(V, T)`` for ``basis``; cached by sector and truncation, read-only."""
    return _operators(basis.sector, basis.n_max, basis.l_max)


def assemble(basis: SectorBasis, epsilon: float, mode: Mode = "z-axis",
             l_diagonal_only: bool = False) -> HamiltonianMatrix:
    """Effective Hamiltonian of one sector.

    Parameters
    ----------
    basis : SectorBasis
    epsilon : float
        Perturbation strength; ``gamma - 1`` for the ``"z-axis"`` form,
        ``1/gamma - 1`` for the ``"xy-plane"`` form.
    mode : {"z-axis", "xy-plane"}
    l_diagonal_only : bool
        Drop every block that couples different ``l`` (spherical approximation).
    """
    if mode not in ("z-axis", "xy-plane"):
        raise ValueError(f"unknown mode {mode!r}")
    v, t = perturbation_operators(basis)
    op = v if mode == "z-axis" else t - v
    if l_diagonal_only:
        ls = np.asarray(basis.ls)
        op = np.where(ls[:, None] == ls[None, :], op, 0.0)
    entries = np.diag(np.asarray(basis.ns, dtype=float)) + 0.5 * epsilon * op
    asym = np.max(np.abs(entries - entries.T))
    if asym > SYMMETRY_TOL:
        raise ConsistencyError(f"assembled matrix asymmetric by {asym:.3e}")
    entries.setflags(write=False)
    return HamiltonianMatrix(basis.sector, float(epsilon), mode, entries)
