"""Truncated hydrogen-like basis, split into symmetry sectors.

The anisotropic Hamiltonian conserves the magnetic quantum number and the
parity of ``l``, so every matrix is block diagonal over ``(|m|, parity)``.
Only ``m >= 0`` is stored; the ``-m`` partner is degenerate.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterator, Literal

from scipy import constants

Parity = Literal["even", "odd"]

RYDBERG_EV = constants.physical_constants["Rydberg constant times hc in eV"][0]
BOHR_RADIUS_NM = constants.physical_constants["Bohr radius"][0] * 1e9


class BasisError(ValueError):
    """Invalid quantum numbers or a truncation that leaves no states."""


@dataclass(frozen=True, order=True)
class QuantumNumbers:
    n: int
    l: int
    m: int = 0

    def __post_init__(self) -> None:
        if self.n < 1 or not 0 <= self.l <= self.n - 1 or abs(self.m) > self.l:
            raise BasisError(f"invalid quantum numbers (n={self.n}, l={self.l}, m={self.m})")

    def __iter__(self) -> Iterator[int]:
        return iter((self.n, self.l, self.m))


@dataclass(frozen=True)
class Sector:
    m_abs: int = 0
    parity: Parity = "even"

    def __post_init__(self) -> None:
        if self.m_abs < 0:
            raise BasisError("m_abs must be non-negative")
        if self.parity not in ("even", "odd"):
            raise BasisError(f"parity must be 'even' or 'odd', got {self.parity!r}")

    @property
    def l_residue(self) -> int:
        return 0 if self.parity == "even" else 1

    @property
    def multiplicity(self) -> int:
        """2 for ``m_abs > 0`` (the degenerate ``+-m`` pair), else 1."""
        return 2 if self.m_abs > 0 else 1

    @property
    def lowest_l(self) -> int:
        l = self.m_abs
        return l if l % 2 == self.l_residue else l + 1

    @property
    def is_optically_active(self) -> bool:
        """Only the ``m = 0`` even sector contains ``l = m = 0`` states."""
        return self.m_abs == 0 and self.parity == "even"


@dataclass(frozen=True)
class SectorBasis:
    """Ordered basis of one sector, ascending in ``(l, n)``."""

    sector: Sector
    n_max: int
    l_max: int
    states: tuple[QuantumNumbers, ...]
    index: dict[QuantumNumbers, int] = field(repr=False, compare=False)

    def __len__(self) -> int:
        return len(self.states)

    @property
    def ns(self) -> list[int]:
        return [s.n for s in self.states]

    @property
    def ls(self) -> list[int]:
        return [s.l for s in self.states]

    def l_values(self) -> list[int]:
        return sorted({s.l for s in self.states})


def sector_states(sector: Sector, n_max: int, l_max: int) -> SectorBasis:
    """All ``(n, l, m_abs)`` of ``sector`` with ``n <= n_max``, ``l <= l_max``.

    Raises
    ------
    BasisError
        If the truncation is malformed or admits no state.
    """
    if n_max < 1 or l_max < 0:
        raise BasisError(f"invalid truncation n_max={n_max}, l_max={l_max}")
    if sector.m_abs > l_max:
        raise BasisError(f"m_abs={sector.m_abs} exceeds l_max={l_max}")
    states = tuple(
        QuantumNumbers(n, l, sector.m_abs)
        for l in range(sector.lowest_l, min(l_max, n_max - 1) + 1, 2)
        for n in range(l + 1, n_max + 1)
    )
    if not states:
        raise BasisError(
            f"empty basis for {sector} with n_max={n_max}, l_max={l_max}"
        )
    index = {s: i for i, s in enumerate(states)}
    return SectorBasis(sector, n_max, l_max, states, index)


def state_index(basis: SectorBasis, qn: QuantumNumbers | tuple[int, int, int]) -> int:
    if not isinstance(qn, QuantumNumbers):
        qn = QuantumNumbers(*qn)
    try:
        return basis.index[qn]
    except KeyError:
        raise KeyError(f"{qn} is not in the basis of {basis.sector}") from None


@dataclass(frozen=True)
class MaterialUnits:
    gamma: float
    rydberg_ev: float
    bohr_radius_nm: float
    eps0: float


def gamma_from_materials(mu_perp: float, mu_par: float, eps_perp: float,
                         eps_par: float) -> MaterialUnits:
    """Anisotropy parameter and effective atomic units.

    Masses are in units of the free electron mass, dielectric constants are
    relative.  Energies use ``eps0 = sqrt(eps_perp * eps_par)`` and the
    in-plane mass ``mu_perp``.
    """
    values = dict(mu_perp=mu_perp, mu_par=mu_par, eps_perp=eps_perp, eps_par=eps_par)
    for name, value in values.items():
        if not value > 0:
            raise ValueError(f"{name} must be positive, got {value}")
    gamma = (eps_perp * mu_perp) / (eps_par * mu_par)
    eps0 = math.sqrt(eps_perp * eps_par)
    return MaterialUnits(
        gamma=gamma,
        rydberg_ev=RYDBERG_EV * mu_perp / eps0**2,
        bohr_radius_nm=BOHR_RADIUS_NM * eps0 / mu_perp,
        eps0=eps0,
    )
