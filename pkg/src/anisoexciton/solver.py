"""Sector diagonalization, truncation convergence and level tracking.

For ``gamma <= 1`` the matrix ``diag(n) + (eps/2) V`` with ``eps = gamma - 1``
is diagonalized directly.  For ``gamma > 1`` the kinetic term is rewritten as
``gamma [p^2 + (1/gamma - 1) p_perp^2]``; after rescaling lengths by
``gamma`` the in-plane problem with ``eps~ = 1/gamma - 1`` has the same
structure, and

    E = E~ / gamma,    lambda = sqrt(gamma) lambda~,    |phi(0)|^2 = gamma^-3 |phi~(0)|^2.

The last relation is derived from the coordinate rescaling and is only
checked through continuity at ``gamma = 1``.
"""

from __future__ import annotations

import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from functools import lru_cache

import numpy as np
from scipy import linalg
from scipy.optimize import linear_sum_assignment

from .basis import Sector, SectorBasis, sector_states
from .elements import assemble
from .observables import relative_oscillator_strength, s_norm_squared

log = logging.getLogger(__name__)

SEAM_DELTA = 1e-6
# (n_max, l_max) pairs; both grow every step so a frozen cutoff cannot fake convergence
SCHEDULE = ((6, 3), (9, 4), (12, 5), (15, 6), (20, 8), (26, 10), (34, 12), (44, 14),
            (58, 18), (76, 22), (100, 28), (130, 34), (170, 40))
DEFAULT_L_CAP = 40
L_LETTERS = "SPDFGHIKLMNOQRTUVWXYZ"


class NumericError(RuntimeError):
    """The eigensolver failed or produced no bound state."""


def default_l_max(n_max: int, l_cap: int = DEFAULT_L_CAP) -> int:
    """Orbital cutoff for ``n_max``, interpolating the convergence schedule."""
    for n, l in SCHEDULE:
        if n >= n_max:
            return max(0, min(n_max - 1, l_cap, l))
    return max(0, min(n_max - 1, l_cap, n_max // 4))


def reduce_elongated(gamma: float) -> tuple[float, float]:
    """``(eps~, energy_scale)`` of the in-plane form; ``E = energy_scale * E~``."""
    if not gamma > 1:
        raise ValueError(f"the elongated reformulation needs gamma > 1, got {gamma}")
    return 1.0 / gamma - 1.0, 1.0 / gamma


@dataclass(frozen=True)
class SpectrumResult:
    sector: Sector
    gamma: float
    basis: SectorBasis = field(repr=False)
    eigenvalues: np.ndarray
    aux_eigenvalues: np.ndarray = field(repr=False)
    coefficients: np.ndarray = field(repr=False)
    s_norms: np.ndarray = field(repr=False)
    oscillator_strengths: np.ndarray
    labels: tuple[str, ...]
    formulation: str
    length_scale: float = 1.0
    converged: bool = True
    dropped_nonpositive: int = 0

    @property
    def energies(self) -> np.ndarray:
        return -1.0 / self.eigenvalues**2

    @property
    def binding_energies(self) -> np.ndarray:
        return 1.0 / self.eigenvalues**2

    @property
    def scaled_eigenvalues(self) -> np.ndarray:
        """``gamma^-1/2 lambda`` above the seam, plain ``lambda`` below."""
        return self.aux_eigenvalues if self.gamma > 1 else self.eigenvalues

    @property
    def truncation(self) -> tuple[int, int]:
        return self.basis.n_max, self.basis.l_max

    @property
    def k(self) -> int:
        return self.eigenvalues.size

    def state(self, label: str) -> int:
        return self.labels.index(label)


def _fix_signs(vectors: np.ndarray) -> np.ndarray:
    # largest component positive; keeps output reproducible
    idx = np.argmax(np.abs(vectors), axis=0)
    signs = np.sign(vectors[idx, np.arange(vectors.shape[1])])
    signs[signs == 0] = 1.0
    return vectors * signs


def _diagonalize(basis: SectorBasis, gamma: float, count: int | None = None
                 ) -> tuple[np.ndarray, np.ndarray, str, float]:
    """Lowest ``count`` eigenpairs (all when ``None``) of the sector matrix."""
    if gamma <= 1.0:
        mat = assemble(basis, gamma - 1.0, "z-axis")
        formulation, scale = "z-axis", 1.0
    else:
        eps_t, _ = reduce_elongated(gamma)
        mat = assemble(basis, eps_t, "xy-plane")
        formulation, scale = "xy-plane", gamma
    size = mat.size
    subset = None if count is None or count >= size else [0, count - 1]
    try:
        w, u = linalg.eigh(mat.entries, subset_by_index=subset, check_finite=False)
    except (linalg.LinAlgError, ValueError) as exc:
        raise NumericError(f"eigensolver failed for {basis.sector} at gamma={gamma}") from exc
    return w, _fix_signs(u), formulation, scale


def _lowest_positive(basis: SectorBasis, gamma: float, k_states: int):
    """Eigenpairs up to the ``k_states``-th positive eigenvalue."""
    count = k_states
    while True:
        w, u, formulation, scale = _diagonalize(basis, gamma, count)
        dropped = int(np.count_nonzero(w <= 0))
        if w.size < count or w.size - dropped >= k_states:
            return w, u, formulation, scale, dropped
        count = min(len(basis), count + dropped)


def _orbital_letter(l: int) -> str:
    return L_LETTERS[l] if l < len(L_LETTERS) else f"[l={l}]"


def state_name(n: int, l: int, m_abs: int) -> str:
    """Spectroscopic label, e.g. ``1S``, ``3D0``, ``2Ppm``, ``3Dpm2``."""
    if l == 0:
        return f"{n}S"
    if m_abs == 0:
        return f"{n}{_orbital_letter(l)}0"
    suffix = "pm" if m_abs == 1 else f"pm{m_abs}"
    return f"{n}{_orbital_letter(l)}{suffix}"


@lru_cache(maxsize=128)
def seam_labels(sector: Sector, n_max: int, l_max: int, side: int,
                count: int | None = None) -> tuple[str, ...]:
    """Labels of the sorted states just below (``side=-1``) or above (``+1``) ``gamma = 1``.

    Each degenerate ``n`` shell is resolved by the infinitesimal perturbation;
    its eigenvectors are matched to orbital momenta by largest total weight.
    In the ``m = 0`` even sector the state with the largest oscillator
    strength is always named ``S``.  ``count`` limits the partial spectrum;
    only whole shells below it are labelled.
    """
    basis = sector_states(sector, n_max, l_max)
    gamma = 1.0 + side * SEAM_DELTA
    w, u, _, _ = _diagonalize(basis, gamma, count)
    shells = np.rint(w).astype(int)
    if w.size < len(basis):
        # the last shell may be cut by the subset; keep only complete ones
        complete = shells < shells[-1]
        w, u, shells = w[complete], u[:, complete], shells[complete]
    ls = np.asarray(basis.ls)
    labels: list[str] = [""] * w.size
    for n in np.unique(shells):
        members = np.flatnonzero(shells == n)
        l_options = sorted({s.l for s in basis.states if s.n == n})
        weights = np.array([[np.sum(u[ls == l, k] ** 2) for l in l_options] for k in members])
        rows, cols = linear_sum_assignment(-weights)
        names = {members[r]: l_options[c] for r, c in zip(rows, cols)}
        if sector.is_optically_active and 0 in l_options:
            strengths = [relative_oscillator_strength(basis, u[:, k], 1.0 / w[k]) for k in members]
            brightest = members[int(np.argmax(strengths))]
            holder = next(k for k, l in names.items() if l == 0)
            names[holder], names[brightest] = names[brightest], names[holder]
        for k in members:
            labels[k] = state_name(int(n), names[k], sector.m_abs) if k in names else f"{n}?"
    return tuple(labels)


def solve_sector(sector: Sector, gamma: float, n_max: int, l_max: int | None = None,
                 k_states: int = 10, labels: bool = True) -> SpectrumResult:
    """Lowest ``k_states`` bound states of one sector at fixed truncation.

    At exactly ``gamma = 1`` eigenvalues are the integers ``n`` and the
    eigenvectors are taken from ``gamma = 1 + SEAM_DELTA``, which fixes the
    combinations inside each degenerate shell.  Non-positive eigenvalues are
    truncation artifacts; they are dropped and counted.
    """
    if not (gamma > 0 and math.isfinite(gamma)):
        raise ValueError(f"gamma must be finite and positive, got {gamma}")
    if k_states < 1:
        raise ValueError("k_states must be at least 1")
    if l_max is None:
        l_max = default_l_max(n_max)
    basis = sector_states(sector, n_max, l_max)
    at_seam = gamma == 1.0
    w, u, formulation, scale, dropped = _lowest_positive(
        basis, 1.0 + SEAM_DELTA if at_seam else gamma, k_states)
    if at_seam:
        w = np.sort(np.asarray(basis.ns, dtype=float))[: w.size]
        formulation, scale = "z-axis", 1.0
        # keep only the own-shell part: exact zeroth-order states
        u = np.where(np.asarray(basis.ns)[:, None] == w[None, :], u, 0.0)
        u = u / np.linalg.norm(u, axis=0)
    if dropped:
        log.warning("dropped %d non-positive eigenvalues in %s at gamma=%g", dropped, sector, gamma)
    w, u = w[dropped:], u[:, dropped:]
    if w.size == 0:
        raise NumericError(f"no bound states in {sector} at gamma={gamma}")
    aux, vecs = w[:k_states], u[:, :k_states]
    physical = np.sqrt(scale) * aux
    norms = np.array([math.sqrt(s_norm_squared(basis, vecs[:, k])) for k in range(aux.size)])
    strengths = np.array([
        relative_oscillator_strength(basis, vecs[:, k], 1.0 / aux[k], scale**-3)
        for k in range(aux.size)
    ])
    names: tuple[str, ...] = ()
    if labels:
        names = state_labels(sector, basis, gamma, dropped + aux.size)[dropped:]
    for arr in (aux, physical, vecs, norms, strengths):
        arr.setflags(write=False)
    return SpectrumResult(
        sector=sector, gamma=float(gamma), basis=basis, eigenvalues=physical,
        aux_eigenvalues=aux, coefficients=vecs, s_norms=norms,
        oscillator_strengths=strengths, labels=names, formulation=formulation,
        length_scale=scale, converged=True, dropped_nonpositive=dropped,
    )


def state_labels(sector: Sector, basis: SectorBasis, gamma: float, count: int) -> tuple[str, ...]:
    """Labels of the lowest ``count`` sorted states on the side of ``gamma``."""
    side = 1 if gamma >= 1.0 else -1
    shell_room = len(basis.l_values()) + 1
    names = seam_labels(sector, basis.n_max, basis.l_max, side, min(len(basis), count + shell_room))
    if len(names) < count:
        names = seam_labels(sector, basis.n_max, basis.l_max, side)
    return names[:count]


def solve_converged(sector: Sector, gamma: float, rel_tol: float = 1e-4, k_states: int = 10,
                    l_cap: int = DEFAULT_L_CAP, schedule=SCHEDULE) -> SpectrumResult:
    """Grow the truncation until the lowest ``k_states`` energies settle.

    Convergence means every one of the ``k_states`` energies moved by less
    than ``rel_tol`` (relative) between successive schedule steps.  If the
    schedule runs out the last result is returned with ``converged=False``.
    """
    if not rel_tol > 0:
        raise ValueError("rel_tol must be positive")
    previous = None
    result = None
    converged = False
    for n_max, l_max in schedule:
        l_max = min(l_max, l_cap)
        if sector.lowest_l > min(l_max, n_max - 1):
            continue
        result = solve_sector(sector, gamma, n_max, l_max, k_states, labels=False)
        if result.k < k_states:
            continue
        if gamma == 1.0:
            converged = True
            break
        if previous is not None:
            change = np.abs(result.energies / previous.energies - 1.0)
            if np.all(change < rel_tol):
                converged = True
                break
        previous = result
    if result is None:
        raise NumericError(f"schedule {schedule} admits no states in {sector}")
    if not converged:
        log.info("truncation schedule exhausted for %s at gamma=%g", sector, gamma)
    names = state_labels(sector, result.basis, gamma, result.dropped_nonpositive + result.k)
    return replace(result, labels=names[result.dropped_nonpositive:], converged=converged)


def _replace_converged(result: SpectrumResult, converged: bool) -> SpectrumResult:
    return replace(result, converged=converged)


@dataclass
class SweepResult:
    sector: Sector
    gamma_grid: np.ndarray
    points: list[SpectrumResult]
    trajectories: dict[str, list[tuple[float, float, float]]]
    min_overlap: float
    refinement_needed: list[dict]
    order_preserved: bool

    @property
    def continuity_report(self) -> dict:
        return {
            "min_overlap": self.min_overlap,
            "refinement_needed": self.refinement_needed,
            "order_preserved": self.order_preserved,
        }


def track_levels(points: list[SpectrumResult], threshold: float = 0.5) -> SweepResult:
    """Follow sorted levels across an ascending ``gamma`` grid.

    Labels come from the seam assignment and stay attached to sorted rank, so
    curves never cross.  Successive eigenvector overlaps are reported as a
    continuity check: a rank whose overlap with its predecessor falls below
    ``threshold`` (e.g. a sharp anticrossing between grid points) is listed
    for refinement.
    """
    if not points:
        raise ValueError("empty sweep")
    gammas = np.array([p.gamma for p in points])
    if np.any(np.diff(gammas) < 0):
        raise ValueError("sweep must be ordered by ascending gamma")
    sector = points[0].sector
    trajectories: dict[str, list[tuple[float, float, float]]] = {}
    refinement: list[dict] = []
    min_overlap = 1.0
    order_ok = True
    for i, pt in enumerate(points):
        if pt.sector != sector:
            raise ValueError("all sweep points must share one sector")
        if np.any(np.diff(pt.eigenvalues) < 0):
            order_ok = False
        for k, label in enumerate(pt.labels):
            trajectories.setdefault(label, []).append(
                (pt.gamma, float(pt.energies[k]), float(pt.oscillator_strengths[k])))
        if i == 0:
            continue
        prev = points[i - 1]
        overlap = _overlaps(prev, pt)
        position = {label: j for j, label in enumerate(pt.labels)}
        for k, label in enumerate(prev.labels):
            j = position.get(label)
            if j is None or k >= overlap.shape[0]:
                continue
            own = float(overlap[k, j])
            # ties broken by larger overlap, then lower index (argmax picks first)
            best = int(np.argmax(overlap[k]))
            min_overlap = min(min_overlap, own)
            if own < threshold or best != j:
                refinement.append({
                    "gamma_from": prev.gamma, "gamma_to": pt.gamma, "label": label,
                    "rank": j, "overlap": own, "best_match": best,
                })
    return SweepResult(sector, gammas, list(points), trajectories, float(min_overlap),
                       refinement, order_ok)


def _overlaps(a: SpectrumResult, b: SpectrumResult) -> np.ndarray:
    if a.basis.states == b.basis.states:
        return np.abs(a.coefficients.T @ b.coefficients)
    common = [s for s in a.basis.states if s in b.basis.index]
    ia = [a.basis.index[s] for s in common]
    ib = [b.basis.index[s] for s in common]
    return np.abs(a.coefficients[ia].T @ b.coefficients[ib])


def sweep(sector: Sector, gammas, k_states: int = 10, rel_tol: float = 1e-4,
          n_max: int | None = None, l_max: int | None = None, workers: int = 1) -> SweepResult:
    """Spectra on a grid with a common truncation, then :func:`track_levels`.

    Without an explicit ``n_max`` the truncation is the one that converges at
    the grid endpoints (the hardest points); the endpoints' convergence flags
    are propagated to every point.
    """
    grid = sorted(float(g) for g in gammas)
    converged = True
    if n_max is None:
        ends = {grid[0], grid[-1]}
        checks = [solve_converged(sector, g, rel_tol, k_states) for g in sorted(ends)]
        n_max = max(c.truncation[0] for c in checks)
        l_max = max(c.truncation[1] for c in checks) if l_max is None else l_max
        converged = all(c.converged for c in checks)
    elif l_max is None:
        l_max = default_l_max(n_max)

    def run(g: float) -> SpectrumResult:
        res = solve_sector(sector, g, n_max, l_max, k_states)
        return res if converged else _replace_converged(res, False)

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            points = list(pool.map(run, grid))
    else:
        points = [run(g) for g in grid]
    return track_levels(points)
