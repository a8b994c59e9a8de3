import numpy as np
import pytest
from scipy import linalg

from anisoexciton.basis import Sector, sector_states
from anisoexciton.elements import assemble
from anisoexciton.solver import (
    NumericError,
    SCHEDULE,
    reduce_elongated,
    solve_converged,
    solve_sector,
    state_name,
    sweep,
    track_levels,
)

EVEN, ODD, PM = Sector(0, "even"), Sector(0, "odd"), Sector(1, "odd")


def test_isotropic_integers():
    res = solve_sector(EVEN, 1.0, 5, 4, 6)
    assert np.array_equal(res.eigenvalues, [1, 2, 3, 3, 4, 4])
    assert res.labels == ("1S", "2S", "3S", "3D0", "4S", "4D0")


def test_isotropic_multiplicities():
    for sector in (EVEN, ODD, PM, Sector(2, "even")):
        basis = sector_states(sector, 9, 8)
        res = solve_sector(sector, 1.0, 9, 8, len(basis))
        values, counts = np.unique(res.eigenvalues, return_counts=True)
        for n, c in zip(values, counts):
            assert c == sum(1 for s in basis.states if s.n == n)


def test_result_invariants():
    res = solve_sector(EVEN, 0.3, 30, 10, 8)
    assert np.all(res.eigenvalues > 0) and np.all(res.energies < 0)
    assert np.all(np.diff(res.eigenvalues) >= 0)
    gram = res.coefficients.T @ res.coefficients
    assert np.allclose(gram, np.eye(res.k), atol=1e-10)
    assert not res.eigenvalues.flags.writeable
    assert len(res.labels) == res.k


def test_table_values_at_08():
    gamma = 0.8**3
    even = solve_converged(EVEN, gamma, 1e-4, 1)
    assert even.converged
    assert even.energies[0] == pytest.approx(-1.2327, abs=5e-4)
    pm = solve_converged(PM, gamma, 1e-4, 1)
    assert pm.energies[0] == pytest.approx(-0.2823, abs=5e-4)
    assert pm.labels[0] == "2Ppm"


def test_level_order_below_seam():
    res = solve_sector(EVEN, 0.9, 30, 10, 4)
    assert res.labels == ("1S", "2S", "3D0", "3S")


def test_converged_isotropic_uses_first_truncation():
    res = solve_converged(EVEN, 1.0, 1e-12, 4)
    assert res.converged and res.truncation == SCHEDULE[0]


def test_flatter_needs_larger_basis():
    coarse = solve_converged(EVEN, 0.6**3, 1e-4, 1)
    fine = solve_converged(EVEN, 0.3**3, 1e-4, 1)
    assert fine.truncation[0] > coarse.truncation[0]


@pytest.mark.xfail(strict=True, reason="needs n_max=44, l_max=14 at rel_tol=1e-4; (15, 6) is 1.6e-3 off")
def test_moderate_anisotropy_converges_in_small_basis():
    res = solve_converged(EVEN, 0.6**3, 1e-4, 1)
    assert res.truncation[0] <= 15 and res.truncation[1] <= 6


def test_non_convergence_is_flagged():
    res = solve_converged(EVEN, 0.2**3, 1e-9, 2, schedule=SCHEDULE[:3])
    assert not res.converged


def test_reduce_elongated():
    eps, scale = reduce_elongated(8.0)
    assert eps == -7 / 8 and scale == 1 / 8
    eps, scale = reduce_elongated(1 + 1e-12)
    assert abs(eps) < 1e-11 and scale == pytest.approx(1.0)
    with pytest.raises(ValueError):
        reduce_elongated(1.0)


def test_dual_path_equivalence():
    n_max, l_max = 60, 16
    res = solve_sector(EVEN, 1.2, n_max, l_max, 4)
    assert res.formulation == "xy-plane"
    basis = sector_states(EVEN, n_max, l_max)
    direct = linalg.eigvalsh(assemble(basis, 0.2, "z-axis").entries, subset_by_index=[0, 3])
    assert np.allclose(res.eigenvalues, direct, rtol=1e-6, atol=0)


def test_seam_continuity():
    below = solve_sector(EVEN, 1 - 1e-4, 40, 12, 6)
    above = solve_sector(EVEN, 1 + 1e-4, 40, 12, 6)
    # degenerate shells split in opposite order on the two sides
    assert set(below.labels) == set(above.labels)
    assert below.labels[2:4] == ("3D0", "3S") and above.labels[2:4] == ("3S", "3D0")
    for label in below.labels:
        lam_b = below.eigenvalues[below.state(label)]
        lam_a = above.eigenvalues[above.state(label)]
        assert lam_a == pytest.approx(lam_b, rel=1e-3)
        # oscillator strengths carry the gamma^-3 density rescaling above the seam
        f_b = below.oscillator_strengths[below.state(label)]
        f_a = above.oscillator_strengths[above.state(label)]
        assert f_a == pytest.approx(f_b, rel=1e-3)


def test_invalid_inputs():
    for gamma in (0.0, -1.0, float("inf")):
        with pytest.raises(ValueError):
            solve_sector(EVEN, gamma, 5)
    with pytest.raises(ValueError):
        solve_sector(EVEN, 0.5, 5, k_states=0)
    with pytest.raises(ValueError):
        solve_converged(EVEN, 0.5, rel_tol=0.0)
    with pytest.raises(NumericError):
        solve_converged(Sector(9, "odd"), 0.5, schedule=((6, 3),))


def test_state_names():
    assert state_name(1, 0, 0) == "1S"
    assert state_name(3, 2, 0) == "3D0"
    assert state_name(2, 1, 1) == "2Ppm"
    assert state_name(3, 2, 2) == "3Dpm2"


def test_track_single_isotropic_point():
    result = track_levels([solve_sector(EVEN, 1.0, 6, 4, 4)])
    assert list(result.trajectories) == ["1S", "2S", "3S", "3D0"]
    with pytest.raises(ValueError):
        track_levels([])


def test_track_rejects_unordered_grid():
    pts = [solve_sector(EVEN, g, 10, 4, 3) for g in (0.8, 0.6)]
    with pytest.raises(ValueError):
        track_levels(pts)


def test_sweep_across_seam():
    grid = np.linspace(0.9, 1.1, 21)
    result = sweep(EVEN, grid, 6, n_max=40, l_max=12)
    assert result.order_preserved and not result.refinement_needed
    lam = np.array([p.eigenvalues for p in result.points])
    assert np.max(np.abs(np.diff(lam, axis=0))) < 0.05
    assert all(len(t) == grid.size for t in result.trajectories.values())


def test_sweep_deterministic_under_threads():
    grid = np.linspace(0.5, 1.5, 9) ** 3
    serial = sweep(EVEN, grid, 5, n_max=30, l_max=10)
    threaded = sweep(EVEN, grid, 5, n_max=30, l_max=10, workers=4)
    for a, b in zip(serial.points, threaded.points):
        assert np.array_equal(a.eigenvalues, b.eigenvalues)
        assert a.labels == b.labels


def test_sweep_duplicate_points_identical():
    result = sweep(EVEN, [1.0, 1.0], 4, n_max=8, l_max=4)
    a, b = result.points
    assert np.array_equal(a.eigenvalues, b.eigenvalues)
    assert np.array_equal(a.oscillator_strengths, b.oscillator_strengths)


def test_sweep_auto_truncation():
    result = sweep(PM, [0.7, 0.9], 2)
    assert all(p.converged for p in result.points)
    assert result.points[0].truncation == result.points[1].truncation
