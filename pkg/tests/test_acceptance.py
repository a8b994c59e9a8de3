"""One test per acceptance criterion; each reports a PASS/FAIL line."""

import time

import numpy as np

from anisoexciton.basis import Sector, sector_states
from anisoexciton.cli import second_order_scaling, table1_rows
from anisoexciton.elements import assemble
from anisoexciton.observables import anisotropy_measure, ground_state_pade
from anisoexciton.oracle import verify_closed_forms
from anisoexciton.solver import solve_converged, solve_sector, sweep

EVEN, ODD, PM = Sector(0, "even"), Sector(0, "odd"), Sector(1, "odd")


def _table_detail(rows):
    return ", ".join(f"{r['label']} {r['computed']:.5f}/{r['reference']}"
                     + ("" if r["passed"] else " MISS") for r in rows)


def test_c01_table_strong_anisotropy_08(criterion):
    t0 = time.perf_counter()
    rows = table1_rows(gamma_cbrts=(0.8,))
    elapsed = time.perf_counter() - t0
    worst = max(r["deviation"] for r in rows)
    ok = all(r["passed"] for r in rows) and elapsed < 10
    criterion.report(ok, f"max |dev| {worst:.2e} <= 5e-4, {elapsed:.1f}s; {_table_detail(rows)}")
    assert ok


def test_c02_table_strong_anisotropy_04(criterion):
    t0 = time.perf_counter()
    rows = table1_rows(gamma_cbrts=(0.4,))
    elapsed = time.perf_counter() - t0
    worst = max(r["deviation"] for r in rows)
    ok = all(r["passed"] for r in rows) and elapsed < 30
    criterion.report(ok, f"max rel dev {worst:.2e} vs 1e-3, {elapsed:.1f}s; {_table_detail(rows)}")
    assert ok


def test_c03_isotropic_limit(criterion):
    worst = 0.0
    counts_ok = True
    for sector in (EVEN, ODD, PM, Sector(1, "even"), Sector(2, "even")):
        basis = sector_states(sector, 10, 9)
        res = solve_sector(sector, 1.0, 10, 9, len(basis))
        worst = max(worst, float(np.max(np.abs(res.eigenvalues - np.rint(res.eigenvalues)))))
        # the solver reports the exact integers; check the matrix itself too
        direct = np.linalg.eigvalsh(assemble(basis, 0.0).entries)
        worst = max(worst, float(np.max(np.abs(direct - np.sort(basis.ns)))))
        values, counts = np.unique(np.rint(res.eigenvalues), return_counts=True)
        expected = [sum(1 for s in basis.states if s.n == v) for v in values]
        counts_ok &= list(counts) == expected
    e = solve_sector(EVEN, 1.0, 6, 4, 2).energies
    measure = anisotropy_measure(e[0], e[1])
    ok = worst <= 1e-10 and counts_ok and abs(measure - 0.75) <= 1e-8
    criterion.report(ok, f"max |lambda - n| {worst:.1e}, multiplicities {'ok' if counts_ok else 'wrong'}, "
                         f"(E1S-E2S)/E1S = {measure:.10f}")
    assert ok


def test_c04_oracle_equivalence(criterion):
    t0 = time.perf_counter()
    report = verify_closed_forms(10, 6, 1e-9)
    elapsed = time.perf_counter() - t0
    ok = report.passed and report.max_dev <= 1e-9 and report.max_asymmetry <= 1e-10 and elapsed < 60
    criterion.report(ok, f"{report.n_compared} elements, max dev {report.max_dev:.1e}, "
                         f"asymmetry {report.max_asymmetry:.1e}, {elapsed:.1f}s")
    assert ok


def test_c05_second_order_scaling(criterion):
    scaling = second_order_scaling()
    ratios = {name: entry["ratios"] for name, entry in scaling.items()}
    ok = all(6 <= r <= 10 for rs in ratios.values() for r in rs)
    criterion.report(ok, ", ".join(f"{k} {a:.2f}/{b:.2f}" for k, (a, b) in ratios.items()))
    assert ok


def test_c06_oscillator_sum_rule(criterion):
    parts = []
    ok = True
    for gamma in (1 - 1e-6, 1 + 1e-6):
        res = solve_sector(EVEN, gamma, 40, 12, 6)
        f = dict(zip(res.labels, res.oscillator_strengths))
        f2, f3 = f["2S"], f["3S"] + f["3D0"]
        ok &= abs(f2 - 1 / 8) <= 1e-4 and abs(f3 - 1 / 27) <= 1e-4
        parts.append(f"gamma={gamma}: f2S={f2:.6f}, f3S+f3D0={f3:.6f}")
    criterion.report(ok, "; ".join(parts) + f" (1/27={1 / 27:.6f})")
    assert ok


def test_c07_pade_cross_check(criterion):
    parts = []
    ok = True
    for gc in (0.4, 0.6, 0.8, 1.0):
        e0 = solve_converged(EVEN, gc**3, 1e-4, 1).energies[0]
        dev = abs(ground_state_pade(gc**3) - e0) / abs(e0)
        ok &= dev <= 0.02
        parts.append(f"{gc}: {100 * dev:.2f}%")
    criterion.report(ok, ", ".join(parts))
    assert ok


def test_c08_formulation_seam(criterion):
    below = solve_sector(EVEN, 1 - 1e-4, 60, 16, 8)
    above = solve_sector(EVEN, 1 + 1e-4, 60, 16, 8)
    seam = max(abs(above.eigenvalues[above.state(lab)] / below.eigenvalues[below.state(lab)] - 1)
               for lab in below.labels if lab in above.labels)
    elong = solve_sector(EVEN, 1.2, 60, 16, 6)
    basis = sector_states(EVEN, 60, 16)
    direct = np.sort(np.linalg.eigvalsh(assemble(basis, 0.2, "z-axis").entries))[:6]
    dual = float(np.max(np.abs(elong.eigenvalues / direct - 1)))
    ok = seam <= 1e-3 and dual <= 1e-6
    criterion.report(ok, f"seam max rel {seam:.1e} <= 1e-3, dual path at 1.2 max rel {dual:.1e} <= 1e-6")
    assert ok


def test_c09_no_crossing_and_oscillator_swap(criterion):
    cbrt = np.linspace(0.4, 1.0, 61)
    result = sweep(EVEN, cbrt**3, 8, n_max=76, l_max=22)
    order_ok = result.order_preserved and all(
        np.all(np.diff(p.eigenvalues) >= 0) for p in result.points)
    f = {k: np.array([v for _, _, v in result.trajectories[k]]) for k in ("3S", "4D0", "3D0")}

    def swaps(a, b):
        sign = np.sign(f[a] - f[b])
        return [0.5 * (cbrt[i] + cbrt[i + 1]) for i in range(len(cbrt) - 1) if sign[i] != sign[i + 1]]

    # the swap reached first when flattening from the isotropic end; further
    # swaps deeper in (near 0.47) belong to the next anticrossing
    s_4d = swaps("3S", "4D0")
    s_3d = swaps("3S", "3D0")
    first = max(s_4d) if s_4d else float("nan")
    ok = order_ok and 0.7 <= first <= 0.9
    criterion.report(ok, f"61 points, order preserved={order_ok}, min overlap {result.min_overlap:.3f}, "
                         f"3S/4D0 f swap at gamma^(1/3) ~ {first:.3f} (window 0.7-0.9; all: "
                         f"{[round(float(x), 3) for x in s_4d]}), 3D0 overtakes 3S at "
                         f"{[round(float(x), 3) for x in s_3d]}")
    assert ok


def test_c10_two_dimensional_trend(criterion):
    grid = [1.0, 0.9, 0.8, 0.7, 0.6, 0.5, 0.4, 0.3]
    parts = []
    ok = True
    for sector, limit in ((EVEN, 0.5), (PM, 1.5)):
        lam = []
        for gc in grid:
            res = solve_converged(sector, gc**3, 1e-4, 1)
            if res.converged:
                lam.append(float(res.eigenvalues[0]))
        trend = len(lam) >= 5 and all(np.diff(lam) < 0) and all(v > limit for v in lam)
        ok &= trend
        parts.append(f"m={sector.m_abs}: {lam[0]:.4f} -> {lam[-1]:.4f} over {len(lam)} points (limit {limit})")
    criterion.report(ok, "; ".join(parts))
    assert ok
