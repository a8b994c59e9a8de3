"""Time matrix assembly with the compiled kernel and the pure-Python fallback.

    python benchmarks/bench_kernels.py [--repeat 3] [--json out.json]
"""

import argparse
import json
import time

import numpy as np

from anisoexciton import _kernels_py, kernels
from anisoexciton.basis import Sector, sector_states

CASES = [(Sector(0, "even"), 20, 8), (Sector(0, "even"), 44, 14),
         (Sector(0, "even"), 76, 22), (Sector(1, "odd"), 100, 28)]


def best_time(fn, repeat):
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t0)
    return min(times)


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--repeat", type=int, default=3)
    parser.add_argument("--json")
    args = parser.parse_args()
    if kernels.compiled is None:
        print("compiled extension unavailable; timing the fallback only")
    rows = []
    print(f"{'sector':<14}{'n_max':>6}{'l_max':>6}{'size':>7}{'python s':>11}{'compiled s':>12}{'speedup':>9}")
    for sector, n_max, l_max in CASES:
        basis = sector_states(sector, n_max, l_max)
        args_ = (basis.ns, basis.ls, sector.m_abs)
        t_py = best_time(lambda: _kernels_py.fill_perturbation(*args_), args.repeat)
        t_c = None
        if kernels.compiled is not None:
            t_c = best_time(lambda: kernels.compiled.fill_perturbation(*args_), args.repeat)
            v_c, _ = kernels.compiled.fill_perturbation(*args_)
            v_p, _ = _kernels_py.fill_perturbation(*args_)
            assert np.allclose(v_c, v_p, atol=1e-13)
        speedup = t_py / t_c if t_c else float("nan")
        rows.append({"sector": f"m={sector.m_abs} {sector.parity}", "n_max": n_max, "l_max": l_max,
                     "size": len(basis), "python_s": t_py, "compiled_s": t_c, "speedup": speedup})
        print(f"{rows[-1]['sector']:<14}{n_max:>6}{l_max:>6}{len(basis):>7}{t_py:>11.4f}"
              f"{(t_c if t_c is not None else float('nan')):>12.5f}{speedup:>9.1f}")
    if args.json:
        with open(args.json, "w") as fh:
            json.dump(rows, fh, indent=2)


if __name__ == "__main__":
    main()
