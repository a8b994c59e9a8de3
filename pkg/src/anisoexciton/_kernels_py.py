"""Pure-Python matrix-element kernels.

Mirror of ``_kernels.pyx``; used when the compiled extension is missing or
``ANISOEXCITON_PURE_PYTHON`` is set.  No argument validation happens here.
"""

from math import exp, lgamma, sqrt

import numpy as np


def q_lm(l, m):
    return 0.5 + (1.0 - 4.0 * m * m) / (2.0 * (2 * l - 1) * (2 * l + 3))


def hyper(n, n2, l):
    if n2 == n:
        return float(n)
    if n2 == n + 1:
        return 0.5 * sqrt((n - l) * (n + l + 1))
    if n2 == n - 1:
        return 0.5 * sqrt((n - l - 1) * (n + l))
    return 0.0


def same_l(n, n2, l, m):
    t = hyper(n, n2, l)
    return q_lm(l, m) * t if t else 0.0


def lower_l(n, n2, l, m):
    """Coupling of (n, l, m) to (n2, l - 2, m)."""
    if n2 >= n + 2:
        return 0.0
    angular = (l * l - m * m) * ((l - 1) * (l - 1) - m * m)
    if angular <= 0:
        return 0.0
    if n2 <= n - 2:
        branch = -1.0
    else:
        scale = (n - l) / (2.0 * n * (2 * l - 1))
        if n2 == n - 1:
            branch = scale * (n * n - 4 * n * l - l * l + n + 3 * l - 2) / (2.0 * (n - 1))
        elif n2 == n:
            branch = scale * (n - l + 1)
        else:
            branch = scale * (n - l + 1) * (n - l + 2) / (2.0 * (n + 1))
    log_ratio = 0.5 * (lgamma(n - l) + lgamma(n2 + l - 1) - lgamma(n + l + 1) - lgamma(n2 - l + 2))
    prefactor = sqrt(angular / ((2 * l + 1) * (2 * l - 3)))
    return prefactor * 2.0 * n * n2 * exp(log_ratio) * branch


def fill_perturbation(ns, ls, m):
    """Return ``(V, T)`` over one sector basis.

    ``V`` is the cos^2(theta)(1 + cos(alpha)) operator, ``T`` the
    hyperangle-only (1 + cos(alpha)) operator, both scaled by sqrt(n n').
    """
    ns = [int(x) for x in ns]
    ls = [int(x) for x in ls]
    size = len(ns)
    v = np.zeros((size, size))
    t = np.zeros((size, size))
    for i in range(size):
        n, l = ns[i], ls[i]
        q = q_lm(l, m)
        for j in range(i, size):
            n2, l2 = ns[j], ls[j]
            if l2 == l:
                if n2 - n > 1:
                    continue
                h = hyper(n, n2, l)
                t[i, j] = t[j, i] = h
                v[i, j] = v[j, i] = q * h
            elif l2 == l + 2:
                # (n2, l + 2) couples down to (n, l)
                x = lower_l(n2, n, l2, m)
                v[i, j] = v[j, i] = x
            elif l2 > l + 2:
                break
    return v, t
