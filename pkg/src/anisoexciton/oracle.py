"""Quadrature ground truth for the hyperspherical matrix elements.

A basis function factorizes as

    Psi_nlm = D_nl sin^l(alpha) C_{n-l-1}^{l+1}(cos alpha) Y_lm(theta, phi)

with ``D_nl = (-2i)^l l! sqrt(2n (n-l-1)! / (pi (n+l)!))``.  With
``x = cos(alpha)`` the measure ``sin^2(alpha) d(alpha)`` becomes
``(1 - x^2)^{1/2} dx``, so every hyperangle integral here is a polynomial
against a Jacobi weight and the Gauss-Jacobi rules below are exact up to
rounding.  The complex phases of ``D_nl`` are multiplied out explicitly:
``conj(D_nl) D_{n'l'}`` is real for ``l - l'`` even.
"""

from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass, field
from functools import lru_cache
from typing import Callable

import numpy as np

from . import kernels
from .basis import QuantumNumbers, Sector, sector_states
from .elements import t_hyper, v_lower_l, v_same_l
from .special import (
    assoc_legendre,
    gauss_jacobi,
    gauss_legendre,
    gegenbauer,
    legendre_norm,
)

DEFAULT_ORDER = 32


def _d_abs(n: int, l: int) -> float:
    log_val = (l * math.log(2.0) + math.lgamma(l + 1)
               + 0.5 * (math.log(2.0 * n) + math.lgamma(n - l) - math.log(math.pi) - math.lgamma(n + l + 1)))
    return math.exp(log_val)


def _phase(l: int, l2: int) -> float:
    """Real part of ``conj((-2i)^l) (-2i)^l2 / 2^(l + l2)``."""
    value = (1j) ** l * (-1j) ** l2
    if abs(value.imag) > 1e-12:
        raise ValueError(f"phase product is not real for l={l}, l2={l2}")
    return value.real


@lru_cache(maxsize=None)
def angular_integral_J(l: int, l2: int, m: int, order: int = DEFAULT_ORDER) -> float:
    """``N_lm N_l'm \\int P_l^m P_l'^m x^2 dx`` by Gauss-Legendre quadrature."""
    m = abs(m)
    if m > min(l, l2):
        raise ValueError(f"|m|={m} exceeds min(l, l2)")
    rule = gauss_legendre(max(order, (l + l2) // 2 + 2))
    x = rule.nodes
    values = assoc_legendre(l, m, x) * assoc_legendre(l2, m, x) * x * x
    return legendre_norm(l, m) * legendre_norm(l2, m) * rule.integrate(values)


@lru_cache(maxsize=None)
def hyper_integral_I(n: int, n2: int, l: int, l2: int, order: int = DEFAULT_ORDER) -> float:
    """Hyperangle integral of ``(1 + cos alpha)`` between ``(n, l)`` and ``(n2, l2)``.

    ``l2`` must be ``l`` or ``l - 2``.
    """
    order = max(order, (n + n2) // 2 + 2)
    if l2 == l:
        rule = gauss_jacobi(order, l + 0.5, l + 0.5)
        x = rule.nodes
        poly = (1.0 + x) * gegenbauer(n - l - 1, l + 1, x) * gegenbauer(n2 - l - 1, l + 1, x)
    elif l2 == l - 2:
        # weight (1 - x^2)^(l - 1/2) (1 + x) = (1 - x)^(l - 1/2) (1 + x)^(l + 1/2)
        rule = gauss_jacobi(order, l - 0.5, l + 0.5)
        x = rule.nodes
        poly = gegenbauer(n - l - 1, l + 1, x) * gegenbauer(n2 - l + 1, l - 1, x)
    else:
        raise ValueError(f"hyper_integral_I supports l2 in {{l, l-2}}, got l={l}, l2={l2}")
    return _phase(l, l2) * _d_abs(n, l) * _d_abs(n2, l2) * rule.integrate(poly)


def hyper_moment(n: int, l: int, power: int, order: int = DEFAULT_ORDER) -> float:
    """``\\int cos^power(alpha) |Psi_nlm|^2 d^4 Omega`` (``power`` in {0, 1})."""
    rule = gauss_jacobi(order, l + 0.5, l + 0.5)
    x = rule.nodes
    poly = x**power * gegenbauer(n - l - 1, l + 1, x) ** 2
    return _d_abs(n, l) ** 2 * rule.integrate(poly)


def v_element_oracle(s: QuantumNumbers, s2: QuantumNumbers, order: int = DEFAULT_ORDER) -> float:
    """``sqrt(n n') J I`` for the ``(1 + cos alpha) cos^2(theta)`` operator."""
    if abs(s.m) != abs(s2.m):
        raise ValueError(f"m mismatch between {s} and {s2}")
    if (s.l - s2.l) % 2:
        return 0.0
    if s2.l > s.l:
        s, s2 = s2, s
    if s.l - s2.l > 2:
        return 0.0
    j = angular_integral_J(s.l, s2.l, abs(s.m), order)
    return math.sqrt(s.n * s2.n) * j * hyper_integral_I(s.n, s2.n, s.l, s2.l, order)


def t_element_oracle(s: QuantumNumbers, s2: QuantumNumbers, order: int = DEFAULT_ORDER) -> float:
    if s.l != s2.l or s.m != s2.m:
        return 0.0
    return math.sqrt(s.n * s2.n) * hyper_integral_I(s.n, s2.n, s.l, s.l, order)


def weighted_norm_quadrature(states, coeffs, order: int = DEFAULT_ORDER) -> float:
    """``\\int (1 - cos alpha) |sum_s C_s sqrt(n) Psi_s|^2 d^4 Omega``.

    Angular orthonormality leaves only same-``l`` pairs.
    """
    total = 0.0
    by_l: dict[int, list[tuple[int, float]]] = {}
    for s, c in zip(states, coeffs):
        by_l.setdefault(s.l, []).append((s.n, float(c)))
    for l, members in by_l.items():
        rule = gauss_jacobi(order, l + 0.5, l + 0.5)
        x = rule.nodes
        psi = np.zeros_like(x)
        for n, c in members:
            psi = psi + c * math.sqrt(n) * _d_abs(n, l) * gegenbauer(n - l - 1, l + 1, x)
        total += rule.integrate((1.0 - x) * psi * psi)
    return total


@dataclass
class VerificationReport:
    n_max: int
    l_max: int
    tol: float
    backend: str
    n_compared: int = 0
    max_dev: float = 0.0
    max_asymmetry: float = 0.0
    max_norm_dev: float = 0.0
    max_cos_moment: float = 0.0
    failures: list[dict] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return not self.failures

    def to_json(self) -> str:
        data = asdict(self)
        data["passed"] = self.passed
        return json.dumps(data, indent=2, sort_keys=True)


def _record(report: VerificationReport, what: str, where, closed: float, truth: float) -> None:
    dev = abs(closed - truth)
    report.n_compared += 1
    report.max_dev = max(report.max_dev, dev)
    if not dev <= report.tol:
        report.failures.append(
            {"check": what, "states": [list(w) for w in where], "closed_form": closed,
             "oracle": truth, "deviation": dev}
        )


def verify_closed_forms(n_max: int = 10, l_max: int = 6, tol: float = 1e-9,
                        order: int = DEFAULT_ORDER,
                        element_hook: Callable[[str, tuple, float], float] | None = None
                        ) -> VerificationReport:
    """Compare every closed-form element and assembled matrix with quadrature.

    ``element_hook(check, states, value)`` may rewrite closed-form values
    before comparison; it exists to test the comparator.
    """
    if not tol > 0:
        raise ValueError("tol must be positive")
    report = VerificationReport(n_max, l_max, tol, kernels.BACKEND)
    hook = element_hook or (lambda check, states, value: value)
    l_top = min(l_max, n_max - 1)

    for m in range(l_top + 1):
        for parity in ("even", "odd"):
            sector = Sector(m, parity)
            if sector.lowest_l > l_top:
                continue
            basis = sector_states(sector, n_max, l_max)
            v, t = kernels.fill_perturbation(basis.ns, basis.ls, m)
            report.max_asymmetry = max(report.max_asymmetry,
                                       float(np.max(np.abs(v - v.T))),
                                       float(np.max(np.abs(t - t.T))))
            for i, s in enumerate(basis.states):
                for j, s2 in enumerate(basis.states):
                    where = (tuple(s), tuple(s2))
                    _record(report, "assembled V", where, hook("assembled V", where, v[i, j]),
                            v_element_oracle(s, s2, order))
                    _record(report, "assembled T", where, hook("assembled T", where, t[i, j]),
                            t_element_oracle(s, s2, order))

    for l in range(l_top + 1):
        for n in range(l + 1, n_max + 1):
            for n2 in range(l + 1, n_max + 1):
                where = ((n, l, 0), (n2, l, 0))
                _record(report, "t_hyper", where, hook("t_hyper", where, t_hyper(n, n2, l)),
                        math.sqrt(n * n2) * hyper_integral_I(n, n2, l, l, order))
                for m in range(l + 1):
                    where = ((n, l, m), (n2, l, m))
                    _record(report, "v_same_l", where, hook("v_same_l", where, v_same_l(n, n2, l, m)),
                            v_element_oracle(QuantumNumbers(n, l, m), QuantumNumbers(n2, l, m), order))
            if l >= 2:
                for n2 in range(l - 1, n_max + 1):
                    for m in range(l - 1):
                        where = ((n, l, m), (n2, l - 2, m))
                        _record(report, "v_lower_l", where,
                                hook("v_lower_l", where, v_lower_l(n, n2, l, m)),
                                v_element_oracle(QuantumNumbers(n, l, m), QuantumNumbers(n2, l - 2, m), order))
            norm = hyper_moment(n, l, 0, order) - hyper_moment(n, l, 1, order)
            report.max_norm_dev = max(report.max_norm_dev, abs(norm - 1.0))
            report.max_cos_moment = max(report.max_cos_moment, abs(hyper_moment(n, l, 1, order)))

    if report.max_asymmetry > 1e-10:
        report.failures.append({"check": "symmetry", "deviation": report.max_asymmetry})
    if report.max_norm_dev > 1e-10:
        report.failures.append({"check": "weighted normalization", "deviation": report.max_norm_dev})
    if report.max_cos_moment > 1e-10:
        report.failures.append({"check": "cos(alpha) moment", "deviation": report.max_cos_moment})
    return report
