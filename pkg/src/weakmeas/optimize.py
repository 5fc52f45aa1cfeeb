"""Optimal pre-selection: expectation-value ridges, SNR ridges and the DSJH global maximum.

Each optimum has a closed form.  :func:`argmax_scan` is an independent
numerical check that the closed forms really are maxima of the objectives
they claim to maximize.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np
from scipy.optimize import brentq, minimize_scalar

from weakmeas import setups, weak_core
from weakmeas.errors import DomainError

__all__ = [
    "OptimalPoint",
    "aav_optimal_expectation",
    "aav_optimal_snr",
    "dsjh_optimal_expectation",
    "dsjh_global_max",
    "dsjh_optimal_snr",
    "argmax_scan",
]

_ROOT_XTOL = 1e-15
_GOLDEN_TOL = 1e-10
_POLISH_POINTS = 41


@dataclass(frozen=True)
class OptimalPoint:
    """A point on an optimal line.

    ``companion_stats`` carries on-line quantities (fluctuation, mean, SNR)
    and the residual of the defining equation.
    """

    s: float
    angle: float
    objective_value: float
    companion_stats: dict = field(default_factory=dict)


def _quadratic_root(r: float, one_minus_r2: float):
    """Admissible root of ``cos^2 + (2/r) cos + 1 = 0`` as ``(cos, sin)``.

    The roots multiply to 1, so exactly one satisfies ``|cos| <= 1``:
    ``cos = -r / (1 + w)`` with ``w = sqrt(1 - r^2)``, and then
    ``sin^2 = 2w / (1 + w)`` exactly.  The caller supplies ``1 - r^2`` in a
    cancellation-free form.
    """
    if not (abs(r) <= 1.0 and one_minus_r2 >= 0.0):
        raise RuntimeError(f"optimal-SNR quadratic has no admissible root (r = {r!r})")
    w = math.sqrt(one_minus_r2)
    cos = -r / (1.0 + w)
    sin = math.sqrt(2.0 * w / (1.0 + w))
    return cos, sin


def aav_optimal_expectation(s: float) -> OptimalPoint:
    """``cos(alpha) = -e^-s``: the largest ``<p_z>'/g`` at fixed ``s``.

    On the line ``<p_z>'/g = 1/sqrt(1 - e^-2s)`` and ``dp_z/g = 1/sqrt(2s)``.

    Examples
    --------
    >>> pt = aav_optimal_expectation(1.0)
    >>> round(pt.angle, 4), round(pt.objective_value, 4)
    (1.9475, 1.0754)
    """
    s = weak_core._check_s(s)
    es = math.exp(-s)
    angle = math.atan2(math.sqrt(-math.expm1(-2.0 * s)), -es)
    objective = 1.0 / math.sqrt(-math.expm1(-2.0 * s))
    delta = 1.0 / math.sqrt(2.0 * s)
    return OptimalPoint(
        s=s,
        angle=angle,
        objective_value=objective,
        companion_stats={
            "delta_pz": delta,
            "snr": objective / delta,
            "root_residual": abs(math.cos(angle) + es),
        },
    )


def aav_optimal_snr(s: float) -> OptimalPoint:
    """Root of ``cos^2 + 2B cos + 1 = 0`` with ``B = (cosh s + s e^s)/(1 + s)``.

    ``1/B = e^-s (1+s) / (1/2 + s + e^-2s/2)`` keeps every term bounded; the
    objective tends to ``sqrt(2/sqrt 3)`` as ``s -> 0``.
    """
    s = weak_core._check_s(s)
    em1 = -math.expm1(-s)
    den = 0.5 + s + 0.5 * math.exp(-2.0 * s)
    inv_b = math.exp(-s) * (1.0 + s) / den
    # 1 - inv_b = (1 - e^-s)((1 - e^-s)/2 + s) / den
    one_minus = em1 * (0.5 * em1 + s) / den
    cos, sin = _quadratic_root(inv_b, one_minus * (1.0 + inv_b))
    angle = math.atan2(sin, cos)
    st = setups._aav_forms(s, angle)
    return OptimalPoint(
        s=s,
        angle=angle,
        objective_value=float(st[4]),
        companion_stats={
            "mean_pz": float(st[1]),
            "delta_pz": math.sqrt(st[2]),
            "quadratic_residual": abs(inv_b * cos * cos + 2.0 * cos + inv_b),
            "discarded_root": 1.0 / cos,
        },
    )


def dsjh_optimal_expectation(s: float) -> OptimalPoint:
    """``cos(phi) = e^-s``: the largest ``-k<x>'`` at fixed ``s``.

    On the line ``-k<x>' = s e^-s / sqrt(1 - e^-2s)`` and ``k dx = sqrt(s/2)``.
    """
    s = weak_core._check_s(s)
    es = math.exp(-s)
    root = math.sqrt(-math.expm1(-2.0 * s))
    angle = math.atan2(root, es)
    objective = s * es / root
    delta = math.sqrt(s / 2.0)
    return OptimalPoint(
        s=s,
        angle=angle,
        objective_value=objective,
        companion_stats={
            "delta_kx": delta,
            "mean_kx": -objective,
            "snr": objective / delta,
            "root_residual": abs(math.cos(angle) - es),
        },
    )


def _ridge_derivative(s: float) -> float:
    # d/ds of s e^-s / sqrt(1 - e^-2s) vanishes where 1 - s - e^-2s = 0
    return 1.0 - s - math.exp(-2.0 * s)


def dsjh_global_max():
    """``(s_m, phi_m, value)`` of the global maximum of ``-k<x>'``.

    ``1 - s - e^-2s`` is positive at ``s = 0.1`` and negative at ``s = 2``,
    so the bracket is guaranteed.
    """
    s_m = brentq(_ridge_derivative, 0.1, 2.0, xtol=_ROOT_XTOL, rtol=4 * np.finfo(float).eps)
    pt = dsjh_optimal_expectation(s_m)
    return s_m, pt.angle, pt.objective_value


def dsjh_optimal_snr(s: float) -> OptimalPoint:
    """Root of ``cos^2 + 2 ((cosh s - s e^-s)/(s - 1)) cos + 1 = 0``.

    The coefficient's pole at ``s = 1`` is removable: with
    ``r = (s - 1)/(cosh s - s e^-s)`` the admissible root is
    ``-r / (1 + sqrt(1 - r^2))``, which is smooth through ``r = 0``
    (``phi = pi/2`` at ``s = 1``).  For ``s > 1`` the root has ``cos < 0``.
    """
    s = weak_core._check_s(s)
    em1 = -math.expm1(-s)
    es = math.exp(-s)
    den = 1.0 + es * es - 2.0 * s * es * es
    r = 2.0 * (s - 1.0) * es / den
    # 1 + r = (1 - e^-s)(1 - e^-s + 2 s e^-s) / den, exact rearrangement
    one_plus = em1 * (em1 + 2.0 * s * es) / den
    cos, sin = _quadratic_root(r, one_plus * (1.0 - r))
    angle = math.atan2(sin, cos)
    st = setups._dsjh_forms(s, angle)
    return OptimalPoint(
        s=s,
        angle=angle,
        objective_value=float(st[4]),
        companion_stats={
            "mean_kx": float(st[1]),
            "delta_kx": math.sqrt(st[2]),
            "quadratic_residual": abs(r * cos * cos + 2.0 * cos + r),
            "discarded_root": 1.0 / cos if cos else math.inf,
        },
    )


def _polish(objective: Callable[[float], float], center: float, lo: float, hi: float, spacing: float) -> float:
    """Refine a maximum below golden-section resolution with a local quartic fit.

    Golden section compares function values, which stop changing once the
    step is ~sqrt(eps) relative; the stationary point of a least-squares
    quartic over a small window is far more precise.
    """
    h = min(1e-3, spacing, center - lo, hi - center)
    if h < 1e-6:
        return center
    xs = np.linspace(-h, h, _POLISH_POINTS)
    ys = np.array([objective(center + x) for x in xs])
    coeffs = np.polynomial.polynomial.polyfit(xs / h, ys, 4)
    roots = np.polynomial.polynomial.polyroots(np.polynomial.polynomial.polyder(coeffs))
    real = [r.real * h for r in np.atleast_1d(roots) if abs(r.imag) < 1e-9 and abs(r.real) <= 1.0]
    if not real:
        return center
    return center + min(real, key=abs)


def argmax_scan(objective: Callable[[float], float], lo: float, hi: float, n: int = 2001):
    """Dense-grid argmax on ``[lo, hi]``, refined by golden section to 1e-10.

    Returns ``(angle, value)``.

    Examples
    --------
    >>> x, v = argmax_scan(lambda x: -(x - 1.0) ** 2, 0.0, 2.0, 101)
    >>> round(float(x), 9), abs(v)
    (1.0, 0.0)
    """
    n = int(n)
    if n < 3:
        raise DomainError("argmax_scan needs at least 3 grid points")
    lo, hi = float(lo), float(hi)
    if not (math.isfinite(lo) and math.isfinite(hi) and lo < hi):
        raise DomainError("argmax_scan needs a finite interval lo < hi")

    def value(x: float) -> float:
        y = float(objective(x))
        if not math.isfinite(y):
            raise DomainError(f"objective is not finite at {x!r}")
        return y

    grid = np.linspace(lo, hi, n)
    ys = np.array([value(x) for x in grid])
    i = int(np.argmax(ys))
    spacing = grid[1] - grid[0]
    if i in (0, n - 1):
        return float(grid[i]), float(ys[i])
    res = minimize_scalar(
        lambda x: -value(x),
        bracket=(grid[i - 1], grid[i], grid[i + 1]),
        method="golden",
        tol=_GOLDEN_TOL,
    )
    best = float(res.x)
    polished = _polish(value, best, grid[i - 1], grid[i + 1], spacing)
    return polished, value(polished)
