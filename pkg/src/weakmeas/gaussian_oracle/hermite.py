"""Probabilists' Hermite polynomials and the identities used to derive the q-density."""
from __future__ import annotations

import math
from typing import Iterable

import mpmath
import numpy as np

from weakmeas.errors import DomainError

__all__ = ["HERMITE_MAX_ORDER", "hermite", "hermite_identity_residuals"]

HERMITE_MAX_ORDER = 64
_K_MAX = 12
_GENERATING_TS = (0.5, 1.0, 2.0)
_GENERATING_TOL = 1e-14
_WORKING_DPS = 50


def _recurrence(n: int, x):
    # He_0 = 1, He_1 = x, He_{n+1} = x He_n - n He_{n-1}; generic over float, ndarray, mpf
    prev, cur = x * 0 + 1, x
    if n == 0:
        return prev
    for k in range(1, n):
        prev, cur = cur, x * cur - k * prev
    return cur


def hermite(n: int, x):
    """``He_n(x) = (-1)^n e^{x^2/2} d^n/dx^n e^{-x^2/2}`` via the three-term recurrence.

    Accepts a float, an array or an ``mpmath.mpf``; orders above 64 are refused.

    Examples
    --------
    >>> hermite(2, 1.5)
    1.25
    """
    n = int(n)
    if n < 0:
        raise DomainError("Hermite order must be non-negative")
    if n > HERMITE_MAX_ORDER:
        raise DomainError(f"Hermite order {n} exceeds the recurrence ceiling {HERMITE_MAX_ORDER}")
    if isinstance(x, mpmath.mpf):
        return _recurrence(n, x)
    if np.ndim(x):
        return _recurrence(n, np.asarray(x, dtype=float))
    return float(_recurrence(n, float(x)))


def _generating_sum(x, t, parity: int):
    """``e^{t^2/2} sum_n He_{2n+parity}(x) t^(2n+parity)/(2n+parity)!`` until the tail is negligible."""
    total = mpmath.mpf(0)
    quiet = 0
    order = parity
    while quiet < 3:
        term = _recurrence(order, x) * t**order / mpmath.factorial(order)
        total += term
        scale = max(abs(total), mpmath.mpf(1))
        quiet = quiet + 1 if abs(term) < _GENERATING_TOL * scale and order > abs(t * x) + t * t else 0
        order += 2
    return mpmath.exp(t * t / 2) * total


def hermite_identity_residuals(k_max: int = _K_MAX, xs: Iterable[float] = (-3, -1, -0.25, 0, 0.25, 1, 3)) -> dict:
    """Largest ``|LHS - RHS|`` of each Hermite identity over ``k <= k_max`` and ``x`` in ``xs``.

    Both sides are evaluated with 50-digit arithmetic; individual terms reach
    ``1e18`` for ``k = 12, x = 3`` so double precision could not resolve an
    absolute residual of ``1e-9``.  Keys: ``parity_even``, ``parity_odd``,
    ``zero_point``, ``sum_rule``, ``even_even``, ``odd_odd``, ``even_odd``,
    ``odd_even``, ``cosh``, ``sinh``.
    """
    k_max = int(k_max)
    if not 0 <= k_max <= _K_MAX:
        raise DomainError(f"k_max must lie in [0, {_K_MAX}]")
    xs = [float(x) for x in xs]
    if not all(math.isfinite(x) for x in xs):
        raise DomainError("xs must be finite")

    worst = dict.fromkeys(
        ("parity_even", "parity_odd", "zero_point", "sum_rule", "even_even", "odd_odd", "even_odd", "odd_even", "cosh", "sinh"),
        0.0,
    )

    def record(key, lhs, rhs):
        worst[key] = max(worst[key], float(abs(lhs - rhs)))

    with mpmath.workdps(_WORKING_DPS):
        root2 = mpmath.sqrt(2)
        he = _recurrence
        for k in range(k_max + 1):
            dfact = mpmath.mpf(math.prod(range(2 * k - 1, 0, -2)))
            record("zero_point", he(2 * k, mpmath.mpf(0)), (-1) ** k * dfact)
            record("zero_point", he(2 * k + 1, mpmath.mpf(0)), 0)
        for x_float in xs:
            x = mpmath.mpf(x_float)
            a, two_x = root2 * x, 2 * x
            for k in range(k_max + 1):
                record("parity_even", he(2 * k, -x), he(2 * k, x))
                record("parity_odd", he(2 * k + 1, -x), -he(2 * k + 1, x))
                dfact = math.prod(range(2 * k - 1, 0, -2))
                if k >= 1:
                    lhs = sum(math.comb(2 * k, 2 * r) * he(2 * k - 2 * r, a) * he(2 * r, a) for r in range(k + 1))
                    record("even_even", lhs, mpmath.mpf(2) ** (k - 1) * (he(2 * k, two_x) + (-1) ** k * dfact))
                    lhs = sum(
                        math.comb(2 * k, 2 * r + 1) * he(2 * k - 2 * r - 1, a) * he(2 * r + 1, a) for r in range(k)
                    )
                    record("odd_odd", lhs, mpmath.mpf(2) ** (k - 1) * (he(2 * k, two_x) - (-1) ** k * dfact))
                rhs = mpmath.mpf(2) ** (k - mpmath.mpf(1) / 2) * he(2 * k + 1, two_x)
                lhs = sum(math.comb(2 * k + 1, 2 * r) * he(2 * k + 1 - 2 * r, a) * he(2 * r, a) for r in range(k + 1))
                record("odd_even", lhs, rhs)
                lhs = sum(math.comb(2 * k + 1, 2 * r + 1) * he(2 * k - 2 * r, a) * he(2 * r + 1, a) for r in range(k + 1))
                record("even_odd", lhs, rhs)
            for y_float in xs:
                y = mpmath.mpf(y_float)
                for n in range(2 * k_max + 2):
                    rhs = sum(math.comb(n, r) * he(n - r, root2 * x) * he(r, root2 * y) for r in range(n + 1))
                    record("sum_rule", he(n, x + y), rhs / mpmath.mpf(2) ** (mpmath.mpf(n) / 2))
            for t_float in _GENERATING_TS:
                t = mpmath.mpf(t_float)
                record("cosh", _generating_sum(x, t, 0), mpmath.cosh(t * x))
                record("sinh", _generating_sum(x, t, 1), mpmath.sinh(t * x))
    return worst
