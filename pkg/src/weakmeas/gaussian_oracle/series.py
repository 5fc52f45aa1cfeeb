"""Truncated operator series with Gaussian moments inserted.

Every series here is an alternating power series in ``s`` whose exact
coefficients are rationals; they are formed with :class:`fractions.Fraction`
so nothing overflows before the float conversion.  All moments are in the
dimensionless units ``u = g p`` and ``v = q/g``.
"""
from __future__ import annotations

import math
from fractions import Fraction
from functools import lru_cache

from weakmeas import weak_core
from weakmeas.errors import DomainError, SeriesConvergenceError

__all__ = [
    "MAX_TERMS",
    "gaussian_moment_p",
    "mixed_gaussian_moment",
    "series_z",
    "series_moments",
    "series_z_orthogonal",
]

MAX_TERMS = 80
_EARLY_STOP = 1e-15
_TAIL_LIMIT = 1e-12
_CANCELLATION_LIMIT = 1e-10
_EPS = 2.0**-52


def _double_factorial(n: int) -> int:
    # (-1)!! = 1
    return math.prod(range(n, 0, -2)) if n > 0 else 1


def gaussian_moment_p(n: int, s: float) -> float:
    """``<u^n>`` of the initial Gaussian: ``(n-1)!! (s/2)^(n/2)``, zero for odd ``n``.

    Examples
    --------
    >>> gaussian_moment_p(4, 2.0)
    3.0
    """
    s = weak_core._check_s(s)
    n = int(n)
    if n < 0:
        raise DomainError("moment order must be non-negative")
    if n % 2:
        return 0.0
    return float(_double_factorial(n - 1)) * (s / 2.0) ** (n // 2)


def mixed_gaussian_moment(kind: str, n: int, s: float) -> float:
    """Symmetrized mixed moments of the initial Gaussian.

    ``qp_sym``       ``<v u^n + u^n v>``, zero for ``n >= 1``
    ``q2p_odd_sym``  ``<v^2 u^(2n+1) + u^(2n+1) v^2>``, zero for ``n >= 0``
    ``q2p2n_sym``    ``<v^2 u^(2n) + u^(2n) v^2> = -((2n-1)/2) (2n-1)!! (s/2)^(n-1)``

    The last form has ``n = 0`` giving ``2 <v^2> = 1/s`` as a consistency check.
    """
    s = weak_core._check_s(s)
    n = int(n)
    if kind == "qp_sym":
        if n < 1:
            raise DomainError("qp_sym needs n >= 1")
        return 0.0
    if kind == "q2p_odd_sym":
        if n < 0:
            raise DomainError("q2p_odd_sym needs n >= 0")
        return 0.0
    if kind == "q2p2n_sym":
        if n < 0:
            raise DomainError("q2p2n_sym needs n >= 0")
        return -(2 * n - 1) / 2.0 * _double_factorial(2 * n - 1) * (s / 2.0) ** (n - 1)
    raise DomainError(f"unknown moment kind {kind!r}")


def _check_terms(n_terms: int) -> int:
    n_terms = int(n_terms)
    if not 1 <= n_terms <= MAX_TERMS:
        raise DomainError(f"n_terms must lie in [1, {MAX_TERMS}], got {n_terms}")
    return n_terms


def _accumulate(base: float, terms, check: bool, what: str) -> float:
    """Sum ``base + sum(terms)`` with early stopping and the tail guard."""
    total = base
    last = 0.0
    biggest = abs(base)
    converged = False
    for term in terms:
        total += term
        last = term
        biggest = max(biggest, abs(term))
        if term != 0.0 and abs(term) < _EARLY_STOP * abs(total):
            converged = True
            break
    if check and total != 0.0:
        if not converged and abs(last) > _TAIL_LIMIT * abs(total):
            raise SeriesConvergenceError(
                f"{what}: last term {last:.3e} exceeds {_TAIL_LIMIT:g} of the sum {total:.6g}; raise n_terms"
            )
        if biggest * _EPS > _CANCELLATION_LIMIT * abs(total):
            raise SeriesConvergenceError(
                f"{what}: alternating terms up to {biggest:.3e} cancel to {total:.3e}; s is outside the envelope"
            )
    return total


@lru_cache(maxsize=None)
def _even_coef(n: int) -> Fraction:
    # (-4)^n / (2n)!
    return Fraction((-4) ** n, math.factorial(2 * n))


@lru_cache(maxsize=None)
def _odd_coef(n: int) -> Fraction:
    # (-1)^n 2^(2n+1) / (2n+1)!
    return Fraction((-1) ** n * 2 ** (2 * n + 1), math.factorial(2 * n + 1))


def _moment_term(coef: Fraction, order: int, s: float) -> float:
    # coef * <u^order>, with the double factorial folded into the rational
    return float(coef * _double_factorial(order - 1)) * (s / 2.0) ** (order // 2)


def series_z(pt: weak_core.MeasurementPoint, n_terms: int = 60, check: bool = True) -> float:
    """Normalization ``Z = 1 + (1 - |A_w|^2)/2 sum_n (-4)^n/(2n)! <u^2n>``.

    Stops early once a term drops below 1e-15 of the running sum.  With
    ``check`` a truncated tail above 1e-12 of the sum raises, as does
    catastrophic cancellation (roughly ``s > 15``).
    """
    n_terms = _check_terms(n_terms)
    half = 0.5 * (1.0 - pt.a_w.abs2)
    if half == 0.0:
        return 1.0
    terms = (half * _moment_term(_even_coef(n), 2 * n, pt.s) for n in range(1, n_terms + 1))
    return _accumulate(1.0, terms, check, "series_z")


def series_moments(pt: weak_core.MeasurementPoint, n_terms: int = 60, check: bool = True) -> weak_core.PointerStats:
    """Pointer statistics assembled from the four truncated moment series.

    ``Z <v>' = Re A_w`` holds exactly because every ``<v u^m + u^m v>``
    vanishes; the other three moments are genuine series.  ``n_terms = 1``
    gives the linear-order shifts.
    """
    n_terms = _check_terms(n_terms)
    s = pt.s
    re, im, a2 = pt.a_w.re, pt.a_w.im, pt.a_w.abs2
    half = 0.5 * (1.0 - a2)
    z = series_z(pt, n_terms, check)

    zu = _accumulate(
        0.0,
        (im * _moment_term(_odd_coef(n), 2 * n + 2, s) for n in range(n_terms)),
        check and im != 0.0,
        "series <u>",
    )
    zu2 = _accumulate(
        gaussian_moment_p(2, s),
        (half * _moment_term(_even_coef(n), 2 * n + 2, s) for n in range(1, n_terms + 1)),
        check and half != 0.0,
        "series <u^2>",
    )

    def v2_terms():
        for n in range(2, n_terms + 1):
            mixed = mixed_gaussian_moment("q2p2n_sym", n, s)
            commutator = n * (2 * n - 1) * gaussian_moment_p(2 * n - 2, s)
            yield 0.5 * half * float(_even_coef(n)) * (mixed + commutator)

    first = 0.5 * (2.0 * a2 - (1.0 - a2) * mixed_gaussian_moment("q2p2n_sym", 1, s))
    zv2 = _accumulate(1.0 / (2.0 * s) + first, v2_terms(), check and half != 0.0 and n_terms > 1, "series <v^2>")

    mean_q = re / z
    mean_p = zu / z
    return weak_core.PointerStats(
        z=z,
        mean_q=mean_q,
        mean_p=mean_p,
        var_q=zv2 / z - mean_q * mean_q,
        var_p=zu2 / z - mean_p * mean_p,
    )


@lru_cache(maxsize=None)
def _orthogonal_coef(m: int) -> Fraction:
    # (-1)^m/(2m)! * (2m+1)!! * sum_k (-1)^k C(2m,k) <A^(2m-k)>_ow <A^k>_ow
    inner = Fraction(0)
    for k in range(2 * m + 1):
        if k % 2:
            continue  # odd orthogonal weak values vanish
        inner += Fraction(math.comb(2 * m, k), (2 * m - k + 1) * (k + 1))
    return Fraction((-1) ** m * _double_factorial(2 * m + 1), math.factorial(2 * m)) * inner


def series_z_orthogonal(s: float, n_terms: int = 60, check: bool = True) -> float:
    """Orthogonal normalization ``Z_o`` from its defining series.

    Inserting ``<A^n>_ow = 1/(n+1)`` (even ``n``) and the Gaussian moments,
    the ``m``-th term is ``(-s)^m/(m+1)!``, so the sum tends to
    ``(1 - e^-s)/s``.

    Examples
    --------
    >>> round(series_z_orthogonal(1.0, 40), 5)
    0.63212
    """
    s = weak_core._check_s(s)
    n_terms = _check_terms(n_terms)
    terms = (float(_orthogonal_coef(m)) * (s / 2.0) ** m for m in range(1, n_terms))
    return _accumulate(1.0, terms, check, "series_z_orthogonal")
