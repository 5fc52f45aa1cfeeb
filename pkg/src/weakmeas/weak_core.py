"""Closed-form, all-order pointer statistics for an observable with A**2 = 1.

The detector starts in a zero-mean Gaussian and couples through
``exp(-i g A p)``.  Everything here is expressed in dimensionless variables:

* ``s = 2 g**2 <p**2>`` -- coupling strength,
* ``u = g p``           -- momentum-side abscissa (initial variance ``s/2``),
* ``v = q / g``         -- pointer-side abscissa (initial variance ``1/(2s)``).

Non-orthogonal post-selection is described by the complex weak value alone.
The orthogonal case (zero overlap) is reported twice: once with the
published closed forms taken literally and once with values that are
normalized against the grid oracle, so callers can see the discrepancy.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Literal

import numpy as np

from weakmeas.errors import DomainError

__all__ = [
    "WeakValue",
    "MeasurementPoint",
    "PointerStats",
    "OrthogonalStats",
    "normalization",
    "moments_nonorthogonal",
    "density_p_nonorthogonal",
    "density_q_nonorthogonal",
    "initial_density_u",
    "initial_density_v",
    "wu_li_shifts",
    "orthogonal_weak_value",
    "z_orthogonal_paper",
    "moments_orthogonal",
    "density_p_orthogonal",
    "density_q_orthogonal",
]

Variant = Literal["paper", "oracle_normalized"]


def _check_s(s: float) -> float:
    s = float(s)
    if not math.isfinite(s):
        raise DomainError(f"coupling s must be finite, got {s!r}")
    if s <= 0.0:
        raise DomainError(f"coupling s must be > 0, got {s!r}")
    return s


@dataclass(frozen=True)
class WeakValue:
    """Complex weak value ``<f|A|i> / <f|i>``."""

    re: float
    im: float

    def __post_init__(self):
        if not (math.isfinite(self.re) and math.isfinite(self.im)):
            raise DomainError(f"weak value must be finite, got {self.re!r} + {self.im!r}i")

    @classmethod
    def from_complex(cls, z: complex) -> "WeakValue":
        z = complex(z)
        return cls(z.real, z.imag)

    def __complex__(self) -> complex:
        return complex(self.re, self.im)

    @property
    def abs2(self) -> float:
        return self.re * self.re + self.im * self.im


@dataclass(frozen=True)
class MeasurementPoint:
    """Coupling ``s`` together with the weak value it acts on."""

    s: float
    a_w: WeakValue

    def __post_init__(self):
        _check_s(self.s)

    @classmethod
    def of(cls, s: float, a_w: complex | WeakValue) -> "MeasurementPoint":
        if not isinstance(a_w, WeakValue):
            a_w = WeakValue.from_complex(a_w)
        return cls(float(s), a_w)


@dataclass(frozen=True)
class PointerStats:
    """Normalization and the first two moments after post-selection.

    ``mean_q`` and ``var_q`` are in units of ``v = q/g``; ``mean_p`` and
    ``var_p`` in units of ``u = g p``.
    """

    z: float
    mean_q: float
    mean_p: float
    var_q: float
    var_p: float


@dataclass(frozen=True)
class OrthogonalStats:
    z_o_paper: float
    z_o_series: float
    mean_q: float
    mean_p: float
    var_p_paper: float
    var_q_paper: float
    var_p_oracle_ref: float
    var_q_oracle_ref: float


# --------------------------------------------------------------------------
# Non-orthogonal post-selection
# --------------------------------------------------------------------------

def normalization(pt: MeasurementPoint) -> float:
    """``Z = 1 + (1 - |A_w|^2)(e^-s - 1)/2``.

    Evaluated as ``(1 + e^-s)/2 + |A_w|^2 (1 - e^-s)/2`` which is the same
    polynomial in ``|A_w|^2`` but free of cancellation for large weak values.
    """
    s = pt.s
    return 0.5 * (1.0 + math.exp(-s)) - 0.5 * pt.a_w.abs2 * math.expm1(-s)


def moments_nonorthogonal(pt: MeasurementPoint) -> PointerStats:
    """Exact post-selected pointer statistics for any ``s > 0``.

    Examples
    --------
    >>> st = moments_nonorthogonal(MeasurementPoint.of(0.5, 0.5))
    >>> round(st.z, 5), round(st.mean_q, 5)
    (0.85245, 0.58655)
    """
    s = pt.s
    re, im, a2 = pt.a_w.re, pt.a_w.im, pt.a_w.abs2
    z = normalization(pt)
    es = math.exp(-s)
    mean_q = re / z
    mean_p = s * es * im / z
    var_q = 1.0 / (2.0 * s) + (1.0 + a2) / (2.0 * z) - re * re / (z * z)
    var_p = s / 2.0 - s * s * es * (1.0 - a2) / (2.0 * z) - (s * es * im) ** 2 / (z * z)
    return PointerStats(z=z, mean_q=mean_q, mean_p=mean_p, var_q=var_q, var_p=var_p)


def initial_density_u(s: float, u):
    """Initial Gaussian density in ``u`` (variance ``s/2``)."""
    s = _check_s(s)
    u = np.asarray(u, dtype=float)
    return np.sqrt(1.0 / (math.pi * s)) * np.exp(-u * u / s)


def initial_density_v(s: float, v):
    """Initial Gaussian density in ``v`` (variance ``1/(2s)``)."""
    s = _check_s(s)
    v = np.asarray(v, dtype=float)
    return np.sqrt(s / math.pi) * np.exp(-s * v * v)


def density_p_nonorthogonal(pt: MeasurementPoint, u):
    """Post-selected density over ``u = g p`` (already carries the 1/g Jacobian)."""
    u = np.asarray(u, dtype=float)
    a2, im = pt.a_w.abs2, pt.a_w.im
    bracket = 2.0 + (1.0 - a2) * (np.cos(2.0 * u) - 1.0) + 2.0 * im * np.sin(2.0 * u)
    return bracket * initial_density_u(pt.s, u) / (2.0 * normalization(pt))


def _three_gaussians(s, v, w_minus, w_center, w_plus):
    # w_minus*e^{-s(v-1)^2} + w_center*e^{-s(1+v^2)} + w_plus*e^{-s(v+1)^2}
    return (
        w_minus * np.exp(-s * (v - 1.0) ** 2)
        + w_center * np.exp(-s * (1.0 + v * v))
        + w_plus * np.exp(-s * (v + 1.0) ** 2)
    )


def density_q_nonorthogonal(pt: MeasurementPoint, v):
    """Post-selected density over ``v = q/g``.

    The hyperbolic bracket is folded into the Gaussian before exponentiating::

        e^-s cosh(2sv) e^{-s v^2} = (e^{-s(v-1)^2} + e^{-s(v+1)^2}) / 2

    so large ``s*v`` never overflows.
    """
    v = np.asarray(v, dtype=float)
    s = pt.s
    re, a2 = pt.a_w.re, pt.a_w.abs2
    shape = _three_gaussians(
        s,
        v,
        0.5 * (1.0 + a2 + 2.0 * re),
        1.0 - a2,
        0.5 * (1.0 + a2 - 2.0 * re),
    )
    return math.sqrt(s / math.pi) * shape / (2.0 * normalization(pt))


def wu_li_shifts(pt: MeasurementPoint, a2_w: WeakValue | complex = 1.0, anti_qp: float = 0.0):
    """Approximate pointer shifts ``(dq/g, g dp)`` with the resummed denominator.

    ``a2_w`` is the weak value of ``A**2`` (identically 1 here) and
    ``anti_qp`` the initial ``<{q, p}>`` in dimensionless form.
    """
    if not isinstance(a2_w, WeakValue):
        a2_w = WeakValue.from_complex(a2_w)
    if not math.isfinite(anti_qp):
        raise DomainError("anti_qp must be finite")
    re, im = pt.a_w.re, pt.a_w.im
    den = 1.0 + 0.5 * pt.s * (pt.a_w.abs2 - a2_w.re)
    if den <= 0.0:
        raise DomainError(f"shift denominator {den!r} <= 0; outside the approximation's validity")
    delta_q = (re + im * anti_qp) / den
    delta_p = pt.s * im / den
    return delta_q, delta_p


# --------------------------------------------------------------------------
# Orthogonal post-selection
# --------------------------------------------------------------------------

def orthogonal_weak_value(n: int) -> float:
    """``<A^n>_ow``: ``1/(n+1)`` for even ``n`` and 0 for odd ``n``."""
    n = int(n)
    if n < 0:
        raise DomainError("n must be non-negative")
    return 0.0 if n % 2 else 1.0 / (n + 1)


def z_orthogonal_paper(s: float) -> float:
    """The published closed form ``(4/s)(1 - e^-s - 3s/4)``, taken literally."""
    s = _check_s(s)
    return 4.0 / s * (-math.expm1(-s) - 0.75 * s)


def _paper_orth_denominator(s: float) -> float:
    # 4 - 4 e^-s - 3 s
    return -4.0 * math.expm1(-s) - 3.0 * s


def moments_orthogonal(s: float) -> OrthogonalStats:
    """Orthogonal-case statistics: printed formulas next to oracle values.

    No field is corrected silently.  ``z_o_series`` sums the defining series
    and the ``*_oracle_ref`` variances come from the grid simulation.
    """
    from weakmeas import gaussian_oracle

    s = _check_s(s)
    es = math.exp(-s)
    den = _paper_orth_denominator(s)
    ref = gaussian_oracle.orthogonal_oracle(s)
    return OrthogonalStats(
        z_o_paper=z_orthogonal_paper(s),
        z_o_series=gaussian_oracle.series_z_orthogonal(s),
        mean_q=0.0,
        mean_p=0.0,
        var_p_paper=0.5 * s * (1.0 + (2.0 * s - 1.0) * es) / den,
        var_q_paper=(1.0 / (2.0 * s)) * (-math.expm1(-s) + 4.0 * s) / den,
        var_p_oracle_ref=ref.var_u,
        var_q_oracle_ref=ref.var_v,
    )


def density_p_orthogonal(s: float, u, variant: Variant = "paper"):
    """Orthogonal post-selected density over ``u``.

    ``paper`` returns the printed expression even where it is negative;
    ``oracle_normalized`` rescales the ``(1 - cos 2u)`` shape to unit mass.
    """
    s = _check_s(s)
    u = np.asarray(u, dtype=float)
    shape = (1.0 - np.cos(2.0 * u)) * initial_density_u(s, u)
    if variant == "paper":
        return shape / (2.0 * _paper_orth_denominator(s))
    if variant == "oracle_normalized":
        return shape / -math.expm1(-s)
    raise ValueError(f"unknown variant {variant!r}")


def density_q_orthogonal(s: float, v, variant: Variant = "paper"):
    """Orthogonal post-selected density over ``v``.

    ``2 e^-s sinh^2(sv) e^{-s v^2}`` equals half of
    ``e^{-s(v-1)^2} + e^{-s(v+1)^2} - 2 e^{-s(1+v^2)}``; the latter form is
    what gets evaluated.
    """
    s = _check_s(s)
    v = np.asarray(v, dtype=float)
    shape = _three_gaussians(s, v, 1.0, -2.0, 1.0)
    # the center term cancels the side terms near v = 0; never let rounding go negative
    shape = np.maximum(shape, 0.0)
    norm = math.sqrt(s / math.pi)
    if variant == "paper":
        return 0.5 * norm * shape / _paper_orth_denominator(s)
    if variant == "oracle_normalized":
        return norm * shape / (-2.0 * math.expm1(-s))
    raise ValueError(f"unknown variant {variant!r}")
