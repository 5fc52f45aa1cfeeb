"""Two concrete parametrizations: the AAV spin-1/2 sequence and the simplified DSJH Sagnac.

AAV
    pre-selection at angle ``alpha``, post-selection ``|up_x>``, observable
    ``sigma_z``.  The pointer is ``p_z`` and plays the role of ``q``;
    ``z`` is its conjugate.  Weak value ``tan(alpha/2)``.
DSJH
    which-path observable, Soleil-Babinet phase ``phi``, dark-port
    post-selection.  The beam position ``x`` plays the role of ``p``, the
    transverse momentum ``-p`` the role of ``q`` and ``k`` replaces ``g``.
    Weak value ``-i cot(phi/2)``.

All angles are in radians.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from weakmeas import weak_core
from weakmeas.errors import DegenerateSetupError, DomainError
from weakmeas.weak_core import MeasurementPoint, WeakValue

__all__ = [
    "TwoLevelSetup",
    "AavPoint",
    "DsjhPoint",
    "OrthogonalFlag",
    "AavStats",
    "DsjhStats",
    "ORTHOGONALITY_THRESHOLD",
    "weak_value_of",
    "aav_setup",
    "aav_closed_forms",
    "aav_density",
    "aav_stats_from_core",
    "dsjh_setup",
    "dsjh_closed_forms",
    "dsjh_density",
    "dsjh_stats_from_core",
    "dsjh_amplification",
]

ORTHOGONALITY_THRESHOLD = 1e-12
_TOL = 1e-12
_TWO_PI = 2.0 * math.pi


@dataclass(frozen=True, eq=False)
class TwoLevelSetup:
    """Pre/post-selected qubit states and an involutory observable."""

    pre: np.ndarray
    post: np.ndarray
    observable: np.ndarray

    def __post_init__(self):
        pre = np.asarray(self.pre, dtype=complex).reshape(-1)
        post = np.asarray(self.post, dtype=complex).reshape(-1)
        obs = np.asarray(self.observable, dtype=complex)
        if pre.shape != (2,) or post.shape != (2,) or obs.shape != (2, 2):
            raise DomainError("a two-level setup needs 2-vectors and a 2x2 observable")
        for name, vec in (("pre", pre), ("post", post)):
            if abs(np.vdot(vec, vec).real - 1.0) > _TOL:
                raise DomainError(f"{name} state is not normalized")
        if not np.allclose(obs, obs.conj().T, rtol=0.0, atol=_TOL):
            raise DomainError("observable is not Hermitian")
        if not np.allclose(obs @ obs, np.eye(2), rtol=0.0, atol=_TOL):
            raise DomainError("observable does not square to the identity")
        for name, arr in (("pre", pre), ("post", post), ("observable", obs)):
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)


@dataclass(frozen=True)
class OrthogonalFlag:
    """Marks ``<f|i> = 0``; only the transition amplitude survives."""

    transition: complex


def _check_angle(name: str, angle: float) -> float:
    angle = float(angle)
    if not (math.isfinite(angle) and 0.0 < angle < _TWO_PI):
        raise DomainError(f"{name} must lie in (0, 2 pi), got {angle!r}")
    return angle


@dataclass(frozen=True)
class AavPoint:
    s: float
    alpha: float

    def __post_init__(self):
        weak_core._check_s(self.s)
        _check_angle("alpha", self.alpha)


@dataclass(frozen=True)
class DsjhPoint:
    s: float
    phi: float

    def __post_init__(self):
        weak_core._check_s(self.s)
        _check_angle("phi", self.phi)


@dataclass(frozen=True)
class AavStats:
    """``z``, ``<p_z>'/g``, ``(dp_z/g)^2``, ``g^2 (dz)^2`` and the single-shot SNR."""

    z: float
    mean_pz: float
    delta_pz_sq: float
    delta_z_sq: float
    snr: float


@dataclass(frozen=True)
class DsjhStats:
    """``z``, ``k<x>'``, ``k^2 (dx)^2``, ``(dp/k)^2`` and the single-shot SNR."""

    z: float
    mean_kx: float
    delta_x_sq: float
    delta_p_sq: float
    snr: float


def weak_value_of(setup: TwoLevelSetup):
    """Return ``(<f|i>, A_w)``, or ``(<f|i>, OrthogonalFlag)`` once ``|<f|i>|^2 < 1e-12``.

    Examples
    --------
    >>> up = np.array([1.0, 0.0])
    >>> weak_value_of(TwoLevelSetup(up, up, np.diag([1.0, -1.0])))[1]
    WeakValue(re=1.0, im=0.0)
    """
    overlap = complex(np.vdot(setup.post, setup.pre))
    transition = complex(np.vdot(setup.post, setup.observable @ setup.pre))
    if abs(overlap) ** 2 >= ORTHOGONALITY_THRESHOLD:
        return overlap, WeakValue.from_complex(transition / overlap)
    if abs(transition) ** 2 < ORTHOGONALITY_THRESHOLD:
        raise DegenerateSetupError("both <f|i> and <f|A|i> vanish")
    return overlap, OrthogonalFlag(transition)


_SIGMA_Z = np.diag([1.0, -1.0])


# --------------------------------------------------------------------------
# AAV
# --------------------------------------------------------------------------

def aav_setup(alpha: float) -> TwoLevelSetup:
    """Spin pre-selected at ``alpha``, post-selected along ``+x``, measuring ``sigma_z``.

    The radicals ``sqrt(1 +- sin alpha)`` are taken as the signed amplitudes
    ``cos(alpha/2) +- sin(alpha/2)`` so the overlap ``cos(alpha/2)`` really
    vanishes at ``alpha = pi``.
    """
    alpha = float(alpha)
    if not math.isfinite(alpha):
        raise DomainError("alpha must be finite")
    c, s = math.cos(alpha / 2.0), math.sin(alpha / 2.0)
    pre = np.array([c + s, c - s]) / math.sqrt(2.0)
    post = np.array([1.0, 1.0]) / math.sqrt(2.0)
    return TwoLevelSetup(pre, post, _SIGMA_Z)


def _aav_forms(s, alpha):
    # broadcasting core of aav_closed_forms
    ca, sa = np.cos(alpha), np.sin(alpha)
    es = np.exp(-s)
    half = 2.0 * np.cos(alpha / 2.0) ** 2  # 1 + cos(alpha) without cancellation near pi
    d = -np.expm1(-s) + es * half
    z = d / half
    mean = sa / d
    dpz2 = 1.0 / (2.0 * s) + ca * (ca + es) / (d * d)
    dz2 = s / 2.0 - s * s * es * ca / d
    snr = np.sqrt(2.0 * s) * sa / np.sqrt(d * d + 2.0 * s * ca * (ca + es))
    return z, mean, dpz2, dz2, snr


def _require_aav_overlap(alpha: float) -> None:
    if math.cos(alpha / 2.0) ** 2 < ORTHOGONALITY_THRESHOLD:
        raise DomainError(f"alpha = {alpha!r} makes the AAV selection orthogonal")


def aav_closed_forms(pt: AavPoint) -> AavStats:
    """Setup-specific closed forms in dimensionless units.

    Examples
    --------
    >>> st = aav_closed_forms(AavPoint(1.0, 3 * math.pi / 4))
    >>> round(st.mean_pz, 5)
    0.95572
    """
    _require_aav_overlap(pt.alpha)
    return AavStats(*(float(x) for x in _aav_forms(pt.s, pt.alpha)))


def aav_density(pt: AavPoint, x):
    """Density of ``x = p_z/g`` after post-selection.

    The ``cosh`` and ``sinh`` terms are folded into displaced Gaussians so
    large ``s`` cannot overflow.
    """
    _require_aav_overlap(pt.alpha)
    x = np.asarray(x, dtype=float)
    s, ca, sa = pt.s, math.cos(pt.alpha), math.sin(pt.alpha)
    shape = weak_core._three_gaussians(s, x, 0.5 * (1.0 + sa), ca, 0.5 * (1.0 - sa))
    return shape * math.sqrt(s / math.pi) / (1.0 + math.exp(-s) * ca)


def aav_stats_from_core(pt: AavPoint) -> AavStats:
    """The same statistics through ``weak_core`` with ``p_z -> q``."""
    _require_aav_overlap(pt.alpha)
    core = weak_core.moments_nonorthogonal(MeasurementPoint.of(pt.s, math.tan(pt.alpha / 2.0)))
    return AavStats(
        z=core.z,
        mean_pz=core.mean_q,
        delta_pz_sq=core.var_q,
        delta_z_sq=core.var_p,
        snr=core.mean_q / math.sqrt(core.var_q),
    )


# --------------------------------------------------------------------------
# DSJH
# --------------------------------------------------------------------------

def dsjh_setup(phi: float) -> TwoLevelSetup:
    """Sagnac with relative phase ``phi`` between the two circulating paths.

    Basis ordering is (clockwise, counter-clockwise).  The pre-state carries
    ``e^{+i phi/2}`` on the first path: this fixes the otherwise ambiguous
    sign so the weak value is ``-i cot(phi/2)`` and ``k<x>'`` is negative
    for ``phi`` in ``(0, pi)``.
    """
    phi = float(phi)
    if not math.isfinite(phi):
        raise DomainError("phi must be finite")
    pre = np.array([np.exp(0.5j * phi), 1j * np.exp(-0.5j * phi)]) / math.sqrt(2.0)
    post = np.array([1j, 1.0]) / math.sqrt(2.0)
    return TwoLevelSetup(pre, post, _SIGMA_Z)


def _dsjh_forms(s, phi):
    cp, sp = np.cos(phi), np.sin(phi)
    es = np.exp(-s)
    half = 2.0 * np.sin(phi / 2.0) ** 2  # 1 - cos(phi) without cancellation near 0
    d = -np.expm1(-s) + es * half
    z = d / half
    mean = -s * es * sp / d
    cp_minus_es = -np.expm1(-s) - half
    dx2 = s / 2.0 + s * s * es * cp_minus_es / (d * d)
    dp2 = 1.0 / (2.0 * s) + 1.0 / d
    snr = np.sqrt(2.0 * s) * es * sp / np.sqrt(d * d + 2.0 * s * es * cp_minus_es)
    return z, mean, dx2, dp2, snr


def _require_dsjh_overlap(phi: float) -> None:
    if math.sin(phi / 2.0) ** 2 < ORTHOGONALITY_THRESHOLD:
        raise DomainError(f"phi = {phi!r} puts the post-selection exactly on the dark port")


def dsjh_closed_forms(pt: DsjhPoint) -> DsjhStats:
    """Setup-specific closed forms; ``snr`` is ``|k<x>'| / (k dx)``."""
    _require_dsjh_overlap(pt.phi)
    return DsjhStats(*(float(x) for x in _dsjh_forms(pt.s, pt.phi)))


def dsjh_density(pt: DsjhPoint, kx):
    """Density of ``kx``: ``(1 - cos(2kx - phi)) / (1 - e^-s cos phi)`` times the initial Gaussian."""
    _require_dsjh_overlap(pt.phi)
    kx = np.asarray(kx, dtype=float)
    s = pt.s
    bracket = (1.0 - np.cos(2.0 * kx - pt.phi)) / (1.0 - math.exp(-s) * math.cos(pt.phi))
    return bracket * np.exp(-kx * kx / s) / math.sqrt(math.pi * s)


def dsjh_stats_from_core(pt: DsjhPoint) -> DsjhStats:
    """The same statistics through ``weak_core`` with ``p -> x``, ``q -> -p``, ``g -> k``."""
    _require_dsjh_overlap(pt.phi)
    core = weak_core.moments_nonorthogonal(MeasurementPoint.of(pt.s, -1j / math.tan(pt.phi / 2.0)))
    return DsjhStats(
        z=core.z,
        mean_kx=core.mean_p,
        delta_x_sq=core.var_p,
        delta_p_sq=core.var_q,
        snr=-core.mean_p / math.sqrt(core.var_p),
    )


def dsjh_amplification(pt: DsjhPoint, k: float, delta: float) -> float:
    """Amplification ``|<x>'| / delta`` given ``k`` and ``delta`` in reciprocal units."""
    k, delta = float(k), float(delta)
    if not (math.isfinite(k) and k > 0.0):
        raise DomainError("k must be positive")
    if not (math.isfinite(delta) and delta > 0.0):
        raise DomainError("delta must be positive")
    return abs(dsjh_closed_forms(pt).mean_kx) / (k * delta)
