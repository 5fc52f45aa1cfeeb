"""Exact grid simulation of pre-selection, von Neumann kick and post-selection.

The detector lives on a uniform momentum grid ``u_i = -U + i*(2U/N)``.
Because ``A**2 = 1`` the evolution factorizes pointwise,

    exp(-i u A) = cos(u) * 1 - i sin(u) * A,

so the post-selected (unnormalized) pointer amplitude is

    [<f|i> cos(u) - i <f|A|i> sin(u)] * phi(u)

with no series truncation.  Position-space quantities come from a unitary
DFT onto the dual grid ``v_j = (j - N/2) * pi/U`` using ``<q|p> ~ e^{iqp}``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Literal

import numpy as np
from scipy.integrate import trapezoid

from weakmeas import weak_core
from weakmeas.errors import ConfigurationError, DegenerateSetupError, DomainError

__all__ = [
    "GridSpec",
    "WaveGrid",
    "OracleReport",
    "default_grid",
    "initial_wave",
    "postselect_amplitudes",
    "postselect_wave",
    "to_position_space",
    "to_momentum_space",
    "wave_stats",
    "oracle_report",
    "orthogonal_oracle",
]

SpaceTag = Literal["momentum", "position"]

_MIN_POINTS = 256
_COVERAGE_SIGMAS = 12.0
_MIN_PROBABILITY = 1e-300
_OVERLAP_THRESHOLD = 1e-12


@dataclass(frozen=True)
class GridSpec:
    """Uniform grid: ``points`` samples on ``[-half_width, half_width)`` in u."""

    half_width: float
    points: int = 2**15

    def __post_init__(self):
        if not (math.isfinite(self.half_width) and self.half_width > 0):
            raise ConfigurationError(f"half_width must be positive, got {self.half_width!r}")
        n = int(self.points)
        if n < _MIN_POINTS or n & (n - 1):
            raise ConfigurationError(f"points must be a power of two >= {_MIN_POINTS}, got {self.points!r}")

    @property
    def du(self) -> float:
        return 2.0 * self.half_width / self.points

    @property
    def dv(self) -> float:
        return math.pi / self.half_width

    def u_axis(self) -> np.ndarray:
        return (np.arange(self.points) - self.points // 2) * self.du

    def v_axis(self) -> np.ndarray:
        return (np.arange(self.points) - self.points // 2) * self.dv

    def check_coverage(self, s: float) -> None:
        """Raise unless both conjugate grids resolve and contain the state."""
        sigma_u = math.sqrt(s / 2.0)
        sigma_v = 1.0 / math.sqrt(2.0 * s)
        if self.half_width < _COVERAGE_SIGMAS * sigma_u:
            raise ConfigurationError(
                f"half_width {self.half_width:g} covers fewer than {_COVERAGE_SIGMAS:g} sigma_u"
                f" (sigma_u = {sigma_u:g})"
            )
        v_half = self.dv * (self.points // 2)
        if v_half < 1.0 + _COVERAGE_SIGMAS * sigma_v:
            raise ConfigurationError(
                f"dual half-width {v_half:g} cannot hold pointer shifts of 1 plus"
                f" {_COVERAGE_SIGMAS:g} sigma_v (sigma_v = {sigma_v:g}); increase points or reduce half_width"
            )
        if self.du > sigma_u / 2.0:
            raise ConfigurationError(f"du = {self.du:g} under-resolves sigma_u = {sigma_u:g}")
        if self.dv > sigma_v / 2.0:
            raise ConfigurationError(f"dv = {self.dv:g} under-resolves sigma_v = {sigma_v:g}")


def default_grid(s: float) -> GridSpec:
    """``2**15`` points and ``U = 36 max(sqrt(s), 1)``, tightened for ``s < 0.01``.

    Below ``s = 0.01`` the half-width shrinks as ``360 sqrt(s)`` so the
    momentum Gaussian keeps ~30 samples per standard deviation.
    """
    s = weak_core._check_s(s)
    root = math.sqrt(s)
    return GridSpec(half_width=36.0 * max(root, min(1.0, 10.0 * root)), points=2**15)


@dataclass(frozen=True, eq=False)
class WaveGrid:
    spec: GridSpec
    amplitudes: np.ndarray
    space_tag: SpaceTag = "momentum"

    def __post_init__(self):
        amps = np.asarray(self.amplitudes, dtype=complex)
        if amps.shape != (self.spec.points,):
            raise ConfigurationError(f"expected {self.spec.points} amplitudes, got shape {amps.shape}")
        object.__setattr__(self, "amplitudes", amps)

    @property
    def abscissa(self) -> np.ndarray:
        return self.spec.u_axis() if self.space_tag == "momentum" else self.spec.v_axis()

    @property
    def step(self) -> float:
        return self.spec.du if self.space_tag == "momentum" else self.spec.dv

    def density(self) -> np.ndarray:
        return np.abs(self.amplitudes) ** 2

    def norm(self) -> float:
        return float(trapezoid(self.density(), dx=self.step))


def initial_wave(s: float, spec: GridSpec) -> WaveGrid:
    """Normalized ``phi(u) ~ exp(-u^2 / (2 s))`` on the momentum grid."""
    s = weak_core._check_s(s)
    spec.check_coverage(s)
    u = spec.u_axis()
    amps = (math.pi * s) ** -0.25 * np.exp(-u * u / (2.0 * s))
    return WaveGrid(spec, amps.astype(complex), "momentum")


def postselect_amplitudes(overlap: complex, transition: complex, wave: WaveGrid):
    """Apply ``<f| exp(-i u A) |i>`` given ``<f|i>`` and ``<f|A|i>``.

    Returns the normalized post-selected wave and the success probability.
    """
    if wave.space_tag != "momentum":
        raise ConfigurationError("post-selection acts on a momentum-space wave")
    u = wave.abscissa
    amps = (overlap * np.cos(u) - 1j * transition * np.sin(u)) * wave.amplitudes
    prob = float(trapezoid(np.abs(amps) ** 2, dx=wave.step))
    if not prob > _MIN_PROBABILITY:
        raise DegenerateSetupError(f"post-selection probability {prob:g} vanishes")
    return WaveGrid(wave.spec, amps / math.sqrt(prob), "momentum"), prob


def _selection_amplitudes(setup):
    pre = np.asarray(setup.pre, dtype=complex)
    post = np.asarray(setup.post, dtype=complex)
    obs = np.asarray(setup.observable, dtype=complex)
    if not np.allclose(obs @ obs, np.eye(obs.shape[0]), rtol=0.0, atol=1e-12):
        raise DomainError("observable must square to the identity")
    return complex(np.vdot(post, pre)), complex(np.vdot(post, obs @ pre))


def postselect_wave(setup, s: float, wave: WaveGrid):
    """Post-select ``wave`` through ``setup`` (anything with pre/post/observable)."""
    weak_core._check_s(s)
    overlap, transition = _selection_amplitudes(setup)
    return postselect_amplitudes(overlap, transition, wave)


def _dft_phase(n: int) -> np.ndarray:
    # (-1)^k centers both grids on index n/2
    return np.where(np.arange(n) % 2, -1.0, 1.0)


def to_position_space(wave: WaveGrid) -> WaveGrid:
    """``psi(v) = (2 pi)^-1/2 sum_u e^{i v u} psi(u) du`` on the dual grid."""
    if wave.space_tag != "momentum":
        raise ConfigurationError("wave is already in position space")
    n = wave.spec.points
    sign = _dft_phase(n)
    out = wave.spec.du / math.sqrt(2.0 * math.pi) * n * sign * np.fft.ifft(sign * wave.amplitudes)
    return WaveGrid(wave.spec, out, "position")


def to_momentum_space(wave: WaveGrid) -> WaveGrid:
    """Inverse of :func:`to_position_space`."""
    if wave.space_tag != "position":
        raise ConfigurationError("wave is already in momentum space")
    n = wave.spec.points
    sign = _dft_phase(n)
    out = wave.spec.dv / math.sqrt(2.0 * math.pi) * sign * np.fft.fft(sign * wave.amplitudes)
    return WaveGrid(wave.spec, out, "momentum")


def wave_stats(wave: WaveGrid):
    """Quadrature ``(norm, mean, variance)`` of ``|wave|^2``."""
    x = wave.abscissa
    rho = wave.density()
    norm = float(trapezoid(rho, dx=wave.step))
    mean = float(trapezoid(x * rho, dx=wave.step)) / norm
    var = float(trapezoid((x - mean) ** 2 * rho, dx=wave.step)) / norm
    return norm, mean, var


@dataclass(frozen=True, eq=False)
class OracleReport:
    """Everything the grid simulation measured for one (setup, s) pair.

    ``z`` is the oracle's normalization: probability / |<f|i>|^2 for
    non-orthogonal setups, probability / ((s/2) |<f|A|i>|^2) otherwise.
    """

    s: float
    orthogonal: bool
    post_selection_probability: float
    z: float
    mean_u: float
    mean_v: float
    var_u: float
    var_v: float
    u: np.ndarray
    v: np.ndarray
    density_u: np.ndarray
    density_v: np.ndarray
    residuals_vs_closed_form: dict = field(default_factory=dict)


def _scaled_residual(measured: float, reference: float) -> float:
    # <= 1e-8 means: relative error 1e-8, or absolute 1e-10 once |reference| < 1e-2
    return abs(measured - reference) / max(abs(reference), 1e-2)


def _curve_residual(measured: np.ndarray, reference: np.ndarray) -> float:
    return float(np.max(np.abs(measured - reference)) / np.max(np.abs(reference)))


def _run_chain(overlap: complex, transition: complex, s: float, spec: GridSpec):
    wave0 = initial_wave(s, spec)
    post, prob = postselect_amplitudes(overlap, transition, wave0)
    pos = to_position_space(post)
    _, mean_u, var_u = wave_stats(post)
    _, mean_v, var_v = wave_stats(pos)
    return post, pos, prob, mean_u, mean_v, var_u, var_v


def orthogonal_oracle(s: float, spec: GridSpec | None = None) -> OracleReport:
    """Grid oracle for a canonical orthogonal selection (``<f|i> = 0``, ``<f|A|i> = 1``)."""
    return _report(0j, 1.0 + 0j, s, spec)


def oracle_report(setup, s: float, spec: GridSpec | None = None) -> OracleReport:
    """Simulate the full chain for ``setup`` at coupling ``s`` and compare to closed forms."""
    overlap, transition = _selection_amplitudes(setup)
    if abs(overlap) ** 2 < _OVERLAP_THRESHOLD and abs(transition) ** 2 < _OVERLAP_THRESHOLD:
        raise DegenerateSetupError("both <f|i> and <f|A|i> vanish")
    return _report(overlap, transition, s, spec)


def _report(overlap: complex, transition: complex, s: float, spec: GridSpec | None) -> OracleReport:
    s = weak_core._check_s(s)
    spec = spec or default_grid(s)
    post, pos, prob, mean_u, mean_v, var_u, var_v = _run_chain(overlap, transition, s, spec)
    u, v = post.abscissa, pos.abscissa
    rho_u, rho_v = post.density(), pos.density()
    orthogonal = abs(overlap) ** 2 < _OVERLAP_THRESHOLD
    res = {}
    if orthogonal:
        from weakmeas.gaussian_oracle.series import series_z_orthogonal

        z = prob / (0.5 * s * abs(transition) ** 2)
        res["z_o_series"] = _scaled_residual(z, series_z_orthogonal(s))
        res["z_o_paper"] = _scaled_residual(z, weak_core.z_orthogonal_paper(s))
        den = weak_core._paper_orth_denominator(s)
        es = math.exp(-s)
        res["var_p_paper"] = _scaled_residual(var_u, 0.5 * s * (1.0 + (2.0 * s - 1.0) * es) / den)
        res["var_q_paper"] = _scaled_residual(var_v, (-math.expm1(-s) + 4.0 * s) / (2.0 * s * den))
        res["density_u_normalized"] = _curve_residual(rho_u, weak_core.density_p_orthogonal(s, u, "oracle_normalized"))
        res["density_v_normalized"] = _curve_residual(rho_v, weak_core.density_q_orthogonal(s, v, "oracle_normalized"))
        res["density_u_paper"] = _curve_residual(rho_u, weak_core.density_p_orthogonal(s, u, "paper"))
        res["density_v_paper"] = _curve_residual(rho_v, weak_core.density_q_orthogonal(s, v, "paper"))
    else:
        z = prob / abs(overlap) ** 2
        pt = weak_core.MeasurementPoint.of(s, transition / overlap)
        st = weak_core.moments_nonorthogonal(pt)
        res["z"] = _scaled_residual(z, st.z)
        res["mean_q"] = _scaled_residual(mean_v, st.mean_q)
        res["mean_p"] = _scaled_residual(mean_u, st.mean_p)
        res["var_q"] = _scaled_residual(var_v, st.var_q)
        res["var_p"] = _scaled_residual(var_u, st.var_p)
        res["density_u"] = _curve_residual(rho_u, weak_core.density_p_nonorthogonal(pt, u))
        res["density_v"] = _curve_residual(rho_v, weak_core.density_q_nonorthogonal(pt, v))
    return OracleReport(
        s=s,
        orthogonal=orthogonal,
        post_selection_probability=prob,
        z=z,
        mean_u=mean_u,
        mean_v=mean_v,
        var_u=var_u,
        var_v=var_v,
        u=u,
        v=v,
        density_u=rho_u,
        density_v=rho_v,
        residuals_vs_closed_form=res,
    )
