"""Monte Carlo sampling from post-selected densities and the sqrt(N) law for the sample mean.

Seeds are always explicit.  Trial ``t`` for the ``j``-th ensemble size
draws from ``numpy.random.default_rng(SeedSequence(seed, spawn_key=(j, t)))``,
so any single trial can be regenerated in isolation.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence, Union

import numpy as np
from scipy.integrate import cumulative_trapezoid, trapezoid

from weakmeas import setups
from weakmeas.errors import ConfigurationError, DegenerateSetupError, DomainError

__all__ = [
    "TabulatedDensity",
    "SampleBatch",
    "ScalingResult",
    "density_curve",
    "sample_density",
    "snr_scaling",
]

Point = Union[setups.AavPoint, setups.DsjhPoint]

_NORM_TOL = 1e-6
_SPAN_SIGMAS = 12.0
_MIN_POINTS = 4001


@dataclass(frozen=True, eq=False)
class TabulatedDensity:
    """A density sampled on an increasing abscissa, with its trapezoid CDF."""

    x: np.ndarray
    pdf: np.ndarray

    def __post_init__(self):
        x = np.asarray(self.x, dtype=float)
        pdf = np.asarray(self.pdf, dtype=float)
        if x.ndim != 1 or x.shape != pdf.shape or x.size < 2:
            raise ConfigurationError("x and pdf must be 1-D arrays of equal length >= 2")
        if not np.all(np.diff(x) > 0):
            raise ConfigurationError("abscissa must be strictly increasing")
        if not np.all(np.isfinite(pdf)) or pdf.min() < 0.0:
            raise DomainError("density must be finite and non-negative")
        mass = float(trapezoid(pdf, x))
        if abs(mass - 1.0) > _NORM_TOL:
            raise DomainError(f"density integrates to {mass:.9g}, not 1 within {_NORM_TOL:g}")
        cdf = cumulative_trapezoid(pdf, x, initial=0.0) / mass
        for name, arr in (("x", x), ("pdf", pdf)):
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)
        cdf.setflags(write=False)
        object.__setattr__(self, "_cdf_values", cdf)

    def cdf(self, at):
        return np.interp(at, self.x, self._cdf_values)

    def quantile(self, q):
        return np.interp(q, self._cdf_values, self.x)

    def mean(self) -> float:
        return float(trapezoid(self.x * self.pdf, self.x))


@dataclass(frozen=True, eq=False)
class SampleBatch:
    draws: np.ndarray
    seed: int
    source_curve: TabulatedDensity


@dataclass(frozen=True)
class ScalingResult:
    """Empirical SNR of the ``N``-sample mean for each ``N``, plus the log-log slope."""

    n_values: tuple
    snr: tuple
    mean: tuple
    std: tuple
    slope: float
    single_shot_snr: float
    trials: int
    seed: int


def _check_seed(seed: int) -> int:
    seed = int(seed)
    if not 0 <= seed < 2**64:
        raise DomainError("seed must be a 64-bit unsigned integer")
    return seed


def sample_density(curve: TabulatedDensity, n: int, seed: int) -> SampleBatch:
    """``n`` inverse-CDF draws from ``curve`` with a linearly interpolated CDF."""
    n = int(n)
    if n < 1:
        raise DomainError("n must be >= 1")
    seed = _check_seed(seed)
    rng = np.random.default_rng(seed)
    return SampleBatch(curve.quantile(rng.random(n)), seed, curve)


def density_curve(point: Point, points: int | None = None) -> TabulatedDensity:
    """Tabulate the setup's pointer density over +-12 sigma of every component."""
    if isinstance(point, setups.AavPoint):
        sigma = 1.0 / math.sqrt(2.0 * point.s)
        half = 1.0 + _SPAN_SIGMAS * sigma
        step = sigma / 20.0
        density = setups.aav_density
    elif isinstance(point, setups.DsjhPoint):
        sigma = math.sqrt(point.s / 2.0)
        half = _SPAN_SIGMAS * sigma
        step = min(sigma / 20.0, math.pi / 80.0)
        density = setups.dsjh_density
    else:
        raise DomainError(f"unsupported point type {type(point).__name__}")
    if points is None:
        points = max(_MIN_POINTS, 2 * int(math.ceil(half / step)) + 1)
    x = np.linspace(-half, half, int(points))
    return TabulatedDensity(x, density(point, x))


def _single_shot(point: Point):
    if isinstance(point, setups.AavPoint):
        st = setups.aav_closed_forms(point)
        return st.mean_pz, math.sqrt(st.delta_pz_sq)
    st = setups.dsjh_closed_forms(point)
    return st.mean_kx, math.sqrt(st.delta_x_sq)


def snr_scaling(point: Point, n_values: Sequence[int], trials: int, seed: int) -> ScalingResult:
    """Empirical ``|mean| / std`` of ``N``-sample averages across independent trials.

    Raises
    ------
    DegenerateSetupError
        If the closed-form mean vanishes, so no SNR can grow.
    """
    n_values = tuple(int(n) for n in n_values)
    if not n_values or n_values[0] < 1 or any(b <= a for a, b in zip(n_values, n_values[1:])):
        raise DomainError("n_values must be a strictly ascending sequence of positive integers")
    trials = int(trials)
    if trials < 30:
        raise DomainError("trials must be >= 30")
    seed = _check_seed(seed)
    mean0, delta0 = _single_shot(point)
    if abs(mean0) <= 1e-12 * delta0:
        raise DegenerateSetupError("the post-selected mean vanishes; SNR cannot improve with N")

    curve = density_curve(point)
    snrs, means, stds = [], [], []
    for j, n in enumerate(n_values):
        averages = np.empty(trials)
        for t in range(trials):
            rng = np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(j, t)))
            averages[t] = curve.quantile(rng.random(n)).mean()
        m, sd = float(averages.mean()), float(averages.std(ddof=1))
        means.append(m)
        stds.append(sd)
        snrs.append(abs(m) / sd)
    if len(n_values) > 1:
        slope = float(np.polyfit(np.log(n_values), np.log(snrs), 1)[0])
    else:
        slope = math.nan
    return ScalingResult(
        n_values=n_values,
        snr=tuple(snrs),
        mean=tuple(means),
        std=tuple(stds),
        slope=slope,
        single_shot_snr=abs(mean0) / delta0,
        trials=trials,
        seed=seed,
    )
