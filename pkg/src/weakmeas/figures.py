"""Numeric tables behind the ten published figures.

Surfaces are sampled on cell-midpoint lattices so no point lands on
``s = 0`` or on an orthogonal angle.  Density figures are sampled over
+-10 standard deviations with at least ten points per standard deviation.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from weakmeas import optimize, setups, weak_core
from weakmeas.errors import DomainError

__all__ = ["FigureTable", "FIGURE_NUMBERS", "DENSITY_COUPLINGS", "figure_data"]

FIGURE_NUMBERS = tuple(range(1, 11))
DENSITY_COUPLINGS = (0.1, 1.0, 10.0, 1000.0)
_TWO_PI = 2.0 * math.pi


@dataclass(frozen=True, eq=False)
class FigureTable:
    """Column names, a rows-by-columns float array and a one-line caption."""

    number: int
    caption: str
    columns: tuple
    data: np.ndarray


def _midpoints(lo: float, hi: float, n: int) -> np.ndarray:
    return lo + (np.arange(n) + 0.5) * (hi - lo) / n


def _surface(panels, angle_ranges, s_points, angle_points, evaluate):
    rows = []
    for k, ((s_lo, s_hi), (a_lo, a_hi)) in enumerate(zip(panels, angle_ranges), start=1):
        s, a = np.meshgrid(_midpoints(s_lo, s_hi, s_points), _midpoints(a_lo, a_hi, angle_points), indexing="ij")
        values = evaluate(s, a)
        rows.append(np.column_stack([np.full(s.size, k), s.ravel(), a.ravel(), values.ravel()]))
    return np.vstack(rows)


def _log_couplings(n: int) -> np.ndarray:
    return np.logspace(-3, 1, n)


def _line(s_values, solver, companions):
    rows = []
    for s in s_values:
        pt = solver(float(s))
        rows.append([pt.s, pt.angle, pt.objective_value] + [pt.companion_stats[c] for c in companions])
    return np.array(rows)


def _density_rows(density_for, sigma_for, mean_for, extra_step=None):
    rows = []
    for s in DENSITY_COUPLINGS:
        sigma = sigma_for(s)
        centre = mean_for(s)
        step = sigma / 10.0 if extra_step is None else min(sigma / 10.0, extra_step)
        half = 10.0 * sigma + abs(centre)
        x = np.linspace(-half, half, 2 * int(math.ceil(half / step)) + 1)
        angle, post, initial = density_for(s, x)
        rows.append(np.column_stack([np.full(x.size, s), np.full(x.size, angle), x, post, initial]))
    return np.vstack(rows)


def _aav_density_on_line(s, x):
    angle = optimize.aav_optimal_expectation(s).angle
    return angle, setups.aav_density(setups.AavPoint(s, angle), x), weak_core.initial_density_v(s, x)


def _dsjh_density_on_line(s, x):
    angle = optimize.dsjh_optimal_expectation(s).angle
    return angle, setups.dsjh_density(setups.DsjhPoint(s, angle), x), weak_core.initial_density_u(s, x)


def figure_data(number: int, s_points: int = 100, angle_points: int = 128, line_points: int = 200) -> FigureTable:
    """Build the table for figure ``number`` (1 to 10).

    Examples
    --------
    >>> figure_data(2, line_points=5).columns
    ('s', 'alpha', 'mean_pz', 'delta_pz')
    """
    number = int(number)
    if number not in FIGURE_NUMBERS:
        raise DomainError(f"figure number must be in 1..10, got {number}")
    if min(s_points, angle_points, line_points) < 2:
        raise DomainError("lattices need at least 2 points per axis")

    if number == 1:
        data = _surface(
            [(0.0, 0.1), (0.0, 1.0), (0.0, 10.0)], [(0.0, _TWO_PI)] * 3, s_points, angle_points,
            lambda s, a: setups._aav_forms(s, a)[1],
        )
        return FigureTable(1, "AAV <p_z>'/g over (s, alpha)", ("panel", "s", "alpha", "mean_pz"), data)
    if number == 2:
        data = _line(_log_couplings(line_points), optimize.aav_optimal_expectation, ["delta_pz"])
        return FigureTable(2, "AAV optimal expectation-value line", ("s", "alpha", "mean_pz", "delta_pz"), data)
    if number == 3:
        data = _density_rows(_aav_density_on_line, lambda s: 1.0 / math.sqrt(2.0 * s), lambda s: 1.0)
        return FigureTable(
            3, "AAV p_z/g densities on the optimal expectation-value line",
            ("s", "alpha", "x", "density", "initial_density"), data,
        )
    if number == 4:
        data = _surface(
            [(0.0, 1.0), (0.0, 10.0)], [(0.5 * math.pi, math.pi), (0.0, math.pi)], s_points, angle_points,
            lambda s, a: setups._aav_forms(s, a)[4],
        )
        return FigureTable(4, "AAV single-shot SNR over (s, alpha)", ("panel", "s", "alpha", "snr"), data)
    if number == 5:
        data = _line(_log_couplings(line_points), optimize.aav_optimal_snr, ["mean_pz", "delta_pz"])
        return FigureTable(5, "AAV optimal-SNR line", ("s", "alpha", "snr", "mean_pz", "delta_pz"), data)
    if number == 6:
        data = _surface(
            [(0.0, 10.0), (0.0, 2.0)], [(0.0, _TWO_PI)] * 2, s_points, angle_points,
            lambda s, a: -setups._dsjh_forms(s, a)[1],
        )
        return FigureTable(6, "DSJH -k<x>' over (s, phi)", ("panel", "s", "phi", "minus_mean_kx"), data)
    if number == 7:
        data = _line(_log_couplings(line_points), optimize.dsjh_optimal_expectation, ["delta_kx"])
        return FigureTable(7, "DSJH optimal expectation-value line", ("s", "phi", "minus_mean_kx", "delta_kx"), data)
    if number == 8:
        data = _density_rows(
            _dsjh_density_on_line, lambda s: math.sqrt(s / 2.0), lambda s: 0.0, extra_step=math.pi / 40.0
        )
        return FigureTable(
            8, "DSJH kx densities on the optimal expectation-value line",
            ("s", "phi", "kx", "density", "initial_density"), data,
        )
    if number == 9:
        data = _surface(
            [(0.0, 2.0)], [(0.0, _TWO_PI)], s_points, angle_points, lambda s, a: setups._dsjh_forms(s, a)[4]
        )
        return FigureTable(9, "DSJH single-shot SNR over (s, phi)", ("panel", "s", "phi", "snr"), data)
    data = _line(_log_couplings(line_points), optimize.dsjh_optimal_snr, ["mean_kx", "delta_kx"])
    return FigureTable(10, "DSJH optimal-SNR line", ("s", "phi", "snr", "mean_kx", "delta_kx"), data)
