"""Independent ground truth: exact grid simulation and truncated operator series."""
from weakmeas.gaussian_oracle.grid import (
    GridSpec,
    OracleReport,
    WaveGrid,
    default_grid,
    initial_wave,
    oracle_report,
    orthogonal_oracle,
    postselect_amplitudes,
    postselect_wave,
    to_momentum_space,
    to_position_space,
    wave_stats,
)
from weakmeas.gaussian_oracle.hermite import HERMITE_MAX_ORDER, hermite, hermite_identity_residuals
from weakmeas.gaussian_oracle.series import (
    MAX_TERMS,
    gaussian_moment_p,
    mixed_gaussian_moment,
    series_moments,
    series_z,
    series_z_orthogonal,
)

__all__ = [
    "GridSpec",
    "OracleReport",
    "WaveGrid",
    "default_grid",
    "initial_wave",
    "oracle_report",
    "orthogonal_oracle",
    "postselect_amplitudes",
    "postselect_wave",
    "to_momentum_space",
    "to_position_space",
    "wave_stats",
    "HERMITE_MAX_ORDER",
    "hermite",
    "hermite_identity_residuals",
    "MAX_TERMS",
    "gaussian_moment_p",
    "mixed_gaussian_moment",
    "series_moments",
    "series_z",
    "series_z_orthogonal",
]
