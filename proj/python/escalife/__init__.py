"""Escalator condition monitoring and remaining-useful-life toolkit."""

from ._core import (
    Error,
    at_value,
    band_rms,
    cli,
    compute_lhi,
    estimate_passengers,
    exceedance_area,
    fft_magnitude,
    fit_exponential,
    normalize,
    remaining_useful_life,
)

__all__ = [
    "Error",
    "at_value",
    "band_rms",
    "cli",
    "compute_lhi",
    "estimate_passengers",
    "exceedance_area",
    "fft_magnitude",
    "fit_exponential",
    "normalize",
    "remaining_useful_life",
]
