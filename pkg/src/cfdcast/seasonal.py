"""Seasonal adjustment of reservoir fill series.

Reservoir fill percentages follow a strong annual cycle: reservoirs
drain through winter and refill during snow melt. The regression
covariate we want is the *deviation* from the normal level, so the
cycle is removed on the logit scale, where the (0, 100)% range maps to
the whole real line and the residuals are unconstrained.

The cycle model is an intercept plus the first two sin/cos harmonics of
the annual period. Fill statistics in this market are weekly, so the
time index counts weeks and the default period is 52.
"""

from __future__ import annotations

from collections.abc import Mapping
from dataclasses import dataclass

import numpy as np

from .errors import LogitDomainError, SeasonalRankError

N_HARMONICS = 2
N_COEFFS = 1 + 2 * N_HARMONICS
DEFAULT_PERIOD = 52.0


def logit_fill(fill_pct) -> np.ndarray:
    """Map fill percentages in (0, 100) to the real line via log(p/(1-p))."""
    w = np.asarray(fill_pct, dtype=float)
    if not np.all(np.isfinite(w)):
        raise LogitDomainError("fill series contains non-finite values")
    if np.any(w <= 0.0) or np.any(w >= 100.0):
        raise LogitDomainError("fill percentages must lie strictly inside (0, 100)")
    p = w / 100.0
    return np.log(p / (1.0 - p))


def _coerce_series(fill_series, t):
    """Accept a mapping/pandas Series (index = time) or (values, t) arrays."""
    if isinstance(fill_series, Mapping):
        items = sorted(fill_series.items())
        t = np.array([k for k, _ in items], dtype=float)
        values = np.array([v for _, v in items], dtype=float)
        return values, t
    index = getattr(fill_series, "index", None)
    values = np.asarray(fill_series, dtype=float)
    if t is None:
        if index is not None:
            t = np.asarray(index, dtype=float)
        else:
            t = np.arange(values.size, dtype=float)
    else:
        t = np.asarray(t, dtype=float)
    if t.shape != values.shape:
        raise ValueError("time index and fill series have different lengths")
    return values, t


def _harmonic_design(t: np.ndarray, period: float) -> np.ndarray:
    """Columns: intercept, sin(j*omega*t) and cos(j*omega*t) for j = 1, 2."""
    omega = 2.0 * np.pi / period
    cols = [np.ones_like(t)]
    for j in range(1, N_HARMONICS + 1):
        cols.append(np.sin(j * omega * t))
    for j in range(1, N_HARMONICS + 1):
        cols.append(np.cos(j * omega * t))
    return np.column_stack(cols)


@dataclass(frozen=True)
class SeasonalModel:
    """Fitted seasonal cycle for one area's reservoir series (logit scale)."""

    gamma0: float
    gamma_sin: tuple[float, float]
    gamma_cos: tuple[float, float]
    period: float = DEFAULT_PERIOD
    area: str = ""

    def __post_init__(self):
        coeffs = (self.gamma0, *self.gamma_sin, *self.gamma_cos)
        if not all(np.isfinite(c) for c in coeffs):
            raise SeasonalRankError("seasonal coefficients must be finite")
        if not self.period > 0:
            raise SeasonalRankError("period must be positive")

    @property
    def coefficients(self) -> np.ndarray:
        return np.array([self.gamma0, *self.gamma_sin, *self.gamma_cos])

    def predict(self, t) -> np.ndarray:
        """Seasonal term at time index t (weeks)."""
        t = np.asarray(t, dtype=float)
        return _harmonic_design(t, self.period) @ self.coefficients


def fit_seasonal(fill_series, t=None, *, period: float = DEFAULT_PERIOD,
                 area: str = "") -> SeasonalModel:
    """Least-squares fit of the logit-scale seasonal cycle.

    ``fill_series`` is a week-index -> fill_pct mapping (or values plus an
    explicit ``t``), with every value strictly inside (0, 100).
    """
    values, t = _coerce_series(fill_series, t)
    if values.size < N_COEFFS:
        raise SeasonalRankError(
            f"need at least {N_COEFFS} observations to fit the seasonal model, "
            f"got {values.size}"
        )
    y = logit_fill(values)
    design = _harmonic_design(t, period)
    if np.linalg.matrix_rank(design) < N_COEFFS:
        raise SeasonalRankError("seasonal design is rank deficient; sampling times alias the harmonics")
    coeffs, *_ = np.linalg.lstsq(design, y, rcond=None)
    return SeasonalModel(
        gamma0=float(coeffs[0]),
        gamma_sin=(float(coeffs[1]), float(coeffs[2])),
        gamma_cos=(float(coeffs[3]), float(coeffs[4])),
        period=period,
        area=area,
    )


def adjust(fill_series, model: SeasonalModel, t=None) -> np.ndarray:
    """Logit-scale deviations from the seasonal norm: logit(fill) - cycle(t)."""
    values, t = _coerce_series(fill_series, t)
    return logit_fill(values) - model.predict(t)
