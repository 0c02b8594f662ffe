"""Probabilistic CfD price engine for electricity areas without traded contracts."""

from .elicitation import (
    ElicitationProfile,
    ProfileRow,
    SessionTranscript,
    WeightDraw,
    concentration,
    elicit_session,
    point_mass_profile,
    sample_weights,
    validate_profile,
)
from .forecast import (
    BacktestRecord,
    ForecastResult,
    backtest,
    delivery_period,
    forecast_timeline,
    run_forecast,
)
from .market import (
    Area,
    DesignMatrix,
    Epoch,
    Horizon,
    MarketPanel,
    design_matrix,
    flag_stale,
    ingest,
    regression_frame,
)
from .posterior import PosteriorDraw, PosteriorSummary, fit, sample
from .seasonal import SeasonalModel, adjust, fit_seasonal

__version__ = "0.1.0"

__all__ = [
    "Area",
    "BacktestRecord",
    "DesignMatrix",
    "ElicitationProfile",
    "Epoch",
    "ForecastResult",
    "Horizon",
    "MarketPanel",
    "PosteriorDraw",
    "PosteriorSummary",
    "ProfileRow",
    "SeasonalModel",
    "SessionTranscript",
    "WeightDraw",
    "adjust",
    "backtest",
    "concentration",
    "delivery_period",
    "design_matrix",
    "elicit_session",
    "fit",
    "fit_seasonal",
    "flag_stale",
    "forecast_timeline",
    "ingest",
    "point_mass_profile",
    "regression_frame",
    "run_forecast",
    "sample",
    "sample_weights",
    "validate_profile",
    "__version__",
]
