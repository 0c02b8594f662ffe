"""Glue between the panel and the fitted posteriors.

Fits the per-area regressions for every (traded area, horizon, epoch)
cell that has enough data, and renders coefficient tables in the
conventional report layout: one block per horizon, coefficient rows,
one column per traded area, NA where an area has no reservoir
coefficient.
"""

from __future__ import annotations

import logging

from . import posterior
from .errors import InsufficientDataError, RankDeficiencyError
from .market import (
    COV_FW,
    COV_SA,
    COV_SS,
    COV_WA,
    Horizon,
    MarketPanel,
    regression_frame,
)

logger = logging.getLogger(__name__)

TABLE_ROW_ORDER = (COV_SA, COV_SS, COV_FW, COV_WA)

FitKey = "tuple[str, str, str]"  # (area, horizon value, epoch id)


def fit_all(panel: MarketPanel, horizons=None, *, drop_stale: bool = False,
            cond_threshold: float = posterior.DEFAULT_COND_THRESHOLD):
    """Fit every traded area x horizon x epoch with available data.

    Returns (fits, skipped): fits maps (area, horizon value, epoch id) to
    a PosteriorSummary; skipped lists (key, reason) for cells that could
    not be fitted, which is expected for short definition periods.
    """
    if horizons is None:
        horizons = sorted({h for (_, h) in panel.cfd}, key=lambda h: h.value)
    fits: dict[tuple[str, str, str], posterior.PosteriorSummary] = {}
    skipped: list[tuple[tuple[str, str, str], str]] = []
    for area in panel.observed_areas():
        for horizon in horizons:
            if (area, horizon) not in panel.cfd:
                continue
            for epoch in panel.epochs():
                key = (area, horizon.value, epoch.id)
                try:
                    X, y, names, _ = regression_frame(
                        panel, area, horizon, epoch, drop_stale=drop_stale
                    )
                    fits[key] = posterior.fit(
                        X, y, covariate_names=names, area=area,
                        horizon=horizon.value, epoch_id=epoch.id,
                        cond_threshold=cond_threshold,
                    )
                except (InsufficientDataError, RankDeficiencyError) as exc:
                    skipped.append((key, str(exc)))
                    logger.info("fit skipped for %s: %s", key, exc)
    return fits, skipped


def posteriors_for_epoch(fits, horizon: Horizon, epoch_id: str) -> dict:
    """area -> PosteriorSummary for one (horizon, epoch) slice."""
    return {
        area: summary
        for (area, h, ep), summary in fits.items()
        if h == horizon.value and ep == epoch_id
    }


def posteriors_by_epoch(fits, horizon: Horizon) -> dict:
    """epoch id -> {area -> PosteriorSummary} for one horizon."""
    out: dict[str, dict] = {}
    for (area, h, ep), summary in fits.items():
        if h == horizon.value:
            out.setdefault(ep, {})[area] = summary
    return out


def coefficient_table(fits, horizon: Horizon, epoch_id: str, area_order,
                      *, decimals: int = 3) -> str:
    """One report block: horizon in the corner, areas across, betas down.

    Coefficients are rounded to ``decimals`` places; areas whose model
    lacks a covariate show NA in that cell.
    """
    slice_ = posteriors_for_epoch(fits, horizon, epoch_id)
    lines = [",".join([horizon.value, *area_order])]
    for cov in TABLE_ROW_ORDER:
        cells = [f"beta_{cov}"]
        for area in area_order:
            summary = slice_.get(area)
            if summary is None or cov not in summary.covariate_names:
                cells.append("NA")
            else:
                value = summary.beta_hat[summary.covariate_names.index(cov)]
                cells.append(f"{value:.{decimals}f}")
        lines.append(",".join(cells))
    return "\n".join(lines) + "\n"


def render_tables(panel: MarketPanel, fits, horizons=None) -> str:
    """All blocks for all horizons and epochs, epoch id noted above each."""
    if horizons is None:
        horizons = sorted({Horizon(h) for (_, h, _) in fits}, key=lambda h: h.value)
    area_order = panel.observed_areas()
    blocks = []
    for horizon in horizons:
        for epoch in panel.epochs():
            if not posteriors_for_epoch(fits, horizon, epoch.id):
                continue
            blocks.append(f"# epoch: {epoch.id}\n"
                          + coefficient_table(fits, horizon, epoch.id, area_order))
    return "\n".join(blocks)
