"""Monte Carlo prediction of CfD prices for non-traded areas.

One iteration of the sampler:

  1. draw one weight vector per covariate from the elicitation profile's
     Dirichlets, and one joint coefficient vector per traded area from
     its regression posterior (preserving within-area correlation);
  2. combine them into coefficients for the target area,
     beta_j = sum_k w_kj * beta_kj, and evaluate the predicted mean CfD
     mu_t = sum_j beta_j * x_jt on every requested day.

Weight and coefficient draws are shared across all days within an
iteration, so the day-to-day path of each sample is internally
consistent. N iterations give N samples of the predicted mean per day;
bands are empirical quantiles over those samples. The band describes
the predicted *mean* CfD: no observation noise is added unless the
opt-in noise mode is enabled, because there is no residual variance to
estimate for an area that was never traded.

Every iteration runs on its own child stream derived from the master
seed, so results are bit-identical across runs and across worker
counts.
"""

from __future__ import annotations

import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from datetime import date as _date
from pathlib import Path

import numpy as np
import pandas as pd

from . import elicitation
from .elicitation import DEFAULT_DAYS_PER_MONTH, ElicitationProfile
from .errors import (
    ForecastError,
    MissingCovariateError,
    MissingPosteriorError,
)
from .market import Horizon, MarketPanel, design_matrix
from .rng import as_seed_sequence

logger = logging.getLogger(__name__)

DEFAULT_LEVELS = (0.025, 0.5, 0.975)


def empirical_quantile(sorted_values: np.ndarray, level: float) -> np.ndarray:
    """Nearest-rank quantile on pre-sorted values (axis 0)."""
    n = sorted_values.shape[0]
    idx = max(int(math.ceil(level * n)), 1) - 1
    return sorted_values[idx]


def check_levels(levels) -> tuple[float, ...]:
    levels = tuple(float(v) for v in levels)
    if not levels:
        raise ForecastError("need at least one quantile level")
    if any(not (0.0 < v < 1.0) for v in levels):
        raise ForecastError("quantile levels must lie strictly inside (0, 1)")
    if any(b <= a for a, b in zip(levels, levels[1:])):
        raise ForecastError("quantile levels must be strictly increasing")
    return levels


@dataclass(frozen=True)
class Provenance:
    """Everything needed to reproduce a forecast bit for bit."""

    profile_hash: str
    epoch_ids: tuple[str, ...]
    seed: int
    n_draws: int
    levels: tuple[float, ...]
    noise: bool
    days_per_month: float

    def to_dict(self) -> dict:
        return {
            "profile_hash": self.profile_hash,
            "epoch_ids": list(self.epoch_ids),
            "seed": self.seed,
            "n_draws": self.n_draws,
            "levels": list(self.levels),
            "noise": self.noise,
            "days_per_month": self.days_per_month,
        }


@dataclass
class ForecastResult:
    target: str
    horizon: Horizon
    dates: pd.DatetimeIndex
    mean: np.ndarray
    quantiles: dict[float, np.ndarray]
    n_draws: int
    provenance: Provenance
    draws: np.ndarray | None = None  # (n_draws, n_dates), iteration order

    def __post_init__(self):
        if not np.all(np.isfinite(self.mean)):
            raise ForecastError("forecast mean is not finite")
        stacked = np.vstack([self.quantiles[v] for v in sorted(self.quantiles)])
        if np.any(np.diff(stacked, axis=0) < 0):
            raise ForecastError("quantiles are not ordered")

    def to_frame(self) -> pd.DataFrame:
        data = {"date": [str(d.date()) for d in self.dates], "mean": self.mean}
        for level in sorted(self.quantiles):
            data[f"q{level * 100:g}"] = self.quantiles[level]
        data["n_draws"] = self.n_draws
        return pd.DataFrame(data)

    def to_csv(self, path) -> None:
        with open(Path(path), "w") as fh:
            levels = sorted(self.quantiles)
            fh.write("date,mean," + ",".join(f"q{v * 100:g}" for v in levels) + ",n_draws\n")
            for i, day in enumerate(self.dates):
                cells = [str(day.date()), repr(float(self.mean[i]))]
                cells += [repr(float(self.quantiles[v][i])) for v in levels]
                cells.append(str(self.n_draws))
                fh.write(",".join(cells) + "\n")


class _AreaTask:
    """Per-area precomputation for the iteration loop: the means, the
    Cholesky factor of (X'X)^-1, and where each coefficient lands in the
    target covariate order."""

    __slots__ = ("position", "code", "beta_hat", "chol", "s2", "dof", "target_col",
                 "source_col")

    def __init__(self, position, code, summary, target_names, profile):
        self.position = position
        self.code = code
        self.beta_hat = summary.beta_hat
        self.chol = np.linalg.cholesky(summary.xtx_inv) if summary.s2 > 0 else None
        self.s2 = summary.s2
        self.dof = summary.dof
        target_col = []
        source_col = []
        for j, cov in enumerate(target_names):
            if profile.rows[cov].rho[position] > 0:
                if cov not in summary.covariate_names:
                    raise MissingPosteriorError(
                        f"area {code} carries weight on {cov} but its model has no such covariate"
                    )
                target_col.append(j)
                source_col.append(summary.covariate_names.index(cov))
        self.target_col = np.array(target_col, dtype=int)
        self.source_col = np.array(source_col, dtype=int)


def _area_tasks(profile: ElicitationProfile, posteriors, target_names) -> list[_AreaTask]:
    tasks = []
    for k, code in enumerate(profile.observed_order):
        if not any(row.rho[k] > 0 for row in profile.rows.values()):
            continue
        summary = posteriors.get(code)
        if summary is None:
            raise MissingPosteriorError(
                f"no posterior for traded area {code}, which carries positive weight"
            )
        tasks.append(_AreaTask(k, code, summary, target_names, profile))
    return tasks


def simulate_mean_draws(X: np.ndarray, names: tuple[str, ...],
                        profile: ElicitationProfile, posteriors, n_draws: int, seed, *,
                        days_per_month: float = DEFAULT_DAYS_PER_MONTH,
                        noise: bool = False, workers: int = 1) -> np.ndarray:
    """The sampler core: an (n_draws, n_dates) matrix of predicted means.

    Row i is one iteration: fresh weight vectors, fresh coefficient draws,
    evaluated on every row of X. Each iteration consumes its own child
    stream of the master seed in a fixed order (covariate rows, then areas,
    then optional noise), so the matrix is reproducible bit for bit for any
    worker count.
    """
    if n_draws < 1:
        raise ForecastError("n_draws must be at least 1")
    X = np.asarray(X, dtype=float)
    n_dates = X.shape[0]
    for cov in names:
        if cov not in profile.rows:
            raise MissingCovariateError(f"profile has no similarity row for covariate {cov}")

    # Per covariate row: positive-alpha subvector and its embedding.
    alpha_pos: list[np.ndarray] = []
    embed: list[np.ndarray] = []
    for cov in names:
        row = profile.rows[cov]
        alpha = elicitation.concentration(row.rho, row.months, days_per_month)
        pos = np.flatnonzero(alpha > 0)
        if pos.size == 0:
            raise ForecastError(f"profile row {cov} has no positive weight")
        alpha_pos.append(alpha[pos])
        embed.append(pos)

    tasks = _area_tasks(profile, posteriors, names)
    q = len(profile.observed_order)
    rho_mix = np.mean([profile.rows[cov].rho for cov in names], axis=0)
    cum_rho = np.cumsum(rho_mix / rho_mix.sum())
    children = as_seed_sequence(seed).spawn(n_draws)
    mu = np.empty((n_draws, n_dates))
    p_cov = len(names)

    def one_iteration(i: int) -> None:
        rng = np.random.default_rng(children[i])
        w = np.zeros((p_cov, q))
        for j in range(p_cov):
            if alpha_pos[j].size == 1:
                w[j, embed[j][0]] = 1.0
                continue
            g = rng.gamma(alpha_pos[j])
            total = g.sum()
            while total == 0.0:  # all shapes tiny and every variate underflowed
                g = rng.gamma(alpha_pos[j])
                total = g.sum()
            w[j, embed[j]] = g / total
        beta_tilde = np.zeros(p_cov)
        sigma2_by_pos = {}
        for task in tasks:
            if task.chol is None:
                beta = task.beta_hat
                sigma2_by_pos[task.position] = 0.0
            else:
                chi = rng.chisquare(task.dof)
                sigma2 = task.dof * task.s2 / chi
                z = rng.standard_normal(task.beta_hat.shape[0])
                beta = task.beta_hat + math.sqrt(sigma2) * (task.chol @ z)
                sigma2_by_pos[task.position] = sigma2
            beta_tilde[task.target_col] += (
                w[task.target_col, task.position] * beta[task.source_col]
            )
        row = X @ beta_tilde
        if noise:
            pick = int(np.searchsorted(cum_rho, rng.random()))
            sigma2 = sigma2_by_pos.get(pick, 0.0)
            if sigma2 > 0.0:
                row = row + math.sqrt(sigma2) * rng.standard_normal(n_dates)
        mu[i] = row

    if workers <= 1:
        for i in range(n_draws):
            one_iteration(i)
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            list(pool.map(one_iteration, range(n_draws)))
    return mu


def run_forecast(panel: MarketPanel, posteriors, profile: ElicitationProfile,
                 horizon: Horizon, n_draws: int, seed, levels=DEFAULT_LEVELS, *,
                 epoch=None, days_per_month: float = DEFAULT_DAYS_PER_MONTH,
                 noise: bool = False, workers: int = 1,
                 keep_draws: bool = False) -> ForecastResult:
    """Predictive distribution of the mean CfD for one area over one epoch.

    ``posteriors`` maps traded-area code -> PosteriorSummary fitted on the
    same epoch. Every area with positive weight anywhere in the profile
    must have one. ``seed`` and ``n_draws`` fully determine the result.
    """
    levels = check_levels(levels)
    if epoch is None:
        if len(panel.epochs()) != 1:
            raise ForecastError("panel has several epochs; pass the one to forecast")
        epoch = panel.epochs()[0]
    design = design_matrix(panel, profile.target, horizon, epoch)
    mu = simulate_mean_draws(design.X, design.names, profile, posteriors, n_draws, seed,
                             days_per_month=days_per_month, noise=noise, workers=workers)
    mean = mu.mean(axis=0)
    if keep_draws:
        draws = mu.copy()
    else:
        draws = None
    mu.sort(axis=0)
    quantiles = {v: empirical_quantile(mu, v).copy() for v in levels}

    if isinstance(seed, np.random.SeedSequence):
        seed_int = int(seed.entropy) if isinstance(seed.entropy, int) else -1
    else:
        seed_int = int(seed)
    if hasattr(epoch, "id"):
        epoch_id = epoch.id
    else:
        epoch_id = f"{pd.Timestamp(epoch[0]).date()}..{pd.Timestamp(epoch[1]).date()}"
    prov = Provenance(
        profile_hash=profile.content_hash(),
        epoch_ids=(epoch_id,),
        seed=seed_int,
        n_draws=n_draws,
        levels=levels,
        noise=noise,
        days_per_month=days_per_month,
    )
    return ForecastResult(
        target=profile.target,
        horizon=horizon,
        dates=design.dates,
        mean=mean,
        quantiles=quantiles,
        n_draws=n_draws,
        provenance=prov,
        draws=draws,
    )


def forecast_timeline(panel: MarketPanel, posteriors_by_epoch, profile: ElicitationProfile,
                      horizon: Horizon, n_draws: int, seed, levels=DEFAULT_LEVELS, *,
                      days_per_month: float = DEFAULT_DAYS_PER_MONTH, noise: bool = False,
                      workers: int = 1, keep_draws: bool = False) -> ForecastResult:
    """Stitch per-epoch forecasts over the whole panel timeline.

    ``posteriors_by_epoch`` maps epoch id -> {area -> PosteriorSummary}.
    Each epoch runs on its own child of the master seed; epochs with no
    posteriors or no target covariates are skipped with a log line, since
    short definition periods may simply have no usable data.
    """
    epochs = panel.epochs()
    masters = as_seed_sequence(seed).spawn(len(epochs))
    parts: list[ForecastResult] = []
    used: list[str] = []
    for i, ep in enumerate(epochs):
        fits = posteriors_by_epoch.get(ep.id)
        if not fits:
            logger.info("skipping epoch %s: no posteriors", ep.id)
            continue
        parts.append(
            run_forecast(panel, fits, profile, horizon, n_draws, masters[i], levels,
                         epoch=ep, days_per_month=days_per_month, noise=noise,
                         workers=workers, keep_draws=keep_draws)
        )
        used.append(ep.id)
    if not parts:
        raise ForecastError("no epoch produced a forecast")
    dates = parts[0].dates
    for part in parts[1:]:
        dates = dates.append(part.dates)
    prov = Provenance(
        profile_hash=profile.content_hash(),
        epoch_ids=tuple(used),
        seed=int(seed) if not isinstance(seed, np.random.SeedSequence) else -1,
        n_draws=n_draws,
        levels=check_levels(levels),
        noise=noise,
        days_per_month=days_per_month,
    )
    return ForecastResult(
        target=profile.target,
        horizon=horizon,
        dates=dates,
        mean=np.concatenate([p.mean for p in parts]),
        quantiles={
            v: np.concatenate([p.quantiles[v] for p in parts]) for v in parts[0].quantiles
        },
        n_draws=n_draws,
        provenance=prov,
        draws=np.hstack([p.draws for p in parts]) if keep_draws else None,
    )


# ---------------------------------------------------------------------------
# Delivery calendar and backtest
# ---------------------------------------------------------------------------

def _month_start(year: int, month: int, shift: int) -> tuple[int, int]:
    total = year * 12 + (month - 1) + shift
    return total // 12, total % 12 + 1


def delivery_period(quote_date, horizon: Horizon) -> tuple[pd.Timestamp, pd.Timestamp]:
    """Inclusive delivery window for a contract quoted on ``quote_date``.

    M1/M2 deliver over the next one/two full calendar months, Q1-Q3 over
    the next full calendar quarters, Y1-Y3 over the next calendar years.
    Pure calendar arithmetic; no exchange holiday logic.
    """
    ts = pd.Timestamp(quote_date)
    kind, steps = horizon.value[0], int(horizon.value[1])
    if kind == "M":
        y, m = _month_start(ts.year, ts.month, steps)
        y2, m2 = _month_start(y, m, 1)
    elif kind == "Q":
        quarter_month = 3 * ((ts.month - 1) // 3) + 1
        y, m = _month_start(ts.year, quarter_month, 3 * steps)
        y2, m2 = _month_start(y, m, 3)
    else:
        y, m = ts.year + steps, 1
        y2, m2 = y + 1, 1
    start = pd.Timestamp(_date(y, m, 1))
    end = pd.Timestamp(_date(y2, m2, 1)) - pd.Timedelta(days=1)
    return start, end


@dataclass(frozen=True)
class BacktestRecord:
    """Quoted (or predicted) area forward versus what the spot then averaged."""

    area: str
    horizon: Horizon
    period_start: pd.Timestamp
    period_end: pd.Timestamp
    quote_date: pd.Timestamp
    quote: float         # CfD + FW at the reference date
    realised: float      # mean daily area spot over the delivery period
    difference: float    # quote - realised; zero when no premium and no surprise

    def __post_init__(self):
        if self.period_end <= self.period_start:
            raise ForecastError("delivery period end must come after its start")


def backtest(panel: MarketPanel, horizon: Horizon, *, area: str | None = None,
             forecast: ForecastResult | None = None) -> list[BacktestRecord]:
    """Compare CfD + FW against the realised average area spot per contract.

    Quotes come either from the panel's observed CfD closes (``area``) or
    from a forecast's predicted means (``forecast``). For each delivery
    period implied by the quote calendar, the reference quote is the last
    one before delivery starts; the realised value averages the daily area
    spot over the period, using only days with spot data. Periods without
    any spot coverage are skipped with a log line.
    """
    if (area is None) == (forecast is None):
        raise ForecastError("pass exactly one of area= or forecast=")
    if forecast is not None:
        if forecast.horizon != horizon:
            raise ForecastError(
                f"forecast is for horizon {forecast.horizon}, backtest asked for {horizon}"
            )
        quotes = pd.Series(forecast.mean, index=forecast.dates)
        code = forecast.target
    else:
        series = panel.cfd.get((area, horizon))
        if series is None or series.empty:
            raise ForecastError(f"no CfD quotes for {area}/{horizon}")
        quotes = series
        code = area
    if code not in panel.sa:
        raise ForecastError(f"no spot series for area {code}")
    fw = panel.fw.get(horizon)
    if fw is None or fw.empty:
        raise ForecastError(f"no forward series for horizon {horizon}")

    spot = panel.sa[code]
    by_period: dict[tuple[pd.Timestamp, pd.Timestamp], pd.Timestamp] = {}
    for day in quotes.index:
        if day not in fw.index:
            continue
        period = delivery_period(day, horizon)
        prev = by_period.get(period)
        if prev is None or day > prev:
            by_period[period] = day

    records: list[BacktestRecord] = []
    for (start, end), ref in sorted(by_period.items()):
        window = spot[(spot.index >= start) & (spot.index <= end)]
        if window.empty:
            logger.info("backtest: no spot data in %s..%s for %s, skipped",
                        start.date(), end.date(), code)
            continue
        quote = float(quotes[ref] + fw[ref])
        realised = float(window.mean())
        records.append(
            BacktestRecord(
                area=code,
                horizon=horizon,
                period_start=start,
                period_end=end,
                quote_date=ref,
                quote=quote,
                realised=realised,
                difference=quote - realised,
            )
        )
    return records


def backtest_to_csv(records: list[BacktestRecord], path) -> None:
    with open(Path(path), "w") as fh:
        fh.write("area,horizon,period_start,period_end,quote_date,quote,realised,difference\n")
        for r in records:
            fh.write(
                f"{r.area},{r.horizon.value},{r.period_start.date()},{r.period_end.date()},"
                f"{r.quote_date.date()},{r.quote!r},{r.realised!r},{r.difference!r}\n"
            )
