"""Synthetic market generator for tests, demos and acceptance runs.

Real exchange data is proprietary, so the test surface is a generated
market whose CfD closes come from the same linear structure the engine
fits, with known coefficients. Reservoir deviations are produced with
the engine's own seasonal-adjustment path, which keeps the generating
covariates identical to the ones the engine later reconstructs; the
known coefficient vectors are then exact ground truth, not an
approximation.

``generate_market`` also fabricates one non-traded area whose true
coefficients are a known convex combination of the traded areas', the
setting the forecaster is meant to recover. ``generate_no_premium_market``
builds a market where every quote equals the expected realised spot
average by construction, so backtest differences are pure noise.
"""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np
import pandas as pd

from .forecast import delivery_period
from .market import Horizon, reservoir_deviation_daily
from .rng import as_generator

OBSERVED = ("DK1", "DK2", "FI", "NO1", "SE")
NO_HYDRO = ("DK1", "DK2")

# Roughly price-area-like coefficient scales: spot levels enter around
# 0.5, the forward with a small negative loading, reservoir deviation
# with an EUR-per-logit-unit loading of order one.
DEFAULT_BETAS = {
    "DK1": {"FW": -0.30, "SA": 0.60, "SS": -0.15},
    "DK2": {"FW": -0.28, "SA": 0.52, "SS": -0.06},
    "FI": {"FW": -0.01, "SA": 0.48, "SS": -0.43, "WA": 1.20},
    "NO1": {"FW": -0.10, "SA": 0.52, "SS": -0.45, "WA": 1.05},
    "SE": {"FW": -0.01, "SA": 0.51, "SS": -0.46, "WA": -0.90},
}

DEFAULT_SIGMA = {"DK1": 1.1, "DK2": 1.0, "FI": 0.9, "NO1": 0.8, "SE": 0.9}

DEFAULT_TARGET_WEIGHTS = {
    "FW": (0.05, 0.05, 0.05, 0.75, 0.10),
    "SA": (0.05, 0.05, 0.05, 0.80, 0.05),
    "SS": (0.05, 0.05, 0.05, 0.80, 0.05),
    "WA": (0.0, 0.0, 0.05, 0.85, 0.10),
}

AREA_SPREAD = {"DK1": 4.0, "DK2": 2.5, "FI": -1.0, "NO1": 1.0, "SE": 0.0, "NO2": 0.8}


def _ar1(rng, n, phi, sd):
    x = np.zeros(n)
    eps = rng.normal(0.0, sd, size=n)
    for i in range(1, n):
        x[i] = phi * x[i - 1] + eps[i]
    return x


def _fmt(x: float) -> str:
    return repr(float(x))


def generate_market(out_dir, *, seed: int = 20090101, start: str = "2008-01-07",
                    n_days: int = 730, horizons: tuple[Horizon, ...] = (Horizon.M1,),
                    target: str = "NO2", betas=None, sigma=None, target_weights=None,
                    redefinitions: tuple[str, ...] = ()) -> dict:
    """Write a full synthetic market to ``out_dir`` and return the ground truth.

    The truth record (also written as ``truth.json``) carries the traded
    areas' coefficient vectors, the convex weights defining the target's
    coefficients, and the implied target coefficient vector.
    """
    rng = as_generator(seed)
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    betas = dict(DEFAULT_BETAS if betas is None else betas)
    sigma = dict(DEFAULT_SIGMA if sigma is None else sigma)
    target_weights = dict(DEFAULT_TARGET_WEIGHTS if target_weights is None else target_weights)

    dates = pd.date_range(start, periods=n_days, freq="D")
    doy = dates.dayofyear.to_numpy()
    ss = 40.0 + 6.0 * np.sin(2 * np.pi * doy / 365.25) + _ar1(rng, n_days, 0.97, 1.2)
    ss = np.clip(ss, 5.0, None)

    all_areas = [*OBSERVED, target]
    sa = {}
    for code in all_areas:
        sa[code] = np.clip(ss + AREA_SPREAD[code] + _ar1(rng, n_days, 0.9, 1.0), 1.0, None)

    # Weekly reservoir fills for hydro areas, strictly inside (0, 100).
    hydro = [c for c in all_areas if c not in NO_HYDRO]
    weekly_dates = dates[::7]
    weeks = np.arange(len(weekly_dates), dtype=float)
    fills = {}
    for idx, code in enumerate(hydro):
        phase = 0.9 * idx
        latent = (0.3 + 0.9 * np.sin(2 * np.pi * weeks / 52.0 + phase)
                  + 0.25 * np.cos(4 * np.pi * weeks / 52.0)
                  + rng.normal(0.0, 0.25, size=weeks.size))
        fills[code] = pd.Series(100.0 / (1.0 + np.exp(-latent)), index=weekly_dates)

    # Reservoir deviation exactly as the engine will compute it.
    wa = {
        code: reservoir_deviation_daily(fills[code], dates, area=code)[0]
        for code in hydro
    }

    workdays = dates[dates.dayofweek < 5]
    fw = {}
    ss_series = pd.Series(ss, index=dates)
    trailing = ss_series.rolling(30, min_periods=1).mean()
    for i, h in enumerate(horizons):
        fw[h] = (trailing + 2.0 + 1.5 * i).loc[workdays]

    cfd_rows = []
    for code in OBSERVED:
        b = betas[code]
        for h in horizons:
            for day in workdays:
                x = {"FW": fw[h][day], "SA": sa[code][dates.get_loc(day)], "SS": ss[dates.get_loc(day)]}
                if "WA" in b:
                    if day not in wa[code].index:
                        continue
                    x["WA"] = wa[code][day]
                value = sum(b[cov] * x[cov] for cov in b) + rng.normal(0.0, sigma[code])
                if value <= -fw[h][day]:
                    raise AssertionError("synthetic CfD breached the positivity bound")
                cfd_rows.append((day, code, h, value))

    with open(out / "areas.csv", "w") as fh:
        fh.write("area,has_hydro,observed_cfd\n")
        for code in sorted(all_areas):
            fh.write(f"{code},{str(code not in NO_HYDRO).lower()},{str(code in OBSERVED).lower()}\n")

    with open(out / "redefinitions.csv", "w") as fh:
        fh.write("date\n")
        for d in redefinitions:
            fh.write(f"{d}\n")

    with open(out / "spot.csv", "w") as fh:
        fh.write("date,area,price\n")
        codes = sorted([*all_areas, "SYS"])
        for i, day in enumerate(dates):
            for code in codes:
                value = ss[i] if code == "SYS" else sa[code][i]
                fh.write(f"{day.date()},{code},{_fmt(value)}\n")

    with open(out / "forward.csv", "w") as fh:
        fh.write("date,horizon,price\n")
        for day in workdays:
            for h in horizons:
                fh.write(f"{day.date()},{h.value},{_fmt(fw[h][day])}\n")

    with open(out / "cfd.csv", "w") as fh:
        fh.write("date,area,horizon,price\n")
        for day, code, h, value in cfd_rows:
            fh.write(f"{day.date()},{code},{h.value},{_fmt(value)}\n")

    with open(out / "reservoir.csv", "w") as fh:
        fh.write("date,area,fill_pct\n")
        rows = []
        for code in hydro:
            for day, value in fills[code].items():
                rows.append((day, code, value))
        for day, code, value in sorted(rows):
            fh.write(f"{day.date()},{code},{_fmt(value)}\n")

    target_betas = {}
    for cov, w in target_weights.items():
        total = 0.0
        for k, code in enumerate(OBSERVED):
            if w[k] > 0:
                total += w[k] * betas[code][cov]
        target_betas[cov] = total

    truth = {
        "seed": seed,
        "observed_order": list(OBSERVED),
        "betas": betas,
        "sigma": sigma,
        "target": target,
        "target_weights": {cov: list(w) for cov, w in target_weights.items()},
        "target_betas": target_betas,
        "horizons": [h.value for h in horizons],
    }
    (out / "truth.json").write_text(json.dumps(truth, indent=2, sort_keys=True))
    return truth


def generate_no_premium_market(out_dir, *, seed: int = 7, start: str = "2008-01-01",
                               n_days: int = 1100, horizon: Horizon = Horizon.M1,
                               spot_sd: float = 3.0) -> dict:
    """Market where CfD + FW equals the expected realised spot average.

    Area spots are a deterministic seasonal path plus i.i.d. noise. Every
    forward quote is the deterministic system average over its delivery
    period and every CfD quote is the deterministic area average minus
    that forward, so quote minus realisation is pure averaging noise with
    mean zero. Quotes are only written when the delivery period is fully
    inside the generated calendar.
    """
    rng = as_generator(seed)
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)

    dates = pd.date_range(start, periods=n_days, freq="D")
    doy = dates.dayofyear.to_numpy()
    m_sys = 42.0 + 7.0 * np.sin(2 * np.pi * doy / 365.25)
    areas = {"AX": 3.0, "BX": -2.0}
    m_area = {code: m_sys + offset + 2.0 * np.cos(2 * np.pi * doy / 365.25)
              for code, offset in areas.items()}

    ss = m_sys + rng.normal(0.0, spot_sd, size=n_days)
    sa = {code: m_area[code] + rng.normal(0.0, spot_sd, size=n_days) for code in areas}

    sys_series = pd.Series(m_sys, index=dates)
    area_series = {code: pd.Series(m_area[code], index=dates) for code in areas}
    workdays = dates[dates.dayofweek < 5]

    fw_rows = []
    cfd_rows = []
    for day in workdays:
        p_start, p_end = delivery_period(day, horizon)
        if p_start < dates[0] or p_end > dates[-1]:
            continue
        window = (dates >= p_start) & (dates <= p_end)
        fw_val = float(sys_series[window].mean())
        fw_rows.append((day, fw_val))
        for code in areas:
            cfd_val = float(area_series[code][window].mean()) - fw_val
            cfd_rows.append((day, code, cfd_val))

    with open(out / "areas.csv", "w") as fh:
        fh.write("area,has_hydro,observed_cfd\n")
        for code in sorted(areas):
            fh.write(f"{code},false,true\n")

    with open(out / "redefinitions.csv", "w") as fh:
        fh.write("date\n")

    with open(out / "spot.csv", "w") as fh:
        fh.write("date,area,price\n")
        codes = sorted([*areas, "SYS"])
        for i, day in enumerate(dates):
            for code in codes:
                value = ss[i] if code == "SYS" else sa[code][i]
                fh.write(f"{day.date()},{code},{_fmt(value)}\n")

    with open(out / "forward.csv", "w") as fh:
        fh.write("date,horizon,price\n")
        for day, value in fw_rows:
            fh.write(f"{day.date()},{horizon.value},{_fmt(value)}\n")

    with open(out / "cfd.csv", "w") as fh:
        fh.write("date,area,horizon,price\n")
        for day, code, value in cfd_rows:
            fh.write(f"{day.date()},{code},{horizon.value},{_fmt(value)}\n")

    return {"areas": sorted(areas), "horizon": horizon.value, "spot_sd": spot_sd, "seed": seed}
