"""HTTP service exposing panels, posteriors, profiles, forecasts, backtests.

The service is read-only over market data: panels and posteriors are
built once from the data directory and never mutated. Only elicitation
profiles (and their derived forecasts) are writable, stored as
human-readable YAML documents, one per target area, with writes
serialized per target and a content-hash version echoed to writers.
"""

from __future__ import annotations

import threading
from pathlib import Path

from fastapi import FastAPI, HTTPException, Query
from fastapi.middleware.cors import CORSMiddleware
from fastapi.staticfiles import StaticFiles
from pydantic import BaseModel, Field

from . import elicitation, forecast as fc, pipeline
from .config import JobConfig
from .errors import EngineError
from .market import Horizon, ingest


class ProfileRowBody(BaseModel):
    rho: list[float]
    months: float


class ProfileBody(BaseModel):
    observed_order: list[str]
    rows: dict[str, ProfileRowBody]
    transcript: dict | None = None


class ForecastRequest(BaseModel):
    target: str
    horizon: str
    n_draws: int | None = Field(default=None, ge=1)
    seed: int | None = None
    levels: list[float] | None = None
    include_draws: bool = False


class ProfileStore:
    """Directory of canonical profile documents, one YAML file per target."""

    def __init__(self, root: Path, areas):
        self.root = Path(root)
        self.root.mkdir(parents=True, exist_ok=True)
        self.areas = areas
        self._registry_lock = threading.Lock()
        self._locks: dict[str, threading.Lock] = {}

    def _lock_for(self, target: str) -> threading.Lock:
        with self._registry_lock:
            return self._locks.setdefault(target, threading.Lock())

    def path_for(self, target: str) -> Path:
        return self.root / f"{target}.yaml"

    def put(self, profile: elicitation.ElicitationProfile):
        normalized = elicitation.validate_profile(profile, self.areas)
        with self._lock_for(normalized.target):
            elicitation.save_profile(normalized, self.path_for(normalized.target))
        return normalized, normalized.content_hash()

    def get(self, target: str):
        path = self.path_for(target)
        if not path.exists():
            return None
        with self._lock_for(target):
            profile = elicitation.load_profile(path, self.areas)
        return profile, profile.content_hash()


def _parse_horizon(value: str) -> Horizon:
    try:
        return Horizon(value)
    except ValueError:
        raise HTTPException(
            status_code=400,
            detail={"error": "service-cli/config",
                    "message": f"unknown horizon {value!r}"},
        )


def create_app(config: JobConfig, ui_dir=None) -> FastAPI:
    panel = ingest(config.data_dir)
    profiles_dir = config.profiles_dir or (config.data_dir / "profiles")
    store = ProfileStore(profiles_dir, panel.areas)

    fits_cache: dict[Horizon, dict] = {}
    fits_lock = threading.Lock()

    def fits_for(horizon: Horizon) -> dict:
        with fits_lock:
            if horizon not in fits_cache:
                fits, _ = pipeline.fit_all(panel, (horizon,), drop_stale=config.drop_stale)
                fits_cache[horizon] = fits
            return fits_cache[horizon]

    app = FastAPI(title="cfdcast", version="0.1.0")
    app.add_middleware(
        CORSMiddleware, allow_origins=["*"], allow_methods=["*"], allow_headers=["*"]
    )

    @app.exception_handler(EngineError)
    async def engine_error_handler(request, exc: EngineError):
        from fastapi.responses import JSONResponse

        return JSONResponse(status_code=400,
                            content={"error": exc.code, "message": str(exc)})

    @app.get("/areas")
    def get_areas():
        return [
            {"code": a.code, "has_hydro": a.has_hydro, "observed_cfd": a.observed_cfd}
            for _, a in sorted(panel.areas.items())
        ]

    @app.get("/panel/summary")
    def get_panel_summary():
        return panel.summary()

    @app.get("/posteriors")
    def get_posteriors(area: str = Query(...), horizon: str = Query(...)):
        if area not in panel.areas:
            raise HTTPException(404, detail={"error": "market-data/invariant",
                                             "message": f"unknown area {area!r}"})
        h = _parse_horizon(horizon)
        records = [
            summary.to_record()
            for (code, hv, _), summary in sorted(fits_for(h).items())
            if code == area and hv == h.value
        ]
        return {"area": area, "horizon": h.value, "posteriors": records}

    @app.get("/cfd")
    def get_cfd_series(area: str = Query(...), horizon: str = Query(...)):
        """Recorded CfD closes for a traded area, for chart overlays."""
        if area not in panel.areas:
            raise HTTPException(404, detail={"error": "market-data/invariant",
                                             "message": f"unknown area {area!r}"})
        h = _parse_horizon(horizon)
        series = panel.cfd.get((area, h))
        if series is None:
            raise HTTPException(404, detail={"error": "market-data/insufficient-data",
                                             "message": f"no CfD quotes for {area}/{h.value}"})
        return {
            "area": area,
            "horizon": h.value,
            "dates": [str(d.date()) for d in series.index],
            "prices": [float(v) for v in series.to_numpy()],
        }

    @app.put("/profiles/{target}")
    def put_profile(target: str, body: ProfileBody):
        if target not in panel.areas:
            raise HTTPException(404, detail={"error": "elicitation/invalid-profile",
                                             "message": f"unknown area {target!r}"})
        profile = elicitation.ElicitationProfile(
            target=target,
            observed_order=tuple(body.observed_order),
            rows={cov: elicitation.ProfileRow(rho=row.rho, months=row.months)
                  for cov, row in body.rows.items()},
            transcript=body.transcript,
        )
        normalized, version = store.put(profile)
        return {"profile": normalized.canonical_dict(), "version": version}

    @app.get("/profiles/{target}")
    def get_profile(target: str):
        found = store.get(target)
        if found is None:
            raise HTTPException(404, detail={"error": "elicitation/invalid-profile",
                                             "message": f"no stored profile for {target!r}"})
        profile, version = found
        return {"profile": profile.canonical_dict(), "version": version}

    def _forecast(target: str, horizon: Horizon, n_draws: int, seed: int,
                  levels, include_draws: bool):
        found = store.get(target)
        if found is None:
            raise HTTPException(404, detail={"error": "elicitation/invalid-profile",
                                             "message": f"no stored profile for {target!r}"})
        profile, _ = found
        by_epoch = pipeline.posteriors_by_epoch(fits_for(horizon), horizon)
        return fc.forecast_timeline(
            panel, by_epoch, profile, horizon, n_draws, seed, levels,
            days_per_month=config.days_per_month, noise=config.noise,
            workers=config.workers, keep_draws=include_draws,
        )

    @app.post("/forecast")
    def post_forecast(body: ForecastRequest):
        if body.target not in panel.areas:
            raise HTTPException(404, detail={"error": "market-data/invariant",
                                             "message": f"unknown area {body.target!r}"})
        horizon = _parse_horizon(body.horizon)
        n_draws = body.n_draws or config.n_draws
        seed = config.seed if body.seed is None else body.seed
        levels = tuple(body.levels) if body.levels else config.levels
        result = _forecast(body.target, horizon, n_draws, seed, levels, body.include_draws)
        payload = {
            "target": result.target,
            "horizon": result.horizon.value,
            "dates": [str(d.date()) for d in result.dates],
            "mean": [float(v) for v in result.mean],
            "quantiles": {repr(level): [float(v) for v in values]
                          for level, values in sorted(result.quantiles.items())},
            "n_draws": result.n_draws,
            "provenance": result.provenance.to_dict(),
        }
        if body.include_draws and result.draws is not None:
            cap = min(config.max_draw_export, result.draws.shape[0])
            payload["draws"] = [[float(v) for v in row] for row in result.draws[:cap]]
            payload["draws_truncated"] = bool(cap < result.draws.shape[0])
        return payload

    @app.get("/backtest")
    def get_backtest(area: str = Query(...), horizon: str = Query(...)):
        if area not in panel.areas:
            raise HTTPException(404, detail={"error": "market-data/invariant",
                                             "message": f"unknown area {area!r}"})
        h = _parse_horizon(horizon)
        if panel.areas[area].observed_cfd:
            records = fc.backtest(panel, h, area=area)
        else:
            result = _forecast(area, h, config.n_draws, config.seed, config.levels, False)
            records = fc.backtest(panel, h, forecast=result)
        return {
            "area": area,
            "horizon": h.value,
            "records": [
                {
                    "area": r.area,
                    "horizon": r.horizon.value,
                    "period_start": str(r.period_start.date()),
                    "period_end": str(r.period_end.date()),
                    "quote_date": str(r.quote_date.date()),
                    "quote": r.quote,
                    "realised": r.realised,
                    "difference": r.difference,
                }
                for r in records
            ],
        }

    if ui_dir is not None and Path(ui_dir).is_dir():
        app.mount("/ui", StaticFiles(directory=str(ui_dir), html=True), name="ui")

    return app
