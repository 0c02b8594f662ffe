"""Market data ingestion and panel assembly.

The engine consumes five daily series: CfD closes per traded area and
horizon, system forward prices per horizon, area spot prices, the
system spot price, and seasonally adjusted reservoir deviations for
hydro areas. ``ingest`` reads them from CSV, aligns everything on the
intersection of the daily spot calendars, and rejects rows that break
the panel invariants (one diagnostic per rejected row). CfD and
forward series keep their working-day gaps: nothing is interpolated or
filled, because fabricated prices would leak into the residual
variance.

CSV schemas (header row required, comma separated, '.' decimals,
ISO-8601 dates):

    spot.csv:          date,area,price          area "SYS" is the system spot
    forward.csv:       date,horizon,price
    cfd.csv:           date,area,horizon,price
    reservoir.csv:     date,area,fill_pct       0 < fill_pct < 100
    areas.csv:         area,has_hydro,observed_cfd   (true/false)
    redefinitions.csv: date

An optional ``reservoir_map.csv`` (area,source) points an area at
another area's reservoir series when zone boundaries moved and the
historical statistics live under a different code. Without it the
mapping is the identity; the engine never guesses.

Transmission operators occasionally redefine the price zones. Each
redefinition date starts a new *epoch*, and regression data must never
straddle one: a zone with different borders is a different price
process. ``MarketPanel.epochs`` exposes the segmentation.
"""

from __future__ import annotations

import csv
import enum
import logging
from dataclasses import dataclass, field
from datetime import date as _date
from pathlib import Path

import numpy as np
import pandas as pd

from . import seasonal
from .errors import (
    DuplicateKeyError,
    EpochError,
    IngestError,
    InsufficientDataError,
    MalformedRowError,
    PanelInvariantError,
)

logger = logging.getLogger(__name__)

SYSTEM_AREA = "SYS"

COV_FW = "FW"
COV_SA = "SA"
COV_SS = "SS"
COV_WA = "WA"


class Horizon(enum.Enum):
    """Relative delivery period of a contract: front months, quarters, years."""

    M1 = "M1"
    M2 = "M2"
    Q1 = "Q1"
    Q2 = "Q2"
    Q3 = "Q3"
    Y1 = "Y1"
    Y2 = "Y2"
    Y3 = "Y3"

    def __str__(self) -> str:
        return self.value


HORIZONS: tuple[Horizon, ...] = tuple(Horizon)
_HORIZON_ORDER = {h: i for i, h in enumerate(HORIZONS)}


@dataclass(frozen=True)
class Area:
    code: str
    has_hydro: bool
    observed_cfd: bool

    def __post_init__(self):
        if not self.code:
            raise PanelInvariantError("area code must be non-empty")


def covariate_names(area: Area) -> tuple[str, ...]:
    """Model covariates for an area: reservoir deviation only where hydro exists."""
    if area.has_hydro:
        return (COV_FW, COV_SA, COV_SS, COV_WA)
    return (COV_FW, COV_SA, COV_SS)


@dataclass(frozen=True)
class Epoch:
    """One area-definition period, inclusive on both ends."""

    start: pd.Timestamp
    end: pd.Timestamp

    @property
    def id(self) -> str:
        return f"{self.start.date()}..{self.end.date()}"

    def contains(self, ts: pd.Timestamp) -> bool:
        return self.start <= ts <= self.end


@dataclass(frozen=True)
class RowDiagnostic:
    source: str
    line: int
    reason: str

    def __str__(self) -> str:
        return f"{self.source}:{self.line}: {self.reason}"


@dataclass(frozen=True)
class DesignMatrix:
    X: np.ndarray
    names: tuple[str, ...]
    dates: pd.DatetimeIndex
    dropped: pd.DatetimeIndex


@dataclass
class MarketPanel:
    """Aligned daily panel of all series, immutable after construction."""

    dates: pd.DatetimeIndex
    areas: dict[str, Area]
    cfd: dict[tuple[str, Horizon], pd.Series]
    fw: dict[Horizon, pd.Series]
    sa: dict[str, pd.Series]
    ss: pd.Series
    wa: dict[str, pd.Series]
    reservoir_fill: dict[str, pd.Series]
    redefinitions: tuple[pd.Timestamp, ...]
    stale: dict[tuple[str, Horizon], pd.Series] = field(default_factory=dict)
    seasonal_models: dict[str, seasonal.SeasonalModel] = field(default_factory=dict)
    reservoir_map: dict[str, str] = field(default_factory=dict)
    diagnostics: list[RowDiagnostic] = field(default_factory=list)

    def __post_init__(self):
        self._validate()

    def _validate(self):
        d = self.dates
        if len(d) == 0:
            raise PanelInvariantError("panel has no dates")
        if not d.is_monotonic_increasing or d.has_duplicates:
            raise PanelInvariantError("panel dates must be strictly increasing")
        dateset = set(d)
        if not set(self.ss.index).issubset(dateset):
            raise PanelInvariantError("system spot keyed outside panel dates")
        for code, s in self.sa.items():
            if not set(s.index).issubset(dateset):
                raise PanelInvariantError(f"area spot for {code} keyed outside panel dates")
        for h, s in self.fw.items():
            if not set(s.index).issubset(dateset):
                raise PanelInvariantError(f"forward series {h} keyed outside panel dates")
        for (code, h), s in self.cfd.items():
            fw = self.fw.get(h)
            if fw is None:
                raise PanelInvariantError(f"CfD series {code}/{h} has no forward series")
            joint = fw.reindex(s.index)
            if joint.isna().any():
                raise PanelInvariantError(f"CfD entry for {code}/{h} without forward price")
            if not ((s + joint) > 0).all():
                raise PanelInvariantError(
                    f"CfD series {code}/{h} violates positivity of the area forward price"
                )
        for code, area in self.areas.items():
            if area.has_hydro != (code in self.wa):
                raise PanelInvariantError(
                    f"reservoir deviation series must be present iff the area has hydro: {code}"
                )

    def epochs(self) -> tuple[Epoch, ...]:
        """Definition periods covering the panel, split at redefinition dates."""
        cuts = [d for d in self.redefinitions if self.dates[0] < d <= self.dates[-1]]
        bounds = [self.dates[0], *cuts, self.dates[-1] + pd.Timedelta(days=1)]
        out = []
        for lo, hi in zip(bounds[:-1], bounds[1:]):
            out.append(Epoch(start=lo, end=hi - pd.Timedelta(days=1)))
        return tuple(out)

    def epoch_of(self, ts) -> Epoch:
        ts = pd.Timestamp(ts)
        for ep in self.epochs():
            if ep.contains(ts):
                return ep
        raise EpochError(f"{ts.date()} lies outside the panel date range")

    def observed_areas(self) -> tuple[str, ...]:
        return tuple(sorted(c for c, a in self.areas.items() if a.observed_cfd))

    def unobserved_areas(self) -> tuple[str, ...]:
        return tuple(sorted(c for c, a in self.areas.items() if not a.observed_cfd))

    def summary(self) -> dict:
        """Coverage overview for the service API."""
        return {
            "start": str(self.dates[0].date()),
            "end": str(self.dates[-1].date()),
            "n_dates": int(len(self.dates)),
            "epochs": [ep.id for ep in self.epochs()],
            "redefinitions": [str(d.date()) for d in self.redefinitions],
            "areas": {
                code: {"has_hydro": a.has_hydro, "observed_cfd": a.observed_cfd}
                for code, a in sorted(self.areas.items())
            },
            "coverage": {
                "cfd": {f"{c}/{h.value}": int(s.size) for (c, h), s in sorted(
                    self.cfd.items(), key=lambda kv: (kv[0][0], _HORIZON_ORDER[kv[0][1]])
                )},
                "forward": {h.value: int(s.size) for h, s in sorted(
                    self.fw.items(), key=lambda kv: _HORIZON_ORDER[kv[0]]
                )},
                "reservoir": {c: int(s.size) for c, s in sorted(self.wa.items())},
            },
            "n_diagnostics": len(self.diagnostics),
        }

    def export(self, out_dir) -> None:
        export_panel(self, out_dir)


def flag_stale(cfd_series: pd.Series) -> pd.Series:
    """True where a close exactly repeats the previous working day's close.

    A repeated close may be a genuine trade at the same price or no trade
    at all; without volume data the two cannot be told apart, so flags are
    metadata and fitting keeps all rows unless explicitly asked to drop.
    """
    s = cfd_series.sort_index()
    values = s.to_numpy()
    flags = np.zeros(values.size, dtype=bool)
    if values.size > 1:
        flags[1:] = values[1:] == values[:-1]
    return pd.Series(flags, index=s.index)


# ---------------------------------------------------------------------------
# Ingestion
# ---------------------------------------------------------------------------

_TRUE = {"true", "1", "yes"}
_FALSE = {"false", "0", "no"}


def _parse_bool(raw: str, source: str, line: int) -> bool:
    v = raw.strip().lower()
    if v in _TRUE:
        return True
    if v in _FALSE:
        return False
    raise MalformedRowError(f"{source}:{line}: bad boolean {raw!r}")


def _parse_date(raw: str, source: str, line: int) -> pd.Timestamp:
    try:
        return pd.Timestamp(_date.fromisoformat(raw.strip()))
    except ValueError as exc:
        raise MalformedRowError(f"{source}:{line}: bad date {raw!r}") from exc


def _parse_price(raw: str, source: str, line: int) -> float:
    try:
        v = float(raw)
    except (TypeError, ValueError) as exc:
        raise MalformedRowError(f"{source}:{line}: bad number {raw!r}") from exc
    if not np.isfinite(v):
        raise MalformedRowError(f"{source}:{line}: non-finite number {raw!r}")
    return v


def _read_rows(path: Path, columns: tuple[str, ...]):
    """Yield (line_number, row_dict); enforce the header and field count."""
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise MalformedRowError(f"{path.name}: empty file, expected header {','.join(columns)}")
        if tuple(h.strip() for h in header) != columns:
            raise MalformedRowError(
                f"{path.name}: expected header {','.join(columns)}, got {','.join(header)}"
            )
        for i, row in enumerate(reader, start=2):
            if not row or (len(row) == 1 and not row[0].strip()):
                continue
            if len(row) != len(columns):
                raise MalformedRowError(f"{path.name}:{i}: expected {len(columns)} fields, got {len(row)}")
            yield i, dict(zip(columns, row))


def _read_areas(path: Path) -> dict[str, Area]:
    areas: dict[str, Area] = {}
    for line, row in _read_rows(path, ("area", "has_hydro", "observed_cfd")):
        code = row["area"].strip()
        if not code:
            raise MalformedRowError(f"{path.name}:{line}: empty area code")
        if code in areas:
            raise DuplicateKeyError(f"{path.name}:{line}: duplicate area {code}")
        areas[code] = Area(
            code=code,
            has_hydro=_parse_bool(row["has_hydro"], path.name, line),
            observed_cfd=_parse_bool(row["observed_cfd"], path.name, line),
        )
    if not areas:
        raise IngestError(f"{path.name}: no areas configured")
    return areas


def _read_redefinitions(path: Path) -> tuple[pd.Timestamp, ...]:
    if not path.exists():
        return ()
    dates = [_parse_date(row["date"], path.name, line) for line, row in _read_rows(path, ("date",))]
    return tuple(sorted(set(dates)))


def _read_reservoir_map(path: Path, areas: dict[str, Area]) -> dict[str, str]:
    if not path.exists():
        return {}
    mapping: dict[str, str] = {}
    for line, row in _read_rows(path, ("area", "source")):
        code, source = row["area"].strip(), row["source"].strip()
        if code not in areas:
            raise MalformedRowError(f"{path.name}:{line}: unknown area {code}")
        if code in mapping:
            raise DuplicateKeyError(f"{path.name}:{line}: duplicate mapping for {code}")
        mapping[code] = source
    return mapping


def reservoir_deviation_daily(fill: pd.Series, panel_dates: pd.DatetimeIndex,
                              *, area: str = "") -> tuple[pd.Series, seasonal.SeasonalModel]:
    """Seasonal-adjust a dated fill series and forward-fill residuals to days.

    The cycle is fitted on the observation grid with the time index counted
    in weeks since the first observation; each panel day then carries the
    most recent residual. Days before the first observation stay absent.
    """
    fill = fill.sort_index()
    weeks = (fill.index - fill.index[0]).days.to_numpy() / 7.0
    model = seasonal.fit_seasonal(fill.to_numpy(), weeks, area=area)
    resid = pd.Series(seasonal.adjust(fill.to_numpy(), model, weeks), index=fill.index)
    daily = resid.reindex(panel_dates.union(resid.index)).ffill().reindex(panel_dates).dropna()
    return daily, model


def ingest(source) -> MarketPanel:
    """Build an aligned MarketPanel from a directory of schema CSV files.

    Rows violating panel invariants (CfD at or below the negated forward,
    fill outside (0, 100), CfD quotes for areas declared non-traded) are
    rejected and reported in ``panel.diagnostics``. Structural problems
    (bad header, unparseable field, duplicate key, missing reservoir data
    for a hydro area) raise instead, because they signal corrupt input
    rather than the odd bad row.
    """
    src = Path(source)
    if not src.is_dir():
        raise IngestError(f"data directory not found: {src}")
    areas = _read_areas(src / "areas.csv")
    redefinitions = _read_redefinitions(src / "redefinitions.csv")
    reservoir_map = _read_reservoir_map(src / "reservoir_map.csv", areas)
    diagnostics: list[RowDiagnostic] = []

    # spot.csv: daily area prices plus the SYS reference
    spot: dict[str, dict[pd.Timestamp, float]] = {}
    for line, row in _read_rows(src / "spot.csv", ("date", "area", "price")):
        code = row["area"].strip()
        day = _parse_date(row["date"], "spot.csv", line)
        price = _parse_price(row["price"], "spot.csv", line)
        if code != SYSTEM_AREA and code not in areas:
            diagnostics.append(RowDiagnostic("spot.csv", line, f"unknown area {code}"))
            continue
        series = spot.setdefault(code, {})
        if day in series:
            raise DuplicateKeyError(f"spot.csv:{line}: duplicate (area, day) key ({code}, {day.date()})")
        series[day] = price
    if SYSTEM_AREA not in spot:
        raise IngestError("spot.csv: no system spot rows (area SYS)")
    missing = [c for c in areas if c not in spot]
    if missing:
        raise IngestError(f"spot.csv: no spot rows for configured areas: {', '.join(sorted(missing))}")

    # Panel calendar: days on which the system and every area spot exist.
    dateset = set(spot[SYSTEM_AREA])
    for code in areas:
        dateset &= set(spot[code])
    if not dateset:
        raise IngestError("no common dates across spot series")
    dates = pd.DatetimeIndex(sorted(dateset))

    ss = pd.Series(spot[SYSTEM_AREA]).sort_index().loc[dates]
    sa = {code: pd.Series(spot[code]).sort_index().loc[dates] for code in areas}

    # forward.csv: working-day system forwards per horizon
    fw_raw: dict[Horizon, dict[pd.Timestamp, float]] = {}
    for line, row in _read_rows(src / "forward.csv", ("date", "horizon", "price")):
        day = _parse_date(row["date"], "forward.csv", line)
        try:
            horizon = Horizon(row["horizon"].strip())
        except ValueError:
            raise MalformedRowError(f"forward.csv:{line}: unknown horizon {row['horizon']!r}")
        price = _parse_price(row["price"], "forward.csv", line)
        series = fw_raw.setdefault(horizon, {})
        if day in series:
            raise DuplicateKeyError(
                f"forward.csv:{line}: duplicate (horizon, day) key ({horizon}, {day.date()})"
            )
        series[day] = price
    fw = {
        h: pd.Series(s).sort_index().pipe(lambda x: x[x.index.isin(dateset)])
        for h, s in fw_raw.items()
    }

    # cfd.csv: traded-area quotes, validated against the matching forward
    cfd_raw: dict[tuple[str, Horizon], dict[pd.Timestamp, float]] = {}
    cfd_path = src / "cfd.csv"
    if cfd_path.exists():
        for line, row in _read_rows(cfd_path, ("date", "area", "horizon", "price")):
            code = row["area"].strip()
            day = _parse_date(row["date"], "cfd.csv", line)
            try:
                horizon = Horizon(row["horizon"].strip())
            except ValueError:
                raise MalformedRowError(f"cfd.csv:{line}: unknown horizon {row['horizon']!r}")
            price = _parse_price(row["price"], "cfd.csv", line)
            if code not in areas:
                diagnostics.append(RowDiagnostic("cfd.csv", line, f"unknown area {code}"))
                continue
            if not areas[code].observed_cfd:
                diagnostics.append(
                    RowDiagnostic("cfd.csv", line, f"CfD quote for non-traded area {code}")
                )
                continue
            if day not in dateset:
                continue  # outside the aligned calendar
            fw_here = fw_raw.get(horizon, {}).get(day)
            if fw_here is None:
                diagnostics.append(
                    RowDiagnostic("cfd.csv", line,
                                  f"no forward price on {day.date()} for horizon {horizon}")
                )
                continue
            if price <= -fw_here:
                diagnostics.append(
                    RowDiagnostic(
                        "cfd.csv", line,
                        f"cfd={price} <= -fw={-fw_here}: area forward price not positive "
                        f"({code}, {horizon}, {day.date()})",
                    )
                )
                continue
            series = cfd_raw.setdefault((code, horizon), {})
            if day in series:
                raise DuplicateKeyError(
                    f"cfd.csv:{line}: duplicate (area, horizon, day) key ({code}, {horizon}, {day.date()})"
                )
            series[day] = price
    cfd = {k: pd.Series(s).sort_index() for k, s in cfd_raw.items()}
    stale = {k: flag_stale(s) for k, s in cfd.items()}

    # reservoir.csv: weekly fills for hydro areas, seasonally adjusted
    fill_raw: dict[str, dict[pd.Timestamp, float]] = {}
    res_path = src / "reservoir.csv"
    if res_path.exists():
        for line, row in _read_rows(res_path, ("date", "area", "fill_pct")):
            code = row["area"].strip()
            day = _parse_date(row["date"], "reservoir.csv", line)
            value = _parse_price(row["fill_pct"], "reservoir.csv", line)
            if code not in areas:
                diagnostics.append(RowDiagnostic("reservoir.csv", line, f"unknown area {code}"))
                continue
            if not areas[code].has_hydro:
                diagnostics.append(
                    RowDiagnostic("reservoir.csv", line, f"reservoir data for no-hydro area {code}")
                )
                continue
            if not (0.0 < value < 100.0):
                diagnostics.append(
                    RowDiagnostic("reservoir.csv", line,
                                  f"fill_pct={value} outside (0, 100) for {code}")
                )
                continue
            series = fill_raw.setdefault(code, {})
            if day in series:
                raise DuplicateKeyError(
                    f"reservoir.csv:{line}: duplicate (area, day) key ({code}, {day.date()})"
                )
            series[day] = value
    reservoir_fill = {c: pd.Series(s).sort_index() for c, s in fill_raw.items()}

    wa: dict[str, pd.Series] = {}
    models: dict[str, seasonal.SeasonalModel] = {}
    for code, area in areas.items():
        if not area.has_hydro:
            continue
        source_code = reservoir_map.get(code, code)
        fill = reservoir_fill.get(source_code)
        if fill is None or fill.empty:
            raise IngestError(f"no reservoir data for hydro area {code} (source {source_code})")
        daily, model = reservoir_deviation_daily(fill, dates, area=source_code)
        wa[code] = daily
        models[code] = model

    for diag in diagnostics:
        logger.warning("ingest: %s", diag)

    return MarketPanel(
        dates=dates,
        areas=areas,
        cfd=cfd,
        fw=fw,
        sa=sa,
        ss=ss,
        wa=wa,
        reservoir_fill=reservoir_fill,
        redefinitions=redefinitions,
        stale=stale,
        seasonal_models=models,
        reservoir_map=reservoir_map,
        diagnostics=diagnostics,
    )


# ---------------------------------------------------------------------------
# Design matrices
# ---------------------------------------------------------------------------

def _coerce_epoch(panel: MarketPanel, epoch) -> Epoch:
    if isinstance(epoch, Epoch):
        start, end = epoch.start, epoch.end
    else:
        start, end = (pd.Timestamp(epoch[0]), pd.Timestamp(epoch[1]))
    if end < start:
        raise EpochError(f"epoch end {end.date()} before start {start.date()}")
    for cut in panel.redefinitions:
        if start < cut <= end:
            raise EpochError(
                f"epoch {start.date()}..{end.date()} straddles the redefinition on {cut.date()}"
            )
    return Epoch(start=start, end=end)


def design_matrix(panel: MarketPanel, area: str, horizon: Horizon, epoch) -> DesignMatrix:
    """Covariate matrix for (area, horizon) over one definition epoch.

    Columns are ordered FW, SA, SS and, for hydro areas, WA. There is no
    intercept column. Days with any covariate missing are dropped and
    reported via ``dropped``.
    """
    if area not in panel.areas:
        raise PanelInvariantError(f"unknown area {area}")
    ep = _coerce_epoch(panel, epoch)
    names = covariate_names(panel.areas[area])
    candidates = panel.dates[(panel.dates >= ep.start) & (panel.dates <= ep.end)]

    columns = {
        COV_FW: panel.fw.get(horizon, pd.Series(dtype=float)),
        COV_SA: panel.sa[area],
        COV_SS: panel.ss,
    }
    if COV_WA in names:
        columns[COV_WA] = panel.wa[area]
    frame = pd.DataFrame({name: columns[name].reindex(candidates) for name in names})
    keep = frame.dropna()
    if keep.empty:
        raise InsufficientDataError(
            f"no complete covariate rows for {area}/{horizon} in epoch {ep.id}"
        )
    dropped = candidates.difference(keep.index)
    return DesignMatrix(
        X=keep.to_numpy(dtype=float),
        names=names,
        dates=pd.DatetimeIndex(keep.index),
        dropped=dropped,
    )


def regression_frame(panel: MarketPanel, area: str, horizon: Horizon, epoch,
                     *, drop_stale: bool = False):
    """(X, y, names, dates) for fitting: covariate rows joined with CfD closes.

    ``drop_stale`` removes rows whose close merely repeats the previous
    working day (opt-in; by default recorded closes are taken at face value).
    """
    design = design_matrix(panel, area, horizon, epoch)
    series = panel.cfd.get((area, horizon))
    if series is None or series.empty:
        raise InsufficientDataError(f"no CfD quotes for {area}/{horizon}")
    y = series.reindex(design.dates)
    mask = y.notna().to_numpy()
    if drop_stale:
        stale = panel.stale[(area, horizon)].reindex(design.dates).fillna(False).to_numpy(dtype=bool)
        mask &= ~stale
    if not mask.any():
        raise InsufficientDataError(
            f"no rows left for {area}/{horizon} after joining CfD quotes"
            + (" and dropping stale closes" if drop_stale else "")
        )
    dates = design.dates[mask]
    return design.X[mask], y.to_numpy()[mask], design.names, dates


# ---------------------------------------------------------------------------
# Canonical export
# ---------------------------------------------------------------------------

def _fmt(value: float) -> str:
    return repr(float(value))


def export_panel(panel: MarketPanel, out_dir) -> None:
    """Write the panel back out in the input schemas, canonically ordered.

    Ordering and float formatting are deterministic, so re-ingesting an
    export and exporting again reproduces the files byte for byte.
    """
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)

    with open(out / "areas.csv", "w") as fh:
        fh.write("area,has_hydro,observed_cfd\n")
        for code in sorted(panel.areas):
            a = panel.areas[code]
            fh.write(f"{code},{str(a.has_hydro).lower()},{str(a.observed_cfd).lower()}\n")

    with open(out / "redefinitions.csv", "w") as fh:
        fh.write("date\n")
        for d in panel.redefinitions:
            fh.write(f"{d.date()}\n")

    with open(out / "spot.csv", "w") as fh:
        fh.write("date,area,price\n")
        codes = sorted([*panel.sa, SYSTEM_AREA])
        for day in panel.dates:
            for code in codes:
                series = panel.ss if code == SYSTEM_AREA else panel.sa[code]
                if day in series.index:
                    fh.write(f"{day.date()},{code},{_fmt(series[day])}\n")

    with open(out / "forward.csv", "w") as fh:
        fh.write("date,horizon,price\n")
        horizons = sorted(panel.fw, key=_HORIZON_ORDER.get)
        for day in panel.dates:
            for h in horizons:
                series = panel.fw[h]
                if day in series.index:
                    fh.write(f"{day.date()},{h.value},{_fmt(series[day])}\n")

    with open(out / "cfd.csv", "w") as fh:
        fh.write("date,area,horizon,price\n")
        keys = sorted(panel.cfd, key=lambda k: (k[0], _HORIZON_ORDER[k[1]]))
        for day in panel.dates:
            for key in keys:
                series = panel.cfd[key]
                if day in series.index:
                    fh.write(f"{day.date()},{key[0]},{key[1].value},{_fmt(series[day])}\n")

    with open(out / "reservoir.csv", "w") as fh:
        fh.write("date,area,fill_pct\n")
        rows = []
        for code in sorted(panel.reservoir_fill):
            for day, value in panel.reservoir_fill[code].items():
                rows.append((day, code, value))
        for day, code, value in sorted(rows):
            fh.write(f"{day.date()},{code},{_fmt(value)}\n")

    if panel.reservoir_map:
        with open(out / "reservoir_map.csv", "w") as fh:
            fh.write("area,source\n")
            for code in sorted(panel.reservoir_map):
                fh.write(f"{code},{panel.reservoir_map[code]}\n")
