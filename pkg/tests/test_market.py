import filecmp
from textwrap import dedent

import numpy as np
import pandas as pd
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cfdcast import market
from cfdcast.errors import (
    DuplicateKeyError,
    EpochError,
    InsufficientDataError,
    MalformedRowError,
    PanelInvariantError,
)
from cfdcast.market import Horizon, design_matrix, flag_stale, ingest, regression_frame


def write(path, name, text):
    (path / name).write_text(dedent(text).lstrip())


def tiny_market(path, *, cfd_extra="", spot_extra="", redefs=""):
    """Two areas (one hydro target, one traded no-hydro), four days."""
    write(path, "areas.csv", """
        area,has_hydro,observed_cfd
        AA,false,true
        BB,true,false
    """)
    write(path, "spot.csv", f"""
        date,area,price
        2010-01-04,SYS,40.0
        2010-01-04,AA,42.0
        2010-01-04,BB,39.0
        2010-01-05,SYS,41.0
        2010-01-05,AA,43.0
        2010-01-05,BB,40.0
        2010-01-06,SYS,39.5
        2010-01-06,AA,41.5
        2010-01-06,BB,38.5
        2010-01-07,SYS,40.5
        2010-01-07,AA,42.5
        2010-01-07,BB,39.5
        {spot_extra}
    """)
    write(path, "forward.csv", """
        date,horizon,price
        2010-01-04,M1,35.0
        2010-01-05,M1,35.5
        2010-01-06,M1,34.5
        2010-01-07,M1,35.2
    """)
    write(path, "cfd.csv", f"""
        date,area,horizon,price
        2010-01-04,AA,M1,3.1
        2010-01-05,AA,M1,3.1
        2010-01-06,AA,M1,3.2
        2010-01-07,AA,M1,2.9
        {cfd_extra}
    """)
    # weekly fills spanning a year so the seasonal fit has support
    rows = ["date,area,fill_pct"]
    base = pd.Timestamp("2009-01-05")
    for week in range(60):
        ts = base + pd.Timedelta(days=7 * week)
        fill = float(50.0 + 25.0 * np.sin(2 * np.pi * week / 52.0))
        rows.append(f"{ts.date()},BB,{fill!r}")
    (path / "reservoir.csv").write_text("\n".join(rows) + "\n")
    write(path, "redefinitions.csv", f"""
        date
        {redefs}
    """)


def test_ingest_aligns_on_spot_intersection(tmp_path):
    # AA has no spot on an extra fifth day that only SYS covers
    tiny_market(tmp_path, spot_extra="2010-01-08,SYS,40.0")
    panel = ingest(tmp_path)
    assert [str(d.date()) for d in panel.dates] == [
        "2010-01-04", "2010-01-05", "2010-01-06", "2010-01-07",
    ]
    assert ("AA", Horizon.M1) in panel.cfd
    # BB is configured non-traded: covariates present, no CfD series
    assert all(key[0] != "BB" for key in panel.cfd)
    assert "BB" in panel.sa and "BB" in panel.wa
    assert "AA" not in panel.wa


def test_duplicate_cfd_key_raises(tmp_path):
    tiny_market(tmp_path, cfd_extra="2010-01-04,AA,M1,3.0")
    with pytest.raises(DuplicateKeyError):
        ingest(tmp_path)  # same (area, horizon, day) appears twice


def test_cfd_breaching_positivity_is_rejected_with_diagnostic(tmp_path):
    tiny_market(tmp_path)
    # rewrite one quote to breach cfd > -fw
    text = (tmp_path / "cfd.csv").read_text().replace("2010-01-04,AA,M1,3.1", "2010-01-04,AA,M1,-40.0")
    (tmp_path / "cfd.csv").write_text(text)
    panel = ingest(tmp_path)
    assert ("AA", Horizon.M1) in panel.cfd
    assert pd.Timestamp("2010-01-04") not in panel.cfd[("AA", Horizon.M1)].index
    assert any("not positive" in d.reason for d in panel.diagnostics)
    # the surviving panel still satisfies the invariant everywhere
    for (code, h), series in panel.cfd.items():
        fw = panel.fw[h].reindex(series.index)
        assert ((series + fw) > 0).all()


def test_quotes_for_nontraded_area_are_rejected(tmp_path):
    tiny_market(tmp_path, cfd_extra="2010-01-04,BB,M1,1.0")
    panel = ingest(tmp_path)
    assert all(key[0] != "BB" for key in panel.cfd)
    assert any("non-traded" in d.reason for d in panel.diagnostics)


def test_duplicate_spot_key_raises(tmp_path):
    tiny_market(tmp_path, spot_extra="2010-01-04,AA,42.0")
    with pytest.raises(DuplicateKeyError):
        ingest(tmp_path)


def test_malformed_rows_raise(tmp_path):
    tiny_market(tmp_path)
    with open(tmp_path / "spot.csv", "a") as fh:
        fh.write("2010-01-08,AA,not-a-price\n")
    with pytest.raises(MalformedRowError):
        ingest(tmp_path)
    tiny_market(tmp_path)
    (tmp_path / "forward.csv").write_text("date,price\n2010-01-04,35.0\n")
    with pytest.raises(MalformedRowError):
        ingest(tmp_path)


def test_reservoir_out_of_range_rejected_with_diagnostic(tmp_path):
    tiny_market(tmp_path)
    with open(tmp_path / "reservoir.csv", "a") as fh:
        fh.write("2010-02-01,BB,100.0\n")
    panel = ingest(tmp_path)
    assert any("outside (0, 100)" in d.reason for d in panel.diagnostics)


def test_missing_reservoir_for_hydro_area_raises(tmp_path):
    tiny_market(tmp_path)
    (tmp_path / "reservoir.csv").write_text("date,area,fill_pct\n")
    with pytest.raises(market.IngestError):
        ingest(tmp_path)


def test_flag_stale_examples():
    dates = pd.date_range("2010-01-04", periods=3, freq="B")
    s = pd.Series([3.1, 3.1, 3.2], index=dates)
    assert flag_stale(s).tolist() == [False, True, False]
    s = pd.Series([3.1, 3.2, 3.1], index=dates)
    assert flag_stale(s).tolist() == [False, False, False]
    s = pd.Series([2.0] * 5, index=pd.date_range("2010-01-04", periods=5, freq="B"))
    assert flag_stale(s).tolist() == [False, True, True, True, True]


@settings(max_examples=60, deadline=None)
@given(
    prices=st.lists(st.sampled_from([1.5, 2.25, 3.125, 4.0]), min_size=1, max_size=12),
    scale=st.floats(min_value=1e-3, max_value=1e6, allow_nan=False),
)
def test_flag_stale_invariant_to_positive_scaling(prices, scale):
    idx = pd.date_range("2010-01-04", periods=len(prices), freq="B")
    base = pd.Series(prices, index=idx)
    assert flag_stale(base).tolist() == flag_stale(base * scale).tolist()


def test_design_matrix_shapes(panel):
    epoch = panel.epochs()[0]
    dk1 = design_matrix(panel, "DK1", Horizon.M1, epoch)
    assert dk1.names == ("FW", "SA", "SS")
    assert dk1.X.shape[1] == 3
    no1 = design_matrix(panel, "NO1", Horizon.M1, epoch)
    assert no1.names == ("FW", "SA", "SS", "WA")
    assert no1.X.shape[1] == 4
    assert no1.X.shape[0] <= len(panel.dates)
    # weekends have no forward quotes, so they fall in `dropped`
    assert len(no1.dates) + len(no1.dropped) == len(panel.dates)
    assert len(no1.dropped) > 0


def test_epoch_straddling_redefinition_rejected(split_panel):
    cut = split_panel.redefinitions[0]
    with pytest.raises(EpochError):
        design_matrix(
            split_panel, "NO1", Horizon.M1,
            (cut - pd.Timedelta(days=10), cut + pd.Timedelta(days=10)),
        )
    # each side of the cut is fine
    for epoch in split_panel.epochs():
        dm = design_matrix(split_panel, "NO1", Horizon.M1, epoch)
        assert dm.X.shape[0] > 0


def test_empty_design_rejected(panel):
    start = panel.dates[0]
    with pytest.raises(InsufficientDataError):
        # a single Saturday has spots but no forward quote
        saturday = next(d for d in panel.dates if d.dayofweek == 5 and d > start)
        design_matrix(panel, "NO1", Horizon.M1, (saturday, saturday))


def test_regression_frame_joins_cfd(panel):
    epoch = panel.epochs()[0]
    X, y, names, dates = regression_frame(panel, "NO1", Horizon.M1, epoch)
    assert X.shape[0] == y.shape[0] == len(dates)
    assert names == ("FW", "SA", "SS", "WA")
    series = panel.cfd[("NO1", Horizon.M1)]
    np.testing.assert_array_equal(y, series.reindex(dates).to_numpy())


def test_regression_frame_can_drop_stale_rows(tmp_path):
    tiny_market(tmp_path)
    panel = ingest(tmp_path)
    epoch = panel.epochs()[0]
    X_all, y_all, _, _ = regression_frame(panel, "AA", Horizon.M1, epoch)
    X_ns, y_ns, _, dates_ns = regression_frame(
        panel, "AA", Horizon.M1, epoch, drop_stale=True
    )
    # quotes were 3.1, 3.1, 3.2, 2.9: exactly one stale repeat on day two
    assert len(y_all) == 4
    assert len(y_ns) == 3
    assert pd.Timestamp("2010-01-05") not in dates_ns


def test_export_round_trip_is_byte_identical(market_dir, panel, tmp_path):
    first = tmp_path / "first"
    second = tmp_path / "second"
    panel.export(first)
    reingested = ingest(first)
    reingested.export(second)
    names = [p.name for p in first.iterdir()]
    match, mismatch, errors = filecmp.cmpfiles(first, second, names, shallow=False)
    assert mismatch == [] and errors == []
    assert sorted(match) == sorted(names)


def test_panel_positivity_invariant_holds(panel):
    for (code, h), series in panel.cfd.items():
        fw = panel.fw[h].reindex(series.index)
        assert not fw.isna().any()
        assert ((series + fw) > 0).all()


def test_epochs_cover_panel(split_panel):
    epochs = split_panel.epochs()
    assert len(epochs) == 2
    assert epochs[0].start == split_panel.dates[0]
    assert epochs[1].end == split_panel.dates[-1]
    cut = split_panel.redefinitions[0]
    assert epochs[1].start == cut
    assert epochs[0].end == cut - pd.Timedelta(days=1)
    assert split_panel.epoch_of(cut).id == epochs[1].id


def test_full_sample_span_is_preserved(tmp_path):
    # consistent sources covering 2006-01-01..2011-01-31 yield exactly
    # that panel calendar
    from cfdcast import synthetic

    synthetic.generate_market(tmp_path, seed=1, start="2006-01-01", n_days=1857)
    panel = ingest(tmp_path)
    assert str(panel.dates[0].date()) == "2006-01-01"
    assert str(panel.dates[-1].date()) == "2011-01-31"
    assert len(panel.dates) == 1857


def test_panel_summary_fields(panel):
    s = panel.summary()
    assert s["n_dates"] == len(panel.dates)
    assert set(s["areas"]) == set(panel.areas)
    assert "NO1/M1" in s["coverage"]["cfd"]


def test_wa_is_forward_filled_between_weekly_points(tmp_path):
    tiny_market(tmp_path)
    panel = ingest(tmp_path)
    wa = panel.wa["BB"]
    # panel dates are mid-week; each carries the most recent weekly residual
    assert list(wa.index) == list(panel.dates)
    assert wa.iloc[0] == wa.iloc[1] or wa.index[0].dayofweek == 0
