import json

import numpy as np
import pytest

from cfdcast import elicitation, market, pipeline, synthetic

SESSION_SEED = 20090101

# Prior weights used throughout: the NO2 similarity profile with months=1,
# FW (5,5,5,75,10)%, SA/SS (5,5,5,80,5)%, reservoir (0,0,5,85,10)% over
# (DK1, DK2, FI, NO1, SE); Danish entries on the reservoir row are
# structurally zero.
NO2_ROWS = {
    "FW": ([0.05, 0.05, 0.05, 0.75, 0.10], 1.0),
    "SA": ([0.05, 0.05, 0.05, 0.80, 0.05], 1.0),
    "SS": ([0.05, 0.05, 0.05, 0.80, 0.05], 1.0),
    "WA": ([0.00, 0.00, 0.05, 0.85, 0.10], 1.0),
}
OBSERVED_ORDER = ("DK1", "DK2", "FI", "NO1", "SE")


def make_no2_profile(months: float | None = None) -> elicitation.ElicitationProfile:
    rows = {
        cov: elicitation.ProfileRow(
            rho=np.array(rho), months=months if months is not None else m
        )
        for cov, (rho, m) in NO2_ROWS.items()
    }
    return elicitation.ElicitationProfile(
        target="NO2", observed_order=OBSERVED_ORDER, rows=rows
    )


@pytest.fixture(scope="session")
def market_dir(tmp_path_factory):
    out = tmp_path_factory.mktemp("market")
    synthetic.generate_market(out, seed=SESSION_SEED, n_days=600)
    return out


@pytest.fixture(scope="session")
def market_truth(market_dir):
    return json.loads((market_dir / "truth.json").read_text())


@pytest.fixture(scope="session")
def panel(market_dir):
    return market.ingest(market_dir)


@pytest.fixture(scope="session")
def fits(panel):
    fitted, skipped = pipeline.fit_all(panel)
    assert not skipped
    return fitted


@pytest.fixture(scope="session")
def m1_posteriors(panel, fits):
    epoch = panel.epochs()[0]
    return pipeline.posteriors_for_epoch(fits, market.Horizon.M1, epoch.id)


@pytest.fixture(scope="session")
def no2_profile(panel):
    return elicitation.validate_profile(make_no2_profile(), panel.areas)


@pytest.fixture(scope="session")
def split_market_dir(tmp_path_factory):
    """Two definition epochs; the second has roughly a tenth of the data."""
    out = tmp_path_factory.mktemp("split_market")
    synthetic.generate_market(
        out, seed=SESSION_SEED + 1, n_days=660, redefinitions=("2009-08-31",)
    )
    return out


@pytest.fixture(scope="session")
def split_panel(split_market_dir):
    return market.ingest(split_market_dir)
