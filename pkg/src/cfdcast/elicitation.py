"""Expert similarity judgments as Dirichlet priors over area weights.

For an area without traded CfDs, each regression coefficient is modelled
as a convex combination of the corresponding coefficients in the traded
areas. The combination weights are unknown, so a domain expert supplies,
per covariate, a relative-similarity score for every traded area plus a
"months of data" statement of confidence. Scores normalize to a simplex
vector rho, and the weight vector for that covariate is taken to be

    w ~ Dirichlet(alpha),   alpha_i = rho_i * alpha0,

where the total concentration alpha0 is the effective sample size
implied by the months answer (months times trading days per month,
21 by default: the underlying series are daily). A zero score is
structural: that area's weight is identically zero in every draw,
implemented by a reduced-dimension Dirichlet, since a zero Dirichlet
parameter is not defined. Traded areas without hydro power have no
reservoir coefficient to borrow, so their score on the reservoir row
must be zero.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
import yaml

from .errors import ProfileValidationError, TranscriptError
from .market import COV_WA, covariate_names
from .rng import as_generator

DEFAULT_DAYS_PER_MONTH = 21.0
SIMPLEX_TOL = 1e-9


@dataclass(frozen=True)
class ProfileRow:
    """One covariate's similarity weights and months-of-data confidence."""

    rho: np.ndarray
    months: float

    def __post_init__(self):
        object.__setattr__(self, "rho", np.asarray(self.rho, dtype=float))


@dataclass(frozen=True)
class ElicitationProfile:
    """Per-target bundle: one ProfileRow per covariate of the target area.

    ``observed_order`` fixes which traded area each rho position refers to.
    ``transcript`` optionally keeps the raw, un-normalized session answers
    for audit; it never affects sampling.
    """

    target: str
    observed_order: tuple[str, ...]
    rows: dict[str, ProfileRow]
    transcript: dict | None = field(default=None, compare=False)

    def canonical_dict(self) -> dict:
        return {
            "target": self.target,
            "observed_order": list(self.observed_order),
            "rows": {
                cov: {"rho": [float(v) for v in row.rho], "months": float(row.months)}
                for cov, row in sorted(self.rows.items())
            },
        }

    def content_hash(self) -> str:
        payload = json.dumps(self.canonical_dict(), sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(payload.encode()).hexdigest()


@dataclass(frozen=True)
class WeightDraw:
    """One sampled weight vector per covariate; each lies on the simplex."""

    weights: dict[str, np.ndarray]


def validate_profile(profile: ElicitationProfile, areas) -> ElicitationProfile:
    """Normalize rows to the simplex and enforce the structural rules.

    ``areas`` maps code -> Area. The target must be a configured,
    non-traded area; every observed area must be configured and traded;
    scores must be nonnegative with at least one positive per row;
    no-hydro areas must score exactly zero on the reservoir row; months
    must be positive. Already-normalized rows pass through unchanged,
    so validation is idempotent.
    """
    if profile.target not in areas:
        raise ProfileValidationError(f"unknown target area {profile.target!r}")
    if areas[profile.target].observed_cfd:
        raise ProfileValidationError(
            f"target {profile.target} has traded CfDs; elicitation targets non-traded areas"
        )
    if not profile.observed_order:
        raise ProfileValidationError("observed_order is empty")
    if len(set(profile.observed_order)) != len(profile.observed_order):
        raise ProfileValidationError("observed_order contains duplicates")
    for code in profile.observed_order:
        if code not in areas:
            raise ProfileValidationError(f"unknown observed area {code!r}")
        if not areas[code].observed_cfd:
            raise ProfileValidationError(f"area {code} is not a traded area")

    required = covariate_names(areas[profile.target])
    missing = [c for c in required if c not in profile.rows]
    if missing:
        raise ProfileValidationError(f"profile is missing rows for: {', '.join(missing)}")
    extra = [c for c in profile.rows if c not in required]
    if extra:
        raise ProfileValidationError(f"profile has rows for unknown covariates: {', '.join(extra)}")

    q = len(profile.observed_order)
    normalized: dict[str, ProfileRow] = {}
    for cov in required:
        row = profile.rows[cov]
        rho = np.asarray(row.rho, dtype=float)
        if rho.shape != (q,):
            raise ProfileValidationError(
                f"row {cov}: expected {q} weights for {profile.observed_order}, got {rho.shape}"
            )
        if not np.all(np.isfinite(rho)):
            raise ProfileValidationError(f"row {cov}: weights must be finite")
        if np.any(rho < 0):
            raise ProfileValidationError(f"row {cov}: negative weight")
        total = float(rho.sum())
        if total <= 0:
            raise ProfileValidationError(f"row {cov}: all weights are zero")
        if not row.months > 0:
            raise ProfileValidationError(f"row {cov}: months of data must be positive")
        if cov == COV_WA:
            for i, code in enumerate(profile.observed_order):
                if not areas[code].has_hydro and rho[i] != 0.0:
                    raise ProfileValidationError(
                        f"row {cov}: {code} has no hydro, its weight must be 0"
                    )
        if abs(total - 1.0) > SIMPLEX_TOL:
            rho = rho / total
        normalized[cov] = ProfileRow(rho=rho, months=float(row.months))

    return ElicitationProfile(
        target=profile.target,
        observed_order=tuple(profile.observed_order),
        rows=normalized,
        transcript=profile.transcript,
    )


def point_mass_profile(area: str, observed_order: tuple[str, ...], covariates: tuple[str, ...],
                       *, months: float = 1e6) -> ElicitationProfile:
    """Degenerate profile putting all similarity mass on one traded area.

    Used for the reporting path on traded areas themselves, where the
    weighting machinery should collapse to the area's own posterior.
    """
    if area not in observed_order:
        raise ProfileValidationError(f"{area} is not in the observed order {observed_order}")
    rho = np.zeros(len(observed_order))
    rho[observed_order.index(area)] = 1.0
    rows = {cov: ProfileRow(rho=rho.copy(), months=months) for cov in covariates}
    return ElicitationProfile(target=area, observed_order=tuple(observed_order), rows=rows)


def concentration(rho, months: float, days_per_month: float = DEFAULT_DAYS_PER_MONTH) -> np.ndarray:
    """Dirichlet concentration vector: alpha_i = rho_i * months * days_per_month.

    Structural zeros stay exactly zero; they mark components excluded from
    the (reduced-dimension) Dirichlet. The total concentration, the
    effective number of daily observations behind the judgment, is
    months * days_per_month.
    """
    rho = np.asarray(rho, dtype=float)
    if not months > 0:
        raise ProfileValidationError("months of data must be positive")
    if not days_per_month > 0:
        raise ProfileValidationError("days_per_month must be positive")
    return rho * (months * days_per_month)


def draw_simplex(alpha: np.ndarray, n_draws: int, rng) -> np.ndarray:
    """(n_draws, len(alpha)) Dirichlet draws via normalized Gamma variates.

    Components with alpha == 0 are exactly zero in every draw.
    """
    rng = as_generator(rng)
    alpha = np.asarray(alpha, dtype=float)
    out = np.zeros((n_draws, alpha.size))
    pos = alpha > 0
    k = int(pos.sum())
    if k == 0:
        raise ProfileValidationError("need at least one positive concentration")
    if k == 1:
        out[:, pos] = 1.0
        return out
    g = rng.gamma(alpha[pos], 1.0, size=(n_draws, k))
    totals = g.sum(axis=1)
    # With very small shapes every variate can underflow to 0; redraw those rows.
    while np.any(totals == 0.0):
        bad = totals == 0.0
        g[bad] = rng.gamma(alpha[pos], 1.0, size=(int(bad.sum()), k))
        totals = g.sum(axis=1)
    out[:, pos] = g / totals[:, None]
    return out


def sample_weight_arrays(profile: ElicitationProfile, n_draws: int, rng, *,
                         days_per_month: float = DEFAULT_DAYS_PER_MONTH) -> dict[str, np.ndarray]:
    """Per covariate, an (n_draws, q) array of simplex draws.

    Rows are independent Dirichlets; draw order follows the sorted
    covariate keys so results are reproducible under a fixed stream.
    """
    rng = as_generator(rng)
    out = {}
    for cov in sorted(profile.rows):
        row = profile.rows[cov]
        alpha = concentration(row.rho, row.months, days_per_month)
        out[cov] = draw_simplex(alpha, n_draws, rng)
    return out


def sample_weights(profile: ElicitationProfile, n_draws: int, rng, *,
                   days_per_month: float = DEFAULT_DAYS_PER_MONTH) -> list[WeightDraw]:
    arrays = sample_weight_arrays(profile, n_draws, rng, days_per_month=days_per_month)
    return [
        WeightDraw(weights={cov: arrays[cov][i] for cov in arrays})
        for i in range(n_draws)
    ]


# ---------------------------------------------------------------------------
# Guided session
# ---------------------------------------------------------------------------

def similarity_question(target: str, covariate: str, observed: str) -> str:
    """Per-area similarity prompt for one covariate row."""
    labels = {
        "FW": "the system forward price",
        "SA": "the area spot price",
        "SS": "the system spot price",
        "WA": "the reservoir deviation (hydrological balance)",
    }
    what = labels.get(covariate, covariate)
    return (
        f"Suppose {target} had a traded CfD. How closely would the effect of {what} "
        f"on that price track the effect seen in {observed}? Give any nonnegative "
        f"score; scores are rescaled to shares across the traded areas."
    )


def months_question(covariate: str) -> str:
    """Confidence prompt, answered in months of equivalent market data."""
    return (
        f"For the {covariate} scores you just gave: if the judgment could instead "
        f"be backed by market history, how many months of daily data would carry "
        f"the same amount of information?"
    )


@dataclass
class SessionTranscript:
    """Raw answers from a guided session, before normalization."""

    target: str
    observed_order: tuple[str, ...]
    similarity: dict[str, dict[str, float]]  # covariate -> observed area -> raw score
    months: dict[str, float]                 # covariate -> months answer

    def to_dict(self) -> dict:
        return {
            "target": self.target,
            "observed_order": list(self.observed_order),
            "similarity": {c: dict(v) for c, v in self.similarity.items()},
            "months": dict(self.months),
        }


def elicit_session(transcript: SessionTranscript, areas) -> ElicitationProfile:
    """Turn a complete session transcript into a validated profile.

    Requires one similarity answer per (covariate, observed area) and one
    months answer per covariate. On the reservoir row, answers for
    no-hydro areas may be omitted; they are structurally zero.
    """
    if transcript.target not in areas:
        raise TranscriptError(f"unknown target area {transcript.target!r}")
    required = covariate_names(areas[transcript.target])
    rows: dict[str, ProfileRow] = {}
    for cov in required:
        answers = transcript.similarity.get(cov)
        if answers is None:
            raise TranscriptError(f"transcript has no similarity answers for row {cov}")
        if cov not in transcript.months:
            raise TranscriptError(f"transcript has no months answer for row {cov}")
        raw = np.empty(len(transcript.observed_order))
        for i, code in enumerate(transcript.observed_order):
            if code in answers:
                raw[i] = float(answers[code])
            elif cov == COV_WA and code in areas and not areas[code].has_hydro:
                raw[i] = 0.0
            else:
                raise TranscriptError(f"transcript row {cov} has no answer for area {code}")
        rows[cov] = ProfileRow(rho=raw, months=float(transcript.months[cov]))
    profile = ElicitationProfile(
        target=transcript.target,
        observed_order=tuple(transcript.observed_order),
        rows=rows,
        transcript=transcript.to_dict(),
    )
    return validate_profile(profile, areas)


# ---------------------------------------------------------------------------
# Persistence: human-readable YAML, canonical field order
# ---------------------------------------------------------------------------

def save_profile(profile: ElicitationProfile, path) -> None:
    doc = profile.canonical_dict()
    if profile.transcript is not None:
        doc["transcript"] = profile.transcript
    Path(path).write_text(yaml.safe_dump(doc, sort_keys=True, default_flow_style=False))


def load_profile(path, areas=None) -> ElicitationProfile:
    doc = yaml.safe_load(Path(path).read_text())
    profile = profile_from_dict(doc)
    if areas is not None:
        profile = validate_profile(profile, areas)
    return profile


def profile_from_dict(doc: dict) -> ElicitationProfile:
    try:
        rows = {
            cov: ProfileRow(rho=np.asarray(row["rho"], dtype=float), months=float(row["months"]))
            for cov, row in doc["rows"].items()
        }
        return ElicitationProfile(
            target=doc["target"],
            observed_order=tuple(doc["observed_order"]),
            rows=rows,
            transcript=doc.get("transcript"),
        )
    except (KeyError, TypeError, ValueError) as exc:
        raise ProfileValidationError(f"malformed profile document: {exc}") from exc
