"""Regression posterior for one traded area, one horizon, one epoch.

The model is Gaussian and has no intercept: a price spread built from
covariates that are themselves prices should vanish when they do, and
there is nothing to anchor an intercept for areas we never observe.
Under the flat reference prior p(beta, sigma2) proportional to
1/sigma2, the posterior is available in closed form:

    sigma2 | y         ~  dof * s2 / chi2(dof)
    beta | sigma2, y   ~  N(beta_hat, sigma2 * (X'X)^-1)

where beta_hat is the least-squares solution, s2 the residual variance
and dof = n - p. ``sample`` draws exact joint samples from this
posterior; no MCMC is involved.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import scipy.linalg

from .errors import PosteriorError, RankDeficiencyError
from .rng import as_generator

DEFAULT_COND_THRESHOLD = 1e10


@dataclass(frozen=True)
class PosteriorSummary:
    """Sufficient statistics of the posterior: everything sampling needs."""

    beta_hat: np.ndarray
    xtx_inv: np.ndarray
    s2: float
    dof: int
    covariate_names: tuple[str, ...]
    area: str = ""
    horizon: str = ""
    epoch_id: str = ""

    def __post_init__(self):
        beta = np.asarray(self.beta_hat, dtype=float)
        v = np.asarray(self.xtx_inv, dtype=float)
        object.__setattr__(self, "beta_hat", beta)
        object.__setattr__(self, "xtx_inv", v)
        p = beta.shape[0]
        if len(self.covariate_names) != p:
            raise PosteriorError("covariate_names length does not match beta_hat")
        if v.shape != (p, p):
            raise PosteriorError("xtx_inv shape does not match beta_hat")
        if not np.allclose(v, v.T, rtol=0.0, atol=1e-10 * max(1.0, float(np.abs(v).max()))):
            raise PosteriorError("xtx_inv must be symmetric")
        if np.linalg.eigvalsh(v).min() <= 0.0:
            raise PosteriorError("xtx_inv must be positive definite")
        if self.s2 < 0.0:
            raise PosteriorError("s2 must be nonnegative")
        if self.dof < 1:
            raise PosteriorError("dof must be at least 1")

    @property
    def p(self) -> int:
        return self.beta_hat.shape[0]

    def beta_cov(self) -> np.ndarray:
        """Posterior covariance of beta; finite only for dof > 2."""
        if self.dof <= 2:
            raise PosteriorError("posterior covariance of beta is infinite for dof <= 2")
        return self.s2 * self.xtx_inv * self.dof / (self.dof - 2)

    def to_record(self) -> dict:
        """Canonical serialization: names, beta_hat, upper triangle, s2, dof."""
        p = self.p
        iu = np.triu_indices(p)
        return {
            "area": self.area,
            "horizon": self.horizon,
            "epoch": self.epoch_id,
            "covariate_names": list(self.covariate_names),
            "beta_hat": [float(b) for b in self.beta_hat],
            "xtx_inv_upper": [float(v) for v in self.xtx_inv[iu]],
            "s2": float(self.s2),
            "dof": int(self.dof),
        }

    @classmethod
    def from_record(cls, record: dict) -> "PosteriorSummary":
        names = tuple(record["covariate_names"])
        p = len(names)
        v = np.zeros((p, p))
        v[np.triu_indices(p)] = record["xtx_inv_upper"]
        v = v + np.triu(v, 1).T
        return cls(
            beta_hat=np.asarray(record["beta_hat"], dtype=float),
            xtx_inv=v,
            s2=float(record["s2"]),
            dof=int(record["dof"]),
            covariate_names=names,
            area=record.get("area", ""),
            horizon=record.get("horizon", ""),
            epoch_id=record.get("epoch", ""),
        )


@dataclass(frozen=True)
class PosteriorDraw:
    beta: np.ndarray = field(repr=False)
    sigma2: float = 0.0

    def __post_init__(self):
        if self.sigma2 < 0.0 or not np.all(np.isfinite(self.beta)):
            raise PosteriorError("invalid posterior draw")


def fit(X, y, *, covariate_names: tuple[str, ...] | None = None, area: str = "",
        horizon: str = "", epoch_id: str = "",
        cond_threshold: float = DEFAULT_COND_THRESHOLD) -> PosteriorSummary:
    """Solve the normal equations and collect the posterior's sufficient stats.

    Requires n > p and a design whose condition number stays below
    ``cond_threshold`` (nearly collinear covariates, e.g. a forward price
    that barely moves over a short epoch, are reported rather than fitted).
    """
    X = np.atleast_2d(np.asarray(X, dtype=float))
    y = np.asarray(y, dtype=float).ravel()
    n, p = X.shape
    if y.shape[0] != n:
        raise PosteriorError(f"X has {n} rows but y has {y.shape[0]}")
    if n <= p:
        raise RankDeficiencyError(f"need more rows than covariates to fit: n={n}, p={p}")
    if not (np.all(np.isfinite(X)) and np.all(np.isfinite(y))):
        raise PosteriorError("design matrix and response must be finite")
    cond = np.linalg.cond(X)
    if not np.isfinite(cond) or cond > cond_threshold:
        raise RankDeficiencyError(
            f"design condition number {cond:.3g} exceeds threshold {cond_threshold:.3g}"
        )
    if covariate_names is None:
        covariate_names = tuple(f"x{j}" for j in range(p))

    xtx = X.T @ X
    try:
        factor = scipy.linalg.cho_factor(xtx)
    except scipy.linalg.LinAlgError as exc:  # pragma: no cover - guarded by cond check
        raise RankDeficiencyError(f"X'X is not positive definite: {exc}") from exc
    beta_hat = scipy.linalg.cho_solve(factor, X.T @ y)
    xtx_inv = scipy.linalg.cho_solve(factor, np.eye(p))
    xtx_inv = (xtx_inv + xtx_inv.T) / 2.0

    resid = y - X @ beta_hat
    s2 = float(resid @ resid) / (n - p)
    return PosteriorSummary(
        beta_hat=beta_hat,
        xtx_inv=xtx_inv,
        s2=s2,
        dof=n - p,
        covariate_names=tuple(covariate_names),
        area=area,
        horizon=horizon,
        epoch_id=epoch_id,
    )


def sample_arrays(summary: PosteriorSummary, n_draws: int, rng) -> tuple[np.ndarray, np.ndarray]:
    """Vectorized draws: (betas [n, p], sigma2 [n]).

    Draw order per call is fixed (all chi-square variates, then all
    normals), which keeps results reproducible under a given stream.
    A zero residual variance yields the degenerate point-mass posterior.
    """
    if n_draws < 1:
        raise PosteriorError("n_draws must be at least 1")
    rng = as_generator(rng)
    p = summary.p
    if summary.s2 == 0.0:
        return np.tile(summary.beta_hat, (n_draws, 1)), np.zeros(n_draws)
    chi2 = rng.chisquare(summary.dof, size=n_draws)
    sigma2 = summary.dof * summary.s2 / chi2
    chol = np.linalg.cholesky(summary.xtx_inv)
    z = rng.standard_normal((n_draws, p))
    betas = summary.beta_hat + np.sqrt(sigma2)[:, None] * (z @ chol.T)
    return betas, sigma2


def sample(summary: PosteriorSummary, n_draws: int, rng) -> list[PosteriorDraw]:
    """i.i.d. joint posterior draws of (beta, sigma2), seed-reproducible."""
    betas, sigma2 = sample_arrays(summary, n_draws, rng)
    return [PosteriorDraw(beta=betas[i], sigma2=float(sigma2[i])) for i in range(n_draws)]
