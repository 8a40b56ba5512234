"""Prior families and their power-tempered variants.

The package works with three prior families:

* ``truncated-gaussian-diagonal`` -- independent Gaussians per dimension,
  truncated to a finite support box,
* ``gaussian-full-covariance`` -- a correlated Gaussian with unbounded
  support,
* ``uniform-box`` -- uniform over a finite box.

Raising a prior density to a power ``beta`` in [0, 1] and renormalising
interpolates between the original prior (beta = 1) and the flattest member
of the family (beta = 0: uniform on the box for bounded supports).  All the
tempering arithmetic here is closed form; quadrature oracles for it live in
the test suite.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.special import log_ndtr, ndtr, ndtri, ndtri_exp

from .errors import InvalidArgumentError, UnsupportedConfigurationError

TRUNCATED_GAUSSIAN_DIAGONAL = "truncated-gaussian-diagonal"
GAUSSIAN_FULL_COVARIANCE = "gaussian-full-covariance"
UNIFORM_BOX = "uniform-box"

#: Smallest admissible exponent for priors with unbounded support, below
#: which the tempered prior is no longer normalisable in practice.
DEFAULT_BETA_MIN_UNBOUNDED = 1e-3

#: Below this the beta -> 0 analytic (uniform) limit is substituted to avoid
#: dividing by sqrt(beta).
_BETA_ZERO_CUTOFF = 1e-12

_LOG_2PI = np.log(2.0 * np.pi)


def _gauss_log_mass(lo, hi):
    """log of the standard-normal mass on [lo, hi], stable in far tails.

    Reflects intervals in the upper tail onto the lower tail and forms the
    difference in log space, so e.g. mass([35, 40]) does not underflow to 0.
    """
    lo = np.asarray(lo, dtype=float)
    hi = np.asarray(hi, dtype=float)
    # Work on the side of the axis where ndtr is small.
    flip = lo + hi > 0.0
    lo_, hi_ = np.where(flip, -hi, lo), np.where(flip, -lo, hi)
    log_hi = log_ndtr(hi_)
    log_lo = log_ndtr(lo_)
    with np.errstate(divide="ignore"):
        out = log_hi + np.log1p(-np.exp(log_lo - log_hi))
    return out


def _truncnorm_ppf(u, mean, sigma, alpha, omega):
    """Inverse CDF of a truncated normal, vectorised over dimensions.

    ``alpha`` / ``omega`` are the standardised support bounds
    (lower - mean) / sigma and (upper - mean) / sigma.  Evaluated in log
    space through ``ndtri_exp`` so that supports lying many sigma from the
    mean still invert accurately.
    """
    u = np.asarray(u, dtype=float)
    flip = alpha + omega > 0.0
    a = np.where(flip, -omega, alpha)
    b = np.where(flip, -alpha, omega)
    uu = np.where(flip, 1.0 - u, u)
    log_mass = _gauss_log_mass(a, b)
    with np.errstate(divide="ignore"):
        target = np.logaddexp(log_ndtr(a), np.log(uu) + log_mass)
    z = ndtri_exp(target)
    z = np.clip(z, a, b)
    z = np.where(flip, -z, z)
    return mean + sigma * z


def _cholesky(matrix):
    try:
        return np.linalg.cholesky(matrix)
    except np.linalg.LinAlgError as exc:
        raise InvalidArgumentError(
            "covariance matrix is not symmetric positive-definite"
        ) from exc


@dataclass(frozen=True)
class PriorSpec:
    """Specification of an original (untempered) prior.

    ``scale`` holds per-dimension standard deviations in the diagonal case;
    ``covariance`` holds the full matrix otherwise.  ``support_lower`` /
    ``support_upper`` are ``None`` for unbounded support, which is only
    permitted for the full-covariance family.
    """

    kind: str
    mean: np.ndarray
    scale: np.ndarray | None = None
    covariance: np.ndarray | None = None
    support_lower: np.ndarray | None = None
    support_upper: np.ndarray | None = None
    beta_min: float = field(default=DEFAULT_BETA_MIN_UNBOUNDED)

    def __post_init__(self):
        object.__setattr__(self, "mean", np.atleast_1d(np.asarray(self.mean, float)))
        for name in ("scale", "covariance", "support_lower", "support_upper"):
            value = getattr(self, name)
            if value is not None:
                object.__setattr__(self, name, np.asarray(value, dtype=float))
        k = self.mean.size
        if self.kind == TRUNCATED_GAUSSIAN_DIAGONAL:
            if self.scale is None or self.scale.size != k:
                raise InvalidArgumentError("diagonal prior needs one scale per dimension")
            if np.any(self.scale <= 0.0):
                raise InvalidArgumentError("every scale entry must be > 0")
            if self.support_lower is None or self.support_upper is None:
                raise InvalidArgumentError("truncated prior needs a support box")
        elif self.kind == GAUSSIAN_FULL_COVARIANCE:
            if self.covariance is None or self.covariance.shape != (k, k):
                raise InvalidArgumentError("full-covariance prior needs a K x K matrix")
            if not np.allclose(self.covariance, self.covariance.T):
                raise InvalidArgumentError("covariance must be symmetric")
            _cholesky(self.covariance)
            if (self.support_lower is None) != (self.support_upper is None):
                raise InvalidArgumentError("support bounds must be given together")
            if self.support_lower is not None:
                raise UnsupportedConfigurationError(
                    "box-truncated full-covariance priors have no exact unit-cube "
                    "transform; use unbounded support"
                )
        elif self.kind == UNIFORM_BOX:
            if self.support_lower is None or self.support_upper is None:
                raise InvalidArgumentError("uniform prior needs a support box")
        else:
            raise InvalidArgumentError(f"unknown prior kind: {self.kind!r}")
        if self.support_lower is not None:
            if self.support_lower.size != k or self.support_upper.size != k:
                raise InvalidArgumentError("support bounds must match the dimension")
            if np.any(self.support_lower >= self.support_upper):
                raise InvalidArgumentError("support_lower must be < support_upper")
        self._build_caches()

    def _build_caches(self):
        """Precompute factorisations used on every density/transform call."""
        cache = {}
        if self.bounded:
            cache["log_box"] = float(
                np.sum(np.log(self.support_upper - self.support_lower)))
        if self.kind == TRUNCATED_GAUSSIAN_DIAGONAL:
            cache["alpha"] = (self.support_lower - self.mean) / self.scale
            cache["omega"] = (self.support_upper - self.mean) / self.scale
            cache["log_mass"] = _gauss_log_mass(cache["alpha"], cache["omega"])
            cache["log_scale"] = np.log(self.scale)
            cache["log_norm"] = float(np.sum(
                -0.5 * _LOG_2PI - cache["log_scale"] - cache["log_mass"]))
        elif self.kind == GAUSSIAN_FULL_COVARIANCE:
            chol = _cholesky(self.covariance)
            cache["chol"] = chol
            cache["log_det"] = float(2.0 * np.sum(np.log(np.diag(chol))))
            inv = np.linalg.inv(chol)
            cache["precision"] = inv.T @ inv
            cache["log_norm"] = float(
                -0.5 * self.dim * _LOG_2PI - 0.5 * cache["log_det"])
        object.__setattr__(self, "_cache", cache)

    @property
    def dim(self) -> int:
        return self.mean.size

    @property
    def bounded(self) -> bool:
        return self.support_lower is not None

    @classmethod
    def truncated_gaussian(cls, mean, scale, lower=-50.0, upper=50.0):
        mean = np.atleast_1d(np.asarray(mean, float))
        lower = np.broadcast_to(np.asarray(lower, float), mean.shape)
        upper = np.broadcast_to(np.asarray(upper, float), mean.shape)
        scale = np.broadcast_to(np.asarray(scale, float), mean.shape)
        return cls(TRUNCATED_GAUSSIAN_DIAGONAL, mean, scale=scale,
                   support_lower=lower, support_upper=upper)

    @classmethod
    def gaussian(cls, mean, covariance, beta_min=DEFAULT_BETA_MIN_UNBOUNDED):
        return cls(GAUSSIAN_FULL_COVARIANCE, mean, covariance=covariance,
                   beta_min=beta_min)

    @classmethod
    def uniform(cls, lower, upper):
        lower = np.atleast_1d(np.asarray(lower, float))
        upper = np.atleast_1d(np.asarray(upper, float))
        return cls(UNIFORM_BOX, 0.5 * (lower + upper),
                   support_lower=lower, support_upper=upper)


def _check_theta(prior: PriorSpec, theta) -> np.ndarray:
    theta = np.atleast_1d(np.asarray(theta, dtype=float))
    if theta.size != prior.dim:
        raise InvalidArgumentError(
            f"theta has dimension {theta.size}, prior expects {prior.dim}"
        )
    return theta


def check_beta(prior: PriorSpec, beta: float) -> float:
    beta = float(beta)
    if not 0.0 <= beta <= 1.0:
        raise InvalidArgumentError(f"beta must lie in [0, 1], got {beta}")
    if not prior.bounded and beta < prior.beta_min:
        raise UnsupportedConfigurationError(
            f"beta={beta} below beta_min={prior.beta_min} for unbounded support"
        )
    return beta


def _in_support(prior: PriorSpec, theta: np.ndarray) -> bool:
    if not prior.bounded:
        return True
    return bool(np.all(theta >= prior.support_lower)
                and np.all(theta <= prior.support_upper))


def log_density(prior: PriorSpec, theta) -> float:
    """log of the original prior density; -inf outside the support box."""
    theta = _check_theta(prior, theta)
    if not _in_support(prior, theta):
        return -np.inf
    cache = prior._cache
    if prior.kind == TRUNCATED_GAUSSIAN_DIAGONAL:
        z = (theta - prior.mean) / prior.scale
        return float(-0.5 * (z @ z)) + cache["log_norm"]
    if prior.kind == GAUSSIAN_FULL_COVARIANCE:
        diff = theta - prior.mean
        return float(-0.5 * (diff @ cache["precision"] @ diff)) \
            + cache["log_norm"]
    # uniform box
    return -cache["log_box"]


def log_power_norm(prior: PriorSpec, beta) -> float:
    """log of the tempered-prior normalisation, log int pi(theta)^beta dtheta.

    Closed form in every supported family; the beta -> 0 limit (box volume)
    is substituted analytically for bounded supports.
    """
    beta = check_beta(prior, beta)
    cache = prior._cache
    if prior.kind == UNIFORM_BOX:
        return (1.0 - beta) * cache["log_box"]
    if prior.kind == GAUSSIAN_FULL_COVARIANCE:
        k = prior.dim
        return float(0.5 * k * (1.0 - beta) * _LOG_2PI
                     + 0.5 * (1.0 - beta) * cache["log_det"]
                     - 0.5 * k * np.log(beta))
    # Diagonal truncated Gaussian: per-dimension closed form.
    if beta < _BETA_ZERO_CUTOFF:
        return cache["log_box"]
    root = np.sqrt(beta)
    log_mass_beta = _gauss_log_mass(root * cache["alpha"],
                                    root * cache["omega"])
    per_dim = (-beta * (cache["log_scale"] + cache["log_mass"])
               + 0.5 * (1.0 - beta) * _LOG_2PI
               + cache["log_scale"] - 0.5 * np.log(beta)
               + log_mass_beta)
    return float(np.sum(per_dim))


def transform_conditional(prior: PriorSpec, beta, u) -> np.ndarray:
    """Map a unit-cube point to a draw from the tempered prior at ``beta``.

    Deterministic: pushes the uniform distribution on the cube forward onto
    the tempered prior, and is strictly increasing per component in the
    diagonal case.
    """
    beta = check_beta(prior, beta)
    u = np.atleast_1d(np.asarray(u, dtype=float))
    if u.size != prior.dim:
        raise InvalidArgumentError(
            f"u has dimension {u.size}, prior expects {prior.dim}"
        )
    if np.any((u < 0.0) | (u > 1.0)):
        raise InvalidArgumentError("u components must lie in [0, 1]")
    if prior.kind == UNIFORM_BOX or (prior.bounded and beta < _BETA_ZERO_CUTOFF):
        return prior.support_lower + u * (prior.support_upper - prior.support_lower)
    if prior.kind == TRUNCATED_GAUSSIAN_DIAGONAL:
        root = np.sqrt(beta)
        cache = prior._cache
        return _truncnorm_ppf(u, prior.mean, prior.scale / root,
                              root * cache["alpha"], root * cache["omega"])
    # Full covariance, unbounded: componentwise probit then correlate.
    z = ndtri(u)
    return prior.mean + (prior._cache["chol"] @ z) / np.sqrt(beta)


def log_modified_prior_density(prior: PriorSpec, beta, theta) -> float:
    """log of the tempered, renormalised prior density at ``theta``."""
    beta = check_beta(prior, beta)
    theta = _check_theta(prior, theta)
    if not _in_support(prior, theta):
        return -np.inf
    if prior.bounded and beta < _BETA_ZERO_CUTOFF:
        return float(-np.sum(np.log(prior.support_upper - prior.support_lower)))
    return beta * log_density(prior, theta) - log_power_norm(prior, beta)


def prior_evolution(prior: PriorSpec, betas, grid) -> np.ndarray:
    """Tempered-density curves on a grid, one slice per exponent.

    Returns an array of (beta, theta, density) rows, ordered by the given
    betas and then by grid position.  Only defined for 1D priors.
    """
    if prior.dim != 1:
        raise UnsupportedConfigurationError("prior evolution curves are 1D only")
    grid = np.asarray(grid, dtype=float).ravel()
    rows = np.empty((len(betas) * grid.size, 3))
    for i, beta in enumerate(betas):
        dens = np.array([
            np.exp(log_modified_prior_density(prior, beta, np.array([t])))
            for t in grid
        ])
        block = rows[i * grid.size:(i + 1) * grid.size]
        block[:, 0] = beta
        block[:, 1] = grid
        block[:, 2] = dens
    return rows
