"""Effective likelihood construction and the joint (theta, beta) problem.

Tempering the prior by an exponent ``beta`` and absorbing the leftover
factor into the likelihood leaves the product (and hence the posterior and
evidence) unchanged:

    L(theta) pi(theta) = Leff(theta, beta) * pi(theta)^beta / Zpi(beta),
    Leff(theta, beta)  = L(theta) pi(theta)^(1-beta) Zpi(beta).

In ``auto`` mode the exponent is inferred jointly with theta under a uniform
prior on a configured range; the sampler then only populates betas below a
data-dependent ceiling, and the resulting effective evidence is corrected
back by the width of the populated beta interval.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from . import priors
from .errors import DegenerateBetaBoundsError, InvalidArgumentError
from .priors import PriorSpec

MODE_STANDARD = "standard"
MODE_FIXED_BETA = "fixed-beta"
MODE_AUTO = "auto"


@dataclass
class InferenceProblem:
    """A prior, a log-likelihood handle and a tempering mode.

    ``standard`` is exactly ``fixed-beta`` with exponent one.  In ``auto``
    mode the unit-cube dimension is one larger than the physical dimension:
    cube coordinate 0 carries the exponent.
    """

    prior: PriorSpec
    log_likelihood: Callable[[np.ndarray], float]
    mode: str = MODE_STANDARD
    fixed_beta: float = 1.0
    beta_range: tuple[float, float] = (0.0, 1.0)

    def __post_init__(self):
        if self.mode not in (MODE_STANDARD, MODE_FIXED_BETA, MODE_AUTO):
            raise InvalidArgumentError(f"unknown mode: {self.mode!r}")
        if self.mode == MODE_STANDARD:
            self.fixed_beta = 1.0
        lo, hi = self.beta_range
        if not (0.0 <= lo < hi <= 1.0):
            raise InvalidArgumentError(f"invalid beta range {self.beta_range}")
        if self.mode == MODE_AUTO and not self.prior.bounded:
            # Unbounded supports only admit exponents >= beta_min.
            lo = max(lo, self.prior.beta_min)
            self.beta_range = (lo, hi)
        if self.mode == MODE_FIXED_BETA:
            priors.check_beta(self.prior, self.fixed_beta)

    @property
    def dim(self) -> int:
        """Physical parameter dimension."""
        return self.prior.dim

    @property
    def total_dim(self) -> int:
        """Unit-cube dimension seen by the sampler."""
        return self.dim + (1 if self.mode == MODE_AUTO else 0)

    @property
    def has_beta(self) -> bool:
        return self.mode == MODE_AUTO


@dataclass(frozen=True)
class BetaBounds:
    """Smallest/largest exponent present in equal-weight posterior samples."""

    beta_minus: float
    beta_plus: float
    method: str = "sample-extrema"


def log_effective_likelihood(problem: InferenceProblem, theta, beta) -> float:
    """log Leff = log L + (1 - beta) log pi + log Zpi(beta).

    Returns -inf outside the prior support (this is a rejection, not an
    error); an inadmissible beta raises.
    """
    beta = priors.check_beta(problem.prior, beta)
    log_pi = priors.log_density(problem.prior, theta)
    if not np.isfinite(log_pi):
        return -np.inf
    log_like = problem.log_likelihood(np.atleast_1d(np.asarray(theta, float)))
    return (float(log_like) + (1.0 - beta) * log_pi
            + priors.log_power_norm(problem.prior, beta))


def joint_transform(problem: InferenceProblem, u) -> tuple[float, np.ndarray]:
    """Map a unit-cube point to (beta, theta).

    In ``auto`` mode coordinate 0 maps affinely onto the beta range (uniform
    exponent prior) and the rest pass through the tempered-prior transform at
    that beta; otherwise every coordinate is transformed at the fixed beta.
    """
    u = np.atleast_1d(np.asarray(u, dtype=float))
    if u.size != problem.total_dim:
        raise InvalidArgumentError(
            f"u has dimension {u.size}, problem expects {problem.total_dim}"
        )
    if problem.has_beta:
        lo, hi = problem.beta_range
        beta = lo + u[0] * (hi - lo)
        theta = priors.transform_conditional(problem.prior, beta, u[1:])
    else:
        beta = problem.fixed_beta
        theta = priors.transform_conditional(problem.prior, beta, u)
    return beta, theta


def beta_bounds(beta_samples, method="sample-extrema",
                percentiles=(1.0, 99.0)) -> BetaBounds:
    """Extract (beta_minus, beta_plus) from equal-weight beta samples."""
    betas = np.asarray(beta_samples, dtype=float).ravel()
    if betas.size == 0:
        raise InvalidArgumentError("beta_bounds needs at least one sample")
    if method == "sample-extrema":
        return BetaBounds(float(betas.min()), float(betas.max()), method)
    if method == "percentile":
        lo, hi = np.percentile(betas, percentiles)
        return BetaBounds(float(lo), float(hi),
                          f"percentile({percentiles[0]}, {percentiles[1]})")
    raise InvalidArgumentError(f"unknown beta-bounds method: {method!r}")


def corrected_log_evidence(log_z_eff: float, bounds: BetaBounds,
                           beta_range=(0.0, 1.0)) -> float:
    """Undo the top-hat restriction of the beta marginal.

    The sampler only populates exponents in [beta_minus, beta_plus], so its
    evidence is low by the fraction of the beta prior mass in that interval;
    with the full [0, 1] range the correction is -log(beta_plus - beta_minus).
    """
    width = bounds.beta_plus - bounds.beta_minus
    if width <= 0.0:
        raise DegenerateBetaBoundsError(
            f"degenerate beta bounds ({bounds.beta_minus}, {bounds.beta_plus})",
            uncorrected_log_z=log_z_eff,
        )
    lo, hi = beta_range
    return float(log_z_eff - np.log(width / (hi - lo)))
