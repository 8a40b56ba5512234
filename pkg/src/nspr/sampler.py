"""Nested-sampling engine with a single-ellipsoid constrained sampler.

The run operates entirely in the unit hypercube: points map to physical
parameters through the problem's joint transform, and replacements are drawn
uniformly from an enlarged bounding ellipsoid of the live points intersected
with the cube.  Prior-volume shrinkage is deterministic, X_i = exp(-i/N),
and all evidence arithmetic is done in log space.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .errors import (InternalInvariantError, InvalidArgumentError,
                     StalledSamplerError)
from .repartition import InferenceProblem, joint_transform, log_effective_likelihood

TERMINATION_CONVERGED = "converged"
TERMINATION_STALLED = "stalled"
TERMINATION_MAX_ITERATIONS = "max-iterations"


@dataclass(frozen=True)
class SamplerConfig:
    n_live: int = 100
    efr: float = 0.8
    tol: float = 0.5
    max_iterations: int = 1_000_000
    max_draw_attempts: int = 5000
    seed: int = 0
    ridge: float = 1e-12

    def __post_init__(self):
        if self.n_live < 2:
            raise InvalidArgumentError("n_live must be >= 2")
        if not 0.0 < self.efr <= 1.0:
            raise InvalidArgumentError("efr must lie in (0, 1]")
        if self.tol <= 0.0:
            raise InvalidArgumentError("tol must be positive")


class LivePoint(NamedTuple):
    u: np.ndarray
    params: np.ndarray  # (beta, theta...) in auto mode, theta otherwise
    log_like: float


@dataclass
class RunResult:
    """Archive and summary of one nested-sampling run.

    ``dead_*`` arrays are ordered by iteration; ``live_*`` hold the final
    live set, whose members carry the residual weight X_I / n_live.
    ``importance_weights`` concatenates dead then live and sums to one.
    """

    log_z: float
    log_z_error: float
    n_like: int
    n_iter: int
    termination: str
    param_names: list[str]
    dead_params: np.ndarray
    dead_log_like: np.ndarray
    dead_log_weight: np.ndarray
    live_params: np.ndarray
    live_log_like: np.ndarray
    live_log_weight: np.ndarray
    has_beta: bool

    @property
    def all_params(self) -> np.ndarray:
        return np.vstack([self.dead_params, self.live_params])

    @property
    def all_log_like(self) -> np.ndarray:
        return np.concatenate([self.dead_log_like, self.live_log_like])

    @property
    def all_log_weight(self) -> np.ndarray:
        return np.concatenate([self.dead_log_weight, self.live_log_weight])

    @property
    def importance_weights(self) -> np.ndarray:
        with np.errstate(invalid="ignore"):
            log_p = self.all_log_like + self.all_log_weight - self.log_z
        return np.where(np.isfinite(log_p), np.exp(log_p), 0.0)

    @property
    def effective_sample_size(self) -> float:
        p = self.importance_weights
        return float(1.0 / np.sum(p * p))

    def beta_samples(self, count=None, rng=None) -> np.ndarray:
        if not self.has_beta:
            raise InvalidArgumentError("run has no inferred exponent")
        return equal_weight_samples(self, count, rng)[:, 0]


def bounding_ellipsoid(points, efr=1.0, ridge=1e-12, enlarge=1.0):
    """Covariance ellipsoid scaled to contain every point, then enlarged.

    Returns (center, shape) with the ellipsoid {x : (x-c)^T shape^-1 (x-c)
    <= 1}.  The volume is enlarged by ``enlarge / efr`` (linear scale to the
    1/dim power); a ridge keeps degenerate clouds sampleable.
    """
    points = np.atleast_2d(np.asarray(points, float))
    n, dim = points.shape
    if n < dim + 1:
        raise InvalidArgumentError(
            f"need at least dim+1={dim + 1} points, got {n}")
    center = points.mean(axis=0)
    cov = np.cov(points, rowvar=False).reshape(dim, dim)
    scale = max(np.trace(cov) / dim, 1.0)
    for _ in range(40):
        try:
            np.linalg.cholesky(cov)
            break
        except np.linalg.LinAlgError:
            cov = cov + ridge * scale * np.eye(dim)
            ridge *= 10.0
    diff = points - center
    maha = np.einsum("ij,ij->i", diff, np.linalg.solve(cov, diff.T).T)
    k = maha.max()
    if k <= 0.0:
        return center, ridge * scale * np.eye(dim)
    factor = (enlarge / efr) ** (2.0 / dim)
    return center, cov * k * factor


def sample_in_ellipsoid(center, shape, rng, max_tries=100_000, chol=None):
    """Uniform draw from an ellipsoid intersected with the unit cube.

    Draws landing outside the cube are rejected and redrawn; they never cost
    a likelihood evaluation.  ``chol`` may carry a precomputed Cholesky
    factor of ``shape`` for tight loops.
    """
    center = np.asarray(center, float)
    dim = center.size
    if chol is None:
        chol = np.linalg.cholesky(np.asarray(shape, float))
    inv_dim = 1.0 / dim
    for _ in range(max_tries):
        z = rng.standard_normal(dim)
        z *= rng.random() ** inv_dim / np.sqrt(z @ z)
        x = center + chol @ z
        # Strict inequalities: rounding can land exactly on the boundary,
        # where the inverse-CDF transform would pin the support edge.
        if x.min() > 0.0 and x.max() < 1.0:
            return x
    raise StalledSamplerError("ellipsoid-cube intersection appears empty")


def draw_constrained(live_u, threshold, problem: InferenceProblem,
                     config: SamplerConfig, rng):
    """Replacement draw with log-likelihood strictly above ``threshold``.

    On exhausting ``max_draw_attempts`` the ellipsoid enlargement is doubled,
    up to three times, before giving up.  Returns (point, n_evals).
    """
    n_evals = 0
    for doubling in range(4):
        center, shape = bounding_ellipsoid(
            live_u, efr=config.efr, ridge=config.ridge,
            enlarge=float(2 ** doubling))
        chol = np.linalg.cholesky(shape)
        for _ in range(config.max_draw_attempts):
            u = sample_in_ellipsoid(center, shape, rng, chol=chol)
            beta, theta = joint_transform(problem, u)
            log_like = log_effective_likelihood(problem, theta, beta)
            n_evals += 1
            if log_like > threshold:
                params = (np.concatenate([[beta], theta])
                          if problem.has_beta else theta)
                return LivePoint(u, params, float(log_like)), n_evals
    err = StalledSamplerError(
        f"no replacement above threshold {threshold} after "
        f"{n_evals} evaluations")
    err.n_evals = n_evals
    raise err


def _finalize(problem, config, n_like, n_iter, termination,
              dead_params, dead_log_like, dead_log_weight,
              live_u, live_params, live_log_like, log_z_dead):
    n_live = config.n_live
    log_x_final = -n_iter / n_live
    live_log_weight = np.full(n_live, log_x_final - np.log(n_live))
    finite = np.isfinite(live_log_like)
    log_z = log_z_dead
    if np.any(finite):
        log_z = np.logaddexp(
            log_z,
            _logsumexp(live_log_like[finite] + live_log_weight[finite]))
    dim = problem.dim
    names = [f"theta_{k + 1}" for k in range(dim)]
    if problem.has_beta:
        names = ["beta"] + names
    result = RunResult(
        log_z=float(log_z),
        log_z_error=0.0,
        n_like=n_like,
        n_iter=n_iter,
        termination=termination,
        param_names=names,
        dead_params=np.array(dead_params).reshape(len(dead_params),
                                                  problem.total_dim),
        dead_log_like=np.asarray(dead_log_like, float),
        dead_log_weight=np.asarray(dead_log_weight, float),
        live_params=np.asarray(live_params, float),
        live_log_like=np.asarray(live_log_like, float),
        live_log_weight=live_log_weight,
        has_beta=problem.has_beta,
    )
    result.log_z_error = log_z_error(result, n_live)
    return result


def _logsumexp(values):
    values = np.asarray(values, float)
    if values.size == 0:
        return -np.inf
    m = values.max()
    if not np.isfinite(m):
        return m
    return m + np.log(np.sum(np.exp(values - m)))


def log_z_error(result: RunResult, n_live=None) -> float:
    """sqrt(H / n_live) with H the information of the weighted archive."""
    if n_live is None:
        n_live = result.live_log_like.size
    p = result.importance_weights
    log_like = result.all_log_like
    mask = p > 0.0
    h = float(np.sum(p[mask] * (log_like[mask] - result.log_z)))
    return float(np.sqrt(max(h, 0.0) / n_live))


def run(problem: InferenceProblem, config: SamplerConfig) -> RunResult:
    """Execute one nested-sampling run.

    Raises ``StalledSamplerError`` (carrying the partial result) when a
    replacement cannot be found or the iteration cap is hit.
    """
    rng = np.random.default_rng(config.seed)
    n_live = config.n_live
    dim = problem.total_dim

    live_u = rng.random((n_live, dim))
    live_params = np.empty((n_live, dim))
    live_log_like = np.empty(n_live)
    n_like = 0
    for n in range(n_live):
        beta, theta = joint_transform(problem, live_u[n])
        live_params[n] = (np.concatenate([[beta], theta])
                          if problem.has_beta else theta)
        live_log_like[n] = log_effective_likelihood(problem, theta, beta)
        n_like += 1

    dead_params, dead_log_like, dead_log_weight = [], [], []
    log_z = -np.inf
    log_tol = np.log(config.tol)
    # log of (1 - exp(-2/N)) / 2: the constant factor in the trapezoid weight
    log_w_const = np.log1p(-np.exp(-2.0 / n_live)) - np.log(2.0)

    i = 0
    termination = TERMINATION_MAX_ITERATIONS
    while i < config.max_iterations:
        i += 1
        worst = int(np.argmin(live_log_like))  # ties: lowest index
        log_w = -(i - 1) / n_live + log_w_const
        worst_log_like = float(live_log_like[worst])
        if np.isfinite(worst_log_like):
            log_z = np.logaddexp(log_z, worst_log_like + log_w)
        dead_params.append(live_params[worst].copy())
        dead_log_like.append(worst_log_like)
        dead_log_weight.append(log_w)

        log_x = -i / n_live
        max_log_like = float(live_log_like.max())
        if max_log_like + log_x < log_tol + log_z:
            termination = TERMINATION_CONVERGED
            break

        try:
            point, evals = draw_constrained(
                live_u, worst_log_like, problem, config, rng)
        except StalledSamplerError as exc:
            n_like += getattr(exc, "n_evals", 0)
            partial = _finalize(
                problem, config, n_like, i, TERMINATION_STALLED,
                dead_params, dead_log_like, dead_log_weight,
                live_u, live_params, live_log_like, log_z)
            raise StalledSamplerError(str(exc), partial_result=partial) from exc
        n_like += evals
        live_u[worst] = point.u
        live_params[worst] = point.params
        live_log_like[worst] = point.log_like
    else:
        partial = _finalize(
            problem, config, n_like, i, TERMINATION_MAX_ITERATIONS,
            dead_params, dead_log_like, dead_log_weight,
            live_u, live_params, live_log_like, log_z)
        raise StalledSamplerError(
            f"max_iterations={config.max_iterations} exceeded",
            partial_result=partial)

    return _finalize(problem, config, n_like, i, termination,
                     dead_params, dead_log_like, dead_log_weight,
                     live_u, live_params, live_log_like, log_z)


def equal_weight_samples(result: RunResult, count=None, rng=None) -> np.ndarray:
    """Systematic resampling of the archive proportional to importance weight."""
    p = result.importance_weights
    total = p.sum()
    if abs(total - 1.0) > 1e-8:
        raise InternalInvariantError(
            f"importance weights sum to {total}, expected 1")
    if count is None:
        count = max(int(round(result.effective_sample_size)), 1)
    if rng is None:
        rng = np.random.default_rng(0)
    positions = (np.arange(count) + rng.random()) / count
    cumulative = np.cumsum(p)
    cumulative[-1] = 1.0
    idx = np.searchsorted(cumulative, positions)
    return result.all_params[idx]
