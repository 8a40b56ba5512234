"""Run-configuration parsing: YAML files to validated domain objects.

Unknown keys are rejected by name so typos fail loudly before any sampling
starts.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import yaml

from .errors import InvalidArgumentError
from .models import GaussianMeasurementModel
from .priors import DEFAULT_BETA_MIN_UNBOUNDED, PriorSpec
from .sampler import SamplerConfig

_PRIOR_KEYS = {"kind", "mean", "scale", "covariance", "support", "beta_min"}
_MODEL_KEYS = {"dim", "n_obs", "noise_sigma", "noise_mean", "noise_cov"}
_SAMPLER_KEYS = {"n_live", "efr", "tol", "seed", "max_iterations",
                 "max_draw_attempts", "ridge"}
_RUN_KEYS = {"prior", "model", "theta_star", "data_seed", "mode",
             "fixed_beta", "beta_range", "beta_bounds", "sampler", "out"}


def _reject_unknown(section: dict, allowed: set, context: str) -> None:
    unknown = set(section) - allowed
    if unknown:
        raise InvalidArgumentError(
            f"unknown key(s) in {context}: {', '.join(sorted(unknown))}")


def parse_prior(section: dict) -> PriorSpec:
    _reject_unknown(section, _PRIOR_KEYS, "prior")
    kind = section.get("kind", "truncated-gaussian-diagonal")
    mean = np.atleast_1d(np.asarray(section.get("mean", [0.0]), float))
    if kind == "truncated-gaussian-diagonal":
        support = section.get("support", [-50.0, 50.0])
        return PriorSpec.truncated_gaussian(
            mean, section.get("scale", 1.0),
            lower=support[0], upper=support[1])
    if kind == "gaussian-full-covariance":
        if "covariance" not in section:
            raise InvalidArgumentError("prior.covariance is required")
        return PriorSpec.gaussian(
            mean, np.asarray(section["covariance"], float),
            beta_min=section.get("beta_min", DEFAULT_BETA_MIN_UNBOUNDED))
    if kind == "uniform-box":
        support = section.get("support", [-50.0, 50.0])
        shape = mean.shape
        return PriorSpec.uniform(np.broadcast_to(support[0], shape),
                                 np.broadcast_to(support[1], shape))
    raise InvalidArgumentError(f"unknown prior kind: {kind!r}")


def parse_model(section: dict) -> GaussianMeasurementModel:
    _reject_unknown(section, _MODEL_KEYS, "model")
    if "dim" not in section or "n_obs" not in section:
        raise InvalidArgumentError("model.dim and model.n_obs are required")
    dim = int(section["dim"])
    if "noise_cov" in section:
        cov = np.asarray(section["noise_cov"], float)
    else:
        cov = float(section.get("noise_sigma", 1.0)) ** 2 * np.eye(dim)
    return GaussianMeasurementModel(dim, int(section["n_obs"]),
                                    noise_mean=section.get("noise_mean"),
                                    noise_cov=cov)


def parse_sampler(section: dict) -> SamplerConfig:
    _reject_unknown(section, _SAMPLER_KEYS, "sampler")
    return SamplerConfig(**section)


@dataclass
class RunConfig:
    prior: PriorSpec
    model: GaussianMeasurementModel
    theta_star: np.ndarray
    data_seed: int = 1
    mode: str = "auto"
    fixed_beta: float = 1.0
    beta_range: tuple = (0.0, 1.0)
    beta_bounds: str = "sample-extrema"
    sampler: SamplerConfig = field(default_factory=SamplerConfig)
    out: str = "."


def parse_run_config(raw: dict) -> RunConfig:
    if not isinstance(raw, dict):
        raise InvalidArgumentError("config must be a mapping")
    _reject_unknown(raw, _RUN_KEYS, "config")
    for required in ("prior", "model", "theta_star"):
        if required not in raw:
            raise InvalidArgumentError(f"missing required key: {required}")
    mode = raw.get("mode", "auto")
    if mode not in ("standard", "fixed-beta", "auto"):
        raise InvalidArgumentError(f"unknown mode: {mode!r}")
    bounds = raw.get("beta_bounds", "sample-extrema")
    if bounds not in ("sample-extrema", "percentile"):
        raise InvalidArgumentError(f"unknown beta_bounds method: {bounds!r}")
    return RunConfig(
        prior=parse_prior(raw["prior"]),
        model=parse_model(raw["model"]),
        theta_star=np.atleast_1d(np.asarray(raw["theta_star"], float)),
        data_seed=int(raw.get("data_seed", 1)),
        mode=mode,
        fixed_beta=float(raw.get("fixed_beta", 1.0)),
        beta_range=tuple(raw.get("beta_range", (0.0, 1.0))),
        beta_bounds=bounds,
        sampler=parse_sampler(raw.get("sampler", {})),
        out=raw.get("out", "."),
    )


def load_run_config(path: str) -> RunConfig:
    with open(path) as handle:
        raw = yaml.safe_load(handle)
    return parse_run_config(raw or {})
