"""Command-line entry point.

Exit codes: 0 success, 1 configuration error, 2 sampler stall (partial
results are still written).
"""

from __future__ import annotations

import dataclasses
import os
import sys

import click
import numpy as np
import yaml

from . import config as config_mod
from . import experiments, io, models, priors, repartition, sampler
from .errors import (DegenerateBetaBoundsError, InvalidArgumentError,
                     StalledSamplerError, UnsupportedConfigurationError)

DEFAULT_CURVE_BETAS = (1.0, 0.5, 0.25, 0.01, 0.0)


def _fail(message: str, code: int = 1):
    click.echo(f"error: {message}", err=True)
    sys.exit(code)


@click.group()
def main():
    """Nested sampling with power posterior repartitioning."""


@main.command("run")
@click.argument("config_path", type=click.Path(exists=True, dir_okay=False))
@click.option("--seed", type=int, default=None, help="Sampler seed override.")
@click.option("--nlive", type=int, default=None, help="Live-point override.")
@click.option("--efr", type=float, default=None, help="Efficiency override.")
@click.option("--tol", type=float, default=None, help="Tolerance override.")
@click.option("--mode", default=None,
              type=click.Choice(["standard", "fixed-beta", "auto"]))
@click.option("--out", default=None, type=click.Path(file_okay=False),
              help="Output directory override.")
@click.option("--beta-bounds", default=None,
              type=click.Choice(["extrema", "percentile"]))
def cmd_run(config_path, seed, nlive, efr, tol, mode, out, beta_bounds):
    """Execute one run described by a YAML config file."""
    try:
        cfg = config_mod.load_run_config(config_path)
    except (InvalidArgumentError, UnsupportedConfigurationError,
            yaml.YAMLError) as exc:
        _fail(str(exc))
    overrides = {"seed": seed, "n_live": nlive, "efr": efr, "tol": tol}
    overrides = {k: v for k, v in overrides.items() if v is not None}
    if overrides:
        cfg.sampler = dataclasses.replace(cfg.sampler, **overrides)
    if mode is not None:
        cfg.mode = mode
    if out is not None:
        cfg.out = out
    if beta_bounds is not None:
        cfg.beta_bounds = ("sample-extrema" if beta_bounds == "extrema"
                           else "percentile")

    try:
        data = models.simulate_dataset(cfg.model, cfg.theta_star,
                                       cfg.data_seed)
        problem = repartition.InferenceProblem(
            cfg.prior, models.likelihood_handle(cfg.model, data),
            mode=cfg.mode, fixed_beta=cfg.fixed_beta,
            beta_range=cfg.beta_range)
    except (InvalidArgumentError, UnsupportedConfigurationError) as exc:
        _fail(str(exc))

    stalled = False
    try:
        result = sampler.run(problem, cfg.sampler)
    except StalledSamplerError as exc:
        click.echo(f"sampler stalled: {exc}", err=True)
        result = exc.partial_result
        stalled = True

    summary = {
        "log_z": result.log_z,
        "log_z_corrected": None,
        "log_z_error": result.log_z_error,
        "n_like": result.n_like,
        "n_iter": result.n_iter,
        "beta_minus": None,
        "beta_plus": None,
        "termination": result.termination,
        "config": {
            "mode": cfg.mode,
            "fixed_beta": cfg.fixed_beta,
            "beta_range": list(cfg.beta_range),
            "beta_bounds": cfg.beta_bounds,
            "theta_star": cfg.theta_star.tolist(),
            "data_seed": cfg.data_seed,
            "sampler": dataclasses.asdict(cfg.sampler),
        },
    }
    os.makedirs(cfg.out, exist_ok=True)
    io.write_dead_points_csv(result, os.path.join(cfg.out, "dead_points.csv"))
    io.write_equal_weights_csv(
        result, os.path.join(cfg.out, "posterior_equal_weights.csv"),
        seed=cfg.sampler.seed + 5)
    if problem.has_beta:
        rng = np.random.default_rng(cfg.sampler.seed + 5)
        eq = sampler.equal_weight_samples(result, rng=rng)
        method = cfg.beta_bounds
        bounds = repartition.beta_bounds(eq[:, 0], method=method)
        summary["beta_minus"] = bounds.beta_minus
        summary["beta_plus"] = bounds.beta_plus
        try:
            summary["log_z_corrected"] = repartition.corrected_log_evidence(
                result.log_z, bounds, problem.beta_range)
        except DegenerateBetaBoundsError as exc:
            summary["log_z_corrected"] = None
            summary["termination"] += "; degenerate beta bounds"
    io.write_summary_json(io.json_safe(summary),
                          os.path.join(cfg.out, "summary.json"))
    click.echo(f"log_z={result.log_z:.4f} n_like={result.n_like} "
               f"termination={result.termination}")
    sys.exit(2 if stalled else 0)


@main.command("replicate")
@click.argument("suite")
@click.option("--out", default="out", type=click.Path(file_okay=False))
@click.option("--workers", default=1, type=int)
@click.option("--seed", default=None, type=int, help="Suite base seed.")
@click.option("--repetitions", default=10, type=int)
def cmd_replicate(suite, out, workers, seed, repetitions):
    """Run a named benchmark suite and emit its tables."""
    if suite not in experiments.SUITES:
        _fail(f"unknown suite {suite!r}; choose from "
              f"{', '.join(sorted(experiments.SUITES))}")
    experiments.run_suite(suite, out, workers=workers, base_seed=seed,
                          repetitions=repetitions)
    click.echo(f"suite {suite} written to {out}")


@main.command("sweep")
@click.argument("config_path", type=click.Path(exists=True, dir_okay=False))
@click.option("--out", default="out", type=click.Path(file_okay=False))
@click.option("--workers", default=1, type=int)
def cmd_sweep(config_path, out, workers):
    """Run a custom case sweep described by a YAML file.

    The file holds ``cases:``, a list of entries with ``name``, ``prior``,
    ``model``, ``theta_star`` and optional ``modes``, ``repetitions``,
    ``base_seed``, ``sampler``.
    """
    with open(config_path) as handle:
        raw = yaml.safe_load(handle) or {}
    entries = raw.get("cases", [])
    if not entries:
        _fail("sweep config contains no cases")
    cases = []
    try:
        for i, entry in enumerate(entries):
            cases.append(experiments.CaseSpec(
                name=entry.get("name", f"case{i}"),
                model=config_mod.parse_model(entry["model"]),
                prior=config_mod.parse_prior(entry["prior"]),
                theta_star=tuple(np.atleast_1d(entry["theta_star"]).tolist()),
                modes=tuple(entry.get("modes", ["auto"])),
                repetitions=int(entry.get("repetitions", 10)),
                base_seed=int(entry.get("base_seed", 1000 * i)),
                sampler=config_mod.parse_sampler(entry.get("sampler", {})),
            ))
    except (KeyError, InvalidArgumentError, UnsupportedConfigurationError) as exc:
        _fail(f"invalid sweep case: {exc}")
    os.makedirs(out, exist_ok=True)
    records = experiments.run_cases(cases, out_dir=out, workers=workers)
    experiments.write_suite_summary(records, cases, out, "sweep")
    experiments.write_markdown_summary(records, cases, out, "sweep")
    click.echo(f"sweep written to {out}")


@main.command("prior-curve")
@click.option("--config", "config_path", default=None,
              type=click.Path(exists=True, dir_okay=False),
              help="YAML file with a `prior:` section (defaults to the "
                   "sigma=4 prior on [-50, 50]).")
@click.option("--betas", default=",".join(str(b) for b in DEFAULT_CURVE_BETAS),
              help="Comma-separated exponent list.")
@click.option("--grid-points", default=501, type=int)
@click.option("--out", required=True, type=click.Path(dir_okay=False))
def cmd_prior_curve(config_path, betas, grid_points, out):
    """Write tempered-prior density curves as beta,theta,density CSV."""
    if config_path is not None:
        with open(config_path) as handle:
            raw = yaml.safe_load(handle) or {}
        try:
            prior = config_mod.parse_prior(raw.get("prior", {}))
        except (InvalidArgumentError, UnsupportedConfigurationError) as exc:
            _fail(str(exc))
    else:
        prior = priors.PriorSpec.truncated_gaussian([0.0], 4.0)
    try:
        beta_list = [float(b) for b in betas.split(",") if b.strip() != ""]
        grid = np.linspace(prior.support_lower[0], prior.support_upper[0],
                           grid_points)
        rows = priors.prior_evolution(prior, beta_list, grid)
    except (ValueError, UnsupportedConfigurationError) as exc:
        _fail(str(exc))
    io.write_csv(out, ["beta", "theta", "density"], rows)
    click.echo(f"wrote {len(rows)} rows to {out}")


if __name__ == "__main__":
    main()
