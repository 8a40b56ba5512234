"""Benchmark suites: univariate sweep, bivariate priors, 3D-10D scaling.

Each case is a (model, prior, truth, mode set) bundle run over several
repetitions with deterministic derived seeds.  Per-repetition records are
plain dicts so they serialise to a resumable JSONL journal; aggregation is
order-independent.
"""

from __future__ import annotations

import json
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace

import numpy as np

from . import io, models, repartition, sampler
from .errors import DegenerateBetaBoundsError, StalledSamplerError
from .models import GaussianMeasurementModel
from .priors import PriorSpec
from .repartition import InferenceProblem
from .sampler import SamplerConfig

_MODE_OFFSET = {"standard": 1, "fixed-beta": 2, "auto": 3}


@dataclass(frozen=True)
class CaseSpec:
    name: str
    model: GaussianMeasurementModel
    prior: PriorSpec
    theta_star: tuple
    modes: tuple = ("auto",)
    fixed_beta: float = 1.0
    repetitions: int = 10
    base_seed: int = 0
    beta_range: tuple = (0.0, 1.0)
    sampler: SamplerConfig = field(default_factory=SamplerConfig)
    bounds_method: str = "sample-extrema"

    def data_seed(self, rep: int) -> int:
        return self.base_seed + 101 * rep + 1

    def sampler_seed(self, rep: int, mode: str) -> int:
        return self.base_seed + 101 * rep + 10 * _MODE_OFFSET[mode]


@dataclass
class CaseStats:
    """Aggregates for one (case, mode) pair over its repetitions."""

    case: str
    mode: str
    repetitions: int
    failures: int
    rmse: float                 # of the posterior-mean estimator
    log_z_mean: float           # converged repetitions only
    #: spread of (log Z - per-dataset oracle) over converged repetitions;
    #: this isolates sampler noise from dataset-to-dataset evidence shifts
    log_z_sd: float
    log_z_as_terminated_mean: float  # all repetitions, raw value at exit
    oracle_log_z_mean: float
    n_like_mean: float
    n_like_min: int
    n_like_max: int
    beta_minus: list
    beta_plus: list
    max_abs_corr: float


def run_repetition(case: CaseSpec, rep: int) -> list[dict]:
    """Simulate one dataset and run every requested mode on it."""
    data = models.simulate_dataset(case.model, np.asarray(case.theta_star),
                                   case.data_seed(rep))
    oracle = models.oracle_log_evidence(case.model, data, case.prior)
    post = models.analytic_posterior(case.model, data, case.prior)
    loglike = models.likelihood_handle(case.model, data)
    records = []
    for mode in case.modes:
        problem = InferenceProblem(case.prior, loglike, mode=mode,
                                   fixed_beta=case.fixed_beta,
                                   beta_range=case.beta_range)
        config = replace(case.sampler, seed=case.sampler_seed(rep, mode))
        failed = False
        try:
            result = sampler.run(problem, config)
        except StalledSamplerError as exc:
            result = exc.partial_result
            failed = True
        rec = {
            "case": case.name,
            "rep": rep,
            "mode": mode,
            "termination": result.termination,
            "failed": failed,
            "n_like": result.n_like,
            "n_iter": result.n_iter,
            "log_z_raw": result.log_z,
            "log_z": result.log_z,
            "log_z_error": result.log_z_error,
            "oracle_log_z": oracle,
            "post_mean": post.mean.tolist(),
            "post_sd": np.sqrt(np.diag(post.cov)).tolist(),
        }
        p = result.importance_weights
        theta_cols = result.all_params[:, 1:] if result.has_beta \
            else result.all_params
        theta_hat = p @ theta_cols
        rec["theta_hat"] = theta_hat.tolist()
        rec["sq_err"] = float(np.mean((theta_hat - post.mean) ** 2))
        if result.has_beta:
            rng = np.random.default_rng(case.sampler_seed(rep, mode) + 5)
            eq = sampler.equal_weight_samples(result, rng=rng)
            bounds = repartition.beta_bounds(eq[:, 0],
                                             method=case.bounds_method)
            rec["beta_minus"] = bounds.beta_minus
            rec["beta_plus"] = bounds.beta_plus
            # A larger resample for the correlation diagnostic: the extra
            # draws suppress resampling noise without touching the beta
            # bounds above.
            eq_corr = sampler.equal_weight_samples(result, count=5000,
                                                   rng=rng)
            corr = [float(np.corrcoef(eq_corr[:, 0],
                                      eq_corr[:, 1 + k])[0, 1])
                    for k in range(case.prior.dim)]
            rec["beta_theta_corr"] = corr
            rec["max_abs_corr"] = max(abs(c) for c in corr)
            try:
                rec["log_z"] = repartition.corrected_log_evidence(
                    result.log_z, bounds, problem.beta_range)
            except DegenerateBetaBoundsError:
                rec["failed"] = True
        records.append(rec)
    return records


def _journal_path(out_dir):
    return os.path.join(out_dir, "records.jsonl")


def _load_journal(out_dir):
    path = _journal_path(out_dir)
    records = []
    if os.path.exists(path):
        with open(path) as handle:
            for line in handle:
                line = line.strip()
                if line:
                    records.append(json.loads(line))
    return records


def run_cases(cases, out_dir=None, workers=1, resume=True) -> list[dict]:
    """Run every (case, repetition) pair, journaling results for resume."""
    done = {}
    if out_dir and resume:
        for rec in _load_journal(out_dir):
            done.setdefault((rec["case"], rec["rep"]), []).append(rec)
    pending = [(case, rep) for case in cases for rep in range(case.repetitions)
               if (case.name, rep) not in done]
    fresh = {}
    if workers > 1 and pending:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            for (case, rep), recs in zip(
                    pending, pool.map(run_repetition,
                                      [c for c, _ in pending],
                                      [r for _, r in pending])):
                fresh[(case.name, rep)] = recs
    else:
        for case, rep in pending:
            fresh[(case.name, rep)] = run_repetition(case, rep)
    if out_dir and fresh:
        os.makedirs(out_dir, exist_ok=True)
        with open(_journal_path(out_dir), "a") as handle:
            for key in sorted(fresh):
                for rec in fresh[key]:
                    handle.write(json.dumps(io.json_safe(rec)) + "\n")
    records = []
    for case in cases:
        for rep in range(case.repetitions):
            key = (case.name, rep)
            records.extend(done.get(key) or fresh.get(key, []))
    return records


def aggregate(records, case_name: str, mode: str) -> CaseStats:
    recs = sorted((r for r in records
                   if r["case"] == case_name and r["mode"] == mode),
                  key=lambda r: r["rep"])
    if not recs:
        raise ValueError(f"no records for case {case_name!r} mode {mode!r}")
    ok = [r for r in recs if not r["failed"]]
    log_z = np.array([r["log_z"] for r in ok]) if ok else np.array([np.nan])
    err = (np.array([r["log_z"] - r["oracle_log_z"] for r in ok])
           if ok else np.array([np.nan]))
    n_like = np.array([r["n_like"] for r in recs])
    return CaseStats(
        case=case_name,
        mode=mode,
        repetitions=len(recs),
        failures=sum(r["failed"] for r in recs),
        rmse=float(np.sqrt(np.mean([r["sq_err"] for r in recs]))),
        log_z_mean=float(np.mean(log_z)),
        log_z_sd=float(np.std(err, ddof=1)) if err.size > 1 else 0.0,
        log_z_as_terminated_mean=float(np.mean(
            [_as_float(r["log_z_raw"]) for r in recs])),
        oracle_log_z_mean=float(np.mean([r["oracle_log_z"] for r in recs])),
        n_like_mean=float(n_like.mean()),
        n_like_min=int(n_like.min()),
        n_like_max=int(n_like.max()),
        beta_minus=[r.get("beta_minus") for r in recs],
        beta_plus=[r.get("beta_plus") for r in recs],
        max_abs_corr=float(max((r.get("max_abs_corr", 0.0) for r in recs),
                               default=0.0)),
    )


def _as_float(value):
    # json round-trips -inf as the string '-inf'
    return float(value)


# ---------------------------------------------------------------------------
# Suite definitions

UNIVARIATE_THETA_STARS = tuple(range(5, 55, 5))
BIVARIATE_UNCORRELATED_SCALES = ((4.0, 4.0), (2.0, 4.0), (2.0, 2.0))
BIVARIATE_RHOS = (-0.75, -0.5, -0.25, 0.0, 0.25, 0.5, 0.75)
HIGHDIM_DIMS = tuple(range(3, 11))


def univariate_cases(base_seed=20250, repetitions=10,
                     modes=("standard", "auto")) -> list[CaseSpec]:
    """Truth sweep 5..50 with a zero-mean sigma=4 prior on [-50, 50]."""
    model = GaussianMeasurementModel.isotropic(1, 20, 1.0)
    prior = PriorSpec.truncated_gaussian([0.0], 4.0)
    return [
        CaseSpec(name=f"theta{t}", model=model, prior=prior,
                 theta_star=(float(t),), modes=tuple(modes),
                 repetitions=repetitions, base_seed=base_seed + 100_000 * i)
        for i, t in enumerate(UNIVARIATE_THETA_STARS)
    ]


def bivariate_cases(base_seed=30250, repetitions=10) -> list[CaseSpec]:
    """Truth (40, 40), N=1, unit noise; varying unrepresentative priors."""
    model = GaussianMeasurementModel.isotropic(2, 1, 1.0)
    cases = []
    for i, (s1, s2) in enumerate(BIVARIATE_UNCORRELATED_SCALES):
        prior = PriorSpec.truncated_gaussian([0.0, 0.0], [s1, s2])
        cases.append(CaseSpec(
            name=f"uncorr_{s1:g}_{s2:g}", model=model, prior=prior,
            theta_star=(40.0, 40.0), repetitions=repetitions,
            base_seed=base_seed + 100_000 * i))
    for j, rho in enumerate(BIVARIATE_RHOS):
        cov = 16.0 * np.array([[1.0, rho], [rho, 1.0]])
        prior = PriorSpec.gaussian([0.0, 0.0], cov)
        cases.append(CaseSpec(
            name=f"corr_{rho:+.2f}", model=model, prior=prior,
            theta_star=(40.0, 40.0), repetitions=repetitions,
            base_seed=base_seed + 100_000 * (10 + j)))
    return cases


def highdim_cases(base_seed=40250, repetitions=10) -> list[CaseSpec]:
    """3D to 10D versions of the bivariate setup with diagonal priors."""
    cases = []
    for i, dim in enumerate(HIGHDIM_DIMS):
        model = GaussianMeasurementModel.isotropic(dim, 1, 1.0)
        prior = PriorSpec.truncated_gaussian(np.zeros(dim), 4.0)
        cases.append(CaseSpec(
            name=f"dim{dim}", model=model, prior=prior,
            theta_star=tuple([40.0] * dim), repetitions=repetitions,
            base_seed=base_seed + 100_000 * i))
    return cases


SUITES = {
    "univariate": univariate_cases,
    "bivariate": bivariate_cases,
    "highdim": highdim_cases,
}


# ---------------------------------------------------------------------------
# Table emission

def write_univariate_tables(records, cases, out_dir) -> None:
    t1, rmse_rows, nlike_rows = [], [], []
    for case, theta in zip(cases, UNIVARIATE_THETA_STARS):
        auto = aggregate(records, case.name, "auto")
        sns = aggregate(records, case.name, "standard")
        t1.append([theta, auto.oracle_log_z_mean, auto.log_z_mean,
                   sns.log_z_as_terminated_mean, auto.log_z_sd,
                   float(np.mean(auto.beta_plus))])
        rmse_rows.append([theta, sns.rmse, auto.rmse])
        nlike_rows.append([theta, sns.n_like_mean, auto.n_like_mean])
    io.write_csv(os.path.join(out_dir, "table1.csv"),
                 ["theta_star", "true_log_z", "autopr_mean", "sns_mean",
                  "autopr_sd", "beta_plus_mean"], t1)
    io.write_csv(os.path.join(out_dir, "fig4_rmse.csv"),
                 ["theta_star", "standard_rmse", "autopr_rmse"], rmse_rows)
    io.write_csv(os.path.join(out_dir, "fig4_nlike.csv"),
                 ["theta_star", "standard_nlike_mean", "autopr_nlike_mean"],
                 nlike_rows)


def write_bivariate_tables(records, cases, out_dir) -> None:
    t2, t3 = [], []
    for case in cases:
        stats = aggregate(records, case.name, "auto")
        row = [stats.oracle_log_z_mean, stats.log_z_mean, stats.log_z_sd,
               stats.rmse, float(np.mean(stats.beta_plus))]
        if case.name.startswith("uncorr"):
            t2.append([case.name.split("uncorr_")[1].replace("_", "x")] + row)
        else:
            t3.append([float(case.name.split("corr_")[1])] + row)
    header = ["true_log_z", "autopr_mean", "autopr_sd", "rmse",
              "beta_plus_mean"]
    io.write_csv(os.path.join(out_dir, "table2.csv"), ["prior"] + header, t2)
    io.write_csv(os.path.join(out_dir, "table3.csv"), ["rho"] + header, t3)


def write_highdim_table(records, cases, out_dir) -> None:
    rows = []
    for case, dim in zip(cases, HIGHDIM_DIMS):
        stats = aggregate(records, case.name, "auto")
        recs = [r for r in records if r["case"] == case.name and not r["failed"]]
        errors = [abs(r["log_z"] - r["oracle_log_z"]) for r in recs]
        rows.append([dim, float(np.mean(stats.beta_plus)),
                     float(np.std(stats.beta_plus, ddof=1)),
                     stats.rmse, float(np.median(errors)),
                     stats.n_like_mean, stats.n_like_min, stats.n_like_max])
    io.write_csv(os.path.join(out_dir, "highdim_stats.csv"),
                 ["dim", "beta_plus_mean", "beta_plus_sd", "rmse",
                  "abs_log_z_error_median", "n_like_mean", "n_like_min",
                  "n_like_max"], rows)


def write_suite_summary(records, cases, out_dir, suite_name) -> None:
    summary = {"suite": suite_name, "cases": {}}
    for case in cases:
        summary["cases"][case.name] = {
            mode: io.json_safe(vars(aggregate(records, case.name, mode)))
            for mode in case.modes
        }
    io.write_summary_json(io.json_safe(summary),
                          os.path.join(out_dir, "suite_summary.json"))


def write_markdown_summary(records, cases, out_dir, suite_name) -> None:
    lines = [f"# Suite: {suite_name}", ""]
    lines.append("| case | mode | true logZ | mean logZ | sd | RMSE | "
                 "mean N_like | beta+ | failures |")
    lines.append("|---|---|---|---|---|---|---|---|---|")
    for case in cases:
        for mode in case.modes:
            s = aggregate(records, case.name, mode)
            bplus = [b for b in s.beta_plus if b is not None]
            bp = f"{np.mean(bplus):.3f}" if bplus else "-"
            mean = (s.log_z_mean if mode == "auto"
                    else s.log_z_as_terminated_mean)
            lines.append(
                f"| {case.name} | {mode} | {s.oracle_log_z_mean:.4f} | "
                f"{mean:.4f} | {s.log_z_sd:.4f} | {s.rmse:.4f} | "
                f"{s.n_like_mean:.0f} | {bp} | {s.failures} |")
    io.atomic_write_text(os.path.join(out_dir, "summary.md"),
                         "\n".join(lines) + "\n")


def run_suite(suite_name, out_dir, workers=1, base_seed=None,
              repetitions=10, resume=True) -> list[dict]:
    """Run a named suite end to end and emit its CSV/JSON artifacts."""
    if suite_name not in SUITES:
        raise ValueError(f"unknown suite: {suite_name!r}")
    kwargs = {"repetitions": repetitions}
    if base_seed is not None:
        kwargs["base_seed"] = base_seed
    cases = SUITES[suite_name](**kwargs)
    os.makedirs(out_dir, exist_ok=True)
    records = run_cases(cases, out_dir=out_dir, workers=workers, resume=resume)
    if suite_name == "univariate":
        write_univariate_tables(records, cases, out_dir)
    elif suite_name == "bivariate":
        write_bivariate_tables(records, cases, out_dir)
    else:
        write_highdim_table(records, cases, out_dir)
    write_suite_summary(records, cases, out_dir, suite_name)
    write_markdown_summary(records, cases, out_dir, suite_name)
    return records
