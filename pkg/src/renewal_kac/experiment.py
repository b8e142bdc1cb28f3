"""Seeded, replicated experiments and their JSON reports.

Replicate ``r`` at scale index ``n`` always draws from
``RngStream(seed).child(n).child(r)``, so results do not depend on the order
in which replicates run, on the worker count, or on which other ``n`` values
share the config.
"""

from __future__ import annotations

import json
import math
import os
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass
from typing import Any

import numpy as np

from . import __version__
from .config import ExperimentConfig
from .distributions import InterArrivalLaw, certify, kac_constant
from .kac_stroock import (
    KacProcessParams,
    PathEvaluation,
    evaluate_path,
    phi_branch_holds,
    phi_n,
    r_tilde_tilde_values,
    sup_remainder,
)
from .renewal import simulate_path
from .rng import RngStream
from .stats import (
    SampleSet,
    covariance_grid,
    increment_independence_check,
    ks_normal,
    sup_norm_stats,
)

THREADS_ENV = "RENEWAL_KS_THREADS"
KS_ALPHA = 0.01
COVARIANCE_Z = 3.0
INCREMENT_Z = 3.0
LLN_EVENT_FREQUENCY = 0.05
QUANTILES = (0.05, 0.5, 0.95)


@dataclass
class Replicate:
    evaluation: PathEvaluation
    sup_remainder_exact: float
    bound_violations: int
    branch_holds: bool
    composition_mismatches: int


@dataclass
class ExperimentReport:
    config: dict[str, Any]
    hypotheses: dict[str, Any]
    results: list[dict[str, Any]]
    assertions: list[dict[str, Any]]
    toolkit_version: str = __version__
    wall_clock_seconds: float = 0.0

    @property
    def passed(self) -> bool:
        return all(a["passed"] for a in self.assertions)

    def to_dict(self) -> dict[str, Any]:
        return asdict(self)

    def render(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True, allow_nan=False) + "\n"

    @classmethod
    def parse(cls, text: str) -> "ExperimentReport":
        return cls(**json.loads(text))


def worker_count() -> int:
    raw = os.environ.get(THREADS_ENV)
    if raw:
        try:
            return max(1, int(raw))
        except ValueError:
            pass
    return os.cpu_count() or 1


def hypotheses_status(law: InterArrivalLaw, p: float) -> dict[str, Any]:
    """Check the moment condition ``E[U**p] < inf`` (``p > 2``) and a finite, positive variance."""
    cert = certify(law, p)
    var = law.variance
    within = cert.finite and math.isfinite(var) and var > 0
    status = {
        "law": law.to_spec(),
        "mean": law.mean,
        "variance": var if math.isfinite(var) else "infinite",
        "moment_certificate": cert.to_dict(),
        "within_hypotheses": within,
    }
    if not within:
        status["flag"] = "outside theorem hypotheses"
    return status


def _finite(x: float) -> float | None:
    return float(x) if math.isfinite(x) else None


def _quantiles(values: np.ndarray) -> dict[str, Any]:
    qs = np.quantile(values, QUANTILES)
    out = {f"q{int(q * 100):02d}": float(v) for q, v in zip(QUANTILES, qs)}
    out["mean"] = float(np.mean(values))
    return out


def run_replicate(
    law: InterArrivalLaw,
    params: KacProcessParams,
    grid: int,
    stream: RngStream,
    extra_times: tuple[float, ...] = (),
) -> Replicate:
    path = simulate_path(law, params.n, stream)
    ev = evaluate_path(path, params, grid, metadata={"stream": stream.provenance()}, extra_times=extra_times)
    violations = int(np.count_nonzero(np.abs(ev.r_values) > ev.r_tilde_values))
    holds = phi_branch_holds(path, params)
    mismatches = 0
    if holds:
        phi = phi_n(path, params, law.mean, ev.grid)
        composed = r_tilde_tilde_values(path.inter_arrivals, params, phi)
        mismatches = int(np.count_nonzero(composed != ev.r_tilde_values))
    return Replicate(ev, sup_remainder(path, params), violations, holds, mismatches)


def simulate_replicates(
    law: InterArrivalLaw,
    params: KacProcessParams,
    replicates: int,
    grid: int,
    seed: int,
    threads: int | None = None,
    extra_times: tuple[float, ...] = (),
) -> list[Replicate]:
    base = RngStream(seed).child(params.n)
    streams = [base.child(r) for r in range(replicates)]
    threads = threads or worker_count()
    if threads == 1:
        return [run_replicate(law, params, grid, s, extra_times) for s in streams]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(lambda s: run_replicate(law, params, grid, s, extra_times), streams))


def _diagnostics(config: ExperimentConfig, law: InterArrivalLaw, params: KacProcessParams, reps: list[Replicate]):
    checks = set(config.checks)
    m = len(reps)
    evals = [r.evaluation for r in reps]
    entry: dict[str, Any] = {"n": params.n, "C": params.C, "M": m, "seed": config.seed, "stream_path": [params.n]}
    asserts: list[dict[str, Any]] = []

    def check(name: str, passed: bool, detail: str):
        asserts.append({"n": params.n, "name": name, "passed": bool(passed), "detail": detail})

    if "ks" in checks:
        if m >= 10:
            ks = []
            for t in config.ks_times:
                values = SampleSet([e.x_values[np.searchsorted(e.grid, t)] for e in evals], f"X_n({t}), n={params.n}")
                res = ks_normal(values, t)
                ks.append({**res.to_dict(), "t": t, "n": params.n, "seed": config.seed})
                check(f"ks t={t}", res.p_value > KS_ALPHA, f"D={res.statistic:.5f} p={res.p_value:.4f}")
            entry["ks"] = ks
        else:
            entry["ks"] = "skipped: fewer than 10 replicates"

    if "covariance" in checks:
        if m >= 2:
            cov = covariance_grid(evals, config.covariance_times)
            target = np.minimum.outer(cov.times, cov.times)
            z = cov.z_scores(target)
            worst = float(np.max(np.abs(z)))
            entry["covariance"] = {
                "times": cov.times.tolist(),
                "estimate": cov.matrix.tolist(),
                "stderr": cov.stderr.tolist(),
                "target": target.tolist(),
                "max_abs_z": _finite(worst),
                "min_eigenvalue": cov.min_eigenvalue(),
            }
            check("covariance", worst <= COVARIANCE_Z, f"max |z| = {worst:.3f}")
        else:
            entry["covariance"] = "skipped: fewer than 2 replicates"

    if "remainder" in checks:
        violations = sum(r.bound_violations for r in reps)
        entry["remainder"] = {
            "bound_violations": violations,
            "sup_r_grid": _quantiles(sup_norm_stats(evals, "r").values),
            "sup_r_exact": _quantiles(np.array([r.sup_remainder_exact for r in reps])),
            "sup_r_tilde_grid": _quantiles(np.array([np.max(e.r_tilde_values) for e in evals])),
            "sup_x_grid": _quantiles(sup_norm_stats(evals, "x").values),
        }
        check("remainder bound", violations == 0, f"{violations} grid points with |R_n| > R~_n")

    if "increments" in checks:
        if m >= 3:
            corr, se = increment_independence_check(evals, tuple(config.increments))
            entry["increments"] = {"quadruple": list(config.increments), "corr": _finite(corr), "stderr": se}
            check("increments", abs(corr) <= INCREMENT_Z * se, f"corr = {corr:.4f}, 3/sqrt(M) = {3 * se:.4f}")
        else:
            entry["increments"] = "skipped: fewer than 3 replicates"

    if "composition" in checks:
        held = sum(r.branch_holds for r in reps)
        mismatches = sum(r.composition_mismatches for r in reps)
        freq = (m - held) / m
        entry["composition"] = {
            "replicates_with_branch": held,
            "replicates_without_branch": m - held,
            "frequency_without_branch": freq,
            "grid_mismatches": mismatches,
        }
        check("composition identity", mismatches == 0, f"{mismatches} mismatching grid points over {held} replicates")
        # The event L(n) <= n only becomes likely when the mean inter-arrival exceeds 1.
        if law.mean > 1:
            check("composition event frequency", freq < LLN_EVENT_FREQUENCY, f"P(L(n) > n) ~ {freq:.4f}")

    if config.record_paths:
        entry["paths"] = [{"t": e.grid.tolist(), "x": e.x_values.tolist(), "w": e.w_values.tolist(), "r": e.r_values.tolist()} for e in evals]
    return entry, asserts


def run_experiment(config: ExperimentConfig, threads: int | None = None) -> ExperimentReport:
    """Simulate, evaluate and diagnose every ``n`` in the config.

    Errors from the law (e.g. :class:`DegenerateLaw`) or path construction
    propagate; no partial report is produced.
    """
    start = time.perf_counter()
    law = config.build_law()
    constant = config.C if config.C is not None else kac_constant(law)
    probes = tuple(sorted(set(config.ks_times) | set(config.covariance_times) | set(config.increments)))
    results, assertions = [], []
    for n in config.n_values:
        params = KacProcessParams(n, constant)
        reps = simulate_replicates(law, params, config.replicates, config.grid, config.seed, threads, probes)
        entry, asserts = _diagnostics(config, law, params, reps)
        results.append(entry)
        assertions.extend(asserts)
    return ExperimentReport(
        config=config.to_dict(),
        hypotheses=hypotheses_status(law, config.moment_p),
        results=results,
        assertions=assertions,
        wall_clock_seconds=time.perf_counter() - start,
    )
