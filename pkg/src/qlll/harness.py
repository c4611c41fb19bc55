"""
Experiment orchestration shared by the command line and the test-suite.

Every trial is a pure function of (config, trial index): its generator is
keyed by ``seed ^ trial``. Workers only change scheduling, never results.
"""
from __future__ import annotations

import csv
import io
import json
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from typing import Any

from scipy import stats

from . import __version__
from .decompose import hybrid_certificate, hybrid_threshold, region_report
from .ensembles import edge_count, make_rng, random_instance, sample_gknm, trial_seed
from .matching import hall_matching
from .qsat import dumps_instance

__all__ = [
    "CSV_FIELDS",
    "GenConfig",
    "MonteCarloConfig",
    "generate_instance_text",
    "run_trial",
    "run_montecarlo",
    "rows_to_csv",
    "summary_to_json",
    "wilson_interval",
]

CSV_FIELDS = ("trial", "seed", "n", "k", "alpha", "D", "v_h_size", "h_size", "l_size",
              "matching_pass", "degree_pass", "hybrid_pass", "gamma", "epsilon0",
              "ms_elapsed")


@dataclass(frozen=True)
class GenConfig:
    n: int
    k: int
    alpha: float
    seed: int

    def __post_init__(self):
        if self.n < 1 or self.k < 1 or self.k > self.n:
            raise ValueError("need 1 <= k <= n")
        if self.alpha < 0:
            raise ValueError("alpha must be non-negative")


def generate_instance_text(cfg: GenConfig) -> str:
    inst = random_instance(cfg.n, cfg.alpha, cfg.k, make_rng(cfg.seed))
    meta = {"generator": "qlll", "version": __version__, "ensemble": "G_k(n,m)",
            "config": asdict(cfg)}
    return dumps_instance(inst, meta)


@dataclass(frozen=True)
class MonteCarloConfig:
    mode: str
    n: int
    k: int
    alphas: tuple[float, ...]
    trials: int
    seed: int
    D: float | None = None
    workers: int = 1
    timings: bool = False
    ensemble: str = field(default="G_k(n,m)", init=False)

    def __post_init__(self):
        if self.mode not in ("matching", "hybrid"):
            raise ValueError(f"unknown mode {self.mode!r}")
        if self.trials < 1:
            raise ValueError("trials must be at least 1")
        if self.n < 1 or not 1 <= self.k <= self.n:
            raise ValueError("need 1 <= k <= n")
        if not self.alphas or any(a < 0 for a in self.alphas):
            raise ValueError("alphas must be non-empty and non-negative")
        if len(set(self.alphas)) != len(self.alphas):
            raise ValueError("alphas must be distinct")
        if self.workers < 1:
            raise ValueError("workers must be positive")

    def resolved_D(self) -> float:
        return hybrid_threshold(self.k) if self.D is None else self.D


def run_trial(cfg: MonteCarloConfig, alpha: float, trial: int) -> dict[str, Any]:
    t0 = time.perf_counter()
    g = sample_gknm(cfg.n, edge_count(cfg.n, alpha), cfg.k, make_rng(cfg.seed, trial))
    row: dict[str, Any] = dict.fromkeys(CSV_FIELDS, "")
    row.update(trial=trial, seed=trial_seed(cfg.seed, trial), n=cfg.n, k=cfg.k, alpha=alpha)
    if cfg.mode == "matching":
        row["matching_pass"] = int(hall_matching(g.edges.tolist(), g.n_vertices).perfect)
    else:
        D = cfg.resolved_D()
        cert = hybrid_certificate(g, D)
        p = cert.partition
        row.update(D=D, v_h_size=len(p.v_h), h_size=len(p.h_edges), l_size=len(p.l_edges),
                   matching_pass=int(cert.matching.perfect), degree_pass=int(cert.l_degree_ok),
                   hybrid_pass=int(cert.passed))
        if cfg.k >= 3:
            rep = region_report(cfg.n, cfg.k, alpha, D, p)
            row.update(gamma=rep.gamma, epsilon0=rep.epsilon0)
    if cfg.timings:
        row["ms_elapsed"] = round((time.perf_counter() - t0) * 1000, 3)
    return row


def _job(args):
    cfg, alpha, trial = args
    return run_trial(cfg, alpha, trial)


def wilson_interval(passes: int, trials: int, confidence: float = 0.95) -> tuple[float, float]:
    ci = stats.binomtest(passes, trials).proportion_ci(confidence_level=confidence,
                                                      method="wilson")
    return float(ci.low), float(ci.high)


def run_montecarlo(cfg: MonteCarloConfig) -> tuple[list[dict[str, Any]], dict[str, Any]]:
    """All trials for every alpha, in trial-index order, plus a summary."""
    jobs = [(cfg, a, i * cfg.trials + j) for i, a in enumerate(cfg.alphas)
            for j in range(cfg.trials)]
    if cfg.workers == 1:
        rows = [_job(j) for j in jobs]
    else:
        with ProcessPoolExecutor(max_workers=cfg.workers) as pool:
            rows = list(pool.map(_job, jobs, chunksize=max(1, len(jobs) // (4 * cfg.workers))))
    key = "matching_pass" if cfg.mode == "matching" else "hybrid_pass"
    groups = []
    for a in cfg.alphas:
        sel = [r for r in rows if r["alpha"] == a]
        passes = sum(int(r[key]) for r in sel)
        lo, hi = wilson_interval(passes, len(sel))
        g: dict[str, Any] = {"alpha": a, "trials": len(sel), "passes": passes,
                             "rate": passes / len(sel), "wilson95": [lo, hi]}
        if cfg.mode == "hybrid":
            g["max_v_h_size"] = max(r["v_h_size"] for r in sel)
            if cfg.k >= 3:
                g["vh_within_2eps0_in_passing"] = sum(
                    1 for r in sel if r[key] and r["v_h_size"] <= 2 * r["epsilon0"] * cfg.n)
        groups.append(g)
    config = {k: v for k, v in asdict(cfg).items() if k not in ("workers", "timings")}
    config["alphas"] = list(cfg.alphas)
    config["D"] = cfg.resolved_D() if cfg.mode == "hybrid" else None
    summary = {"generator": "qlll", "version": __version__, "config": config,
               "pass_field": key, "groups": groups}
    return rows, summary


def rows_to_csv(rows: list[dict[str, Any]]) -> str:
    buf = io.StringIO()
    w = csv.DictWriter(buf, fieldnames=CSV_FIELDS, lineterminator="\n")
    w.writeheader()
    for r in rows:
        w.writerow({k: repr(v) if isinstance(v, float) else v for k, v in r.items()})
    return buf.getvalue()


def summary_to_json(summary: dict[str, Any]) -> str:
    return json.dumps(summary, indent=2) + "\n"
