"""Seeded Monte Carlo drivers: full estimation runs, concentration rate
checks, and fixed-resolution risk curves.

Replicates are embarrassingly parallel; each derives its seed as
``base_seed + replicate_index`` so reruns and cross-``n`` comparisons pair up
exactly.  Reports split into a deterministic JSON part (config, records,
aggregates) and a CSV part that additionally carries wall-clock timings.
"""

from __future__ import annotations

import os
import subprocess
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from importlib import metadata
from pathlib import Path

import numpy as np

from .adapt import AdaptConfig, fit_all_resolutions, select_resolution
from .errors import DomainError
from .estimator import estimate_vector, fit_resolution
from .model import Envelope, generate_graph, probability_matrix, sample_latent
from .reports import write_csv, write_json
from .spaces import (
    HarmonicBasis,
    LatentSpace,
    cumulative_dim,
    envelope_coefficients,
    harmonic_basis,
)
from .spectral import delta2, eigenvalues_symmetric, operator_norm

__all__ = [
    "ExperimentConfig",
    "ExperimentReport",
    "run_experiment",
    "concentration_check",
    "risk_curve",
    "true_coefficients",
    "build_identifier",
]

_TRUTH_MAX_DEGREE = 64
_TRUTH_TAIL_TOL = 1e-12
_TRUTH_CHUNK = 8


def build_identifier() -> str:
    try:
        version = metadata.version("ngg")
    except metadata.PackageNotFoundError:
        version = "unpackaged"
    rev = "unknown"
    try:
        out = subprocess.run(
            ["git", "rev-parse", "--short", "HEAD"],
            cwd=Path(__file__).resolve().parent,
            capture_output=True,
            text=True,
            timeout=5,
        )
        if out.returncode == 0:
            rev = out.stdout.strip()
    except OSError:
        pass
    return f"ngg-{version}+{rev}"


def _worker_count(n_tasks: int) -> int:
    env = os.environ.get("NGG_THREADS")
    cap = int(env) if env else min(4, os.cpu_count() or 1)
    return max(1, min(n_tasks, cap))


def true_coefficients(
    basis: HarmonicBasis,
    envelope: Envelope,
    max_degree: int = _TRUTH_MAX_DEGREE,
    tail_tol: float = _TRUTH_TAIL_TOL,
) -> np.ndarray:
    """Reference expansion of the envelope, truncated at ``max_degree`` or as
    soon as a whole chunk of degrees carries weighted mass below ``tail_tol``."""
    max_degree = min(max_degree, basis.max_degree)
    top = min(_TRUTH_CHUNK, max_degree)
    coeffs = envelope_coefficients(basis, envelope, top)
    while top < max_degree:
        lo = top + 1
        top = min(top + _TRUTH_CHUNK, max_degree)
        coeffs = envelope_coefficients(basis, envelope, top)
        dims = np.asarray(basis.dims[lo : top + 1], dtype=float)
        if float(np.sum(dims * coeffs[lo:] ** 2)) < tail_tol:
            break
    return coeffs


def _expand(coeffs: np.ndarray, dims) -> np.ndarray:
    return np.repeat(coeffs, np.asarray(dims[: coeffs.size], dtype=int))


@dataclass(frozen=True)
class ExperimentConfig:
    space: LatentSpace
    envelope: Envelope
    n_values: tuple[int, ...]
    replicates: int
    r_max: int = 4
    kappa: float = 0.25
    base_seed: int = 0
    include_r0: bool = False

    def __post_init__(self):
        if self.replicates < 1:
            raise DomainError("replicates must be >= 1")
        if not self.n_values:
            raise DomainError("at least one graph size is required")
        need = 2 * cumulative_dim(self.space, self.r_max)
        for n in self.n_values:
            if n < max(need, 2):
                raise DomainError(
                    f"n = {n} violates n >= 2 * cum_dim(r_max) = {need}"
                )

    def to_dict(self) -> dict:
        d: dict = {
            "space": f"{self.space.kind.value}:{self.space.dim}",
            "envelope": self.envelope.name,
            "n_values": list(self.n_values),
            "replicates": self.replicates,
            "r_max": self.r_max,
            "kappa": self.kappa,
            "base_seed": self.base_seed,
            "include_r0": self.include_r0,
        }
        if self.envelope.known_coeffs is not None:
            d["envelope_coeffs"] = [
                [int(ell), float(v)] for ell, v in self.envelope.known_coeffs
            ]
        return d


def _graph_seed(rep_seed: int) -> int:
    # independent stream for the Bernoulli draws, reproducible from rep_seed
    return int(np.random.SeedSequence([rep_seed, 0x9E3779B9]).generate_state(1, np.uint64)[0])


@dataclass
class ExperimentReport:
    config: dict
    build: str
    truth: dict
    records: list
    aggregates: dict
    timings: list = field(default_factory=list)  # CSV-only, wall-clock per phase

    def to_json_dict(self) -> dict:
        return {
            "schema": 1,
            "kind": "simulation",
            "build": self.build,
            "config": self.config,
            "truth": self.truth,
            "records": self.records,
            "aggregates": self.aggregates,
        }

    def write(self, json_path, csv_path=None):
        write_json(json_path, self.to_json_dict())
        if csv_path is None:
            csv_path = Path(json_path).with_suffix(".csv")
        r_max = self.config["r_max"]
        header = ["n", "replicate", "seed", "selected_r", "delta2_selected_vs_truth"]
        header += [f"stage_{ell}_at_rmax" for ell in range(r_max + 1)]
        header += ["t_sample", "t_generate", "t_eig", "t_fit", "t_adapt"]
        rows = []
        timing = {(t["n"], t["replicate"]): t for t in self.timings}
        for rec in self.records:
            if "error" in rec:
                continue
            stages = next(f["stages"] for f in rec["fits"] if f["r"] == r_max)
            t = timing.get((rec["n"], rec["replicate"]), {})
            rows.append(
                [rec["n"], rec["replicate"], rec["seed"], rec["selected_r"],
                 rec["delta2_selected_vs_truth"]]
                + list(stages)
                + [t.get(k, float("nan")) for k in
                   ("t_sample", "t_generate", "t_eig", "t_fit", "t_adapt")]
            )
        write_csv(csv_path, header, rows)


def _one_replicate(config: ExperimentConfig, basis: HarmonicBasis, truth: np.ndarray,
                   n: int, rep: int):
    rep_seed = config.base_seed + rep
    gseed = _graph_seed(rep_seed)
    timing = {"n": n, "replicate": rep}
    t0 = time.perf_counter()
    latent = sample_latent(config.space, n, rep_seed)
    t1 = time.perf_counter()
    graph = generate_graph(latent, config.envelope, gseed, keep_theta=False)
    t2 = time.perf_counter()
    spectrum = eigenvalues_symmetric(graph.adjacency() / n)
    t3 = time.perf_counter()
    adapt_cfg = AdaptConfig(
        n=n, r_max=config.r_max, kappa=config.kappa, include_r0=config.include_r0
    )
    estimates = fit_all_resolutions(spectrum, basis, adapt_cfg)
    t4 = time.perf_counter()
    result = select_resolution(estimates, adapt_cfg, basis)
    t5 = time.perf_counter()
    timing.update(
        t_sample=t1 - t0, t_generate=t2 - t1, t_eig=t3 - t2, t_fit=t4 - t3, t_adapt=t5 - t4
    )
    truth_full = _expand(truth, basis.dims)
    fits = []
    for r in sorted(estimates):
        est = estimates[r]
        vec = estimate_vector(est, basis.dims)
        fits.append(
            {
                "r": r,
                "stages": [float(v) for v in est.stage_values],
                "score": float(est.score),
                "ordering": list(est.ordering),
                "delta2_vs_truth_r": delta2(vec, _expand(truth[: r + 1], basis.dims)),
                "delta2_vs_truth": delta2(vec, truth_full),
            }
        )
    sel_vec = estimate_vector(estimates[result.selected_r], basis.dims)
    record = {
        "n": n,
        "replicate": rep,
        "seed": rep_seed,
        "graph_seed": gseed,
        "edge_count": graph.edge_count(),
        "selected_r": result.selected_r,
        "gl_rows": [[row.r, row.bias, row.penalty, row.objective] for row in result.rows],
        "fits": fits,
        "delta2_selected_vs_truth": delta2(sel_vec, truth_full),
    }
    return record, timing


def run_experiment(config: ExperimentConfig) -> ExperimentReport:
    """Sample, generate, eigendecompose, fit every candidate resolution,
    select, and record -- for every (n, replicate) pair.

    A failing replicate is recorded with its error message; it never aborts
    the rest of the run.
    """
    basis = harmonic_basis(config.space, max(_TRUTH_MAX_DEGREE, config.r_max))
    truth = true_coefficients(basis, config.envelope)
    tasks = [(n, rep) for n in config.n_values for rep in range(config.replicates)]
    results: dict[tuple[int, int], tuple] = {}

    def run(task):
        n, rep = task
        try:
            return task, _one_replicate(config, basis, truth, n, rep)
        except Exception as exc:  # recorded, not swallowed
            return task, (
                {"n": n, "replicate": rep, "seed": config.base_seed + rep,
                 "error": f"{type(exc).__name__}: {exc}"},
                {"n": n, "replicate": rep},
            )

    workers = _worker_count(len(tasks))
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            for task, payload in pool.map(run, tasks):
                results[task] = payload
    else:
        for task in tasks:
            results[task] = run(task)[1]

    records = [results[t][0] for t in sorted(results)]
    timings = [results[t][1] for t in sorted(results)]
    aggregates = _aggregate(config, basis, truth, records)
    return ExperimentReport(
        config=config.to_dict(),
        build=build_identifier(),
        truth={
            "max_degree": truth.size - 1,
            "dims": list(basis.dims[: truth.size]),
            "coefficients": [float(v) for v in truth],
        },
        records=records,
        aggregates=aggregates,
        timings=timings,
    )


def _aggregate(config: ExperimentConfig, basis: HarmonicBasis, truth: np.ndarray, records):
    per_n = {}
    grid = list(range(0 if config.include_r0 else 1, config.r_max + 1))
    for n in config.n_values:
        recs = [r for r in records if r.get("n") == n and "error" not in r]
        if not recs:
            per_n[str(n)] = {"replicates_ok": 0}
            continue
        d2 = np.asarray([r["delta2_selected_vs_truth"] for r in recs])
        hist = {}
        for r in recs:
            hist[str(r["selected_r"])] = hist.get(str(r["selected_r"]), 0) + 1
        risk_fixed = {}
        for rr in grid:
            vals = [f["delta2_vs_truth_r"] for rec in recs for f in rec["fits"] if f["r"] == rr]
            risk_fixed[str(rr)] = float(np.mean(np.square(vals)))
        stages_rmax = np.asarray(
            [next(f["stages"] for f in rec["fits"] if f["r"] == config.r_max) for rec in recs]
        )
        bias = stages_rmax.mean(axis=0) - truth[: config.r_max + 1]
        per_n[str(n)] = {
            "replicates_ok": len(recs),
            "mean_sq_delta2_selected": float(np.mean(d2**2)),
            "median_sq_delta2_selected": float(np.median(d2**2)),
            "selected_r_histogram": hist,
            "risk_fixed": risk_fixed,
            "coef_bias_at_rmax": [float(v) for v in bias],
        }
    agg = {"per_n": per_n}
    ok_ns = [n for n in config.n_values if per_n[str(n)].get("replicates_ok")]
    if len(ok_ns) >= 2:
        xs = np.log(np.asarray(ok_ns, dtype=float))
        ys = np.log(
            np.asarray([per_n[str(n)]["mean_sq_delta2_selected"] for n in ok_ns])
        )
        slope = float(np.polyfit(xs, ys, 1)[0])
        agg["rate"] = {"log_slope_mean_sq_delta2_selected": slope}
    return agg


# ---------------------------------------------------------------------------
# concentration and risk diagnostics


@dataclass(frozen=True)
class ConcentrationTable:
    rows: tuple[dict, ...]          # one per n: means over replicates
    op_norm: dict                   # (n, rep) -> ||A/n - theta/n||
    spectrum_error: dict            # (n, rep) -> delta2(spec(theta/n), truth)
    slopes: dict

    def to_json_dict(self) -> dict:
        return {
            "schema": 1,
            "kind": "concentration",
            "rows": list(self.rows),
            "slopes": self.slopes,
        }


def concentration_check(
    envelope: Envelope,
    space: LatentSpace,
    n_values,
    replicates: int,
    seed: int,
) -> ConcentrationTable:
    """Empirical operator-norm error of A/n around theta/n and spectrum error
    of theta/n against the reference expansion, with log-log slope fits."""
    basis = harmonic_basis(space, _TRUTH_MAX_DEGREE)
    truth = _expand(true_coefficients(basis, envelope), basis.dims)
    op: dict[tuple[int, int], float] = {}
    sperr: dict[tuple[int, int], float] = {}
    tasks = [(int(n), rep) for n in n_values for rep in range(replicates)]

    def run(task):
        n, rep = task
        rep_seed = seed + rep
        latent = sample_latent(space, n, rep_seed)
        theta = probability_matrix(latent, envelope)
        graph = generate_graph(latent, envelope, _graph_seed(rep_seed), keep_theta=False)
        diff = (graph.adjacency() - theta) / n
        o = operator_norm(diff)
        s = delta2(eigenvalues_symmetric(theta / n).values, truth)
        return task, o, s

    workers = _worker_count(len(tasks))
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            for task, o, s in pool.map(run, tasks):
                op[task] = o
                sperr[task] = s
    else:
        for task in tasks:
            _, o, s = run(task)
            op[task] = o
            sperr[task] = s

    rows = []
    for n in n_values:
        n = int(n)
        rows.append(
            {
                "n": n,
                "mean_op_norm_error": float(np.mean([op[(n, r)] for r in range(replicates)])),
                "mean_delta2_theta_spectrum": float(
                    np.mean([sperr[(n, r)] for r in range(replicates)])
                ),
            }
        )
    slopes = {}
    if len(rows) >= 2:
        xs = np.log([row["n"] for row in rows])
        for key in ("mean_op_norm_error", "mean_delta2_theta_spectrum"):
            ys = [row[key] for row in rows]
            if all(v > 0 for v in ys):
                slopes[key] = float(np.polyfit(xs, np.log(ys), 1)[0])
    return ConcentrationTable(
        rows=tuple(rows), op_norm=op, spectrum_error=sperr, slopes=slopes
    )


def risk_curve(config: ExperimentConfig):
    """Mean squared spectrum error of the fixed-resolution fit, per (n, r):
    the empirical bias/variance trade-off behind the adaptive selection."""
    basis = harmonic_basis(config.space, max(_TRUTH_MAX_DEGREE, config.r_max))
    truth = true_coefficients(basis, config.envelope)
    grid = list(range(0 if config.include_r0 else 1, config.r_max + 1))
    rows = []
    for n in config.n_values:
        errs = {r: [] for r in grid}
        for rep in range(config.replicates):
            rep_seed = config.base_seed + rep
            latent = sample_latent(config.space, n, rep_seed)
            graph = generate_graph(latent, config.envelope, _graph_seed(rep_seed),
                                   keep_theta=False)
            spectrum = eigenvalues_symmetric(graph.adjacency() / n)
            for r in grid:
                est = fit_resolution(spectrum, basis, r)
                vec = estimate_vector(est, basis.dims)
                errs[r].append(delta2(vec, _expand(truth[: r + 1], basis.dims)) ** 2)
        for r in grid:
            rows.append({"n": int(n), "r": r, "mean_sq_delta2": float(np.mean(errs[r]))})
    return rows
