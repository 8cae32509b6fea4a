"""Replicated failure sweeps joined with analytic predictions, plus CSV I/O.

Every random stream is split off the base seed by a counter path
``(beta index, p index, replicate index)``, so cells can run in any order
or in parallel and still give identical tables.
"""
from __future__ import annotations

import csv
import dataclasses
import json
import logging
import math
import platform
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import __version__
from .analytic import (
    BETA_0,
    NoCriticalPoint,
    PlnParams,
    SurvivorPrediction,
    alpha_for_size,
    critical_failure_rate,
    giant_fraction_beta2,
    predict,
    surviving_degree_count,
)
from .failsim import ComponentCensus, census_components, draw_failure_mask, giant_decay_ratio
from .graphgen import RNG_ALGORITHM, generate_graph

METRICS = (
    "giant_size",
    "second_size",
    "orphan_count",
    "survivors_outside_giant",
    "total_survivors",
    "unorphaned_survivors",
    "failed_count",
    "giant_decay_ratio",
    "giant_fraction_of_survivors",
)

PREDICTION_FIELDS = ("beta_prime", "alpha_prime", "chi", "xi", "expected_orphans", "expected_survivors", "has_giant")


log = logging.getLogger(__name__)


class SweepAborted(RuntimeError):
    pass


@dataclass(frozen=True)
class SweepConfig:
    betas: tuple
    p_values: tuple
    target_nodes: int = 100_000
    replicates: int = 20
    base_seed: int = 0
    histogram_mode: str = "deterministic"

    def __post_init__(self):
        object.__setattr__(self, "betas", tuple(float(b) for b in self.betas))
        object.__setattr__(self, "p_values", tuple(float(p) for p in self.p_values))
        if self.replicates < 1:
            raise ValueError("replicates must be at least 1")
        if self.target_nodes < 1:
            raise ValueError("target_nodes must be at least 1")
        if not self.betas or not self.p_values:
            raise ValueError("sweep needs at least one beta and one p")
        for b in self.betas:
            if not b > 1:
                raise ValueError(f"every beta must exceed 1, got {b}")
        for p in self.p_values:
            if not 0 <= p < 1:
                raise ValueError(f"every p must lie in [0, 1), got {p}")
        if self.histogram_mode not in ("deterministic", "stochastic"):
            raise ValueError(f"unknown histogram mode {self.histogram_mode!r}")
        if not 0 <= int(self.base_seed) < 2**64:
            raise ValueError("base_seed must fit in 64 unsigned bits")

    def cell_seed(self, beta_index: int, p_index: int, replicate: int) -> np.random.SeedSequence:
        return np.random.SeedSequence(int(self.base_seed), spawn_key=(beta_index, p_index, replicate))


@dataclass(frozen=True)
class SweepRecord:
    beta: float
    alpha: float
    p: float
    replicates: int
    num_vertices: float
    mean: dict
    std: dict
    prediction: SurvivorPrediction
    p_critical: float
    replicate_censuses: tuple | None = field(default=None, compare=False, repr=False)

    def row(self) -> dict:
        out = {
            "beta": self.beta,
            "alpha": self.alpha,
            "p": self.p,
            "replicates": self.replicates,
            "num_vertices": self.num_vertices,
        }
        for name in METRICS:
            out[f"mean_{name}"] = self.mean[name]
            out[f"std_{name}"] = self.std[name]
        for name in PREDICTION_FIELDS:
            out[name] = getattr(self.prediction, name)
        out["p_critical"] = self.p_critical
        return out


def sample_std(values) -> float:
    """Unbiased (n - 1) standard deviation; 0 for a single sample."""
    values = np.asarray(values, dtype=float)
    if len(values) < 2:
        return 0.0
    return float(np.std(values, ddof=1))


def _metric_values(intact: ComponentCensus, after: ComponentCensus) -> dict:
    return {
        "giant_size": after.giant_size,
        "second_size": after.second_size,
        "orphan_count": after.orphan_count,
        "survivors_outside_giant": after.survivors_outside_giant,
        "total_survivors": after.total_survivors,
        "unorphaned_survivors": after.unorphaned_survivors,
        "failed_count": after.failed_count,
        "giant_decay_ratio": giant_decay_ratio(intact, after),
        "giant_fraction_of_survivors": after.giant_fraction_of_survivors,
    }


def run_replicate(params: PlnParams, p: float, seed: np.random.SeedSequence, mode: str):
    """Build one graph, census it intact and after failures at ``p``."""
    graph_seq, mask_seq = seed.spawn(2)
    graph = generate_graph(params, graph_seq, mode)
    intact = census_components(graph)
    after = census_components(graph, draw_failure_mask(graph.num_vertices, p, mask_seq))
    return intact, after


def _run_cell(args):
    params, p, seed, mode = args
    return run_replicate(params, p, seed, mode)


def p_critical_or_nan(params: PlnParams) -> float:
    if not 2 < params.beta < BETA_0:
        return math.nan
    try:
        return critical_failure_rate(params)
    except NoCriticalPoint as exc:
        log.warning("%s", exc)
        return math.nan


def aggregate(params: PlnParams, p: float, results, prediction, p_critical, keep=False) -> SweepRecord:
    per_rep = [_metric_values(intact, after) for intact, after in results]
    mean = {m: float(np.mean([r[m] for r in per_rep])) for m in METRICS}
    std = {m: sample_std([r[m] for r in per_rep]) for m in METRICS}
    return SweepRecord(
        beta=params.beta,
        alpha=params.alpha,
        p=p,
        replicates=len(results),
        num_vertices=float(np.mean([after.num_vertices for _, after in results])),
        mean=mean,
        std=std,
        prediction=prediction,
        p_critical=p_critical,
        replicate_censuses=tuple(results) if keep else None,
    )


def run_sweep(config: SweepConfig, keep_replicates: bool = False, workers: int = 1, progress=None) -> list[SweepRecord]:
    """Replicated failure experiments over every ``(beta, p)`` cell.

    ``progress``, if given, is called with a short string after each cell.
    Any replicate error aborts the whole sweep.
    """
    records = []
    pool = ProcessPoolExecutor(workers) if workers > 1 else None
    try:
        for bi, beta in enumerate(config.betas):
            params = PlnParams(alpha_for_size(beta, config.target_nodes), beta)
            p_crit = p_critical_or_nan(params)
            for pi, p in enumerate(config.p_values):
                jobs = [
                    (params, p, config.cell_seed(bi, pi, r), config.histogram_mode)
                    for r in range(config.replicates)
                ]
                try:
                    results = list(pool.map(_run_cell, jobs)) if pool else [_run_cell(j) for j in jobs]
                except Exception as exc:
                    raise SweepAborted(f"replicate failed at beta={beta}, p={p}: {exc}") from exc
                records.append(aggregate(params, p, results, predict(params, p), p_crit, keep_replicates))
                if progress:
                    progress(f"beta={beta:g} p={p:g} done ({config.replicates} replicates)")
    finally:
        if pool:
            pool.shutdown()
    return records


def surviving_distribution_table(params: PlnParams, p_values, seed, mode: str = "deterministic") -> list[dict]:
    """Analytic versus realised surviving-degree counts, one graph per ``p``."""
    rows = []
    for pi, p in enumerate(p_values):
        p = float(p)
        if not 0 <= p < 1:
            raise ValueError(f"p must lie in [0, 1), got {p}")
        graph_seq, mask_seq = np.random.SeedSequence(int(seed), spawn_key=(pi,)).spawn(2)
        graph = generate_graph(params, graph_seq, mode)
        census = census_components(graph, draw_failure_mask(graph.num_vertices, p, mask_seq))
        hist = census.surviving_degree_histogram
        last = max((k for k, c in hist.items() if c), default=0)
        for k in range(0, min(last, params.max_degree) + 1):
            rows.append({
                "p": p,
                "k": k,
                "analytic_count": surviving_degree_count(params, p, k),
                "empirical_count": hist.get(k, 0),
            })
    return rows


def critical_curve_table(betas, target_nodes: int) -> list[dict]:
    rows = []
    for beta in sorted(float(b) for b in betas):
        params = PlnParams.for_size(beta, target_nodes)
        rows.append({"beta": beta, "alpha": params.alpha, "p_critical": critical_failure_rate(params)})
    for a, b in zip(rows, rows[1:]):
        if not b["p_critical"] < a["p_critical"]:
            raise ArithmeticError(
                f"p_critical not decreasing: {a['p_critical']} at beta={a['beta']}, "
                f"{b['p_critical']} at beta={b['beta']}"
            )
    return rows


def beta_prime_surface_table(betas, p_values, target_nodes: int) -> list[dict]:
    """Grid of ``beta'(beta, p)`` with the giant-component verdict."""
    rows = []
    for beta in betas:
        params = PlnParams.for_size(float(beta), target_nodes)
        for p in p_values:
            pred = predict(params, float(p))
            rows.append({
                "beta": params.beta,
                "alpha": params.alpha,
                "p": pred.p,
                "beta_prime": pred.beta_prime,
                "has_giant": pred.has_giant,
            })
    return rows


def intact_giant_fraction_table(betas, target_nodes: int, replicates: int, seed, mode: str = "deterministic") -> list[dict]:
    """Fraction of nodes in the giant component of intact graphs, per beta."""
    rows = []
    for bi, beta in enumerate(betas):
        params = PlnParams.for_size(float(beta), target_nodes)
        fractions, sizes = [], []
        for r in range(replicates):
            seq = np.random.SeedSequence(int(seed), spawn_key=(bi, r))
            census = census_components(generate_graph(params, seq, mode))
            fractions.append(census.giant_size / census.num_vertices)
            sizes.append(census.num_vertices)
        reference = giant_fraction_beta2(params.alpha) if params.beta == 2 else math.nan
        rows.append({
            "beta": params.beta,
            "alpha": params.alpha,
            "num_vertices": float(np.mean(sizes)),
            "mean_fraction": float(np.mean(fractions)),
            "std_fraction": sample_std(fractions),
            "beta2_formula_fraction": reference,
        })
    return rows


def format_value(value) -> str:
    if isinstance(value, (bool, np.bool_)):
        return "true" if value else "false"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    value = float(value)
    if math.isnan(value):
        return "nan"
    if math.isinf(value):
        return "inf" if value > 0 else "-inf"
    return format(value, ".10g")


def write_table(rows: list[dict], out, columns=None) -> None:
    """Write ``rows`` as CSV to a path or an open text stream."""
    if columns is None:
        columns = list(rows[0]) if rows else []
    if hasattr(out, "write"):
        _write_rows(rows, out, columns)
    else:
        with open(out, "w", newline="") as fh:
            _write_rows(rows, fh, columns)


def _write_rows(rows, fh, columns):
    writer = csv.writer(fh, lineterminator="\n")
    writer.writerow(columns)
    for row in rows:
        writer.writerow([format_value(row[c]) for c in columns])


def meta_path(csv_path) -> Path:
    return Path(csv_path).with_suffix(".meta")


def write_meta(csv_path, command: str, config: dict, base_seed, elapsed: float) -> Path:
    """Sidecar with version, seed, generator id, config echo and wall time."""
    path = meta_path(csv_path)
    if dataclasses.is_dataclass(config):
        config = dataclasses.asdict(config)
    meta = {
        "tool": "plnresilience",
        "version": __version__,
        "command": command,
        "base_seed": base_seed,
        "rng_algorithm": RNG_ALGORITHM,
        "python": platform.python_version(),
        "numpy": np.__version__,
        "config": config,
        "wall_clock_seconds": round(elapsed, 3),
        "finished_at": time.strftime("%Y-%m-%dT%H:%M:%S%z"),
    }
    path.write_text(json.dumps(meta, indent=2, sort_keys=True, default=list) + "\n")
    return path
