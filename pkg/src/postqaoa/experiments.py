"""Seeded end-to-end experiments with fixed-schema CSV output."""
from __future__ import annotations

import csv
import io
import logging
import math
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field, replace

import numpy as np

from .bounds import postselect_upper_bound_whp
from .graphs import Graph, sample_configuration_model, sample_simple_regular
from .indset import alpha_star, greedy_2independent, greedy_independent
from .ising import SolverTimeout, energy
from .local_updates import expected_local_gain
from .postselect import build_couplings, improvement, postselected_energy_direct, postselected_marginal
from .qaoa import CUBIC_P1, QaoaParams, p1_marginal

log = logging.getLogger(__name__)

CSV_FIELDS = ("seed", "n", "alpha", "gain_edges", "gain_fraction", "bound_fraction", "solver", "runtime_ms")
COMBINED_FIELDS = ("seed", "n", "alpha", "w_size", "postselect_fraction", "update_fraction",
                   "combined_fraction", "solver")


@dataclass(frozen=True)
class ExperimentConfig:
    n: int = 200
    count: int = 150
    seed: int = 0
    alpha_target: float = 0.2
    solver: str = "exact"
    beta: float = CUBIC_P1.beta
    gamma: float = CUBIC_P1.gamma
    d: int = 3
    graph_model: str = "simple"
    max_tries: int = 2000
    eps: float = 0.01
    timeout: float = 60.0
    timing: bool = False
    workers: int = 1
    oracle: bool = False
    update_depth: int = 1
    w_rule: str = "min-degree"

    @property
    def params(self) -> QaoaParams:
        return QaoaParams.p1(self.beta, self.gamma)

    @property
    def size(self) -> int:
        return int(round(self.alpha_target * self.n))

    @classmethod
    def from_dict(cls, data: dict) -> "ExperimentConfig":
        known = set(cls.__dataclass_fields__)
        extra = set(data) - known
        if extra:
            raise ValueError(f"unknown config keys: {sorted(extra)}")
        return cls(**data)


@dataclass(frozen=True)
class ExperimentRecord:
    seed: int
    n: int
    alpha: float
    gain_edges: float
    gain_fraction: float
    bound_fraction: float
    solver: str
    runtime_ms: float | None = None
    extra: dict = field(default_factory=dict)

    def row(self) -> list[str]:
        rt = "" if self.runtime_ms is None else f"{self.runtime_ms:.1f}"
        return [str(self.seed), str(self.n), _fmt(self.alpha), _fmt(self.gain_edges),
                _fmt(self.gain_fraction), _fmt(self.bound_fraction), self.solver, rt]


@dataclass(frozen=True)
class Skipped:
    seed: int
    reason: str


def _fmt(x: float) -> str:
    return f"{x:.12g}"


def _graph(cfg: ExperimentConfig, seed: int) -> Graph:
    ss = np.random.SeedSequence([seed, 0])
    if cfg.graph_model == "simple":
        return sample_simple_regular(cfg.n, cfg.d, ss)
    if cfg.graph_model == "configuration":
        return sample_configuration_model(cfg.n, cfg.d, ss)
    raise ValueError(f"unknown graph model {cfg.graph_model!r}")


def _postselect_one(cfg: ExperimentConfig, seed: int):
    t0 = time.perf_counter()
    g = _graph(cfg, seed)
    v0 = greedy_2independent(g, np.random.SeedSequence([seed, 1]), size=cfg.size, max_tries=cfg.max_tries)
    if len(v0) < cfg.size:
        return Skipped(seed, f"2-independent set of size {len(v0)} < {cfg.size} after {cfg.max_tries} tries")
    alpha = len(v0) / cfg.n
    if alpha >= alpha_star(cfg.d):
        return Skipped(seed, f"alpha {alpha} outside bound range")
    try:
        imp = improvement(g, v0, cfg.params, cfg.solver, seed=np.random.SeedSequence([seed, 2]),
                          timeout=cfg.timeout)
    except SolverTimeout as exc:
        return Skipped(seed, f"solver timeout: {exc}")
    edges = g.num_edges
    bound = postselect_upper_bound_whp(alpha, cfg.eps, cfg.n) / edges
    extra = {"higher_order_max": imp.instance.meta.get("higher_order_max", 0.0), "graph": g,
             "v0": v0.vertices, "spins": imp.spins, "baseline": imp.baseline}
    if cfg.oracle:
        direct = postselected_energy_direct(g, v0, imp.spins, cfg.params)
        extra["identity_error"] = abs(direct - imp.baseline - energy(imp.instance, imp.spins))
    rt = (time.perf_counter() - t0) * 1000 if cfg.timing else None
    return ExperimentRecord(seed, cfg.n, alpha, imp.gain, imp.gain / edges, bound, cfg.solver, rt, extra)


def _run(fn, cfg: ExperimentConfig):
    seeds = [cfg.seed + i for i in range(cfg.count)]
    if cfg.workers > 1:
        with ProcessPoolExecutor(cfg.workers) as pool:
            results = list(pool.map(fn, [cfg] * len(seeds), seeds))
    else:
        results = [fn(cfg, s) for s in seeds]
    records, skipped = [], []
    for r in results:
        if isinstance(r, Skipped):
            log.warning("seed %d skipped: %s", r.seed, r.reason)
            skipped.append(r)
        else:
            records.append(r)
    return records, skipped


def experiment_postselect(cfg: ExperimentConfig):
    """Generate, pick V0, build couplings, optimise; one record per instance in seed order."""
    return _run(_postselect_one, cfg)


def _combined_one(cfg: ExperimentConfig, seed: int):
    base = _postselect_one(replace(cfg, oracle=False, timing=False), seed)
    if isinstance(base, Skipped):
        return base
    g, params = base.extra["graph"], cfg.params
    v0, spins = base.extra["v0"], base.extra["spins"]
    w = greedy_independent(g, np.random.SeedSequence([seed, 3]), k=2 * cfg.update_depth - 1, rule=cfg.w_rule)
    update = post = 0.0
    for c in w.vertices:
        update += expected_local_gain(g, c, cfg.update_depth, lambda s: p1_marginal(g, params, s))
        post += expected_local_gain(
            g, c, cfg.update_depth, lambda s: postselected_marginal(g, params, v0, spins, s))
    edges = g.num_edges
    extra = {"w_size": len(w), "postselect_fraction": base.gain_fraction,
             "update_fraction": update / edges,
             "combined_fraction": (base.gain_edges + post) / edges}
    return replace(base, extra=extra)


def experiment_combined(cfg: ExperimentConfig):
    """Postselection gain, local-update gain on the plain state, and both combined.

    The combined value adds to the postselection gain the exact expected
    local-update gain under the postselected distribution, whose local
    marginals are computed by the conditioned contraction on any graph.
    """
    return _run(_combined_one, cfg)


def summarize(values) -> dict:
    a = np.asarray(list(values), dtype=float)
    if a.size == 0:
        return {"count": 0, "mean": math.nan, "std": math.nan, "min": math.nan, "max": math.nan}
    return {"count": int(a.size), "mean": float(a.mean()), "std": float(a.std(ddof=1)) if a.size > 1 else 0.0,
            "min": float(a.min()), "max": float(a.max())}


def records_csv(records) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_FIELDS)
    for r in records:
        w.writerow(r.row())
    return buf.getvalue()


def combined_csv(records) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(COMBINED_FIELDS)
    for r in records:
        e = r.extra
        w.writerow([str(r.seed), str(r.n), _fmt(r.alpha), str(e["w_size"]), _fmt(e["postselect_fraction"]),
                    _fmt(e["update_fraction"]), _fmt(e["combined_fraction"]), r.solver])
    return buf.getvalue()


def records_json(records, skipped, cfg: ExperimentConfig) -> dict:
    rows = []
    for r in records:
        d = {k: getattr(r, k) for k in CSV_FIELDS}
        d.update({k: v for k, v in r.extra.items() if isinstance(v, (int, float, str))})
        rows.append(d)
    return {
        "config": asdict(cfg),
        "records": rows,
        "skipped": [asdict(s) for s in skipped],
        "gain_fraction": summarize(r.gain_fraction for r in records),
        "all_within_bound": all(r.gain_fraction <= r.bound_fraction for r in records),
    }
