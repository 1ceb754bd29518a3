"""Named verification suites with machine-readable summaries."""
from __future__ import annotations

import math
from dataclasses import asdict, dataclass

import numpy as np

from . import bounds as B
from .graphs import Graph, ring_graph, sample_configuration_model
from .indset import alpha_star, profile_table, successor_means
from .postselect import configuration_couplings, postselected_energy_direct
from .qaoa import (
    CUBIC_P1,
    RING_P1,
    QaoaParams,
    expect_zstring_full,
    expect_zstring_p1,
    expected_cut_p1,
    prepare_qaoa_state,
)
from .ring import ring_optimal_gain, ring_postselected_energy

TABLE1 = (-0.0833, 0.0178, -0.00412, 0.00926, -0.00356, -0.0370)
TABLE1_TOL = 5e-4
SUITES = ("oracle", "table1", "ring", "bounds", "distributions")


@dataclass(frozen=True)
class Check:
    name: str
    passed: bool
    value: float
    expected: float | None = None
    tol: float | None = None


def _close(name, value, expected, tol) -> Check:
    return Check(name, bool(abs(value - expected) <= tol), float(value), float(expected), tol)


def suite_oracle(cases: int = 200, seed: int = 0) -> list[Check]:
    """Lightcone contraction against full statevector on random small multigraphs."""
    rng = np.random.default_rng(seed)
    worst = 0.0
    for _ in range(cases):
        n = int(rng.choice([4, 6, 8, 10, 12]))
        g = sample_configuration_model(n, 3, rng)
        p = QaoaParams.p1(*rng.uniform(-math.pi, math.pi, 2))
        state = prepare_qaoa_state(g, p)
        size = int(rng.choice([2, 4]))
        support = tuple(sorted(rng.choice(n, size=size, replace=False).tolist()))
        worst = max(worst, abs(expect_zstring_p1(g, p, support) - expect_zstring_full(state, support)))
    return [Check("lightcone-vs-statevector", worst <= 1e-10, worst, 0.0, 1e-10)]


def suite_table1() -> list[Check]:
    vals = configuration_couplings(CUBIC_P1)
    return [_close(f"configuration-{k + 1}", v, t, TABLE1_TOL) for k, (v, t) in enumerate(zip(vals, TABLE1))]


def suite_ring() -> list[Check]:
    out = []
    worst = 0.0
    for n in (6, 12):
        g = ring_graph(n)
        state = prepare_qaoa_state(g, RING_P1)
        members = list(range(0, n, 3))
        for bits in range(2 ** len(members)):
            sigma = [1 - 2 * ((bits >> k) & 1) for k in range(len(members))]
            direct = postselected_energy_direct(g, members, sigma, RING_P1, state=state)
            worst = max(worst, abs(direct - ring_postselected_energy(n, RING_P1, sigma)))
    out.append(Check("closed-form-vs-statevector", worst <= 1e-10, worst, 0.0, 1e-10))
    n = 600
    gain = ring_optimal_gain(n, RING_P1).value
    out.append(_close("optimal-gain-per-n", gain / n, 0.073, 1e-3))
    out.append(_close("postselected-cut-per-n", ring_postselected_energy(n, RING_P1, "alternating") / n, 0.823, 1e-3))
    return out


def suite_bounds(scans: int = 100, seed: int = 0) -> list[Check]:
    out = [
        Check("alpha-star-3", 0.235 < alpha_star(3) < 0.236, alpha_star(3)),
        _close("upper-bound-0.204", B.postselect_upper_bound_expectation(0.204, 1.0), 0.0824, 5e-4),
        _close("whp-bound-0.204-per-edge", B.postselect_upper_bound_whp(0.204, 0.01, 1.0) / 1.5, 0.0589, 5e-4),
        Check("lower-floor-per-edge", B.lower_bound_floor(1.0) / 1.5 >= 0.0013, B.lower_bound_floor(1.0) / 1.5),
    ]
    ghz = B.ghz_grid_value(2, 1)
    out.append(_close("ghz-r1-per-n", ghz.value / ghz.inputs["n"], 1.4, 1e-12))
    rng = np.random.default_rng(seed)
    ok = True
    for _ in range(scans):
        g, paths, signs = random_path_case(rng)
        ok &= B.path_inequality_check(g, paths, signs, "proved")
    out.append(Check("path-inequality-scans", bool(ok), float(scans)))
    return out


def suite_distributions(n: int = 10**6, alpha: float = 0.2) -> list[Check]:
    n0 = int(alpha * n)
    table = profile_table(3, n, n0)
    total = sum(table.values())
    out = [_close("pmf-normalisation", total, 1.0, 1e-6)]
    means = successor_means(3, n, n0)
    for k, key in enumerate(("k3", "k4", "k5")):
        m = sum(p * c[k] for c, p in table.items()) / total
        out.append(Check(f"mean-{key}", abs(m - means[k]) <= 1e-4 * means[k], m, means[k], 1e-4 * means[k]))
    return out


def random_path_case(rng: np.random.Generator, max_n: int = 14):
    """Random graph, a few random simple paths in it and random edge signs."""
    n = int(rng.integers(4, max_n // 2 + 1)) * 2
    g = sample_configuration_model(n, 3, rng)
    paths = []
    for _ in range(int(rng.integers(1, 5))):
        length = int(rng.integers(1, 6))
        path = [int(rng.integers(n))]
        for _ in range(length):
            nxt = [u for u in g.adjacency[path[-1]] if u not in path]
            if not nxt:
                break
            path.append(int(rng.choice(nxt)))
        if len(path) >= 2:
            paths.append(path)
    if not paths:
        a, b = next(e for e in g.edges if e[0] != e[1])
        paths.append([a, b])
    signs = {e: int(rng.choice((-1, 1))) for e in g.multiplicity}
    return g, paths, signs


_RUNNERS = {
    "oracle": suite_oracle,
    "table1": suite_table1,
    "ring": suite_ring,
    "bounds": suite_bounds,
    "distributions": suite_distributions,
}


def run_suite(name: str) -> dict:
    if name == "all":
        parts = [run_suite(s) for s in SUITES]
        return {"suite": "all", "passed": all(p["passed"] for p in parts), "suites": parts}
    if name not in _RUNNERS:
        raise ValueError(f"unknown suite {name!r}; choose from {SUITES + ('all',)}")
    checks = _RUNNERS[name]()
    return {"suite": name, "passed": all(c.passed for c in checks), "checks": [asdict(c) for c in checks]}
