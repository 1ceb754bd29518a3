"""Postselected depth-1 QAOA: the induced Ising model and direct oracles."""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Mapping

import numpy as np

from .graphs import Graph, ball, distances_within
from .indset import VertexSet, verify_k_independent
from .ising import IsingInstance, Solution, solve
from .qaoa import (
    QaoaParams,
    ZString,
    cut_diagonal,
    edge_expectations_p1,
    expect_zstring_p1,
    p1_contract,
    p1_marginal,
    prepare_qaoa_state,
    probabilities,
    project_outcomes,
)

_PROJ = {1: np.diag([1.0, 0.0]).astype(complex), -1: np.diag([0.0, 1.0]).astype(complex)}


class PostselectError(ValueError):
    pass


def _members(v0set) -> tuple[int, ...]:
    return tuple(v0set.vertices) if isinstance(v0set, VertexSet) else tuple(sorted(int(v) for v in v0set))


def build_couplings(g: Graph, v0set, params: QaoaParams, check: bool = True) -> IsingInstance:
    """Ising model whose value sum J s s is the change in expected cut under postselection.

    For every edge e and every pair of members within distance 2 of e the
    coupling receives -1/2 <Z_e0 Z_e1 Z_v Z_w>, with repeated Z's cancelled.
    The offset is the unconditioned expected cut. Terms with four or more
    members around one edge are computed as well; ``meta['higher_order_max']``
    records their largest magnitude (they vanish for depth 1).
    """
    members = _members(v0set)
    if check and not verify_k_independent(g, members, 2):
        raise PostselectError("postselected set must be 2-independent")
    mset = set(members)
    couplings: dict[tuple[int, int], float] = {}
    cache: dict[tuple[int, ...], float] = {}
    higher = 0.0

    def zz(support):
        zs = ZString.product(support)
        if zs is None:
            return 1.0
        if zs.support not in cache:
            cache[zs.support] = expect_zstring_p1(g, params, zs)
        return cache[zs.support]

    for a, b in g.edges:
        if a == b:
            continue
        near = sorted(ball(g, [a, b], 2) & mset)
        for u, v in itertools.combinations(near, 2):
            couplings[(u, v)] = couplings.get((u, v), 0.0) - 0.5 * zz((a, b, u, v))
        for size in range(4, len(near) + 1, 2):
            for t in itertools.combinations(near, size):
                higher = max(higher, abs(zz((a, b) + t)))
    offset = float(np.sum(0.5 * (1 - edge_expectations_p1(g, params))))
    return IsingInstance(members, couplings, offset, {"higher_order_max": higher})


def baseline_cut(g: Graph, params: QaoaParams) -> float:
    return float(np.sum(0.5 * (1 - edge_expectations_p1(g, params))))


# ---------------------------------------------------------------- pair configurations

# Placements of the two postselected vertices around the edge (a, b) in an
# infinite cubic tree: a1 is a child of a, a11 a child of a1, a21 a child of
# a's other child, and likewise on b's side.
CONFIGURATION_PLACEMENTS = {
    1: ("a1", "b1"),
    2: ("a1", "b11"),
    3: ("a11", "b11"),
    4: ("a1", "a21"),
    5: ("a11", "a21"),
    6: ("a", "b11"),
}

# how many times each configuration occurs for a pair at distance 3, 4, 5
# with a tree 5-ball (one count per edge within distance 2 of both)
PAIR_MULTIPLICITIES = {
    3: {1: 1, 4: 2, 6: 2},
    4: {2: 2, 5: 1},
    5: {3: 1},
}


def edge_gadget() -> tuple[Graph, dict[str, int]]:
    """Cubic tree around the edge (a, b), deep enough for every placement's lightcone."""
    names = {"a": 0, "b": 1}
    edges = [(0, 1)]
    nxt = 2
    frontier = [("a", 0), ("b", 1)]
    for depth in range(4):
        new = []
        for name, v in frontier:
            for c in (1, 2):
                child = name + str(c) if depth < 3 else None
                edges.append((v, nxt))
                if child is not None:
                    names[child] = nxt
                    new.append((child, nxt))
                nxt += 1
        frontier = new
    return Graph.from_edges(nxt, edges), names


def placement_value(params: QaoaParams, placement) -> float:
    g, names = edge_gadget()
    u, v = (names[p] for p in placement)
    zs = ZString.product((0, 1, u, v))
    return -0.5 * (1.0 if zs is None else expect_zstring_p1(g, params, zs))


def configuration_couplings(params: QaoaParams) -> tuple[float, ...]:
    """Single-edge coupling of each of the six pair configurations, labels 1..6."""
    return tuple(placement_value(params, CONFIGURATION_PLACEMENTS[k]) for k in range(1, 7))


def enumerate_placements(params: QaoaParams) -> dict[tuple, dict]:
    """All placements of two 2-independent vertices within distance 2 of the edge.

    Placements are grouped by (same side?, sorted depths), which is a complete
    isomorphism invariant for this tree; each class reports its size and the
    coupling value of every member (all equal by symmetry).
    """
    g, names = edge_gadget()
    spots = [k for k in names if len(k) <= 3]
    classes: dict[tuple, dict] = {}
    for p, q in itertools.combinations(spots, 2):
        u, v = names[p], names[q]
        if distances_within(g, u, 2).get(v) is not None:
            continue
        key = (p[0] == q[0], tuple(sorted((len(p) - 1, len(q) - 1))))
        zs = ZString.product((0, 1, u, v))
        val = -0.5 * (1.0 if zs is None else expect_zstring_p1(g, params, zs))
        entry = classes.setdefault(key, {"count": 0, "values": [], "example": (p, q)})
        entry["count"] += 1
        entry["values"].append(val)
    return classes


def distance_coupling(params: QaoaParams, dist: int) -> float:
    """Pair coupling implied by the configuration multiplicities at a tree distance."""
    conf = configuration_couplings(params)
    return sum(m * conf[c - 1] for c, m in PAIR_MULTIPLICITIES[dist].items())


# ---------------------------------------------------------------- direct oracles

def _spins_of(members, sigma) -> dict[int, int]:
    if isinstance(sigma, Mapping):
        out = {int(v): int(sigma[v]) for v in members}
    else:
        out = {int(v): int(s) for v, s in zip(members, sigma)}
    if len(out) != len(members) or any(abs(s) != 1 for s in out.values()):
        raise PostselectError("sigma must give +-1 on every postselected vertex")
    return out


def postselected_state(g: Graph, v0set, sigma, params: QaoaParams) -> tuple[np.ndarray, float]:
    """Projected (unnormalised) statevector and its squared norm."""
    members = _members(v0set)
    spins = _spins_of(members, sigma)
    psi = project_outcomes(prepare_qaoa_state(g, params), spins)
    return psi, float(np.vdot(psi, psi).real)


def postselected_energy_direct(g: Graph, v0set, sigma, params: QaoaParams, state=None) -> float:
    """Expected cut after projecting onto outcomes sigma, by full statevector."""
    members = _members(v0set)
    spins = _spins_of(members, sigma)
    psi = prepare_qaoa_state(g, params) if state is None else state
    proj = project_outcomes(psi, spins)
    norm = float(np.vdot(proj, proj).real)
    if norm <= 1e-300:
        raise PostselectError("postselection outcome has zero probability")
    return float(np.dot(probabilities(proj), cut_diagonal(g)) / norm)


def postselected_marginal(g: Graph, params: QaoaParams, v0set, sigma, sites) -> np.ndarray:
    """Joint Z-outcome distribution on ``sites`` conditioned on the set taking values sigma.

    Only members within distance 2 of ``sites`` matter: the rest factor out
    with probability 1/2 each. Axis k is sites[k], index 0 is spin +1.
    """
    members = _members(v0set)
    spins = _spins_of(members, sigma)
    sites = [int(v) for v in sites]
    local = sorted(ball(g, sites, 2) & set(members))
    if not local:
        return p1_marginal(g, params, sites)
    fixed = {v: _PROJ[spins[v]] for v in local if v not in sites}
    marg = np.asarray(p1_contract(g, params, fixed, sites)) * 2 ** len(local)
    for k, v in enumerate(sites):
        if v in spins and v in local:
            idx = [slice(None)] * len(sites)
            idx[k] = 1 if spins[v] > 0 else 0
            marg[tuple(idx)] = 0.0
    return marg


def postselected_energy_local(g: Graph, v0set, sigma, params: QaoaParams) -> float:
    """Expected cut under postselection from per-edge local marginals (any n)."""
    total = 0.0
    for a, b in g.edges:
        if a == b:
            continue
        m = postselected_marginal(g, params, v0set, sigma, [a, b])
        total += m[0, 1] + m[1, 0]
    return float(total)


# ---------------------------------------------------------------- optimisation

@dataclass(frozen=True)
class Improvement:
    spins: dict[int, int]
    gain: float
    baseline: float
    solver: str
    instance: IsingInstance


def improvement(g: Graph, v0set, params: QaoaParams, solver: str = "exact", seed=0,
                instance: IsingInstance | None = None, timeout: float = 60.0) -> Improvement:
    """Best postselection values and the resulting gain over the plain QAOA cut."""
    inst = build_couplings(g, v0set, params) if instance is None else instance
    if len(inst) == 0:
        return Improvement({}, 0.0, inst.offset, solver, inst)
    sol: Solution = solve(inst, solver, seed=seed, timeout=timeout)
    return Improvement(sol.spins, sol.value, inst.offset, solver, inst)
