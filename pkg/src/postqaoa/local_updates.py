"""Local cut improvement inside disjoint balls and its expected gain under depth-1 QAOA."""
from __future__ import annotations

import itertools
import math
from typing import Callable, Mapping, Sequence

import numpy as np

from .graphs import Graph, distances_within, is_tree_ball
from .indset import verify_k_independent
from .qaoa import QaoaParams, p1_marginal


class LocalUpdateError(ValueError):
    pass


def _ball_layout(g: Graph, v0: int, depth: int):
    """(interior vertices, frozen shell, edges touching the interior)."""
    dist = distances_within(g, v0, depth)
    interior = sorted(u for u, du in dist.items() if du < depth)
    shell = sorted(u for u, du in dist.items() if du == depth)
    inside = set(interior)
    edges = [(a, b) for a, b in g.edges if a != b and (a in inside or b in inside)]
    return interior, shell, edges


def best_interior(interior: Sequence[int], edges, values: Mapping[int, int]):
    """Assignment of the interior maximising cut edges, incumbent kept on ties.

    Among several strictly better optima the one closest in Hamming distance
    to the incumbent wins, then the first in enumeration order.
    """
    current = tuple(values[v] for v in interior)
    pos = {v: k for k, v in enumerate(interior)}

    def cut_of(assign):
        total = 0
        for a, b in edges:
            xa = assign[pos[a]] if a in pos else values[a]
            xb = assign[pos[b]] if b in pos else values[b]
            total += xa != xb
        return total

    base = cut_of(current)
    best, best_key = current, (base, 0)
    for assign in itertools.product((1, -1), repeat=len(interior)):
        c = cut_of(assign)
        if c <= base:
            continue
        key = (c, -sum(x != y for x, y in zip(assign, current)))
        if key > best_key:
            best, best_key = assign, key
    return best, best_key[0] - base


def local_update_cut(g: Graph, cut, depth: int, v0set) -> np.ndarray:
    """Re-optimise the cut inside ball(v0, depth-1) for every v0, shell values frozen.

    ``cut`` is a +-1 vector over all vertices; the returned vector never has
    fewer cut edges.
    """
    if depth not in (1, 2, 3):
        raise LocalUpdateError("update depth must be 1, 2 or 3")
    members = sorted(int(v) for v in v0set)
    if not verify_k_independent(g, members, 2 * depth - 1):
        raise LocalUpdateError(f"update centres must be {2 * depth - 1}-independent")
    x = np.array(cut, dtype=int)
    if x.shape != (g.n,) or not np.all(np.abs(x) == 1):
        raise LocalUpdateError("cut must be a +-1 vector over all vertices")
    out = x.copy()
    for v0 in members:
        interior, _, edges = _ball_layout(g, v0, depth)
        values = {u: int(x[u]) for a, b in edges for u in (a, b)}
        best, _ = best_interior(interior, edges, values)
        for v, s in zip(interior, best):
            out[v] = s
    return out


def expected_improvement_p1_d1(params: QaoaParams) -> float:
    """Expected edges gained at one update centre (depth 1) when its 2-ball is a tree."""
    b, g = params.beta, params.gamma
    return 0.75 * (1 + 2 * math.sin(2 * b) * math.cos(g) ** 2 * math.sin(g)
                   + math.sin(b) ** 2 * math.cos(g) ** 4 * math.sin(g) ** 2)


def _gain_table(g: Graph, v0: int, depth: int):
    """Sites of ball(v0, depth) and the update gain for every assignment of them."""
    interior, shell, edges = _ball_layout(g, v0, depth)
    sites = interior + shell
    gains = np.zeros((2,) * len(sites))
    for bits in itertools.product((0, 1), repeat=len(sites)):
        values = {v: 1 - 2 * b for v, b in zip(sites, bits)}
        _, gain = best_interior(interior, edges, values)
        gains[bits] = gain
    return sites, gains


def expected_local_gain(g: Graph, v0: int, depth: int,
                        marginal: Callable[[Sequence[int]], np.ndarray]) -> float:
    """Sum over outcomes of ball(v0, depth) of probability times update gain."""
    sites, gains = _gain_table(g, v0, depth)
    return float(np.sum(marginal(sites) * gains))


def expected_improvement_tree(g: Graph, v0: int, params: QaoaParams, depth: int,
                              require_tree: bool = True) -> float:
    """Exact expected gain of the update at v0 for depth-1 QAOA samples.

    The joint outcome distribution of ball(v0, depth) comes from the local
    contraction, so the value is exact on any graph; ``require_tree`` keeps
    the tree-ball precondition of the closed form.
    """
    if depth not in (1, 2):
        raise LocalUpdateError("expected gain implemented for depth 1 and 2")
    if require_tree and not is_tree_ball(g, v0, 2 * depth):
        raise LocalUpdateError(f"ball({v0}, {2 * depth}) is not a tree")
    return expected_local_gain(g, v0, depth, lambda s: p1_marginal(g, params, s))


def sampled_improvement(g: Graph, state: np.ndarray, depth: int, v0set, shots: int, seed) -> np.ndarray:
    """Per-shot gains of the local update on cuts sampled from a statevector."""
    rng = np.random.default_rng(seed)
    probs = np.abs(state) ** 2
    probs = probs / probs.sum()
    idx = rng.choice(probs.size, size=shots, p=probs)
    bits = (idx[:, None] >> np.arange(g.n)) & 1
    gains = np.empty(shots)
    for k in range(shots):
        x = 1 - 2 * bits[k]
        y = local_update_cut(g, x, depth, v0set)
        gains[k] = g.cut_value(y) - g.cut_value(x)
    return gains
