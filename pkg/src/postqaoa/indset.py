"""k-independent vertex sets: construction, checking, counting and neighbourhood statistics."""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable

import numpy as np
from scipy.optimize import brentq
from scipy.special import gammaln

from .graphs import Graph, GraphError, ball, distances_within, graph_from_matching, is_tree_ball


@dataclass(frozen=True)
class VertexSet:
    vertices: tuple[int, ...]
    k: int = 2

    def __post_init__(self):
        object.__setattr__(self, "vertices", tuple(sorted(int(v) for v in self.vertices)))

    def __len__(self):
        return len(self.vertices)

    def __iter__(self):
        return iter(self.vertices)

    def __contains__(self, v):
        return v in set(self.vertices)


@dataclass(frozen=True)
class NeighbourProfile:
    k3: int
    k4: int
    k5: int
    tree5: bool


def verify_k_independent(g: Graph, s: Iterable[int], k: int) -> bool:
    """True iff every pair in s is more than k hops apart."""
    members = set(int(v) for v in s)
    for v in members:
        if not 0 <= v < g.n:
            raise GraphError(f"vertex {v} out of range")
    for v in members:
        near = distances_within(g, v, k)
        if any(u in members and u != v for u in near):
            return False
    return True


def greedy_2independent(g: Graph, seed, size: int | None = None, max_tries: int = 1) -> VertexSet:
    """Random-order greedy 2-independent set.

    Visiting vertices in a uniformly random order and keeping every vertex
    not yet excluded is the same as repeatedly picking uniformly among the
    allowed vertices. With ``size`` the construction stops once that many
    vertices are chosen; up to ``max_tries`` fresh orders are tried before
    the largest set found is returned.
    """
    rng = np.random.default_rng(seed)
    best: list[int] = []
    for _ in range(max(1, max_tries)):
        blocked = np.zeros(g.n, dtype=bool)
        chosen: list[int] = []
        for v in rng.permutation(g.n):
            if blocked[v]:
                continue
            chosen.append(int(v))
            if size is not None and len(chosen) >= size:
                break
            for u in ball(g, int(v), 2):
                blocked[u] = True
        if len(chosen) > len(best):
            best = chosen
        if size is None or len(best) >= size:
            break
    return VertexSet(best, 2)


def greedy_independent(g: Graph, seed, k: int = 1, rule: str = "random") -> VertexSet:
    """Greedy k-independent set (k = 1 is an ordinary independent set).

    ``rule="random"`` keeps vertices in a uniformly random order.
    ``rule="min-degree"`` repeatedly takes a vertex of least residual degree
    (ties broken at random) and deletes its k-ball, which finds larger sets.
    """
    rng = np.random.default_rng(seed)
    if rule == "random":
        blocked = np.zeros(g.n, dtype=bool)
        chosen = []
        for v in rng.permutation(g.n):
            if blocked[v]:
                continue
            chosen.append(int(v))
            for u in ball(g, int(v), k):
                blocked[u] = True
        return VertexSet(chosen, k)
    if rule != "min-degree":
        raise ValueError(f"unknown rule {rule!r}")
    alive = np.ones(g.n, dtype=bool)
    nbrs = [set(g.adjacency[v]) - {v} for v in range(g.n)]
    if k > 1:
        nbrs = [ball(g, v, k) - {v} for v in range(g.n)]
    deg = np.array([len(s) for s in nbrs])
    tiebreak = rng.permutation(g.n)
    chosen = []
    while alive.any():
        cand = np.flatnonzero(alive)
        v = int(cand[np.lexsort((tiebreak[cand], deg[cand]))[0]])
        chosen.append(v)
        removed = [u for u in nbrs[v] | {v} if alive[u]]
        alive[removed] = False
        for u in removed:
            for w in nbrs[u]:
                if alive[w]:
                    deg[w] -= 1
    return VertexSet(chosen, k)


def pairs_distance4_set(g: Graph) -> VertexSet:
    """Greedy packing of vertex pairs at distance exactly 4.

    Pairs are scanned in lexicographic order; a pair is taken when neither
    endpoint lies within distance 5 of an endpoint taken before, and then
    everything within distance 5 of its two endpoints is excluded.
    """
    blocked = np.zeros(g.n, dtype=bool)
    chosen: list[int] = []
    for u in range(g.n):
        if blocked[u]:
            continue
        dist = distances_within(g, u, 4)
        partners = sorted(v for v, dv in dist.items() if dv == 4 and v > u and not blocked[v])
        if not partners:
            continue
        v = partners[0]
        chosen += [u, v]
        for w in ball(g, [u, v], 5):
            blocked[w] = True
    return VertexSet(chosen, 2)


def pairs_of(g: Graph, s: VertexSet, dist: int) -> list[tuple[int, int]]:
    """Pairs of members of s at exactly the given distance."""
    members = set(s.vertices)
    out = []
    for v in s.vertices:
        for u, du in distances_within(g, v, dist).items():
            if du == dist and u in members and u > v:
                out.append((v, u))
    return sorted(out)


# ---------------------------------------------------------------- counting

def _log_odd_double_factorial(m: int) -> float:
    """ln(m!!) for odd m >= -1."""
    if m == -1:
        return 0.0
    h = (m + 1) // 2
    return float(gammaln(m + 2) - h * math.log(2) - gammaln(h + 1))


def expected_2id_count(n: int, d: int, n0: int) -> float:
    """ln of the expected number of 2-independent n0-sets in the configuration model.

    A set counts when its n0*d half-edges are matched to distinct vertices
    outside it, which on simple graphs is plain 2-independence. Returns
    ``-inf`` when the count is zero.
    """
    if not (1 <= n0 <= n) or d < 1 or (n * d) % 2:
        raise ValueError("need 1 <= n0 <= n and n*d even")
    free = n - n0 - n0 * d
    rest = n * d - 1 - 2 * n0 * d
    if free < 0 or rest < -1:
        return -math.inf
    return float(
        gammaln(n + 1) - gammaln(n0 + 1) - gammaln(n - n0 + 1)
        + n0 * d * math.log(d)
        + gammaln(n - n0 + 1) - gammaln(free + 1)
        + _log_odd_double_factorial(rest) - _log_odd_double_factorial(n * d - 1)
    )


def growth_rate(alpha: float, d: int) -> float:
    """lim_n ln(expected count at n0 = alpha*n) / n."""
    if not 0 < alpha < 1 / (d + 1):
        raise ValueError("alpha outside (0, 1/(d+1))")
    a = 1 - (d + 1) * alpha
    return -alpha * math.log(alpha) + 0.5 * d * (1 - 2 * alpha) * math.log(1 - 2 * alpha) - a * math.log(a)


def alpha_star(d: int, tol: float = 1e-10) -> float:
    """Density at which the expected number of 2-independent sets stops growing."""
    if d < 3:
        raise ValueError("d >= 3 required")
    hi = 1 / (d + 1) - 1e-15
    return float(brentq(growth_rate, 1e-9, hi, args=(d,), xtol=tol))


def count_2id_sets(g: Graph, max_size: int | None = None, distinct_neighbours: bool = False) -> list[int]:
    """Exhaustive count of 2-independent sets by size (index = size).

    With ``distinct_neighbours`` members must also have d distinct
    neighbours (no loop or multi-edge), the notion counted by
    ``expected_2id_count`` on multigraphs.
    """
    n = g.n
    eligible = [not distinct_neighbours or len(set(g.adjacency[v]) - {v}) == len(g.adjacency[v])
                for v in range(n)]
    conflict = [0] * n
    for v in range(n):
        for u in ball(g, v, 2):
            if u > v:
                conflict[v] |= 1 << u
    counts = [0] * (n + 1)

    def rec(start: int, forbidden: int, size: int):
        counts[size] += 1
        if max_size is not None and size >= max_size:
            return
        for v in range(start, n):
            if eligible[v] and not (forbidden >> v) & 1:
                rec(v + 1, forbidden | conflict[v], size + 1)

    rec(0, 0, 0)
    while len(counts) > 1 and counts[-1] == 0:
        counts.pop()
    return counts


# ---------------------------------------------------------------- neighbourhood profile

def _profile_bounds(d: int):
    return d * (d - 1), d * (d - 1) ** 2, d * (d - 1) ** 3, d * (d - 1) ** 4


def profile_pmf(d: int, n: int, n0: int, k3: int, k4: int, k5: int) -> float:
    """Leading-order probability that a member of a planted 2-independent
    set has a tree 5-ball with k3, k4, k5 other members at distance 3, 4, 5."""
    if d < 3:
        raise ValueError("d >= 3 required")
    m3, m4, m5, m6 = _profile_bounds(d)
    top4 = m4 - k3
    top5 = m5 - (d - 1) * k3 - k4
    top6 = m6 - (d - 1) ** 2 * k3 - (d - 1) * k4 - k5
    if min(k3, k4, k5) < 0 or k3 > m3 or k4 > top4 or k5 > top5:
        return 0.0
    q = d * (d - 1) * n0 / (n * d - 2 * n0 * d)
    r = (n * d - d * (d + 1) * n0) / (n * d - 2 * n0 * d)
    total = d * (d - 1) * ((d - 1) ** 4 - 1) // (d - 2)
    base = math.comb(m3, k3) * math.comb(top4, k4) * math.comb(top5, k5)
    acc = 0.0
    for k6 in range(top6 + 1):
        expo_r = total - (d * d - d + 2) * k3 - (d + 1) * k4 - 2 * k5 - k6
        acc += math.comb(top6, k6) * q ** (k3 + k4 + k5 + k6) * r**expo_r
    return base * acc


def profile_table(d: int, n: int, n0: int) -> dict[tuple[int, int, int], float]:
    m3, m4, m5, _ = _profile_bounds(d)
    out = {}
    for k3 in range(m3 + 1):
        for k4 in range(m4 - k3 + 1):
            for k5 in range(m5 - (d - 1) * k3 - k4 + 1):
                out[(k3, k4, k5)] = profile_pmf(d, n, n0, k3, k4, k5)
    return out


def successor_means(d: int, n: int, n0: int) -> tuple[float, float, float]:
    """Expected numbers of set members at distance 3, 4, 5 (leading order)."""
    m = n - 2 * n0
    return (
        d * (d - 1) ** 2 * n0 / m,
        d * (d - 1) ** 3 * n0 * (n - 3 * n0) / m**2,
        d * (d - 1) ** 4 * n0 * (n - 3 * n0) ** 2 / m**3,
    )


def neighbour_profile(g: Graph, members: Iterable[int], v0: int) -> NeighbourProfile:
    s = set(int(v) for v in members)
    dist = distances_within(g, v0, 5)
    k = [0, 0, 0, 0, 0, 0]
    for u, du in dist.items():
        if u in s and u != v0:
            k[du] += 1
    return NeighbourProfile(k[3], k[4], k[5], is_tree_ball(g, v0, 5))


def sample_planted_configuration(n: int, d: int, n0: int, seed) -> Graph:
    """Configuration-model graph conditioned on {0..n0-1} being 2-independent.

    Half-edges of the planted vertices are matched one at a time, uniformly
    among half-edges of unplanted vertices not yet touched; the remaining
    half-edges are then matched uniformly. Every admissible matching has the
    same probability.
    """
    if n - n0 - n0 * d < 0:
        raise ValueError("planted set cannot be 2-independent")
    rng = np.random.default_rng(seed)
    pairs = []
    used = np.zeros(n * d, dtype=bool)
    # distinct outside vertices, uniform order, then one of their d half-edges
    targets = n0 + rng.choice(n - n0, size=n0 * d, replace=False)
    slots = rng.integers(0, d, size=n0 * d)
    for h, (t, s) in enumerate(zip(targets, slots)):
        other = int(t) * d + int(s)
        pairs.append((h, other))
        used[h] = used[other] = True
    rest = np.flatnonzero(~used)
    rest = rng.permutation(rest).reshape(-1, 2)
    matching = np.vstack([np.array(pairs, dtype=np.int64).reshape(-1, 2), rest])
    return graph_from_matching(n, d, matching)
