"""Regular multigraphs, configuration-model sampling and neighbourhood queries."""
from __future__ import annotations

import json
from collections import deque
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable

import numpy as np

MAX_CYCLE_LENGTH = 12


class GraphError(ValueError):
    pass


@dataclass(frozen=True, eq=False)
class Graph:
    """Undirected multigraph on vertices 0..n-1.

    ``edges`` keeps every edge with multiplicity, loops as ``(v, v)``.
    ``matching`` optionally records the half-edge pairing the graph was
    built from (half-edge ``(i, j)`` is encoded as ``i*d + j``).
    """

    n: int
    edges: tuple[tuple[int, int], ...]
    matching: np.ndarray | None = field(default=None, repr=False)

    @classmethod
    def from_edges(cls, n: int, edges: Iterable[tuple[int, int]], matching=None) -> "Graph":
        norm = []
        for u, v in edges:
            u, v = int(u), int(v)
            if not (0 <= u < n and 0 <= v < n):
                raise GraphError(f"edge ({u}, {v}) out of range for n={n}")
            norm.append((u, v) if u <= v else (v, u))
        return cls(n, tuple(norm), matching)

    @cached_property
    def incident(self) -> tuple[tuple[int, ...], ...]:
        """Per-vertex incident edge ids; a loop is listed twice."""
        inc: list[list[int]] = [[] for _ in range(self.n)]
        for k, (u, v) in enumerate(self.edges):
            inc[u].append(k)
            inc[v].append(k)
        return tuple(tuple(x) for x in inc)

    @cached_property
    def adjacency(self) -> tuple[tuple[int, ...], ...]:
        """Per-vertex neighbour lists with multiplicity (a loop gives v twice)."""
        out = []
        for v, ks in enumerate(self.incident):
            nb = []
            for k in ks:
                a, b = self.edges[k]
                nb.append(b if a == v else a)
            out.append(tuple(nb))
        return tuple(out)

    @cached_property
    def degrees(self) -> np.ndarray:
        return np.array([len(x) for x in self.incident], dtype=np.int64)

    @property
    def d(self) -> int | None:
        """Common degree, or None for an irregular graph."""
        if self.n == 0:
            return None
        degs = self.degrees
        return int(degs[0]) if np.all(degs == degs[0]) else None

    @property
    def num_edges(self) -> int:
        return len(self.edges)

    @cached_property
    def has_loops(self) -> bool:
        return any(u == v for u, v in self.edges)

    @cached_property
    def is_simple(self) -> bool:
        return not self.has_loops and len(set(self.edges)) == len(self.edges)

    @cached_property
    def multiplicity(self) -> dict[tuple[int, int], int]:
        m: dict[tuple[int, int], int] = {}
        for e in self.edges:
            m[e] = m.get(e, 0) + 1
        return m

    def check(self) -> None:
        """Raise if edge list and adjacency disagree."""
        count = np.zeros(self.n, dtype=np.int64)
        for u, v in self.edges:
            count[u] += 1
            count[v] += 1
        if not np.array_equal(count, self.degrees):
            raise GraphError("adjacency inconsistent with edge list")

    def cut_value(self, spins) -> int:
        """Number of edges whose endpoints carry different spins."""
        s = np.asarray(spins)
        if not self.edges:
            return 0
        e = np.asarray(self.edges)
        return int(np.count_nonzero(s[e[:, 0]] != s[e[:, 1]]))

    def to_json(self) -> dict:
        return {"n": self.n, "d": self.d, "edges": [list(e) for e in self.edges]}


# ---------------------------------------------------------------- sampling

def _check_nd(n: int, d: int) -> None:
    if n < 1 or d < 1 or n * d == 0:
        raise GraphError("n*d must be positive")
    if (n * d) % 2:
        raise GraphError(f"n*d = {n * d} is odd; no perfect matching of half-edges")


def sample_matching(n: int, d: int, rng: np.random.Generator) -> np.ndarray:
    """Uniform perfect matching of the n*d half-edges, shape (n*d/2, 2)."""
    _check_nd(n, d)
    return rng.permutation(n * d).reshape(-1, 2)


def graph_from_matching(n: int, d: int, matching: np.ndarray) -> Graph:
    verts = np.asarray(matching) // d
    return Graph.from_edges(n, map(tuple, verts.tolist()), matching=np.asarray(matching))


def sample_configuration_model(n: int, d: int, seed) -> Graph:
    rng = np.random.default_rng(seed)
    return graph_from_matching(n, d, sample_matching(n, d, rng))


def sample_simple_regular(n: int, d: int, seed, max_tries: int = 10_000) -> Graph:
    """Rejection-sample the configuration model until the draw is simple."""
    _check_nd(n, d)
    if d >= n:
        raise GraphError(f"no simple {d}-regular graph on {n} vertices")
    rng = np.random.default_rng(seed)
    for _ in range(max_tries):
        g = graph_from_matching(n, d, sample_matching(n, d, rng))
        if g.is_simple:
            return g
    raise GraphError(f"no simple graph after {max_tries} configuration-model draws")


# ---------------------------------------------------------------- families

def ring_graph(n: int) -> Graph:
    return Graph.from_edges(n, [(i, (i + 1) % n) for i in range(n)])


def complete_graph(n: int) -> Graph:
    return Graph.from_edges(n, [(i, j) for i in range(n) for j in range(i + 1, n)])


def grid_graph(side: int, dim: int = 2) -> Graph:
    """Periodic hypercubic grid with ``side**dim`` vertices."""
    if side < 3:
        raise GraphError("periodic grid needs side >= 3")
    n = side**dim
    coords = np.array(np.unravel_index(np.arange(n), (side,) * dim)).T
    edges = []
    for axis in range(dim):
        nxt = coords.copy()
        nxt[:, axis] = (nxt[:, axis] + 1) % side
        w = np.ravel_multi_index(nxt.T, (side,) * dim)
        edges.extend(zip(range(n), w.tolist()))
    return Graph.from_edges(n, edges)


# ---------------------------------------------------------------- distances

def distances_within(g: Graph, sources, r: int | None = None) -> dict[int, int]:
    """BFS hop distances from a vertex (or vertex set) up to radius r."""
    if isinstance(sources, (int, np.integer)):
        sources = [int(sources)]
    dist = {}
    for s in sources:
        if not 0 <= s < g.n:
            raise GraphError(f"vertex {s} out of range")
        dist[int(s)] = 0
    q = deque(dist)
    adj = g.adjacency
    while q:
        u = q.popleft()
        du = dist[u]
        if r is not None and du >= r:
            continue
        for w in adj[u]:
            if w not in dist:
                dist[w] = du + 1
                q.append(w)
    return dist


def ball(g: Graph, v, r: int) -> set[int]:
    return set(distances_within(g, v, r))


def shell(g: Graph, v, r: int) -> set[int]:
    return {u for u, du in distances_within(g, v, r).items() if du == r}


def distance(g: Graph, u: int, v: int) -> float:
    """Hop count, ``math.inf`` when unreachable."""
    if not 0 <= v < g.n:
        raise GraphError(f"vertex {v} out of range")
    dist = distances_within(g, u)
    return dist.get(v, float("inf"))


def is_tree_ball(g: Graph, v: int, r: int) -> bool:
    """True if BFS to depth r from v meets no loop, multi-edge or cycle.

    Only edges touching a vertex at distance < r are examined, i.e. the
    edges BFS actually walks along.
    """
    dist = distances_within(g, v, r)
    seen_edges = set()
    for u, du in dist.items():
        if du < r:
            for k in g.incident[u]:
                a, b = g.edges[k]
                if a == b:
                    return False
                seen_edges.add(k)
    return len(seen_edges) == len(dist) - 1


# ---------------------------------------------------------------- cycles

def cycle_counts(g: Graph, max_len: int) -> dict[int, int]:
    """Number of distinct simple cycles of each length 1..max_len.

    Loops are cycles of length 1, a pair of parallel edges a cycle of
    length 2. Longer cycles are counted with the product of the edge
    multiplicities along them.
    """
    if max_len > MAX_CYCLE_LENGTH:
        raise GraphError(f"cycle search limited to length {MAX_CYCLE_LENGTH}")
    counts = {k: 0 for k in range(1, max_len + 1)}
    if max_len <= 0:
        return counts
    mult = g.multiplicity
    for (u, v), m in mult.items():
        if u == v:
            counts[1] += m
        elif max_len >= 2:
            counts[2] += m * (m - 1) // 2
    if max_len < 3:
        return counts
    nbrs = [sorted(set(a) - {i}) for i, a in enumerate(g.adjacency)]

    def w(a, b):
        return mult[(a, b) if a < b else (b, a)]

    # every cycle is rooted at its smallest vertex and walked both ways
    twice = {k: 0 for k in range(3, max_len + 1)}
    for s in range(g.n):
        onpath = {s}

        def extend(u, length, weight):
            for x in nbrs[u]:
                if x == s and length >= 3:
                    twice[length] += weight * w(u, s)
                elif x > s and x not in onpath and length < max_len:
                    onpath.add(x)
                    extend(x, length + 1, weight * w(u, x))
                    onpath.discard(x)

        extend(s, 1, 1)
    for k, c in twice.items():
        counts[k] = c // 2
    return counts


def count_cycles_up_to(g: Graph, max_len: int) -> int:
    return sum(cycle_counts(g, max_len).values())


# ---------------------------------------------------------------- file I/O

def read_graph(path) -> Graph:
    with open(path) as fh:
        text = fh.read()
    if text.lstrip().startswith("{"):
        data = json.loads(text)
        g = Graph.from_edges(data["n"], [tuple(e) for e in data["edges"]])
        declared = data.get("d")
    else:
        lines = [ln.split() for ln in text.splitlines() if ln.strip() and not ln.startswith("#")]
        n, declared = int(lines[0][0]), int(lines[0][1])
        g = Graph.from_edges(n, [(int(a), int(b)) for a, b in lines[1:]])
    if declared and g.d != declared:
        raise GraphError(f"graph is not {declared}-regular")
    return g


def write_graph(g: Graph, path, fmt: str = "txt") -> None:
    with open(path, "w") as fh:
        fh.write(format_graph(g, fmt))


def format_graph(g: Graph, fmt: str = "txt") -> str:
    if fmt == "json":
        return json.dumps(g.to_json()) + "\n"
    d = g.d if g.d is not None else 0
    return "".join([f"{g.n} {d}\n"] + [f"{u} {v}\n" for u, v in g.edges])
