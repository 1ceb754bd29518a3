"""Pairwise Ising models sum_{i<j} J_ij s_i s_j and their maximisation."""
from __future__ import annotations

import json
import time
from dataclasses import dataclass, field
from typing import Mapping

import numba
import numpy as np

MAX_EXACT_SITES = 40
MAX_EXHAUSTIVE_SITES = 26


class SolverError(RuntimeError):
    pass


class SolverTimeout(SolverError):
    pass


@dataclass(frozen=True)
class IsingInstance:
    """Sites, symmetric couplings keyed by (u, v) with u < v, and a constant offset."""

    sites: tuple[int, ...]
    couplings: Mapping[tuple[int, int], float]
    offset: float = 0.0
    meta: Mapping = field(default_factory=dict, compare=False)

    def __post_init__(self):
        sites = tuple(sorted(int(s) for s in self.sites))
        if len(set(sites)) != len(sites):
            raise ValueError("duplicate sites")
        clean = {}
        known = set(sites)
        for (u, v), j in self.couplings.items():
            u, v = int(u), int(v)
            if u == v:
                raise ValueError("self-coupling")
            if u not in known or v not in known:
                raise ValueError(f"coupling ({u}, {v}) on unknown site")
            key = (u, v) if u < v else (v, u)
            clean[key] = clean.get(key, 0.0) + float(j)
        object.__setattr__(self, "sites", sites)
        object.__setattr__(self, "couplings", dict(sorted(clean.items())))

    def __len__(self):
        return len(self.sites)

    def coupling(self, u: int, v: int) -> float:
        return self.couplings.get((u, v) if u < v else (v, u), 0.0)

    def matrix(self, order=None) -> np.ndarray:
        order = list(self.sites) if order is None else list(order)
        pos = {s: k for k, s in enumerate(order)}
        m = np.zeros((len(order), len(order)))
        for (u, v), j in self.couplings.items():
            m[pos[u], pos[v]] = m[pos[v], pos[u]] = j
        return m

    def abs_sum(self) -> float:
        return float(sum(abs(j) for j in self.couplings.values()))

    def to_json(self) -> dict:
        return {
            "offset": self.offset,
            "sites": list(self.sites),
            "pairs": [{"u": u, "v": v, "J": j} for (u, v), j in self.couplings.items()],
        }

    @classmethod
    def from_json(cls, data: dict) -> "IsingInstance":
        pairs = data.get("pairs", [])
        sites = data.get("sites")
        if sites is None:
            sites = sorted({p["u"] for p in pairs} | {p["v"] for p in pairs})
        return cls(tuple(sites), {(p["u"], p["v"]): p["J"] for p in pairs}, float(data.get("offset", 0.0)))

    @classmethod
    def load(cls, path) -> "IsingInstance":
        with open(path) as fh:
            return cls.from_json(json.load(fh))


@dataclass(frozen=True)
class Solution:
    spins: dict[int, int]
    value: float
    method: str
    nodes: int = 0

    def vector(self, sites) -> np.ndarray:
        return np.array([self.spins[s] for s in sites], dtype=np.int8)


def _as_vector(inst: IsingInstance, sigma) -> np.ndarray:
    if isinstance(sigma, Mapping):
        if set(sigma) != set(inst.sites):
            raise ValueError("spin assignment does not cover exactly the instance sites")
        vec = np.array([sigma[s] for s in inst.sites], dtype=float)
    else:
        vec = np.asarray(sigma, dtype=float)
        if vec.shape != (len(inst.sites),):
            raise ValueError("spin vector length does not match the sites")
    if not np.all(np.abs(vec) == 1):
        raise ValueError("spins must be +-1")
    return vec


def energy(inst: IsingInstance, sigma) -> float:
    """sum over coupled pairs of J s_u s_v (offset excluded)."""
    vec = _as_vector(inst, sigma)
    pos = {s: k for k, s in enumerate(inst.sites)}
    return float(sum(j * vec[pos[u]] * vec[pos[v]] for (u, v), j in inst.couplings.items()))


def _lex_less(a: np.ndarray, b: np.ndarray) -> bool:
    diff = np.flatnonzero(a != b)
    return bool(diff.size) and a[diff[0]] < b[diff[0]]


# ---------------------------------------------------------------- exhaustive

@numba.njit(cache=True)
def _exhaustive(J, tol):
    n = J.shape[0]
    s = np.ones(n, dtype=np.int8)
    for i in range(1, n):
        s[i] = -1
    # start from (+1, -1, ..., -1) and walk a Gray code over sites 1..n-1
    e = 0.0
    for i in range(n):
        for j in range(i + 1, n):
            e += J[i, j] * s[i] * s[j]
    best = e
    best_s = s.copy()
    total = 1 << (n - 1)
    for t in range(1, total):
        bit = 0
        x = t
        while (x & 1) == 0:
            x >>= 1
            bit += 1
        i = bit + 1
        h = 0.0
        for j in range(n):
            if j != i:
                h += J[i, j] * s[j]
        e -= 2.0 * h * s[i]
        s[i] = -s[i]
        if e > best + tol:
            best = e
            best_s[:] = s
        elif e > best - tol:
            # tie: keep the lexicographically smaller vector (-1 < +1)
            for j in range(n):
                if s[j] != best_s[j]:
                    if s[j] < best_s[j]:
                        best = e
                        best_s[:] = s
                    break
    return best, best_s


def solve_exhaustive(inst: IsingInstance) -> Solution:
    n = len(inst)
    if n > MAX_EXHAUSTIVE_SITES:
        raise SolverError(f"exhaustive search limited to {MAX_EXHAUSTIVE_SITES} sites")
    if n == 0:
        return Solution({}, 0.0, "exhaustive")
    J = inst.matrix()
    tol = 1e-9 * (1.0 + inst.abs_sum())
    _, s = _exhaustive(J, tol)
    spins = {site: int(x) for site, x in zip(inst.sites, s)}
    return Solution(spins, energy(inst, spins), "exhaustive", 1 << (n - 1))


# ---------------------------------------------------------------- branch and bound

@numba.njit(cache=True)
def _bnb_run(J, rest, sigma, h, E, state, k, best, best_sigma, tol, stop_first, neg_first, budget):
    """Resumable depth-first search; returns (k, best, nodes_used, done)."""
    n = J.shape[0]
    nodes = 0
    while k >= 1:
        if nodes >= budget:
            return k, best, nodes, False
        if k == n:
            if E[n] > best + tol or (stop_first and E[n] > best):
                best = E[n]
                best_sigma[:] = sigma
                if stop_first:
                    return 0, best, nodes, True
            k -= 1
            continue
        if state[k] == 2:
            state[k] = 0
            k -= 1
            continue
        if neg_first:
            pref = -1
        else:
            pref = 1 if h[k, k] >= 0 else -1
        s = pref if state[k] == 0 else -pref
        state[k] += 1
        sigma[k] = s
        nodes += 1
        E[k + 1] = E[k] + h[k, k] * s
        ub = E[k + 1] + rest[k + 1]
        for i in range(k + 1, n):
            h[k + 1, i] = h[k, i] + J[k, i] * s
            ub += abs(h[k + 1, i])
        if ub <= best + tol and not (stop_first and ub > best):
            continue
        k += 1
        state[k] = 0
    return k, best, nodes, True


def _branch_order(inst: IsingInstance) -> list[int]:
    """Most strongly coupled site first, then greedily the site most tied to those placed."""
    m = np.abs(inst.matrix())
    weight = m.sum(axis=1)
    n = len(inst)
    order = [int(np.argmax(weight))]
    placed = np.zeros(n, dtype=bool)
    placed[order[0]] = True
    link = m[order[0]].copy()
    for _ in range(n - 1):
        score = np.where(placed, -np.inf, link + 1e-9 * weight)
        nxt = int(np.argmax(score))
        order.append(nxt)
        placed[nxt] = True
        link += m[nxt]
    return [inst.sites[i] for i in order]


def _search(J, target, tol, stop_first, neg_first, timeout, deadline_start, budget=2_000_000):
    n = J.shape[0]
    absJ = np.abs(J)
    rest = np.zeros(n + 1)
    for k in range(n - 1, -1, -1):
        rest[k] = rest[k + 1] + absJ[k, k + 1:].sum()
    sigma = np.zeros(n, dtype=np.int8)
    sigma[0] = 1  # global flip gauge
    h = np.zeros((n + 1, n))
    h[1] = J[0]
    E = np.zeros(n + 1)
    state = np.zeros(n + 1, dtype=np.int64)
    best_sigma = np.zeros(n, dtype=np.int8)
    best = target
    k = 1
    total = 0
    while True:
        k, best, used, done = _bnb_run(J, rest, sigma, h, E, state, k, best, best_sigma, tol,
                                       stop_first, neg_first, budget)
        total += used
        if done:
            return best, best_sigma, total
        if time.perf_counter() - deadline_start > timeout:
            raise SolverTimeout(f"branch and bound exceeded {timeout} s after {total} nodes")


def solve_exact(inst: IsingInstance, timeout: float = 60.0, canonical: bool = True) -> Solution:
    """Global maximum by branch and bound.

    The bound at a node is the fixed energy plus |local field| of every free
    site plus sum |J| over free pairs. The optimum is reported as the
    lexicographically smallest maximiser (site order, -1 < +1) with the
    first site at +1.
    """
    n = len(inst)
    if n > MAX_EXACT_SITES:
        raise SolverError(f"branch and bound limited to {MAX_EXACT_SITES} sites")
    if n == 0:
        return Solution({}, 0.0, "exact")
    if n == 1:
        return Solution({inst.sites[0]: 1}, 0.0, "exact")
    t0 = time.perf_counter()
    tol = 1e-9 * (1.0 + inst.abs_sum())
    order = _branch_order(inst)
    J = inst.matrix(order)
    seed = solve_local_search(inst, seed=0, restarts=20, sweeps=100)
    target = seed.value - 2 * tol
    best, s, nodes = _search(J, target, tol, False, False, timeout, t0)
    if canonical:
        Jn = inst.matrix()
        _, s, more = _search(Jn, best - tol, tol, True, True, timeout, t0)
        nodes += more
        spins = {site: int(x) for site, x in zip(inst.sites, s)}
    else:
        spins = {site: int(x) for site, x in zip(order, s)}
    return Solution(spins, energy(inst, spins), "exact", nodes)


# ---------------------------------------------------------------- local search

@numba.njit(cache=True)
def _descent(J, s, max_sweeps):
    n = J.shape[0]
    h = J @ s.astype(np.float64)
    for _ in range(max_sweeps):
        best_gain = 1e-12
        best_i = -1
        for i in range(n):
            gain = -2.0 * s[i] * h[i]
            if gain > best_gain:
                best_gain = gain
                best_i = i
        if best_i < 0:
            break
        s[best_i] = -s[best_i]
        for j in range(n):
            h[j] += 2.0 * J[j, best_i] * s[best_i]
    return s


def solve_local_search(inst: IsingInstance, seed=0, restarts: int = 20, sweeps: int = 1000) -> Solution:
    """Best of random-start steepest single-flip ascents."""
    n = len(inst)
    if n == 0:
        return Solution({}, 0.0, "local")
    rng = np.random.default_rng(seed)
    J = inst.matrix()
    best_val, best_s = -np.inf, None
    for _ in range(max(1, restarts)):
        s = rng.choice(np.array([-1, 1], dtype=np.int8), size=n)
        s = _descent(J, s, sweeps * n)
        if s[0] < 0:
            s = -s
        val = 0.5 * float(s @ J @ s)
        if val > best_val + 1e-12 or (abs(val - best_val) <= 1e-12 and _lex_less(s, best_s)):
            best_val, best_s = val, s.copy()
    spins = {site: int(x) for site, x in zip(inst.sites, best_s)}
    return Solution(spins, energy(inst, spins), "local")


def solve(inst: IsingInstance, method: str = "exact", seed=0, timeout: float = 60.0) -> Solution:
    if method == "exact":
        return solve_exact(inst, timeout=timeout)
    if method == "exhaustive":
        return solve_exhaustive(inst)
    if method == "local":
        return solve_local_search(inst, seed=seed)
    raise SolverError(f"unknown solver {method!r}")
