"""Closed-form bounds on postselected and shallow-circuit MaxCut values."""
from __future__ import annotations

import itertools
import math
from dataclasses import asdict, dataclass, field
from typing import Sequence

import numpy as np

from .graphs import Graph, cycle_counts
from .indset import alpha_star, pairs_distance4_set, successor_means
from .qaoa import CUBIC_P1, QaoaParams


class BoundError(ValueError):
    pass


@dataclass(frozen=True)
class BoundReport:
    name: str
    value: float
    units: str
    inputs: dict = field(default_factory=dict)
    extra: dict = field(default_factory=dict)

    def __post_init__(self):
        if not math.isfinite(self.value):
            raise BoundError(f"{self.name}: non-finite value")

    def to_json(self) -> dict:
        return asdict(self)


# ---------------------------------------------------------------- postselection bounds

# largest |J| for a pair at distance 3, 4 and 5 with a tree 5-ball
PAIR_COUPLING_CAPS = (0.140, 0.0252, 0.0124)
# coefficients of the three successor terms in the expectation bound
UPPER_BOUND_COEFFS = (0.84, 0.31, 0.30)
WHP_SLOPE = 0.59


def _check_alpha(alpha: float) -> None:
    if not 0 < alpha < alpha_star(3):
        raise BoundError(f"alpha must lie in (0, {alpha_star(3):.6f})")


def postselect_upper_bound_expectation(alpha: float, n: float) -> float:
    """Upper bound on the expected postselection gain (edges) with |V0| = alpha n."""
    _check_alpha(alpha)
    return alpha**2 * (0.18125 - 0.83875 * alpha + 0.99 * alpha**2) / (0.5 - alpha) ** 3 * n


def postselect_upper_bound_whp(alpha: float, eps: float, n: float) -> float:
    if eps < 0:
        raise BoundError("eps must be non-negative")
    return postselect_upper_bound_expectation(alpha, n) + WHP_SLOPE * eps * n


def upper_bound_terms(alpha: float, n: float, coeffs: Sequence[float] = UPPER_BOUND_COEFFS) -> float:
    """Three-term form c3 a^2/(1-2a) + c4 a^2(1-3a)/(1-2a)^2 + c5 a^2(1-3a)^2/(1-2a)^3, times n."""
    c3, c4, c5 = coeffs
    a = alpha
    r = (1 - 3 * a) / (1 - 2 * a)
    return n * a**2 / (1 - 2 * a) * (c3 + c4 * r + c5 * r**2)


def coefficients_from_caps(caps: Sequence[float] = PAIR_COUPLING_CAPS, d: int = 3) -> tuple[float, ...]:
    """Term coefficients implied by |J| caps times the expected successor counts, halved for pairs."""
    # successor_means(d, n, n0) / alpha at alpha -> 0 are d(d-1)^2, d(d-1)^3, d(d-1)^4
    shells = (d * (d - 1) ** 2, d * (d - 1) ** 3, d * (d - 1) ** 4)
    return tuple(0.5 * c * s for c, s in zip(caps, shells))


def expected_abs_coupling_sum(alpha: float, n: int, caps: Sequence[float] = PAIR_COUPLING_CAPS, d: int = 3) -> float:
    """(n0/2) * sum_k cap_k * E[k-th shell members], with the leading-order shell means."""
    n0 = alpha * n
    means = successor_means(d, n, n0)
    return 0.5 * n0 * sum(c * m for c, m in zip(caps, means))


LOWER_BOUND_PAIR_DENSITY = 2 / 31
LOWER_BOUND_COUPLINGS = (0.0177, -0.00357)


def lower_bound_floor(n: float) -> float:
    """Analytic gain floor in edges for the distance-4 pair construction."""
    c2, c5 = LOWER_BOUND_COUPLINGS
    return LOWER_BOUND_PAIR_DENSITY * n * (2 * c2 + c5)


def postselect_lower_bound(g: Graph, params: QaoaParams = CUBIC_P1) -> BoundReport:
    """Gain from postselecting every distance-4 pair member on +1."""
    from .postselect import build_couplings

    if g.d != 3:
        raise BoundError("lower-bound construction applies to cubic graphs")
    v0 = pairs_distance4_set(g)
    inst = build_couplings(g, v0, params, check=False)
    gain = float(sum(inst.couplings.values()))
    edges = g.num_edges
    floor = lower_bound_floor(g.n)
    return BoundReport(
        "postselect-lb", gain / edges, "fraction of |E|", {"n": g.n, "d": 3},
        {"gain_edges": gain, "set_size": len(v0), "pairs": len(v0) // 2,
         "floor_edges": floor, "floor_fraction": floor / edges,
         "target_pairs": LOWER_BOUND_PAIR_DENSITY * g.n},
    )


# ---------------------------------------------------------------- shallow-circuit bounds

def bravyi_ring_bound(n: int, R: int) -> float:
    if R < 1 or n % (2 * R + 1) or (n // (2 * R + 1)) % 2:
        raise BoundError("ring bound needs n = (2R+1)k with k even")
    return n - n / (2 * (2 * R + 1))


def bravyi_grid_bound(n: int, R: int, dim: int = 2) -> float:
    """dim*n - dim*n / (2(2R+1)) for a periodic grid of side (2R+1)k."""
    side = round(n ** (1 / dim))
    if R < 1 or side**dim != n or side % (2 * R + 1):
        raise BoundError("grid bound needs side length a multiple of 2R+1")
    return dim * n - dim * n / (2 * (2 * R + 1))


def bravyi_regular_bound(n: int, d: int, R: int, eps: float) -> float:
    """nd/2 - (1-eps) nd / (4(2R+1)); d = 2 gives the ring bound, d = 4 the 2D grid one."""
    if (n * d) % 2 or R < 1 or not 0 <= eps <= 1:
        raise BoundError("need n*d even, R >= 1 and eps in [0, 1]")
    return n * d / 2 - (1 - eps) * n * d / (4 * (2 * R + 1))


def ghz_cell_size(R: int) -> int:
    return 2 * R * R + 2 * R + 1


def ghz_cells(side: int, R: int) -> np.ndarray:
    """Cell id of every vertex for the diamond tiling of the side x side torus."""
    m = ghz_cell_size(R)
    if side % m:
        raise BoundError(f"grid side must be a multiple of {m}")
    owner = -np.ones((side, side), dtype=np.int64)
    centres = set()
    for a in range(side):
        for b in range(side):
            centres.add((((R + 1) * a - R * b) % side, (R * a + (R + 1) * b) % side))
    offsets = [(dx, dy) for dx in range(-R, R + 1) for dy in range(-R, R + 1) if abs(dx) + abs(dy) <= R]
    for cid, (cx, cy) in enumerate(sorted(centres)):
        for dx, dy in offsets:
            x, y = (cx + dx) % side, (cy + dy) % side
            if owner[x, y] >= 0:
                raise BoundError("diamond cells overlap")
            owner[x, y] = cid
    if np.any(owner < 0):
        raise BoundError("diamond cells do not cover the grid")
    return owner.reshape(-1)


def ghz_grid_value(k: int, R: int) -> BoundReport:
    """Expected cut of the GHZ-cell packing: intra-cell edges cut, the rest at 1/2."""
    if k < 2 or k % 2:
        raise BoundError("k must be an even integer >= 2")
    side = k * ghz_cell_size(R)
    n = side * side
    owner = ghz_cells(side, R).reshape(side, side)
    intra = int(np.sum(owner == np.roll(owner, -1, axis=0)) + np.sum(owner == np.roll(owner, -1, axis=1)))
    inter = 2 * n - intra
    value = intra + inter / 2
    closed = 2 * n - (2 * R + 1) / ghz_cell_size(R) * n
    return BoundReport("ghz", value, "edges", {"k": k, "R": R, "n": n},
                       {"intra_edges": intra, "inter_edges": inter, "closed_form": closed})


def ghz_cell_state(R: int = 1) -> tuple[np.ndarray, list[tuple[int, int]]]:
    """Statevector of one GHZ cell with checkerboard flips, and its internal edges."""
    offsets = [(dx, dy) for dx in range(-R, R + 1) for dy in range(-R, R + 1) if abs(dx) + abs(dy) <= R]
    q = len(offsets)
    pattern = sum(1 << i for i, (dx, dy) in enumerate(offsets) if (dx + dy) % 2)
    psi = np.zeros(2**q, dtype=complex)
    psi[pattern] = psi[pattern ^ (2**q - 1)] = 1 / math.sqrt(2)
    pos = {o: i for i, o in enumerate(offsets)}
    edges = [(pos[a], pos[b]) for a in offsets for b in offsets
             if pos[a] < pos[b] and abs(a[0] - b[0]) + abs(a[1] - b[1]) == 1]
    return psi, edges


# ---------------------------------------------------------------- path inequality

def _path_edges(g: Graph, path: Sequence[int]) -> list[tuple[int, int]]:
    out = []
    for a, b in zip(path, path[1:]):
        e = (a, b) if a <= b else (b, a)
        if e not in g.multiplicity:
            raise BoundError(f"path step {a}-{b} is not an edge")
        out.append(e)
    if len(out) < 1:
        raise BoundError("paths need at least one edge")
    return out


def path_inequality_check(g: Graph, paths: Sequence[Sequence[int]], signs, form: str = "proved") -> bool:
    """Scan all bitstrings for the path inequality with edge signs.

    ``form="proved"``: for each path P of length l,
    1 + (-1)^(l+1) prod(sign) z_first z_last <= sum_{e in P} (1 + sign_e z z),
    summed over paths. ``form="printed"``: the aggregated statement
    |P| - sum z_first z_last <= sum_e (1 + sign_e z z) |{P : e in P}|,
    which agrees with the proved one only when prod(sign) = (-1)^l on every path.
    ``signs`` maps edges (u <= v) to +-1, or is a single +-1 for all edges.
    """
    if g.n > 20:
        raise BoundError("exhaustive scan limited to n <= 20")
    spins = 1 - 2 * ((np.arange(2**g.n)[:, None] >> np.arange(g.n)) & 1)

    def sign(e):
        return signs if isinstance(signs, (int, np.integer)) else signs[e]

    lhs = np.zeros(2**g.n)
    rhs = np.zeros(2**g.n)
    for path in paths:
        es = _path_edges(g, path)
        zz_end = spins[:, path[0]] * spins[:, path[-1]]
        if form == "proved":
            prod = math.prod(sign(e) for e in es)
            lhs += 1 + (-1) ** (len(es) + 1) * prod * zz_end
        elif form == "printed":
            lhs += 1 - zz_end
        else:
            raise BoundError(f"unknown form {form!r}")
        for a, b in zip(path, path[1:]):
            e = (a, b) if a <= b else (b, a)
            rhs += 1 + sign(e) * spins[:, a] * spins[:, b]
    return bool(np.all(lhs <= rhs + 1e-12))


# ---------------------------------------------------------------- sharp-circuit and overlap bounds

def sharp_circuit_cut_bound(g: Graph, R: int, oriented: bool = False) -> BoundReport:
    """(|E| + n + (4R+1) C) / 2 with C the number of cycles of length <= 4R+1.

    ``oriented=True`` counts each cycle once per direction of traversal.
    """
    L = 4 * R + 1
    counts = cycle_counts(g, L)
    c = sum(counts.values())
    if oriented:
        c = sum(v if k <= 2 else 2 * v for k, v in counts.items())
    value = 0.5 * (g.num_edges + g.n + L * c)
    d = g.d
    extra = {"cycles": c, "per_length": counts, "edges": g.num_edges}
    if d:
        extra["regular_corollary_fraction"] = 0.5 + 1 / d
    return BoundReport("sharp", value, "edges", {"n": g.n, "R": R, "oriented": oriented}, extra)


def overlap_bound(num_edges: int, maxcut_edges: int, R: int, eps: float) -> float:
    """Cap on expected agreement between a sampled cut and a fixed maximum cut E0.

    The lemma below with alpha = (1-eps)/(2R+1) and E1 = E0.
    """
    return maxcut_edges - (1 - eps) * num_edges / (4 * (2 * R + 1))


def overlap_lemma_bound(part_size: int, maxcut_edges: int, alpha: float, num_edges: int) -> float:
    """(|E1| + MaxCut)/2 - alpha |E| / 4."""
    return 0.5 * (part_size + maxcut_edges) - alpha * num_edges / 4


def maxcut_bruteforce(g: Graph) -> tuple[int, np.ndarray]:
    """Exact maximum cut by enumeration (n <= 24)."""
    if g.n > 24:
        raise BoundError("brute-force MaxCut limited to n <= 24")
    from .qaoa import cut_diagonal

    cuts = cut_diagonal(g)
    b = int(np.argmax(cuts))
    return int(round(cuts[b])), 1 - 2 * ((b >> np.arange(g.n)) & 1)


def all_edge_signs(g: Graph):
    """Every sign assignment on the distinct edges (small graphs only)."""
    keys = sorted(g.multiplicity)
    for combo in itertools.product((1, -1), repeat=len(keys)):
        yield dict(zip(keys, combo))
