"""QAOA states for MaxCut: full statevectors and exact depth-1 local contractions.

The ansatz is

    |psi> = prod_k exp(-i beta_k/2 sum_v X_v) exp(-i gamma_k/2 sum_e Z_u Z_v) |+>^n

with one unit ZZ coupling per edge (multi-edges add up, loops are a
global phase). Amplitude index bit v carries vertex v; bit value 0 is the
Z = +1 eigenstate.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence

import numpy as np

from .graphs import Graph

MAX_STATEVECTOR_QUBITS = 26

_Z = np.diag([1.0, -1.0]).astype(complex)
_PROJ = (np.diag([1.0, 0.0]).astype(complex), np.diag([0.0, 1.0]).astype(complex))


class QaoaError(ValueError):
    pass


@dataclass(frozen=True)
class QaoaParams:
    betas: tuple[float, ...]
    gammas: tuple[float, ...]

    def __post_init__(self):
        if len(self.betas) != len(self.gammas) or not self.betas:
            raise QaoaError("need p >= 1 matching (beta, gamma) pairs")
        if not all(math.isfinite(x) for x in self.betas + self.gammas):
            raise QaoaError("angles must be finite")

    @classmethod
    def p1(cls, beta: float, gamma: float) -> "QaoaParams":
        return cls((float(beta),), (float(gamma),))

    @classmethod
    def from_pairs(cls, pairs: Iterable[tuple[float, float]]) -> "QaoaParams":
        pairs = list(pairs)
        return cls(tuple(float(b) for b, _ in pairs), tuple(float(g) for _, g in pairs))

    @property
    def p(self) -> int:
        return len(self.betas)

    @property
    def beta(self) -> float:
        return self.betas[0]

    @property
    def gamma(self) -> float:
        return self.gammas[0]


CUBIC_P1 = QaoaParams.p1(-math.pi / 4, math.atan(1 / math.sqrt(2)))
RING_P1 = QaoaParams.p1(-math.pi / 4, math.pi / 4)


def optimal_p1_params(topology: str) -> QaoaParams:
    """Known depth-1 optimum for the ring or for tree-like cubic graphs."""
    if topology == "cubic":
        return CUBIC_P1
    if topology == "ring":
        return RING_P1
    raise QaoaError(f"unknown topology {topology!r}")


@dataclass(frozen=True)
class ZString:
    support: tuple[int, ...]

    def __post_init__(self):
        if not self.support:
            raise QaoaError("empty Z-string support")
        if len(set(self.support)) != len(self.support):
            raise QaoaError("Z-string support must be distinct vertices")

    @classmethod
    def of(cls, vertices: Iterable[int]) -> "ZString":
        return cls(tuple(int(v) for v in vertices))

    @classmethod
    def product(cls, vertices: Iterable[int]) -> "ZString | None":
        """Z-string of a product of Z's with repeats cancelled (Z^2 = I).

        Returns None when everything cancels.
        """
        odd: dict[int, bool] = {}
        for v in vertices:
            odd[int(v)] = not odd.get(int(v), False)
        sup = tuple(sorted(v for v, o in odd.items() if o))
        return cls(sup) if sup else None


def _support(zs) -> tuple[int, ...]:
    return zs.support if isinstance(zs, ZString) else ZString.of(zs).support


# ---------------------------------------------------------------- statevector

def spin_table(n: int) -> np.ndarray:
    """(2**n, n) array of +-1 spins, row b column v = (-1)**bit_v(b)."""
    idx = np.arange(2**n, dtype=np.int64)
    return (1 - 2 * ((idx[:, None] >> np.arange(n)) & 1)).astype(np.int8)


def cost_diagonal(g: Graph) -> np.ndarray:
    """sum_e Z_u Z_v on every basis state."""
    idx = np.arange(2**g.n, dtype=np.int64)
    out = np.zeros(2**g.n)
    for u, v in g.edges:
        out += 1 - 2 * (((idx >> u) ^ (idx >> v)) & 1)
    return out


def cut_diagonal(g: Graph) -> np.ndarray:
    """Number of cut edges on every basis state."""
    return 0.5 * (g.num_edges - cost_diagonal(g))


def _apply_mixer(psi: np.ndarray, n: int, beta: float) -> np.ndarray:
    c, s = math.cos(beta / 2), -1j * math.sin(beta / 2)
    for q in range(n):
        view = psi.reshape(2 ** (n - q - 1), 2, 2**q)
        a0 = view[:, 0, :].copy()
        a1 = view[:, 1, :]
        view[:, 0, :] = c * a0 + s * a1
        view[:, 1, :] = s * a0 + c * a1
    return psi


def prepare_qaoa_state(g: Graph, params: QaoaParams) -> np.ndarray:
    n = g.n
    if n > MAX_STATEVECTOR_QUBITS:
        raise QaoaError(f"statevector limited to {MAX_STATEVECTOR_QUBITS} qubits, got {n}")
    cost = cost_diagonal(g)
    psi = np.full(2**n, 2 ** (-n / 2), dtype=complex)
    for beta, gamma in zip(params.betas, params.gammas):
        psi *= np.exp(-0.5j * gamma * cost)
        psi = _apply_mixer(psi, n, beta)
    return psi


def probabilities(state: np.ndarray) -> np.ndarray:
    return np.abs(state) ** 2


def _parity_sign(dim: int, support: Sequence[int]) -> np.ndarray:
    idx = np.arange(dim, dtype=np.int64)
    par = np.zeros(dim, dtype=np.int64)
    for v in support:
        par ^= (idx >> v) & 1
    return 1 - 2 * par


def expect_zstring_full(state: np.ndarray, zs) -> float:
    sup = _support(zs)
    n = int(round(math.log2(state.size)))
    if max(sup) >= n:
        raise QaoaError("Z-string support outside the register")
    return float(np.dot(probabilities(state), _parity_sign(state.size, sup)))


def expected_cut_full(g: Graph, state: np.ndarray) -> float:
    return float(np.dot(probabilities(state), cut_diagonal(g)))


def project_outcomes(state: np.ndarray, assignment: Mapping[int, int]) -> np.ndarray:
    """Zero every amplitude inconsistent with the Z outcomes (+-1) given."""
    idx = np.arange(state.size, dtype=np.int64)
    keep = np.ones(state.size, dtype=bool)
    for v, s in assignment.items():
        bit = 0 if s > 0 else 1
        keep &= ((idx >> v) & 1) == bit
    return np.where(keep, state, 0)


# ---------------------------------------------------------------- depth-1 contraction

def _heisenberg(op: np.ndarray, beta: float) -> np.ndarray:
    c, s = math.cos(beta / 2), math.sin(beta / 2)
    u = np.array([[c, -1j * s], [-1j * s, c]])
    return u.conj().T @ op @ u


_SPIN = np.array([1.0, -1.0])
# pair index i = 2*x + y for bra bit x and ket bit y
_DX = np.repeat(_SPIN, 2)
_DY = np.tile(_SPIN, 2)


def p1_contract(
    g: Graph,
    params: QaoaParams,
    ops: Mapping[int, np.ndarray] | None = None,
    open_sites: Sequence[int] = (),
) -> np.ndarray | complex:
    """Exact <psi| prod ops |psi> for depth-1 QAOA on an arbitrary graph.

    ``ops`` maps vertices to single-qubit operators acting after the
    mixer. Vertices in ``open_sites`` get the Z-basis projectors instead,
    and the result is the array of joint outcome probabilities indexed by
    bit (0 for spin +1). Only the vertices in the operator support and
    their neighbours enter the contraction.
    """
    if params.p != 1:
        raise QaoaError("local contraction implemented for p = 1 only")
    beta, gamma = params.beta, params.gamma
    ops = dict(ops or {})
    open_sites = [int(v) for v in open_sites]
    if set(ops) & set(open_sites):
        raise QaoaError("a site cannot be both fixed and open")
    sites = sorted(set(ops) | set(open_sites))
    if not sites:
        return 1.0
    label = {v: k for k, v in enumerate(sites)}
    q = len(sites)
    operands: list = []
    out_labels: list[int] = []
    for v in sites:
        if v in ops:
            m = _heisenberg(np.asarray(ops[v], dtype=complex), beta)
            operands += [m.reshape(4) / 2, [label[v]]]
    for v in open_sites:
        t = np.stack([_heisenberg(p, beta).reshape(4) / 2 for p in _PROJ], axis=1)
        out_labels.append(q + len(out_labels))
        operands += [t, [label[v], out_labels[-1]]]

    inner: dict[tuple[int, int], int] = {}
    outer: dict[int, dict[int, int]] = {}
    for a, b in g.edges:
        if a == b:
            continue
        ia, ib = a in label, b in label
        if ia and ib:
            inner[(a, b)] = inner.get((a, b), 0) + 1
        elif ia:
            outer.setdefault(b, {}).setdefault(a, 0)
            outer[b][a] += 1
        elif ib:
            outer.setdefault(a, {}).setdefault(b, 0)
            outer[a][b] += 1
    for (a, b), m in inner.items():
        ph = np.exp(0.5j * gamma * m * (np.outer(_DX, _DX) - np.outer(_DY, _DY)))
        operands += [ph, [label[a], label[b]]]
    for _, nbrs in sorted(outer.items()):
        vs = sorted(nbrs)
        f = np.zeros((4,) * len(vs))
        for k, v in enumerate(vs):
            shape = [1] * len(vs)
            shape[k] = 4
            f = f + (nbrs[v] * (_DX - _DY)).reshape(shape)
        operands += [np.cos(0.5 * gamma * f), [label[v] for v in vs]]
    res = np.einsum(*operands, out_labels, optimize="greedy")
    if out_labels:
        return np.real(res)
    return complex(res)


def expect_zstring_p1(g: Graph, params: QaoaParams, zs) -> float:
    sup = _support(zs)
    for v in sup:
        if not 0 <= v < g.n:
            raise QaoaError(f"vertex {v} out of range")
    return float(np.real(p1_contract(g, params, {v: _Z for v in sup})))


def p1_marginal(g: Graph, params: QaoaParams, sites: Sequence[int]) -> np.ndarray:
    """Joint Z-outcome distribution on ``sites``; axis k is sites[k], index 0 = spin +1."""
    return p1_contract(g, params, open_sites=sites)


def _edge_signature(g: Graph, u: int, v: int) -> tuple:
    """Everything the depth-1 <Z_u Z_v> depends on: edge and loop multiplicities
    plus, for each other neighbour, its multiplicities to u and to v."""
    mult = g.multiplicity
    nbrs = (set(g.adjacency[u]) | set(g.adjacency[v])) - {u, v}
    outside = sorted(
        (mult.get((min(r, u), max(r, u)), 0), mult.get((min(r, v), max(r, v)), 0)) for r in nbrs
    )
    return mult[(u, v)], mult.get((u, u), 0), mult.get((v, v), 0), tuple(outside)


def edge_expectations_p1(g: Graph, params: QaoaParams) -> np.ndarray:
    """<Z_u Z_v> for every edge of g (loops give 1), cached by local signature."""
    out = np.empty(g.num_edges)
    cache: dict[tuple, float] = {}
    for k, (u, v) in enumerate(g.edges):
        if u == v:
            out[k] = 1.0
            continue
        key = _edge_signature(g, u, v)
        if key not in cache:
            cache[key] = expect_zstring_p1(g, params, (u, v))
        out[k] = cache[key]
    return out


def expected_cut_p1(g: Graph, params: QaoaParams) -> float:
    return float(np.sum(0.5 * (1 - edge_expectations_p1(g, params))))
