"""Closed-form postselected depth-1 QAOA on the ring, postselecting every third vertex."""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Mapping

import numpy as np

from .qaoa import QaoaParams


class RingError(ValueError):
    pass


def _check(n: int) -> int:
    if n % 3 or n < 6:
        raise RingError(f"ring size must be a multiple of 3 and at least 6, got {n}")
    return n // 3


def edge_cut_p1(params: QaoaParams) -> float:
    """Expected cut per ring edge, unconditioned."""
    b, g = params.beta, params.gamma
    return 0.5 - math.sin(2 * b) * math.sin(2 * g) / 4


def pair_coefficient(params: QaoaParams) -> float:
    """c such that postselection shifts the cut by -c * s_3j * s_3(j+1) per neighbouring pair.

    Two outer edges of the block each carry sin^2(b) sin^2(2g)/4 through the
    distance-2 correlator and the middle edge carries the four-body term.
    """
    b, g = params.beta, params.gamma
    return ((5 + 3 * math.cos(2 * g)) * math.sin(2 * b) ** 2 * math.sin(g) ** 2 / 16
            + math.sin(b) ** 2 * math.sin(2 * g) ** 2 / 4)


def pair_coefficient_halved(params: QaoaParams) -> float:
    """Variant with the outer-edge term counted once; disagrees with the statevector."""
    b, g = params.beta, params.gamma
    return ((5 + 3 * math.cos(2 * g)) * math.sin(2 * b) ** 2 * math.sin(g) ** 2 / 16
            + math.sin(b) ** 2 * math.sin(2 * g) ** 2 / 8)


def _sigma_vector(m: int, sigma) -> np.ndarray:
    if isinstance(sigma, str):
        if sigma == "alternating":
            return np.array([1 if j % 2 == 0 else -1 for j in range(m)])
        if sigma == "all-plus":
            return np.ones(m, dtype=int)
        raise RingError(f"unknown sigma pattern {sigma!r}")
    if isinstance(sigma, Mapping):
        vec = np.array([sigma[3 * j] for j in range(m)])
    else:
        vec = np.asarray(list(sigma))
    if vec.shape != (m,) or not np.all(np.abs(vec) == 1):
        raise RingError(f"need {m} values of +-1 on vertices 0, 3, 6, ...")
    return vec


def ring_postselected_energy(n: int, params: QaoaParams, sigma, coefficient=pair_coefficient) -> float:
    """Expected cut on the n-ring after postselecting vertices 0, 3, 6, ... on sigma."""
    m = _check(n)
    s = _sigma_vector(m, sigma)
    bonds = float(np.sum(s * np.roll(s, -1)))
    return edge_cut_p1(params) * n - coefficient(params) * bonds


@dataclass(frozen=True)
class RingGain:
    value: float
    frustrated: bool
    sigma: tuple[int, ...]


def ring_optimal_gain(n: int, params: QaoaParams) -> RingGain:
    """Best postselection gain; an odd number of postselected vertices leaves one frustrated bond."""
    m = _check(n)
    c = pair_coefficient(params)
    sigma = tuple(1 if j % 2 == 0 else -1 for j in range(m))
    if m % 2 == 0:
        return RingGain(m * c, False, sigma)
    return RingGain((m - 2) * c, True, sigma)


def extend_to_max_cut(n: int, sigma) -> np.ndarray | None:
    """Extend values on 0, 3, 6, ... to a cut of every ring edge, or None if impossible."""
    m = _check(n)
    s = _sigma_vector(m, sigma)
    x = np.empty(n, dtype=int)
    for j in range(m):
        # three edges between 3j and 3j+3: the parity must flip
        if s[j] != -s[(j + 1) % m]:
            return None
        x[3 * j], x[3 * j + 1], x[3 * j + 2] = s[j], -s[j], s[j]
    return x


def reoptimize_grid(n: int = 6, points: int = 201, coefficient=pair_coefficient) -> tuple[float, QaoaParams]:
    """Grid search of (beta, gamma) for the best postselected cut per vertex (n/3 even)."""
    _check(n)
    best, arg = -math.inf, None
    for b in np.linspace(-math.pi / 2, 0, points):
        for g in np.linspace(0, math.pi / 2, points):
            p = QaoaParams.p1(b, g)
            v = edge_cut_p1(p) + coefficient(p) / 3
            if v > best:
                best, arg = v, p
    return best, arg


def chain_instance(n: int, params: QaoaParams):
    """Ising model on the postselected ring vertices implied by the closed form."""
    from .ising import IsingInstance

    m = _check(n)
    c = pair_coefficient(params)
    sites = tuple(3 * j for j in range(m))
    couplings: dict[tuple[int, int], float] = {}
    for j in range(m):
        u, v = sites[j], sites[(j + 1) % m]
        key = (min(u, v), max(u, v))
        couplings[key] = couplings.get(key, 0.0) - c
    return IsingInstance(sites, couplings, edge_cut_p1(params) * n)

