import itertools
import json

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from postqaoa.ising import (
    IsingInstance,
    SolverError,
    SolverTimeout,
    energy,
    solve,
    solve_exact,
    solve_exhaustive,
    solve_local_search,
)


def random_instance(rng, n, density=0.5, scale=1.0):
    couplings = {}
    for u, v in itertools.combinations(range(n), 2):
        if rng.random() < density:
            couplings[(u, v)] = float(rng.normal(scale=scale))
    return IsingInstance(tuple(range(n)), couplings, float(rng.normal()))


def brute_max(inst):
    m = inst.matrix()
    best = -np.inf
    for bits in itertools.product((1, -1), repeat=len(inst)):
        s = np.array(bits)
        best = max(best, 0.5 * s @ m @ s)
    return best


@given(st.integers(0, 10**6), st.integers(2, 10))
@settings(max_examples=60, deadline=None)
def test_exact_and_exhaustive_match_brute_force(seed, n):
    inst = random_instance(np.random.default_rng(seed), n)
    ref = brute_max(inst)
    ex = solve_exact(inst)
    ez = solve_exhaustive(inst)
    assert ex.value == pytest.approx(ref, abs=1e-9)
    assert ez.value == pytest.approx(ref, abs=1e-9)
    assert energy(inst, ex.spins) == pytest.approx(ex.value, abs=1e-12)


def test_exact_and_exhaustive_agree_on_spins():
    rng = np.random.default_rng(1)
    for _ in range(50):
        inst = random_instance(rng, 16, density=0.3)
        a, b = solve_exact(inst), solve_exhaustive(inst)
        assert a.value == pytest.approx(b.value, abs=1e-9)
        assert a.spins == b.spins


def test_local_search_never_beats_exact():
    rng = np.random.default_rng(2)
    gaps = []
    for _ in range(30):
        inst = random_instance(rng, 20, density=0.3)
        exact = solve_exact(inst).value
        loc = solve_local_search(inst, seed=0).value
        assert loc <= exact + 1e-9
        gaps.append(exact - loc)
    assert np.mean(gaps) < 0.05 * np.mean([random_instance(rng, 20).abs_sum()])


def test_antiferromagnetic_ring():
    m = 8
    inst = IsingInstance(tuple(range(m)), {(j, (j + 1) % m): -1.0 for j in range(m)})
    sol = solve_exact(inst)
    assert sol.value == pytest.approx(8.0)
    assert all(sol.spins[j] != sol.spins[(j + 1) % m] for j in range(m))


def test_frustrated_odd_ring():
    m = 7
    inst = IsingInstance(tuple(range(m)), {(j, (j + 1) % m): -1.0 for j in range(m)})
    assert solve_exact(inst).value == pytest.approx(5.0)


def test_large_sparse_instance_is_fast():
    rng = np.random.default_rng(3)
    inst = random_instance(rng, 40, density=0.15, scale=0.02)
    sol = solve_exact(inst, timeout=30)
    assert sol.value >= solve_local_search(inst, seed=1).value - 1e-12


def test_timeout_raises():
    rng = np.random.default_rng(4)
    inst = random_instance(rng, 40, density=1.0)
    with pytest.raises(SolverTimeout):
        solve_exact(inst, timeout=0.0)


def test_trivial_sizes():
    assert solve_exact(IsingInstance((), {})).value == 0.0
    assert solve_exact(IsingInstance((5,), {})).spins == {5: 1}


def test_instance_validation_and_json(tmp_path):
    with pytest.raises(ValueError):
        IsingInstance((0, 1), {(0, 0): 1.0})
    with pytest.raises(ValueError):
        IsingInstance((0, 1), {(0, 2): 1.0})
    inst = IsingInstance((3, 1, 2), {(2, 1): 0.5, (1, 2): 0.25, (1, 3): -1.0}, 2.0)
    assert inst.sites == (1, 2, 3)
    assert inst.coupling(2, 1) == 0.75
    path = tmp_path / "i.json"
    path.write_text(json.dumps(inst.to_json()))
    back = IsingInstance.load(path)
    assert back.couplings == inst.couplings and back.offset == 2.0


def test_unknown_solver():
    with pytest.raises(SolverError):
        solve(IsingInstance((0, 1), {(0, 1): 1.0}), "annealing")
