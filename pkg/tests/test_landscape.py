from __future__ import annotations

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from aqgap.generators import gen_spin_glass, gen_weak_strong, ring_graph
from aqgap.ising import ProblemInstance
from aqgap.landscape import census, flip_cost, local_minima_by_sweep

from conftest import random_ising


def ferro_ring(n):
    return ProblemInstance.ising(np.zeros(n), {e: 1.0 for e in ring_graph(n)})


def _domains(z, n):
    """Lengths of the cyclic runs of equal bits."""
    bits = [(z >> i) & 1 for i in range(n)]
    walls = [i for i in range(n) if bits[i] != bits[(i + 1) % n]]
    if not walls:
        return [n]
    return [(walls[(k + 1) % len(walls)] - walls[k]) % n or n for k in range(len(walls))]


def test_ferro_ring_census():
    n = 6
    rep = census(ferro_ring(n))
    assert list(rep.global_minima) == [0, 63]
    mins = set(int(z) for z in rep.configs)
    for z in range(64):
        runs = _domains(z, n)
        if len(runs) == 2:
            assert (z in mins) == (min(runs) >= 2)


def test_single_field_one_minimum():
    rep = census(ProblemInstance.ising(np.ones(5)))
    assert rep.n_local == 1
    assert list(rep.configs) == list(rep.global_minima)


def test_weak_strong_far_minimum():
    inst = gen_weak_strong(1, 4, J_inter=0.0, h_bias=0.25, partner_coupling=0.5, seed=3)
    rep = census(inst)
    assert rep.distances.max() >= 4


def test_census_matches_sweep(rng):
    for n in (3, 6, 9, 12):
        inst = random_ising(n, rng)
        np.testing.assert_array_equal(np.sort(census(inst).configs), local_minima_by_sweep(inst))
    inst = gen_spin_glass(10, "ring", "pm1", 0.0, seed=2)  # many ties
    np.testing.assert_array_equal(np.sort(census(inst).configs), local_minima_by_sweep(inst))


@given(st.integers(2, 9), st.integers(0, 2 ** 32 - 1), st.sampled_from(["uniform", "pm1"]))
def test_census_matches_sweep_property(n, seed, dist):
    inst = gen_spin_glass(n, "complete", dist, 0.0 if dist == "pm1" else 0.2, seed=seed)
    np.testing.assert_array_equal(np.sort(census(inst).configs), local_minima_by_sweep(inst))


def test_complementary_pairs_without_fields():
    inst = gen_spin_glass(8, "grid", "uniform", 0.0, seed=5)
    mins = set(int(z) for z in census(inst).configs)
    assert all((z ^ 255) in mins for z in mins)


def test_plateau_minima_counted():
    # two qubits, no couplings, one zero field: both states of qubit 1 tie
    inst = ProblemInstance.ising([1.0, 0.0])
    rep = census(inst)
    assert sorted(int(z) for z in rep.configs) == [0, 2]
    assert rep.plateau.all()


def test_histogram_and_bands():
    inst = gen_spin_glass(8, "grid", "uniform", 0.1, seed=1)
    rep = census(inst)
    assert rep.counts.sum() == rep.n_local
    e = inst.energies
    assert rep.E_band == pytest.approx(0.1 * (e.max() - e.min()))
    assert rep.d_band == 2
    rel = rep.energies - rep.global_energy
    assert rep.low_far_count == int(np.sum((rel < rep.E_band) & (rep.distances > 2)))
    wide = census(inst, E_band=1e9, d_band=-1)
    assert wide.low_far_count == wide.n_local


def test_flip_cost_examples():
    inst = ferro_ring(6)
    assert flip_cost(inst, range(6), 0) == 0.0
    assert flip_cost(inst, [0, 1, 2], 0) == pytest.approx(2.0)
    field = ProblemInstance.ising([1.0])
    assert flip_cost(field, [0], 0) == pytest.approx(1.0)
    assert flip_cost(field, [0], 1) == pytest.approx(-1.0)
    with pytest.raises(ValueError):
        flip_cost(field, [], 0)
