from __future__ import annotations

import itertools
import warnings

import numpy as np
import pytest

from aqgap.generators import (GeneratorSpec, GeneratorWarning, gen_3sat, gen_marked,
                              gen_spin_glass, gen_weak_strong, grid_graph, random_3sat_clauses,
                              ring_graph, sat_instance, weak_strong_layout)
from aqgap.io import dumps_instance
from aqgap.ising import InstanceError, ground_configs
from aqgap.landscape import census, flip_cost
from aqgap.perturbative import s_minus_energy, s_plus_hamming
from aqgap.sat import (brute_force_sat, from_dimacs, random_3sat, sat_check, to_dimacs,
                       violated_counts)
from aqgap.spectrum import gap, min_gap_search


def test_graphs():
    assert ring_graph(4) == [(0, 1), (0, 3), (1, 2), (2, 3)]
    assert len(grid_graph(9)) == 12
    assert len(grid_graph(8)) == 10  # 2 x 4


def test_spin_glass_zero_field_symmetric():
    inst = gen_spin_glass(6, "ring", "uniform", 0.0, seed=1)
    assert inst.spin_flip_symmetric
    assert min_gap_search(inst).spin_flip_symmetric


def test_ferro_ring_two_minima():
    inst = gen_spin_glass(8, "ring", "pm1", 0.0, seed=0)
    inst = type(inst).ising(inst.h, {e: 1.0 for e in inst.J})
    assert list(ground_configs(inst)) == [0, 255]


def test_seed_determinism():
    for spec in (GeneratorSpec("spin-glass", {"n": 7}, 3),
                 GeneratorSpec("weak-strong", {"n_domains": 2, "domain_size": 3}, 3),
                 GeneratorSpec("3sat", {"n_vars": 8, "alpha": 4.2}, 3),
                 GeneratorSpec("marked", {"n": 6}, 3)):
        assert dumps_instance(spec.build()) == dumps_instance(spec.build())
    a = gen_spin_glass(7, seed=1)
    b = gen_spin_glass(7, seed=2)
    assert a != b


def test_weak_strong_flip_energy():
    for k in (2, 3, 5):
        inst = gen_weak_strong(1, k, h_bias=0.3, seed=k)
        f = int(ground_configs(inst)[0])
        assert flip_cost(inst, range(k), f) == pytest.approx(k * 0.3)


def test_weak_strong_two_domains_minima():
    inst = gen_weak_strong(2, 4, J_intra=2.0, J_inter=0.2, h_bias=0.1, seed=0)
    rep = census(inst)
    assert rep.n_local - len(rep.global_minima) >= 3


def test_weak_strong_domain_size_one():
    # single-qubit "domains": a biased chain; with the bias above twice the
    # chain coupling no configuration other than the ground state is stable
    inst = gen_weak_strong(4, 1, J_intra=2.0, J_inter=0.2, h_bias=0.5, seed=0)
    rep = census(inst)
    assert rep.n_local == 1
    assert rep.low_far_count == 0


def test_weak_strong_mechanism_by_construction():
    k = 4
    inst = gen_weak_strong(1, k, J_inter=0.0, h_bias=0.25, partner_coupling=0.5, seed=3)
    domains, partners = weak_strong_layout(1, k, True)
    f = int(ground_configs(inst)[0])
    flipped = f ^ sum(1 << q for q in domains[0])
    cost = flip_cost(inst, domains[0], f)
    assert cost > 0
    assert flipped in s_minus_energy(inst, cost * 1.01)
    assert flipped not in s_plus_hamming(inst, k)


def test_weak_strong_padding_and_limits():
    inst = gen_weak_strong(1, 2, partner_coupling=0.5, h_bias=0.25, n_total=7, seed=0)
    assert inst.n == 7
    assert gap(inst, 0.0)[0] == pytest.approx(1.0)
    with pytest.raises(InstanceError):
        gen_weak_strong(1, 4, partner_coupling=0.5, n_total=6)


def test_weak_strong_warns_on_unstable_domain():
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        gen_weak_strong(1, 3, J_intra=0.01, h_bias=0.5, seed=0)
    assert any(issubclass(w.category, GeneratorWarning) for w in caught)


def test_3sat_single_clause():
    inst, clauses = gen_3sat(6, 1 / 6, seed=4)
    assert len(clauses) == 1
    assert int(np.sum(inst.energies == 1)) == 64 // 8
    assert inst.energies.min() == 0


def test_3sat_energy_is_violation_count():
    inst, clauses = gen_3sat(10, 4.0, seed=2)
    for z in np.random.default_rng(0).integers(0, 1024, 50):
        direct = sum(not any(((z >> (abs(l) - 1)) & 1) == (l > 0) for l in c) for c in clauses)
        assert inst.energies[z] == direct


def test_3sat_clause_shape():
    clauses = random_3sat(12, 200, np.random.default_rng(1))
    assert all(len({abs(l) for l in c}) == 3 for c in clauses)
    assert all(1 <= abs(l) <= 12 for c in clauses for l in c)


def test_satisfiable_instance_min_zero():
    for seed in range(10):
        inst, clauses = gen_3sat(10, 3.0, seed=seed)
        if sat_check(clauses):
            assert inst.energies.min() == 0
        else:
            assert inst.energies.min() > 0


def test_sat_check_small_cases():
    assert sat_check([]) is True
    assert sat_check([(1, 1, 1), (-1, -1, -1)]) is False
    assert sat_check([()]) is False


def test_dpll_matches_brute_force():
    for seed in range(100):
        clauses = random_3sat_clauses(16, 4.26, seed=seed)
        assert sat_check(clauses) == brute_force_sat(clauses, 16), seed


def test_sat_timeout_returns_none():
    clauses = random_3sat_clauses(200, 4.26, seed=1)
    assert sat_check(clauses, timeout=0.0) is None


def test_dimacs_round_trip():
    clauses = random_3sat_clauses(9, 3.0, seed=5)
    n, back = from_dimacs(to_dimacs(clauses, 9))
    assert n == 9 and back == clauses


def test_violated_counts_all_assignments():
    clauses = [(1, -2, 3), (-1, 2, 3)]
    counts = violated_counts(clauses, 3)
    for z, bits in enumerate(itertools.product([0, 1], repeat=3)):
        x = [(z >> i) & 1 for i in range(3)]
        v = sum(not any(x[abs(l) - 1] == (l > 0) for l in c) for c in clauses)
        assert counts[z] == v


def test_marked_unique_ground():
    inst = gen_marked(6, seed=3)
    sols = ground_configs(inst)
    assert len(sols) == 1
    assert inst.energies[sols[0]] == 0
    assert gen_marked(6, seed=3, marked=5).source["marked"] == 5


def test_marked_gap_scaling():
    ns = [4, 6, 8, 10]
    profs = [min_gap_search(gen_marked(n, seed=1)) for n in ns]
    slope = np.polyfit(ns, np.log2([p.g_min for p in profs]), 1)[0]
    assert slope == pytest.approx(-0.5, abs=0.15)
    s = [p.s_star for p in profs]
    assert np.all(np.diff(s) > 0)
    assert np.all(np.diff(np.diff(s)) < 0)  # drift slows down


def test_sat_instance_source_round_trip():
    clauses = random_3sat_clauses(5, 2.0, seed=0)
    inst = sat_instance(5, clauses)
    assert inst.source == {"generator": "3sat", "clauses": [list(c) for c in clauses]}


def test_unknown_family():
    with pytest.raises(ValueError):
        GeneratorSpec("bogus").build()
