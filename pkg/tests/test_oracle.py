#!/usr/bin/env python3
"""
Test the brute-force oracle and the randomized property suite.

This test suite validates:
- Exact optima on a hypergraph with a known best cut
- Spectral bound checks reported by the oracle
- Size cap on brute force
- Seeded random hypergraph generation
- The property suite passing on healthy walks and catching a corrupted one
"""

import sys
import os
from pathlib import Path

# Add parent directory to path
sys.path.insert(0, str(Path(__file__).parent.parent))

from hyperclus.errors import InputError, TooLarge
from hyperclus.hypergraph import build_hypergraph, check_connected
from hyperclus.oracle import (
    PROPERTY_NAMES,
    brute_force_optima,
    dense_spectrum,
    property_checks,
    random_hypergraph,
    run_property_suite,
    trial_parameters,
)
from hyperclus.random_walk import random_walk
from hyperclus.spectral import hyperclus_g


def dumbbell():
    return build_hypergraph(
        [
            (1.0, {0: 1.0, 1: 1.0, 2: 1.0}),
            (1.0, {3: 1.0, 4: 1.0, 5: 1.0}),
            (0.1, {2: 1.0, 3: 1.0}),
        ],
        6,
    )


def test_brute_force_dumbbell():
    """Test the exact optimum is the triangle split"""
    report = brute_force_optima(dumbbell())
    assert report.sets_checked == 31
    assert report.best_ncut[0] == (0, 1, 2)
    assert abs(report.best_ncut[1] - 1 / 31) <= 1e-8
    assert report.best_conductance[0] == (0, 1, 2)
    assert report.cheeger_ok and report.relaxation_ok and report.conductance_le_ncut
    assert report.lambda2_dense <= 2 * report.best_ncut[1]
    as_dict = report.as_dict()
    assert as_dict["best_ncut_set"] == [0, 1, 2]
    print("✓ Brute force on a dumbbell")


def test_hyperclus_g_matches_oracle_on_dumbbell():
    """Test the spectral split reaches the exact optimum here"""
    h = dumbbell()
    part = hyperclus_g(h)
    report = brute_force_optima(h)
    assert part.members(0).tolist() == list(report.best_ncut[0])
    print("✓ Spectral split is optimal on a dumbbell")


def test_dense_spectrum():
    """Test the dense spectrum starts at zero and stays within [0, 2]"""
    values = dense_spectrum(random_walk(dumbbell()))
    assert abs(values[0]) <= 1e-9
    assert values[1] > 1e-6
    assert values[-1] <= 2 + 1e-9
    print("✓ Dense spectrum")


def test_size_cap():
    """Test brute force refuses large hypergraphs"""
    n = 21
    h = build_hypergraph([(1.0, {i: 1.0, i + 1: 1.0}) for i in range(n - 1)], n)
    try:
        brute_force_optima(h)
        assert False, "21 vertices should be refused"
    except TooLarge:
        pass
    print("✓ Brute-force size cap")


def test_random_hypergraph():
    """Test generation is seeded, connected and within the size bounds"""
    a = random_hypergraph(8, 10, 4, seed=7)
    b = random_hypergraph(8, 10, 4, seed=7)
    assert a == b
    assert check_connected(a)
    assert a.n_vertices == 8 and a.n_edges == 10
    assert all(2 <= e.size <= 4 for e in a.hyperedges)
    assert all(0 < e.weight <= 1 for e in a.hyperedges)
    try:
        random_hypergraph(1, 3, 2, seed=0)
        assert False, "n = 1 should raise"
    except InputError:
        pass
    print("✓ Random hypergraphs")


def test_trial_parameters():
    """Test trial sizes stay inside their ranges"""
    for seed in range(20):
        n, n_edges, size = trial_parameters(10, seed)
        assert 4 <= n <= 10
        assert n // 2 + 1 <= n_edges <= 2 * n
        assert size == min(n, 4)
    print("✓ Trial parameters")


def test_property_checks_pass():
    """Test every property holds on a few random hypergraphs"""
    for seed in range(3):
        h = random_hypergraph(6, 8, 4, seed=seed)
        results = property_checks(h, seed)
        assert [r.name for r in results] == PROPERTY_NAMES
        failures = [f"{r.name}: {r.detail}" for r in results if not r.ok]
        assert not failures, f"seed {seed}: {failures}"
    print("✓ Property checks pass")


def test_optimum_identity():
    """Test NCut at the exact optimum equals half the Rayleigh quotient of its indicator"""
    by_name = {r.name: r for r in property_checks(dumbbell(), 0)}
    assert by_name["optimum-identity"].ok, by_name["optimum-identity"].detail
    assert by_name["optimum-identity"].detail.startswith("S* = 0,1,2,")
    for seed in range(3, 6):
        by_name = {r.name: r for r in property_checks(random_hypergraph(7, 9, 3, seed=seed), seed)}
        assert by_name["optimum-identity"].ok, f"seed {seed}: {by_name['optimum-identity'].detail}"
    print("✓ Identity at the exact optimum")


def test_property_suite():
    """Test the suite runs seeded trials and reports per-trial results"""
    outcomes = run_property_suite(n_max=7, trials=4, seed=100)
    assert [seed for seed, _ in outcomes] == [100, 101, 102, 103]
    for seed, results in outcomes:
        assert all(r.ok for r in results), f"seed {seed}: {[r.name for r in results if not r.ok]}"
    try:
        run_property_suite(n_max=25, trials=1, seed=0)
        assert False, "n_max above the oracle cap should raise"
    except TooLarge:
        pass
    print("✓ Property suite")


def test_corrupted_walk_is_caught():
    """Test a P that is no longer row-stochastic fails the suite"""
    outcomes = run_property_suite(n_max=6, trials=2, seed=3, corrupt=True)
    for _, results in outcomes:
        by_name = {r.name: r for r in results}
        assert not by_name["row-stochastic"].ok
    print("✓ Corruption detected")


def run_all_tests():
    """Run all oracle tests"""
    tests = [
        test_brute_force_dumbbell,
        test_hyperclus_g_matches_oracle_on_dumbbell,
        test_dense_spectrum,
        test_size_cap,
        test_random_hypergraph,
        test_trial_parameters,
        test_property_checks_pass,
        test_optimum_identity,
        test_property_suite,
        test_corrupted_walk_is_caught,
    ]

    print("\nRunning Oracle Tests")
    print("=" * 50)

    failed = []
    for test in tests:
        try:
            test()
        except AssertionError as e:
            print(f"✗ {test.__name__}: {e}")
            failed.append(test.__name__)
        except Exception as e:
            print(f"✗ {test.__name__}: Unexpected error - {e}")
            failed.append(test.__name__)

    print("=" * 50)
    if not failed:
        print(f"✅ All {len(tests)} oracle tests passed!")
        return True
    else:
        print(f"❌ {len(failed)} tests failed: {', '.join(failed)}")
        return False


if __name__ == "__main__":
    os.chdir(Path(__file__).parent.parent)
    success = run_all_tests()
    sys.exit(0 if success else 1)
