#!/usr/bin/env python3
"""
Test cut metrics and F1 matching.

This test suite validates:
- Volumes, boundary volume, NCut and conductance on hand-computed inputs
- Complement symmetry and trivial-partition errors
- k-way NCut and its agreement with the 2-way form
- The NCut / Rayleigh quotient identity for indicator vectors
- Greedy and Hungarian F1 matching, ties and unmatched classes
"""

import sys
import os
from pathlib import Path

import numpy as np

# Add parent directory to path
sys.path.insert(0, str(Path(__file__).parent.parent))

from hyperclus.errors import EmptyCluster, LengthMismatch, TrivialPartition
from hyperclus.hypergraph import build_hypergraph
from hyperclus.laplacian import rayleigh_quotient
from hyperclus.metrics import (
    batch_cut_volumes,
    boundary_volume,
    conductance,
    greedy_f1_match,
    greedy_match,
    hungarian_f1_match,
    indicator_vector,
    ncut2,
    ncut_k,
    quality,
    relative_error,
    set_volume,
)
from hyperclus.random_walk import random_walk
from hyperclus.spectral import Partition


def path3_walk():
    return random_walk(build_hypergraph([(1.0, {0: 1.0, 1: 1.0}), (1.0, {1: 1.0, 2: 1.0})], 3))


def edvw_walk():
    h = build_hypergraph(
        [
            (1.0, {0: 2.0, 1: 1.0, 2: 1.0}),
            (3.0, {1: 1.0, 3: 4.0}),
            (0.5, {2: 1.0, 3: 1.0, 4: 2.0}),
            (2.0, {0: 1.0, 4: 1.0}),
        ],
        5,
    )
    return random_walk(h)


def test_path_cut_values():
    """Test volumes, cut, NCut and conductance of S = {0} on a path"""
    walk = path3_walk()
    phi, P = walk.phi, walk.transition
    assert abs(set_volume(phi, [0]) - 0.25) <= 1e-9
    assert abs(boundary_volume(phi, P, [0]) - 0.125) <= 1e-9
    assert abs(ncut2(phi, P, [0]) - 2 / 3) <= 1e-9
    assert abs(conductance(phi, P, [0]) - 0.5) <= 1e-9
    q = quality(phi, P, [0])
    assert abs(q.vol_S + q.vol_S_complement - 1.0) <= 1e-12
    assert abs(q.ncut - ncut2(phi, P, [0])) <= 1e-15
    print("✓ Path cut values")


def test_complement_symmetry():
    """Test NCut(S) == NCut(complement) exactly"""
    walk = edvw_walk()
    rng = np.random.default_rng(2)
    for _ in range(10):
        S = rng.random(5) < 0.5
        if S.all() or not S.any():
            continue
        assert ncut2(walk.phi, walk.transition, S) == ncut2(walk.phi, walk.transition, ~S)
        assert conductance(walk.phi, walk.transition, S) == conductance(walk.phi, walk.transition, ~S)
    print("✓ Complement symmetry")


def test_conductance_bounds():
    """Test 0 <= conductance <= NCut <= 2 * conductance"""
    walk = edvw_walk()
    for code in range(1, 16):
        S = [0] + [j + 1 for j in range(4) if code >> j & 1]
        if len(S) == 5:
            continue
        c = conductance(walk.phi, walk.transition, S)
        n = ncut2(walk.phi, walk.transition, S)
        assert 0 <= c <= n + 1e-12 <= 2 * c + 2e-12
    print("✓ Conductance bounds")


def test_trivial_partition():
    """Test empty and full sets are rejected"""
    walk = path3_walk()
    for S in ([], [0, 1, 2]):
        try:
            ncut2(walk.phi, walk.transition, S)
            assert False, f"{S} should raise"
        except TrivialPartition:
            pass
    print("✓ Trivial partitions rejected")


def test_ncut_k():
    """Test k-way NCut agrees with the 2-way form and checks empty clusters"""
    walk = edvw_walk()
    labels = np.array([0, 0, 1, 1, 0])
    two_way = ncut2(walk.phi, walk.transition, labels == 0)
    assert abs(ncut_k(walk.phi, walk.transition, labels, 2) - two_way) <= 1e-9
    assert abs(ncut_k(walk.phi, walk.transition, Partition(labels=labels, k=2)) - two_way) <= 1e-9

    singletons = ncut_k(walk.phi, walk.transition, np.arange(5), 5)
    expected = sum(1.0 - walk.transition.toarray()[i, i] for i in range(5))
    assert abs(singletons - expected) <= 1e-9
    try:
        ncut_k(walk.phi, walk.transition, np.array([0, 0, 2, 2, 0]), 3)
        assert False, "Cluster 1 is empty"
    except EmptyCluster:
        pass
    try:
        ncut_k(walk.phi, walk.transition, np.array([0, 1]), 2)
        assert False, "Wrong label count"
    except LengthMismatch:
        pass
    print("✓ k-way NCut")


def test_indicator_identity():
    """Test NCut(S) = R(x_S)/2 for the indicator vector of S"""
    walk = edvw_walk()
    for S in ([0], [0, 3], [1, 2, 4]):
        x = indicator_vector(walk.phi, S)
        assert abs(float(x @ walk.phi)) <= 1e-12
        r = rayleigh_quotient(x, walk.phi, walk.transition)
        assert abs(ncut2(walk.phi, walk.transition, S) - r / 2) <= 1e-9
    print("✓ Indicator identity")


def test_batch_cut_volumes():
    """Test the batched evaluation against one-at-a-time values"""
    walk = edvw_walk()
    masks = np.array([[True, False, True, False, False], [True, True, False, False, True]])
    cut, vol_s, vol_c = batch_cut_volumes(walk.phi, walk.transition.toarray(), masks)
    for i, mask in enumerate(masks):
        q = quality(walk.phi, walk.transition, mask)
        assert abs(cut[i] - q.boundary_volume) <= 1e-12
        assert abs(vol_s[i] - q.vol_S) <= 1e-12 and abs(vol_c[i] - q.vol_S_complement) <= 1e-12
    print("✓ Batched cut volumes")


def test_relative_error():
    assert abs(relative_error(0.5, 0.4) - 0.25) <= 1e-12
    print("✓ Relative error")


def test_greedy_f1_perfect_and_partial():
    """Test F1 values for a perfect and an imperfect clustering"""
    perfect = greedy_f1_match([0, 0, 1, 1], ["a", "a", "b", "b"])
    assert perfect.f1s == [1.0, 1.0] and perfect.weighted_f1 == 1.0

    report = greedy_f1_match([0, 0, 0, 1], ["a", "a", "b", "b"])
    assert [c for c, _, _ in report.per_cluster_f1] == [0, 1]
    assert np.allclose(report.f1s, [0.8, 2 / 3])
    assert abs(report.weighted_f1 - (0.4 + 1 / 3)) <= 1e-12
    print("✓ Greedy F1 values")


def test_greedy_match_ties_and_order():
    """Test the largest entry is committed first and ties go to the lowest index"""
    F = np.array([[0.9, 0.8], [0.7, 0.1]])
    assert greedy_match(F) == [(0, 0), (1, 1)]
    assert greedy_match(np.full((2, 2), 0.5)) == [(0, 0), (1, 1)]
    print("✓ Greedy matching order")


def test_greedy_match_three_clusters():
    """Test a row whose best class is taken falls back to its next best free class"""
    F = np.array([[0.0, 0.9, 0.0], [0.8, 0.0, 0.0], [0.0, 0.7, 0.6]])
    assert greedy_match(F) == [(0, 1), (1, 0), (2, 2)]
    print("✓ Greedy matching with a taken class")


def test_hungarian_never_worse():
    """Test the optimal matching scores at least the greedy total"""
    pred = [0, 0, 0, 1, 1, 2, 2, 2, 2]
    truth = ["x", "x", "y", "y", "y", "z", "z", "x", "y"]
    greedy = greedy_f1_match(pred, truth)
    optimal = hungarian_f1_match(pred, truth)
    assert sum(optimal.f1s) >= sum(greedy.f1s) - 1e-12
    print("✓ Hungarian matching")


def test_unmatched_classes():
    """Test fewer clusters than classes leaves classes at F1 = 0"""
    report = greedy_f1_match([0, 0, 0, 0], ["a", "a", "b", "c"])
    assert len(report.per_cluster_f1) == 3
    assert report.per_cluster_f1[0][0] == 0
    assert report.per_cluster_f1[1] == (None, "b", 0.0)
    assert report.per_cluster_f1[2] == (None, "c", 0.0)
    assert abs(report.weighted_f1 - 0.5 * (2 / 3)) <= 1e-12
    try:
        greedy_f1_match([0, 1], ["a"])
        assert False, "Length mismatch should raise"
    except LengthMismatch:
        pass
    print("✓ Unmatched classes")


def run_all_tests():
    """Run all metric tests"""
    tests = [
        test_path_cut_values,
        test_complement_symmetry,
        test_conductance_bounds,
        test_trivial_partition,
        test_ncut_k,
        test_indicator_identity,
        test_batch_cut_volumes,
        test_relative_error,
        test_greedy_f1_perfect_and_partial,
        test_greedy_match_ties_and_order,
        test_greedy_match_three_clusters,
        test_hungarian_never_worse,
        test_unmatched_classes,
    ]

    print("\nRunning Metric Tests")
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
        print(f"✅ All {len(tests)} metric tests passed!")
        return True
    else:
        print(f"❌ {len(failed)} tests failed: {', '.join(failed)}")
        return False


if __name__ == "__main__":
    os.chdir(Path(__file__).parent.parent)
    success = run_all_tests()
    sys.exit(0 if success else 1)
