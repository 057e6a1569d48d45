#!/usr/bin/env python3
"""
Test the EDVW hypergraph data model.

This test suite validates hypergraph construction and the structures built on it:
- Validation order and error types
- Duplicate member merging and singleton policies
- Edge restriction and induced sub-hypergraphs
- Connectivity and component sizes
- Incidence matrices and degrees
"""

import sys
import os
from pathlib import Path

import numpy as np

# Add parent directory to path
sys.path.insert(0, str(Path(__file__).parent.parent))

from hyperclus.errors import (
    InputError,
    IsolatedVertex,
    NonPositiveWeight,
    SingletonEdge,
    VertexIndexOutOfRange,
)
from hyperclus.hypergraph import (
    build_hypergraph,
    check_connected,
    component_labels,
    component_sizes,
    incidence_matrices,
    induced_subhypergraph,
    raw_component_labels,
    restrict_edges,
    with_unit_edvw,
)


def dumbbell():
    """Two triangles joined by a light edge."""
    raw = [
        (1.0, {0: 1.0, 1: 1.0, 2: 1.0}),
        (1.0, {3: 1.0, 4: 1.0, 5: 1.0}),
        (0.1, {2: 1.0, 3: 1.0}),
    ]
    return build_hypergraph(raw, 6)


def test_build_basic():
    """Test sizes, weights and connection counts"""
    h = dumbbell()
    assert h.n_vertices == 6
    assert h.n_edges == 3
    assert h.n_connections == 8
    assert h.edge_sizes.tolist() == [3, 3, 2]
    assert np.allclose(h.edge_weights, [1.0, 1.0, 0.1])
    assert h.hyperedges[0].degree == 3.0
    assert h.vertex_name(4) == "4"
    print("✓ Basic construction")


def test_equality_is_structural():
    """Test equal hypergraphs compare equal and are not hashable"""
    assert dumbbell() == dumbbell()
    assert dumbbell() != build_hypergraph([(1.0, {0: 1.0, 1: 1.0})], 2)
    try:
        hash(dumbbell())
        assert False, "Hypergraphs should not be hashable"
    except TypeError:
        pass
    print("✓ Structural equality")


def test_duplicate_members_are_summed():
    """Test that repeated (vertex, gamma) pairs merge into one sorted member"""
    h = build_hypergraph([(2.0, [(1, 1.0), (0, 2.0), (0, 1.5)])], 2)
    assert list(h.hyperedges[0].members.items()) == [(0, 3.5), (1, 1.0)]
    print("✓ Duplicate members summed")


def test_validation_errors():
    """Test that each invalid input raises its own error type"""
    cases = [
        (([(0.0, {0: 1.0, 1: 1.0})], 2), NonPositiveWeight),
        (([(float("nan"), {0: 1.0, 1: 1.0})], 2), NonPositiveWeight),
        (([(1.0, {0: -1.0, 1: 1.0})], 2), NonPositiveWeight),
        (([(1.0, {0: 1.0, 5: 1.0})], 2), VertexIndexOutOfRange),
        (([(1.0, {0: 1.0, 1: 1.0})], 3), IsolatedVertex),
        (([(1.0, {0: 1.0})], 1), InputError),
    ]
    for (raw, n), error in cases:
        try:
            build_hypergraph(raw, n)
            assert False, f"Expected {error.__name__} for {raw}"
        except error:
            pass
    print("✓ Validation errors")


def test_weight_checked_before_indices():
    """Test that a bad weight is reported before a bad vertex in the same edge"""
    try:
        build_hypergraph([(-1.0, {0: 1.0, 9: 1.0})], 2)
        assert False, "Should have raised"
    except NonPositiveWeight:
        pass
    print("✓ Weight validated first")


def test_singleton_policies():
    """Test prune versus strict handling of one-member edges"""
    raw = [(1.0, {0: 1.0, 1: 1.0}), (1.0, {1: 1.0})]
    pruned = build_hypergraph(raw, 2, policy="prune")
    assert pruned.n_edges == 1
    try:
        build_hypergraph(raw, 2, policy="strict")
        assert False, "Strict policy should reject singleton edges"
    except SingletonEdge:
        pass
    try:
        build_hypergraph(raw, 2, policy="lenient")
        assert False, "Unknown policy should raise"
    except InputError as e:
        assert "lenient" in str(e)
    print("✓ Singleton policies")


def test_vertex_names():
    """Test that names travel with the hypergraph and must match n"""
    h = build_hypergraph([(1.0, {0: 1.0, 1: 1.0})], 2, vertex_names=["aardvark", "bass"])
    assert h.vertex_name(1) == "bass"
    try:
        build_hypergraph([(1.0, {0: 1.0, 1: 1.0})], 2, vertex_names=["only-one"])
        assert False, "Name count mismatch should raise"
    except InputError:
        pass
    print("✓ Vertex names")


def test_unit_edvw():
    """Test that the EIVW ablation keeps weights and membership"""
    h = build_hypergraph([(2.0, {0: 3.0, 1: 0.5})], 2)
    unit = with_unit_edvw(h)
    assert unit.hyperedges[0].weight == 2.0
    assert unit.hyperedges[0].members == {0: 1.0, 1: 1.0}
    print("✓ Unit EDVW")


def test_restrict_edges():
    """Test restriction to a vertex subset with local relabelling"""
    h = dumbbell()
    raw = restrict_edges(h, [2, 3, 4])
    assert raw == [(1.0, {1: 1.0, 2: 1.0}), (0.1, {0: 1.0, 1: 1.0})]

    sub = induced_subhypergraph(h, [3, 4, 5])
    assert sub.n_vertices == 3 and sub.n_edges == 1
    try:
        induced_subhypergraph(h, [0, 4])
        assert False, "Vertices with no surviving edge should raise"
    except IsolatedVertex:
        pass
    print("✓ Edge restriction")


def test_connectivity():
    """Test connectivity checks and component sizes"""
    assert check_connected(dumbbell())
    split = build_hypergraph([(1.0, {0: 1.0, 1: 1.0}), (1.0, {2: 1.0, 3: 1.0, 4: 1.0})], 5)
    assert not check_connected(split)
    assert component_labels(split).tolist() == [0, 0, 1, 1, 1]
    assert component_sizes(split) == [3, 2]

    labels = raw_component_labels([(1.0, {2: 1.0, 3: 1.0})], 4)
    assert labels.tolist() == [0, 1, 2, 2], "Components are numbered by first vertex"
    print("✓ Connectivity")


def test_incidence_matrices():
    """Test R, W and both degree vectors"""
    h = build_hypergraph([(2.0, {0: 1.0, 1: 3.0}), (1.0, {1: 1.0, 2: 1.0})], 3)
    inc = incidence_matrices(h)
    assert inc.R.shape == (2, 3) and inc.W.shape == (3, 2)
    assert inc.m == h.n_connections == 4
    assert inc.R.toarray().tolist() == [[1.0, 3.0, 0.0], [0.0, 1.0, 1.0]]
    assert inc.W.toarray().tolist() == [[2.0, 0.0], [2.0, 1.0], [0.0, 1.0]]
    assert inc.d_V.tolist() == [2.0, 3.0, 1.0]
    assert inc.d_E.tolist() == [4.0, 2.0]
    print("✓ Incidence matrices")


def run_all_tests():
    """Run all hypergraph tests"""
    tests = [
        test_build_basic,
        test_equality_is_structural,
        test_duplicate_members_are_summed,
        test_validation_errors,
        test_weight_checked_before_indices,
        test_singleton_policies,
        test_vertex_names,
        test_unit_edvw,
        test_restrict_edges,
        test_connectivity,
        test_incidence_matrices,
    ]

    print("\nRunning Hypergraph Tests")
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
        print(f"✅ All {len(tests)} hypergraph tests passed!")
        return True
    else:
        print(f"❌ {len(failed)} tests failed: {', '.join(failed)}")
        return False


if __name__ == "__main__":
    os.chdir(Path(__file__).parent.parent)
    success = run_all_tests()
    sys.exit(0 if success else 1)
