import itertools

import numpy as np
import pytest

from bnmdl.errors import CycleError, InvalidEdge, SizeMismatch, TooLarge
from bnmdl.graph import (dag_from_bitmask, enumerate_dags, equivalence_classes, equivalence_key,
                         format_edge_list, markov_equivalent, new_dag, parse_edge_list)

FORK = [(1, 2), (1, 3)]
CHAIN = [(2, 1), (1, 3)]
COLLIDER = [(2, 1), (3, 1)]


def brute_force_dag_count(n):
    """Count acyclic digraphs among all 2**(n(n-1)) off-diagonal adjacency patterns.

    A 0/1 adjacency matrix is acyclic iff it is nilpotent, i.e. A**n == 0.
    """
    pairs = [(i, j) for i in range(n) for j in range(n) if i != j]
    codes = np.arange(1 << len(pairs), dtype=np.int64)
    adj = np.zeros((codes.size, n, n), dtype=np.int64)
    for b, (i, j) in enumerate(pairs):
        adj[:, i, j] = (codes >> b) & 1
    power = adj.copy()
    for _ in range(n - 1):
        power = np.minimum(power @ adj, 1)
    return int((power.reshape(codes.size, -1).sum(axis=1) == 0).sum())


def test_empty_graph():
    d = new_dag(3, [])
    assert d.parents == ((), (), ())


def test_fork_parents():
    d = new_dag(3, FORK)
    assert d.parents_of(2) == (1,) and d.parents_of(3) == (1,)
    assert d.children_of(1) == (2, 3)


def test_two_cycle_rejected():
    with pytest.raises(CycleError):
        new_dag(2, [(1, 2), (2, 1)])


def test_longer_cycle_reports_path():
    with pytest.raises(CycleError) as err:
        new_dag(3, [(1, 2), (2, 3), (3, 1)])
    assert len(err.value.cycle) == 4


@pytest.mark.parametrize("edges", [[(1, 1)], [(0, 1)], [(1, 4)], [(1, 2), (1, 2)]])
def test_invalid_edges(edges):
    with pytest.raises(InvalidEdge):
        new_dag(3, edges)


@pytest.mark.parametrize("n,expected", [(1, 1), (2, 3), (3, 25), (4, 543)])
def test_enumeration_counts(n, expected):
    dags = enumerate_dags(n)
    assert len(dags) == expected
    assert len(dags) == brute_force_dag_count(n)


def test_enumeration_canonical_order_and_unique():
    dags = enumerate_dags(4)
    masks = [d.bitmask for d in dags]
    assert masks == sorted(set(masks))
    assert all(dag_from_bitmask(4, d.bitmask) == d for d in dags)


def test_enumeration_cap():
    with pytest.raises(TooLarge):
        enumerate_dags(6)


def test_equivalence_keys():
    fork = equivalence_key(new_dag(3, FORK))
    assert fork.skeleton == {(1, 2), (1, 3)} and fork.v_structures == frozenset()
    coll = equivalence_key(new_dag(3, COLLIDER))
    assert coll.skeleton == {(1, 2), (1, 3)} and coll.v_structures == {(2, 1, 3)}
    empty = equivalence_key(new_dag(3, []))
    assert empty.skeleton == frozenset() and empty.v_structures == frozenset()


def test_markov_equivalence_examples():
    fork, chain, coll = new_dag(3, FORK), new_dag(3, CHAIN), new_dag(3, COLLIDER)
    assert markov_equivalent(fork, chain)
    assert not markov_equivalent(fork, coll)
    assert markov_equivalent(coll, coll)
    with pytest.raises(SizeMismatch):
        markov_equivalent(fork, new_dag(2, []))


def test_shielded_collider_is_not_a_v_structure():
    d = new_dag(3, [(2, 1), (3, 1), (2, 3)])
    assert equivalence_key(d).v_structures == frozenset()


@pytest.mark.parametrize("n,classes", [(2, 2), (3, 11), (4, 185)])
def test_number_of_equivalence_classes(n, classes):
    # known counts of Markov equivalence classes of labeled DAGs
    assert len(equivalence_classes(enumerate_dags(n))) == classes


def test_equivalence_is_an_equivalence_relation():
    dags = enumerate_dags(3)
    for a, b, c in itertools.product(dags[:10], repeat=3):
        if markov_equivalent(a, b) and markov_equivalent(b, c):
            assert markov_equivalent(a, c)
        assert markov_equivalent(a, b) == markov_equivalent(b, a)


def test_edge_list_round_trip():
    d = new_dag(4, [(1, 2), (3, 2), (2, 4)])
    text = "# comment\n" + format_edge_list(d) + "\n"
    assert parse_edge_list(text, n=4) == d
    assert parse_edge_list("1 3\n").n == 3
    with pytest.raises(InvalidEdge):
        parse_edge_list("1 2 3\n")
