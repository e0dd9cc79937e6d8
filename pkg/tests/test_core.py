"""Construction, greedy semantics, matching and verification primitives."""

import itertools
import random

import pytest

from conftest import brute_max_matching_size, random_perm, random_pm_graph

from greedyorder import (
    BipartiteGraph,
    GreedyOutcome,
    Permutation,
    align_with_matching,
    check_prefix_bound,
    find_perfect_matching,
    greedy_match,
    max_matching,
    verify_stability,
)
from greedyorder.core import (
    PerfectMatching,
    adaptive_items_player,
    minimal_tight_item_set,
    verify_maximal,
)
from greedyorder.errors import (
    DimensionMismatchError,
    InvalidGraphError,
    NoPerfectMatchingError,
    PropositionViolatedError,
)

FIG1_EDGES = [(0, 0), (0, 1), (1, 1), (1, 2), (2, 0), (2, 2)]


def fig1():
    return BipartiteGraph.from_edges(3, FIG1_EDGES)


def test_from_edges_rejects_bad_input():
    with pytest.raises(InvalidGraphError):
        BipartiteGraph.from_edges(0, [])
    with pytest.raises(InvalidGraphError):
        BipartiteGraph.from_edges(3, [(0, 5)])
    with pytest.raises(InvalidGraphError):
        BipartiteGraph.from_edges(3, [(-1, 0)])
    with pytest.raises(InvalidGraphError):
        BipartiteGraph.from_edges(3, [(0, 0), (0, 0)])


def test_edges_property_is_sorted():
    g = BipartiteGraph.from_edges(3, [(2, 2), (0, 1), (1, 0), (0, 0)])
    assert g.edges == [(0, 0), (0, 1), (1, 0), (2, 2)]
    assert g.num_edges == 4
    assert g.degrees_u() == [2, 1, 1]
    assert g.degrees_v() == [2, 1, 1]


def test_permutation_validation():
    with pytest.raises(InvalidGraphError):
        Permutation.from_order([0, 0, 1])
    with pytest.raises(InvalidGraphError):
        Permutation.from_order([0, 3])
    p = Permutation.from_order([2, 0, 1])
    assert p.order == (2, 0, 1)
    assert p.rank == (1, 2, 0)
    assert len(p) == 3
    assert Permutation.identity(4).order == (0, 1, 2, 3)


def test_greedy_trace_on_six_cycle():
    """Hand-checked arrival traces on the 3+3 six-cycle."""
    g = fig1()
    ident = Permutation.identity(3)

    out = greedy_match(g, ident, ident)
    assert out.matched_v_of_u == (0, 1, 2)
    assert out.size == 3
    assert out.unmatched_v() == [] and out.unmatched_u() == []

    # u1 takes v1, u2 takes v0 (rank 0 beats v2), u0 finds both gone
    out = greedy_match(g, Permutation.from_order([1, 2, 0]), ident)
    assert out.matched_v_of_u == (None, 1, 0)
    assert out.matched_u_of_v == (2, 1, None)
    assert out.size == 2
    assert out.unmatched_u() == [0]
    assert out.unmatched_v() == [2]


def test_greedy_against_reference_replay():
    """Compare against a freshly written greedy on random inputs."""

    def reference(g, sigma, pi):
        taken = set()
        mu = [None] * g.n
        for u in sigma.order:
            free = [v for v in g.adj_u[u] if v not in taken]
            if free:
                v = min(free, key=lambda w: pi.rank[w])
                taken.add(v)
                mu[u] = v
        return tuple(mu)

    rng = random.Random(11)
    for _ in range(200):
        n = rng.randrange(1, 8)
        g = random_pm_graph(rng, n)
        sigma, pi = random_perm(rng, n), random_perm(rng, n)
        out = greedy_match(g, sigma, pi)
        assert out.matched_v_of_u == reference(g, sigma, pi)
        assert out.size == sum(1 for v in out.matched_v_of_u if v is not None)


def test_greedy_dimension_mismatch():
    g = fig1()
    with pytest.raises(DimensionMismatchError):
        greedy_match(g, Permutation.identity(4), Permutation.identity(3))
    with pytest.raises(DimensionMismatchError):
        greedy_match(g, Permutation.identity(3), Permutation.identity(2))


def test_max_matching_against_bitmask_dp():
    rng = random.Random(23)
    for _ in range(120):
        nl = rng.randrange(1, 7)
        nr = rng.randrange(1, 7)
        adj = [
            [v for v in range(nr) if rng.random() < 0.45] for _ in range(nl)
        ]
        got = len(max_matching(adj, nr))
        assert got == brute_max_matching_size(adj, nr)


def test_find_perfect_matching_on_corpus(corpus):
    for inst in corpus:
        g = inst.graph
        m = find_perfect_matching(g)
        assert sorted(m.v_of_u) == list(range(g.n))
        for u, v in m.pairs:
            assert v in g.adj_u[u], inst.instance_id
        assert m.u_of_v[m.v_of_u[0]] == 0


def test_find_perfect_matching_absent():
    # both left vertices see only v0
    g = BipartiteGraph.from_edges(2, [(0, 0), (1, 0)])
    with pytest.raises(NoPerfectMatchingError):
        find_perfect_matching(g)


def test_align_with_matching_relabels_consistently():
    rng = random.Random(5)
    for _ in range(40):
        n = rng.randrange(2, 9)
        g = random_pm_graph(rng, n)
        m = find_perfect_matching(g)
        aligned, v_map = align_with_matching(g, m)
        assert sorted(v_map) == list(range(n))
        # identity must be a perfect matching of the relabeled graph
        for i in range(n):
            assert i in aligned.adj_u[i]
        orig = set(g.edges)
        assert {(u, v_map[w]) for u, w in aligned.edges} == orig


def test_check_prefix_bound_holds_and_validates():
    rng = random.Random(71)
    g = random_pm_graph(rng, 6, extra=9)
    m = find_perfect_matching(g)
    for _ in range(60):
        pi, sigma = random_perm(rng, 6), random_perm(rng, 6)
        k = rng.randrange(0, 7)
        stats = check_prefix_bound(g, m, pi, sigma, k)
        assert stats.k == k
        assert stats.matched_in_prefix >= stats.bound
    with pytest.raises(DimensionMismatchError):
        check_prefix_bound(g, m, random_perm(rng, 6), random_perm(rng, 6), 7)


def test_verify_maximal_flags_missed_edge():
    g = fig1()
    rng = random.Random(3)
    for _ in range(50):
        out = greedy_match(g, random_perm(rng, 3), random_perm(rng, 3))
        assert verify_maximal(g, out)
    hollow = GreedyOutcome(
        matched_v_of_u=(None, 1, None), matched_u_of_v=(None, 1, None), size=1
    )
    assert not verify_maximal(g, hollow)


def test_verify_stability_flags_blocking_pair():
    g = fig1()
    sigma = Permutation.from_order([2, 0, 1])
    pi = Permutation.identity(3)
    out = greedy_match(g, sigma, pi)
    assert verify_stability(g, sigma, pi, out)
    # u0 holds v0 although u2 arrived earlier and prefers v0 too
    doctored = GreedyOutcome(
        matched_v_of_u=(0, 2, None), matched_u_of_v=(0, None, 1), size=2
    )
    assert not verify_stability(g, sigma, pi, doctored)


def test_stability_on_random_runs():
    rng = random.Random(17)
    for _ in range(300):
        n = rng.randrange(1, 9)
        g = random_pm_graph(rng, n)
        sigma, pi = random_perm(rng, n), random_perm(rng, n)
        out = greedy_match(g, sigma, pi)
        assert verify_maximal(g, out)
        assert verify_stability(g, sigma, pi, out)


def test_minimal_tight_item_set_on_six_cycle():
    g = fig1()
    # every proper subset of items has more interested buyers than items
    tight = minimal_tight_item_set(g.adj_v, {0, 1, 2}, {0, 1, 2})
    assert tight == [0, 1, 2]


def test_minimal_tight_item_set_requires_remaining_pm():
    g = fig1()
    with pytest.raises(PropositionViolatedError):
        minimal_tight_item_set(g.adj_v, {0, 1}, {0})


def test_adaptive_items_player_forces_perfect_matching(corpus):
    strategies = [
        lambda item, interested: interested[0],
        lambda item, interested: interested[-1],
    ]
    rng = random.Random(9)
    strategies.append(lambda item, interested: rng.choice(interested))
    for inst in corpus:
        if inst.graph.n > 8:
            continue
        for strat in strategies:
            out = adaptive_items_player(inst.graph, strat)
            assert out.size == inst.graph.n, inst.instance_id


def test_adaptive_items_player_rejects_bad_strategy():
    g = fig1()
    with pytest.raises(InvalidGraphError):
        adaptive_items_player(g, lambda item, interested: -1)
    no_pm = BipartiteGraph.from_edges(2, [(0, 0), (1, 0)])
    with pytest.raises(NoPerfectMatchingError):
        adaptive_items_player(no_pm, lambda item, interested: interested[0])
