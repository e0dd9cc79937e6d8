"""Shared fixtures and brute-force oracles for the test suite.

The corpus is a fixed list of 50 instances drawn from every generator
family, all with n <= 14 so the exact adversary stays cheap.  The brute
helpers here are written independently of the production code paths they
check: the matching oracle is a bitmask DP, the adversary oracle is a
factorial sweep over arrival orders.
"""

import itertools
import random
from dataclasses import dataclass

import pytest

from greedyorder import (
    BipartiteGraph,
    FamilySpec,
    Permutation,
    generate,
    greedy_match,
)


def _corpus_specs():
    specs = [("fig1", FamilySpec("fig1"))]
    for c in (1, 2, 3):
        specs.append(("chain%d" % c, FamilySpec("badset_chain", {"copies": c})))
    for d, t in ((1, 1), (2, 1), (3, 1), (4, 1), (1, 2), (2, 2)):
        specs.append(("reg89_d%dt%d" % (d, t), FamilySpec("regular89", {"d": d, "t": t})))
    for d in range(2, 8):
        specs.append(("tight%d" % d, FamilySpec("tight_regular", {"d": d})))
    specs.append(("fano", FamilySpec("fano")))
    specs.append(("pg23", FamilySpec("pg23")))
    for n in (4, 6, 8, 10, 12, 14):
        specs.append(("biclique%d" % n, FamilySpec("biclique_half", {"n": n})))
    for i in range(4):
        specs.append(("iter%d" % i, FamilySpec("iterative", {"i": i})))
    ham = [(6, 2), (7, 3), (8, 4), (9, 3), (10, 5), (11, 4), (12, 6), (13, 5), (14, 7), (9, 0), (12, 0), (14, 0)]
    for idx, (n, extra) in enumerate(ham):
        specs.append(
            ("ham%02d" % idx, FamilySpec("hamiltonian_random", {"n": n, "extra_edges": extra}, seed=100 + idx))
        )
    rr = [(6, 2), (8, 3), (10, 3), (12, 4), (14, 4), (9, 3), (11, 3), (13, 4)]
    for idx, (n, d) in enumerate(rr):
        specs.append(("rr%02d" % idx, FamilySpec("random_regular", {"n": n, "d": d}, seed=200 + idx)))
    specs.append(("planted12", FamilySpec("planted_is", {"n": 12, "d": 3, "eps": 0.34}, seed=7)))
    specs.append(("planted14", FamilySpec("planted_is", {"n": 14, "d": 4, "eps": 0.3}, seed=8)))
    return specs


CORPUS_SPECS = _corpus_specs()


@dataclass(frozen=True)
class Instance:
    instance_id: str
    spec: FamilySpec
    graph: BipartiteGraph


@pytest.fixture(scope="session")
def corpus():
    return [Instance(name, spec, generate(spec)) for name, spec in CORPUS_SPECS]


@pytest.fixture(scope="session")
def corpus_by_id(corpus):
    return {inst.instance_id: inst for inst in corpus}


def brute_force_min(g, pi):
    """Smallest greedy matched count over every arrival order.  Factorial."""
    assert g.n <= 8, "brute sweep is factorial"
    best = g.n + 1
    for order in itertools.permutations(range(g.n)):
        best = min(best, greedy_match(g, Permutation.from_order(order), pi).size)
        if best == 0:
            break
    return best


def brute_max_matching_size(adj, n_right):
    """Maximum matching size by bitmask DP over right-side subsets."""
    rows = [sum(1 << v for v in nb) for nb in adj]

    memo = {}

    def go(i, used):
        if i == len(rows):
            return 0
        key = (i, used)
        if key in memo:
            return memo[key]
        best = go(i + 1, used)
        free = rows[i] & ~used
        while free:
            bit = free & -free
            free ^= bit
            best = max(best, 1 + go(i + 1, used | bit))
        memo[key] = best
        return best

    return go(0, 0)


def random_pm_graph(rng, n, extra=None):
    """Graph containing the identity perfect matching plus random edges."""
    edges = {(i, i) for i in range(n)}
    pool = [(u, v) for u in range(n) for v in range(n) if u != v]
    if extra is None:
        extra = rng.randrange(0, max(1, n * (n - 1) // 2))
    for u, v in rng.sample(pool, min(extra, len(pool))):
        edges.add((u, v))
    return BipartiteGraph.from_edges(n, sorted(edges))


def random_perm(rng, n):
    order = list(range(n))
    rng.shuffle(order)
    return Permutation.from_order(order)


# Acceptance reporting: each criterion test records one line here and the
# terminal summary prints them, so the run log carries an explicit
# PASS/FAIL verdict per criterion even when pytest captures stdout.
ACCEPTANCE_LINES = []


def record_acceptance(num, label, ok, detail=""):
    ACCEPTANCE_LINES.append((num, label, bool(ok), detail))


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for num, label, ok, detail in sorted(ACCEPTANCE_LINES):
        line = "criterion %02d  %-34s %s" % (num, label, "PASS" if ok else "FAIL")
        if detail:
            line += "   [%s]" % detail
        terminalreporter.write_line(line)
