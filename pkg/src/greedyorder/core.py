"""Core bipartite-matching primitives.

Vertices on each side are indexed 0..n-1.  A greedy run processes the
left side U in an arrival order sigma; each arriving u takes its
lowest-priority unmatched neighbor, where priority rank 0 under pi means
"taken first".  Everything here is deterministic and side-effect free.
"""

from __future__ import annotations

import collections
from dataclasses import dataclass, field
from typing import Callable, Iterable, Optional, Sequence

from .errors import (
    DimensionMismatchError,
    InvalidGraphError,
    NoPerfectMatchingError,
    PropositionViolatedError,
)

__all__ = [
    "BipartiteGraph",
    "Permutation",
    "PerfectMatching",
    "GreedyOutcome",
    "PrefixStats",
    "greedy_match",
    "max_matching",
    "find_perfect_matching",
    "align_with_matching",
    "check_prefix_bound",
    "verify_maximal",
    "verify_stability",
    "adaptive_items_player",
    "minimal_tight_item_set",
]


@dataclass(frozen=True)
class BipartiteGraph:
    """Bipartite graph with n vertices per side and sorted adjacency lists."""

    n: int
    adj_u: tuple[tuple[int, ...], ...]
    adj_v: tuple[tuple[int, ...], ...]
    family: Optional[str] = None
    params: Optional[dict] = None

    @classmethod
    def from_edges(
        cls,
        n: int,
        edges: Iterable[tuple[int, int]],
        family: Optional[str] = None,
        params: Optional[dict] = None,
    ) -> "BipartiteGraph":
        if n < 1:
            raise InvalidGraphError("n must be at least 1, got %r" % (n,))
        adj_u: list[list[int]] = [[] for _ in range(n)]
        adj_v: list[list[int]] = [[] for _ in range(n)]
        seen: set[tuple[int, int]] = set()
        for e in edges:
            u, v = e
            if not (0 <= u < n and 0 <= v < n):
                raise InvalidGraphError("edge (%r, %r) out of range for n=%d" % (u, v, n))
            if (u, v) in seen:
                raise InvalidGraphError("duplicate edge (%d, %d)" % (u, v))
            seen.add((u, v))
            adj_u[u].append(v)
            adj_v[v].append(u)
        return cls(
            n=n,
            adj_u=tuple(tuple(sorted(a)) for a in adj_u),
            adj_v=tuple(tuple(sorted(a)) for a in adj_v),
            family=family,
            params=params,
        )

    @property
    def edges(self) -> list[tuple[int, int]]:
        """All edges, sorted lexicographically."""
        return [(u, v) for u in range(self.n) for v in self.adj_u[u]]

    @property
    def num_edges(self) -> int:
        return sum(len(a) for a in self.adj_u)

    def degrees_u(self) -> list[int]:
        return [len(a) for a in self.adj_u]

    def degrees_v(self) -> list[int]:
        return [len(a) for a in self.adj_v]


@dataclass(frozen=True)
class Permutation:
    """A total order over 0..n-1.

    ``order[r]`` is the vertex at rank r; ``rank[v]`` is the rank of
    vertex v.  Rank 0 is first (highest priority for greedy).
    """

    order: tuple[int, ...]
    rank: tuple[int, ...]

    @classmethod
    def from_order(cls, order: Sequence[int]) -> "Permutation":
        n = len(order)
        rank = [-1] * n
        for r, v in enumerate(order):
            if not (0 <= v < n) or rank[v] != -1:
                raise InvalidGraphError("not a permutation of 0..%d: %r" % (n - 1, list(order)))
            rank[v] = r
        return cls(order=tuple(order), rank=tuple(rank))

    @classmethod
    def identity(cls, n: int) -> "Permutation":
        r = tuple(range(n))
        return cls(order=r, rank=r)

    def __len__(self) -> int:
        return len(self.order)


@dataclass(frozen=True)
class PerfectMatching:
    """A perfect matching given as the partner array of the U side."""

    v_of_u: tuple[int, ...]

    @property
    def u_of_v(self) -> tuple[int, ...]:
        inv = [-1] * len(self.v_of_u)
        for u, v in enumerate(self.v_of_u):
            inv[v] = u
        return tuple(inv)

    @property
    def pairs(self) -> list[tuple[int, int]]:
        return list(enumerate(self.v_of_u))

    def is_identity(self) -> bool:
        return all(v == u for u, v in enumerate(self.v_of_u))


@dataclass(frozen=True)
class GreedyOutcome:
    """Result of one greedy run: partner arrays (None for unmatched) and size."""

    matched_v_of_u: tuple[Optional[int], ...]
    matched_u_of_v: tuple[Optional[int], ...]
    size: int

    def unmatched_v(self) -> list[int]:
        return [v for v, u in enumerate(self.matched_u_of_v) if u is None]

    def unmatched_u(self) -> list[int]:
        return [u for u, v in enumerate(self.matched_v_of_u) if v is None]


def _check_dims(g: BipartiteGraph, perm: Permutation, name: str) -> None:
    if len(perm) != g.n:
        raise DimensionMismatchError(
            "%s has %d entries but graph has n=%d" % (name, len(perm), g.n)
        )


def greedy_match(g: BipartiteGraph, sigma: Permutation, pi: Permutation) -> GreedyOutcome:
    """Run greedy matching: U arrives in sigma order, each u takes the
    unmatched neighbor with the lowest pi rank, or stays unmatched."""
    _check_dims(g, sigma, "sigma")
    _check_dims(g, pi, "pi")
    rank = pi.rank
    mu: list[Optional[int]] = [None] * g.n
    mv: list[Optional[int]] = [None] * g.n
    size = 0
    for u in sigma.order:
        best = -1
        best_r = g.n
        for v in g.adj_u[u]:
            if mv[v] is None and rank[v] < best_r:
                best_r = rank[v]
                best = v
        if best >= 0:
            mu[u] = best
            mv[best] = u
            size += 1
    return GreedyOutcome(matched_v_of_u=tuple(mu), matched_u_of_v=tuple(mv), size=size)


def max_matching(adj: Sequence[Iterable[int]], n_right: int) -> list[tuple[int, int]]:
    """Maximum bipartite matching via Hopcroft-Karp.

    ``adj[i]`` lists the right-side indices reachable from left vertex i.
    Returns the matched pairs sorted by left index.  Deterministic: ties
    are resolved by index order.
    """
    n_left = len(adj)
    adj_l = [tuple(a) for a in adj]
    match_l = [-1] * n_left
    match_r = [-1] * n_right
    INF = n_left + n_right + 1

    def bfs() -> bool:
        dist = [INF] * n_left
        q = collections.deque()
        for i in range(n_left):
            if match_l[i] == -1:
                dist[i] = 0
                q.append(i)
        found = False
        while q:
            i = q.popleft()
            for j in adj_l[i]:
                k = match_r[j]
                if k == -1:
                    found = True
                elif dist[k] == INF:
                    dist[k] = dist[i] + 1
                    q.append(k)
        bfs.dist = dist  # type: ignore[attr-defined]
        return found

    def dfs(i: int) -> bool:
        dist = bfs.dist  # type: ignore[attr-defined]
        for j in adj_l[i]:
            k = match_r[j]
            if k == -1 or (dist[k] == dist[i] + 1 and dfs(k)):
                match_l[i] = j
                match_r[j] = i
                return True
        dist[i] = INF
        return False

    while bfs():
        for i in range(n_left):
            if match_l[i] == -1:
                dfs(i)
    return [(i, match_l[i]) for i in range(n_left) if match_l[i] != -1]


def find_perfect_matching(g: BipartiteGraph) -> PerfectMatching:
    """Return a perfect matching of g or raise NoPerfectMatchingError."""
    pairs = max_matching(g.adj_u, g.n)
    if len(pairs) < g.n:
        matched_u = {u for u, _ in pairs}
        missing = sorted(set(range(g.n)) - matched_u)
        raise NoPerfectMatchingError(
            "maximum matching has size %d < n=%d (unmatched U: %s)"
            % (len(pairs), g.n, missing)
        )
    v_of_u = [-1] * g.n
    for u, v in pairs:
        v_of_u[u] = v
    return PerfectMatching(v_of_u=tuple(v_of_u))


def align_with_matching(
    g: BipartiteGraph, m: PerfectMatching
) -> tuple[BipartiteGraph, tuple[int, ...]]:
    """Relabel the V side so that m becomes the identity matching.

    Returns the relabeled graph and ``v_map`` with ``v_map[new] == old``,
    kept so results can be reported in the original labeling.
    """
    if len(m.v_of_u) != g.n:
        raise DimensionMismatchError("matching size %d != n=%d" % (len(m.v_of_u), g.n))
    old_of_new = m.v_of_u
    new_of_old = [-1] * g.n
    for new, old in enumerate(old_of_new):
        new_of_old[old] = new
    for u, v in enumerate(old_of_new):
        if v not in g.adj_u[u]:
            raise InvalidGraphError("matching pair (%d, %d) is not an edge" % (u, v))
    edges = [(u, new_of_old[v]) for u in range(g.n) for v in g.adj_u[u]]
    g2 = BipartiteGraph.from_edges(g.n, edges)
    return g2, tuple(old_of_new)


@dataclass(frozen=True)
class PrefixStats:
    """Counts produced by check_prefix_bound."""

    k: int
    matched_in_prefix: int
    matched_outside_partners: int
    bound: float


def check_prefix_bound(
    g: BipartiteGraph,
    m: PerfectMatching,
    pi: Permutation,
    sigma: Permutation,
    k: int,
) -> PrefixStats:
    """Verify the prefix counting bound for the first k vertices under pi.

    Let ell be how many of those k vertices end up matched to U vertices
    outside their own partner set.  Then at least ell + (k - ell) / 2 of
    the k prefix vertices are matched.  Raises PropositionViolatedError
    if the bound fails (it never should; that would be a bug).
    """
    if not (0 <= k <= g.n):
        raise DimensionMismatchError("k=%d out of range for n=%d" % (k, g.n))
    out = greedy_match(g, sigma, pi)
    prefix = pi.order[:k]
    partner_us = {m.u_of_v[v] for v in prefix}
    matched = 0
    ell = 0
    for v in prefix:
        u = out.matched_u_of_v[v]
        if u is not None:
            matched += 1
            if u not in partner_us:
                ell += 1
    bound = ell + (k - ell) / 2.0
    if matched < bound:
        raise PropositionViolatedError(
            "prefix bound failed: matched=%d < %.1f (k=%d, ell=%d)" % (matched, bound, k, ell)
        )
    return PrefixStats(k=k, matched_in_prefix=matched, matched_outside_partners=ell, bound=bound)


def verify_maximal(g: BipartiteGraph, outcome: GreedyOutcome) -> bool:
    """Independent scan: no edge may have both endpoints unmatched."""
    for u in range(g.n):
        if outcome.matched_v_of_u[u] is None:
            for v in g.adj_u[u]:
                if outcome.matched_u_of_v[v] is None:
                    return False
    return True


def verify_stability(
    g: BipartiteGraph, sigma: Permutation, pi: Permutation, outcome: GreedyOutcome
) -> bool:
    """Independent blocking-pair scan.

    U vertices prefer neighbors of lower pi rank, V vertices prefer
    neighbors of lower sigma rank.  Returns False if some edge (u, v)
    not in the outcome has both endpoints preferring each other.
    """
    ru, rv = sigma.rank, pi.rank
    for u in range(g.n):
        mu = outcome.matched_v_of_u[u]
        for v in g.adj_u[u]:
            if mu == v:
                continue
            u_wants = mu is None or rv[v] < rv[mu]
            if not u_wants:
                continue
            mv = outcome.matched_u_of_v[v]
            v_wants = mv is None or ru[u] < ru[mv]
            if v_wants:
                return False
    return True


# --- adaptive items player ----------------------------------------------


def minimal_tight_item_set(
    adj_v: Sequence[Sequence[int]],
    remaining_items: set[int],
    remaining_buyers: set[int],
) -> list[int]:
    """Find a minimal tight set among the remaining items.

    Tight means the number of remaining buyers interested in the set
    equals the set size.  The full remaining set is always tight when a
    perfect matching on the remaining market exists, so a minimal one
    exists.  Deterministic: among all single-item closures the smallest
    by (size, sorted contents) wins.
    """
    items = sorted(remaining_items)
    rel = [
        [u for u in adj_v[v] if u in remaining_buyers] if v in remaining_items else []
        for v in range(len(adj_v))
    ]
    # perfect matching of remaining items to remaining buyers
    pairs = max_matching([rel[v] for v in items], max(remaining_buyers) + 1 if remaining_buyers else 0)
    if len(pairs) != len(items):
        raise PropositionViolatedError("remaining market lost its perfect matching")
    item_of_buyer = {}
    for i, u in pairs:
        item_of_buyer[u] = items[i]
    best: Optional[list[int]] = None
    for v0 in items:
        seen = {v0}
        stack = [v0]
        while stack:
            v = stack.pop()
            for u in rel[v]:
                w = item_of_buyer[u]
                if w not in seen:
                    seen.add(w)
                    stack.append(w)
        cand = sorted(seen)
        if best is None or (len(cand), cand) < (len(best), best):
            best = cand
    assert best is not None
    return best


def adaptive_items_player(
    g: BipartiteGraph,
    buyer_strategy: Callable[[int, list[int]], int],
) -> GreedyOutcome:
    """Offer items one at a time so that every buyer strategy ends in a
    perfect matching.

    Each round finds a minimal tight set of remaining items, offers its
    smallest item, and lets ``buyer_strategy(item, interested)`` pick the
    buyer who takes it.  Requires g to admit a perfect matching.
    """
    find_perfect_matching(g)  # raises if absent
    remaining_items = set(range(g.n))
    remaining_buyers = set(range(g.n))
    mu: list[Optional[int]] = [None] * g.n
    mv: list[Optional[int]] = [None] * g.n
    while remaining_items:
        tight = minimal_tight_item_set(g.adj_v, remaining_items, remaining_buyers)
        item = tight[0]
        interested = [u for u in g.adj_v[item] if u in remaining_buyers]
        if not interested:
            raise PropositionViolatedError("offered item %d has no interested buyer" % item)
        buyer = buyer_strategy(item, interested)
        if buyer not in interested:
            raise InvalidGraphError(
                "buyer_strategy returned %r, not one of %r" % (buyer, interested)
            )
        mu[buyer] = item
        mv[item] = buyer
        remaining_items.discard(item)
        remaining_buyers.discard(buyer)
    size = sum(1 for x in mu if x is not None)
    return GreedyOutcome(matched_v_of_u=tuple(mu), matched_u_of_v=tuple(mv), size=size)
