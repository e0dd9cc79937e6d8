"""Adversarial arrival orders: exact minimization, local search, and
per-family constructive adversaries.

The exact solver treats the arrival process as a one-player minimization
game.  Greedy's response to any future arrival depends only on which
V-vertices are already matched, and the set of remaining arrivals
depends only on which U-vertices were processed, so the pair of masks
(processed U, matched V) is a sufficient memoization key; the order in
which the processed prefix arrived cannot influence anything later.
"""

from __future__ import annotations

import collections
import random
from dataclasses import dataclass
from typing import Optional, Sequence

from .core import (
    BipartiteGraph,
    GreedyOutcome,
    Permutation,
    greedy_match,
    max_matching,
)
from .errors import FamilyShapeError, HallInfeasibleError, PropositionViolatedError

__all__ = [
    "AdversaryResult",
    "worst_order_exact",
    "worst_order_masked_min",
    "worst_order_heuristic",
    "adversary_regular_gadget",
    "adversary_projective",
    "adversary_biclique",
    "adversary_planted_is",
]

DEFAULT_BUDGET = 10_000_000


@dataclass(frozen=True)
class AdversaryResult:
    """An arrival order with its greedy matched count.

    When exact is true no arrival order achieves a smaller size; when
    false the size is only an upper bound on the true minimum.
    """

    sigma: Permutation
    size: int
    exact: bool
    nodes_expanded: int


class _BudgetExceeded(Exception):
    pass


class _MinGame:
    """Memoized DFS minimizing the number of greedy matches.

    Works in rank space: V-vertex r is the vertex of pi-rank r, so the
    greedy choice is always the lowest set bit of the free-neighbor
    mask.  Two shortcuts keep the state space small and do not affect
    the value: an arrival with no free neighbor changes nothing and can
    be processed immediately (matched V only grows, so it stays dead),
    and among arrivals with identical free-neighbor masks only one needs
    to be branched on.
    """

    def __init__(self, adj_rank: Sequence[int], n: int, count_mask: int, budget: int):
        self.adj = list(adj_rank)
        self.n = n
        self.count_mask = count_mask
        self.budget = budget
        self.nodes = 0
        self.memo: dict[tuple[int, int], int] = {}
        self.full = (1 << n) - 1

    def value(self, u_mask: int, v_mask: int) -> int:
        key = (u_mask, v_mask)
        cached = self.memo.get(key)
        if cached is not None:
            return cached
        self.nodes += 1
        if self.nodes > self.budget:
            raise _BudgetExceeded
        adj = self.adj
        free_inv = ~v_mask
        dead = 0
        branches: list[tuple[int, int]] = []
        seen_masks: set[int] = set()
        alive = self.full & ~u_mask
        while alive:
            u_bit = alive & -alive
            alive &= alive - 1
            m = adj[u_bit.bit_length() - 1] & free_inv
            if m == 0:
                dead |= u_bit
            elif m not in seen_masks:
                seen_masks.add(m)
                branches.append((u_bit, m))
        if not branches:
            self.memo[key] = 0
            return 0
        base_u = u_mask | dead
        best = self.n + 1
        for u_bit, m in branches:
            v_bit = m & -m
            gain = 1 if (v_bit & self.count_mask) else 0
            sub = gain + self.value(base_u | u_bit, v_mask | v_bit)
            if sub < best:
                best = sub
        self.memo[key] = best
        return best

    def replay(self) -> list[int]:
        """Rebuild one minimizing arrival order from the memo table."""
        order: list[int] = []
        u_mask, v_mask = 0, 0
        while u_mask != self.full:
            state_val = self.memo[(u_mask, v_mask)]
            adj = self.adj
            free_inv = ~v_mask
            dead: list[int] = []
            branches: list[tuple[int, int]] = []
            seen_masks: set[int] = set()
            alive = self.full & ~u_mask
            while alive:
                u_bit = alive & -alive
                alive &= alive - 1
                u = u_bit.bit_length() - 1
                m = adj[u] & free_inv
                if m == 0:
                    dead.append(u)
                elif m not in seen_masks:
                    seen_masks.add(m)
                    branches.append((u_bit, m))
            order.extend(dead)
            for u in dead:
                u_mask |= 1 << u
            if not branches:
                break
            for u_bit, m in branches:
                v_bit = m & -m
                gain = 1 if (v_bit & self.count_mask) else 0
                if gain + self.memo.get((u_mask | u_bit, v_mask | v_bit), -1) == state_val:
                    order.append(u_bit.bit_length() - 1)
                    u_mask |= u_bit
                    v_mask |= v_bit
                    break
            else:
                raise PropositionViolatedError("replay found no branch matching the memoized value")
        return order


def _mask_of(xs: Sequence[int]) -> int:
    m = 0
    for x in xs:
        m |= 1 << x
    return m


def _adj_rank_masks(g: BipartiteGraph, pi: Permutation) -> list[int]:
    rank = pi.rank
    return [_mask_of([rank[v] for v in g.adj_u[u]]) for u in range(g.n)]


def worst_order_exact(
    g: BipartiteGraph, pi: Permutation, budget: int = DEFAULT_BUDGET
) -> AdversaryResult:
    """Minimize the greedy matched count over all arrival orders.

    Memoized DFS over (processed U, matched V) states.  If the node
    budget runs out the local-search heuristic supplies the answer and
    exact is false.
    """
    game = _MinGame(_adj_rank_masks(g, pi), g.n, (1 << g.n) - 1, budget)
    try:
        size = game.value(0, 0)
    except _BudgetExceeded:
        fallback = worst_order_heuristic(g, pi, iters=4000, seed=0)
        return AdversaryResult(
            sigma=fallback.sigma, size=fallback.size, exact=False,
            nodes_expanded=budget + fallback.nodes_expanded,
        )
    sigma = Permutation.from_order(game.replay())
    check = greedy_match(g, sigma, pi).size
    if check != size:
        raise PropositionViolatedError(
            "replayed order gives %d matches, search said %d" % (check, size)
        )
    return AdversaryResult(sigma=sigma, size=size, exact=True, nodes_expanded=game.nodes)


def worst_order_masked_min(
    g: BipartiteGraph,
    pi: Permutation,
    v_subset: Sequence[int],
    budget: int = DEFAULT_BUDGET,
) -> tuple[int, bool, int]:
    """Minimum over all arrival orders of how many vertices of v_subset
    get matched.  Returns (value, exact, nodes_expanded)."""
    rank = pi.rank
    count_mask = _mask_of([rank[v] for v in v_subset])
    game = _MinGame(_adj_rank_masks(g, pi), g.n, count_mask, budget)
    try:
        val = game.value(0, 0)
        return val, True, game.nodes
    except _BudgetExceeded:
        sub = set(v_subset)
        fallback = worst_order_heuristic(g, pi, iters=4000, seed=0)
        out = greedy_match(g, fallback.sigma, pi)
        val = sum(1 for v in sub if out.matched_u_of_v[v] is not None)
        return val, False, budget


def worst_order_heuristic(
    g: BipartiteGraph, pi: Permutation, iters: int = 10_000, seed: int = 0
) -> AdversaryResult:
    """Random-restart local search over arrival orders.

    Moves are adjacent transpositions and single-block relocations; a
    move is kept when it does not increase the matched count.  The
    result is an upper bound on the true minimum and is deterministic
    for a fixed seed.
    """
    rng = random.Random(seed)
    n = g.n

    def evaluate(order: list[int]) -> int:
        return greedy_match(g, Permutation.from_order(order), pi).size

    cur = list(range(n))
    rng.shuffle(cur)
    cur_val = evaluate(cur)
    best, best_val = cur[:], cur_val
    stale = 0
    restart_after = max(100, 2 * n)
    for _ in range(iters):
        if n >= 2:
            if rng.random() < 0.5:
                i = rng.randrange(n - 1)
                cand = cur[:]
                cand[i], cand[i + 1] = cand[i + 1], cand[i]
            else:
                a = rng.randrange(n)
                b = rng.randrange(a + 1, n + 1)
                block = cur[a:b]
                rest = cur[:a] + cur[b:]
                c = rng.randrange(len(rest) + 1)
                cand = rest[:c] + block + rest[c:]
        else:
            cand = cur[:]
        val = evaluate(cand)
        if val <= cur_val:
            if val < cur_val:
                stale = 0
            cur, cur_val = cand, val
            if val < best_val:
                best, best_val = cand[:], val
        else:
            stale += 1
        if stale >= restart_after:
            cur = list(range(n))
            rng.shuffle(cur)
            cur_val = evaluate(cur)
            if cur_val < best_val:
                best, best_val = cur[:], cur_val
            stale = 0
    return AdversaryResult(
        sigma=Permutation.from_order(best), size=best_val, exact=False, nodes_expanded=iters
    )


def _order_by_planned_partner(
    pairs: Sequence[tuple[int, int]], rank: Sequence[int]
) -> list[int]:
    """U vertices of (u, planned v) pairs, sorted by the partner's rank.

    Processing arrivals in ascending planned-partner rank keeps every
    greedy choice at a rank no higher than the planned partner's: the
    planned partner is still free on arrival (everything matched so far
    sits at strictly lower ranks), so greedy takes it or something even
    earlier.  With all planned partners inside a rank-prefix, that
    prefix absorbs every match.
    """
    return [u for u, v in sorted(pairs, key=lambda uv: rank[uv[1]])]


def adversary_regular_gadget(pi: Permutation, d: int, t: int) -> Permutation:
    """Arrival order spoiling the three-block 2d-regular construction.

    Within each copy: take the d lowest-priority vertices of the copy
    under pi as the target set, pick the V-block holding the most of
    them, match the other two U-blocks onto the 2d high-priority
    vertices one by one, then release the picked block's U-side.  At
    least ceil(d/3) V-vertices per copy stay unmatched.
    """
    if d < 1 or t < 1:
        raise FamilyShapeError("d and t must be positive")
    n = 3 * d * t
    if len(pi) != n:
        raise FamilyShapeError("pi has %d entries, expected %d" % (len(pi), n))
    rank = pi.rank
    order: list[int] = []
    for c in range(t):
        base = 3 * d * c
        copy_v = sorted(range(base, base + 3 * d), key=lambda v: rank[v])
        high, target = copy_v[: 2 * d], copy_v[2 * d :]
        hits = [sum(1 for v in target if (v - base) // d == b) for b in range(3)]
        b_star = hits.index(max(hits))
        other_u = [u for u in range(base, base + 3 * d) if (u - base) // d != b_star]
        adj = [
            [j for j, v in enumerate(high) if (v - base) // d != (u - base) // d]
            for u in other_u
        ]
        pairs = max_matching(adj, len(high))
        if len(pairs) != len(other_u):
            raise PropositionViolatedError("block matching onto the high set must be perfect")
        planned = [(other_u[i], high[j]) for i, j in pairs]
        order.extend(_order_by_planned_partner(planned, rank))
        order.extend(range(base + b_star * d, base + (b_star + 1) * d))
    return Permutation.from_order(order)


def adversary_projective(
    g: BipartiteGraph, pi: Permutation, target_size: int
) -> Permutation:
    """Arrival order leaving the last target_size vertices of pi unmatched
    in a projective-plane incidence graph.

    The neighbors of that target set (padded with the smallest outside
    U-vertices if a few short) are matched perfectly onto the remaining
    V-vertices and arrive by ascending partner priority; the leftover
    U-vertices have no edge into the target set, so it survives.
    """
    n = g.n
    if not (1 <= target_size <= n):
        raise FamilyShapeError("target_size %d out of range" % target_size)
    rank = pi.rank
    v_last = set(pi.order[n - target_size :])
    keep = [v for v in pi.order if v not in v_last]
    nbrs = sorted({u for v in v_last for u in g.adj_v[v]})
    if len(nbrs) > len(keep):
        raise HallInfeasibleError(
            "target set has %d neighbors but only %d vertices remain" % (len(nbrs), len(keep))
        )
    keep_pos = {v: i for i, v in enumerate(keep)}
    adj = [[keep_pos[v] for v in g.adj_u[u] if v in keep_pos] for u in nbrs]
    # Saturate the target set's neighborhood first; padding vertices only
    # join through augmentation, which never unseats a matched neighbor.
    pairs = max_matching(adj, len(keep))
    if len(pairs) != len(nbrs):
        raise HallInfeasibleError("cannot saturate the target set's neighborhood")
    match_u = {nbrs[i]: j for i, j in pairs}
    match_v = {j: u for u, j in match_u.items()}
    for j in range(len(keep)):
        if j in match_v:
            continue
        parent_u: dict[int, int] = {}
        stack = [j]
        free_u = None
        while stack and free_u is None:
            jj = stack.pop()
            for u in g.adj_v[keep[jj]]:
                if u in parent_u:
                    continue
                parent_u[u] = jj
                if u not in match_u:
                    free_u = u
                    break
                stack.append(match_u[u])
        if free_u is None:
            raise HallInfeasibleError("remaining vertices cannot all be matched")
        u = free_u
        while True:
            jj = parent_u[u]
            prev = match_v.get(jj)
            match_v[jj] = u
            match_u[u] = jj
            if jj == j:
                break
            u = prev
    planned = [(u, keep[j]) for u, j in match_u.items()]
    order = _order_by_planned_partner(planned, rank)
    used = set(order)
    order.extend(u for u in range(n) if u not in used)
    return Permutation.from_order(order)


def adversary_biclique(pi: Permutation, n: int) -> Permutation:
    """Arrival order for the half-biclique family.

    Scanning pi from the front, each first-half V-vertex is paired with
    the earliest still-unused second-half V-vertex seen so far.  The
    paired first-half U-partners arrive first, ordered by their assigned
    vertex's priority, so each consumes exactly its assigned second-half
    vertex; unpaired first-half U-vertices then take their own partners,
    and the second half of U closes the order.  No arrival order leaves
    fewer matched: every second-half vertex consumed by the first-half
    U-side needs an assignment of this precedence-constrained kind, and
    the first-in-first-out scan maximizes the number of assignments.
    """
    if n % 2 != 0:
        raise FamilyShapeError("n must be even")
    if len(pi) != n:
        raise FamilyShapeError("pi has %d entries, expected %d" % (len(pi), n))
    h = n // 2
    queue: collections.deque[int] = collections.deque()
    paired: list[tuple[int, int]] = []
    for v in pi.order:
        if v >= h:
            queue.append(v)
        elif queue:
            paired.append((v, queue.popleft()))
    rank = pi.rank
    order = _order_by_planned_partner(paired, rank)
    paired_u = set(order)
    order.extend(u for u in range(h) if u not in paired_u)
    order.extend(range(h, n))
    return Permutation.from_order(order)


def adversary_planted_is(
    g: BipartiteGraph, pi: Permutation, planted_size: Optional[int] = None
) -> Permutation:
    """Arrival order exploiting a planted balanced independent set.

    The first planted_size indices on each side are assumed to span no
    edges (the generator's convention; the size is read from the graph's
    params when not given).  All U-vertices outside the planted set are
    matched onto the highest-priority vertices they can reach and arrive
    by ascending partner priority; the planted U-set arrives last.  A
    few prefix vertices may be reachable only from the planted U-side,
    in which case the match is padded with the cheapest non-planted
    vertices above the prefix.  Planted V-vertices beyond the consumed
    range lose all their neighbors, so they stay unmatched.
    """
    n = g.n
    if planted_size is None:
        if not g.params or "planted_size" not in g.params:
            raise FamilyShapeError("planted_size not given and absent from graph params")
        planted_size = int(g.params["planted_size"])
    if not (0 <= planted_size <= n // 2):
        raise FamilyShapeError("planted_size %d out of range" % planted_size)
    rank = pi.rank
    outside = list(range(planted_size, n))
    reach = {v for u in outside for v in g.adj_u[u]}
    q_cut = n - planted_size
    # Prefix vertices only the planted U-side can reach are left for it;
    # the shortfall is padded with the lowest-priority non-planted
    # vertices above the prefix, so no planned arrival ever sees a free
    # neighbor below its own partner.
    targets = sorted(v for v in reach if rank[v] < q_cut)
    extra = sorted(
        (v for v in reach if rank[v] >= q_cut and v >= planted_size),
        key=lambda v: rank[v],
    )
    next_extra = 0
    while True:
        pos = {v: i for i, v in enumerate(targets)}
        adj = [[pos[v] for v in g.adj_u[u] if v in pos] for u in outside]
        pairs = max_matching(adj, len(targets))
        if len(pairs) == len(outside):
            break
        if next_extra == len(extra):
            raise HallInfeasibleError(
                "non-planted U-side cannot be matched away from the planted targets"
            )
        targets.append(extra[next_extra])
        next_extra += 1
    planned = [(outside[i], targets[j]) for i, j in pairs]
    order = _order_by_planned_partner(planned, rank)
    order.extend(range(planted_size))
    return Permutation.from_order(order)


def run_constructed(
    g: BipartiteGraph, sigma: Permutation, pi: Permutation
) -> GreedyOutcome:
    """Convenience: replay a constructed arrival order through greedy."""
    return greedy_match(g, sigma, pi)
