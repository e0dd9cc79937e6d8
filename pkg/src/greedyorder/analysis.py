"""Safety search, counting-bound evaluation, and process simulations.

Covers: deciding whether a priority order can be forced to leave a given
vertex set unmatched, enumerating all such vulnerable sets, evaluating
the entropy exponents that bound their number and probability, Monte
Carlo sweeps over random priority orders, the iterative promote-the-
losers process, and an exhaustive cross-check of the two game readings
of the problem.
"""

from __future__ import annotations

import itertools
import math
import random
import statistics
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Optional, Union

from .adversary import (
    DEFAULT_BUDGET,
    adversary_biclique,
    adversary_planted_is,
    adversary_projective,
    adversary_regular_gadget,
    worst_order_exact,
    worst_order_heuristic,
)
from .core import BipartiteGraph, Permutation, greedy_match
from .errors import (
    AnalysisParamError,
    DimensionMismatchError,
    FamilyShapeError,
    PropositionViolatedError,
    UsageError,
)

Rational = Union[int, str, Fraction]


def entropy(p: float) -> float:
    """Binary entropy in bits, with the endpoint convention H(0)=H(1)=0.

    The second term uses log1p for stability near p = 0.
    """
    x = float(p)
    if not 0.0 <= x <= 1.0:
        raise AnalysisParamError("entropy argument %r outside [0, 1]" % (p,))
    if x == 0.0 or x == 1.0:
        return 0.0
    return -x * math.log2(x) - (1.0 - x) * (math.log1p(-x) / math.log(2.0))


def _as_fraction(name: str, value: Rational) -> Fraction:
    if isinstance(value, float):
        raise AnalysisParamError(
            "%s must be exact (int, str, or Fraction), got float %r" % (name, value)
        )
    try:
        return Fraction(value)
    except (ValueError, TypeError, ZeroDivisionError) as exc:
        raise AnalysisParamError("%s is not a rational: %r" % (name, value)) from exc


@dataclass(frozen=True)
class AnalysisParams:
    """Exact rational inputs for the counting bounds.

    eps widens the target fraction beyond one half; alpha and beta
    control the order and expansion estimates.  Derived quantities:
    rho = 1/2 + eps, rho_bar = 1 - rho, delta = beta - alpha.
    """

    eps: Fraction
    alpha: Fraction
    beta: Fraction

    def __post_init__(self) -> None:
        object.__setattr__(self, "eps", _as_fraction("eps", self.eps))
        object.__setattr__(self, "alpha", _as_fraction("alpha", self.alpha))
        object.__setattr__(self, "beta", _as_fraction("beta", self.beta))
        if self.eps < 0:
            raise AnalysisParamError("eps must be nonnegative")
        if not (0 < self.alpha < self.beta < 1):
            raise AnalysisParamError("need 0 < alpha < beta < 1")

    @property
    def rho(self) -> Fraction:
        return Fraction(1, 2) + self.eps

    @property
    def rho_bar(self) -> Fraction:
        return 1 - self.rho

    @property
    def delta(self) -> Fraction:
        return self.beta - self.alpha

    def flags(self) -> tuple[str, ...]:
        """Boundary conditions worth surfacing but not fatal."""
        out = []
        if self.delta >= self.alpha / 2:
            out.append("delta_not_below_half_alpha")
        if self.eps >= Fraction(1, 10):
            out.append("eps_premise_exceeded")
        return tuple(out)


@dataclass(frozen=True)
class ExponentReport:
    """Evaluated exponents (base-2, per vertex) and their combinations."""

    params: AnalysisParams
    badset_exp: float
    order_exp: float
    expansion_exp_literal: float
    expansion_exp_rescaled: float
    combined_order: float
    combined_expansion: float
    flags: tuple[str, ...]


def bound_exponents(params: AnalysisParams) -> ExponentReport:
    """Evaluate the three counting bounds at the given parameters.

    badset_exp bounds the count of vulnerable sets; order_exp bounds the
    probability that a random priority order exposes one of them through
    late arrival of its low vertices; the expansion exponent bounds the
    probability of a shallow neighborhood, under two readings (the
    printed closed form as-is, and with every fraction rescaled by the
    set-size factor).  combined_order = badset_exp + order_exp < 0 is
    the operative success condition; combined_expansion pairs badset_exp
    with the smaller expansion reading.
    """
    rho, rho_bar = params.rho, params.rho_bar
    eps, alpha, beta, delta = params.eps, params.alpha, params.beta, params.delta
    if beta * rho_bar <= alpha * rho:
        raise AnalysisParamError("need beta/alpha > rho/rho_bar for the order bound")
    if rho_bar <= alpha:
        raise AnalysisParamError("alpha must stay below rho_bar")
    arguments = {
        "2*eps/rho_bar": 2 * eps / rho_bar,
        "2*eps/rho": 2 * eps / rho,
        "alpha+beta": alpha + beta,
        "alpha/rho_bar": alpha / rho_bar,
        "beta/rho": beta / rho,
        "delta/alpha": delta / alpha,
        "delta/(1-alpha)": delta / (1 - alpha),
        "delta/(rho_bar-alpha)": delta / (rho_bar - alpha),
    }
    for name, value in arguments.items():
        if not (0 <= value <= 1):
            raise AnalysisParamError("entropy argument %s = %s outside [0, 1]" % (name, value))

    badset = float(rho_bar) * entropy(float(2 * eps / rho_bar)) + float(rho) * entropy(
        float(2 * eps / rho)
    )
    order = -(
        entropy(float(alpha + beta))
        - entropy(float(alpha / rho_bar)) * float(rho_bar)
        - entropy(float(beta / rho)) * float(rho)
    )
    literal = (
        -entropy(float(alpha / rho_bar))
        + float(alpha) * entropy(float(delta / alpha))
        + float(1 - alpha) * entropy(float(delta / (1 - alpha)))
    ) * float(rho_bar)
    a = alpha / rho_bar
    dd = delta / rho_bar
    rescaled = (
        -entropy(float(a))
        + float(a) * entropy(float(dd / a))
        + float(1 - a) * entropy(float(dd / (1 - a)))
    ) * float(rho_bar)
    return ExponentReport(
        params=params,
        badset_exp=badset,
        order_exp=order,
        expansion_exp_literal=literal,
        expansion_exp_rescaled=rescaled,
        combined_order=badset + order,
        combined_expansion=badset + min(literal, rescaled),
        flags=params.flags(),
    )


@dataclass(frozen=True)
class SafetyResult:
    """Outcome of a safety decision; witness is an arrival order when unsafe."""

    safe: bool
    witness: Optional[Permutation]


def is_safe(g: BipartiteGraph, pi: Permutation, s: Iterable[int]) -> SafetyResult:
    """Decide whether every arrival order matches at least one vertex of s.

    The empty set is safe by convention.  Two sufficient conditions
    short-circuit the search: a left vertex whose whole neighborhood
    lies inside s forces a match into s, and a set whose neighborhood is
    larger than the outside cannot park all neighbors elsewhere.
    Otherwise a depth-first search over arrival prefixes looks for an
    order that never touches s; arrivals with no free neighbor are
    absorbed eagerly and arrivals with identical remaining choices are
    branched once.
    """
    n = g.n
    if len(pi) != n:
        raise DimensionMismatchError("pi has %d entries, graph has %d" % (len(pi), n))
    s_list = sorted(set(s))
    if not s_list:
        return SafetyResult(True, None)
    if s_list[0] < 0 or s_list[-1] >= n:
        raise AnalysisParamError("subset contains vertices outside the graph")
    s_set = set(s_list)
    for u in range(n):
        nb = g.adj_u[u]
        if nb and all(v in s_set for v in nb):
            return SafetyResult(True, None)
    closed = {u for v in s_list for u in g.adj_v[v]}
    if len(closed) > n - len(s_list):
        return SafetyResult(True, None)

    rank = pi.rank
    by_rank = [sorted(g.adj_u[u], key=lambda v: rank[v]) for u in range(n)]
    adj_mask = [sum(1 << v for v in g.adj_u[u]) for u in range(n)]
    s_mask = sum(1 << v for v in s_list)
    full = (1 << n) - 1
    failed: set[tuple[int, int]] = set()
    seq: list[int] = []

    def dfs(u_mask: int, v_mask: int) -> bool:
        added = 0
        for u in range(n):
            if not (u_mask >> u & 1) and adj_mask[u] & ~v_mask == 0:
                u_mask |= 1 << u
                seq.append(u)
                added += 1
        if u_mask == full:
            return True
        key = (u_mask, v_mask)
        if key not in failed:
            seen: set[int] = set()
            for u in range(n):
                if u_mask >> u & 1:
                    continue
                rest = adj_mask[u] & ~v_mask
                if rest in seen:
                    continue
                seen.add(rest)
                v = next(w for w in by_rank[u] if not v_mask >> w & 1)
                if s_mask >> v & 1:
                    continue
                seq.append(u)
                if dfs(u_mask | (1 << u), v_mask | (1 << v)):
                    return True
                seq.pop()
            failed.add(key)
        if added:
            del seq[-added:]
        return False

    if not dfs(0, 0):
        return SafetyResult(True, None)
    witness = Permutation.from_order(seq)
    replay = greedy_match(g, witness, pi)
    if any(replay.matched_u_of_v[v] is not None for v in s_list):
        raise PropositionViolatedError("safety witness failed replay validation")
    return SafetyResult(False, witness)


@dataclass(frozen=True)
class BadSetReport:
    """Vulnerable sets of one size, with a witnessing order pair for each."""

    set_size: int
    search_mode: str
    bad_sets: tuple[tuple[int, ...], ...]
    witnesses: dict[tuple[int, ...], tuple[Permutation, Permutation]]


def enumerate_bad_sets(g: BipartiteGraph, size: int, mode: str = "full_pi") -> BadSetReport:
    """List every size-`size` right-side set some priority order exposes.

    full_pi mode tries all priority orders per set (n <= 8);
    canonical_pi tries only the heuristic order that places the set at
    the lowest priority, which is cheaper but one-sided: sets it reports
    are certainly vulnerable, sets it misses are not certified safe.
    """
    n = g.n
    if not (1 <= size <= n):
        raise AnalysisParamError("size %d out of range for n=%d" % (size, n))
    if mode == "full_pi":
        if n > 8:
            raise UsageError("full_pi mode enumerates all priority orders; n <= 8 required")
        candidates = [Permutation.from_order(p) for p in itertools.permutations(range(n))]
    elif mode != "canonical_pi":
        raise UsageError("unknown mode %r" % (mode,))
    bad: list[tuple[int, ...]] = []
    witnesses: dict[tuple[int, ...], tuple[Permutation, Permutation]] = {}
    for comb in itertools.combinations(range(n), size):
        if mode == "canonical_pi":
            rest = [v for v in range(n) if v not in comb]
            candidates = [Permutation.from_order(rest + list(comb))]
        for pi in candidates:
            result = is_safe(g, pi, comb)
            if not result.safe:
                bad.append(comb)
                assert result.witness is not None
                witnesses[comb] = (pi, result.witness)
                break
    return BadSetReport(size, mode, tuple(bad), witnesses)


@dataclass(frozen=True)
class MonteCarloSummary:
    """Distribution of adversary values over sampled priority orders.

    Sizes are matched-pair counts; fractions divide by n.  stddev is the
    population standard deviation.  upper_bound_only is set when any
    sample used a non-exact adversary, whose value only upper-bounds
    the true minimum.
    """

    trials: int
    mean_size: float
    min_size: int
    mean_fraction: float
    min_fraction: float
    stddev_fraction: float
    upper_bound_only: bool


def _constructive_sigma(g: BipartiteGraph, pi: Permutation) -> Permutation:
    family = g.family
    params = g.params or {}
    if family == "regular89":
        return adversary_regular_gadget(pi, int(params["d"]), int(params["t"]))
    if family == "fano":
        return adversary_projective(g, pi, 2)
    if family == "pg23":
        return adversary_projective(g, pi, 3)
    if family == "biclique_half":
        return adversary_biclique(pi, g.n)
    if family == "planted_is":
        return adversary_planted_is(g, pi)
    raise FamilyShapeError("no constructive adversary for family %r" % (family,))


def monte_carlo_random_pi(
    g: BipartiteGraph,
    trials: int,
    adversary_mode: str = "exact",
    seed: int = 0,
    budget: int = DEFAULT_BUDGET,
    iters: int = 4000,
) -> MonteCarloSummary:
    """Attack `trials` uniformly random priority orders and summarize.

    Per-trial randomness derives from seed and the trial counter, so
    results do not depend on scheduling or trial order.
    """
    if trials < 1:
        raise AnalysisParamError("trials must be positive")
    if adversary_mode not in ("exact", "heuristic", "constructive"):
        raise UsageError("unknown adversary mode %r" % (adversary_mode,))
    n = g.n
    sizes: list[int] = []
    upper_only = adversary_mode != "exact"
    for trial in range(trials):
        trial_seed = seed * 1_000_003 + trial
        rng = random.Random(trial_seed)
        order = list(range(n))
        rng.shuffle(order)
        pi = Permutation.from_order(order)
        if adversary_mode == "exact":
            res = worst_order_exact(g, pi, budget=budget)
            if not res.exact:
                upper_only = True
            sizes.append(res.size)
        elif adversary_mode == "heuristic":
            sizes.append(worst_order_heuristic(g, pi, iters=iters, seed=trial_seed).size)
        else:
            sigma = _constructive_sigma(g, pi)
            sizes.append(greedy_match(g, sigma, pi).size)
    fractions = [sz / n for sz in sizes]
    return MonteCarloSummary(
        trials=trials,
        mean_size=statistics.fmean(sizes),
        min_size=min(sizes),
        mean_fraction=statistics.fmean(fractions),
        min_fraction=min(fractions),
        stddev_fraction=statistics.pstdev(fractions),
        upper_bound_only=upper_only,
    )


@dataclass(frozen=True)
class IterationRecord:
    """One round: the priority order used, the minimizing arrival order
    found under the policy, its value, and the unmatched right vertices."""

    pi: Permutation
    sigma: Permutation
    size: int
    losers: tuple[int, ...]


@dataclass(frozen=True)
class IterativeTrace:
    records: tuple[IterationRecord, ...]
    cap_reached: bool

    @property
    def iterations_used(self) -> int:
        return len(self.records)


def _exact_sigma(g: BipartiteGraph, pi: Permutation):
    res = worst_order_exact(g, pi)
    if not res.exact:
        raise UsageError("exact minimization exceeded its budget; instance too large")
    return res


def _minimize_with_policy(g: BipartiteGraph, pi: Permutation, policy: str):
    n = g.n
    if policy == "first_found":
        res = _exact_sigma(g, pi)
        out = greedy_match(g, res.sigma, pi)
        return res.sigma, res.size, tuple(out.unmatched_v())
    if policy not in ("max_losers_low", "exhaustive_worst_for_next_round"):
        raise UsageError("unknown minimizer policy %r" % (policy,))
    if n > 9:
        raise UsageError("policy %r enumerates all arrival orders; n <= 9 required" % (policy,))
    if policy == "max_losers_low":
        half = set(pi.order[: (n + 1) // 2])
        best = None
        for perm in itertools.permutations(range(n)):
            out = greedy_match(g, Permutation.from_order(perm), pi)
            losers = tuple(out.unmatched_v())
            key = (out.size, -len(half.intersection(losers)), perm)
            if best is None or key < best[0]:
                best = (key, perm, losers)
        assert best is not None
        return Permutation.from_order(best[1]), best[0][0], best[2]
    best_size: Optional[int] = None
    loser_sets: dict[tuple[int, ...], tuple[int, ...]] = {}
    for perm in itertools.permutations(range(n)):
        out = greedy_match(g, Permutation.from_order(perm), pi)
        if best_size is None or out.size < best_size:
            best_size = out.size
            loser_sets = {}
        if out.size == best_size:
            losers = tuple(out.unmatched_v())
            cur = loser_sets.get(losers)
            if cur is None or perm < cur:
                loser_sets[losers] = perm
    assert best_size is not None
    scored = []
    for losers, perm in loser_sets.items():
        lset = set(losers)
        promoted = [v for v in pi.order if v in lset] + [v for v in pi.order if v not in lset]
        nxt = _exact_sigma(g, Permutation.from_order(promoted))
        scored.append((nxt.size, losers, perm))
    next_value, losers, perm = min(scored)
    return Permutation.from_order(perm), best_size, losers


def iterative_process(
    g: BipartiteGraph,
    pi1: Permutation,
    cap: int,
    minimizer_policy: str = "first_found",
) -> IterativeTrace:
    """Promote the losers of each round to the top until a majority wins.

    Each round finds a minimizing arrival order for the current priority
    order, then rebuilds the priorities with the unmatched right
    vertices first (internal order preserved on both groups).  The
    process stops once the round's value exceeds n/2, or after `cap`
    rounds (reported, not raised).
    """
    if cap < 1:
        raise AnalysisParamError("cap must be positive")
    n = g.n
    pi = pi1
    records: list[IterationRecord] = []
    cap_reached = False
    while True:
        if len(records) == cap:
            cap_reached = True
            break
        sigma, size, losers = _minimize_with_policy(g, pi, minimizer_policy)
        if 2 * size < n:
            raise PropositionViolatedError("greedy produced a sub-half matching")
        records.append(IterationRecord(pi, sigma, size, losers))
        if 2 * size > n:
            break
        lset = set(losers)
        promoted = [v for v in pi.order if v in lset] + [v for v in pi.order if v not in lset]
        pi = Permutation.from_order(promoted)
    return IterativeTrace(tuple(records), cap_reached)


def _priority_game_value(g: BipartiteGraph) -> int:
    """max over priority orders of the exact adversary's minimum."""
    return max(
        worst_order_exact(g, Permutation.from_order(p)).size
        for p in itertools.permutations(range(g.n))
    )


def _arrival_game_value(g: BipartiteGraph) -> int:
    """Best guarantee when the left side's arrival order is chosen and
    each arrival receives an adversarially chosen wanted free vertex."""
    n = g.n
    adj_mask = [sum(1 << v for v in g.adj_u[u]) for u in range(n)]
    best_overall = 0
    for p in itertools.permutations(range(n)):
        memo: dict[tuple[int, int], int] = {}

        def play(pos: int, v_mask: int) -> int:
            if pos == n:
                return 0
            key = (pos, v_mask)
            cached = memo.get(key)
            if cached is not None:
                return cached
            u = p[pos]
            options = adj_mask[u] & ~v_mask
            if options == 0:
                best = play(pos + 1, v_mask)
            else:
                best = n + 1
                m = options
                while m:
                    bit = m & -m
                    m ^= bit
                    best = min(best, 1 + play(pos + 1, v_mask | bit))
            memo[key] = best
            return best

        best_overall = max(best_overall, play(0, 0))
    return best_overall


def _transposed(g: BipartiteGraph) -> BipartiteGraph:
    return BipartiteGraph.from_edges(g.n, sorted((v, u) for u, v in g.edges))


def cross_check_interpretations(g: BipartiteGraph, n_cap: int = 5) -> bool:
    """Solve both game readings exhaustively and insist they agree.

    Reading one fixes priorities on the right side and lets the arrival
    order respond adversarially (the package's standing model).  Reading
    two fixes the arrival order of the left side and lets the right side
    choose which wanted free vertex each arrival receives.  The two are
    the same problem with the sides exchanged, so reading two on a graph
    must match reading one on its transpose (and vice versa); same-graph
    values need not agree, since the roles of the sides differ.
    """
    n = g.n
    if n > n_cap:
        raise UsageError("cross check is exhaustive; n <= %d required" % n_cap)
    gt = _transposed(g)
    value_priority = _priority_game_value(g)
    value_priority_t = _priority_game_value(gt)
    value_arrival = _arrival_game_value(g)
    value_arrival_t = _arrival_game_value(gt)
    if value_arrival != value_priority_t or value_priority != value_arrival_t:
        raise PropositionViolatedError(
            "game readings disagree under transposition: "
            "arrival %d vs transposed priority %d; priority %d vs transposed arrival %d"
            % (value_arrival, value_priority_t, value_priority, value_arrival_t)
        )
    return True
