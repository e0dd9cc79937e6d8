"""Conflict digraph of a matched instance and path covers over it.

For a graph whose perfect matching has been aligned to the identity
(pair i is the edge (u_i, v_i)), the conflict digraph has one node per
pair and an arc i -> j exactly when (u_i, v_j) is an edge and i != j.
Path covers of this digraph drive the certified arrival orders: a cover
is improved by merge and unbalance operations until none applies, even
after rotating the two paths involved.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Optional, Sequence

from .core import BipartiteGraph
from .errors import (
    InvalidGraphError,
    LengthOrderViolatedError,
    MatchingNotAlignedError,
    MissingArcError,
    PropositionViolatedError,
)

__all__ = [
    "SpoilGraph",
    "PathCover",
    "CoverStep",
    "build_spoiling_graph",
    "trivial_cover",
    "apply_merge",
    "apply_unbalance",
    "apply_rotation",
    "apply_step",
    "find_improvement",
    "is_maximal",
    "maximal_path_cover",
    "verify_maximality_conditions",
]


@dataclass(frozen=True)
class SpoilGraph:
    """Digraph on n pair-nodes with bitmask adjacency.

    Bit j of ``out_mask[i]`` is set iff there is an arc i -> j.
    """

    n: int
    out_mask: tuple[int, ...]

    def has_arc(self, i: int, j: int) -> bool:
        return (self.out_mask[i] >> j) & 1 == 1

    @property
    def num_arcs(self) -> int:
        return sum(m.bit_count() for m in self.out_mask)

    def arcs(self) -> list[tuple[int, int]]:
        res = []
        for i, m in enumerate(self.out_mask):
            while m:
                j = (m & -m).bit_length() - 1
                res.append((i, j))
                m &= m - 1
        return res


def build_spoiling_graph(g: BipartiteGraph) -> SpoilGraph:
    """Build the conflict digraph of an identity-aligned graph.

    Requires every pair edge (i, i) to be present; align the graph with
    align_with_matching first.  The arc count always equals
    ``g.num_edges - g.n``.
    """
    masks = []
    for i in range(g.n):
        if i not in g.adj_u[i]:
            raise MatchingNotAlignedError(
                "pair edge (%d, %d) missing; align the matching to the identity first" % (i, i)
            )
        m = 0
        for j in g.adj_u[i]:
            if j != i:
                m |= 1 << j
        masks.append(m)
    sg = SpoilGraph(n=g.n, out_mask=tuple(masks))
    assert sg.num_arcs == g.num_edges - g.n
    return sg


def _normalize(paths: Iterable[Sequence[int]]) -> tuple[tuple[int, ...], ...]:
    return tuple(sorted((tuple(p) for p in paths), key=lambda p: (len(p), min(p))))


@dataclass(frozen=True)
class PathCover:
    """A set of vertex-disjoint directed paths covering all n nodes.

    Paths are kept normalized: sorted by (length, smallest contained
    node), so the k isolated nodes come first.  For a path with at least
    two nodes, its first node is a start and its last an end.
    """

    n: int
    paths: tuple[tuple[int, ...], ...]

    @classmethod
    def from_paths(cls, n: int, paths: Iterable[Sequence[int]]) -> "PathCover":
        listed = [tuple(p) for p in paths]
        if any(len(p) == 0 for p in listed):
            raise InvalidGraphError("empty path in cover")
        norm = _normalize(listed)
        seen: set[int] = set()
        for p in norm:
            for x in p:
                if not (0 <= x < n) or x in seen:
                    raise InvalidGraphError("node %r repeated or out of range in cover" % (x,))
                seen.add(x)
        if len(seen) != n:
            raise InvalidGraphError("cover misses %d node(s)" % (n - len(seen)))
        return cls(n=n, paths=norm)

    def validate_arcs(self, sg: SpoilGraph) -> None:
        for p in self.paths:
            for a, b in zip(p, p[1:]):
                if not sg.has_arc(a, b):
                    raise MissingArcError("cover uses absent arc %d -> %d" % (a, b))

    @property
    def p(self) -> int:
        return len(self.paths)

    @property
    def k(self) -> int:
        return sum(1 for p in self.paths if len(p) == 1)

    @property
    def isolated(self) -> tuple[int, ...]:
        """The nodes forming length-1 paths, in normalized order."""
        return tuple(p[0] for p in self.paths if len(p) == 1)

    @property
    def starts(self) -> tuple[int, ...]:
        return tuple(p[0] for p in self.paths if len(p) >= 2)

    @property
    def ends(self) -> tuple[int, ...]:
        return tuple(p[-1] for p in self.paths if len(p) >= 2)

    @property
    def sum_squares(self) -> int:
        return sum(len(p) * len(p) for p in self.paths)

    def classes(self) -> tuple[tuple[int, ...], tuple[int, ...]]:
        """Split nodes into (isolated ones, all others), each sorted."""
        iso = set(self.isolated)
        w2 = tuple(x for x in range(self.n) if x not in iso)
        return tuple(sorted(iso)), w2


def trivial_cover(n: int) -> PathCover:
    return PathCover.from_paths(n, [(i,) for i in range(n)])


@dataclass(frozen=True)
class CoverStep:
    """One improvement step: optional rotations of the two involved
    paths, then a merge or unbalance between them.

    ``i`` and ``j`` index the normalized path list of the cover the step
    was found on.  For a merge, path i's end gains an arc to path j's
    start.  For an unbalance, path i is the receiving (not shorter) path
    and path j donates one endpoint.
    """

    op: str  # "merge", "unbalance_start" or "unbalance_end"
    i: int
    j: int
    rot_i: Optional[int] = None
    rot_j: Optional[int] = None


def apply_rotation(cover: PathCover, sg: SpoilGraph, idx: int, cut: int) -> PathCover:
    """Rotate path idx at cut position; needs the closing arc end -> start.

    The new path is ``p[cut+1:] + p[:cut+1]`` for cut in 0..len-2.
    """
    p = cover.paths[idx]
    if len(p) < 2:
        raise InvalidGraphError("cannot rotate a single-node path")
    if not (0 <= cut <= len(p) - 2):
        raise InvalidGraphError("cut %d out of range for path of length %d" % (cut, len(p)))
    if not sg.has_arc(p[-1], p[0]):
        raise MissingArcError("rotation needs closing arc %d -> %d" % (p[-1], p[0]))
    rotated = p[cut + 1 :] + p[: cut + 1]
    paths = list(cover.paths)
    paths[idx] = rotated
    return PathCover.from_paths(cover.n, paths)


def apply_merge(cover: PathCover, sg: SpoilGraph, i: int, j: int) -> PathCover:
    """Concatenate path j after path i using the arc end(i) -> start(j)."""
    if i == j:
        raise InvalidGraphError("merge needs two distinct paths")
    pi, pj = cover.paths[i], cover.paths[j]
    if not sg.has_arc(pi[-1], pj[0]):
        raise MissingArcError("merge needs arc %d -> %d" % (pi[-1], pj[0]))
    paths = [p for t, p in enumerate(cover.paths) if t not in (i, j)]
    paths.append(pi + pj)
    return PathCover.from_paths(cover.n, paths)


def apply_unbalance(cover: PathCover, sg: SpoilGraph, i: int, j: int, mode: str) -> PathCover:
    """Move one endpoint of path j onto path i.

    Requires len(path i) >= len(path j) >= 2; moving the only node of a
    single-node path is a merge, not an unbalance.  Mode "start" moves
    path j's first node to the front of path i (arc taken: that node to
    path i's first).  Mode "end" moves path j's last node to the back of
    path i (arc taken: path i's last to that node).
    """
    if i == j:
        raise InvalidGraphError("unbalance needs two distinct paths")
    pi, pj = cover.paths[i], cover.paths[j]
    if len(pj) < 2:
        raise LengthOrderViolatedError("donor path must have at least 2 nodes")
    if len(pi) < len(pj):
        raise LengthOrderViolatedError(
            "receiving path (len %d) shorter than donor (len %d)" % (len(pi), len(pj))
        )
    if mode == "start":
        moved = pj[0]
        if not sg.has_arc(moved, pi[0]):
            raise MissingArcError("unbalance needs arc %d -> %d" % (moved, pi[0]))
        new_i = (moved,) + pi
        new_j = pj[1:]
    elif mode == "end":
        moved = pj[-1]
        if not sg.has_arc(pi[-1], moved):
            raise MissingArcError("unbalance needs arc %d -> %d" % (pi[-1], moved))
        new_i = pi + (moved,)
        new_j = pj[:-1]
    else:
        raise InvalidGraphError("unknown unbalance mode %r" % (mode,))
    paths = [p for t, p in enumerate(cover.paths) if t not in (i, j)]
    paths.extend([new_i, new_j])
    return PathCover.from_paths(cover.n, paths)


def apply_step(cover: PathCover, sg: SpoilGraph, step: CoverStep) -> PathCover:
    """Apply a CoverStep: rotations first, then the operation.

    Rotations change path endpoints but keep the normalized position of
    each path (length and node set are unchanged), so the indices stay
    valid between the two phases.
    """
    work = cover
    if step.rot_i is not None:
        work = apply_rotation(work, sg, step.i, step.rot_i)
    if step.rot_j is not None:
        work = apply_rotation(work, sg, step.j, step.rot_j)
    if step.op == "merge":
        return apply_merge(work, sg, step.i, step.j)
    if step.op == "unbalance_start":
        return apply_unbalance(work, sg, step.i, step.j, "start")
    if step.op == "unbalance_end":
        return apply_unbalance(work, sg, step.i, step.j, "end")
    raise InvalidGraphError("unknown op %r" % (step.op,))


def _rotations_of(cover: PathCover, sg: SpoilGraph, idx: int) -> list[Optional[int]]:
    """Available rotation cuts for path idx, with None (no rotation) first."""
    p = cover.paths[idx]
    opts: list[Optional[int]] = [None]
    if len(p) >= 2 and sg.has_arc(p[-1], p[0]):
        opts.extend(range(len(p) - 1))
    return opts


def _rotated(p: tuple[int, ...], cut: Optional[int]) -> tuple[int, ...]:
    if cut is None:
        return p
    return p[cut + 1 :] + p[: cut + 1]


def find_improvement(cover: PathCover, sg: SpoilGraph) -> Optional[CoverStep]:
    """Deterministic scan for the next improvement step, or None.

    Scan order: plain merges, then plain unbalances, then merges that
    need rotating one or both involved paths, then unbalances likewise.
    Within a stage the path indices run lexicographically and rotation
    cuts run no-rotation first.
    """
    paths = cover.paths
    p = len(paths)

    for i in range(p):
        for j in range(p):
            if i != j and sg.has_arc(paths[i][-1], paths[j][0]):
                return CoverStep(op="merge", i=i, j=j)

    for i in range(p):
        for j in range(p):
            if i == j or len(paths[i]) < len(paths[j]) or len(paths[j]) < 2:
                continue
            if sg.has_arc(paths[j][0], paths[i][0]):
                return CoverStep(op="unbalance_start", i=i, j=j)
            if sg.has_arc(paths[i][-1], paths[j][-1]):
                return CoverStep(op="unbalance_end", i=i, j=j)

    rot_opts = [_rotations_of(cover, sg, idx) for idx in range(p)]

    for i in range(p):
        for j in range(p):
            if i == j:
                continue
            for ci in rot_opts[i]:
                pi = _rotated(paths[i], ci)
                for cj in rot_opts[j]:
                    if ci is None and cj is None:
                        continue
                    pj = _rotated(paths[j], cj)
                    if sg.has_arc(pi[-1], pj[0]):
                        return CoverStep(op="merge", i=i, j=j, rot_i=ci, rot_j=cj)

    for i in range(p):
        for j in range(p):
            if i == j or len(paths[i]) < len(paths[j]) or len(paths[j]) < 2:
                continue
            for ci in rot_opts[i]:
                pi = _rotated(paths[i], ci)
                for cj in rot_opts[j]:
                    if ci is None and cj is None:
                        continue
                    pj = _rotated(paths[j], cj)
                    if sg.has_arc(pj[0], pi[0]):
                        return CoverStep(op="unbalance_start", i=i, j=j, rot_i=ci, rot_j=cj)
                    if sg.has_arc(pi[-1], pj[-1]):
                        return CoverStep(op="unbalance_end", i=i, j=j, rot_i=ci, rot_j=cj)

    return None


def is_maximal(cover: PathCover, sg: SpoilGraph) -> bool:
    return find_improvement(cover, sg) is None


def maximal_path_cover(
    sg: SpoilGraph,
    initial: Optional[PathCover] = None,
    collect_log: bool = False,
) -> tuple[PathCover, Optional[list[CoverStep]]]:
    """Improve a cover until no merge or unbalance applies, rotations
    included.

    Starts from the all-isolated cover unless given one.  Every step
    strictly increases the sum of squared path lengths, which is bounded
    by n^2, so the loop terminates.
    """
    cover = initial if initial is not None else trivial_cover(sg.n)
    cover.validate_arcs(sg)
    log: list[CoverStep] = []
    max_iters = sg.n * sg.n + sg.n + 5
    for _ in range(max_iters):
        step = find_improvement(cover, sg)
        if step is None:
            return cover, (log if collect_log else None)
        before = cover.sum_squares
        cover = apply_step(cover, sg, step)
        if cover.sum_squares <= before:
            raise PropositionViolatedError(
                "improvement step failed to increase the squared-length sum"
            )
        if collect_log:
            log.append(step)
    raise PropositionViolatedError("path cover improvement did not terminate")


def verify_maximality_conditions(cover: PathCover, sg: SpoilGraph) -> list[str]:
    """Check the structural facts that hold for every maximal cover.

    Paths are indexed in normalized order, isolated ones first.  Returns
    human-readable descriptions of violated facts (empty when all hold):

    1. an end t of a longer path has no arc into an isolated node or a
       start, except to the start of its own path;
    2. no arc from the end of a later (not shorter) path to the end of an
       earlier longer path;
    3. no arc from an isolated node to a start;
    4. no arc between two distinct isolated nodes;
    5. no arc from the start of an earlier longer path to the start of a
       later (not shorter) one.
    """
    issues: list[str] = []
    k = cover.k
    paths = cover.paths
    p = len(paths)
    iso = cover.isolated
    starts = {paths[a][0]: a for a in range(k, p)}

    for a in range(k, p):
        t = paths[a][-1]
        for q in iso:
            if sg.has_arc(t, q):
                issues.append("end %d of path %d has arc to isolated %d" % (t, a, q))
        for s, b in starts.items():
            if b != a and sg.has_arc(t, s):
                issues.append("end %d of path %d has arc to start %d of path %d" % (t, a, s, b))

    for b in range(k, p):
        for a in range(k, b):
            if sg.has_arc(paths[b][-1], paths[a][-1]):
                issues.append(
                    "arc between ends %d -> %d of paths %d, %d" % (paths[b][-1], paths[a][-1], b, a)
                )

    for q in iso:
        for s in starts:
            if sg.has_arc(q, s):
                issues.append("arc from isolated %d to start %d" % (q, s))

    for q1 in iso:
        for q2 in iso:
            if q1 != q2 and sg.has_arc(q1, q2):
                issues.append("arc between isolated nodes %d -> %d" % (q1, q2))

    for a in range(k, p):
        for b in range(a + 1, p):
            if sg.has_arc(paths[a][0], paths[b][0]):
                issues.append(
                    "arc between starts %d -> %d of paths %d, %d" % (paths[a][0], paths[b][0], a, b)
                )

    return issues
