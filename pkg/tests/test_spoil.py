"""Conflict digraph construction and path-cover improvement machinery."""

import pytest

from greedyorder import (
    BipartiteGraph,
    PathCover,
    align_with_matching,
    build_spoiling_graph,
    find_perfect_matching,
    is_maximal,
    maximal_path_cover,
    verify_maximality_conditions,
)
from greedyorder.spoil import (
    CoverStep,
    SpoilGraph,
    apply_merge,
    apply_rotation,
    apply_step,
    apply_unbalance,
    find_improvement,
    trivial_cover,
)
from greedyorder.errors import (
    InvalidGraphError,
    LengthOrderViolatedError,
    MatchingNotAlignedError,
    MissingArcError,
)


def six_cycle():
    return BipartiteGraph.from_edges(3, [(0, 0), (0, 1), (1, 1), (1, 2), (2, 0), (2, 2)])


def sg_from_arcs(n, arcs):
    g = BipartiteGraph.from_edges(n, [(i, i) for i in range(n)] + [(i, j) for i, j in arcs])
    return build_spoiling_graph(g)


def test_six_cycle_yields_directed_triangle():
    sg = build_spoiling_graph(six_cycle())
    assert sg.n == 3
    assert sorted(sg.arcs()) == [(0, 1), (1, 2), (2, 0)]
    assert sg.num_arcs == 3
    assert sg.has_arc(0, 1) and not sg.has_arc(1, 0)


def test_arc_count_equals_edges_minus_n(corpus):
    for inst in corpus:
        g = inst.graph
        m = find_perfect_matching(g)
        aligned, _ = align_with_matching(g, m)
        sg = build_spoiling_graph(aligned)
        assert sg.num_arcs == g.num_edges - g.n, inst.instance_id


def test_unaligned_matching_rejected():
    g = BipartiteGraph.from_edges(2, [(0, 1), (1, 0)])
    with pytest.raises(MatchingNotAlignedError):
        build_spoiling_graph(g)


def test_trivial_cover_counts():
    c = trivial_cover(4)
    assert c.p == 4 and c.k == 4
    assert c.paths == ((0,), (1,), (2,), (3,))
    assert c.isolated == (0, 1, 2, 3)
    assert c.starts == () and c.ends == ()
    assert c.sum_squares == 4
    assert c.classes() == ((0, 1, 2, 3), ())


def test_cover_normalization_and_validation():
    c = PathCover.from_paths(5, [(3, 4), (2,), (0, 1)])
    # sorted by (length, smallest node): singletons first, then pairs
    assert c.paths == ((2,), (0, 1), (3, 4))
    assert c.k == 1 and c.p == 3
    assert c.classes() == ((2,), (0, 1, 3, 4))
    with pytest.raises(InvalidGraphError):
        PathCover.from_paths(3, [(0, 1)])
    with pytest.raises(InvalidGraphError):
        PathCover.from_paths(3, [(0, 1), (1, 2)])
    with pytest.raises(InvalidGraphError):
        PathCover.from_paths(2, [(0,), (1,), ()])


def test_validate_arcs_checks_consecutive_pairs():
    sg = sg_from_arcs(3, [(0, 1)])
    PathCover.from_paths(3, [(0, 1), (2,)]).validate_arcs(sg)
    with pytest.raises(MissingArcError):
        PathCover.from_paths(3, [(1, 2), (0,)]).validate_arcs(sg)


def test_merge_semantics():
    sg = sg_from_arcs(3, [(0, 1), (1, 2), (2, 0)])
    c = trivial_cover(3)
    merged = apply_merge(c, sg, 0, 1)
    assert merged.paths == ((2,), (0, 1))
    assert merged.sum_squares > c.sum_squares
    with pytest.raises(MissingArcError):
        apply_merge(c, sg, 1, 0)  # arc 1 -> 0 absent
    with pytest.raises(InvalidGraphError):
        apply_merge(c, sg, 1, 1)


def test_unbalance_semantics():
    # two 2-paths plus the arcs needed for each move direction
    sg = sg_from_arcs(4, [(0, 1), (2, 3), (2, 0), (1, 3)])
    c = PathCover.from_paths(4, [(0, 1), (2, 3)])
    moved = apply_unbalance(c, sg, 0, 1, "start")
    assert moved.paths == ((3,), (2, 0, 1))
    moved = apply_unbalance(c, sg, 0, 1, "end")
    assert moved.paths == ((2,), (0, 1, 3))
    for after in (apply_unbalance(c, sg, 0, 1, "start"), apply_unbalance(c, sg, 0, 1, "end")):
        assert after.sum_squares > c.sum_squares
    with pytest.raises(MissingArcError):
        apply_unbalance(c, sg, 1, 0, "start")  # would need arc 0 -> 2
    with pytest.raises(InvalidGraphError):
        apply_unbalance(c, sg, 0, 1, "sideways")


def test_unbalance_length_preconditions():
    sg = sg_from_arcs(5, [(0, 1), (2, 3), (3, 4), (0, 2)])
    c = PathCover.from_paths(5, [(0, 1), (2, 3, 4)])
    with pytest.raises(LengthOrderViolatedError):
        apply_unbalance(c, sg, 0, 1, "start")  # receiver shorter than donor
    iso = PathCover.from_paths(5, [(0,), (1,), (2, 3, 4)])
    with pytest.raises(LengthOrderViolatedError):
        apply_unbalance(iso, sg, 2, 0, "end")  # single-node donor is a merge


def test_rotation_semantics():
    sg = sg_from_arcs(3, [(0, 1), (1, 2), (2, 0)])
    c = PathCover.from_paths(3, [(0, 1, 2)])
    assert apply_rotation(c, sg, 0, 0).paths == ((1, 2, 0),)
    assert apply_rotation(c, sg, 0, 1).paths == ((2, 0, 1),)
    with pytest.raises(InvalidGraphError):
        apply_rotation(c, sg, 0, 2)
    no_close = sg_from_arcs(3, [(0, 1), (1, 2)])
    with pytest.raises(MissingArcError):
        apply_rotation(PathCover.from_paths(3, [(0, 1, 2)]), no_close, 0, 0)


def test_rotation_needed_before_merge():
    # 0 -> 1 with closing arc 1 -> 0; vertex 2 reachable only from 0
    sg = sg_from_arcs(3, [(0, 1), (1, 0), (0, 2)])
    c = PathCover.from_paths(3, [(0, 1), (2,)])
    step = find_improvement(c, sg)
    assert step is not None and step.op == "merge"
    assert (step.rot_i, step.rot_j) != (None, None)
    improved = apply_step(c, sg, step)
    improved.validate_arcs(sg)
    assert improved.p == 1


def test_scan_prefers_plain_merge():
    sg = sg_from_arcs(4, [(0, 1), (1, 2), (2, 3)])
    step = find_improvement(trivial_cover(4), sg)
    assert step == CoverStep(op="merge", i=0, j=1)


def test_maximal_cover_on_corpus(corpus):
    for inst in corpus:
        g = inst.graph
        aligned, _ = align_with_matching(g, find_perfect_matching(g))
        sg = build_spoiling_graph(aligned)
        cover, steps = maximal_path_cover(sg, collect_log=True)
        cover.validate_arcs(sg)
        assert is_maximal(cover, sg), inst.instance_id
        assert verify_maximality_conditions(cover, sg) == [], inst.instance_id

        # replay the recorded steps from the trivial cover; the squared
        # path lengths must increase strictly at every step
        work = trivial_cover(sg.n)
        for step in steps:
            nxt = apply_step(work, sg, step)
            assert nxt.sum_squares > work.sum_squares
            work = nxt
        assert work == cover


def test_single_path_cover_is_maximal():
    n = 6
    sg = sg_from_arcs(n, [(i, (i + 1) % n) for i in range(n)])
    c = PathCover.from_paths(n, [tuple(range(n))])
    assert is_maximal(c, sg)
    assert verify_maximality_conditions(c, sg) == []


def test_maximality_conditions_fail_on_improvable_cover():
    sg = build_spoiling_graph(six_cycle())
    report = verify_maximality_conditions(trivial_cover(3), sg)
    assert report != []
