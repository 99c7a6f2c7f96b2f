import pytest

from conftest import make_instance
from hstt.blocks import (
    build_session_graph,
    detect_blocks,
    detection_summary,
    find_half_chains,
    find_half_loops,
    find_half_switches,
    lesson_hour_mass,
)
from hstt.model import serialize_instance


def switch_instance():
    """Two classes, each with one session by tA and one by tB."""
    return make_instance(
        days=2, slots=3,
        teachers=("tA", "tB"), classes=("c1", "c2"), subjects=("s1",),
        lessons=[
            ("c1_a", "tA", "c1", "s1"), ("c1_b", "tB", "c1", "s1"),
            ("c2_a", "tA", "c2", "s1"), ("c2_b", "tB", "c2", "s1"),
        ],
    )


def loop_instance():
    """Three classes whose paired sessions close a teacher cycle
    t1-t2, t2-t3, t3-t1 with only one shared teacher per edge."""
    return make_instance(
        days=2, slots=3,
        teachers=("t1", "t2", "t3"), classes=("c1", "c2", "c3"),
        subjects=("s1",),
        lessons=[
            ("c1_x", "t1", "c1", "s1"), ("c1_y", "t2", "c1", "s1"),
            ("c2_x", "t2", "c2", "s1"), ("c2_y", "t3", "c2", "s1"),
            ("c3_x", "t3", "c3", "s1"), ("c3_y", "t1", "c3", "s1"),
        ],
    )


def chain_instance():
    """Singleton c1 session, paired c2 node, singleton c3 session."""
    return make_instance(
        days=2, slots=3,
        teachers=("t1", "t2"), classes=("c1", "c2", "c3"),
        subjects=("s1",),
        lessons=[
            ("c1_x", "t1", "c1", "s1"),
            ("c2_x", "t1", "c2", "s1"), ("c2_y", "t2", "c2", "s1"),
            ("c3_x", "t2", "c3", "s1"),
        ],
    )


class TestGraph:
    def test_sessions_paired_per_class(self):
        g = build_session_graph(switch_instance())
        assert len(g.nodes) == 2
        assert all(n.paired for n in g.nodes)

    def test_odd_class_leaves_singleton(self):
        g = build_session_graph(chain_instance())
        paired = sorted(n.paired for n in g.nodes)
        assert paired == [False, False, True]

    def test_edges_require_shared_teacher(self):
        g = build_session_graph(loop_instance())
        assert all(len(g.adj[n.index]) == 2 for n in g.nodes)

    def test_multi_hour_and_block_lessons_excluded(self):
        inst = make_instance(
            days=1, slots=3,
            lessons=[
                {"id": "l1", "duration": 2,
                 "tuples": [{"teacher": "t1", "class": "c1", "subject": "s1"}]},
                ("l2", "t1", "c1", "s1"),
            ],
        )
        g = build_session_graph(inst)
        assert [n.sessions for n in g.nodes] == [(1,)]

    def test_pairing_needs_common_available_period(self):
        inst = make_instance(
            days=1, slots=2,
            teacher_avail={"t1": [0], "t2": [1]},
            lessons=[("l1", "t1", "c1", "s1"), ("l2", "t2", "c1", "s1")],
        )
        g = build_session_graph(inst)
        assert all(not n.paired for n in g.nodes)


class TestDetection:
    def test_half_switch_found(self):
        inst = switch_instance()
        _, paths = detect_blocks(inst)
        assert [p.kind for p in paths] == ["half_switch"]
        assert len(paths[0].member_lessons) == 4

    def test_half_loop_found(self):
        inst = loop_instance()
        _, paths = detect_blocks(inst)
        assert [p.kind for p in paths] == ["half_loop"]
        assert len(paths[0].nodes) == 3

    def test_half_chain_found(self):
        inst = chain_instance()
        _, paths = detect_blocks(inst)
        assert [p.kind for p in paths] == ["half_chain"]
        assert len(paths[0].member_lessons) == 4

    def test_single_shared_teacher_is_not_a_switch(self):
        g = build_session_graph(loop_instance())
        assert find_half_switches(g) == []

    def test_paths_are_disjoint(self):
        for inst in (switch_instance(), loop_instance(), chain_instance()):
            _, paths = detect_blocks(inst)
            seen = set()
            for p in paths:
                assert not (seen & set(p.member_lessons))
                seen.update(p.member_lessons)

    def test_loops_skip_nodes_already_used(self):
        g = build_session_graph(loop_instance())
        used = {0}
        assert find_half_loops(g, used) == []

    def test_chains_need_two_free_singletons(self):
        g = build_session_graph(chain_instance())
        singles = [n.index for n in g.nodes if not n.paired]
        used = {singles[0]}
        assert find_half_chains(g, used) == []


class TestRewrite:
    def test_members_replaced_by_one_block_lesson(self):
        inst = switch_instance()
        out, paths = detect_blocks(inst)
        assert len(out.lessons) == len(inst.lessons) - 4 + 1
        blk = out.lessons[-1]
        assert blk.kind == "half_switch"
        assert blk.duration == 1
        assert len(blk.tuples) == 4
        assert blk.teachers == (0, 1) and blk.classes == (0, 1)

    def test_chain_block_prefers_day_edges(self):
        out, _ = detect_blocks(chain_instance())
        blk = out.lessons[-1]
        assert blk.kind == "half_chain" and blk.edge_preference

    def test_switch_and_loop_blocks_have_no_edge_preference(self):
        for inst in (switch_instance(), loop_instance()):
            out, _ = detect_blocks(inst)
            assert not out.lessons[-1].edge_preference

    def test_block_gets_fresh_course(self):
        out, _ = detect_blocks(loop_instance())
        blk = out.lessons[-1]
        assert all(l.course != blk.course for l in out.lessons[:-1])

    def test_hour_mass_conserved(self):
        for inst in (switch_instance(), loop_instance(), chain_instance()):
            out, _ = detect_blocks(inst)
            assert lesson_hour_mass(out) == lesson_hour_mass(inst)

    def test_no_patterns_returns_same_instance(self):
        inst = make_instance(days=1, slots=2, lessons=[("l1", "t1", "c1", "s1")])
        out, paths = detect_blocks(inst)
        assert paths == [] and out is inst

    def test_deterministic(self):
        a_out, a_paths = detect_blocks(loop_instance())
        b_out, b_paths = detect_blocks(loop_instance())
        assert a_paths == b_paths
        assert serialize_instance(a_out) == serialize_instance(b_out)

    def test_indices_stay_dense(self):
        out, _ = detect_blocks(chain_instance())
        assert [l.index for l in out.lessons] == list(range(len(out.lessons)))


def test_detection_summary_reports_member_counts():
    inst = switch_instance()
    _, paths = detect_blocks(inst)
    summary = detection_summary(inst, paths)
    assert summary["half_switch"]["detected"] == 4
    assert summary["half_loop"]["detected"] == 0
