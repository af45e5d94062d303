"""Clause sets, refinement, and the resulting fixpoints."""

import random

import pytest
from hypothesis import given, settings, strategies as st

import kripkit as kk
from kripkit import Fragment, Model, build_example
from kripkit.bisim import (ConditionSet, bisimilarity_partition, clause_kind,
                           conditions_for, directed_conversion,
                           greatest_bisimulation, is_bisimulation)
from kripkit.errors import FlavorError, PreconditionError
from kripkit.sampling import random_model

WEDGE = build_example("wedge")
WEDGE_STRICT = build_example("wedge_strict")
BIINT_BOX = conditions_for(Fragment("biint", 1, 0), "standard")
INT_BOX = conditions_for(Fragment("int", 1, 0), "standard")


def test_conditions_for_standard():
    assert BIINT_BOX == ConditionSet(
        order_forth=True, order_back=True, dual_forth=True, dual_back=True,
        boxes=(1,), diamonds=(), tdias=(), tboxes=())
    assert conditions_for(Fragment("int", 1, 0), "standard") == ConditionSet(
        order_forth=True, order_back=True, dual_forth=False, dual_back=False,
        boxes=(1,), diamonds=(), tdias=(), tboxes=())
    assert conditions_for(Fragment("intdual", 0, 1), "standard") == \
        ConditionSet(order_forth=False, order_back=False, dual_forth=True,
                     dual_back=True, boxes=(), diamonds=(1,), tdias=(),
                     tboxes=())
    assert conditions_for(Fragment("biint", 2, 1), "standard").boxes == (1, 2)
    assert conditions_for(Fragment("int", 0, 0), "standard").clause_names() \
        == ("atoms", "order_forth", "order_back")


def test_conditions_for_tense_flavors():
    for flavor in ("tense", "gpt"):
        c = conditions_for(Fragment("biint", 1, 1, True), flavor)
        assert c.boxes == (1,) and c.diamonds == (1,)
        assert c.tdias == (1,) and c.tboxes == (1,)
    c = conditions_for(Fragment("biint", 1, 0, True), "tense")
    assert c.tdias == (1,) and c.tboxes == ()
    c = conditions_for(Fragment("biint", 0, 1, True), "tense")
    assert c.tdias == () and c.tboxes == (1,)


def test_conditions_for_h():
    c = conditions_for(Fragment("biint", 0, 1, True), "h")
    assert c.clause_names() == (
        "atoms", "order_forth", "order_back", "dual_forth", "dual_back",
        "box1_zig", "box1_zag", "tdia1_zig", "tdia1_zag")


def test_conditions_for_ek_and_fs():
    c = conditions_for(Fragment("int", 2, 0), "ek")
    assert c.boxes == (1, 2) and c.diamonds == ()
    c = conditions_for(Fragment("int", 1, 1), "fs")
    assert c.boxes == (1,) and c.diamonds == ()
    c = conditions_for(Fragment("int", 0, 1), "fs")
    assert c.boxes == (1,)


def test_conditions_for_rejections():
    cases = [
        (Fragment("biint", 1, 0, True), "standard"),
        (Fragment("biint", 1, 1, True), "ek"),
        (Fragment("int", 1, 1), "ek"),
        (Fragment("int", 2, 0), "fs"),
        (Fragment("biint", 1, 1, True), "fs"),
        (Fragment("int", 1, 0), "h"),
        (Fragment("biint", 2, 0), "gpt"),
        (Fragment("biint", 1, 1, True), "nosuch"),
    ]
    for frag, flavor in cases:
        with pytest.raises(FlavorError):
            conditions_for(frag, flavor)


def test_clause_kind():
    assert clause_kind("order_forth") == ("imp", None)
    assert clause_kind("order_back") == ("imp", None)
    assert clause_kind("dual_forth") == ("sub", None)
    assert clause_kind("dual_back") == ("sub", None)
    assert clause_kind("box10_zag") == ("box", 10)
    assert clause_kind("dia3_zig") == ("dia", 3)
    assert clause_kind("tdia2_zig") == ("tdia", 2)
    assert clause_kind("tbox1_zag") == ("tbox", 1)


def test_wedge_refinement():
    fix, trace = greatest_bisimulation(WEDGE, WEDGE_STRICT, BIINT_BOX)
    assert sorted(fix) == [("y", "y"), ("z", "z")]
    assert trace.rounds == 1
    root = trace.by_pair()[("x", "x")]
    assert (root.stage, root.clause, root.side, root.transition) == \
        (1, "box1_zag", "right", ("x", "z"))
    atom_removals = trace.at_stage(0)
    assert all(r.clause == "atoms" for r in atom_removals)
    assert len(atom_removals) == 6


def test_spines_refinement():
    s1, s2 = build_example("spines", (1,)), build_example("spines", (2,))
    fix, trace = greatest_bisimulation(s1, s2, INT_BOX)
    assert sorted(fix) == \
        [("r", "s2_1"), ("s1_1", "s1_1"), ("s1_1", "s2_2")]
    assert trace.rounds == 2
    root = trace.by_pair()[("r", "r")]
    assert (root.stage, root.clause) == (2, "box1_zag")
    assert sorted((r.pair, r.clause) for r in trace.at_stage(1)) == [
        (("r", "s1_1"), "box1_zig"),
        (("r", "s2_2"), "box1_zig"),
        (("s1_1", "r"), "box1_zag"),
        (("s1_1", "s2_1"), "box1_zag"),
    ]


def test_is_bisimulation_reports_both_failures():
    viols = is_bisimulation({("x", "x")}, WEDGE, WEDGE_STRICT, BIINT_BOX)
    assert [(v.clause, v.side, v.transition) for v in viols] == [
        ("box1_zig", "left", ("x", "y")),
        ("box1_zag", "right", ("x", "y")),
    ]
    assert str(viols[0]) == \
        "pair ('x', 'x') fails box1_zig: left transition x -> y has no match"
    assert is_bisimulation(set(), WEDGE, WEDGE_STRICT, BIINT_BOX) == []


def test_is_bisimulation_checks_carriers_and_flavors():
    with pytest.raises(PreconditionError):
        is_bisimulation({("x", "nope")}, WEDGE, WEDGE_STRICT, BIINT_BOX)
    other = Model(["a"], {("a", "a")}, boxes=[set()], flavor="fs")
    with pytest.raises(PreconditionError):
        greatest_bisimulation(WEDGE, other, BIINT_BOX)


def test_fixpoint_is_itself_a_bisimulation():
    fix, _ = greatest_bisimulation(WEDGE, WEDGE_STRICT, BIINT_BOX)
    assert is_bisimulation(fix, WEDGE, WEDGE_STRICT, BIINT_BOX) == []


def test_bisimilarity_partition_merges_twin_spines():
    part = bisimilarity_partition(build_example("spines", (2,)), INT_BOX)
    assert part.blocks() == {
        "r": frozenset({"r"}),
        "s1_1": frozenset({"s1_1", "s2_2"}),
        "s2_1": frozenset({"s2_1"}),
    }


def test_directed_conversion():
    b = frozenset({("y", "y"), ("z", "z")})
    assert directed_conversion(b) == (b, b)
    assert directed_conversion((b, b)) == b
    asym = frozenset({("y", "z")})
    assert directed_conversion((asym, frozenset({("z", "y")}))) == asym
    assert directed_conversion((asym, frozenset())) == frozenset()


ROWS = [
    ("standard", Fragment("biint", 1, 1), dict(n_boxes=1, n_diamonds=1)),
    ("tense", Fragment("biint", 1, 1, True), dict()),
    ("h", Fragment("biint", 1, 1, True), dict()),
    ("ek", Fragment("int", 2, 0), dict(n_boxes=2)),
    ("fs", Fragment("int", 1, 1), dict()),
    ("gpt", Fragment("biint", 1, 1, True), dict()),
]


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 10_000), st.sampled_from(ROWS))
def test_greatest_bisimulation_is_sound_and_staged(seed, row):
    flavor, frag, kw = row
    rng = random.Random(seed)
    m = random_model(rng, flavor, n_states=4, strict=True, **kw)
    m2 = random_model(rng, flavor, n_states=4, strict=True, **kw)
    conds = conditions_for(frag, flavor)
    fix, trace = greatest_bisimulation(m, m2, conds)
    assert is_bisimulation(fix, m, m2, conds) == []
    stages = [r.stage for r in trace.removals]
    assert stages == sorted(stages)
    assert all(r.stage <= trace.rounds for r in trace.removals)
    assert len(fix) + len(trace.removals) == len(m.states) * len(m2.states)


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 10_000))
def test_self_bisimilarity_is_an_equivalence(seed):
    rng = random.Random(seed)
    m = random_model(rng, "standard", n_states=5, n_boxes=1, n_diamonds=1,
                     strict=True)
    conds = conditions_for(Fragment("biint", 1, 1), "standard")
    part = bisimilarity_partition(m, conds)
    assert part.covers(m.states)
    fix, _ = greatest_bisimulation(m, m, conds)
    assert {(s, s) for s in m.states} <= fix
    assert {(b, a) for (a, b) in fix} == fix
