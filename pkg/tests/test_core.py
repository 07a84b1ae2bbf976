"""One-step semantics, membership, classification, determinism."""

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from histra import (
    Accept,
    Assignment,
    Hra,
    Reset,
    Transition,
    ValidationError,
    bounded_determinism_check,
    check_strong_determinism,
    classify,
    make_hra,
    membership,
    permute_word,
    reset_summaries,
    trace,
    validate,
)
from histra.core import eps_closure, initial_config, step
from histra.oracles import random_hra
from histra.zoo import (
    all_distinct_hra,
    anchored_blocks_hra,
    generate_then_consume_hra,
    no_immediate_repeat_register_hra,
    two_tracks_hra,
)


def s(*places):
    return frozenset(places)


# ---------------------------------------------------------------------------
# assignments


def test_assignment_placeset_partition():
    h = Assignment.of(3, {1: [10, 11], 2: [11], 3: []})
    assert h.placeset_of(10) == s(1)
    assert h.placeset_of(11) == s(1, 2)
    assert h.at(s(1)) == frozenset({10})
    assert h.at(s(1, 2)) == frozenset({11})
    assert h.at(s(3)) == frozenset()
    assert h.is_fresh(12) and not h.is_fresh(10)


def test_assignment_at_rejects_empty_set():
    h = Assignment.of(2)
    with pytest.raises(ValueError):
        h.at(frozenset())


def test_fresh_name_is_least_unused():
    h = Assignment.of(1, {1: [0, 1, 3]})
    assert h.fresh_name() == 2


def test_move_name_overwrites_registers_and_adds_to_histories():
    # type (1,1): place 1 history, place 2 register
    h = Assignment.of(2, {1: [5], 2: [6]})
    moved = h.move_name(7, s(1, 2), m=1)
    assert moved.place(1) == frozenset({5, 7})  # history accumulates
    assert moved.place(2) == frozenset({7})  # register overwritten
    assert moved.placeset_of(6) == frozenset()  # evicted name is gone


def test_move_name_removes_from_everywhere_first():
    h = Assignment.of(2, {1: [5], 2: [5]})
    moved = h.move_name(5, s(1), m=2)
    assert moved.placeset_of(5) == s(1)


def test_reset_places_empties_targets_only():
    h = Assignment.of(3, {1: [1], 2: [1, 2], 3: [3]})
    r = h.reset_places(s(2))
    assert r.place(1) == frozenset({1})
    assert r.place(2) == frozenset()
    assert r.place(3) == frozenset({3})


# ---------------------------------------------------------------------------
# validation


def test_validate_collects_bad_place_and_overfull_register():
    a = Hra(
        m=1,
        n=1,
        states=frozenset({"q"}),
        initial="q",
        initial_assignment=Assignment.of(2, {2: [1, 2]}),  # register holds two names
        transitions=frozenset({Transition("q", Accept(s(5), s(1)), "q")}),
        finals=frozenset(),
    )
    with pytest.raises(ValidationError) as err:
        validate(a)
    text = str(err.value)
    assert "place" in text and "register" in text


def test_validate_flags_dangling_transition_endpoint():
    a = Hra(
        m=1,
        n=0,
        states=frozenset({"q"}),
        initial="q",
        initial_assignment=Assignment.of(1),
        transitions=frozenset({Transition("q", Accept(s(), s(1)), "ghost")}),
        finals=frozenset(),
    )
    with pytest.raises(ValidationError):
        validate(a)


# ---------------------------------------------------------------------------
# one-step semantics


def test_step_requires_exact_placeset():
    a = two_tracks_hra()
    q0 = a.initial
    h = a.initial_assignment.move_name(9, s(1), m=2)
    # the (∅,{1}) transition from q0 must not fire on a name already in 1
    assert not step(a, (q0, h), 9)
    # but it fires on a fresh one
    assert step(a, (q0, h), 10)


def test_eps_closure_includes_reset_chains():
    a = generate_then_consume_hra()
    closure = eps_closure(a, {initial_config(a)})
    assert len(closure) == 2  # both states reachable before any letter


def test_membership_epsilon_word():
    import dataclasses

    assert membership(generate_then_consume_hra(), ())
    stripped = dataclasses.replace(all_distinct_hra(), finals=frozenset())
    assert not membership(stripped, ())


def test_trace_returns_accepting_path():
    a = generate_then_consume_hra()
    steps = trace(a, (3, 4, 4, 3))
    assert steps is not None
    letters = [st.letter for st in steps if st.letter is not None]
    assert letters == [3, 4, 4, 3]
    assert steps[-1].transition.dst in a.finals or steps[-1].transition.dst is not None


def test_trace_none_for_rejected_word():
    assert trace(all_distinct_hra(), (1, 1)) is None


# ---------------------------------------------------------------------------
# classification


def test_classify_flags():
    flags = classify(anchored_blocks_hra())
    assert flags.unary and not flags.non_reset
    flags = classify(two_tracks_hra())
    assert not flags.unary and flags.non_reset
    flags = classify(no_immediate_repeat_register_hra())
    assert flags.ra and flags.non_reset and not flags.unary


def test_empty_reset_does_not_spoil_non_reset():
    assert classify(generate_then_consume_hra()).non_reset


def test_reset_summaries_fixpoint():
    a = anchored_blocks_hra()
    rr = reset_summaries(a)
    # q1 --RST{1}--> q0, so q1 reaches q0 with reset set {1}
    assert (s(1), "q0") in rr["q1"]
    assert (s(), "q1") in rr["q1"]


# ---------------------------------------------------------------------------
# strong determinism


def test_strong_determinism_of_deterministic_automaton():
    assert check_strong_determinism(all_distinct_hra())


def test_strong_determinism_rejects_double_edge():
    a = make_hra(
        1,
        0,
        states=["q", "r", "t"],
        initial="q",
        transitions=[
            ("q", Accept(s(), s(1)), "r"),
            ("q", Accept(s(), s()), "t"),
        ],
        finals=["r"],
    )
    assert not check_strong_determinism(a)
    ok, witness = bounded_determinism_check(a, 3)
    assert not ok and witness is not None


def test_bounded_determinism_agrees_on_zoo():
    for a in (all_distinct_hra(), two_tracks_hra(), generate_then_consume_hra()):
        ok, _ = bounded_determinism_check(a, 4)
        assert ok == check_strong_determinism(a)


# ---------------------------------------------------------------------------
# equivariance: membership only sees equality patterns


@settings(max_examples=60, deadline=None)
@given(
    seed=st.integers(0, 10_000),
    word=st.lists(st.integers(0, 4), max_size=6),
    swap=st.tuples(st.integers(0, 4), st.integers(0, 4)),
)
def test_membership_invariant_under_initial_fixing_permutations(seed, word, swap):
    a = random_hra(seed, max_m=2, max_n=1, max_states=3)
    fixed = a.initial_assignment.names()
    x, y = swap
    if x in fixed or y in fixed:
        return
    perm = {x: y, y: x}
    w = tuple(word)
    assert membership(a, w) == membership(a, permute_word(w, perm))
