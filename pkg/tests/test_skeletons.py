"""Skeleton abstraction: canonical forms, enumeration counts, and the
commuting squares against concrete representative assignments."""

import math
import random

import pytest

from histra import Assignment, NoWitness, Skeleton
from histra.skeletons import (
    enumerate_skeletons,
    skel_at,
    skel_move,
    skel_reset,
    skeleton_of,
)


def s(*xs):
    return frozenset(xs)


# ---------------------------------------------------------------------------
# abstraction and canonical form


def test_skeleton_of_register_partition():
    # type (1,4): one history, four registers (places 2..5)
    h1 = Assignment.of(5, {1: [7], 2: [5], 3: [], 4: [7], 5: [5]})
    h2 = Assignment.of(5, {1: [7, 1, 2], 2: [5], 3: [], 4: [7], 5: [5]})
    expected = Skeleton(1, 4, (s(2), s(1), s(), s(2), s(1)))
    assert skeleton_of(h1, 1, 4) == expected
    assert skeleton_of(h2, 1, 4) == expected  # extra history-only names invisible


def test_worked_example_counter_values():
    h1 = Assignment.of(5, {1: [7], 2: [5], 3: [], 4: [7], 5: [5]})
    h2 = Assignment.of(5, {1: [7, 1, 2], 2: [5], 3: [], 4: [7], 5: [5]})
    assert len(h1.at(s(1))) == 0
    assert len(h2.at(s(1))) == 2


def test_history_only_names_are_anonymous():
    h = Assignment.of(3, {1: [1, 2], 2: [], 3: []})
    sk = skeleton_of(h, 1, 2)
    assert sk.classes() == frozenset()


def test_class_ids_canonical_by_first_register_occurrence():
    # same partition written with different concrete names must collide
    ha = Assignment.of(2, {1: [10], 2: [20]})
    hb = Assignment.of(2, {1: [99], 2: [3]})
    assert skeleton_of(ha, 0, 2) == skeleton_of(hb, 0, 2)


# ---------------------------------------------------------------------------
# lookup and moves


def test_skel_at_matches_exact_placeset():
    sk = Skeleton(1, 2, (s(1), s(1), s()))
    assert skel_at(sk, s(1, 2)) == frozenset({1})
    assert skel_at(sk, s(2)) == frozenset()
    assert skel_at(sk, s()) == frozenset({0})  # fresh marker


def test_skel_move_unknown_class_raises():
    sk = Skeleton(1, 1, (s(), s()))
    with pytest.raises(NoWitness):
        skel_move(sk, 3, s(1))


def test_skel_move_eviction():
    # class 1 sits in both the history and the register of a (1,1) type
    sk = Skeleton(1, 1, (s(1), s(1)))
    out = skel_move(sk, 0, s(2))  # fresh name overwrites the register
    # the evicted class keeps only its history cell, so it drops out of the
    # skeleton entirely (history-only names are anonymous)
    assert out == Skeleton(1, 1, (s(), s(1)))


def test_skel_move_symmetric_eviction_is_invisible():
    # overwriting the lone occupant of a register with a fresh name lands in
    # the same canonical shape: skeletons cannot tell renamed twins apart
    sk = Skeleton(0, 2, (s(1), s(2)))
    assert skel_move(sk, 0, s(1)) == sk


def test_skel_reset_clears_cells():
    sk = Skeleton(1, 2, (s(1), s(1), s(2)))
    out = skel_reset(sk, s(2))
    # class 1 survives in the history; register class renumbering is canonical
    assert out.place(2) == frozenset()
    assert out.classes() == frozenset({1})


# ---------------------------------------------------------------------------
# enumeration


@pytest.mark.parametrize("m", [0, 1, 2, 3])
def test_history_only_types_have_single_skeleton(m):
    assert len(list(enumerate_skeletons(m, 0))) == 1


def test_enumeration_counts_for_small_types():
    assert len(list(enumerate_skeletons(1, 1))) == 3
    assert len(list(enumerate_skeletons(0, 2))) == 5


def test_enumeration_is_duplicate_free_and_canonical():
    for m, n in [(0, 2), (1, 1), (1, 2), (2, 1)]:
        sks = list(enumerate_skeletons(m, n))
        assert len(sks) == len(set(sks))
        for sk in sks:
            # re-canonicalizing through a representative is the identity
            assert skeleton_of(_representative(sk), m, n) == sk


def test_enumeration_within_exponential_bound():
    for m in range(4):
        for n in range(4):
            got = len(list(enumerate_skeletons(m, n)))
            bound = 2 ** (m * n + n * (math.log2(n) if n else 0) + 1)
            assert got <= bound, (m, n, got, bound)


# ---------------------------------------------------------------------------
# commuting squares: abstract op after abstraction == abstraction after
# concrete op, checked on randomized representative assignments


def _representative(sk: Skeleton) -> Assignment:
    """A concrete assignment whose skeleton is `sk` (class j -> name 100+j)."""
    contents: dict[int, set[int]] = {}
    for i in range(1, sk.m + sk.n + 1):
        contents[i] = {100 + j for j in sk.place(i)}
    return Assignment.of(sk.m + sk.n, contents)


def _random_case(rng: random.Random):
    m = rng.randint(0, 2)
    n = rng.randint(1, 2)
    sks = list(enumerate_skeletons(m, n))
    sk = rng.choice(sks)
    h = _representative(sk)
    # sprinkle anonymous history-only names; the skeleton must not see them
    for name in range(rng.randint(0, 2)):
        if m:
            h = h.move_name(200 + name, s(rng.randint(1, m)), m)
    return m, n, sk, h


def test_move_square_200_randomized_cases():
    rng = random.Random(4242)
    for _ in range(200):
        m, n, sk, h = _random_case(rng)
        classes = sorted(sk.classes())
        j = rng.choice([0] + classes)
        name = 100 + j if j else h.fresh_name()
        post = frozenset(
            p for p in range(1, m + n + 1) if rng.random() < 0.4
        )
        assert skeleton_of(h.move_name(name, post, m), m, n) == skel_move(sk, j, post)


def test_reset_square_200_randomized_cases():
    rng = random.Random(2424)
    for _ in range(200):
        m, n, sk, h = _random_case(rng)
        targets = frozenset(p for p in range(1, m + n + 1) if rng.random() < 0.4)
        assert skeleton_of(h.reset_places(targets), m, n) == skel_reset(sk, targets)
