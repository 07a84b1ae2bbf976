"""A small collection of concrete automata used throughout the tests.

Each builder is named for the language it accepts.  They double as
documentation of the label algebra: place-set pairs on accepts, target
sets on resets.
"""

from __future__ import annotations

from .core import Accept, Hra, Reset, make_hra

E = frozenset()


def _s(*places: int) -> frozenset[int]:
    return frozenset(places)


def all_distinct_hra() -> Hra:
    """Words whose letters are pairwise distinct.  Type (1,0)."""
    return make_hra(
        1, 0,
        states=["q0"],
        initial="q0",
        transitions=[("q0", Accept(E, _s(1)), "q0")],
        finals=["q0"],
    )


def generate_then_consume_hra() -> Hra:
    """A distinct block followed by a sub-multiset of it, also distinct.

    Type (1,0): fresh names are banked in the history, then a silent reset-free
    bridge flips to a phase that withdraws banked names one by one.
    """
    return make_hra(
        1, 0,
        states=["q0", "q1"],
        initial="q0",
        transitions=[
            ("q0", Accept(E, _s(1)), "q0"),
            ("q0", Reset(E), "q1"),
            ("q1", Accept(_s(1), E), "q1"),
        ],
        finals=["q0", "q1"],
    )


def anchored_blocks_hra(anchor: int = 0) -> Hra:
    """Blocks of pairwise-distinct names, each opened by the `anchor` letter.

    Type (1,1): the anchor lives in the register permanently; the history
    collects the current block and is reset at each block boundary.
    """
    return make_hra(
        1, 1,
        states=["q0", "q1"],
        initial="q0",
        transitions=[
            ("q0", Accept(_s(2), _s(2)), "q1"),
            ("q1", Accept(E, _s(1)), "q1"),
            ("q1", Reset(_s(1)), "q0"),
        ],
        finals=["q0"],
        initial_contents={2: [anchor]},
    )


def two_tracks_hra() -> Hra:
    """Even-length words where odd positions are pairwise distinct and so are
    even positions.  Type (2,0), one history per track."""
    return make_hra(
        2, 0,
        states=["q0", "q1"],
        initial="q0",
        transitions=[
            ("q0", Accept(E, _s(1)), "q1"),
            ("q0", Accept(_s(2), _s(1, 2)), "q1"),
            ("q1", Accept(E, _s(2)), "q0"),
            ("q1", Accept(_s(1), _s(1, 2)), "q0"),
        ],
        finals=["q0"],
    )


def not_all_twice_hra() -> Hra:
    """Non-empty words in which NOT every name occurs exactly twice.

    Type (2,0).  History 1 absorbs noise; history 2 pins one witness name
    whose occurrence count is 1, or 3 and beyond.
    """
    absorb = [
        (q, lab, q)
        for q in ["q0", "q1", "q2"]
        for lab in [Accept(E, _s(1)), Accept(_s(1), _s(1))]
    ]
    everything = [
        ("q3", Accept(x, y), "q3")
        for x in [E, _s(1), _s(2)]
        for y in [E, _s(1), _s(2)]
    ]
    return make_hra(
        2, 0,
        states=["q0", "q1", "q2", "q3"],
        initial="q0",
        transitions=absorb + everything + [
            ("q0", Accept(E, _s(2)), "q1"),
            ("q1", Accept(_s(2), _s(2)), "q2"),
            ("q2", Accept(_s(2), _s(2)), "q3"),
        ],
        finals=["q1", "q3"],
    )


def no_immediate_repeat_register_hra() -> Hra:
    """No two consecutive letters equal.  Type (0,1): the register remembers
    only the previous letter."""
    return make_hra(
        0, 1,
        states=["q0"],
        initial="q0",
        transitions=[("q0", Accept(E, _s(1)), "q0")],
        finals=["q0"],
    )


def no_immediate_repeat_history_hra() -> Hra:
    """No two consecutive letters equal, re-expressed with two histories that
    take turns holding the previous letter.  Type (2,0)."""
    return make_hra(
        2, 0,
        states=["q0", "q1"],
        initial="q0",
        transitions=[
            ("q0", Accept(E, _s(2)), "q1"),
            ("q0", Accept(_s(2), _s(2)), "q1"),
            ("q1", Accept(E, _s(1)), "q0"),
            ("q1", Accept(_s(1), _s(1)), "q0"),
            ("q0", Accept(E, _s(1)), "q0"),
            ("q0", Accept(_s(2), _s(1)), "q0"),
            ("q1", Accept(E, _s(2)), "q1"),
            ("q1", Accept(_s(1), _s(2)), "q1"),
        ],
        finals=["q0", "q1"],
    )


def alternating_pair_hras() -> tuple[Hra, Hra]:
    """Two (1,0) automata whose intersection is the two-track language.

    The first constrains odd positions, the second even positions.
    """
    a1 = make_hra(
        1, 0,
        states=["p0", "p1"],
        initial="p0",
        transitions=[
            ("p0", Accept(E, _s(1)), "p1"),
            ("p1", Accept(E, E), "p0"),
            ("p1", Accept(_s(1), _s(1)), "p0"),
        ],
        finals=["p0"],
    )
    a2 = make_hra(
        1, 0,
        states=["r0", "r1"],
        initial="r0",
        transitions=[
            ("r0", Accept(E, E), "r1"),
            ("r0", Accept(_s(1), _s(1)), "r1"),
            ("r1", Accept(E, _s(1)), "r0"),
        ],
        finals=["r0"],
    )
    return a1, a2


def anchored_distinct_hra(anchor: int = 0) -> Hra:
    """Non-empty all-distinct words starting with the `anchor` letter.

    Type (1,1); the star of this language is the anchored-blocks language.
    """
    return make_hra(
        1, 1,
        states=["s", "t"],
        initial="s",
        transitions=[
            ("s", Accept(_s(2), _s(2)), "t"),
            ("t", Accept(E, _s(1)), "t"),
        ],
        finals=["t"],
        initial_contents={2: [anchor]},
    )


def two_step_distinct_hra() -> Hra:
    """All-distinct words of length at most two.  Type (1,0)."""
    return make_hra(
        1, 0,
        states=["c0", "c1", "c2"],
        initial="c0",
        transitions=[
            ("c0", Accept(E, _s(1)), "c1"),
            ("c1", Accept(E, _s(1)), "c2"),
        ],
        finals=["c0", "c1", "c2"],
    )
