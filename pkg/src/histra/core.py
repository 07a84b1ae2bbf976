"""History-register automata: data model and exact operational semantics.

An automaton of type (m, n) owns m history places and n register places,
numbered 1..m+n with histories first.  Histories hold arbitrary finite sets
of names, registers hold at most one name.  A transition either accepts a
letter -- consuming a name whose current place-set is exactly the label's
first component and re-placing it at the second component -- or resets a
set of places to empty without consuming input.

Names are plain ints; words are sequences of ints.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from itertools import chain, combinations
from typing import Hashable, Iterable, Mapping, Optional, Sequence

from .errors import (
    BadPlaceIndex,
    DanglingState,
    RegisterOverfull,
    ValidationError,
)

Name = int
State = Hashable
Word = tuple[Name, ...]


# ---------------------------------------------------------------------------
# labels and transitions


@dataclass(frozen=True)
class Accept:
    """Letter label: consume a name placed at exactly `pre`, move it to exactly `post`."""

    pre: frozenset[int]
    post: frozenset[int]

    def __repr__(self) -> str:
        return f"Acc({_fmt(self.pre)}->{_fmt(self.post)})"


@dataclass(frozen=True)
class Reset:
    """Silent label: empty every place in `targets`."""

    targets: frozenset[int]

    def __repr__(self) -> str:
        return f"Rst({_fmt(self.targets)})"


Label = Accept | Reset


def _fmt(places: frozenset[int]) -> str:
    return "{" + ",".join(map(str, sorted(places))) + "}" if places else "{}"


@dataclass(frozen=True)
class Transition:
    src: State
    label: Label
    dst: State

    def __repr__(self) -> str:
        return f"({self.src!r} {self.label!r} {self.dst!r})"


# ---------------------------------------------------------------------------
# assignments


@dataclass(frozen=True)
class Assignment:
    """Contents of all places; index i-1 holds place i."""

    contents: tuple[frozenset[Name], ...]

    @staticmethod
    def of(size: int, filled: Mapping[int, Iterable[Name]] | None = None) -> "Assignment":
        """Build an assignment over `size` places, empty except for `filled` (1-based)."""
        slots = [frozenset()] * size
        for place, names in (filled or {}).items():
            slots[place - 1] = frozenset(names)
        return Assignment(tuple(slots))

    def place(self, i: int) -> frozenset[Name]:
        return self.contents[i - 1]

    def names(self) -> frozenset[Name]:
        return frozenset(chain.from_iterable(self.contents))

    def placeset_of(self, a: Name) -> frozenset[int]:
        """The set of places currently holding `a` (empty means fresh)."""
        return frozenset(i + 1 for i, s in enumerate(self.contents) if a in s)

    def at(self, x: frozenset[int] | Iterable[int]) -> frozenset[Name]:
        """Names lying in every place of `x` and nowhere else.

        `x` must be non-empty; the x = {} case is the freshness predicate,
        available as is_fresh / fresh_name.
        """
        x = frozenset(x)
        if not x:
            raise ValueError("at() needs a non-empty place-set; use is_fresh for freshness")
        inside = frozenset.intersection(*(self.contents[i - 1] for i in x))
        outside = frozenset(
            chain.from_iterable(s for i, s in enumerate(self.contents) if i + 1 not in x)
        )
        return inside - outside

    def is_fresh(self, a: Name) -> bool:
        return all(a not in s for s in self.contents)

    def fresh_name(self) -> Name:
        """Least natural not occurring anywhere in the assignment."""
        used = self.names()
        a = 0
        while a in used:
            a += 1
        return a

    def move_name(self, a: Name, post: frozenset[int], m: int) -> "Assignment":
        """Remove `a` everywhere, then insert it at exactly `post`.

        Insertion adds `a` to history places (index <= m) and overwrites
        register places (index > m) to hold just `a`.
        """
        slots = list(s - {a} for s in self.contents)
        for i in post:
            slots[i - 1] = (slots[i - 1] | {a}) if i <= m else frozenset({a})
        return Assignment(tuple(slots))

    def reset_places(self, targets: frozenset[int]) -> "Assignment":
        slots = list(self.contents)
        for i in targets:
            slots[i - 1] = frozenset()
        return Assignment(tuple(slots))

    def __repr__(self) -> str:
        parts = []
        for i, s in enumerate(self.contents):
            if s:
                parts.append(f"{i + 1}:{{{','.join(map(str, sorted(s)))}}}")
        return "H[" + " ".join(parts) + "]"


Configuration = tuple[State, Assignment]


# ---------------------------------------------------------------------------
# automata


@dataclass(frozen=True)
class Hra:
    m: int
    n: int
    states: frozenset[State]
    initial: State
    initial_assignment: Assignment
    transitions: frozenset[Transition]
    finals: frozenset[State]

    @property
    def places(self) -> range:
        return range(1, self.m + self.n + 1)

    def is_register(self, i: int) -> bool:
        return i > self.m

    @property
    def history_places(self) -> frozenset[int]:
        return frozenset(range(1, self.m + 1))

    @property
    def register_places(self) -> frozenset[int]:
        return frozenset(range(self.m + 1, self.m + self.n + 1))


def make_hra(
    m: int,
    n: int,
    states: Iterable[State],
    initial: State,
    transitions: Iterable[tuple[State, Label, State]],
    finals: Iterable[State],
    initial_contents: Mapping[int, Iterable[Name]] | None = None,
) -> Hra:
    """Convenience constructor taking plain tuples for transitions."""
    return Hra(
        m=m,
        n=n,
        states=frozenset(states),
        initial=initial,
        initial_assignment=Assignment.of(m + n, initial_contents),
        transitions=frozenset(Transition(s, lab, d) for s, lab, d in transitions),
        finals=frozenset(finals),
    )


def initial_config(a: Hra) -> Configuration:
    return (a.initial, a.initial_assignment)


def validate(a: Hra) -> None:
    """Check structural well-formedness; raise ValidationError listing every violation."""
    bad = []
    size = a.m + a.n
    if size < 1 or a.m < 0 or a.n < 0:
        bad.append(BadPlaceIndex(f"type ({a.m},{a.n}) has no places"))
    if len(a.initial_assignment.contents) != size:
        bad.append(BadPlaceIndex(
            f"initial assignment covers {len(a.initial_assignment.contents)} places, expected {size}"))
    else:
        for i in range(a.m + 1, size + 1):
            if len(a.initial_assignment.place(i)) > 1:
                bad.append(RegisterOverfull(f"register place {i} holds more than one name"))
    if a.initial not in a.states:
        bad.append(DanglingState(f"initial state {a.initial!r} not in state set"))
    for q in a.finals:
        if q not in a.states:
            bad.append(DanglingState(f"final state {q!r} not in state set"))
    for t in a.transitions:
        if t.src not in a.states:
            bad.append(DanglingState(f"transition source {t.src!r} not in state set"))
        if t.dst not in a.states:
            bad.append(DanglingState(f"transition target {t.dst!r} not in state set"))
        sets = (t.label.targets,) if isinstance(t.label, Reset) else (t.label.pre, t.label.post)
        for s in sets:
            for i in s:
                if not 1 <= i <= size:
                    bad.append(BadPlaceIndex(f"place {i} out of range in {t!r}"))
    if bad:
        raise ValidationError(bad)


# ---------------------------------------------------------------------------
# operational semantics


def _by_src(a: Hra) -> dict[State, list[Transition]]:
    adj: dict[State, list[Transition]] = {q: [] for q in a.states}
    for t in a.transitions:
        adj[t.src].append(t)
    return adj


def step(a: Hra, config: Configuration, letter: Name) -> frozenset[Configuration]:
    """All single-letter successors of `config` (no silent moves)."""
    q, h = config
    out = set()
    for t in a.transitions:
        if t.src == q and isinstance(t.label, Accept) and h.placeset_of(letter) == t.label.pre:
            out.add((t.dst, h.move_name(letter, t.label.post, a.m)))
    return frozenset(out)


def eps_closure(a: Hra, configs: Iterable[Configuration]) -> frozenset[Configuration]:
    """Close a configuration set under reset (silent) transitions."""
    seen = set(configs)
    work = deque(seen)
    adj = _by_src(a)
    while work:
        q, h = work.popleft()
        for t in adj[q]:
            if isinstance(t.label, Reset):
                nxt = (t.dst, h.reset_places(t.label.targets))
                if nxt not in seen:
                    seen.add(nxt)
                    work.append(nxt)
    return frozenset(seen)


def membership(a: Hra, word: Sequence[Name]) -> bool:
    frontier = eps_closure(a, {initial_config(a)})
    for letter in word:
        nxt = set()
        for c in frontier:
            nxt.update(step(a, c, letter))
        if not nxt:
            return False
        frontier = eps_closure(a, nxt)
    return any(q in a.finals for q, _ in frontier)


@dataclass(frozen=True)
class TraceStep:
    """One move of a run: `letter` is None for silent reset steps."""

    transition: Transition
    letter: Optional[Name]
    config: Configuration


def trace(a: Hra, word: Sequence[Name]) -> Optional[tuple[TraceStep, ...]]:
    """An accepting run over `word`, or None.

    membership(a, w) is true exactly when this returns a run.
    """
    word = tuple(word)
    adj = _by_src(a)
    start = (initial_config(a), 0)
    parents: dict = {start: None}
    work = deque([start])
    goal = None
    while work:
        node = work.popleft()
        (q, h), k = node
        if k == len(word) and q in a.finals:
            goal = node
            break
        for t in adj[q]:
            if isinstance(t.label, Reset):
                nxt = ((t.dst, h.reset_places(t.label.targets)), k)
                if nxt not in parents:
                    parents[nxt] = (node, t, None)
                    work.append(nxt)
            elif k < len(word) and h.placeset_of(word[k]) == t.label.pre:
                nxt = ((t.dst, h.move_name(word[k], t.label.post, a.m)), k + 1)
                if nxt not in parents:
                    parents[nxt] = (node, t, word[k])
                    work.append(nxt)
    if goal is None:
        return None
    steps = []
    node = goal
    while parents[node] is not None:
        prev, t, letter = parents[node]
        steps.append(TraceStep(t, letter, node[0]))
        node = prev
    return tuple(reversed(steps))


# ---------------------------------------------------------------------------
# subclass recognition


@dataclass(frozen=True)
class SubclassFlags:
    unary: bool
    non_reset: bool
    ra: bool
    fra: bool


def classify(a: Hra) -> SubclassFlags:
    """Syntactic subclass membership.

    A Reset with empty target set consumes nothing and clears nothing, so it
    does not count against the reset-free classes.
    """
    real_resets = [t for t in a.transitions
                   if isinstance(t.label, Reset) and t.label.targets]
    non_reset = not real_resets
    unary = a.m == 1
    ra = a.m == 0 and non_reset
    fra = unary and non_reset and _fra_shape(a)
    return SubclassFlags(unary=unary, non_reset=non_reset, ra=ra, fra=fra)


def _fra_shape(a: Hra) -> bool:
    h0 = a.initial_assignment
    if h0.place(1) != h0.names():
        return False
    accepts = [t for t in a.transitions if isinstance(t.label, Accept)]
    for t in accepts:
        if 1 not in t.label.post:
            return False
        if t.label.pre == frozenset({1}):
            twin = Transition(t.src, Accept(frozenset(), t.label.post), t.dst)
            if twin not in a.transitions:
                return False
    return True


# ---------------------------------------------------------------------------
# determinism


def reset_summaries(a: Hra) -> dict[State, frozenset[tuple[frozenset[int], State]]]:
    """For each state q, all pairs (Y, p) with q reaching p through resets
    whose targets union to Y (includes (empty, q))."""
    reset_adj: dict[State, list[Transition]] = {q: [] for q in a.states}
    for t in a.transitions:
        if isinstance(t.label, Reset):
            reset_adj[t.src].append(t)
    out = {}
    for q in a.states:
        seen = {(frozenset(), q)}
        work = deque(seen)
        while work:
            y, p = work.popleft()
            for t in reset_adj[p]:
                item = (y | t.label.targets, t.dst)
                if item not in seen:
                    seen.add(item)
                    work.append(item)
        out[q] = frozenset(seen)
    return out


def _powerset(places: Iterable[int]):
    items = sorted(places)
    for r in range(len(items) + 1):
        yield from (frozenset(c) for c in combinations(items, r))


def check_strong_determinism(a: Hra) -> bool:
    """At most one reset-then-accept compound can match any (state, place-set)."""
    summaries = reset_summaries(a)
    accept_adj: dict[State, list[Transition]] = {q: [] for q in a.states}
    for t in a.transitions:
        if isinstance(t.label, Accept):
            accept_adj[t.src].append(t)
    all_places = frozenset(a.places)
    for q in a.states:
        matches: dict[frozenset[int], set] = {}
        for y, p in summaries[q]:
            for t in accept_adj[p]:
                x0 = t.label.pre
                if x0 & y:
                    continue
                # compounds fire on names placed at x0 together with any part of y
                for s in _powerset(y):
                    x = x0 | s
                    if x <= all_places:
                        matches.setdefault(x, set()).add((t.dst, y, t.label.post))
        if any(len(v) > 1 for v in matches.values()):
            return False
    return True


def bounded_determinism_check(
    a: Hra, depth: int
) -> tuple[bool, Optional[tuple[Configuration, Name, tuple[Configuration, ...]]]]:
    """Search configurations reachable within `depth` letters for a state,
    letter pair admitting two distinct silent-then-letter successors.

    Names are drawn from the initial assignment plus `depth` canonical fresh
    ones, which suffices up to renaming.
    """
    base = sorted(a.initial_assignment.names())
    fresh, k = [], 0
    while len(fresh) < depth:
        if k not in a.initial_assignment.names():
            fresh.append(k)
        k += 1
    supply = base + fresh

    closure_cache: dict[Configuration, frozenset[Configuration]] = {}

    def closure(c: Configuration) -> frozenset[Configuration]:
        if c not in closure_cache:
            closure_cache[c] = eps_closure(a, {c})
        return closure_cache[c]

    seen = set()
    work = deque([(initial_config(a), 0)])
    while work:
        c, used = work.popleft()
        if c in seen:
            continue
        seen.add(c)
        for letter in supply:
            succs = set()
            for c2 in closure(c):
                succs.update(step(a, c2, letter))
            if len(succs) > 1:
                return False, (c, letter, tuple(sorted(succs, key=repr)))
            if used < depth:
                for s in succs:
                    if s not in seen:
                        work.append((s, used + 1))
        # silent successors are reachable configurations in their own right
        for c2 in closure(c):
            if c2 not in seen:
                work.append((c2, used))
    return True, None


# ---------------------------------------------------------------------------
# words under renaming


def permute_word(word: Sequence[Name], perm: Mapping[Name, Name]) -> Word:
    """Apply a (finite-support) name permutation letter-wise."""
    return tuple(perm.get(x, x) for x in word)
