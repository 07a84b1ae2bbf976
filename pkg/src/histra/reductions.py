"""Translations between automata and counter machines, and the emptiness
orchestrator that picks a decision engine per input.

The common shape: a place-set X ⊆ histories corresponds to a counter whose
value tracks how many names sit at exactly X; register structure, being
finite, is folded into the control state as a skeleton.
"""

from __future__ import annotations

import math
from collections import deque
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from itertools import combinations, count
from typing import Iterable, Optional

from .constructions import StateTag
from .core import Accept, Assignment, Hra, Reset, State, Transition, classify
from .counters import (
    Add,
    CounterConfig,
    CounterMachine,
    ResetDim,
    Transfer,
    backward_coverability,
    one_dim_rvass_reachability,
)
from .errors import (
    NonUnitEffect,
    NotUnary,
    RegistersPresent,
    ResetsPresent,
    RestrictionViolated,
    ScopeViolation,
    TransfersOrResetsPresent,
)
from .skeletons import Skeleton, skel_at, skel_move, skel_reset, skeleton_of


# ---------------------------------------------------------------------------
# dimension bookkeeping


@dataclass(frozen=True)
class DimensionMap:
    """Which place-set each counter dimension stands for."""

    placesets: tuple[frozenset[int], ...]
    garbage: Optional[int] = None  # 1-based dimension for the ∅ bucket

    def dim_of(self, x: frozenset[int]) -> int:
        return self.placesets.index(x) + 1

    def unit(self, x: frozenset[int], sign: int) -> Add:
        v = [0] * len(self.placesets)
        v[self.dim_of(x) - 1] = sign
        return Add(tuple(v))

    def zero(self) -> Add:
        return Add((0,) * len(self.placesets))


@dataclass(frozen=True)
class CounterReduction:
    machine: CounterMachine
    init: CounterConfig
    targets: frozenset[State]
    dimension_map: DimensionMap

    @property
    def target(self) -> State:
        if len(self.targets) != 1:
            raise ValueError("reduction has several targets")
        return next(iter(self.targets))


def _sorted_subsets(places: Iterable[int], include_empty: bool) -> list[frozenset[int]]:
    pool = sorted(places)
    out = []
    for r in range(0 if include_empty else 1, len(pool) + 1):
        out.extend(frozenset(c) for c in combinations(pool, r))
    return out


def _initial_counts(h0: Assignment, placesets) -> tuple[int, ...]:
    groups: dict[frozenset[int], int] = {}
    for a in h0.names():
        ps = h0.placeset_of(a)
        groups[ps] = groups.get(ps, 0) + 1
    return tuple(groups.get(x, 0) for x in placesets)


# ---------------------------------------------------------------------------
# full emptiness: history automata to transfer machines


def hra_to_trvass(a: Hra) -> CounterReduction:
    """One counter per subset of histories (the empty one collects garbage);
    letters move a unit of count, resets pour counters between subsets."""
    if a.n > 0:
        raise RegistersPresent("translation expects a history-only automaton")
    m = a.m
    placesets = _sorted_subsets(range(1, m + 1), include_empty=False) + [frozenset()]
    dmap = DimensionMap(tuple(placesets), garbage=len(placesets))
    transitions: list[tuple[State, object, State]] = []
    for t in sorted(a.transitions, key=repr):
        if isinstance(t.label, Accept):
            x, x2 = t.label.pre, t.label.post
            steps = []
            if x:
                steps.append(dmap.unit(x, -1))
            if x2:
                steps.append(dmap.unit(x2, +1))
            if not steps:
                steps = [dmap.zero()]
            _chain(transitions, t.src, t.dst, steps, ("acc", t))
        else:
            x = t.label.targets
            movers = [ps for ps in placesets if ps and ps & x]
            steps = [
                Transfer(dmap.dim_of(ps), dmap.dim_of(ps - x)) for ps in movers
            ]
            if not steps:
                steps = [dmap.zero()]
            _chain(transitions, t.src, t.dst, steps, ("rst", t))
    goal = StateTag("target", ())
    for q in sorted(a.finals, key=repr):
        transitions.append((q, dmap.zero(), goal))
    states = {goal} | {s for s, _, _ in transitions} | {d for _, _, d in transitions} | set(a.states)
    mc = CounterMachine.make(len(placesets), states, transitions)
    init = (a.initial, _initial_counts(a.initial_assignment, placesets))
    return CounterReduction(mc, init, frozenset({goal}), dmap)


def _chain(transitions: list, src: State, dst: State, effects: list, tag) -> None:
    """Append a linear sequence of effect edges through fresh midpoints."""
    cur = src
    for i, eff in enumerate(effects):
        nxt = dst if i == len(effects) - 1 else StateTag("mid", (tag, i))
        transitions.append((cur, eff, nxt))
        cur = nxt


# ---------------------------------------------------------------------------
# converse: unit-effect reset machines back to automata


def _neigh(i: int, m: int) -> frozenset[int]:
    prev = (i - 2) % m + 1
    nxt = i % m + 1
    return frozenset({prev, i, nxt})


def rvass_to_hra(mc: CounterMachine, init: CounterConfig, target_state: State) -> Hra:
    """Encode counter i as the number of names sitting in exactly history i.

    Each dimension also keeps a persistent code name spread over the
    three-place neighborhood {i-1, i, i+1} (cyclically), which a reset
    consumes and rebuilds while wiping the counter names.  Machines are
    padded with inert dimensions: to at least 3 so the neighborhoods exist,
    and to 4 when some state carries resets on two distinct dimensions
    (with only 3, those neighborhoods collide and determinism would break).
    """
    for t in mc.transitions:
        if isinstance(t.effect, Transfer):
            raise NonUnitEffect("transfers cannot be encoded")
        if isinstance(t.effect, Add):
            nz = [x for x in t.effect.vector if x]
            if len(nz) > 1 or any(abs(x) > 1 for x in nz):
                raise NonUnitEffect(f"{t.effect!r} touches more than one unit")
    by_state_resets: dict[State, set[int]] = {}
    for t in mc.transitions:
        if isinstance(t.effect, ResetDim):
            by_state_resets.setdefault(t.src, set()).add(t.effect.dim)
    multi = any(len(d) >= 2 for d in by_state_resets.values())
    m = max(mc.dims, 4 if multi else 3)

    q0, v0 = init
    if len(v0) != mc.dims:
        raise NonUnitEffect(f"initial vector arity {len(v0)} != {mc.dims}")

    transitions: list[tuple[State, object, State]] = []
    states: set[State] = set(mc.states)
    serial = count()
    for t in sorted(mc.transitions, key=repr):
        if isinstance(t.effect, Add):
            nz = [(i + 1, x) for i, x in enumerate(t.effect.vector) if x]
            if not nz:
                transitions.append((t.src, Reset(frozenset()), t.dst))
            else:
                d, sign = nz[0]
                lab = Accept(frozenset(), frozenset({d})) if sign > 0 else Accept(
                    frozenset({d}), frozenset()
                )
                transitions.append((t.src, lab, t.dst))
        else:
            i = t.effect.dim
            hops = [_neigh((i - 2) % m + 1, m), _neigh(i, m), _neigh(i % m + 1, m)]
            cur: State = t.src
            chain_id = next(serial)
            mid = StateTag("mid", ("reset", chain_id, 0))
            states.add(mid)
            transitions.append((cur, Reset(frozenset({i})), mid))
            cur = mid
            for step, nb in enumerate(hops):
                nxt = t.dst if step == len(hops) - 1 else StateTag(
                    "mid", ("reset", chain_id, step + 1)
                )
                states.add(nxt)
                transitions.append((cur, Accept(nb - {i}, nb), nxt))
                cur = nxt

    contents: dict[int, set[int]] = {i: set() for i in range(1, m + 1)}
    name = count()
    for i in range(1, m + 1):
        budget = v0[i - 1] if i <= mc.dims else 0
        for _ in range(budget):
            contents[i].add(next(name))
    for i in range(1, m + 1):
        code = next(name)
        for p in _neigh(i, m):
            contents[p].add(code)
    return Hra(
        m=m,
        n=0,
        states=frozenset(states),
        initial=q0,
        initial_assignment=Assignment.of(m, {k: v for k, v in contents.items() if v}),
        transitions=frozenset(Transition(s, lab, d) for s, lab, d in transitions),
        finals=frozenset({target_state}),
    )


# ---------------------------------------------------------------------------
# the restricted discipline: skeleton-enriched reset machines


def restriction_ok(a: Hra) -> bool:
    """Every reset either avoids all histories or wipes them all."""
    hist = frozenset(range(1, a.m + 1))
    for t in a.transitions:
        if isinstance(t.label, Reset) and t.label.targets & hist:
            if not hist <= t.label.targets:
                return False
    return True


def restricted_hra_to_rvass(a: Hra) -> CounterReduction:
    """Counters for every nonempty history subset; register structure rides
    along in the control state as a skeleton."""
    if not restriction_ok(a):
        bad = next(
            t.label
            for t in a.transitions
            if isinstance(t.label, Reset)
            and t.label.targets & frozenset(range(1, a.m + 1))
            and not frozenset(range(1, a.m + 1)) <= t.label.targets
        )
        raise RestrictionViolated(f"reset {bad!r} wipes some histories but not all")
    m, n = a.m, a.n
    hist = frozenset(range(1, m + 1))
    placesets = _sorted_subsets(range(1, m + 1), include_empty=False)
    dims = max(len(placesets), 1)
    dmap = DimensionMap(tuple(placesets) or (frozenset(),))

    def pure(x: frozenset[int]) -> bool:
        return bool(x) and x <= hist

    def unit(x, sign):
        v = [0] * dims
        v[dmap.dim_of(x) - 1] = sign
        return Add(tuple(v))

    zero = Add((0,) * dims)

    def st(q, phi):
        return StateTag("st", (q, phi))

    phi0 = skeleton_of(a.initial_assignment, m, n)
    by_src: dict[State, list[Transition]] = {q: [] for q in a.states}
    for t in a.transitions:
        by_src[t.src].append(t)

    transitions: list[tuple[State, object, State]] = []
    seen = {(a.initial, phi0)}
    work = deque(seen)
    serial = count()

    def evictions(phi: Skeleton, skip: int, wiped: frozenset[int]) -> list:
        """Unit increments for register names released into pure history sets."""
        out = []
        for k in sorted(phi.classes()):
            if k == skip:
                continue
            yk = phi.places_of(k)
            if yk & wiped:
                left = yk - wiped
                if pure(left):
                    out.append(unit(left, +1))
        return out

    while work:
        q, phi = work.popleft()
        src = st(q, phi)
        for t in sorted(by_src[q], key=repr):
            if isinstance(t.label, Accept):
                x, x2 = t.label.pre, t.label.post
                steps: list = []
                if x and not x <= hist:
                    hits = skel_at(phi, x)
                    if not hits:
                        continue  # no register name can sit at exactly x here
                    j = next(iter(hits))
                elif pure(x):
                    j = 0
                    steps.append(unit(x, -1))
                else:
                    j = 0
                steps += evictions(phi, j, x2 - hist)
                if pure(x2):
                    steps.append(unit(x2, +1))
                phi2 = skel_move(phi, j, x2)
            else:
                x = t.label.targets
                steps = []
                if not x & hist:
                    steps = evictions(phi, 0, x)
                else:  # full-history reset
                    steps = [ResetDim(d) for d in range(1, len(placesets) + 1)]
                phi2 = skel_reset(phi, x)
            if not steps:
                steps = [zero]
            _chain(transitions, src, st(t.dst, phi2), steps, ("r", next(serial)))
            if (t.dst, phi2) not in seen:
                seen.add((t.dst, phi2))
                work.append((t.dst, phi2))

    states = {st(q, phi) for q, phi in seen}
    states |= {s for s, _, _ in transitions} | {d for _, _, d in transitions}
    mc = CounterMachine.make(dims, states, transitions)
    v0 = _initial_counts(a.initial_assignment, placesets) or (0,)
    targets = frozenset(st(q, phi) for q, phi in seen if q in a.finals)
    return CounterReduction(mc, (st(a.initial, phi0), v0), targets, dmap)


def unary_to_one_rvass(a: Hra) -> CounterReduction:
    """Single-history automata always satisfy the reset discipline, so the
    skeleton machine has exactly one counter."""
    if a.m != 1:
        raise NotUnary(f"expected 1 history, got {a.m}")
    return restricted_hra_to_rvass(a)


# ---------------------------------------------------------------------------
# non-reset automata and plain vector addition


def nonreset_to_vass(a: Hra) -> CounterReduction:
    """Only the place-sets mentioned by labels need counters: a name parked
    at any other combination can never be consumed again."""
    if a.n > 0:
        raise RegistersPresent("eliminate registers first")
    if not classify(a).non_reset:
        raise ResetsPresent("automaton has proper resets")
    used: set[frozenset[int]] = set()
    for t in a.transitions:
        if isinstance(t.label, Accept):
            for x in (t.label.pre, t.label.post):
                if x:
                    used.add(x)
    placesets = sorted(used, key=lambda s: (len(s), sorted(s)))
    dims = max(len(placesets), 1)
    dmap = DimensionMap(tuple(placesets) or (frozenset(),))

    def unit(x, sign):
        v = [0] * dims
        v[dmap.dim_of(x) - 1] = sign
        return Add(tuple(v))

    zero = Add((0,) * dims)
    transitions: list[tuple[State, object, State]] = []
    for t in sorted(a.transitions, key=repr):
        if isinstance(t.label, Accept):
            steps = []
            if t.label.pre:
                steps.append(unit(t.label.pre, -1))
            if t.label.post:
                steps.append(unit(t.label.post, +1))
            if not steps:
                steps = [zero]
        else:
            steps = [zero]  # empty reset: silent no-op
        _chain(transitions, t.src, t.dst, steps, ("nr", t))
    states = set(a.states) | {s for s, _, _ in transitions} | {d for _, _, d in transitions}
    mc = CounterMachine.make(dims, states, transitions)
    if placesets:
        v0 = _initial_counts(a.initial_assignment, placesets)
    else:
        v0 = (0,)
    return CounterReduction(mc, (a.initial, v0), frozenset(a.finals), dmap)


def vass_to_nonreset_hra(mc: CounterMachine, init: CounterConfig, target_state: State) -> Hra:
    """Counter i becomes the population of the place-set with bit pattern i
    over ceil(log2(m+1)) histories; effects stage through shared suffixes."""
    if not mc.is_vass():
        raise TransfersOrResetsPresent("input must be a plain addition machine")
    q0, v0 = init
    if len(v0) != mc.dims:
        raise TransfersOrResetsPresent(f"initial vector arity {len(v0)} != {mc.dims}")
    mprime = max(1, math.ceil(math.log2(mc.dims + 1)))

    def code(i: int) -> frozenset[int]:
        return frozenset(p + 1 for p in range(mprime) if i >> p & 1)

    def node(q):
        return StateTag("v", (q,))

    def stage(q, rest):
        return StateTag("vstage", (q, rest))

    transitions: list[tuple[State, object, State]] = []
    for t in sorted(mc.transitions, key=repr):
        pending = tuple((i + 1, x) for i, x in enumerate(t.effect.vector) if x)
        if not pending:
            transitions.append((node(t.src), Accept(frozenset(), frozenset()), node(t.dst)))
            continue
        cur = node(t.src)
        for idx, (d, sign) in enumerate(pending):
            rest = pending[idx + 1:]
            nxt = node(t.dst) if not rest else stage(t.dst, rest)
            lab = (
                Accept(frozenset(), code(d)) if sign > 0 else Accept(code(d), frozenset())
            )
            transitions.append((cur, lab, nxt))
            cur = nxt

    contents: dict[int, set[int]] = {}
    fresh = count()
    for i in range(1, mc.dims + 1):
        for _ in range(v0[i - 1]):
            a_name = next(fresh)
            for p in code(i):
                contents.setdefault(p, set()).add(a_name)
    states = {node(q) for q in mc.states}
    states |= {s for s, _, _ in transitions} | {d for _, _, d in transitions}
    return Hra(
        m=mprime,
        n=0,
        states=frozenset(states),
        initial=node(q0),
        initial_assignment=Assignment.of(mprime, contents),
        transitions=frozenset(Transition(s, lab, d) for s, lab, d in transitions),
        finals=frozenset({node(target_state)}),
    )


# ---------------------------------------------------------------------------
# register elimination by colouring (non-reset scope)


_COLOURS = ("r", "b", "y")


def colouring_scope_ok(a: Hra) -> bool:
    if not classify(a).non_reset:
        return False
    for i in range(a.m + 1, a.m + a.n + 1):
        if a.initial_assignment.place(i):
            return False
    for t in a.transitions:
        if isinstance(t.label, Accept):
            if len(t.label.pre - frozenset(range(1, a.m + 1))) > 1:
                return False
            if len(t.label.post - frozenset(range(1, a.m + 1))) > 1:
                return False
    return True


def eliminate_registers_colouring(a: Hra) -> Hra:
    """Replace each register with three history pools (one "live-read"
    colour and two stale pools) so that a non-reset automaton needs no
    registers at all.  Language-preserving on the proof's scope: non-reset,
    registers initially empty, at most one register per label side."""
    if a.n == 0:
        return a
    if not colouring_scope_ok(a):
        raise ScopeViolation(
            "needs a non-reset automaton with empty initial registers and "
            "at most one register on each label side"
        )
    m, n = a.m, a.n
    hist = frozenset(range(1, m + 1))
    size = m + 3 * n

    def pool(reg: int, colour: str) -> int:
        return m + 3 * (reg - 1) + 1 + _COLOURS.index(colour)

    def tag(q, f):
        return StateTag("col", (q, f))

    f0 = ("",) * n
    by_src: dict[State, list[Transition]] = {q: [] for q in a.states}
    for t in a.transitions:
        by_src[t.src].append(t)

    transitions: list[tuple[State, object, State]] = []
    seen = {(a.initial, f0)}
    work = deque(seen)
    while work:
        q, f = work.popleft()
        src = tag(q, f)
        for t in by_src[q]:
            if isinstance(t.label, Reset):  # scope guarantees it is empty
                transitions.append((src, t.label, tag(t.dst, f)))
                if (t.dst, f) not in seen:
                    seen.add((t.dst, f))
                    work.append((t.dst, f))
                continue
            xh, xr = t.label.pre & hist, t.label.pre - hist
            x2h, x2r = t.label.post & hist, t.label.post - hist
            reads: list[tuple[frozenset[int], tuple]] = []
            if xr:
                i = next(iter(xr)) - m
                if f[i - 1] == "r":
                    f_read = f[: i - 1] + ("",) + f[i:]
                    reads.append((xh | {pool(i, "r")}, f_read))
            else:
                reads.append((xh, f))
                for i in range(1, n + 1):
                    for c in ("b", "y"):
                        if c != f[i - 1]:
                            reads.append((xh | {pool(i, c)}, f))
            for pre, f2 in reads:
                if x2r:
                    j = next(iter(x2r)) - m
                    if f2[j - 1] == "r":
                        continue  # would overwrite a name promised to a read
                    for c in _COLOURS:
                        f3 = f2[: j - 1] + (c,) + f2[j:]
                        post = x2h | {pool(j, c)}
                        dst = (t.dst, f3)
                        transitions.append((src, Accept(pre, post), tag(*dst)))
                        if dst not in seen:
                            seen.add(dst)
                            work.append(dst)
                else:
                    dst = (t.dst, f2)
                    transitions.append((src, Accept(pre, x2h), tag(*dst)))
                    if dst not in seen:
                        seen.add(dst)
                        work.append(dst)

    contents = {
        i: a.initial_assignment.place(i)
        for i in range(1, m + 1)
        if a.initial_assignment.place(i)
    }
    return Hra(
        m=size,
        n=0,
        states=frozenset(tag(q, f) for q, f in seen),
        initial=tag(a.initial, f0),
        initial_assignment=Assignment.of(size, contents),
        transitions=frozenset(Transition(s, lab, d) for s, lab, d in transitions),
        finals=frozenset(tag(q, f) for q, f in seen if q in a.finals),
    )


# ---------------------------------------------------------------------------
# the emptiness orchestrator


@dataclass(frozen=True)
class EmptinessResult:
    is_empty: Optional[bool]  # None only from the bounded engine
    engine: str
    details: str = ""


def _super_target(red: CounterReduction) -> tuple[CounterMachine, State]:
    goal = StateTag("target", ())
    zero = Add((0,) * red.machine.dims)
    ts = [(t.src, t.effect, t.dst) for t in red.machine.transitions]
    ts += [(q, zero, goal) for q in sorted(red.targets, key=repr)]
    mc = CounterMachine.make(red.machine.dims, set(red.machine.states) | {goal}, ts)
    return mc, goal


def applicable_engines(a: Hra) -> list[str]:
    flags = classify(a)
    out = []
    if flags.unary:
        out.append("one_rvass")
    if flags.non_reset and (a.n == 0 or colouring_scope_ok(a)):
        out.append("vass")
    if restriction_ok(a):
        out.append("restricted")
    out.append("trvass")
    return out


def _run_engine(a: Hra, engine: str, bound: int) -> Optional[bool]:
    if engine == "one_rvass":
        red = unary_to_one_rvass(a)
        mc, goal = _super_target(red)
        return not one_dim_rvass_reachability(mc, red.init, goal)
    if engine == "vass":
        b = a
        if b.n > 0:
            b = eliminate_registers_colouring(b)  # raises ScopeViolation when unfit
        red = nonreset_to_vass(b)
        mc, goal = _super_target(red)
        return not backward_coverability(mc, red.init, goal)
    if engine == "restricted":
        red = restricted_hra_to_rvass(a)
        mc, goal = _super_target(red)
        return not backward_coverability(mc, red.init, goal)
    if engine == "trvass":
        from .constructions import registers_to_histories

        b = registers_to_histories(a) if a.n else a
        red = hra_to_trvass(b)
        return not backward_coverability(red.machine, red.init, red.target)
    if engine == "bounded":
        from .oracles import bounded_emptiness

        probe = bounded_emptiness(a, bound)
        if probe.kind == "nonempty":
            return False
        if probe.kind == "empty_within_bound":
            return True
        return None
    raise ValueError(f"unknown engine {engine!r}")


def emptiness(a: Hra, engine: str = "auto", race: bool = False, bound: int = 8) -> EmptinessResult:
    """Is the language empty?  engine=auto routes on the syntactic class;
    any engine can be forced, its preconditions then simply propagate."""
    if engine == "auto" and race:
        engines = applicable_engines(a)
        with ThreadPoolExecutor(max_workers=len(engines)) as pool:
            results = list(pool.map(lambda e: (_run_engine(a, e, bound), e), engines))
        verdicts = {v for v, _ in results}
        if len(verdicts) != 1:
            raise RuntimeError(f"engines disagree: {results}")
        v, _ = results[0]
        return EmptinessResult(v, "race", details=",".join(e for _, e in results))
    if engine == "auto":
        flags = classify(a)
        if flags.unary:
            engine = "one_rvass"
        elif flags.non_reset and (a.n == 0 or colouring_scope_ok(a)):
            engine = "vass"
        elif restriction_ok(a):
            engine = "restricted"
        else:
            engine = "trvass"
        return EmptinessResult(_run_engine(a, engine, bound), engine)
    return EmptinessResult(_run_engine(a, engine, bound), engine)
