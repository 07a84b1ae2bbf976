"""Textual file formats and the command-line interface.

Automaton files are line-oriented (`#` starts a comment):

    HRA <m> <n>
    STATE <id> [INITIAL] [FINAL]
    INIT <place> <name>
    TRANS <src> <dst> ACC <X> : <X'>
    TRANS <src> <dst> RST <X>

where X and X' are comma-separated 1-based place indices, or `-` for the
empty set.  Counter-machine files:

    TRVASS|RVASS|VASS <m>
    TRANS <src> <dst> ADD <v1> ... <vm>
    TRANS <src> <dst> TRANSFER <i> <j>
    TRANS <src> <dst> RESET <i>
    QUERY <q0> <v1> ... <vm> <target>

ADD entries may be arbitrary integers; they are normalized to unit steps
(decrements first) through intermediate states at parse time.
"""

from __future__ import annotations

import argparse
import re
import sys
from dataclasses import dataclass, field
from typing import Optional, Sequence

from .constructions import (
    complement_deterministic,
    concatenation,
    intersection,
    kleene_star,
    registers_to_histories,
    to_packed,
    union,
    unpack,
)
from .core import (
    Accept,
    Assignment,
    Hra,
    Reset,
    Transition,
    classify,
    membership,
    trace,
    validate,
)
from .counters import Add, CounterMachine, ResetDim, Transfer, backward_coverability
from .errors import BadPlaceIndex, HistraError
from .reductions import (
    CounterReduction,
    emptiness,
    hra_to_trvass,
    nonreset_to_vass,
    unary_to_one_rvass,
)

_IDENT = re.compile(r"[A-Za-z_][A-Za-z0-9_]*")


class ParseError(HistraError):
    pass


@dataclass
class NameTable:
    """Bidirectional interning of name identifiers to integer atoms."""

    by_token: dict[str, int] = field(default_factory=dict)
    by_name: dict[int, str] = field(default_factory=dict)

    def intern(self, token: str) -> int:
        if token in self.by_token:
            return self.by_token[token]
        if not _IDENT.fullmatch(token):
            raise ParseError(f"bad name token {token!r}")
        name = 0
        while name in self.by_name:
            name += 1
        self.by_token[token] = name
        self.by_name[name] = token
        return name

    def token(self, name: int) -> str:
        if name not in self.by_name:
            tok = f"n{name}"
            while tok in self.by_token:
                tok += "_"
            self.by_token[tok] = name
            self.by_name[name] = tok
        return self.by_name[name]


@dataclass
class HraDocument:
    hra: Hra
    names: NameTable


@dataclass
class CounterDocument:
    machine: CounterMachine
    query: Optional[tuple[object, tuple[int, ...], object]] = None  # (q0, v0, target)


def _lines(text: str):
    for ln, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if line:
            yield ln, line.split()


def _parse_placeset(tok: str, size: int, ln: int) -> frozenset[int]:
    if tok == "-":
        return frozenset()
    out = set()
    for piece in tok.split(","):
        try:
            p = int(piece)
        except ValueError:
            raise ParseError(f"line {ln}: bad place index {piece!r}") from None
        if not 1 <= p <= size:
            raise BadPlaceIndex(f"line {ln}: place {p} out of range 1..{size}")
        out.add(p)
    return frozenset(out)


def parse_hra_document(text: str, names: Optional[NameTable] = None) -> HraDocument:
    names = names if names is not None else NameTable()
    header: Optional[tuple[int, int]] = None
    states: dict[str, tuple[bool, bool]] = {}
    init: list[tuple[int, int]] = []
    transitions: list[Transition] = []
    for ln, toks in _lines(text):
        kind = toks[0].upper()
        if kind == "HRA":
            if header is not None:
                raise ParseError(f"line {ln}: duplicate HRA header")
            if len(toks) != 3:
                raise ParseError(f"line {ln}: expected HRA <m> <n>")
            try:
                header = (int(toks[1]), int(toks[2]))
            except ValueError:
                raise ParseError(f"line {ln}: HRA arguments must be integers") from None
            continue
        if header is None:
            raise ParseError(f"line {ln}: HRA header must come first")
        m, n = header
        if kind == "STATE":
            if len(toks) < 2:
                raise ParseError(f"line {ln}: expected STATE <id> [INITIAL] [FINAL]")
            sid = toks[1]
            flags = [t.upper() for t in toks[2:]]
            bad = [f for f in flags if f not in ("INITIAL", "FINAL")]
            if bad:
                raise ParseError(f"line {ln}: unknown state flag {bad[0]}")
            if sid in states:
                raise ParseError(f"line {ln}: duplicate state {sid}")
            states[sid] = ("INITIAL" in flags, "FINAL" in flags)
        elif kind == "INIT":
            if len(toks) != 3:
                raise ParseError(f"line {ln}: expected INIT <place> <name>")
            (place,) = _ints(toks[1:2], ln)
            if not 1 <= place <= m + n:
                raise BadPlaceIndex(f"line {ln}: place {place} out of range 1..{m + n}")
            init.append((place, names.intern(toks[2])))
        elif kind == "TRANS":
            if len(toks) < 4:
                raise ParseError(f"line {ln}: truncated TRANS line")
            src, dst, op = toks[1], toks[2], toks[3].upper()
            for sid in (src, dst):
                if sid not in states:
                    raise ParseError(f"line {ln}: undeclared state {sid}")
            if op == "ACC":
                if len(toks) != 7 or toks[5] != ":":
                    raise ParseError(f"line {ln}: expected TRANS <src> <dst> ACC <X> : <X'>")
                pre = _parse_placeset(toks[4], m + n, ln)
                post = _parse_placeset(toks[6], m + n, ln)
                transitions.append(Transition(src, Accept(pre, post), dst))
            elif op == "RST":
                if len(toks) != 5:
                    raise ParseError(f"line {ln}: expected TRANS <src> <dst> RST <X>")
                transitions.append(
                    Transition(src, Reset(_parse_placeset(toks[4], m + n, ln)), dst)
                )
            else:
                raise ParseError(f"line {ln}: unknown label kind {op}")
        else:
            raise ParseError(f"line {ln}: unknown directive {toks[0]}")
    if header is None:
        raise ParseError("missing HRA header")
    m, n = header
    initials = [s for s, (i, _) in states.items() if i]
    if len(initials) != 1:
        raise ParseError(f"expected exactly one INITIAL state, found {len(initials)}")
    contents: dict[int, set[int]] = {}
    for place, name in init:
        contents.setdefault(place, set()).add(name)
    a = Hra(
        m=m,
        n=n,
        states=frozenset(states),
        initial=initials[0],
        initial_assignment=Assignment.of(m + n, contents),
        transitions=frozenset(transitions),
        finals=frozenset(s for s, (_, f) in states.items() if f),
    )
    validate(a)
    return HraDocument(a, names)


def parse_hra(text: str) -> Hra:
    return parse_hra_document(text).hra


def _state_tokens(states) -> dict:
    """Deterministic printable identifiers for arbitrary state objects."""
    toks: dict = {}
    used: set[str] = set()
    ordered = sorted(states, key=repr)
    for s in ordered:
        if isinstance(s, str) and _IDENT.fullmatch(s) and s not in used:
            toks[s] = s
            used.add(s)
    serial = 0
    for s in ordered:
        if s in toks:
            continue
        while f"s{serial}" in used:
            serial += 1
        toks[s] = f"s{serial}"
        used.add(f"s{serial}")
    return toks


def _fmt_set(x: frozenset[int]) -> str:
    return ",".join(str(p) for p in sorted(x)) if x else "-"


def print_hra(a: Hra, names: Optional[NameTable] = None) -> str:
    names = names if names is not None else NameTable()
    tok = _state_tokens(a.states)
    out = [f"HRA {a.m} {a.n}"]
    for s in sorted(a.states, key=lambda s: tok[s]):
        flags = (" INITIAL" if s == a.initial else "") + (" FINAL" if s in a.finals else "")
        out.append(f"STATE {tok[s]}{flags}")
    h0 = a.initial_assignment
    for place in range(1, a.m + a.n + 1):
        for name in sorted(h0.place(place)):
            out.append(f"INIT {place} {names.token(name)}")
    lines = []
    for t in a.transitions:
        if isinstance(t.label, Accept):
            lines.append(
                f"TRANS {tok[t.src]} {tok[t.dst]} ACC "
                f"{_fmt_set(t.label.pre)} : {_fmt_set(t.label.post)}"
            )
        else:
            lines.append(f"TRANS {tok[t.src]} {tok[t.dst]} RST {_fmt_set(t.label.targets)}")
    out.extend(sorted(lines))
    return "\n".join(out) + "\n"


# ---------------------------------------------------------------------------
# counter-machine files


def parse_counters(text: str) -> CounterDocument:
    klass: Optional[str] = None
    dims = 0
    states: set = set()
    transitions: list[tuple[object, object, object]] = []
    query: Optional[tuple[object, tuple[int, ...], object]] = None
    for ln, toks in _lines(text):
        kind = toks[0].upper()
        if kind in ("TRVASS", "RVASS", "VASS"):
            if klass is not None:
                raise ParseError(f"line {ln}: duplicate header")
            if len(toks) != 2:
                raise ParseError(f"line {ln}: expected {kind} <dims>")
            klass, dims = kind, int(toks[1])
            if dims < 1:
                raise ParseError(f"line {ln}: need at least one dimension")
            continue
        if klass is None:
            raise ParseError(f"line {ln}: machine header must come first")
        if kind == "TRANS":
            if len(toks) < 4:
                raise ParseError(f"line {ln}: truncated TRANS line")
            src, dst, op = toks[1], toks[2], toks[3].upper()
            states.update((src, dst))
            if op == "ADD":
                if len(toks) != 4 + dims:
                    raise ParseError(f"line {ln}: ADD expects {dims} entries")
                try:
                    vec = [int(x) for x in toks[4:]]
                except ValueError:
                    raise ParseError(f"line {ln}: ADD entries must be integers") from None
                prev: object = src
                for eff, mid_dst in _normalize_add(vec, dst, ln):
                    transitions.append((prev, eff, mid_dst))
                    states.add(mid_dst)
                    prev = mid_dst
            elif op == "TRANSFER":
                if klass != "TRVASS":
                    raise ParseError(f"line {ln}: TRANSFER not allowed in a {klass} file")
                if len(toks) != 6:
                    raise ParseError(f"line {ln}: expected TRANSFER <i> <j>")
                transitions.append((src, Transfer(*_ints(toks[4:6], ln)), dst))
            elif op == "RESET":
                if klass == "VASS":
                    raise ParseError(f"line {ln}: RESET not allowed in a VASS file")
                if len(toks) != 5:
                    raise ParseError(f"line {ln}: expected RESET <i>")
                transitions.append((src, ResetDim(*_ints(toks[4:5], ln)), dst))
            else:
                raise ParseError(f"line {ln}: unknown effect {op}")
        elif kind == "QUERY":
            if len(toks) != 3 + dims:
                raise ParseError(f"line {ln}: QUERY expects <q0> <{dims} entries> <target>")
            if query is not None:
                raise ParseError(f"line {ln}: duplicate QUERY")
            try:
                vec = tuple(int(x) for x in toks[2:-1])
            except ValueError:
                raise ParseError(f"line {ln}: QUERY entries must be integers") from None
            if any(x < 0 for x in vec):
                raise ParseError(f"line {ln}: QUERY entries must be non-negative")
            query = (toks[1], vec, toks[-1])
            states.update((toks[1], toks[-1]))
        else:
            raise ParseError(f"line {ln}: unknown directive {toks[0]}")
    if klass is None:
        raise ParseError("missing machine header")
    mc = CounterMachine.make(dims, states, transitions)
    return CounterDocument(mc, query)


def _ints(tokens: Sequence[str], ln: int) -> tuple[int, ...]:
    try:
        return tuple(int(t) for t in tokens)
    except ValueError:
        raise ParseError(f"line {ln}: expected integers, got {' '.join(tokens)}") from None


def _normalize_add(vec: list[int], dst, ln: int):
    """Split a general integer vector into unit steps, decrements first."""
    dims = len(vec)
    if all(x in (-1, 0, 1) for x in vec):
        yield Add(tuple(vec)), dst
        return
    steps = []
    for d in range(dims):
        for _ in range(-min(vec[d], 0)):
            steps.append((d, -1))
    for d in range(dims):
        for _ in range(max(vec[d], 0)):
            steps.append((d, +1))
    for k, (d, sign) in enumerate(steps):
        unit = [0] * dims
        unit[d] = sign
        last = k == len(steps) - 1
        yield Add(tuple(unit)), (dst if last else ("add", ln, k))


def print_counters(doc: CounterDocument) -> str:
    mc = doc.machine
    klass = "VASS" if mc.is_vass() else ("RVASS" if mc.is_rvass() else "TRVASS")
    tok = _state_tokens(mc.states)
    out = [f"{klass} {mc.dims}"]
    lines = []
    for t in mc.transitions:
        if isinstance(t.effect, Add):
            body = "ADD " + " ".join(str(x) for x in t.effect.vector)
        elif isinstance(t.effect, Transfer):
            body = f"TRANSFER {t.effect.src} {t.effect.dst}"
        else:
            body = f"RESET {t.effect.dim}"
        lines.append(f"TRANS {tok[t.src]} {tok[t.dst]} {body}")
    out.extend(sorted(lines))
    if doc.query is not None:
        q0, vec, target = doc.query
        out.append(f"QUERY {tok[q0]} {' '.join(str(x) for x in vec)} {tok[target]}")
    return "\n".join(out) + "\n"


# ---------------------------------------------------------------------------
# commands


def _load(path: str, names: Optional[NameTable] = None) -> HraDocument:
    with open(path, encoding="utf-8") as fh:
        return parse_hra_document(fh.read(), names)


def _word(doc: HraDocument, tokens: Sequence[str]) -> tuple[int, ...]:
    return tuple(doc.names.intern(t) for t in tokens)


def _write(path: str, text: str) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(text)


def _cmd_member(args) -> int:
    doc = _load(args.file)
    ok = membership(doc.hra, _word(doc, args.word))
    print(f"member: {'true' if ok else 'false'}")
    return 0 if ok else 1


def _cmd_run(args) -> int:
    doc = _load(args.file)
    word = _word(doc, args.word)
    steps = trace(doc.hra, word)
    if steps is None:
        print("accepted: false")
        return 1
    print("accepted: true")
    if args.trace:
        tok = _state_tokens(doc.hra.states)
        here = doc.hra.initial
        print(f"  {tok[here]}")
        for s in steps:
            letter = doc.names.token(s.letter) if s.letter is not None else "eps"
            lab = s.transition.label
            if isinstance(lab, Accept):
                shown = f"ACC {_fmt_set(lab.pre)} : {_fmt_set(lab.post)}"
            else:
                shown = f"RST {_fmt_set(lab.targets)}"
            here = s.transition.dst
            print(f"  --[{letter}]--> {tok[here]} via {shown}")
    return 0


def _cmd_empty(args) -> int:
    doc = _load(args.file)
    res = emptiness(doc.hra, engine=args.engine, race=args.race, bound=args.bound)
    if res.is_empty is None:
        print(f"empty: unknown (engine: {res.engine}, bound exhausted)")
        return 2
    extra = f", {res.details}" if res.details else ""
    print(f"empty: {'true' if res.is_empty else 'false'} (engine: {res.engine}{extra})")
    return 0 if res.is_empty else 1


def _cmd_complement(args) -> int:
    doc = _load(args.file)
    a = doc.hra
    if a.n > 0:
        a = registers_to_histories(a)
    comp = unpack(complement_deterministic(to_packed(a)))
    _write(args.output, print_hra(comp, doc.names))
    print(f"wrote {args.output}")
    return 0


def _cmd_product(args) -> int:
    names = NameTable()
    left = _load(args.left, names)
    right = _load(args.right, names)
    op = union if args.op == "union" else intersection
    _write(args.output, print_hra(op(left.hra, right.hra), names))
    print(f"wrote {args.output}")
    return 0


def _cmd_concat(args) -> int:
    names = NameTable()
    left = _load(args.left, names)
    right = _load(args.right, names)
    _write(args.output, print_hra(concatenation(left.hra, right.hra), names))
    print(f"wrote {args.output}")
    return 0


def _cmd_star(args) -> int:
    doc = _load(args.file)
    _write(args.output, print_hra(kleene_star(doc.hra), doc.names))
    print(f"wrote {args.output}")
    return 0


def _cmd_to_counters(args) -> int:
    doc = _load(args.file)
    a = doc.hra
    if args.target == "trvass":
        if a.n > 0:
            a = registers_to_histories(a)
        red = hra_to_trvass(a)
    elif args.target == "vass":
        red = nonreset_to_vass(a)
    else:
        red = unary_to_one_rvass(a)
    mc, goal = _flatten_targets(red)
    q0, v0 = red.init
    _write(args.output, print_counters(CounterDocument(mc, (q0, v0, goal))))
    print(f"wrote {args.output}")
    return 0


def _flatten_targets(red: CounterReduction):
    if len(red.targets) == 1:
        return red.machine, red.target
    from .reductions import _super_target

    return _super_target(red)


def _cmd_cover(args) -> int:
    with open(args.file, encoding="utf-8") as fh:
        doc = parse_counters(fh.read())
    if doc.query is None:
        raise ParseError("file has no QUERY line")
    q0, v0, target = doc.query
    ok = backward_coverability(doc.machine, (q0, v0), target)
    print(f"coverable: {'true' if ok else 'false'}")
    return 0 if ok else 1


def _cmd_classify(args) -> int:
    doc = _load(args.file)
    flags = classify(doc.hra)
    print(
        f"unary:{str(flags.unary).lower()} "
        f"non_reset:{str(flags.non_reset).lower()} "
        f"ra:{str(flags.ra).lower()} "
        f"fra:{str(flags.fra).lower()}"
    )
    return 0


def _build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="histra", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)

    sp = sub.add_parser("member", help="decide word membership")
    sp.add_argument("file")
    sp.add_argument("word", nargs="*")
    sp.set_defaults(func=_cmd_member)

    sp = sub.add_parser("run", help="run a word, optionally printing the trace")
    sp.add_argument("file")
    sp.add_argument("word", nargs="*")
    sp.add_argument("--trace", action="store_true")
    sp.set_defaults(func=_cmd_run)

    sp = sub.add_parser("empty", help="decide language emptiness")
    sp.add_argument("file")
    sp.add_argument(
        "--engine",
        choices=["auto", "trvass", "restricted", "vass", "one_rvass", "bounded"],
        default="auto",
    )
    sp.add_argument("--race", action="store_true")
    sp.add_argument("--bound", type=int, default=8, help="letters for --engine=bounded")
    sp.set_defaults(func=_cmd_empty)

    sp = sub.add_parser("complement", help="complement a deterministic automaton")
    sp.add_argument("file")
    sp.add_argument("-o", "--output", required=True)
    sp.set_defaults(func=_cmd_complement)

    sp = sub.add_parser("product", help="union or intersection of two automata")
    sp.add_argument("--op", choices=["union", "inter"], required=True)
    sp.add_argument("left")
    sp.add_argument("right")
    sp.add_argument("-o", "--output", required=True)
    sp.set_defaults(func=_cmd_product)

    sp = sub.add_parser("concat", help="concatenation of two automata")
    sp.add_argument("left")
    sp.add_argument("right")
    sp.add_argument("-o", "--output", required=True)
    sp.set_defaults(func=_cmd_concat)

    sp = sub.add_parser("star", help="Kleene star of an automaton")
    sp.add_argument("file")
    sp.add_argument("-o", "--output", required=True)
    sp.set_defaults(func=_cmd_star)

    sp = sub.add_parser("to-counters", help="translate to a counter machine")
    sp.add_argument("file")
    sp.add_argument("--target", choices=["trvass", "vass", "one_rvass"], default="trvass")
    sp.add_argument("-o", "--output", required=True)
    sp.set_defaults(func=_cmd_to_counters)

    sp = sub.add_parser("cover", help="decide coverability for a counter-machine file")
    sp.add_argument("file")
    sp.set_defaults(func=_cmd_cover)

    sp = sub.add_parser("classify", help="report subclass flags")
    sp.add_argument("file")
    sp.set_defaults(func=_cmd_classify)
    return p


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (HistraError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
