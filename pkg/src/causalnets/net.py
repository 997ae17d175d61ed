"""Place/transition nets: data model, text format, firing rule, bounded exploration."""

from __future__ import annotations

import sys
from collections.abc import Iterable, Iterator, Mapping
from dataclasses import dataclass
from typing import Any

from .multiset import EMPTY, Multiset, leq, monus

OUTCOMES = ("holds", "fails", "unknown")


class NetError(ValueError):
    """Base class for errors raised on malformed nets or illegal moves."""


class ParseError(NetError):
    def __init__(self, message: str, line: int | None = None):
        self.line = line
        super().__init__(f"line {line}: {message}" if line is not None else message)


class NotEnabledError(NetError):
    def __init__(self, deficient: dict[str, int], what: str = "step"):
        self.deficient = deficient
        missing = ", ".join(f"{s} (short by {n})" for s, n in deficient.items())
        super().__init__(f"{what} not enabled: {missing}")


class NotFiringSequenceError(NetError):
    def __init__(self, position: int, transition: str, deficient: dict[str, int]):
        self.position = position
        self.transition = transition
        self.deficient = deficient
        super().__init__(
            f"not a firing sequence: {transition!r} at position {position} "
            f"is not enabled (deficient: {deficient})"
        )


@dataclass(frozen=True)
class Bounds:
    """Exploration limits shared by every bounded analysis."""

    max_seq_len: int = 12
    max_tokens_per_place: int = 8
    max_states: int = 100_000
    class_budget: int = 20_000
    trace_budget: int = 50_000

    def __post_init__(self):
        for name in ("max_seq_len", "max_tokens_per_place", "max_states",
                     "class_budget", "trace_budget"):
            if getattr(self, name) <= 0:
                raise ValueError(f"bound {name} must be positive")


@dataclass(frozen=True)
class Verdict:
    """Three-valued result of a bounded analysis."""

    outcome: str
    witness: Any = None
    bound_hit: str | None = None

    def __post_init__(self):
        if self.outcome not in OUTCOMES:
            raise ValueError(f"bad outcome {self.outcome!r}")
        if (self.witness is not None) != (self.outcome == "fails"):
            raise ValueError("a witness is present exactly when the outcome is 'fails'")
        if (self.bound_hit is not None) != (self.outcome == "unknown"):
            raise ValueError("bound_hit is present exactly when the outcome is 'unknown'")

    @classmethod
    def holds(cls) -> "Verdict":
        return cls("holds")

    @classmethod
    def fails(cls, witness) -> "Verdict":
        return cls("fails", witness=witness)

    @classmethod
    def unknown(cls, bound_hit: str) -> "Verdict":
        return cls("unknown", bound_hit=bound_hit)

    def to_json(self) -> dict:
        return {"outcome": self.outcome, "witness": self.witness, "bound_hit": self.bound_hit}


def as_sequence(seq: str | Iterable[str]) -> tuple[str, ...]:
    """Accept ``"a b c"`` or any iterable of transition ids."""
    if isinstance(seq, str):
        return tuple(seq.split())
    return tuple(seq)


class Net:
    """A place/transition net ``(S, T, F, M0)``.

    ``flow`` maps ``(x, y)`` pairs to positive arc weights; pairs must lie in
    ``S x T`` or ``T x S``.  Every transition needs a non-empty preset.
    """

    def __init__(self, places: Iterable[str], transitions: Iterable[str],
                 flow: Mapping[tuple[str, str], int],
                 initial_marking: Mapping[str, int] | None = None, name: str = "net"):
        self.name = name
        self.places = tuple(sys.intern(p) for p in places)
        self.transitions = tuple(sys.intern(t) for t in transitions)
        place_set, trans_set = set(self.places), set(self.transitions)
        if len(place_set) != len(self.places) or len(trans_set) != len(self.transitions):
            raise NetError("duplicate node id")
        if place_set & trans_set:
            raise NetError(f"places and transitions overlap: {sorted(place_set & trans_set)}")
        self.flow = {}
        pre = {t: {} for t in self.transitions}
        post = {t: {} for t in self.transitions}
        for (x, y), w in flow.items():
            if w == 0:
                continue
            if w < 0:
                raise NetError(f"negative arc weight on ({x}, {y})")
            if x in place_set and y in trans_set:
                pre[y][x] = pre[y].get(x, 0) + w
            elif x in trans_set and y in place_set:
                post[x][y] = post[x].get(y, 0) + w
            else:
                raise NetError(f"arc ({x}, {y}) must connect a place and a transition")
            self.flow[(x, y)] = self.flow.get((x, y), 0) + w
        for t in self.transitions:
            if not pre[t]:
                raise NetError(f"transition {t!r} has empty preset")
        self.pre = {t: Multiset(pre[t]) for t in self.transitions}
        self.post = {t: Multiset(post[t]) for t in self.transitions}
        m0 = dict(initial_marking or {})
        unknown = set(m0) - place_set
        if unknown:
            raise NetError(f"initial marking names unknown places {sorted(unknown)}")
        self.initial_marking = Multiset(m0)
        self.place_index = {p: i for i, p in enumerate(self.places)}
        self.trans_index = {t: i for i, t in enumerate(self.transitions)}

    def __repr__(self) -> str:
        return f"Net({self.name!r}, |S|={len(self.places)}, |T|={len(self.transitions)})"

    def F(self, x: str, y: str) -> int:
        return self.flow.get((x, y), 0)

    def is_node(self, x: str) -> bool:
        return x in self.place_index or x in self.trans_index

    # -- ordering helpers used for deterministic reports --------------------

    def marking_json(self, m: Multiset) -> dict[str, int]:
        return {p: m[p] for p in self.places if m[p]}

    def step_json(self, g: Multiset) -> dict[str, int]:
        return {t: g[t] for t in self.transitions if g[t]}

    def to_text(self) -> str:
        lines = [f"net {self.name}"]
        for p in self.places:
            k = self.initial_marking[p]
            lines.append(f"place {p}" + (f" tokens={k}" if k else ""))
        for t in self.transitions:
            lines.append(f"trans {t}")
        for t in self.transitions:
            for s, w in self.pre[t].items():
                lines.append(f"arc {s} {t}" + (f" weight={w}" if w != 1 else ""))
            for s, w in self.post[t].items():
                lines.append(f"arc {t} {s}" + (f" weight={w}" if w != 1 else ""))
        return "\n".join(lines) + "\n"

    # -- firing rule ---------------------------------------------------------

    def enabled(self, marking: Multiset, t: str) -> bool:
        return leq(self.pre[t], marking)

    def enabled_transitions(self, marking: Multiset) -> list[str]:
        return [t for t in self.transitions if leq(self.pre[t], marking)]

    def step_enabled(self, marking: Multiset, step: Mapping[str, int]) -> bool:
        return leq(pre_post(self, step)[0], marking)

    def fire(self, marking: Multiset, t: str) -> Multiset:
        """Fire a single transition without re-validating node ids."""
        d = dict(marking._d)
        for s, w in self.pre[t]._d.items():
            left = d.get(s, 0) - w
            if left < 0:
                raise NotEnabledError({s: -left}, what=f"transition {t!r}")
            if left:
                d[s] = left
            else:
                del d[s]
        for s, w in self.post[t]._d.items():
            d[s] = d.get(s, 0) + w
        return Multiset._raw(d)




def _options(parts: list[str], allowed: set[str], lineno: int) -> dict[str, int]:
    out = {}
    for part in parts:
        key, eq, val = part.partition("=")
        if not eq or key not in allowed:
            raise ParseError(f"unexpected token {part!r}", lineno)
        try:
            out[key] = int(val)
        except ValueError:
            raise ParseError(f"{key} must be an integer, got {val!r}", lineno) from None
        if out[key] < 0 or (key == "weight" and out[key] == 0):
            raise ParseError(f"{key} out of range: {val}", lineno)
    return out


def parse_net(text: str) -> Net:
    """Parse the line-oriented net format (``net``/``place``/``trans``/``arc``)."""
    name = None
    places: list[str] = []
    transitions: list[str] = []
    tokens: dict[str, int] = {}
    arcs: list[tuple[str, str, int, int]] = []
    declared: dict[str, int] = {}
    trans_line: dict[str, int] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        words = line.split()
        kw, args = words[0], words[1:]
        if name is None:
            if kw != "net" or len(args) != 1:
                raise ParseError("expected 'net <name>' header", lineno)
            name = args[0]
            continue
        if kw == "net":
            raise ParseError("duplicate 'net' header", lineno)
        if kw in ("place", "trans"):
            if not args:
                raise ParseError(f"'{kw}' needs an id", lineno)
            node = args[0]
            if node in declared:
                raise ParseError(f"duplicate id {node!r} (first declared on line {declared[node]})", lineno)
            declared[node] = lineno
            if kw == "place":
                opts = _options(args[1:], {"tokens"}, lineno)
                places.append(node)
                if opts.get("tokens"):
                    tokens[node] = opts["tokens"]
            else:
                if len(args) > 1:
                    raise ParseError(f"unexpected token {args[1]!r}", lineno)
                transitions.append(node)
                trans_line[node] = lineno
        elif kw == "arc":
            if len(args) < 2:
                raise ParseError("'arc' needs a source and a target", lineno)
            opts = _options(args[2:], {"weight"}, lineno)
            arcs.append((args[0], args[1], opts.get("weight", 1), lineno))
        else:
            raise ParseError(f"unknown keyword {kw!r}", lineno)
    if name is None:
        raise ParseError("missing 'net <name>' header")
    pset, tset = set(places), set(transitions)
    flow: dict[tuple[str, str], int] = {}
    for src, dst, w, lineno in arcs:
        for node in (src, dst):
            if node not in declared:
                raise ParseError(f"undeclared node {node!r}", lineno)
        if not ((src in pset and dst in tset) or (src in tset and dst in pset)):
            kind = "places" if src in pset else "transitions"
            raise ParseError(f"arc {src} {dst} connects two {kind}", lineno)
        flow[(src, dst)] = flow.get((src, dst), 0) + w
    for t in transitions:
        if not any(flow.get((s, t)) for s in places):
            raise ParseError(f"transition {t!r} has empty preset", trans_line[t])
    return Net(places, transitions, flow, tokens, name=name)


def load_net(path) -> Net:
    with open(path, encoding="utf-8") as fh:
        return parse_net(fh.read())


def pre_post(net: Net, xs: Mapping[str, int]) -> tuple[Multiset, Multiset]:
    """Presets and postsets lifted linearly to a multiset of nodes."""
    pre: dict[str, int] = {}
    post: dict[str, int] = {}
    for x, k in xs.items():
        if not k:
            continue
        if x in net.trans_index:
            xpre, xpost = net.pre[x]._d, net.post[x]._d
        elif x in net.place_index:
            xpre = {t: net.flow[(t, x)] for t in net.transitions if (t, x) in net.flow}
            xpost = {t: net.flow[(x, t)] for t in net.transitions if (x, t) in net.flow}
        else:
            raise NetError(f"unknown node {x!r}")
        for y, w in xpre.items():
            pre[y] = pre.get(y, 0) + k * w
        for y, w in xpost.items():
            post[y] = post.get(y, 0) + k * w
    return Multiset(pre), Multiset(post)


def fire_step(net: Net, marking: Mapping[str, int], step: Mapping[str, int]) -> Multiset:
    """Fire a non-empty step ``G``: ``M' = (M - pre(G)) + post(G)``."""
    marking = marking if isinstance(marking, Multiset) else Multiset(marking)
    step = step if isinstance(step, Multiset) else Multiset(step)
    if not step:
        raise NetError("a step must be non-empty")
    for t in step:
        if t not in net.trans_index:
            raise NetError(f"unknown transition {t!r}")
    pre, post = pre_post(net, step)
    if not leq(pre, marking):
        raise NotEnabledError({s: w - marking[s] for s, w in pre.items() if w > marking[s]})
    return monus(marking, pre) + post


def fire_sequence(net: Net, seq: str | Iterable[str], marking: Mapping[str, int] | None = None) -> Multiset:
    """Fire a word of transitions one at a time; returns the final marking."""
    m = net.initial_marking if marking is None else Multiset(marking)
    for i, t in enumerate(as_sequence(seq)):
        if t not in net.trans_index:
            raise NetError(f"unknown transition {t!r} at position {i}")
        if not leq(net.pre[t], m):
            raise NotFiringSequenceError(
                i, t, {s: w - m[s] for s, w in net.pre[t].items() if w > m[s]})
        m = net.fire(m, t)
    return m


def is_firing_sequence(net: Net, seq: Iterable[str]) -> bool:
    try:
        fire_sequence(net, seq)
    except NotFiringSequenceError:
        return False
    return True


def firing_sequences(net: Net, max_len: int) -> Iterator[tuple[tuple[str, ...], Multiset]]:
    """Enumerate ``(sigma, marking)`` for every firing sequence up to ``max_len``.

    Order is by length, then lexicographic in transition declaration order.
    """
    level = [((), net.initial_marking)]
    for depth in range(max_len + 1):
        yield from level
        if depth == max_len:
            break
        nxt = []
        for seq, m in level:
            for t in net.transitions:
                if leq(net.pre[t], m):
                    nxt.append((seq + (t,), net.fire(m, t)))
        level = nxt
        if not level:
            break


@dataclass
class Exploration:
    """Result of :func:`explore`; ``markings`` is in breadth-first discovery order."""

    net: Net
    paths: dict[Multiset, tuple[str, ...]]
    verdict: Verdict
    depth: int

    @property
    def markings(self) -> tuple[Multiset, ...]:
        return tuple(self.paths)

    @property
    def closed(self) -> bool:
        return self.verdict.outcome == "holds"

    @property
    def levels_complete(self) -> bool:
        """Every marking reachable within ``depth`` steps was recorded."""
        return self.closed or self.verdict.bound_hit.startswith("max_seq_len")

    def path(self, marking: Multiset) -> tuple[str, ...]:
        """A shortest firing sequence reaching ``marking``."""
        return self.paths[marking]

    def sequences(self) -> Iterator[tuple[str, ...]]:
        """Firing sequences up to the explored depth."""
        for seq, _ in firing_sequences(self.net, self.depth):
            yield seq


def explore(net: Net, bounds: Bounds | None = None) -> Exploration:
    """Breadth-first enumeration of the behaviour up to ``bounds.max_seq_len``.

    Markings reachable by firing sequences of each exact length are kept as a
    set per level, so the cost follows the number of distinct markings rather
    than the number of sequences.  The verdict holds only when no firing
    sequence of length ``max_seq_len + 1`` exists, i.e. every run of the net
    terminates inside the bound and ``FS(N)`` has been enumerated completely.
    """
    bounds = bounds or Bounds()
    paths: dict[Multiset, tuple[str, ...]] = {net.initial_marking: ()}
    level = {net.initial_marking: ()}
    depth = 0
    while True:
        if any(v > bounds.max_tokens_per_place for m in level for v in m.values()):
            return Exploration(net, paths, Verdict.unknown(
                f"max_tokens_per_place={bounds.max_tokens_per_place} exceeded at depth {depth}"), depth)
        nxt: dict[Multiset, tuple[str, ...]] = {}
        for m, path in level.items():
            for t in net.transitions:
                if leq(net.pre[t], m):
                    nxt.setdefault(net.fire(m, t), path + (t,))
        if not nxt:
            return Exploration(net, paths, Verdict.holds(), depth)
        if depth == bounds.max_seq_len:
            return Exploration(net, paths, Verdict.unknown(
                f"max_seq_len={bounds.max_seq_len} reached with enabled transitions left"), depth)
        for m, path in nxt.items():
            paths.setdefault(m, path)
            if len(paths) > bounds.max_states:
                return Exploration(net, paths, Verdict.unknown(
                    f"max_states={bounds.max_states} exceeded"), depth)
        level = nxt
        depth += 1


__all__ = [
    "Bounds", "EMPTY", "Exploration", "Net", "NetError", "NotEnabledError",
    "NotFiringSequenceError", "ParseError", "Verdict", "as_sequence", "explore",
    "fire_sequence", "fire_step", "firing_sequences", "is_firing_sequence",
    "load_net", "parse_net", "pre_post",
]
