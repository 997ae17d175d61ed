"""Goltz-Reisig processes: occurrence nets folded onto a place/transition net.

Two representations live here.  :class:`GRProcess` is the general, explicit
structure (ids, arc set, initial conditions, folding map) and can describe
malformed candidates so :func:`validate` has something to report on.
:class:`Skeleton` is the compact form used by every hot loop: events are
numbered ``0..n-1`` and each condition is a triple ``(producer, consumer,
place)`` with ``-1`` standing for "initial" and "not consumed".  For a valid
process the skeleton determines the process up to renaming of conditions.
"""

from __future__ import annotations

import itertools
from collections import Counter
from collections.abc import Iterable, Iterator, Mapping
from dataclasses import dataclass, field
from functools import cached_property
from typing import NamedTuple

from .multiset import Multiset
from .net import Net, NetError, NotEnabledError, as_sequence

POLICIES = ("fifo", "lifo")


class ProcessError(NetError):
    """Raised on ill-formed process structures or illegal extensions."""


class Skeleton(NamedTuple):
    labels: tuple[str, ...]
    conds: tuple[tuple[int, int, str], ...]

    @property
    def size(self) -> int:
        return len(self.labels)


# -- skeleton-level kernels ---------------------------------------------------


def sk_initial(net: Net) -> Skeleton:
    conds = []
    for s in net.places:
        conds.extend([(-1, -1, s)] * net.initial_marking[s])
    return Skeleton((), tuple(conds))


def sk_cut_marking(sk: Skeleton) -> Multiset:
    return Multiset(Counter(s for _, c, s in sk.conds if c < 0))


def _open_by_place(sk: Skeleton) -> dict[str, list[int]]:
    open_: dict[str, list[int]] = {}
    for i, (_, c, s) in enumerate(sk.conds):
        if c < 0:
            open_.setdefault(s, []).append(i)
    return open_


def _apply(net: Net, sk: Skeleton, t: str, chosen: Iterable[int]) -> Skeleton:
    e = len(sk.labels)
    conds = list(sk.conds)
    for i in chosen:
        p, _, s = conds[i]
        conds[i] = (p, e, s)
    for s, w in net.post[t].items():
        conds.extend([(e, -1, s)] * w)
    return Skeleton(sk.labels + (t,), tuple(conds))


def _deficient(net: Net, open_: dict[str, list[int]], t: str) -> dict[str, int]:
    return {s: w - len(open_.get(s, ())) for s, w in net.pre[t].items()
            if w > len(open_.get(s, ()))}


def sk_extend(net: Net, sk: Skeleton, t: str, policy: str = "fifo") -> Skeleton:
    """Append one ``t`` event consuming cut conditions chosen by ``policy``."""
    if policy not in POLICIES:
        raise ValueError(f"unknown policy {policy!r}")
    open_ = _open_by_place(sk)
    short = _deficient(net, open_, t)
    if short:
        raise NotEnabledError(short, what=f"transition {t!r} at cut")
    chosen = []
    for s, w in net.pre[t].items():
        avail = open_[s]
        chosen.extend(avail[:w] if policy == "fifo" else avail[::-1][:w])
    return _apply(net, sk, t, chosen)


def sk_extensions(net: Net, sk: Skeleton, t: str) -> Iterator[Skeleton]:
    """Every way of appending a ``t`` event to the cut (one per choice of tokens)."""
    open_ = _open_by_place(sk)
    if _deficient(net, open_, t):
        return
    options = [itertools.combinations(open_[s], w) for s, w in net.pre[t].items()]
    for pick in itertools.product(*options):
        yield _apply(net, sk, t, itertools.chain.from_iterable(pick))


def sk_predecessors(sk: Skeleton) -> list[set[int]]:
    """Immediate causal predecessors of each event."""
    preds: list[set[int]] = [set() for _ in sk.labels]
    for p, c, _ in sk.conds:
        if p >= 0 and c >= 0:
            preds[c].add(p)
    return preds


def sk_topological(sk: Skeleton) -> list[int]:
    """Events in a causal order; ties go to the smallest event index."""
    import heapq

    preds = sk_predecessors(sk)
    succs: list[list[int]] = [[] for _ in sk.labels]
    indeg = [len(p) for p in preds]
    for e, ps in enumerate(preds):
        for p in ps:
            succs[p].append(e)
    ready = [e for e, d in enumerate(indeg) if d == 0]
    heapq.heapify(ready)
    out = []
    while ready:
        e = heapq.heappop(ready)
        out.append(e)
        for f in succs[e]:
            indeg[f] -= 1
            if indeg[f] == 0:
                heapq.heappush(ready, f)
    if len(out) != len(sk.labels):
        raise ProcessError("process flow is cyclic")
    return out


def sk_ancestors(sk: Skeleton) -> list[int]:
    """Bitmask of strict causal ancestors for every event."""
    preds = sk_predecessors(sk)
    anc = [0] * len(sk.labels)
    for e in sk_topological(sk):
        m = 0
        for p in preds[e]:
            m |= anc[p] | (1 << p)
        anc[e] = m
    return anc


def sk_prefix(sk: Skeleton, events: Iterable[int]) -> Skeleton:
    """The prefix determined by a causally downward-closed set of events."""
    keep = sorted(set(events))
    new = {e: i for i, e in enumerate(keep)}
    conds = []
    for p, c, s in sk.conds:
        if p < 0 or p in new:
            conds.append((new.get(p, -1), new.get(c, -1), s))
    return Skeleton(tuple(sk.labels[e] for e in keep), tuple(conds))


def sk_downsets(sk: Skeleton) -> list[int]:
    """All causally downward-closed event sets, as bitmasks, in discovery order."""
    preds = sk_predecessors(sk)
    need = [sum(1 << p for p in ps) for ps in preds]
    n = len(sk.labels)
    seen = {0}
    order = [0]
    frontier = [0]
    while frontier:
        nxt = []
        for d in frontier:
            for e in range(n):
                bit = 1 << e
                if not d & bit and need[e] & d == need[e]:
                    d2 = d | bit
                    if d2 not in seen:
                        seen.add(d2)
                        order.append(d2)
                        nxt.append(d2)
        frontier = nxt
    return order


def mask_events(mask: int) -> list[int]:
    return [i for i in range(mask.bit_length()) if mask >> i & 1]


def sk_proc(net: Net, seq, policy: str = "fifo") -> Skeleton:
    sk = sk_initial(net)
    for i, t in enumerate(as_sequence(seq)):
        if t not in net.trans_index:
            raise NetError(f"unknown transition {t!r} at position {i}")
        sk = sk_extend(net, sk, t, policy)
    return sk


# -- explicit processes ----------------------------------------------------------


@dataclass(frozen=True, eq=False)
class ProcessCut:
    conditions: frozenset[str]
    marking: Multiset


@dataclass(frozen=True, eq=False)
class GRProcess:
    """A candidate process ``(N, pi)`` with explicit node ids.

    ``arcs`` holds the unit-weight flow pairs ``(x, y)``; ``fold`` maps every
    condition to a place and every event to a transition.  Condition and event
    tuples are in creation order.
    """

    conditions: tuple[str, ...]
    events: tuple[str, ...]
    arcs: frozenset[tuple[str, str]]
    initial: frozenset[str]
    fold: Mapping[str, str] = field(default_factory=dict)

    def __eq__(self, other) -> bool:
        if not isinstance(other, GRProcess):
            return NotImplemented
        return (self.conditions == other.conditions and self.events == other.events
                and self.arcs == other.arcs and self.initial == other.initial
                and dict(self.fold) == dict(other.fold))

    def __hash__(self) -> int:
        return hash((self.conditions, self.events, self.arcs, self.initial))

    def __repr__(self) -> str:
        return f"GRProcess(|conditions|={len(self.conditions)}, events={list(self.linear_labels())})"

    @classmethod
    def from_skeleton(cls, sk: Skeleton) -> "GRProcess":
        events = tuple(f"e{i}" for i in range(len(sk.labels)))
        conditions = tuple(f"c{j}" for j in range(len(sk.conds)))
        arcs = set()
        initial = set()
        fold = {}
        for e, t in zip(events, sk.labels):
            fold[e] = t
        for cid, (p, c, s) in zip(conditions, sk.conds):
            fold[cid] = s
            if p < 0:
                initial.add(cid)
            else:
                arcs.add((events[p], cid))
            if c >= 0:
                arcs.add((cid, events[c]))
        proc = cls(conditions, events, frozenset(arcs), frozenset(initial), fold)
        object.__setattr__(proc, "_skeleton", sk)
        return proc

    @cached_property
    def _pre(self) -> dict[str, list[str]]:
        d: dict[str, list[str]] = {x: [] for x in self.conditions + self.events}
        for x, y in sorted(self.arcs):
            if y in d:
                d[y].append(x)
        return d

    @cached_property
    def _post(self) -> dict[str, list[str]]:
        d: dict[str, list[str]] = {x: [] for x in self.conditions + self.events}
        for x, y in sorted(self.arcs):
            if x in d:
                d[x].append(y)
        return d

    def preset(self, x: str) -> list[str]:
        return self._pre[x]

    def postset(self, x: str) -> list[str]:
        return self._post[x]

    def skeleton(self) -> Skeleton:
        """Compact form; raises :class:`ProcessError` on a branching condition."""
        sk = self.__dict__.get("_skeleton")
        if sk is not None:
            return sk
        eidx = {e: i for i, e in enumerate(self.events)}
        conds = []
        for c in self.conditions:
            pre, post = self._pre[c], self._post[c]
            if len(pre) > 1 or len(post) > 1:
                raise ProcessError(f"condition {c} is branched")
            conds.append((eidx[pre[0]] if pre else -1, eidx[post[0]] if post else -1, self.fold[c]))
        sk = Skeleton(tuple(self.fold[e] for e in self.events), tuple(conds))
        object.__setattr__(self, "_skeleton", sk)
        return sk

    def linear_labels(self) -> tuple[str, ...]:
        return tuple(self.fold.get(e, "?") for e in self.events)

    def to_json(self) -> dict:
        sk = self.skeleton()
        return {
            "conditions": [
                {"id": cid, "place": s,
                 "pre_event": self.events[p] if p >= 0 else None,
                 "post_event": self.events[c] if c >= 0 else None}
                for cid, (p, c, s) in zip(self.conditions, sk.conds)
            ],
            "events": [{"id": e, "transition": t, "index": i}
                       for i, (e, t) in enumerate(zip(self.events, sk.labels))],
        }


def _closure_reaches(proc: GRProcess) -> dict[str, set[str]]:
    """Strict successors under the transitive closure of the flow."""
    reach: dict[str, set[str]] = {}

    def visit(x: str, stack: set[str]) -> set[str]:
        if x in reach:
            return reach[x]
        if x in stack:
            raise ProcessError(f"flow is cyclic through {x}")
        stack.add(x)
        out: set[str] = set()
        for y in proc.postset(x):
            out.add(y)
            out |= visit(y, stack)
        stack.discard(x)
        reach[x] = out
        return out

    for x in proc.conditions + proc.events:
        visit(x, set())
    return reach


def validate(net: Net, proc: GRProcess) -> list[str]:
    """List every violated clause of the process definition (empty when valid)."""
    out: list[str] = []
    conds, events = set(proc.conditions), set(proc.events)
    if conds & events:
        out.append(f"node sets overlap: {sorted(conds & events)}")
    for x, y in sorted(proc.arcs):
        if not ((x in conds and y in events) or (x in events and y in conds)):
            out.append(f"arc ({x}, {y}) does not connect a condition and an event")
    for c in proc.conditions:
        pre, post = proc.preset(c), proc.postset(c)
        if len(pre) > 1:
            out.append(f"|•s| <= 1 violated at condition {c}: pre-events {pre}")
        if len(post) > 1:
            out.append(f"|s•| <= 1 violated at condition {c}: post-events {post}")
        if (c in proc.initial) != (not pre):
            out.append(f"initial-condition clause violated at {c}: "
                       f"{'initial' if c in proc.initial else 'not initial'} with {len(pre)} pre-event(s)")
    for e in proc.events:
        if not proc.preset(e):
            out.append(f"event {e} has an empty preset")
    try:
        _closure_reaches(proc)
    except ProcessError as exc:
        out.append(f"flow is not acyclic: {exc}")
    for c in proc.conditions:
        if proc.fold.get(c) not in net.place_index:
            out.append(f"fold maps condition {c} to {proc.fold.get(c)!r}, not a place")
    for e in proc.events:
        if proc.fold.get(e) not in net.trans_index:
            out.append(f"fold maps event {e} to {proc.fold.get(e)!r}, not a transition")
    init_img = Counter(proc.fold.get(c) for c in proc.initial)
    for s in net.places:
        if init_img.get(s, 0) != net.initial_marking[s]:
            out.append(f"initial marking clause violated at place {s}: "
                       f"M0={net.initial_marking[s]}, initial conditions={init_img.get(s, 0)}")
    for e in proc.events:
        t = proc.fold.get(e)
        if t not in net.trans_index:
            continue
        pre_img = Counter(proc.fold.get(c) for c in proc.preset(e))
        post_img = Counter(proc.fold.get(c) for c in proc.postset(e))
        for s in net.places:
            if net.F(s, t) != pre_img.get(s, 0):
                out.append(f"arc-weight clause violated at event {e} ({t}), preplace {s}: "
                           f"F={net.F(s, t)}, preimage count={pre_img.get(s, 0)}")
            if net.F(t, s) != post_img.get(s, 0):
                out.append(f"arc-weight clause violated at event {e} ({t}), postplace {s}: "
                           f"F={net.F(t, s)}, preimage count={post_img.get(s, 0)}")
    return out


def initial_process(net: Net) -> GRProcess:
    return GRProcess.from_skeleton(sk_initial(net))


def extend(net: Net, proc: GRProcess, t: str, policy: str = "fifo") -> GRProcess:
    if t not in net.trans_index:
        raise NetError(f"unknown transition {t!r}")
    return GRProcess.from_skeleton(sk_extend(net, proc.skeleton(), t, policy))


def extensions(net: Net, proc: GRProcess, t: str) -> list[GRProcess]:
    return [GRProcess.from_skeleton(s) for s in sk_extensions(net, proc.skeleton(), t)]


def proc(net: Net, seq, policy: str = "fifo") -> GRProcess:
    """The process obtained by extending the initial process along ``seq``."""
    return GRProcess.from_skeleton(sk_proc(net, seq, policy))


def prefix_of(small: GRProcess, big: GRProcess) -> bool:
    """``small <= big``: containment with matching initial conditions, flow and fold."""
    if not (set(small.conditions) <= set(big.conditions) and set(small.events) <= set(big.events)):
        return False
    if small.initial != big.initial:
        return False
    nodes = set(small.conditions) | set(small.events)
    restricted = {(x, y) for x, y in big.arcs if x in nodes and y in nodes}
    if restricted != set(small.arcs):
        return False
    return all(small.fold.get(x) == big.fold.get(x) for x in nodes)


def prefix_by_events(p: GRProcess, events: Iterable[str]) -> GRProcess:
    """The prefix of ``p`` spanned by a causally downward-closed event set."""
    keep = set(events)
    unknown = keep - set(p.events)
    if unknown:
        raise ProcessError(f"unknown events {sorted(unknown)}")
    for e in keep:
        for c in p.preset(e):
            for f in p.preset(c):
                if f not in keep:
                    raise ProcessError(f"event set not downward closed: {e} needs {f}")
    conds = tuple(c for c in p.conditions if all(f in keep for f in p.preset(c)))
    cset = set(conds)
    evs = tuple(e for e in p.events if e in keep)
    nodes = cset | keep
    arcs = frozenset((x, y) for x, y in p.arcs if x in nodes and y in nodes)
    fold = {x: p.fold[x] for x in conds + evs}
    return GRProcess(conds, evs, arcs, p.initial, fold)


def cut(p: GRProcess) -> ProcessCut:
    sk = p.skeleton()
    conds = frozenset(cid for cid, (_, c, _) in zip(p.conditions, sk.conds) if c < 0)
    return ProcessCut(conds, sk_cut_marking(sk))


def linearize(p: GRProcess) -> tuple[str, ...]:
    sk = p.skeleton()
    return tuple(sk.labels[e] for e in sk_topological(sk))


def dump(p: GRProcess) -> dict:
    return p.to_json()


__all__ = [
    "GRProcess", "POLICIES", "ProcessCut", "ProcessError", "Skeleton", "cut", "dump",
    "extend", "extensions", "initial_process", "linearize", "prefix_by_events",
    "prefix_of", "proc", "validate",
]
