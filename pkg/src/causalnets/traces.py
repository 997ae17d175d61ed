"""Adjacency of firing sequences, trace classes, and the FS/BD correspondence.

Adjacency here is marking dependent (two neighbouring transitions may be
exchanged only when they are jointly enabled as a step at that point), so
classes are materialised explicitly instead of through an independence-based
normal form.
"""

from __future__ import annotations

from collections import deque
from collections.abc import Iterable
from dataclasses import dataclass, field

from networkx.utils import UnionFind

from .multiset import Multiset, leq
from .net import Bounds, Net, NetError, NotFiringSequenceError, Verdict, as_sequence
from .process import sk_extend, sk_initial
from .swapping import ClassBudgetExceeded, prefix_reps, sk_bd_rep


class TraceBudgetExceeded(NetError):
    def __init__(self, budget: int, what: str = "trace class"):
        self.budget = budget
        super().__init__(f"{what} budget exceeded: more than {budget} sequences")


def _key(net: Net):
    idx = net.trans_index
    return lambda seq: [idx[t] for t in seq]


def _prefix_markings(net: Net, seq: tuple[str, ...]) -> list[Multiset]:
    marks = [net.initial_marking]
    m = net.initial_marking
    for i, t in enumerate(seq):
        if t not in net.trans_index:
            raise NetError(f"unknown transition {t!r} at position {i}")
        if not leq(net.pre[t], m):
            raise NotFiringSequenceError(
                i, t, {s: w - m[s] for s, w in net.pre[t].items() if w > m[s]})
        m = net.fire(m, t)
        marks.append(m)
    return marks


def _pair_enabled(net: Net, m: Multiset, t: str, u: str) -> bool:
    return leq(net.pre[t] + net.pre[u], m)


def adjacent(net: Net, sigma, rho) -> bool:
    """One exchange of neighbouring transitions that are jointly step-enabled there."""
    s, r = as_sequence(sigma), as_sequence(rho)
    marks = _prefix_markings(net, s)
    _prefix_markings(net, r)
    if len(s) != len(r):
        return False
    diff = [i for i in range(len(s)) if s[i] != r[i]]
    if not diff:
        # sigma = s1 t t s2 exchanged with itself
        return any(s[i] == s[i + 1] and _pair_enabled(net, marks[i], s[i], s[i])
                   for i in range(len(s) - 1))
    if len(diff) != 2 or diff[1] != diff[0] + 1:
        return False
    i = diff[0]
    if (s[i], s[i + 1]) != (r[i + 1], r[i]):
        return False
    return _pair_enabled(net, marks[i], s[i], s[i + 1])


def _neighbours(net: Net, seq: tuple[str, ...], marks: list[Multiset]):
    for i in range(len(seq) - 1):
        t, u = seq[i], seq[i + 1]
        if t != u and _pair_enabled(net, marks[i], t, u):
            yield seq[:i] + (u, t) + seq[i + 2:]


@dataclass(frozen=True)
class TraceClass:
    members: tuple[tuple[str, ...], ...]
    canonical_member: tuple[str, ...]
    transition_multiset: Multiset = field(compare=False)

    def __contains__(self, seq) -> bool:
        return as_sequence(seq) in self._set

    @property
    def _set(self) -> frozenset:
        s = self.__dict__.get("_members_set")
        if s is None:
            s = frozenset(self.members)
            object.__setattr__(self, "_members_set", s)
        return s

    def __len__(self) -> int:
        return len(self.members)

    @property
    def length(self) -> int:
        return len(self.canonical_member)

    def to_json(self) -> dict:
        return {"canonical_member": " ".join(self.canonical_member), "size": len(self.members)}


def trace_class(net: Net, sigma, budget: int = 50_000) -> TraceClass:
    """Breadth-first closure of ``sigma`` under adjacency."""
    start = as_sequence(sigma)
    _prefix_markings(net, start)
    seen = {start}
    queue = deque([start])
    while queue:
        cur = queue.popleft()
        for nb in _neighbours(net, cur, _prefix_markings(net, cur)):
            if nb not in seen:
                seen.add(nb)
                if len(seen) > budget:
                    raise TraceBudgetExceeded(budget)
                queue.append(nb)
    members = tuple(sorted(seen, key=_key(net)))
    return TraceClass(members, members[0], Multiset(start))


def trace_leq(c1: TraceClass, c2: TraceClass) -> bool:
    """Some member of ``c2`` starts with a member of ``c1``."""
    k = c1.length
    if k > c2.length or not c1.transition_multiset <= c2.transition_multiset:
        return False
    return any(mu[:k] in c1 for mu in c2.members)


# -- whole-behaviour machinery ------------------------------------------------------------


@dataclass
class TracePartition:
    """Firing sequences up to a length, grouped into trace classes."""

    net: Net
    max_len: int
    markings: dict[tuple[str, ...], Multiset]
    class_of: dict[tuple[str, ...], tuple[str, ...]]
    classes: dict[tuple[str, ...], list[tuple[str, ...]]]
    complete: bool

    def trace_class(self, canon: tuple[str, ...]) -> TraceClass:
        members = tuple(self.classes[canon])
        return TraceClass(members, canon, Multiset(canon))


def trace_partition(net: Net, max_len: int, budget: int = 50_000) -> TracePartition:
    """Enumerate ``FS(N)`` up to ``max_len`` and partition it by adjacency.

    ``complete`` is true when no firing sequence longer than ``max_len`` exists.
    Raises :class:`TraceBudgetExceeded` past ``budget`` sequences.
    """
    marks: dict[tuple[str, ...], Multiset] = {(): net.initial_marking}
    level = [()]
    complete = True
    for depth in range(max_len + 1):
        nxt = []
        for seq in level:
            m = marks[seq]
            for t in net.transitions:
                if leq(net.pre[t], m):
                    if depth == max_len:
                        complete = False
                        break
                    s2 = seq + (t,)
                    marks[s2] = net.fire(m, t)
                    nxt.append(s2)
            if len(marks) > budget:
                raise TraceBudgetExceeded(budget, "firing-sequence")
        level = nxt
        if not level:
            break
    uf = UnionFind(marks)
    for seq in marks:
        for i in range(len(seq) - 1):
            t, u = seq[i], seq[i + 1]
            if t != u and _pair_enabled(net, marks[seq[:i]], t, u):
                uf.union(seq, seq[:i] + (u, t) + seq[i + 2:])
    key = _key(net)
    classes: dict[tuple[str, ...], list[tuple[str, ...]]] = {}
    for group in uf.to_sets():
        members = sorted(group, key=key)
        classes[members[0]] = members
    classes = dict(sorted(classes.items(), key=lambda kv: (len(kv[0]), key(kv[0]))))
    class_of = {s: canon for canon, ms in classes.items() for s in ms}
    return TracePartition(net, max_len, marks, class_of, classes, complete)


@dataclass
class CorrespondenceReport:
    net: str
    max_len: int
    verdict: Verdict
    sequences: int = 0
    trace_classes: int = 0
    bd_classes: int = 0
    maximal_trace_classes: int = 0
    maximal_bd_classes: int = 0
    complete: bool = False
    counterexamples: list = field(default_factory=list)

    def to_json(self) -> dict:
        return {
            "net": self.net,
            "max_len": self.max_len,
            "verdict": self.verdict.to_json(),
            "sequences": self.sequences,
            "trace_classes": self.trace_classes,
            "bd_classes": self.bd_classes,
            "maximal_trace_classes": self.maximal_trace_classes,
            "maximal_bd_classes": self.maximal_bd_classes,
            "behaviour_complete": self.complete,
            "counterexamples": self.counterexamples,
        }


def _fmt(seq: Iterable[str]) -> str:
    return " ".join(seq)


def correspondence_check(net: Net, max_len: int, bounds: Bounds | None = None,
                         partition: TracePartition | None = None,
                         max_counterexamples: int = 10) -> CorrespondenceReport:
    """Compare trace equivalence/prefix with swapping equivalence/prefix on ``FS(N)``.

    For every pair of firing sequences up to ``max_len``: equivalent under
    adjacency iff their (fifo-built) processes are swapping equivalent, and the
    prefix orders on the two kinds of classes agree.
    """
    bounds = bounds or Bounds()
    report = CorrespondenceReport(net.name, max_len, Verdict.holds())
    try:
        part = partition or trace_partition(net, max_len, bounds.trace_budget)
        report.sequences = len(part.markings)
        report.complete = part.complete
        skel = {(): sk_initial(net)}
        bd = {}
        for seq in part.markings:
            if seq:
                skel[seq] = sk_extend(net, skel[seq[:-1]], seq[-1], "fifo")
            bd[seq] = sk_bd_rep(skel[seq], bounds.class_budget)
        del skel
        cex = report.counterexamples

        tr_to_bd: dict[tuple, set] = {}
        bd_to_tr: dict = {}
        for seq, canon in part.class_of.items():
            tr_to_bd.setdefault(canon, set()).add(bd[seq])
            bd_to_tr.setdefault(bd[seq], set()).add(canon)
        for canon, reps in tr_to_bd.items():
            if len(reps) > 1:
                members = part.classes[canon]
                first = {}
                for s in members:
                    first.setdefault(bd[s], s)
                a, b = list(first.values())[:2]
                cex.append({"kind": "trace-equivalent but not swapping-equivalent",
                            "sigma": _fmt(a), "rho": _fmt(b)})
        for rep, canons in bd_to_tr.items():
            if len(canons) > 1:
                a, b = sorted(canons, key=_key(net))[:2]
                cex.append({"kind": "swapping-equivalent but not trace-equivalent",
                            "sigma": _fmt(a), "rho": _fmt(b)})
        report.trace_classes = len(part.classes)
        report.bd_classes = len(bd_to_tr)

        dead = [c for c in part.classes if not net.enabled_transitions(part.markings[c])]
        report.maximal_trace_classes = len(dead)
        report.maximal_bd_classes = len({bd[c] for c in dead})

        if not cex:
            phi = {canon: next(iter(reps)) for canon, reps in tr_to_bd.items()}
            below: dict[tuple, set] = {c: set() for c in part.classes}
            for canon, members in part.classes.items():
                acc = below[canon]
                for mu in members:
                    for k in range(len(mu) + 1):
                        acc.add(part.class_of[mu[:k]])
            for canon in part.classes:
                mapped = {phi[c] for c in below[canon]}
                bd_below = prefix_reps(phi[canon], bounds.class_budget)
                if mapped != set(bd_below):
                    inv = {v: k for k, v in phi.items()}
                    for r in sorted(set(bd_below) ^ mapped):
                        lo = _fmt(inv[r]) if r in inv else repr(r)
                        cex.append({"kind": "prefix orders disagree",
                                    "lower": lo, "upper": _fmt(canon),
                                    "trace_leq": r in mapped, "bd_leq": r in bd_below})
        if cex:
            del cex[max_counterexamples:]
            report.verdict = Verdict.fails(cex[0])
    except (TraceBudgetExceeded, ClassBudgetExceeded) as exc:
        report.verdict = Verdict.unknown(str(exc))
    return report


def directedness_check(net: Net, max_len: int, bounds: Bounds | None = None,
                       ext_len: int | None = None) -> Verdict:
    """Every two firing sequences up to ``max_len`` have trace-equivalent extensions.

    Extensions are searched among firing sequences up to ``ext_len`` (default
    ``2 * max_len``).  Fails only when ``FS(N)`` was enumerated completely.
    """
    bounds = bounds or Bounds()
    ext_len = 2 * max_len if ext_len is None else ext_len
    try:
        part = trace_partition(net, ext_len, bounds.trace_budget)
    except TraceBudgetExceeded as exc:
        return Verdict.unknown(str(exc))
    ext: dict[tuple, set] = {c: set() for c in part.classes if len(c) <= max_len}
    for seq, canon in part.class_of.items():
        for k in range(min(len(seq), max_len) + 1):
            ext[part.class_of[seq[:k]]].add(canon)
    short = list(ext)
    for i, a in enumerate(short):
        for b in short[i + 1:]:
            if ext[a].isdisjoint(ext[b]):
                if part.complete:
                    return Verdict.fails({"sigma": _fmt(a), "rho": _fmt(b)})
                return Verdict.unknown(
                    f"no common extension of {_fmt(a)!r} and {_fmt(b)!r} within length {ext_len}")
    return Verdict.holds()


__all__ = [
    "CorrespondenceReport", "TraceBudgetExceeded", "TraceClass", "TracePartition",
    "adjacent", "correspondence_check", "directedness_check",
    "trace_class", "trace_leq", "trace_partition",
]
