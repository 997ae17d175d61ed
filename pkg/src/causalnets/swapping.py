"""Swapping of same-place concurrent conditions and the induced process classes.

The equivalence class of a finite process under repeated swaps (up to
isomorphism) is materialised by breadth-first closure over canonical
skeletons.  The least canonical skeleton found is the class representative;
its byte encoding is the class identity.
"""

from __future__ import annotations

from collections import Counter, deque
from collections.abc import Iterable, Iterator
from dataclasses import dataclass, field

from .canonical import canonical
from .multiset import Multiset
from .net import NetError
from .process import (
    GRProcess, ProcessError, Skeleton, mask_events, sk_ancestors, sk_downsets, sk_prefix,
)

FORMAT_HEADER = b"causalnets-bd/1\n"
DEFAULT_CLASS_BUDGET = 20_000


class SwapError(ProcessError):
    pass


class ClassBudgetExceeded(NetError):
    def __init__(self, budget: int):
        self.budget = budget
        super().__init__(f"class budget exceeded: more than {budget} distinct processes in one class")


# -- swaps -------------------------------------------------------------------------


def _causally_before(anc: list[int], c1: tuple[int, int, str], c2: tuple[int, int, str]) -> bool:
    """True when condition ``c1`` precedes condition ``c2`` in the flow order."""
    x, b = c1[1], c2[0]
    return x >= 0 and b >= 0 and (x == b or bool(anc[b] >> x & 1))


def sk_swaps(sk: Skeleton) -> Iterator[Skeleton]:
    """Every skeleton obtained by one legal, non-trivial swap."""
    anc = sk_ancestors(sk)
    conds = sk.conds
    by_place: dict[str, list[int]] = {}
    prev = None
    for i, c in enumerate(conds):
        if c != prev:
            by_place.setdefault(c[2], []).append(i)
            prev = c
    for s, idx in by_place.items():
        for a in range(len(idx)):
            i = idx[a]
            c1 = conds[i]
            for j in idx[a + 1:]:
                c2 = conds[j]
                if c1[1] == c2[1] or c1[0] == c2[0]:
                    continue
                if _causally_before(anc, c1, c2) or _causally_before(anc, c2, c1):
                    continue
                new = list(conds)
                new[i] = (c1[0], c2[1], s)
                new[j] = (c2[0], c1[1], s)
                new.sort()
                yield Skeleton(sk.labels, tuple(new))


def swap(p: GRProcess, a: str, b: str) -> GRProcess:
    """Exchange the outgoing arcs of two concurrent conditions of the same place."""
    for x in (a, b):
        if x not in p.conditions:
            raise SwapError(f"{x!r} is not a condition")
    if p.fold[a] != p.fold[b]:
        raise SwapError(f"not same place: {a} -> {p.fold[a]}, {b} -> {p.fold[b]}")
    from .process import _closure_reaches

    reach = _closure_reaches(p)
    if b in reach[a] or a in reach[b]:
        raise SwapError(f"causally ordered conditions: {a}, {b}")
    events = set(p.events)
    arcs = set()
    for x, y in p.arcs:
        if x == a and y in events:
            arcs.add((b, y))
        elif x == b and y in events:
            arcs.add((a, y))
        else:
            arcs.add((x, y))
    return GRProcess(p.conditions, p.events, frozenset(arcs), p.initial, dict(p.fold))


def isomorphic(p: GRProcess, q: GRProcess) -> bool:
    return canonical(p.skeleton()) == canonical(q.skeleton())


# -- classes -------------------------------------------------------------------------


def encode(rep: Skeleton) -> bytes:
    """Versioned byte encoding of a canonical skeleton.

    Layout: the header line, an ``E`` line with the event labels in canonical
    order, then one ``C <producer> <consumer> <place>`` line per condition in
    canonical order (``-`` marks an absent producer or consumer).
    """
    lines = ["E " + " ".join(rep.labels)]
    for p, c, s in rep.conds:
        lines.append(f"C {p if p >= 0 else '-'} {c if c >= 0 else '-'} {s}")
    return FORMAT_HEADER + ("\n".join(lines) + "\n").encode("utf-8")


_REP: dict[Skeleton, Skeleton] = {}
_MEMBERS: dict[Skeleton, tuple[Skeleton, ...]] = {}
_CACHE_LIMIT = 500_000


def _remember(members: tuple[Skeleton, ...], rep: Skeleton) -> None:
    if len(_REP) > _CACHE_LIMIT:
        _REP.clear()
        _MEMBERS.clear()
    for m in members:
        _REP[m] = rep
    _MEMBERS[rep] = members


def clear_caches() -> None:
    _REP.clear()
    _MEMBERS.clear()
    _PREFIXES.clear()


def sk_closure(sk: Skeleton, budget: int = DEFAULT_CLASS_BUDGET) -> tuple[Skeleton, ...]:
    """All canonical skeletons swapping-equivalent to ``sk``, sorted.

    The search runs on skeletons sharing the start's event numbering, so most
    revisits are caught by plain tuple lookup; only new ones are canonicalised.
    A skeleton isomorphic to one already found is not expanded again, since
    its swaps are isomorphic images of that one's.
    """
    start = canonical(sk)
    rep = _REP.get(start)
    if rep is not None:
        if len(_MEMBERS[rep]) > budget:
            raise ClassBudgetExceeded(budget)
        return _MEMBERS[rep]
    labels = start.labels
    seen = {start.conds}
    found = {start}
    queue = deque([start])
    while queue:
        cur = queue.popleft()
        for nb in sk_swaps(cur):
            if nb.conds in seen:
                continue
            seen.add(nb.conds)
            c = canonical(nb)
            if c in found:
                continue
            found.add(c)
            if len(found) > budget:
                raise ClassBudgetExceeded(budget)
            queue.append(Skeleton(labels, nb.conds))
    members = tuple(sorted(found))
    _remember(members, members[0])
    return members


def sk_bd_rep(sk: Skeleton, budget: int = DEFAULT_CLASS_BUDGET, canon: bool = False) -> Skeleton:
    """Class representative; pass ``canon=True`` when ``sk`` is already canonical."""
    c = sk if canon else canonical(sk)
    rep = _REP.get(c)
    if rep is None or len(_MEMBERS[rep]) > budget:
        rep = sk_closure(c, budget)[0]
    return rep


@dataclass(frozen=True, eq=False)
class BDClass:
    """A finite swapping class, identified by the bytes of its representative."""

    canonical_form: bytes
    member_count_explored: int
    transition_multiset: Multiset
    representative: Skeleton = field(repr=False)

    def __eq__(self, other) -> bool:
        if not isinstance(other, BDClass):
            return NotImplemented
        return self.canonical_form == other.canonical_form

    def __hash__(self) -> int:
        return hash(self.canonical_form)

    def __lt__(self, other: "BDClass") -> bool:
        return self.canonical_form < other.canonical_form

    @property
    def size(self) -> int:
        return len(self.representative.labels)

    def members(self, budget: int = DEFAULT_CLASS_BUDGET) -> tuple[Skeleton, ...]:
        return sk_closure(self.representative, budget)

    def to_json(self) -> dict:
        return {
            "canonical_form": self.canonical_form.decode("utf-8"),
            "members": self.member_count_explored,
            "transitions": dict(sorted(self.transition_multiset.items())),
        }


def class_of_skeleton(sk: Skeleton, budget: int = DEFAULT_CLASS_BUDGET) -> BDClass:
    members = sk_closure(sk, budget)
    rep = members[0]
    return BDClass(encode(rep), len(members), Multiset(Counter(rep.labels)), rep)


def bd_canonical(p: GRProcess, budget: int = DEFAULT_CLASS_BUDGET) -> BDClass:
    """The swapping class of a finite process."""
    return class_of_skeleton(p.skeleton(), budget)


def sk_prefix_reps(sk: Skeleton, budget: int = DEFAULT_CLASS_BUDGET) -> set[Skeleton]:
    """Class representatives of the prefixes of one particular process."""
    return {sk_bd_rep(sk_prefix(sk, mask_events(d)), budget) for d in sk_downsets(sk)}


_PREFIXES: dict[Skeleton, frozenset[Skeleton]] = {}


def _maximal_events(sk: Skeleton) -> list[int]:
    inner = {p for p, c, _ in sk.conds if p >= 0 and c >= 0}
    return [e for e in range(len(sk.labels)) if e not in inner]


def prefix_reps(rep: Skeleton, budget: int = DEFAULT_CLASS_BUDGET) -> frozenset[Skeleton]:
    """Representatives of every class below the class of ``rep``.

    Prefixes of a single member are not enough: in the ``fig1`` fixture the
    prefix ``a c`` exists only in the member where ``c`` consumes the token
    produced by ``a``.  So every member is cut back by one maximal event and
    the classes reached are expanded the same way; any prefix of a member is
    reached through such a chain.
    """
    rep = sk_bd_rep(rep, budget)
    out = _PREFIXES.get(rep)
    if out is None:
        acc = {rep}
        below: set[Skeleton] = set()
        n = len(rep.labels)
        for m in sk_closure(rep, budget):
            for e in _maximal_events(m):
                below.add(canonical(sk_prefix(m, [x for x in range(n) if x != e])))
        lower = {sk_bd_rep(b, budget, canon=True) for b in below}
        for r in lower:
            acc |= prefix_reps(r, budget)
        out = frozenset(acc)
        if len(_PREFIXES) > _CACHE_LIMIT:
            _PREFIXES.clear()
        _PREFIXES[rep] = out
    return out


def bd_leq(c1: BDClass, c2: BDClass, budget: int = DEFAULT_CLASS_BUDGET) -> bool:
    """Whether some member of ``c2`` has a prefix in ``c1``."""
    if not c1.transition_multiset <= c2.transition_multiset:
        return False
    return c1.representative in prefix_reps(c2.representative, budget)


@dataclass(frozen=True)
class FiniteBDRun:
    classes: frozenset[BDClass]

    def __contains__(self, c: BDClass) -> bool:
        return c in self.classes

    def __le__(self, other: "FiniteBDRun") -> bool:
        return self.classes <= other.classes

    def __len__(self) -> int:
        return len(self.classes)

    def is_prefix_closed(self, budget: int = DEFAULT_CLASS_BUDGET) -> bool:
        reps = {c.representative for c in self.classes}
        return all(prefix_reps(c.representative, budget) <= reps for c in self.classes)

    def is_directed(self, budget: int = DEFAULT_CLASS_BUDGET) -> bool:
        cs = sorted(self.classes)
        ups = {c: {d for d in cs if bd_leq(c, d, budget)} for c in cs}
        return all(ups[a] & ups[b] for a in cs for b in cs)


def bd_of(p: GRProcess, budget: int = DEFAULT_CLASS_BUDGET) -> FiniteBDRun:
    """Downward closure of the classes of all prefixes of ``p``."""
    reps = sk_prefix_reps(p.skeleton(), budget)
    todo = list(reps)
    while todo:
        r = todo.pop()
        for q in prefix_reps(r, budget):
            if q not in reps:
                reps.add(q)
                todo.append(q)
    return FiniteBDRun(frozenset(class_of_skeleton(r, budget) for r in reps))


def classes_of(ps: Iterable[GRProcess], budget: int = DEFAULT_CLASS_BUDGET) -> list[BDClass]:
    return sorted({bd_canonical(p, budget) for p in ps})


__all__ = [
    "BDClass", "ClassBudgetExceeded", "FiniteBDRun", "SwapError", "bd_canonical", "bd_leq",
    "bd_of", "class_of_skeleton", "clear_caches", "encode", "isomorphic", "swap",
]
