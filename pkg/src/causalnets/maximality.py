"""Maximal processes, maximality notions for swapping classes, and the
conflict-freeness / unique-maximal-class check."""

from __future__ import annotations

from dataclasses import dataclass, field

from .canonical import canonical
from .conflict import check_conflict_freeness, check_structural
from .net import Bounds, Net, Verdict, explore
from .process import Skeleton, sk_cut_marking, sk_extensions, sk_initial, sk_topological
from .swapping import BDClass, ClassBudgetExceeded, class_of_skeleton, sk_closure


def _linear(sk: Skeleton) -> str:
    return " ".join(sk.labels[e] for e in sk_topological(sk))


def _enabled_at_cut(net: Net, sk: Skeleton) -> list[str]:
    return net.enabled_transitions(sk_cut_marking(sk))


@dataclass
class MaximalityReport:
    net: str
    maximal_gr_count: int
    maximal_bd_count: int
    completeness: Verdict
    per_class: list[dict] = field(default_factory=list)
    classes: list[BDClass] = field(default_factory=list, repr=False)
    processes_explored: int = 0

    @property
    def complete(self) -> bool:
        return self.completeness.outcome == "holds"

    def to_json(self) -> dict:
        return {
            "net": self.net,
            "maximal_gr_count": self.maximal_gr_count,
            "maximal_bd_count": self.maximal_bd_count,
            "counts_are_lower_bounds": not self.complete,
            "completeness": self.completeness.to_json(),
            "processes_explored": self.processes_explored,
            "per_class": self.per_class,
        }


def _steps_to_dead(net: Net, ex) -> dict:
    """Fewest firings from each recorded marking to a dead one."""
    preds: dict = {}
    dist = {}
    for m in ex.paths:
        enabled = net.enabled_transitions(m)
        if not enabled:
            dist[m] = 0
        for t in enabled:
            preds.setdefault(net.fire(m, t), []).append(m)
    frontier = list(dist)
    while frontier:
        nxt = []
        for m in frontier:
            for p in preds.get(m, ()):
                if p not in dist:
                    dist[p] = dist[m] + 1
                    nxt.append(p)
        frontier = nxt
    return dist


def enumerate_maximal(net: Net, bounds: Bounds | None = None) -> MaximalityReport:
    """All finite maximal processes up to isomorphism, grouped into swapping classes.

    Processes are grown level by level over every choice of consumed
    conditions; a process is maximal when its cut enables nothing.  The
    enumeration is complete only if the marking behaviour closes within the
    bounds.  When every marking up to ``max_seq_len`` steps is known, processes
    whose cut cannot reach a dead marking in the remaining steps are dropped,
    since they cannot grow into a maximal process within the bound.
    """
    bounds = bounds or Bounds()
    ex = explore(net, bounds)
    dead_in = _steps_to_dead(net, ex) if ex.levels_complete else None
    level = {canonical(sk_initial(net))}
    maximal: list[Skeleton] = []
    explored = 1
    completeness = Verdict.holds() if ex.closed else Verdict.unknown(ex.verdict.bound_hit)
    depth = 0
    while level:
        nxt: set[Skeleton] = set()
        for sk in sorted(level):
            enabled = _enabled_at_cut(net, sk)
            if not enabled:
                maximal.append(sk)
                continue
            if depth == bounds.max_seq_len:
                completeness = Verdict.unknown(
                    f"max_seq_len={bounds.max_seq_len} reached with processes still extensible")
                continue
            for t in enabled:
                for ext in sk_extensions(net, sk, t):
                    if dead_in is not None:
                        d = dead_in.get(sk_cut_marking(ext))
                        if d is None or d > bounds.max_seq_len - depth - 1:
                            continue
                    nxt.add(canonical(ext))
            if explored + len(nxt) > bounds.max_states:
                break
        explored += len(nxt)
        if explored > bounds.max_states:
            completeness = Verdict.unknown(f"max_states={bounds.max_states} processes exceeded")
            break
        level = nxt
        depth += 1

    classes: dict[BDClass, list[Skeleton]] = {}
    try:
        for sk in maximal:
            classes.setdefault(class_of_skeleton(sk, bounds.class_budget), []).append(sk)
    except ClassBudgetExceeded as exc:
        completeness = Verdict.unknown(str(exc))
    ordered = sorted(classes)
    per_class = [{"class": c.to_json(), "gr_processes": len(classes[c]),
                  "example": _linear(classes[c][0])} for c in ordered]
    return MaximalityReport(net.name, len(maximal), len(classes), completeness,
                            per_class, ordered, explored)


def _members(c: BDClass, bounds: Bounds) -> tuple[Skeleton, ...] | Verdict:
    try:
        return sk_closure(c.representative, bounds.class_budget)
    except ClassBudgetExceeded as exc:
        return Verdict.unknown(str(exc))


def weakly_maximal(net: Net, c: BDClass, bounds: Bounds | None = None) -> Verdict:
    """Some member of the class is a maximal process."""
    bounds = bounds or Bounds()
    members = _members(c, bounds)
    if isinstance(members, Verdict):
        return members
    witness = None
    for m in members:
        enabled = _enabled_at_cut(net, m)
        if not enabled:
            return Verdict.holds()
        if witness is None:
            witness = {"member": _linear(m), "enabled": enabled[0]}
    return Verdict.fails(witness)


def bd_maximal(net: Net, c: BDClass, bounds: Bounds | None = None) -> Verdict:
    """No member of a finite class admits an extension.

    Only decided for nets whose behaviour terminates within the bounds; for
    finite classes of such nets this is maximality in the class order.
    """
    bounds = bounds or Bounds()
    ex = explore(net, bounds)
    if not ex.closed:
        return Verdict.unknown(f"behaviour not closed: {ex.verdict.bound_hit}")
    members = _members(c, bounds)
    if isinstance(members, Verdict):
        return members
    for m in members:
        enabled = _enabled_at_cut(net, m)
        if enabled:
            return Verdict.fails({"member": _linear(m), "extension": enabled[0]})
    return Verdict.holds()


@dataclass
class CorollaryReport:
    net: str
    structural: Verdict
    conflict_free: Verdict
    binary_conflict_free: Verdict
    maximality: MaximalityReport
    applicable: bool
    agrees: bool | None
    note: str

    def to_json(self) -> dict:
        return {
            "net": self.net,
            "structural": self.structural.to_json(),
            "conflict_free": self.conflict_free.to_json(),
            "binary_conflict_free": self.binary_conflict_free.to_json(),
            "maximal_bd_count": self.maximality.maximal_bd_count,
            "maximal_gr_count": self.maximality.maximal_gr_count,
            "completeness": self.maximality.completeness.to_json(),
            "applicable": self.applicable,
            "biconditional_holds": self.agrees,
            "note": self.note,
        }


def corollary_check(net: Net, bounds: Bounds | None = None) -> CorollaryReport:
    """On structural conflict nets: conflict-free iff exactly one maximal class."""
    bounds = bounds or Bounds()
    ex = explore(net, bounds)
    st = check_structural(net, bounds, ex).verdict
    cf = check_conflict_freeness(net, bounds, "general", ex).verdict
    bcf = check_conflict_freeness(net, bounds, "binary", ex).verdict
    mx = enumerate_maximal(net, bounds)
    if st.outcome == "fails":
        note = ("not a structural conflict net; the biconditional is not asserted"
                + (" (conflict present yet a single maximal class)"
                   if cf.outcome == "fails" and mx.complete and mx.maximal_bd_count == 1 else ""))
        return CorollaryReport(net.name, st, cf, bcf, mx, False, None, note)
    if st.outcome == "unknown" or cf.outcome == "unknown" or not mx.complete:
        return CorollaryReport(net.name, st, cf, bcf, mx, False, None,
                               "bounds exhausted; nothing asserted")
    agrees = (cf.outcome == "holds") == (mx.maximal_bd_count == 1)
    note = "biconditional satisfied" if agrees else "counterexample: implementation defect"
    return CorollaryReport(net.name, st, cf, bcf, mx, True, agrees, note)


__all__ = [
    "CorollaryReport", "MaximalityReport", "bd_maximal", "corollary_check",
    "enumerate_maximal", "weakly_maximal",
]
