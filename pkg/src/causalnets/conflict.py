"""Semantic conflict, (binary-)conflict-freeness and structural conflict nets."""

from __future__ import annotations

import itertools
from collections.abc import Mapping
from dataclasses import dataclass

from .multiset import Multiset, leq
from .net import Bounds, Exploration, Net, Verdict, explore, pre_post

PROPERTIES = ("conflict_free", "binary_conflict_free", "structural")


@dataclass(frozen=True)
class ConflictReport:
    property: str
    verdict: Verdict

    @property
    def witness(self):
        return self.verdict.witness

    def to_json(self) -> dict:
        return {"property": self.property, **self.verdict.to_json()}


def _restriction_enabled(net: Net, m: Multiset, t: str, k: int) -> bool:
    return all(m[s] >= k * w for s, w in net.pre[t].items())


def in_conflict(net: Net, marking: Mapping[str, int], step: Mapping[str, int]) -> bool:
    """Each single-transition restriction of ``step`` is enabled but ``step`` is not."""
    m = marking if isinstance(marking, Multiset) else Multiset(marking)
    g = step if isinstance(step, Multiset) else Multiset(step)
    if not g:
        raise ValueError("a step must be non-empty")
    if not all(_restriction_enabled(net, m, t, k) for t, k in g.items()):
        return False
    return not leq(pre_post(net, g)[0], m)


def _max_multiplicity(net: Net, m: Multiset, t: str) -> int:
    return min(m[s] // w for s, w in net.pre[t].items())


def _conflicts_at(net: Net, m: Multiset, binary: bool):
    """First conflicting multiset at ``m`` (smallest cardinality first), or None."""
    caps = [(t, _max_multiplicity(net, m, t)) for t in net.transitions]
    caps = [(t, k) for t, k in caps if k > 0]
    if binary:
        for (t, _), (u, _) in itertools.combinations(caps, 2):
            if not leq(net.pre[t] + net.pre[u], m):
                return Multiset({t: 1, u: 1})
        # {t, t} is enabled whenever its restriction {t, t} is.
        return None
    top = Multiset(dict(caps))
    if leq(pre_post(net, top)[0], m):
        return None
    ts = [t for t, _ in caps]
    ranges = [range(k + 1) for _, k in caps]
    candidates = [g for g in itertools.product(*ranges) if any(g)]
    candidates.sort(key=lambda g: (sum(g), [-x for x in g]))
    for g in candidates:
        step = Multiset({t: k for t, k in zip(ts, g) if k})
        if not leq(pre_post(net, step)[0], m):
            return step
    return None


def _witness(net: Net, ex: Exploration, m: Multiset, **extra) -> dict:
    return {"marking": net.marking_json(m), "reached_by": " ".join(ex.path(m)), **extra}


def check_conflict_freeness(net: Net, bounds: Bounds | None = None, mode: str = "general",
                            exploration: Exploration | None = None) -> ConflictReport:
    """Search reachable markings for a multiset in semantic conflict.

    ``mode="binary"`` restricts the search to two-element multisets.
    """
    if mode not in ("general", "binary"):
        raise ValueError(f"unknown mode {mode!r}")
    ex = exploration or explore(net, bounds)
    prop = "binary_conflict_free" if mode == "binary" else "conflict_free"
    for m in ex.markings:
        g = _conflicts_at(net, m, mode == "binary")
        if g is not None:
            return ConflictReport(prop, Verdict.fails(_witness(net, ex, m, step=net.step_json(g))))
    if ex.closed:
        return ConflictReport(prop, Verdict.holds())
    return ConflictReport(prop, Verdict.unknown(ex.verdict.bound_hit))


def check_structural(net: Net, bounds: Bounds | None = None,
                     exploration: Exploration | None = None) -> ConflictReport:
    """Jointly enabled pairs ``{t, u}`` (``t == u`` included) must have disjoint presets."""
    ex = exploration or explore(net, bounds)
    ts = net.transitions
    for m in ex.markings:
        for i, t in enumerate(ts):
            for u in ts[i:]:
                if not leq(net.pre[t] + net.pre[u], m):
                    continue
                shared = [s for s in net.places if net.pre[t][s] and net.pre[u][s]]
                if shared:
                    step = Multiset([t, u])
                    return ConflictReport("structural", Verdict.fails(_witness(
                        net, ex, m, step=net.step_json(step), shared_place=shared[0])))
    if ex.closed:
        return ConflictReport("structural", Verdict.holds())
    return ConflictReport("structural", Verdict.unknown(ex.verdict.bound_hit))


def conflict_reports(net: Net, bounds: Bounds | None = None) -> list[ConflictReport]:
    """All three properties over one shared exploration."""
    ex = explore(net, bounds)
    return [
        check_conflict_freeness(net, bounds, "general", ex),
        check_conflict_freeness(net, bounds, "binary", ex),
        check_structural(net, bounds, ex),
    ]


__all__ = [
    "ConflictReport", "PROPERTIES", "check_conflict_freeness", "check_structural",
    "conflict_reports", "in_conflict",
]
