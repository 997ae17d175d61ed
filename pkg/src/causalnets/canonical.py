"""Canonical labelling of process skeletons up to fold-respecting isomorphism.

Events are coloured by transition label and refined by the colours of their
neighbours (with the place of the connecting condition) until the partition is
stable.  Remaining ties are broken by individualising each member of the first
non-singleton cell in turn; the lexicographically least relabelled condition
list over all leaves is the canonical form.  Two events with identical
neighbourhoods are interchangeable by an automorphism, so only one of them is
individualised.

Conditions need no labelling of their own: given an event numbering, a
condition is fully described by its ``(producer, consumer, place)`` triple, and
conditions with equal triples are interchangeable.
"""

from __future__ import annotations

from .process import Skeleton


def _rank(keys: list) -> list[int]:
    table = {k: i for i, k in enumerate(sorted(set(keys)))}
    return [table[k] for k in keys]


class _Graph:
    __slots__ = ("n", "labels", "conds", "inc", "out", "twin_key")

    def __init__(self, sk: Skeleton):
        n = len(sk.labels)
        self.n = n
        self.labels = sk.labels
        self.conds = sk.conds
        inc: list[list[tuple[str, int]]] = [[] for _ in range(n)]
        out: list[list[tuple[str, int]]] = [[] for _ in range(n)]
        for p, c, s in sk.conds:
            if c >= 0:
                inc[c].append((s, p))
            if p >= 0:
                out[p].append((s, c))
        self.inc = inc
        self.out = out
        self.twin_key = [(tuple(sorted(inc[e])), tuple(sorted(out[e]))) for e in range(n)]

    def refine(self, colors: list[int]) -> list[int]:
        inc, out = self.inc, self.out
        ncol = len(set(colors))
        while True:
            sigs = []
            for e in range(self.n):
                sigs.append((
                    colors[e],
                    tuple(sorted((s, colors[p] if p >= 0 else -1) for s, p in inc[e])),
                    tuple(sorted((s, colors[c] if c >= 0 else -1) for s, c in out[e])),
                ))
            colors = _rank(sigs)
            k = len(set(colors))
            if k == ncol:
                return colors
            ncol = k

    def encode(self, colors: list[int]) -> tuple:
        return tuple(sorted(
            (colors[p] if p >= 0 else -1, colors[c] if c >= 0 else -1, s)
            for p, c, s in self.conds
        ))

    def search(self, colors: list[int], best: list):
        n = self.n
        counts: dict[int, int] = {}
        for c in colors:
            counts[c] = counts.get(c, 0) + 1
        target = min((c for c, k in counts.items() if k > 1), default=None)
        if target is None:
            enc = self.encode(colors)
            if best[0] is None or enc < best[0]:
                best[0] = enc
                best[1] = colors
            return
        seen_twins = set()
        for v in range(n):
            if colors[v] != target:
                continue
            tk = self.twin_key[v]
            if tk in seen_twins:
                continue
            seen_twins.add(tk)
            keyed = [(colors[e], 0 if e == v else 1) if colors[e] == target else (colors[e], 0)
                     for e in range(n)]
            self.search(self.refine(_rank(keyed)), best)


def canonical_labelling(sk: Skeleton) -> list[int]:
    """New index for every event of ``sk`` under the canonical relabelling."""
    if not sk.labels:
        return []
    g = _Graph(sk)
    best: list = [None, None]
    g.search(g.refine(_rank(list(sk.labels))), best)
    return best[1]


def canonical(sk: Skeleton) -> Skeleton:
    """Canonical representative of the isomorphism class of ``sk``."""
    if not sk.labels:
        return Skeleton((), tuple(sorted(sk.conds)))
    g = _Graph(sk)
    best: list = [None, None]
    g.search(g.refine(_rank(list(sk.labels))), best)
    perm = best[1]
    labels = [None] * g.n
    for e, i in enumerate(perm):
        labels[i] = sk.labels[e]
    return Skeleton(tuple(labels), best[0])
