"""Finite multisets over opaque, hashable elements.

A :class:`Multiset` never stores zero counts, so two multisets built over
different underlying domains compare equal whenever their non-zero entries
agree.  Counts are bounded by :data:`COUNT_MAX`; exceeding it raises
:class:`OverflowError` rather than wrapping.
"""

from __future__ import annotations

from collections.abc import Hashable, Iterable, Iterator, Mapping

COUNT_MAX = 2**64 - 1


def _check(n: int) -> int:
    if n < 0:
        raise ValueError(f"negative multiplicity {n}")
    if n > COUNT_MAX:
        raise OverflowError(f"multiplicity {n} exceeds {COUNT_MAX}")
    return n


class Multiset(Mapping):
    """Immutable multiset; behaves as a read-only mapping element -> count."""

    __slots__ = ("_d", "_hash")

    def __init__(self, entries: Mapping | Iterable | None = None):
        d: dict = {}
        if entries is None:
            pass
        elif isinstance(entries, Mapping):
            for k, v in entries.items():
                if _check(int(v)):
                    d[k] = int(v)
        else:
            for k in entries:
                d[k] = _check(d.get(k, 0) + 1)
        self._d = d
        self._hash = None

    @classmethod
    def _raw(cls, d: dict) -> "Multiset":
        m = cls.__new__(cls)
        m._d = d
        m._hash = None
        return m

    # Mapping protocol; missing elements have count 0.
    def __getitem__(self, x) -> int:
        return self._d.get(x, 0)

    def __iter__(self) -> Iterator:
        return iter(self._d)

    def __len__(self) -> int:
        return len(self._d)

    def __contains__(self, x) -> bool:
        return x in self._d

    def __eq__(self, other) -> bool:
        if isinstance(other, Multiset):
            return self._d == other._d
        if isinstance(other, Mapping):
            return self._d == {k: v for k, v in other.items() if v}
        return NotImplemented

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash(frozenset(self._d.items()))
        return self._hash

    def __repr__(self) -> str:
        inner = ", ".join(f"{k!r}: {v}" for k, v in self._d.items())
        return f"Multiset({{{inner}}})"

    @property
    def cardinality(self) -> int:
        return sum(self._d.values())

    def support(self) -> frozenset:
        return frozenset(self._d)

    def elements(self) -> Iterator:
        """Iterate elements with repetition."""
        for k, v in self._d.items():
            for _ in range(v):
                yield k

    def sorted_items(self, key=None) -> list[tuple[Hashable, int]]:
        return sorted(self._d.items(), key=(lambda kv: key(kv[0])) if key else None)

    def __add__(self, other: "Multiset") -> "Multiset":
        return combine(self, other, "sum")

    def __or__(self, other: "Multiset") -> "Multiset":
        return combine(self, other, "union")

    def __and__(self, other: "Multiset") -> "Multiset":
        return combine(self, other, "intersection")

    def __sub__(self, other: "Multiset") -> "Multiset":
        return monus(self, other)

    def __le__(self, other: "Multiset") -> bool:
        return leq(self, other)

    def __mul__(self, k: int) -> "Multiset":
        return scale_restrict(self, k, None)

    __rmul__ = __mul__


EMPTY = Multiset()


def combine(a: Multiset, b: Multiset, mode: str = "sum") -> Multiset:
    """Pointwise sum, union (max) or intersection (min) of two multisets."""
    if mode == "sum":
        d = dict(a._d)
        for k, v in b._d.items():
            d[k] = _check(d.get(k, 0) + v)
        return Multiset._raw(d)
    if mode == "union":
        d = dict(a._d)
        for k, v in b._d.items():
            if v > d.get(k, 0):
                d[k] = v
        return Multiset._raw(d)
    if mode == "intersection":
        d = {}
        for k, v in a._d.items():
            w = min(v, b._d.get(k, 0))
            if w:
                d[k] = w
        return Multiset._raw(d)
    raise ValueError(f"unknown combine mode {mode!r}")


def monus(a: Multiset, b: Multiset) -> Multiset:
    """Truncated subtraction: max(a(x) - b(x), 0)."""
    d = {}
    for k, v in a._d.items():
        w = v - b._d.get(k, 0)
        if w > 0:
            d[k] = w
    return Multiset._raw(d)


def scale_restrict(a: Multiset, k: int, domain: Iterable | None) -> Multiset:
    """``(k * a)`` restricted to ``domain`` (``None`` keeps every element)."""
    if k < 0:
        raise ValueError("scale factor must be non-negative")
    if k == 0:
        return EMPTY
    keep = None if domain is None else set(domain)
    return Multiset._raw(
        {x: _check(v * k) for x, v in a._d.items() if keep is None or x in keep}
    )


def leq(a: Multiset, b: Multiset) -> bool:
    """Multiset inclusion: a(x) <= b(x) for every x."""
    bd = b._d
    for k, v in a._d.items():
        if v > bd.get(k, 0):
            return False
    return True
