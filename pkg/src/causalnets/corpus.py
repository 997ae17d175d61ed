"""Seeded random nets for property and correspondence sweeps."""

from __future__ import annotations

import random

from .net import Net


def random_net(rng: random.Random, max_places: int = 4, max_transitions: int = 4,
               max_weight: int = 2, max_tokens: int = 2, name: str = "random") -> Net:
    """A small net; every transition gets a non-empty preset."""
    places = [f"s{i}" for i in range(rng.randint(1, max_places))]
    trans = [f"t{i}" for i in range(rng.randint(1, max_transitions))]
    flow: dict[tuple[str, str], int] = {}
    for t in trans:
        pre = rng.sample(places, rng.randint(1, len(places)))
        for s in pre:
            flow[(s, t)] = rng.randint(1, max_weight)
        for s in places:
            if rng.random() < 0.4:
                flow[(t, s)] = rng.randint(1, max_weight)
    marking = {s: rng.randint(0, max_tokens) for s in places}
    return Net(places, trans, flow, marking, name)


def corpus(count: int = 200, seed: int = 2024, **kw) -> list[Net]:
    rng = random.Random(seed)
    return [random_net(rng, name=f"random-{seed}-{i}", **kw) for i in range(count)]


__all__ = ["corpus", "random_net"]
