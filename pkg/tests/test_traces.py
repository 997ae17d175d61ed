import random

import pytest

from causalnets.corpus import random_net
from causalnets.net import Bounds, NotFiringSequenceError, fire_sequence, firing_sequences, parse_net
from causalnets.conflict import check_conflict_freeness
from causalnets.traces import (
    TraceBudgetExceeded, adjacent, correspondence_check, directedness_check, trace_class,
    trace_leq, trace_partition,
)


def test_adjacent_examples(fig1, fig2):
    assert adjacent(fig1, "a b c", "b a c")
    assert adjacent(fig2, "a b d c", "a d b c")
    # {b, c} is step-enabled after a: presets {2} and {3, 4} are disjoint and marked
    assert adjacent(fig1, "a b c", "a c b")
    assert not adjacent(fig1, "a b c", "b c a")
    assert not adjacent(fig1, "a b c", "a b c")
    with pytest.raises(NotFiringSequenceError):
        adjacent(fig1, "a b c", "c a b")


def test_self_exchange():
    net = parse_net("net twice\nplace s tokens=2\ntrans t\narc s t\n")
    assert adjacent(net, "t t", "t t")
    one = parse_net("net once\nplace s tokens=1\ntrans t\narc s t\narc t s\n")
    assert not adjacent(one, "t t", "t t")


def test_trace_class_fig1(fig1):
    c = trace_class(fig1, "a b c")
    assert set(c.members) == {("a", "b", "c"), ("b", "a", "c"), ("a", "c", "b"), ("b", "c", "a")}
    assert c.canonical_member == ("a", "b", "c")
    assert len(trace_class(fig1, "")) == 1


def test_trace_class_fig2(fig2):
    c = trace_class(fig2, "a b d c")
    assert "b a d c" in c and "a d b c" in c
    finals = {fire_sequence(fig2, m) for m in c.members}
    assert len(finals) == 1


def test_trace_budget(fig2):
    with pytest.raises(TraceBudgetExceeded):
        trace_class(fig2, "a b d c", budget=2)


def test_trace_leq(fig1):
    abc = trace_class(fig1, "a b c")
    assert trace_leq(trace_class(fig1, "a"), abc)
    assert trace_leq(trace_class(fig1, "b"), abc)
    assert not trace_leq(abc, trace_class(fig1, "a"))


def test_correspondence_fixtures(fig1, fig2, remark):
    r = correspondence_check(fig1, 3)
    assert r.verdict.outcome == "holds"
    assert (r.maximal_trace_classes, r.maximal_bd_classes) == (1, 1)
    r = correspondence_check(fig2, 4)
    assert r.verdict.outcome == "holds" and r.maximal_bd_classes == 1
    r = correspondence_check(remark, 2)
    assert r.verdict.outcome == "holds" and r.maximal_bd_classes == 2


def test_directedness(fig1, fig2, remark):
    assert directedness_check(fig1, 3).outcome == "holds"
    assert directedness_check(fig2, 4).outcome == "holds"
    v = directedness_check(remark, 2)
    assert v.outcome == "fails" and v.witness == {"sigma": "t", "rho": "u"}


def test_directedness_unknown_when_open(fig4):
    net = parse_net("net split\nplace s tokens=1\nplace r tokens=1\ntrans t\ntrans u\ntrans g\n"
                    "arc s t\narc s u\narc r g\narc g r\n")
    assert directedness_check(net, 1, ext_len=3).outcome == "unknown"


def _nets(n, seed0):
    return [random_net(random.Random(seed0 + i), max_places=3, max_transitions=3, name=f"seed{seed0 + i}")
            for i in range(n)]


def _diamonds(net, part):
    for sigma in [s for s in part.markings if len(s) <= 1]:
        for t in net.enabled_transitions(part.markings[sigma]):
            for s in part.markings:
                rho = s[len(sigma):]
                if s[:len(sigma)] == sigma and 0 < len(rho) <= 2 and t not in rho:
                    yield sigma, t, rho


@pytest.mark.parametrize("net", _nets(20, 500), ids=lambda n: n.name)
def test_class_laws(net):
    part = trace_partition(net, 4)
    for canon, members in part.classes.items():
        finals = {part.markings[m] for m in members}
        assert len(finals) == 1
        assert len({tuple(sorted(m)) for m in members}) == 1
    # appending preserves equivalence
    for canon, members in part.classes.items():
        if len(canon) > 3:
            continue
        for t in net.enabled_transitions(part.markings[canon]):
            targets = {part.class_of[m + (t,)] for m in members}
            assert len(targets) == 1


def _binary_conflict_free_to(depth, count):
    """Nets with no binary conflict at any marking reachable in ``depth`` steps."""
    out = []
    seed = 700
    while len(out) < count:
        net = random_net(random.Random(seed), max_places=3, max_transitions=3, name=f"seed{seed}")
        seed += 1
        v = check_conflict_freeness(net, Bounds(max_seq_len=depth), "binary").verdict
        if v.outcome != "fails" and sum(1 for _ in _diamonds(net, trace_partition(net, 4))) >= 5:
            out.append(net)
    return out


DIAMOND_NETS = _binary_conflict_free_to(5, 15)


@pytest.mark.parametrize("net", DIAMOND_NETS, ids=lambda n: n.name)
def test_closing_diamond(net):
    """sigma t, sigma rho firing with t not in rho gives sigma t rho ~ sigma rho t."""
    part = trace_partition(net, 4)
    for sigma, t, rho in _diamonds(net, part):
        a, b = sigma + (t,) + rho, sigma + rho + (t,)
        assert a in part.markings and b in part.markings
        assert part.class_of[a] == part.class_of[b]


@pytest.mark.parametrize("net", DIAMOND_NETS, ids=lambda n: n.name)
def test_conflict_free_swap_lemma(net):
    part = trace_partition(net, 4)
    for sigma in [s for s in part.markings if len(s) <= 2]:
        en = net.enabled_transitions(part.markings[sigma])
        for t in en:
            for u in en:
                if t != u:
                    assert part.class_of[sigma + (t, u)] == part.class_of[sigma + (u, t)]
