import itertools
import random
from collections import Counter, deque

import pytest

from causalnets.canonical import canonical
from causalnets.corpus import random_net
from causalnets.multiset import Multiset
from causalnets.process import (
    GRProcess, extensions, initial_process, mask_events, proc, sk_downsets, sk_extensions, sk_prefix,
    sk_proc, validate,
)
from causalnets.swapping import (
    BDClass, ClassBudgetExceeded, FORMAT_HEADER, SwapError, bd_canonical, bd_leq, bd_of,
    class_of_skeleton, encode, isomorphic, prefix_reps, sk_bd_rep, sk_closure, sk_swaps, swap,
)


def conds_of(p, place):
    return [c for c in p.conditions if p.fold[c] == place]


def naive_closure(sk):
    """Closure that canonicalises every neighbour, no shortcuts."""
    start = canonical(sk)
    seen = {start}
    queue = deque([start])
    while queue:
        cur = queue.popleft()
        for nb in sk_swaps(cur):
            c = canonical(nb)
            if c not in seen:
                seen.add(c)
                queue.append(c)
    return tuple(sorted(seen))


def naive_prefix_reps(rep):
    """Representatives of the classes of every prefix of every member."""
    out = set()
    for m in naive_closure(rep):
        for d in sk_downsets(m):
            out.add(naive_closure(sk_prefix(m, mask_events(d)))[0])
    return out


def sequences(net, n):
    level = [()]
    for _ in range(n):
        nxt = []
        for seq in level:
            from causalnets.net import fire_sequence

            m = fire_sequence(net, seq)
            nxt.extend(seq + (t,) for t in net.enabled_transitions(m))
        level = nxt
    return level


def test_swap_fig1_gives_other_process(fig1):
    left = proc(fig1, "a b c")
    right = proc(fig1, "a b c", "lifo")
    p, q = conds_of(left, "4")
    swapped = swap(left, p, q)
    assert validate(fig1, swapped) == []
    assert isomorphic(swapped, right) and not isomorphic(swapped, left)
    assert isomorphic(swap(swapped, p, q), left)


def test_swap_errors(fig2, fig1):
    p = proc(fig2, "a d")
    initial_p = [c for c in conds_of(p, "p") if c in p.initial]
    produced_p = [c for c in conds_of(p, "p") if c not in p.initial]
    consumed = [c for c in initial_p if p.postset(c)]
    with pytest.raises(SwapError, match="causally ordered"):
        swap(p, consumed[0], produced_p[0])
    with pytest.raises(SwapError, match="not same place"):
        swap(p, conds_of(p, "pa")[0], conds_of(p, "pb")[0])


def test_fig1_maximal_processes_one_class(fig1):
    left, right = proc(fig1, "a b c"), proc(fig1, "a b c", "lifo")
    assert bd_canonical(left) == bd_canonical(right)
    assert bd_canonical(left).member_count_explored == 2
    assert bd_canonical(left).transition_multiset == Multiset("abc")


def test_fig2_maximal_processes_one_class(fig2):
    classes = set()
    for seq in sequences(fig2, 4):
        p = initial_process(fig2)
        level = [p]
        for t in seq:
            level = [q for x in level for q in extensions(fig2, x, t)]
        classes |= {bd_canonical(q) for q in level}
    assert len(classes) == 1


def test_initial_process_class_is_singleton(fig1, fig2):
    for net in (fig1, fig2):
        c = bd_canonical(initial_process(net))
        assert c.member_count_explored == 1 and not c.transition_multiset


def test_bd_leq_examples(fig1, fig2):
    left = bd_canonical(proc(fig1, "a b c"))
    assert bd_leq(bd_canonical(proc(fig1, "a")), left)
    lifo = bd_canonical(proc(fig1, "a b c", "lifo"))
    assert bd_leq(left, lifo) and bd_leq(lifo, left)
    assert not bd_leq(bd_canonical(proc(fig2, "a")), bd_canonical(proc(fig2, "b")))
    # c consuming the token produced by a is a prefix of only one of the two members
    assert bd_leq(bd_canonical(proc(fig1, "a c")), left)
    assert not bd_leq(left, bd_canonical(proc(fig1, "a")))


def test_bd_of_examples(fig1):
    assert len(bd_of(initial_process(fig1))) == 1
    left, right = bd_of(proc(fig1, "a b c")), bd_of(proc(fig1, "a b c", "lifo"))
    assert left == right and len(left) == 7
    assert bd_of(proc(fig1, "a")) <= bd_of(proc(fig1, "a b"))
    assert left.is_prefix_closed() and left.is_directed()


def test_encoding(fig1):
    c = bd_canonical(proc(fig1, "a c"))
    assert c.canonical_form.startswith(FORMAT_HEADER)
    assert c.canonical_form == encode(c.representative)
    assert c.to_json()["transitions"] == {"a": 1, "c": 1}


def test_budget():
    from causalnets.net import parse_net

    net = parse_net("net burst\nplace s tokens=1\nplace u\ntrans t\ntrans v\n"
                    "arc s t\narc t s weight=2\narc s v\narc v u\n")
    sk = sk_proc(net, "t t t v v v")
    with pytest.raises(ClassBudgetExceeded):
        sk_closure(sk, budget=2)


def _small_nets(count):
    nets = []
    seed = 0
    while len(nets) < count:
        net = random_net(random.Random(seed), max_places=3, max_transitions=3)
        if len(sequences(net, 3)) >= 3:
            nets.append(net)
        seed += 1
    return nets


SMALL = _small_nets(8)


@pytest.mark.parametrize("net", SMALL, ids=lambda n: n.name + str(id(n) % 97))
def test_closure_and_prefixes_match_naive(net):
    for k in range(4):
        for seq in sequences(net, k)[:12]:
            sk = sk_proc(net, seq)
            assert sk_closure(sk) == naive_closure(sk)
            rep = sk_bd_rep(sk)
            assert set(prefix_reps(rep)) == naive_prefix_reps(rep)


@pytest.mark.parametrize("net", SMALL, ids=lambda n: n.name + str(id(n) % 97))
def test_swap_properties(net):
    for seq in sequences(net, 3)[:10]:
        p = proc(net, seq)
        c = bd_canonical(p)
        assert c.transition_multiset == Multiset(seq)
        for a, b in itertools.combinations(p.conditions, 2):
            try:
                q = swap(p, a, b)
            except SwapError:
                continue
            assert validate(net, q) == []
            assert isomorphic(swap(q, a, b), p)
            assert bd_canonical(q) == c


@pytest.mark.parametrize("net", SMALL, ids=lambda n: n.name + str(id(n) % 97))
def test_observation_2_and_exchange(net):
    for seq in sequences(net, 2)[:8]:
        sk = sk_proc(net, seq)
        members = sk_closure(sk)
        for t in net.transitions:
            # (a): all ways of appending t land in one class
            exts = list(sk_extensions(net, sk, t))
            assert len({sk_bd_rep(x) for x in exts}) <= 1
            # (b) and the exchange property: every member extends into the same classes
            per_member = [{sk_bd_rep(x) for x in sk_extensions(net, m, t)} for m in members]
            for reps in per_member:
                assert reps == per_member[0]


@pytest.mark.parametrize("net", SMALL, ids=lambda n: n.name + str(id(n) % 97))
def test_bd_of_monotone_and_run_shaped(net):
    for seq in sequences(net, 3)[:6]:
        whole = bd_of(proc(net, seq))
        assert whole.is_prefix_closed() and whole.is_directed()
        for k in range(len(seq)):
            assert bd_of(proc(net, seq[:k])) <= whole
