import pytest

from causalnets.multiset import EMPTY, Multiset
from causalnets.net import (
    Bounds, Net, NetError, NotEnabledError, NotFiringSequenceError, ParseError, Verdict, explore,
    fire_sequence, fire_step, firing_sequences, is_firing_sequence, parse_net, pre_post,
)

FIG1_TEXT = """
net fig1
place 1 tokens=1
place 2 tokens=1
place 3 tokens=1
place 4
place 5
trans a
trans b
trans c
arc 1 a
arc 2 b
arc a 4
arc b 4
arc 4 c
arc 3 c
arc c 5
"""


def M(d):
    return Multiset(d)


def test_parse_fig1(fig1):
    n = parse_net(FIG1_TEXT)
    assert len(n.places) == 5 and len(n.transitions) == 3
    assert n.initial_marking == M({"1": 1, "2": 1, "3": 1})
    assert n.pre == fig1.pre and n.post == fig1.post


def test_fixture_shapes(fig2, remark):
    assert (len(fig2.places), len(fig2.transitions), fig2.initial_marking["p"]) == (6, 4, 2)
    assert (len(remark.places), len(remark.transitions), remark.initial_marking.cardinality) == (1, 2, 1)


def test_roundtrip_text(fig2):
    again = parse_net(fig2.to_text())
    assert again.pre == fig2.pre and again.post == fig2.post
    assert again.initial_marking == fig2.initial_marking


def test_repeated_arcs_sum():
    n = parse_net("net r\nplace s tokens=3\ntrans t\narc s t\narc s t weight=2\n")
    assert n.pre["t"] == M({"s": 3})


@pytest.mark.parametrize("text, line, fragment", [
    ("place s\ntrans t\narc t s\n", 2, "empty preset"),
    ("place s tokens=1\ntrans a\ntrans b\narc s a\narc s b\narc a b\n", 6, "two transitions"),
    ("place s\nplace s\n", 2, "duplicate"),
    ("place s tokens=1\ntrans t\narc s u\n", 3, "undeclared"),
    ("place s tokens=-1\n", 1, ""),
    ("bogus line\n", 1, ""),
])
def test_parse_errors(text, line, fragment):
    with pytest.raises(ParseError) as err:
        parse_net("net bad\n" + text)
    assert err.value.line == line + 1
    assert fragment in str(err.value)


def test_missing_header():
    with pytest.raises(ParseError) as err:
        parse_net("place s\n")
    assert err.value.line == 1


def test_pre_post(fig1):
    assert pre_post(fig1, {"c": 1}) == (M({"3": 1, "4": 1}), M({"5": 1}))
    assert pre_post(fig1, {"a": 1, "b": 1}) == (M({"1": 1, "2": 1}), M({"4": 2}))
    assert pre_post(fig1, {}) == (EMPTY, EMPTY)


def test_fire_step(fig1, fig2):
    m0 = fig1.initial_marking
    assert fire_step(fig1, m0, {"a": 1}) == M({"2": 1, "3": 1, "4": 1})
    assert fire_step(fig1, m0, {"a": 1, "b": 1}) == M({"3": 1, "4": 2})
    with pytest.raises(NotEnabledError) as err:
        fire_step(fig2, fig2.initial_marking, {"a": 1, "b": 1, "c": 1})
    assert err.value.deficient == {"p": 1}


def test_fire_sequence(fig1, fig2):
    # both 4-tokens are produced, c consumes one of them
    assert fire_sequence(fig1, "a b c") == M({"4": 1, "5": 1})
    # d returns a token to p, so c can still fire and q ends with two tokens
    assert fire_sequence(fig2, "a b d c") == M({"q": 2})
    with pytest.raises(NotFiringSequenceError) as err:
        fire_sequence(fig1, "c")
    assert err.value.position == 0 and err.value.transition == "c"
    assert is_firing_sequence(fig1, ["b", "a"]) and not is_firing_sequence(fig1, ["a", "a"])


def test_step_decomposes(fig1):
    m0 = fig1.initial_marking
    step = fire_step(fig1, m0, {"a": 1, "b": 1})
    assert fire_sequence(fig1, "a b") == step == fire_sequence(fig1, "b a")


def test_firing_sequences_fig1(fig1):
    seqs = [s for s, _ in firing_sequences(fig1, 5)]
    assert len(seqs) == 11
    assert ("a", "c", "b") in seqs and ("c",) not in seqs


def test_explore_fig1(fig1):
    ex = explore(fig1, Bounds())
    assert ex.closed and ex.verdict == Verdict.holds()
    # 123, 234, 134, 344, 25, 15, 45
    assert len(ex.markings) == 7
    assert ex.path(M({"4": 1, "5": 1})) in {("a", "b", "c"), ("a", "c", "b"), ("b", "a", "c"), ("b", "c", "a")}


def test_explore_fig2_closes(fig2):
    assert explore(fig2).closed


def test_explore_fig4_unknown(fig4):
    ex = explore(fig4, Bounds(max_seq_len=5))
    assert ex.verdict.outcome == "unknown"
    assert "max_seq_len" in ex.verdict.bound_hit


def test_explore_token_bound():
    n = parse_net("net g\nplace s tokens=1\ntrans t\narc s t\narc t s weight=2\n")
    ex = explore(n, Bounds(max_tokens_per_place=3))
    assert ex.verdict.outcome == "unknown" and "max_tokens" in ex.verdict.bound_hit


def test_explore_state_bound():
    n = parse_net("net g\nplace s tokens=1\ntrans t\narc s t\narc t s weight=2\n")
    ex = explore(n, Bounds(max_states=4, max_tokens_per_place=100))
    assert ex.verdict.outcome == "unknown" and "max_states" in ex.verdict.bound_hit


def test_net_validation():
    with pytest.raises(NetError):
        Net(["s"], ["t"], {("t", "s"): 1})
    with pytest.raises(NetError):
        Net(["s"], ["s"], {})
    with pytest.raises(NetError):
        Net(["s"], ["t"], {("s", "t"): 1}, {"q": 1})


def test_verdict_invariants():
    with pytest.raises(ValueError):
        Verdict("fails")
    with pytest.raises(ValueError):
        Verdict("unknown")
    with pytest.raises(ValueError):
        Bounds(max_seq_len=0)
