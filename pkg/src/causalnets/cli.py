"""Command-line front end.  Every verb prints one JSON document.

Exit status: 0 holds/success, 1 fails, 2 unknown (a bound was hit),
3 usage or parse error.
"""

from __future__ import annotations

import argparse
import json
import os
import sys

from . import fixtures
from .conflict import conflict_reports
from .maximality import corollary_check, enumerate_maximal
from .net import Bounds, Net, NetError, NotFiringSequenceError, ParseError, as_sequence, explore, load_net
from .process import GRProcess, linearize, sk_cut_marking, sk_proc
from .swapping import ClassBudgetExceeded, class_of_skeleton
from .traces import TraceBudgetExceeded, correspondence_check, directedness_check, trace_class, trace_partition

EXIT = {"holds": 0, "fails": 1, "unknown": 2}
USAGE_ERROR = 3
VERBS = ("simulate", "processes", "traces", "conflicts", "maximality", "corollary", "correspond")
SEQUENCE_VERB_LEN = 6  # default enumeration length for traces/correspond


class _Usage(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise _Usage(message)


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="causalnets", description=__doc__.splitlines()[0])
    p.add_argument("verb", choices=VERBS)
    p.add_argument("net", help="net file, or a bundled fixture such as fixtures/fig1.net")
    p.add_argument("--max-seq-len", type=int)
    p.add_argument("--max-tokens", type=int)
    p.add_argument("--max-states", type=int)
    p.add_argument("--class-budget", type=int)
    p.add_argument("--policy", choices=("fifo", "lifo"), default="fifo")
    p.add_argument("--seq", help='space separated transitions, e.g. "a b c"')
    p.add_argument("--dump", action="store_true", help="include the full process (processes verb)")
    p.add_argument("--out", help="write the JSON here instead of standard output")
    return p


def resolve_net(path: str) -> Net:
    if os.path.exists(path):
        return load_net(path)
    base = os.path.basename(path)
    if base.endswith(".net") and base[:-4] in fixtures.names():
        return fixtures.load(base)
    raise FileNotFoundError(f"no such net file: {path}")


def _bounds(args, seq_default: int | None = None) -> Bounds:
    kw = {}
    if args.max_seq_len is not None:
        kw["max_seq_len"] = args.max_seq_len
    elif seq_default is not None:
        kw["max_seq_len"] = seq_default
    if args.max_tokens is not None:
        kw["max_tokens_per_place"] = args.max_tokens
    if args.max_states is not None:
        kw["max_states"] = args.max_states
    if args.class_budget is not None:
        kw["class_budget"] = args.class_budget
    return Bounds(**kw)


def _worst(outcomes) -> str:
    outcomes = list(outcomes)
    if "fails" in outcomes:
        return "fails"
    if "unknown" in outcomes:
        return "unknown"
    return "holds"


def cmd_simulate(net: Net, args) -> tuple[dict, str]:
    bounds = _bounds(args)
    if args.seq is None:
        ex = explore(net, bounds)
        return {
            "net": net.name,
            "reachable_markings": [net.marking_json(m) for m in ex.markings],
            "depth": ex.depth,
            "verdict": ex.verdict.to_json(),
        }, ex.verdict.outcome
    seq = as_sequence(args.seq)
    m = net.initial_marking
    steps = []
    try:
        for i, t in enumerate(seq):
            if t not in net.trans_index:
                raise NetError(f"unknown transition {t!r} at position {i}")
            if not net.enabled(m, t):
                raise NotFiringSequenceError(
                    i, t, {s: w - m[s] for s, w in net.pre[t].items() if w > m[s]})
            m = net.fire(m, t)
            steps.append({"transition": t, "marking": net.marking_json(m)})
    except NotFiringSequenceError as exc:
        witness = {"position": exc.position, "transition": exc.transition, "deficient": exc.deficient}
        return {"net": net.name, "sequence": " ".join(seq), "outcome": "fails",
                "witness": witness, "steps": steps}, "fails"
    return {"net": net.name, "sequence": " ".join(seq), "outcome": "holds",
            "initial_marking": net.marking_json(net.initial_marking),
            "steps": steps, "final_marking": net.marking_json(m)}, "holds"


def cmd_processes(net: Net, args) -> tuple[dict, str]:
    if args.seq is None:
        raise _Usage("processes needs --seq")
    bounds = _bounds(args)
    seq = as_sequence(args.seq)
    try:
        sk = sk_proc(net, seq, args.policy)
    except NotFiringSequenceError as exc:
        return {"net": net.name, "sequence": " ".join(seq), "outcome": "fails",
                "witness": {"position": exc.position, "transition": exc.transition,
                            "deficient": exc.deficient}}, "fails"
    p = GRProcess.from_skeleton(sk)
    out = {
        "net": net.name,
        "sequence": " ".join(seq),
        "policy": args.policy,
        "events": len(p.events),
        "conditions": len(p.conditions),
        "cut_marking": net.marking_json(sk_cut_marking(sk)),
        "linearization": " ".join(linearize(p)),
    }
    outcome = "holds"
    try:
        out["bd_class"] = class_of_skeleton(sk, bounds.class_budget).to_json()
    except ClassBudgetExceeded as exc:
        out["bd_class"] = None
        out["bound_hit"] = str(exc)
        outcome = "unknown"
    if args.dump:
        out["process"] = p.to_json()
    return out, outcome


def cmd_traces(net: Net, args) -> tuple[dict, str]:
    bounds = _bounds(args, SEQUENCE_VERB_LEN)
    if args.seq is not None:
        try:
            c = trace_class(net, args.seq, bounds.trace_budget)
        except NotFiringSequenceError as exc:
            return {"net": net.name, "sequence": args.seq, "outcome": "fails",
                    "witness": {"position": exc.position, "transition": exc.transition,
                                "deficient": exc.deficient}}, "fails"
        except TraceBudgetExceeded as exc:
            return {"net": net.name, "sequence": args.seq, "outcome": "unknown",
                    "bound_hit": str(exc)}, "unknown"
        return {"net": net.name, "sequence": args.seq, "outcome": "holds",
                "class": {**c.to_json(), "members": [" ".join(m) for m in c.members]}}, "holds"
    try:
        part = trace_partition(net, bounds.max_seq_len, bounds.trace_budget)
    except TraceBudgetExceeded as exc:
        return {"net": net.name, "max_len": bounds.max_seq_len, "outcome": "unknown",
                "bound_hit": str(exc)}, "unknown"
    rep = correspondence_check(net, bounds.max_seq_len, bounds, part)
    return {
        "net": net.name,
        "max_len": bounds.max_seq_len,
        "complete": part.complete,
        "classes": [{"canonical_member": " ".join(c), "size": len(ms)} for c, ms in part.classes.items()],
        "correspondence": rep.to_json(),
    }, rep.verdict.outcome


def cmd_conflicts(net: Net, args):
    reports = conflict_reports(net, _bounds(args))
    return [r.to_json() for r in reports], _worst(r.verdict.outcome for r in reports)


def cmd_maximality(net: Net, args):
    r = enumerate_maximal(net, _bounds(args))
    return r.to_json(), r.completeness.outcome


def cmd_corollary(net: Net, args):
    r = corollary_check(net, _bounds(args))
    if r.applicable:
        outcome = "holds" if r.agrees else "fails"
    elif r.structural.outcome == "fails":
        outcome = "holds"  # nothing to assert; the report says why
    else:
        outcome = "unknown"
    return r.to_json(), outcome


def cmd_correspond(net: Net, args):
    bounds = _bounds(args, SEQUENCE_VERB_LEN)
    rep = correspondence_check(net, bounds.max_seq_len, bounds)
    directed = directedness_check(net, bounds.max_seq_len, bounds)
    out = {"net": net.name, "correspondence": rep.to_json(), "directedness": directed.to_json()}
    return out, _worst([rep.verdict.outcome, directed.outcome])


COMMANDS = {
    "simulate": cmd_simulate, "processes": cmd_processes, "traces": cmd_traces,
    "conflicts": cmd_conflicts, "maximality": cmd_maximality, "corollary": cmd_corollary,
    "correspond": cmd_correspond,
}


def render(doc) -> str:
    return json.dumps(doc, indent=2, sort_keys=True, ensure_ascii=False) + "\n"


def _error(message: str, **extra) -> int:
    sys.stderr.write(render({"error": message, **extra}))
    return USAGE_ERROR


def main(argv: list[str] | None = None) -> int:
    try:
        args = build_parser().parse_args(argv)
    except _Usage as exc:
        return _error(str(exc))
    try:
        net = resolve_net(args.net)
    except ParseError as exc:
        return _error(str(exc), line=exc.line)
    except (OSError, NetError) as exc:
        return _error(str(exc))
    try:
        doc, outcome = COMMANDS[args.verb](net, args)
    except _Usage as exc:
        return _error(str(exc))
    except (NetError, ValueError) as exc:
        return _error(str(exc))
    text = render(doc)
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return EXIT[outcome]


if __name__ == "__main__":
    sys.exit(main())
