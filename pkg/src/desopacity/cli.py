"""Command-line interface.

Exit status: 0 when the property holds or synthesis succeeds, 1 when it is
violated or not enforceable, 2 on usage or input errors.
"""

from __future__ import annotations

import argparse
import json
import sys

from . import dot
from .ais import build_ais, extract_local_insertion
from .insertion import POLICIES, UnmodeledObservation, dump_strategies, identity_strategy, load_strategies
from .joint import pruning_report, synthesize_joint
from .model import ModelError, fmt_estimate, fmt_word, load_model, parse_word
from .nfm import ais_to_nfm, build_global_observer
from .observer import ObservationError, build_observer
from .opacity import verify_cso, verify_dcso, verify_jcso_plain
from .runtime import NoLocalStrategyError, extract_joint_strategy, simulate_run

OK, FAIL, USAGE = 0, 1, 2


class UsageError(Exception):
    pass


def _emit(args, report: dict, text: list[str]) -> None:
    if args.json:
        sys.stdout.write(json.dumps(report, indent=2, sort_keys=True) + "\n")
    else:
        sys.stdout.write("\n".join(text) + "\n")


def _write(path: str | None, content: str) -> None:
    if path is None or path == "-":
        sys.stdout.write(content)
    else:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(content)


def _intruder(args, m) -> int:
    if args.intruder is None:
        raise UsageError("--intruder is required")
    if not 1 <= args.intruder <= m.n_intruders:
        raise UsageError(f"--intruder must be between 1 and {m.n_intruders}")
    return args.intruder - 1


def _verdict_text(title: str, verdict) -> list[str]:
    lines = [f"{title}: {'holds' if verdict.holds else 'violated'}"]
    lines += [f"  {w.describe()}" for w in verdict.witnesses]
    return lines


def cmd_check_cso(args, m) -> int:
    i = _intruder(args, m)
    v = verify_cso(m, m.masks[i], i)
    _emit(args, {"property": "CSO", "intruder": i + 1, **v.to_dict()}, _verdict_text(f"CSO (intruder {i + 1})", v))
    return OK if v.holds else FAIL


def cmd_check_dcso(args, m) -> int:
    v = verify_dcso(m)
    _emit(args, {"property": "D-CSO", **v.to_dict()}, _verdict_text("D-CSO", v))
    return OK if v.holds else FAIL


def cmd_check_jcso(args, m) -> int:
    v = verify_jcso_plain(m)
    _emit(args, {"property": "J-CSO", **v.to_dict()}, _verdict_text("J-CSO", v))
    return OK if v.holds else FAIL


def cmd_build_ais(args, m) -> int:
    i = _intruder(args, m)
    a = build_ais(m, i)
    report = {
        "intruder": i + 1,
        "enforceable": not a.empty,
        "nodes": len(a.nodes),
        "system_nodes": len(a.system_nodes()),
        "insertion_nodes": len(a.insertion_nodes()),
    }
    text = [
        f"AIS (intruder {i + 1}): {'nonempty' if not a.empty else 'empty'}",
        f"  {report['nodes']} nodes ({report['system_nodes']} system, {report['insertion_nodes']} insertion)",
    ]
    if args.output:
        _write(args.output, dot.ais_to_dot(a, f"AIS_{i + 1}"))
        text.append(f"  DOT written to {args.output}")
    _emit(args, report, text)
    return OK if not a.empty else FAIL


def cmd_synthesize(args, m) -> int:
    which = [_intruder(args, m)] if args.intruder is not None else range(m.n_intruders)
    strategies, empty = [], []
    for i in which:
        a = build_ais(m, i)
        if a.empty:
            empty.append(i + 1)
        else:
            strategies.append(extract_local_insertion(a, args.policy))
    report = {"enforceable": not empty, "empty_ais": empty, "strategies": len(strategies)}
    text = [f"D-CSO privately enforceable: {'yes' if not empty else 'no'}"]
    if empty:
        text.append("  empty AIS for intruder(s) " + ", ".join(map(str, empty)))
    else:
        doc = dump_strategies(strategies, mode="local", policy=args.policy)
        if args.output:
            _write(args.output, doc)
            text.append(f"  {len(strategies)} strategies written to {args.output}")
        else:
            report["document"] = json.loads(doc)
            text.append(doc.rstrip())
    _emit(args, report, text)
    return OK if not empty else FAIL


def cmd_synthesize_joint(args, m) -> int:
    full, pruned = synthesize_joint(m)
    report = pruning_report(full, pruned)
    text = [
        f"J-CSO jointly privately enforceable: {'yes' if report['enforceable'] else 'no'}",
        f"  product states: {report['states_before']} -> {report['states_after']}",
    ]
    text += [f"  pruned {d['state']} ({d['reason']}, round {d['round']})" for d in report["deleted"]]
    status = OK if report["enforceable"] else FAIL
    if report["enforceable"]:
        try:
            strategies = extract_joint_strategy(pruned, args.policy)
        except NoLocalStrategyError as exc:
            report["error"] = str(exc)
            text.append(f"  {exc}")
            status = FAIL
        else:
            report["strategies"] = len(strategies)
            doc = dump_strategies(strategies, mode="joint", policy=args.policy)
            if args.output:
                _write(args.output, doc)
                text.append(f"  {len(strategies)} strategies written to {args.output}")
            else:
                report["document"] = json.loads(doc)
                text.append(doc.rstrip())
    _emit(args, report, text)
    return status


def cmd_simulate(args, m) -> int:
    word = parse_word(args.word)
    if args.identity:
        strategies = [identity_strategy(i, [e for e in m.events if e in mask]) for i, mask in enumerate(m.masks)]
    elif args.strategies:
        with open(args.strategies, encoding="utf-8") as fh:
            strategies = load_strategies(fh.read())
    else:
        _, pruned = synthesize_joint(m)
        if pruned.empty:
            raise UsageError("J-CSO is not enforceable; pass --identity or --strategies")
        strategies = extract_joint_strategy(pruned, args.policy)
    trace = simulate_run(m, strategies, word)
    report = trace.to_dict()
    report["observed"] = [list(trace.observed(i)) for i in range(m.n_intruders)]
    text = trace.lines()
    text.append("observed: " + "; ".join(fmt_word(trace.observed(i)) or "ε" for i in range(m.n_intruders)))
    text.append(f"final joint estimate {fmt_estimate(trace.final.joint)}; "
                f"local reveals {trace.local_reveals}, joint reveals {trace.joint_reveals}")
    _emit(args, report, text)
    return FAIL if trace.revealed else OK


def cmd_export_dot(args, m) -> int:
    what = args.what
    if what == "observer":
        i = _intruder(args, m)
        content = dot.observer_to_dot(build_observer(m, m.masks[i]), f"obs_{i + 1}")
    elif what == "global-observer":
        content = dot.nfm_to_dot(build_global_observer(m), "obs")
    elif what == "ais":
        i = _intruder(args, m)
        content = dot.ais_to_dot(build_ais(m, i), f"AIS_{i + 1}")
    elif what == "nfm":
        i = _intruder(args, m)
        a = build_ais(m, i)
        if a.empty:
            raise UsageError(f"AIS of intruder {i + 1} is empty")
        content = dot.nfm_to_dot(ais_to_nfm(a), f"NFM_{i + 1}")
    else:
        full, pruned = synthesize_joint(m)
        content = dot.product_to_dot(full, pruned, "G")
    _write(args.output, content)
    return OK


COMMANDS = {
    "check-cso": cmd_check_cso,
    "check-dcso": cmd_check_dcso,
    "check-jcso": cmd_check_jcso,
    "build-ais": cmd_build_ais,
    "synthesize": cmd_synthesize,
    "synthesize-joint": cmd_synthesize_joint,
    "simulate": cmd_simulate,
    "export-dot": cmd_export_dot,
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="desopacity",
        description="Opacity verification and insertion-function synthesis for .des models.",
    )
    sub = parser.add_subparsers(dest="command", required=True, metavar="COMMAND")

    def add(name, help_text, intruder=False, output=False, policy=False):
        p = sub.add_parser(name, help=help_text)
        p.add_argument("input", help="model file (.des)")
        p.add_argument("--json", action="store_true", help="machine-readable report")
        if intruder:
            p.add_argument("--intruder", type=int, help="1-based intruder index")
        if output:
            p.add_argument("-o", "--output", help="output path (default: stdout)")
        if policy:
            p.add_argument("--policy", choices=POLICIES, default="min-insert", help="tie-break policy")
        return p

    add("check-cso", "verify current-state opacity for one intruder", intruder=True)
    add("check-dcso", "verify decentralized opacity (every intruder separately)")
    add("check-jcso", "verify joint opacity under intersection-based coordination")
    add("build-ais", "build and prune an intruder's AIS", intruder=True, output=True)
    add("synthesize", "extract local insertion functions (D-CSO)", intruder=True, output=True, policy=True)
    add("synthesize-joint", "prune the product NFM and extract joint strategies (J-CSO)", output=True, policy=True)
    sim = add("simulate", "simulate a genuine run under insertion strategies", policy=True)
    sim.add_argument("--word", required=True, help="genuine word, e.g. 'cab' or 'c a b'")
    group = sim.add_mutually_exclusive_group()
    group.add_argument("--strategies", help="strategy JSON from synthesize/synthesize-joint")
    group.add_argument("--identity", action="store_true", help="simulate without any insertion")
    exp = add("export-dot", "write a Graphviz rendering", intruder=True, output=True)
    exp.add_argument("--what", choices=["observer", "global-observer", "ais", "nfm", "product"], required=True)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        m = load_model(args.input)
        return COMMANDS[args.command](args, m)
    except (ModelError, UsageError, ObservationError, UnmodeledObservation, OSError, ValueError) as exc:
        sys.stderr.write(f"error: {exc}\n")
        return USAGE


if __name__ == "__main__":
    sys.exit(main())
