"""Graphviz DOT rendering of observers, AISs, NFMs and product NFMs."""

from __future__ import annotations

from .ais import Ais, SYSTEM
from .model import fmt_estimate
from .nfm import Nfm, ProductNfm
from .observer import Observer


def _q(s: str) -> str:
    return '"{}"'.format(s.replace("\\", "\\\\").replace('"', r"\""))


def _out(o) -> str:
    return "".join(o) if o else "ε"


def _header(name: str) -> list[str]:
    return [f"digraph {_q(name)} {{", "  rankdir=LR;", '  __start [shape=point, label=""];']


def observer_to_dot(o: Observer, name: str = "observer") -> str:
    ids = {s: f"n{k}" for k, s in enumerate(o.states)}
    lines = _header(name)
    for s in o.states:
        attrs = [f"label={_q(fmt_estimate(s))}", "shape=circle"]
        if o.reveals(s):
            attrs += ["style=filled", "fillcolor=gray"]
        lines.append(f"  {ids[s]} [{', '.join(attrs)}];")
    lines.append(f"  __start -> {ids[o.initial]};")
    for a, e, b in o.edges():
        lines.append(f"  {ids[a]} -> {ids[b]} [label={_q(e)}];")
    lines.append("}")
    return "\n".join(lines) + "\n"


def ais_to_dot(a: Ais, name: str = "ais") -> str:
    lines = _header(name)
    if a.empty:
        lines.append("}")
        return "\n".join(lines) + "\n"
    ids = {n: f"n{k}" for k, n in enumerate(a.nodes)}
    for n in a.nodes:
        shape = "box" if n.kind == SYSTEM else "ellipse"
        lines.append(f"  {ids[n]} [label={_q(str(n))}, shape={shape}];")
    lines.append(f"  __start -> {ids[a.initial]};")
    for n, edge in a.edge_list():
        style = ", style=dashed" if edge.kind == "insert" else ""
        lines.append(f"  {ids[n]} -> {ids[edge.target]} [label={_q(edge.label)}{style}];")
    lines.append("}")
    return "\n".join(lines) + "\n"


def _nfm_label(state) -> str:
    if isinstance(state, frozenset):
        return fmt_estimate(state)
    return "(" + ",".join(fmt_estimate(s) for s in state) + ")"


def nfm_to_dot(n: Nfm, name: str = "nfm") -> str:
    ids = {s: f"n{k}" for k, s in enumerate(n.states)}
    lines = _header(name)
    for s in n.states:
        lines.append(f"  {ids[s]} [label={_q(_nfm_label(s))}, shape=box];")
    lines.append(f"  __start -> {ids[n.initial]};")
    for q, e, t, o in n.edge_list():
        lines.append(f"  {ids[q]} -> {ids[t]} [label={_q(f'{e}/{_out(o)}')}];")
    lines.append("}")
    return "\n".join(lines) + "\n"


def product_to_dot(full: ProductNfm, pruned: ProductNfm | None = None, name: str = "product") -> str:
    """Render the product; states removed by pruning go into a dashed cluster."""
    lines = _header(name)
    if full.empty:
        lines.append("}")
        return "\n".join(lines) + "\n"
    ids = {s: f"n{k}" for k, s in enumerate(full.states)}
    kept = set(pruned.states) if pruned is not None else set(full.states)
    removed = [s for s in full.states if s not in kept]
    for s in full.states:
        if s in kept:
            lines.append(f"  {ids[s]} [label={_q(full.label(s))}, shape=box];")
    if removed:
        lines.append("  subgraph cluster_pruned {")
        lines.append('    style=dashed; label="pruned";')
        for s in removed:
            lines.append(f"    {ids[s]} [label={_q(full.label(s))}, shape=box];")
        lines.append("  }")
    lines.append(f"  __start -> {ids[full.initial]};")
    surviving = set()
    if pruned is not None and not pruned.empty:
        surviving = {(s, t) for s, t in pruned.edge_list()}
    for s, t in full.edge_list():
        label = f"{t.event}/(" + ",".join(_out(o) for o in t.outputs) + ")"
        style = "" if pruned is None or (s, t) in surviving else ", style=dashed, color=gray"
        lines.append(f"  {ids[s]} -> {ids[t.target]} [label={_q(label)}{style}];")
    lines.append("}")
    return "\n".join(lines) + "\n"
