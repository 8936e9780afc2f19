"""All Insertion Structure: the game between system outputs and insertion choices.

SYSTEM nodes hold ``(intruder estimate, system estimate)``; the system picks a
genuine observable event. INSERTION nodes additionally hold that pending
event; the insertion function either inserts one more observable event
(updating only the intruder estimate) or releases the pending event.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from typing import Dict, Iterator, Tuple

from .insertion import InsertionStrategy, policy_key
from .model import Estimate, Model, Word, estimate_key, fmt_estimate
from .observer import Observer, build_observer, revealing_states  # noqa: F401

SYSTEM = "system"
INSERTION = "insertion"


class EmptyAisError(ValueError):
    pass


@dataclass(frozen=True)
class AisNode:
    kind: str
    intruder_est: Estimate
    system_est: Estimate
    pending: str | None = None

    def __post_init__(self):
        if (self.kind == INSERTION) != (self.pending is not None):
            raise ValueError("INSERTION nodes carry exactly one pending event, SYSTEM nodes none")

    def sort_key(self):
        return (
            self.kind != SYSTEM,
            estimate_key(self.intruder_est),
            estimate_key(self.system_est),
            self.pending or "",
        )

    def __str__(self):
        pair = f"({fmt_estimate(self.intruder_est)},{fmt_estimate(self.system_est)})"
        return pair if self.kind == SYSTEM else f"{pair},{self.pending}"


@dataclass(frozen=True)
class AisEdge:
    label: str
    target: AisNode
    kind: str  # "system", "insert" or "emit"


@dataclass(frozen=True)
class Ais:
    intruder: int
    observer: Observer
    initial: AisNode | None
    nodes: Tuple[AisNode, ...]
    edges: Dict[AisNode, Tuple[AisEdge, ...]]

    @property
    def empty(self) -> bool:
        return self.initial is None

    def out(self, node: AisNode) -> Tuple[AisEdge, ...]:
        return self.edges.get(node, ())

    def system_nodes(self) -> list[AisNode]:
        return [n for n in self.nodes if n.kind == SYSTEM]

    def insertion_nodes(self) -> list[AisNode]:
        return [n for n in self.nodes if n.kind == INSERTION]

    def edge_list(self) -> list[tuple[AisNode, AisEdge]]:
        return [(n, e) for n in self.nodes for e in self.out(n)]


def _raw_ais(m: Model, intruder: int, obs: Observer) -> Ais:
    init = AisNode(SYSTEM, obs.initial, obs.initial)
    if obs.reveals(obs.initial):
        return Ais(intruder, obs, None, (), {})
    nodes = [init]
    seen = {init}
    edges: dict = {}
    queue = deque([init])

    def add(node):
        if node not in seen:
            seen.add(node)
            nodes.append(node)
            queue.append(node)

    while queue:
        q = queue.popleft()
        out = []
        if q.kind == SYSTEM:
            for e in obs.enabled(q.system_est):
                tgt = AisNode(INSERTION, q.intruder_est, obs.step(q.system_est, e), e)
                out.append(AisEdge(e, tgt, "system"))
        else:
            for e in obs.events:
                nxt = obs.step(q.intruder_est, e)
                # a self-loop insertion is the simplest repeated estimate
                if nxt is None or obs.reveals(nxt) or nxt == q.intruder_est:
                    continue
                out.append(AisEdge(e, AisNode(INSERTION, nxt, q.system_est, q.pending), "insert"))
            nxt = obs.step(q.intruder_est, q.pending)
            if nxt is not None and not obs.reveals(nxt):
                out.append(AisEdge(q.pending, AisNode(SYSTEM, nxt, q.system_est), "emit"))
        edges[q] = tuple(out)
        for edge in out:
            add(edge.target)
    return Ais(intruder, obs, init, tuple(nodes), edges)


def build_ais(m: Model, intruder: int, prune: bool = True) -> Ais:
    """Construct the AIS for one intruder (0-based index) and prune it unless asked not to."""
    obs = build_observer(m, m.masks[intruder])
    raw = _raw_ais(m, intruder, obs)
    return prune_ais(raw) if prune else raw


def prune_ais(a: Ais) -> Ais:
    """Greatest admissible sub-game reachable from the initial node.

    A SYSTEM node survives when every genuine event enabled at its system
    estimate leads to a surviving INSERTION node; an INSERTION node survives
    when some run of insertions through surviving INSERTION nodes ends in an
    emit edge to a surviving SYSTEM node.
    """
    if a.empty:
        return a
    alive = set(a.nodes)
    while True:
        # backward reachability to a usable emit edge
        ins_ok = set()
        preds: dict = {}
        for n in a.nodes:
            if n.kind != INSERTION or n not in alive:
                continue
            for edge in a.out(n):
                if edge.kind == "emit" and edge.target in alive:
                    ins_ok.add(n)
                elif edge.kind == "insert" and edge.target in alive:
                    preds.setdefault(edge.target, []).append(n)
        todo = list(ins_ok)
        while todo:
            n = todo.pop()
            for p in preds.get(n, ()):
                if p not in ins_ok:
                    ins_ok.add(p)
                    todo.append(p)
        sys_ok = {
            n for n in a.nodes
            if n.kind == SYSTEM and n in alive and all(e.target in ins_ok for e in a.out(n))
        }
        new_alive = ins_ok | sys_ok
        if new_alive == alive:
            break
        alive = new_alive
    if a.initial not in alive:
        return Ais(a.intruder, a.observer, None, (), {})
    # restrict to the part reachable from the initial node
    reach = [a.initial]
    seen = {a.initial}
    k = 0
    while k < len(reach):
        n = reach[k]
        k += 1
        for edge in a.out(n):
            if edge.target in alive and edge.target not in seen:
                seen.add(edge.target)
                reach.append(edge.target)
    edges = {n: tuple(e for e in a.out(n) if e.target in seen) for n in reach}
    return Ais(a.intruder, a.observer, a.initial, tuple(reach), edges)


def check_private_enforceability(a: Ais) -> bool:
    return not prune_ais(a).empty


def ais_chains(a: Ais, q: AisNode, event: str) -> Iterator[tuple[Word, AisNode]]:
    """Every insertion burst answering ``event`` at SYSTEM node ``q``.

    Yields ``(inserted string, SYSTEM target)``. Bursts never revisit an
    intruder estimate, so they are finite and shorter than the observer.
    """
    starts = [e.target for e in a.out(q) if e.kind == "system" and e.label == event]
    for start in starts:
        stack = [(start, (), frozenset([start.intruder_est]))]
        while stack:
            node, inserted, visited = stack.pop()
            for edge in a.out(node):
                if edge.kind == "emit":
                    yield inserted, edge.target
                elif edge.kind == "insert" and edge.target.intruder_est not in visited:
                    stack.append((edge.target, inserted + (edge.label,), visited | {edge.target.intruder_est}))


def extract_local_insertion(a: Ais, policy: str = "min-insert") -> InsertionStrategy:
    """Pick one insertion burst per (SYSTEM node, event) and return the resulting strategy."""
    if a.empty:
        raise EmptyAisError("cannot extract an insertion function from an empty AIS")
    ids = {a.initial: 0}
    queue = deque([a.initial])
    table = {}
    while queue:
        q = queue.popleft()
        for edge in a.out(q):
            e = edge.label
            best = min(ais_chains(a, q, e), key=lambda c: (policy_key(policy, [c[0] + (e,)]), c[1].sort_key()))
            inserted, target = best
            if target not in ids:
                ids[target] = len(ids)
                queue.append(target)
            table[(ids[q], e)] = (ids[target], inserted + (e,))
    return InsertionStrategy(
        intruder=a.intruder,
        alphabet=a.observer.events,
        initial=0,
        table=table,
        labels={i: str(n) for n, i in ids.items()},
        policy=policy,
    )
