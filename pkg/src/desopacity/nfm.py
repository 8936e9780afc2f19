"""Nondeterministic finite-state Mealy machines and their synchronous product.

Intruder NFMs have ``(intruder estimate, system estimate)`` states and emit,
for each genuine event, the inserted string followed by that event. The
global observer is an NFM over the union of all intruder alphabets that
always emits the empty string.
"""

from __future__ import annotations

import itertools
from collections import deque
from dataclasses import dataclass
from typing import Dict, FrozenSet, Sequence, Tuple

from .ais import SYSTEM, Ais, EmptyAisError, ais_chains, build_ais
from .model import Estimate, Model, Word, estimate_key, fmt_estimate
from .observer import Observer, build_observer
from .opacity import global_mask

# transition relation: (state, input) -> ((next state, output), ...)
Relation = Dict[Tuple[object, str], Tuple[Tuple[object, Word], ...]]


def _state_key(state):
    if isinstance(state, frozenset):
        return estimate_key(state)
    return tuple(_state_key(s) for s in state)


@dataclass(frozen=True)
class Nfm:
    states: Tuple[object, ...]
    inputs: Tuple[str, ...]
    initial: object
    transitions: Relation
    observer: Observer
    intruder: int | None = None

    @property
    def outputs(self) -> FrozenSet[Word]:
        return frozenset(o for opts in self.transitions.values() for _, o in opts)

    def step(self, state, event: str):
        return self.transitions.get((state, event), ())

    def edge_list(self) -> list[tuple[object, str, object, Word]]:
        return [
            (q, e, t, o)
            for q in self.states
            for e in self.inputs
            for t, o in self.step(q, e)
        ]


def ais_to_nfm(a: Ais) -> Nfm:
    """Collapse every insertion burst of the AIS into a single Mealy transition."""
    if a.empty:
        raise EmptyAisError("cannot convert an empty AIS")
    states = [(n.intruder_est, n.system_est) for n in a.nodes if n.kind == SYSTEM]
    transitions: dict = {}
    for n in a.nodes:
        if n.kind != SYSTEM:
            continue
        q = (n.intruder_est, n.system_est)
        for e in a.observer.enabled(n.system_est):
            opts = {((t.intruder_est, t.system_est), ins + (e,)) for ins, t in ais_chains(a, n, e)}
            transitions[(q, e)] = tuple(sorted(opts, key=lambda p: (len(p[1]), p[1], _state_key(p[0]))))
    return Nfm(
        states=tuple(states),
        inputs=a.observer.events,
        initial=(a.initial.intruder_est, a.initial.system_est),
        transitions=transitions,
        observer=a.observer,
        intruder=a.intruder,
    )


def build_global_observer(m: Model) -> Nfm:
    if not m.masks:
        raise ValueError("model declares no intruders")
    obs = build_observer(m, global_mask(m))
    transitions = {(s, e): ((t, ()),) for s, e, t in obs.edges()}
    return Nfm(
        states=obs.states,
        inputs=obs.events,
        initial=obs.initial,
        transitions=transitions,
        observer=obs,
    )


@dataclass(frozen=True)
class ProductEdge:
    event: str
    outputs: Tuple[Word, ...]  # one per intruder; () when the intruder does not see the event
    target: tuple


@dataclass(frozen=True)
class PruneRecord:
    state: tuple
    reason: str  # "unsafe", "blocked" or "unreachable"
    round: int


@dataclass(frozen=True)
class ProductNfm:
    """Product of N intruder NFMs with the global observer.

    A state is ``(q_1, ..., q_N, q_obs)`` with ``q_i`` an intruder NFM state and
    ``q_obs`` a global observer estimate. ``deleted`` records pruning history.
    """

    nfms: Tuple[Nfm, ...]
    obs: Nfm
    secret: FrozenSet[str]
    initial: tuple | None
    states: Tuple[tuple, ...]
    transitions: Dict[tuple, Tuple[ProductEdge, ...]]
    deleted: Tuple[PruneRecord, ...] = ()

    @property
    def empty(self) -> bool:
        return self.initial is None

    @property
    def n(self) -> int:
        return len(self.nfms)

    def out(self, state) -> Tuple[ProductEdge, ...]:
        return self.transitions.get(state, ())

    def edge_list(self) -> list[tuple[tuple, ProductEdge]]:
        return [(s, t) for s in self.states for t in self.out(s)]

    def intruder_ests(self, state) -> Tuple[Estimate, ...]:
        return tuple(q[0] for q in state[:-1])

    def obs_est(self, state) -> Estimate:
        return state[-1]

    def enabled(self, state) -> list[str]:
        return [e for e in self.obs.inputs if self.obs.step(state[-1], e)]

    def label(self, state) -> str:
        parts = [fmt_estimate(q[0]) for q in state[:-1]] + [fmt_estimate(state[-1])]
        return "(" + ",".join(parts) + ")"

    @staticmethod
    def sort_key(state):
        return _state_key(state)


def compose_product(nfms: Sequence[Nfm], obs: Nfm, secret=frozenset()) -> ProductNfm:
    """Reachable synchronous product; intruders that do not observe an event idle with empty output."""
    nfms = tuple(nfms)
    if not nfms:
        raise ValueError("need at least one intruder NFM")
    init = tuple(f.initial for f in nfms) + (obs.initial,)
    states = [init]
    seen = {init}
    transitions: dict = {}
    queue = deque([init])
    inputs = [frozenset(f.inputs) for f in nfms]
    while queue:
        s = queue.popleft()
        edges = []
        for e in obs.inputs:
            obs_next = obs.step(s[-1], e)
            if not obs_next:
                continue
            choices = []
            for i, f in enumerate(nfms):
                if e in inputs[i]:
                    choices.append(f.step(s[i], e))
                else:
                    choices.append(((s[i], ()),))
            for (g_next, _), *combo in itertools.product(obs_next, *choices):
                target = tuple(q for q, _ in combo) + (g_next,)
                edges.append(ProductEdge(e, tuple(o for _, o in combo), target))
                if target not in seen:
                    seen.add(target)
                    states.append(target)
                    queue.append(target)
        transitions[s] = tuple(edges)
    return ProductNfm(
        nfms=nfms,
        obs=obs,
        secret=frozenset(secret),
        initial=init,
        states=tuple(states),
        transitions=transitions,
    )


def product_for(m: Model) -> ProductNfm:
    """Unpruned product NFM of a model; empty when some intruder's AIS is empty."""
    gobs = build_global_observer(m)
    nfms = []
    for i in range(m.n_intruders):
        a = build_ais(m, i)
        if a.empty:
            return ProductNfm((), gobs, m.secret, None, (), {})
        nfms.append(ais_to_nfm(a))
    return compose_product(nfms, gobs, m.secret)
