"""Joint estimates of coordinating intruders and iterative pruning of the product NFM."""

from __future__ import annotations

import random
from dataclasses import dataclass
from functools import reduce
from typing import Iterable, Tuple

from .model import Estimate, Model, fmt_estimate
from .nfm import ProductEdge, ProductNfm, PruneRecord, product_for


@dataclass(frozen=True)
class JointState:
    intruder_ests: Tuple[Estimate, ...]
    obs_est: Estimate
    origin: tuple | None = None  # (source state, edge, step) when produced by expansion

    def label(self) -> str:
        return "(" + ",".join(fmt_estimate(e) for e in (*self.intruder_ests, self.obs_est)) + ")"


def joint_estimate(j: JointState) -> frozenset:
    return reduce(frozenset.intersection, j.intruder_ests, j.obs_est)


def is_joint_safe(joint: Iterable[str], secret: Iterable[str]) -> bool:
    """A joint estimate is safe unless it is nonempty and entirely secret."""
    joint = frozenset(joint)
    return not joint or not joint <= frozenset(secret)


def joint_state(p: ProductNfm, state) -> JointState:
    return JointState(p.intruder_ests(state), p.obs_est(state))


def expand_intermediates(p: ProductNfm, src, edge: ProductEdge) -> list[JointState]:
    """Step-by-step joint states while the intruders read their outputs of ``edge``.

    Outputs are left aligned; an intruder whose output is exhausted keeps its
    estimate. The observer estimate is the post-event one from the first step.
    The last element is the state at the end of the transition.
    """
    ests = list(p.intruder_ests(src))
    length = max(len(o) for o in edge.outputs)
    obs_est = p.obs_est(edge.target)
    out = []
    for k in range(length):
        for i, o in enumerate(edge.outputs):
            if k < len(o):
                nxt = p.nfms[i].observer.step(ests[i], o[k])
                if nxt is None:
                    raise ValueError(f"output {o} undefined for intruder {i + 1} observer")
                ests[i] = nxt
        out.append(JointState(tuple(ests), obs_est, (src, edge, k + 1)))
    return out


def _state_safe(p: ProductNfm, state) -> bool:
    return is_joint_safe(joint_estimate(joint_state(p, state)), p.secret)


def _edge_safe(p: ProductNfm, src, edge: ProductEdge) -> bool:
    return all(is_joint_safe(joint_estimate(j), p.secret) for j in expand_intermediates(p, src, edge))


def prune_product(p: ProductNfm, rng: random.Random | None = None) -> ProductNfm:
    """Delete unsafe transitions and states, then blocked and unreachable states, to a fixpoint.

    Without ``rng`` deletions happen in rounds: all unsafe items first, then
    every currently blocked or unreachable state at once, repeated. With
    ``rng`` one randomly chosen candidate is deleted at a time; the surviving
    product is the same either way.
    """
    if p.empty:
        return p
    alive = set(p.states)
    edges = {s: list(p.out(s)) for s in p.states}
    # edge safety only depends on the source estimates, outputs and observer target
    memo: dict = {}

    def edge_bad(s, t):
        key = (p.intruder_ests(s), t.outputs, p.obs_est(t.target))
        if key not in memo:
            memo[key] = not _edge_safe(p, s, t)
        return memo[key]

    unsafe_edges = {
        (s, k)
        for s in p.states
        for k, t in enumerate(p.out(s))
        if not _state_safe(p, t.target) or edge_bad(s, t)
    }
    unsafe_states = {s for s in p.states if not _state_safe(p, s)}
    dead_edges: set = set()
    records: list[PruneRecord] = []
    order = {s: k for k, s in enumerate(p.states)}
    rnd = 0

    def live_edges(s):
        return [t for k, t in enumerate(edges[s]) if (s, k) not in dead_edges and t.target in alive]

    def candidates():
        found = [(s, "unsafe") for s in unsafe_states if s in alive]
        edge_cands = sorted(
            (e for e in unsafe_edges if e not in dead_edges and e[0] in alive),
            key=lambda e: (order[e[0]], e[1]),
        )
        if rng is None and (found or edge_cands):
            return found, edge_cands
        unsafe_now = {s for s, _ in found}
        reach = set()
        if p.initial in alive:
            reach = {p.initial}
            todo = [p.initial]
            while todo:
                s = todo.pop()
                for t in live_edges(s):
                    if t.target not in reach:
                        reach.add(t.target)
                        todo.append(t.target)
        for s in alive:
            if s in unsafe_now:
                continue
            if s not in reach:
                found.append((s, "unreachable"))
                continue
            have = {t.event for t in live_edges(s)}
            if any(e not in have for e in p.enabled(s)):
                found.append((s, "blocked"))
        return found, edge_cands

    while True:
        states, bad_edges = candidates()
        if not states and not bad_edges:
            break
        rnd += 1
        if rng is not None:
            pool = [("state", c) for c in sorted(states, key=lambda c: order[c[0]])] + [("edge", e) for e in bad_edges]
            kind, item = rng.choice(pool)
            states, bad_edges = ([item], []) if kind == "state" else ([], [item])
        dead_edges.update(bad_edges)
        for s, reason in sorted(states, key=lambda c: order[c[0]]):
            alive.discard(s)
            records.append(PruneRecord(s, reason, rnd))

    if p.initial not in alive:
        return ProductNfm(p.nfms, p.obs, p.secret, None, (), {}, p.deleted + tuple(records))
    kept = tuple(s for s in p.states if s in alive)
    transitions = {s: tuple(live_edges(s)) for s in kept}
    return ProductNfm(p.nfms, p.obs, p.secret, p.initial, kept, transitions, p.deleted + tuple(records))


def check_joint_enforceability(p: ProductNfm) -> bool:
    return not prune_product(p).empty


def synthesize_joint(m: Model) -> tuple[ProductNfm, ProductNfm]:
    """Build and prune the product for a model; returns ``(unpruned, pruned)``."""
    full = product_for(m)
    return full, prune_product(full)


def pruning_report(full: ProductNfm, pruned: ProductNfm) -> dict:
    return {
        "enforceable": not pruned.empty,
        "states_before": len(full.states),
        "states_after": len(pruned.states),
        "deleted": [
            {"state": full.label(r.state), "reason": r.reason, "round": r.round}
            for r in pruned.deleted
        ],
    }
