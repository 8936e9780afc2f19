"""Subset-construction observers (state estimators) for partially observed models."""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from typing import Dict, FrozenSet, Iterable, Sequence, Tuple

from .model import Estimate, Model, ModelError, estimate_key, sorted_tokens


class ObservationError(ValueError):
    """An observed word has no path in the observer."""


def unobservable_reach(m: Model, mask: Iterable[str], states: Iterable[str]) -> Estimate:
    """Close ``states`` under transitions labelled by events outside ``mask``."""
    mask = frozenset(mask)
    seen = set(states)
    if not seen:
        raise ValueError("unobservable_reach needs a nonempty state set")
    unobs = [e for e in m.events if e not in mask]
    todo = list(seen)
    while todo:
        x = todo.pop()
        for e in unobs:
            for y in m.successors(x, e):
                if y not in seen:
                    seen.add(y)
                    todo.append(y)
    return frozenset(seen)


@dataclass(frozen=True)
class Observer:
    """Deterministic estimator over the observable events of one mask.

    ``states`` lists the reachable estimates in breadth-first discovery order.
    """

    events: Tuple[str, ...]
    states: Tuple[Estimate, ...]
    delta: Dict[Tuple[Estimate, str], Estimate]
    initial: Estimate
    secret: FrozenSet[str]

    def step(self, est: Estimate, event: str) -> Estimate | None:
        return self.delta.get((est, event))

    def enabled(self, est: Estimate) -> list[str]:
        return [e for e in self.events if (est, e) in self.delta]

    def reveals(self, est: Estimate) -> bool:
        return bool(est) and est <= self.secret

    def edges(self):
        for est in self.states:
            for e in self.enabled(est):
                yield est, e, self.delta[(est, e)]


def build_observer(m: Model, mask: Iterable[str]) -> Observer:
    mask = frozenset(mask)
    if not mask <= frozenset(m.events):
        raise ModelError("mask references events outside the model alphabet")
    events = tuple(e for e in m.events if e in mask)
    init = unobservable_reach(m, mask, m.initial)
    states = [init]
    delta = {}
    queue = deque([init])
    seen = {init}
    while queue:
        est = queue.popleft()
        for e in events:
            nxt = m.post(est, e)
            if not nxt:
                continue
            nxt = unobservable_reach(m, mask, nxt)
            delta[(est, e)] = nxt
            if nxt not in seen:
                seen.add(nxt)
                states.append(nxt)
                queue.append(nxt)
    return Observer(events=events, states=tuple(states), delta=delta, initial=init, secret=m.secret)


def estimate(o: Observer, word: Sequence[str]) -> Estimate:
    """State estimate after observing ``word``."""
    cur = o.initial
    for k, e in enumerate(word):
        nxt = o.step(cur, e)
        if nxt is None:
            raise ObservationError(
                f"observation inconsistent with model at position {k} ({e!r})"
            )
        cur = nxt
    return cur


def shortest_words(o: Observer) -> dict:
    """Shortest (then lexicographically least) observed word reaching each observer state."""
    words = {o.initial: ()}
    queue = deque([o.initial])
    while queue:
        est = queue.popleft()
        for e in o.enabled(est):
            nxt = o.delta[(est, e)]
            if nxt not in words:
                words[nxt] = words[est] + (e,)
                queue.append(nxt)
    return words


def revealing_states(o: Observer) -> set:
    return {s for s in o.states if o.reveals(s)}


def sorted_estimates(ests: Iterable[Estimate]) -> list:
    return sorted(ests, key=estimate_key)


def observer_table(o: Observer) -> list[tuple[str, str, str]]:
    """Human-readable edge list ``(source, event, target)`` with set-valued labels."""
    fmt = lambda s: "{" + ",".join(sorted_tokens(s)) + "}"
    return [(fmt(a), e, fmt(b)) for a, e, b in o.edges()]
