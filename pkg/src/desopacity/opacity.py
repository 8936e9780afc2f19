"""Verification of current-state opacity against one, several, or coordinating intruders."""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from functools import reduce
from typing import Iterable, Sequence, Tuple, Union

from .model import Estimate, Model, Word, fmt_word, sorted_tokens
from .observer import Observer, build_observer, estimate, shortest_words

JOINT = "joint"


@dataclass(frozen=True)
class Witness:
    """A violation: ``intruder`` is a 0-based index or ``"joint"``."""

    intruder: Union[int, str, None]
    word: Word
    estimate: Estimate

    def to_dict(self) -> dict:
        who = self.intruder + 1 if isinstance(self.intruder, int) else self.intruder
        return {"intruder": who, "word": list(self.word), "estimate": sorted_tokens(self.estimate)}

    def describe(self) -> str:
        who = f"intruder {self.intruder + 1}" if isinstance(self.intruder, int) else str(self.intruder)
        word = fmt_word(self.word) or "ε"
        return f"{who}: word {word} -> estimate {{{','.join(sorted_tokens(self.estimate))}}}"


@dataclass(frozen=True)
class Verdict:
    witnesses: Tuple[Witness, ...] = ()

    @property
    def holds(self) -> bool:
        return not self.witnesses

    def to_dict(self) -> dict:
        return {"holds": self.holds, "witnesses": [w.to_dict() for w in self.witnesses]}


def verify_cso(m: Model, mask: Iterable[str], intruder: Union[int, None] = None) -> Verdict:
    """One witness per revealing observer state, each with its shortest observed word."""
    obs = build_observer(m, mask)
    words = shortest_words(obs)
    wit = [Witness(intruder, words[s], s) for s in obs.states if obs.reveals(s)]
    wit.sort(key=lambda w: (len(w.word), w.word))
    return Verdict(tuple(wit))


def verify_dcso(m: Model) -> Verdict:
    if not m.masks:
        raise ValueError("model declares no intruders")
    wit: list[Witness] = []
    for i, mask in enumerate(m.masks):
        wit.extend(verify_cso(m, mask, i).witnesses)
    return Verdict(tuple(wit))


def global_mask(m: Model) -> frozenset:
    return frozenset().union(*m.masks)


def coordinated_estimate(m: Model, words: Sequence[Sequence[str]], observers=None) -> frozenset:
    """Intersection of the intruders' local estimates."""
    if len(words) != len(m.masks):
        raise ValueError("need one observed word per intruder")
    if observers is None:
        observers = [build_observer(m, mask) for mask in m.masks]
    return reduce(frozenset.intersection, (estimate(o, w) for o, w in zip(observers, words)))


def verify_jcso_plain(m: Model) -> Verdict:
    """Local CSO for every intruder plus safety of the coordinated estimate on every run.

    Runs are explored as the synchronous product of the intruder observers with
    an observer over the union of their alphabets, so only words of the model
    are considered. Joint witnesses are reported for product states where the
    intersection reveals the secret but no single local estimate does.
    """
    local = verify_dcso(m)
    observers = [build_observer(m, mask) for mask in m.masks]
    gobs = build_observer(m, global_mask(m))
    start = (tuple(o.initial for o in observers), gobs.initial)
    seen = {start: ()}
    queue = deque([start])
    joint: list[Witness] = []
    while queue:
        ests, g = queue.popleft()
        psi = reduce(frozenset.intersection, ests)
        if m.reveals(psi) and not any(m.reveals(e) for e in ests):
            joint.append(Witness(JOINT, seen[(ests, g)], psi))
        for e in gobs.enabled(g):
            nxt_ests = []
            for o, est in zip(observers, ests):
                if e in o.events:
                    est = o.step(est, e)
                nxt_ests.append(est)
            nxt = (tuple(nxt_ests), gobs.step(g, e))
            if nxt not in seen:
                seen[nxt] = seen[(ests, g)] + (e,)
                queue.append(nxt)
    return Verdict(local.witnesses + tuple(joint))


def is_safe_output(m: Model, mask: Iterable[str], word: Sequence[str], observer: Observer | None = None) -> bool:
    """Whether an observed (possibly modified) word never passes through a revealing estimate."""
    obs = observer or build_observer(m, mask)
    cur = obs.initial
    if obs.reveals(cur):
        return False
    for e in word:
        cur = obs.step(cur, e)
        if cur is None or obs.reveals(cur):
            return False
    return True
