"""Extracting per-intruder strategies from the pruned product and simulating runs."""

from __future__ import annotations

from dataclasses import dataclass
from functools import reduce
from typing import Sequence, Tuple

from .insertion import InsertionStrategy, ModifiedWord, policy_key
from .model import Estimate, Model, ModelError, fmt_estimate, fmt_word
from .nfm import ProductNfm
from .joint import prune_product
from .observer import ObservationError, build_observer
from .opacity import global_mask


class EmptyProductError(ValueError):
    pass


class NoLocalStrategyError(ValueError):
    """Every way of making the joint choices agree with local observations failed."""


class _Conflict(Exception):
    def __init__(self, intruder, states, event):
        self.intruder, self.states, self.event = intruder, states, event


def _choose(p: ProductNfm, policy: str) -> dict:
    choice = {}
    for s in p.states:
        by_event: dict = {}
        for t in p.out(s):
            by_event.setdefault(t.event, []).append(t)
        for e, opts in by_event.items():
            choice[(s, e)] = min(opts, key=lambda t: (policy_key(policy, t.outputs), p.sort_key(t.target)))
    return choice


def _project(p: ProductNfm, choice: dict, i: int, policy: str) -> InsertionStrategy:
    """Determinize the chosen subgraph over what intruder ``i`` observes."""
    alphabet = p.nfms[i].inputs
    visible = frozenset(alphabet)

    def closure(states):
        seen = set(states)
        todo = list(states)
        while todo:
            s = todo.pop()
            for e in p.enabled(s):
                t = choice.get((s, e))
                if e not in visible and t is not None and t.target not in seen:
                    seen.add(t.target)
                    todo.append(t.target)
        return frozenset(seen)

    init = closure({p.initial})
    ids = {init: 0}
    order = [init]
    table = {}
    k = 0
    while k < len(order):
        cur = order[k]
        k += 1
        for e in alphabet:
            picked = [choice[(s, e)] for s in sorted(cur, key=p.sort_key) if (s, e) in choice]
            if not picked:
                continue
            outs = {t.outputs[i] for t in picked}
            if len(outs) > 1:
                raise _Conflict(i, cur, e)
            nxt = closure({t.target for t in picked})
            if nxt not in ids:
                ids[nxt] = len(ids)
                order.append(nxt)
            table[(ids[cur], e)] = (ids[nxt], next(iter(outs)))
    labels = {n: " | ".join(p.label(s) for s in sorted(S, key=p.sort_key)) for S, n in ids.items()}
    return InsertionStrategy(i, alphabet, 0, table, labels, policy)


def _restrict(p: ProductNfm, conflict: _Conflict, policy: str) -> ProductNfm:
    i, e = conflict.intruder, conflict.event
    group = [s for s in sorted(conflict.states, key=p.sort_key) if any(t.event == e for t in p.out(s))]
    options = [{t.outputs[i] for t in p.out(s) if t.event == e} for s in group]
    common = set.intersection(*options)
    pool = common or options[0]
    keep = min(pool, key=lambda o: policy_key(policy, [o]))
    members = set(group)
    transitions = {
        s: tuple(t for t in p.out(s) if s not in members or t.event != e or t.outputs[i] == keep)
        for s in p.states
    }
    return ProductNfm(p.nfms, p.obs, p.secret, p.initial, p.states, transitions, p.deleted)


def extract_joint_strategy(p: ProductNfm, policy: str = "min-insert") -> list[InsertionStrategy]:
    """One deterministic insertion strategy per intruder from a pruned product.

    At every product state one outgoing transition per event is chosen by
    ``policy``. Each intruder's strategy is that choice seen through its own
    observations; when two product states the intruder cannot tell apart
    would need different outputs, the offending transitions are removed,
    the product is pruned again and the choice repeated.
    """
    if p.empty:
        raise EmptyProductError("cannot extract strategies from an empty product")
    cur = p
    while True:
        choice = _choose(cur, policy)
        try:
            return [_project(cur, choice, i, policy) for i in range(cur.n)]
        except _Conflict as c:
            cur = prune_product(_restrict(cur, c, policy))
            if cur.empty:
                raise NoLocalStrategyError(
                    "no strategy choice is consistent with every intruder's observations"
                ) from None


# -- simulation ----------------------------------------------------------------


@dataclass(frozen=True)
class Snapshot:
    intruder_ests: Tuple[Estimate, ...]
    obs_est: Estimate
    joint: frozenset
    local_reveal: Tuple[bool, ...]
    joint_reveal: bool

    def to_dict(self) -> dict:
        return {
            "estimates": [fmt_estimate(e) for e in self.intruder_ests],
            "obs": fmt_estimate(self.obs_est),
            "joint": fmt_estimate(self.joint),
            "local_reveal": list(self.local_reveal),
            "joint_reveal": self.joint_reveal,
        }


@dataclass(frozen=True)
class TraceStep:
    event: str
    inputs: Tuple[str | None, ...]  # what each intruder's insertion function receives
    outputs: Tuple[ModifiedWord, ...]
    substeps: Tuple[Snapshot, ...]


@dataclass(frozen=True)
class Trace:
    word: Tuple[str, ...]
    initial: Snapshot
    steps: Tuple[TraceStep, ...]

    def snapshots(self):
        yield self.initial
        for st in self.steps:
            yield from st.substeps

    @property
    def final(self) -> Snapshot:
        for st in reversed(self.steps):
            if st.substeps:
                return st.substeps[-1]
        return self.initial

    @property
    def local_reveals(self) -> int:
        return sum(any(s.local_reveal) for s in self.snapshots())

    @property
    def joint_reveals(self) -> int:
        return sum(s.joint_reveal for s in self.snapshots())

    @property
    def revealed(self) -> bool:
        return bool(self.local_reveals or self.joint_reveals)

    def observed(self, i: int) -> Tuple[str, ...]:
        """The word intruder ``i`` ends up seeing."""
        return tuple(e for st in self.steps for e in st.outputs[i].observed())

    def to_dict(self) -> dict:
        return {
            "word": list(self.word),
            "initial": self.initial.to_dict(),
            "steps": [
                {
                    "event": st.event,
                    "inputs": list(st.inputs),
                    "outputs": [str(o) if o.seq else "" for o in st.outputs],
                    "substeps": [s.to_dict() for s in st.substeps],
                }
                for st in self.steps
            ],
            "local_reveals": self.local_reveals,
            "joint_reveals": self.joint_reveals,
        }

    def lines(self) -> list[str]:
        def snap(s: Snapshot) -> str:
            ests = " ".join(fmt_estimate(e) for e in s.intruder_ests)
            flags = "".join("L" if r else "." for r in s.local_reveal) + ("J" if s.joint_reveal else ".")
            return f"ests {ests} obs {fmt_estimate(s.obs_est)} joint {fmt_estimate(s.joint)} [{flags}]"

        out = [f"word {fmt_word(self.word) or 'ε'}", f"  init: {snap(self.initial)}"]
        for st in self.steps:
            outs = ", ".join(str(o) if o.seq else "ε" for o in st.outputs)
            out.append(f"  {st.event} -> ({outs})")
            for s in st.substeps:
                out.append(f"    {snap(s)}")
        return out


def simulate_run(m: Model, strategies: Sequence[InsertionStrategy], word: Sequence[str]) -> Trace:
    """Run genuine ``word`` through the insertion strategies and record every estimate."""
    word = tuple(word)
    if len(strategies) != m.n_intruders:
        raise ValueError("need one strategy per intruder")
    for e in word:
        if e not in m.events:
            raise ModelError(f"symbol {e!r} outside alphabet")
    if not m.run(word):
        raise ModelError(f"word {fmt_word(word)!r} is not generated by the model")
    observers = [build_observer(m, mask) for mask in m.masks]
    gobs = build_observer(m, global_mask(m))

    def snapshot(ests, g):
        joint = reduce(frozenset.intersection, ests, g)
        return Snapshot(tuple(ests), g, joint, tuple(m.reveals(x) for x in ests), m.reveals(joint))

    mems = [f.initial for f in strategies]
    ests = [o.initial for o in observers]
    g = gobs.initial
    init = snapshot(ests, g)
    steps = []
    for e in word:
        if e in gobs.events:
            g = gobs.step(g, e)
        inputs, outputs = [], []
        for i, (f, mask) in enumerate(zip(strategies, m.masks)):
            if e in mask:
                mems[i], o = f.step(mems[i], e)
                inputs.append(e)
            else:
                o = ()
                inputs.append(None)
            outputs.append(o)
        subs = []
        for k in range(max((len(o) for o in outputs), default=0)):
            for i, o in enumerate(outputs):
                if k < len(o):
                    nxt = observers[i].step(ests[i], o[k])
                    if nxt is None:
                        raise ObservationError(f"intruder {i + 1} cannot explain output {o}")
                    ests[i] = nxt
            subs.append(snapshot(ests, g))
        steps.append(TraceStep(e, tuple(inputs), tuple(ModifiedWord.from_output(o) for o in outputs), tuple(subs)))
    return Trace(word, init, tuple(steps))
