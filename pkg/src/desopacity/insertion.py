"""Deterministic insertion strategies and the modified words they produce."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Dict, Iterable, Sequence, Tuple

from .model import Word

POLICIES = ("min-insert", "max-insert", "lex")


class UnmodeledObservation(KeyError):
    """The strategy has no response for an observation."""

    def __str__(self):
        return str(self.args[0]) if self.args else "unmodeled observation"


def inserted_count(outputs: Sequence[Sequence[str]]) -> int:
    return sum(len(o) - 1 for o in outputs if o)


def policy_key(policy: str, outputs: Sequence[Sequence[str]]):
    """Ordering of candidate output tuples; the smallest key is chosen.

    Intruders are compared in index order inside the output tuple.
    """
    outputs = tuple(tuple(o) for o in outputs)
    if policy == "min-insert":
        return (inserted_count(outputs), outputs)
    if policy == "max-insert":
        return (-inserted_count(outputs), outputs)
    if policy == "lex":
        return (outputs,)
    raise ValueError(f"unknown policy {policy!r}; choose from {', '.join(POLICIES)}")


@dataclass(frozen=True)
class ModifiedWord:
    """Output of an insertion function: ``(event, inserted)`` pairs."""

    seq: Tuple[Tuple[str, bool], ...] = ()

    def observed(self) -> Word:
        """What the intruder sees; inserted events are indistinguishable."""
        return tuple(e for e, _ in self.seq)

    def genuine(self) -> Word:
        return tuple(e for e, ins in self.seq if not ins)

    def inserted(self) -> Word:
        return tuple(e for e, ins in self.seq if ins)

    def __add__(self, other: "ModifiedWord") -> "ModifiedWord":
        return ModifiedWord(self.seq + other.seq)

    def __len__(self):
        return len(self.seq)

    def __str__(self):
        return "".join(f"{e}_I" if ins else e for e, ins in self.seq) or "ε"

    @classmethod
    def from_output(cls, output: Sequence[str]) -> "ModifiedWord":
        """All but the last symbol of a per-event output are insertions."""
        return cls(tuple((e, k < len(output) - 1) for k, e in enumerate(output)))


@dataclass(frozen=True)
class InsertionStrategy:
    """Deterministic Mealy machine over one intruder's observable events.

    ``table`` maps ``(memory, event)`` to ``(next memory, output)`` where the
    output ends with the genuine event and everything before it is inserted.
    """

    intruder: int
    alphabet: Tuple[str, ...]
    initial: int
    table: Dict[Tuple[int, str], Tuple[int, Word]]
    labels: Dict[int, str] = field(default_factory=dict)
    policy: str = "min-insert"

    def step(self, state: int, event: str) -> Tuple[int, Word]:
        try:
            return self.table[(state, event)]
        except KeyError:
            raise UnmodeledObservation(f"unmodeled observation {event!r} in strategy state {state}") from None

    @property
    def memory_states(self) -> list[int]:
        found = {self.initial} | {s for s, _ in self.table} | {t for t, _ in self.table.values()}
        return sorted(found)

    def to_dict(self) -> dict:
        return {
            "intruder": self.intruder + 1,
            "alphabet": list(self.alphabet),
            "policy": self.policy,
            "initial": self.initial,
            "states": [{"id": s, "label": self.labels.get(s, str(s))} for s in self.memory_states],
            "step": [
                {"state": s, "event": e, "next": t, "output": list(out)}
                for (s, e), (t, out) in sorted(self.table.items(), key=lambda kv: (kv[0][0], kv[0][1]))
            ],
        }

    @classmethod
    def from_dict(cls, data: dict) -> "InsertionStrategy":
        table = {}
        for row in data["step"]:
            out = tuple(row["output"])
            if not out or out[-1] != row["event"]:
                raise ValueError(f"output {out} does not end with event {row['event']!r}")
            table[(int(row["state"]), row["event"])] = (int(row["next"]), out)
        return cls(
            intruder=int(data["intruder"]) - 1,
            alphabet=tuple(data["alphabet"]),
            initial=int(data["initial"]),
            table=table,
            labels={int(s["id"]): s.get("label", "") for s in data.get("states", [])},
            policy=data.get("policy", "min-insert"),
        )


def identity_strategy(intruder: int, alphabet: Iterable[str]) -> InsertionStrategy:
    """The strategy that never inserts anything."""
    alphabet = tuple(alphabet)
    return InsertionStrategy(
        intruder=intruder,
        alphabet=alphabet,
        initial=0,
        table={(0, e): (0, (e,)) for e in alphabet},
        labels={0: "identity"},
        policy="identity",
    )


def apply_insertion(f: InsertionStrategy, word: Sequence[str]) -> ModifiedWord:
    """Induced insertion function: concatenate per-event outputs along ``word``."""
    state = f.initial
    out = ModifiedWord()
    for e in word:
        state, o = f.step(state, e)
        out = out + ModifiedWord.from_output(o)
    return out


def dump_strategies(strategies: Sequence[InsertionStrategy], **meta) -> str:
    doc = dict(meta)
    doc["strategies"] = [f.to_dict() for f in strategies]
    return json.dumps(doc, indent=2, sort_keys=True) + "\n"


def load_strategies(text: str) -> list[InsertionStrategy]:
    doc = json.loads(text)
    return [InsertionStrategy.from_dict(d) for d in doc["strategies"]]
