"""Finite automaton model, ``.des`` file format, projection and bounded languages."""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import FrozenSet, Iterable, Sequence, Tuple

Word = Tuple[str, ...]
Estimate = FrozenSet[str]

_TOKEN = re.compile(r"^[A-Za-z0-9_]+$")
_HEADER = re.compile(r"^\[\s*([A-Za-z]+)(?:\s+(\d+))?\s*\](.*)$")


class ModelError(ValueError):
    """Raised for malformed model files or inconsistent model data."""

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        super().__init__(f"line {line}: {message}" if line is not None else message)


def token_key(token: str):
    """Sort key putting numeric tokens first, in numeric order."""
    if token.isdigit():
        return (0, int(token), token)
    return (1, 0, token)


def sorted_tokens(tokens: Iterable[str]) -> list[str]:
    return sorted(tokens, key=token_key)


def estimate_key(est: Iterable[str]):
    return tuple(token_key(t) for t in sorted_tokens(est))


def fmt_estimate(est: Iterable[str]) -> str:
    return "{" + ",".join(sorted_tokens(est)) + "}"


def fmt_word(word: Sequence[str]) -> str:
    return "".join(word) if all(len(e) == 1 for e in word) else " ".join(word)


def parse_word(text: str) -> Word:
    """Parse a word given either space separated or as single-character events.

    ``"c a b"`` and ``"cab"`` both give ``("c", "a", "b")``; ``""`` and ``"eps"`` give the empty word.
    """
    text = text.strip()
    if text in ("", "eps", "ε"):
        return ()
    if " " in text or "," in text:
        return tuple(t for t in re.split(r"[\s,]+", text) if t)
    return tuple(text)


@dataclass(frozen=True)
class Model:
    """Nondeterministic finite automaton with a secret and per-intruder observable alphabets."""

    states: Tuple[str, ...]
    events: Tuple[str, ...]
    transitions: FrozenSet[Tuple[str, str, str]]
    initial: FrozenSet[str]
    secret: FrozenSet[str] = frozenset()
    masks: Tuple[FrozenSet[str], ...] = ()
    _succ: dict = field(default=None, init=False, repr=False, compare=False, hash=False)

    def __post_init__(self):
        states = set(self.states)
        events = set(self.events)
        if len(states) != len(self.states):
            raise ModelError("duplicate state")
        if len(events) != len(self.events):
            raise ModelError("duplicate event")
        for tok in (*self.states, *self.events):
            if not _TOKEN.match(tok):
                raise ModelError(f"invalid token {tok!r}")
        if not self.initial:
            raise ModelError("empty initial set")
        for src, e, dst in self.transitions:
            if src not in states or dst not in states:
                raise ModelError(f"unknown state in transition {src} {e} {dst}")
            if e not in events:
                raise ModelError(f"unknown event {e!r}")
        if not self.initial <= states:
            raise ModelError("initial state not declared")
        if not self.secret <= states:
            raise ModelError("secret state not declared")
        for i, mask in enumerate(self.masks):
            if not mask <= events:
                raise ModelError(f"observable {i + 1} references unknown event")
        # canonical ordering so equal models compare equal
        object.__setattr__(self, "states", tuple(sorted_tokens(self.states)))
        object.__setattr__(self, "events", tuple(sorted_tokens(self.events)))
        succ: dict = {}
        for src, e, dst in self.transitions:
            succ.setdefault((src, e), set()).add(dst)
        object.__setattr__(self, "_succ", {k: frozenset(v) for k, v in succ.items()})

    @property
    def nonsecret(self) -> FrozenSet[str]:
        return frozenset(self.states) - self.secret

    @property
    def n_intruders(self) -> int:
        return len(self.masks)

    def successors(self, state: str, event: str) -> FrozenSet[str]:
        return self._succ.get((state, event), frozenset())

    def post(self, states: Iterable[str], event: str) -> FrozenSet[str]:
        out: set[str] = set()
        for x in states:
            out |= self._succ.get((x, event), frozenset())
        return frozenset(out)

    def run(self, word: Sequence[str], start: Iterable[str] | None = None) -> FrozenSet[str]:
        """States reached from ``start`` (default: initial) along ``word``; empty if undefined."""
        cur = frozenset(self.initial if start is None else start)
        for e in word:
            cur = self.post(cur, e)
            if not cur:
                break
        return cur

    def enabled(self, states: Iterable[str]) -> list[str]:
        return [e for e in self.events if self.post(states, e)]

    def reveals(self, est: Iterable[str]) -> bool:
        """An estimate reveals the secret when it is nonempty and inside the secret set."""
        est = frozenset(est)
        return bool(est) and est <= self.secret


def project(mask: Iterable[str], word: Sequence[str], alphabet: Iterable[str] | None = None) -> Word:
    """Natural projection: keep the symbols of ``word`` that are in ``mask``."""
    mask = frozenset(mask)
    if alphabet is not None:
        alphabet = frozenset(alphabet)
        for e in word:
            if e not in alphabet:
                raise ModelError(f"symbol {e!r} outside alphabet")
    return tuple(e for e in word if e in mask)


def enumerate_language(m: Model, max_len: int) -> set[Word]:
    """All words of length at most ``max_len`` generated from the initial states."""
    if max_len < 0:
        raise ValueError("max_len must be nonnegative")
    out: set[Word] = set()
    stack: list[tuple[Word, FrozenSet[str]]] = [((), frozenset(m.initial))]
    while stack:
        word, cur = stack.pop()
        out.add(word)
        if len(word) == max_len:
            continue
        for e in m.events:
            nxt = m.post(cur, e)
            if nxt:
                stack.append((word + (e,), nxt))
    return out


# -- .des files --------------------------------------------------------------

_LIST_SECTIONS = ("events", "states", "initial", "secret")


def parse_model(text: str) -> Model:
    """Parse ``.des`` text into a :class:`Model`.

    Sections may come in any order. List sections take tokens from the header
    line and any following lines; ``[transitions]`` takes one ``src event dst``
    triple per line until the next header.
    """
    lists: dict[str, tuple[list[str], int]] = {}
    observables: dict[int, tuple[list[str], int]] = {}
    transitions: list[tuple[str, str, str, int]] = []
    current = None  # (kind, key)
    next_obs = 1
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        header = _HEADER.match(line)
        if header:
            name, index, rest = header.group(1).lower(), header.group(2), header.group(3)
            if name in _LIST_SECTIONS:
                if name in lists:
                    raise ModelError(f"duplicate section [{name}]", lineno)
                lists[name] = ([], lineno)
                current = ("list", name)
            elif name == "observable":
                idx = int(index) if index is not None else next_obs
                if idx < 1 or idx in observables:
                    raise ModelError(f"bad or duplicate observable index {idx}", lineno)
                next_obs = max(next_obs, idx) + 1
                observables[idx] = ([], lineno)
                current = ("obs", idx)
            elif name == "transitions":
                if index is not None:
                    raise ModelError("[transitions] takes no index", lineno)
                current = ("trans", None)
            else:
                raise ModelError(f"unknown section [{name}]", lineno)
            line = rest.strip()
            if not line:
                continue
        if current is None:
            raise ModelError("content before first section header", lineno)
        tokens = line.split()
        for tok in tokens:
            if not _TOKEN.match(tok):
                raise ModelError(f"invalid token {tok!r}", lineno)
        kind, key = current
        if kind == "list":
            lists[key][0].extend(tokens)
        elif kind == "obs":
            observables[key][0].extend(tokens)
        else:
            if len(tokens) != 3:
                raise ModelError("transition must be 'source event target'", lineno)
            transitions.append((tokens[0], tokens[1], tokens[2], lineno))

    for name in ("events", "states", "initial"):
        if name not in lists:
            raise ModelError(f"missing section [{name}]")
    events, _ = lists["events"]
    states, _ = lists["states"]
    for name, decl in (("events", events), ("states", states)):
        dup = {t for t in decl if decl.count(t) > 1}
        if dup:
            raise ModelError(f"duplicate {name[:-1]} {sorted(dup)[0]!r}", lists[name][1])
    event_set, state_set = set(events), set(states)

    def check_states(section: str) -> frozenset:
        toks, lineno = lists.get(section, ([], None))
        for t in toks:
            if t not in state_set:
                raise ModelError(f"unknown state {t!r} in [{section}]", lineno)
        return frozenset(toks)

    initial = check_states("initial")
    if not initial:
        raise ModelError("empty initial set", lists["initial"][1])
    secret = check_states("secret")
    for src, e, dst, lineno in transitions:
        if e not in event_set:
            raise ModelError(f"unknown event {e!r}", lineno)
        for x in (src, dst):
            if x not in state_set:
                raise ModelError(f"unknown state {x!r}", lineno)
    if observables and sorted(observables) != list(range(1, len(observables) + 1)):
        raise ModelError("observable indices must be 1..N without gaps")
    masks = []
    for idx in sorted(observables):
        toks, lineno = observables[idx]
        for t in toks:
            if t not in event_set:
                raise ModelError(f"unknown event {t!r} in [observable {idx}]", lineno)
        masks.append(frozenset(toks))
    return Model(
        states=tuple(states),
        events=tuple(events),
        transitions=frozenset((s, e, d) for s, e, d, _ in transitions),
        initial=initial,
        secret=secret,
        masks=tuple(masks),
    )


def load_model(path) -> Model:
    with open(path, encoding="utf-8") as fh:
        return parse_model(fh.read())


def serialize_model(m: Model) -> str:
    lines = [
        "[events] " + " ".join(m.events),
        "[states] " + " ".join(m.states),
        "[initial] " + " ".join(sorted_tokens(m.initial)),
        ("[secret] " + " ".join(sorted_tokens(m.secret))).rstrip(),
    ]
    for i, mask in enumerate(m.masks, start=1):
        lines.append((f"[observable {i}] " + " ".join(sorted_tokens(mask))).rstrip())
    lines.append("[transitions]")
    order = {t: k for k, t in enumerate(m.states)}
    ev = {e: k for k, e in enumerate(m.events)}
    for src, e, dst in sorted(m.transitions, key=lambda t: (order[t[0]], ev[t[1]], order[t[2]])):
        lines.append(f"{src} {e} {dst}")
    return "\n".join(lines) + "\n"
