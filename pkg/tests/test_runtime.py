import random

import pytest
from hypothesis import given, settings, strategies as st

from conftest import S
from desopacity import runtime
from desopacity.insertion import (
    ModifiedWord,
    UnmodeledObservation,
    apply_insertion,
    dump_strategies,
    identity_strategy,
    load_strategies,
    policy_key,
)
from desopacity.joint import synthesize_joint
from desopacity.model import Model, ModelError, enumerate_language
from desopacity.runtime import EmptyProductError, extract_joint_strategy, simulate_run
from oracles import random_model


@pytest.fixture(scope="module")
def joint(figure3):
    _, pruned = synthesize_joint(figure3)
    return extract_joint_strategy(pruned)


def _identity(m):
    return [identity_strategy(i, [e for e in m.events if e in mask]) for i, mask in enumerate(m.masks)]


def test_joint_choice_at_start(joint):
    f1, f2 = joint
    assert f1.step(f1.initial, "c")[1] == ("c",)
    assert f2.step(f2.initial, "c")[1] == ("d", "c")
    assert f1.step(f1.initial, "d")[1] == ("d",)
    assert f2.step(f2.initial, "d")[1] == ("d",)
    assert f1.step(f1.initial, "b")[1] == ("c", "b")
    assert f2.step(f2.initial, "a")[1] == ("c", "a")


def test_extraction_is_deterministic(figure3, joint):
    _, pruned = synthesize_joint(figure3)
    again = extract_joint_strategy(pruned)
    assert dump_strategies(again) == dump_strategies(joint)


def test_strategy_json_roundtrip(joint):
    text = dump_strategies(joint, mode="joint")
    back = load_strategies(text)
    assert [f.table for f in back] == [f.table for f in joint]
    assert back[1].intruder == 1


def test_apply_insertion(joint):
    f1, f2 = joint
    assert str(apply_insertion(f1, "cb")) == "cb"
    assert str(apply_insertion(f2, "ca")) == "d_Ica"
    assert apply_insertion(f2, "ca").genuine() == ("c", "a")
    with pytest.raises(UnmodeledObservation):
        apply_insertion(f1, "bb")


def test_modified_word():
    w = ModifiedWord.from_output(("d", "c")) + ModifiedWord.from_output(("a",))
    assert w.observed() == ("d", "c", "a")
    assert w.inserted() == ("d",)
    assert w.genuine() == ("c", "a")
    assert str(ModifiedWord()) == "ε"


def test_policy_key():
    assert policy_key("min-insert", [("c",), ("d", "c")]) < policy_key("min-insert", [("d", "c"), ("d", "c")])
    assert policy_key("max-insert", [("d", "c")]) < policy_key("max-insert", [("c",)])
    with pytest.raises(ValueError):
        policy_key("random", [])


def test_simulate_joint(figure3, joint):
    t = simulate_run(figure3, joint, "cab")
    assert t.observed(0) == ("c", "b")
    assert t.observed(1) == ("d", "c", "a")
    assert t.final.intruder_ests == (S(5, 6), S(9))
    assert t.final.joint == frozenset()
    assert not t.revealed


def test_simulate_identity(figure3):
    t = simulate_run(figure3, _identity(figure3), "cab")
    assert t.final.joint == S(6)
    assert t.joint_reveals == 1 and t.local_reveals == 0
    assert simulate_run(figure3, _identity(figure3), "b").local_reveals == 1


def test_simulate_rejects_bad_words(figure3, joint):
    with pytest.raises(ModelError):
        simulate_run(figure3, joint, "aa")
    with pytest.raises(ModelError):
        simulate_run(figure3, joint, "z")
    with pytest.raises(ValueError):
        simulate_run(figure3, joint[:1], "c")


def test_policies_all_sound(figure3):
    _, pruned = synthesize_joint(figure3)
    for policy in ("min-insert", "max-insert", "lex"):
        fs = extract_joint_strategy(pruned, policy)
        for w in enumerate_language(figure3, 4):
            assert not simulate_run(figure3, fs, w).revealed


def test_empty_product_raises():
    from desopacity.nfm import ProductNfm
    with pytest.raises(EmptyProductError):
        extract_joint_strategy(ProductNfm((), None, frozenset(), None, (), {}))


CONFLICT = Model(
    states=tuple("01234"),
    events=tuple("abc"),
    transitions=frozenset(tuple(t) for t in (
        "0c1", "2b2", "4b4", "2c1", "4c3", "0b4", "4b1", "3b0", "0c2", "4b3", "2a3", "0c4",
    )),
    initial=frozenset({"0"}),
    secret=frozenset({"4", "2"}),
    masks=(frozenset("abc"), frozenset("ab"), frozenset("ac")),
)


def test_conflicting_choices_are_repaired(monkeypatch):
    calls = []
    real = runtime._restrict

    def spy(*args):
        calls.append(args[1])
        return real(*args)

    monkeypatch.setattr(runtime, "_restrict", spy)
    _, pruned = synthesize_joint(CONFLICT)
    assert not pruned.empty
    fs = extract_joint_strategy(pruned)
    assert calls
    for w in enumerate_language(CONFLICT, 6):
        assert not simulate_run(CONFLICT, fs, w).revealed


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 10**6))
def test_joint_strategies_never_reveal(seed):
    rng = random.Random(seed)
    m = random_model(rng, rng.randint(2, 5), rng.randint(2, 3), n_trans=rng.randint(2, 8))
    _, pruned = synthesize_joint(m)
    if pruned.empty:
        return
    try:
        fs = extract_joint_strategy(pruned)
    except runtime.NoLocalStrategyError:
        return
    for w in enumerate_language(m, 5):
        assert not simulate_run(m, fs, w).revealed
