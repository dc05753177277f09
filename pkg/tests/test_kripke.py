import pytest
from hypothesis import given, settings

from conftest import formulas, frames, models
from oracles import all_upsets, force_naive, naive_closure, tautology
from superint.formula import BOTTOM, TOP, Or, Not, Var, parse, variables
from superint.kripke import (FrameError, KripkeFrame, KripkeModel, ModelFormatError, check_poset, closure,
                             countervaluation, dump_model, force, load_model, refuters, to_dot, valid_in_model)

p = Var("p")


def chain2(val_p=("w1",)):
    fr = closure([("w0", "w1")])
    return KripkeModel(fr, {"p": fr.mask(val_p)})


def test_check_poset_examples():
    assert check_poset(closure([], ["w"]))
    bad = KripkeFrame(["a", "b"], [0b11, 0b11])
    rep = check_poset(bad)
    assert not rep and "antisymmetr" in str(rep)
    assert check_poset(closure([(0, 1), (1, 2), (0, 3)]))


def test_closure_examples():
    fr = closure([], ["w"])
    assert fr.leq("w", "w")
    fr = closure([("w0", "w1"), ("w1", "w2")])
    assert fr.leq("w0", "w2") and not fr.leq("w2", "w0")
    with pytest.raises(FrameError):
        closure([("a", "b"), ("b", "a")])


def test_force_examples():
    m = chain2()
    assert not force(m, "w0", BOTTOM)
    assert not force(m, "w0", Or(p, Not(p)))
    assert force(m, "w1", Or(p, Not(p)))
    assert refuters(m, TOP) == set()
    assert refuters(m, BOTTOM) == {"w0", "w1"}
    assert valid_in_model(m, TOP) and not valid_in_model(m, BOTTOM)


def test_valuation_must_be_upward_closed():
    fr = closure([("w0", "w1")])
    with pytest.raises(FrameError):
        KripkeModel(fr, {"p": fr.mask(["w0"])})


def test_countervaluation_examples():
    lem = parse("p | ~p")
    for engine in ("sat", "backtrack"):
        assert countervaluation(closure([], ["w"]), lem, engine=engine).status == "none"
        res = countervaluation(closure([("w0", "w1")]), lem, engine=engine)
        assert res.found
        assert res.valuation["p"] == frozenset({"w1"})
        assert res.witness == "w0"


def test_countervaluation_budget_gives_unknown():
    fr = closure([(i, j) for i in range(8) for j in range(i + 1, 8) if (i + j) % 3])
    f = parse("(p -> q) | (q -> r) | (r -> p)")
    assert countervaluation(fr, f, budget=1, engine="backtrack").status == "unknown"


def test_model_dump_round_trip_and_dot():
    m = chain2()
    text = dump_model(m)
    again = load_model(text)
    assert dump_model(again) == text
    dot = to_dot(m, Or(p, Not(p)))
    assert dot.startswith("digraph") and '"w0" [shape=doublecircle' in dot and '"w0" -> "w1"' in dot


@pytest.mark.parametrize("text", ["w0\n", "points:\nw0\norder:\nw0 -> w9\n", "points:\na\nb\norder:\na -> b\nb -> a\n",
                                  "points:\na\norder:\na b\n"])
def test_model_format_errors(text):
    with pytest.raises(ModelFormatError):
        load_model(text)


@settings(max_examples=1000)
@given(models(), formulas())
def test_forcing_is_persistent_and_refuters_downward_closed(m, f):
    fr = m.frame
    ext = m.extension(f)
    for w in range(fr.size):
        if ext >> w & 1:
            assert fr.up[w] & ext == fr.up[w]
    bad = m.refuters_mask(f)
    assert fr.down_closure(bad) == bad


@settings(max_examples=1000)
@given(models(), formulas())
def test_force_matches_naive_evaluator(m, f):
    fr = m.frame
    val = {k: set(fr.labels(v)) for k, v in m.valuation.items()}
    for w in fr.points:
        assert m.force(w, f) == force_naive(fr.points, fr.leq, val, w, f)


@settings(max_examples=1000)
@given(frames(max_points=7))
def test_closure_is_a_poset_matching_naive_closure(fr):
    assert check_poset(fr)
    base = [(a, b) for a in fr.points for b in fr.points if fr.leq(a, b)]
    assert naive_closure(fr.points, base) == set(base)


@settings(max_examples=300)
@given(frames(max_points=4), formulas(names=("p", "q"), max_leaves=8))
def test_countervaluation_engines_agree_with_exhaustive_search(fr, f):
    names = sorted(variables(f))
    ups = list(all_upsets(fr.points, fr.leq))
    exhaustive = False
    for combo in __import__("itertools").product(ups, repeat=len(names)):
        val = dict(zip(names, combo))
        if any(not force_naive(fr.points, fr.leq, val, w, f) for w in fr.points):
            exhaustive = True
            break
    for engine in ("sat", "backtrack"):
        res = countervaluation(fr, f, engine=engine)
        assert res.found == exhaustive
        if res.found:
            assert not res.model(fr).force(res.witness, f)


@settings(max_examples=300)
@given(formulas(max_leaves=10))
def test_antichain_validity_is_classical_tautology(f):
    fr = closure([], ["a", "b", "c"])
    names = sorted(variables(f))
    res = countervaluation(fr, f)
    assert (res.status == "none") == tautology(f, names)
