import pytest
from hypothesis import given, settings, strategies as st

from superint import encoding as enc, harness
from superint.kripke import check_poset
from superint.machine_model import (TruncationError, TruncationParams, a_pt, b_pt, build, e_pt,
                                    parse_point_id)

SMALL = TruncationParams(imax=10)


@pytest.fixture(scope="module")
def cycle():
    m, init = harness.fixture("cycle")
    return build(m, init, SMALL)


def test_point_ids():
    assert parse_point_id("a(3,1)") == a_pt(3, 1)
    assert parse_point_id(" e( 0 , 1 ,2 ) ") == e_pt(0, 1, 2)
    assert str(b_pt(-5, 2)) == "b(-5,2)"
    for bad in ("a(1)", "e(1,2)", "c(1,2)", "a(1,2,3)"):
        with pytest.raises(ValueError):
            parse_point_id(bad)


def test_shape(cycle):
    assert len(cycle.frame) == 3 * 2 * 16 + 1
    assert cycle.e_points == [e_pt(0, 0, 0)]
    assert cycle.e_point((1, 1, 0)) == e_pt(0, 0, 0)
    assert cycle.e_point((5, 0, 0)) is None
    assert check_poset(cycle.frame).ok


def test_chain_order(cycle):
    assert cycle.is_below("a(3,1)", "a(2,1)")
    assert cycle.is_below("a(3,1)", "b(1,1)")
    assert not cycle.is_below("a(2,1)", "a(3,1)")
    assert cycle.is_below("e(0,0,0)", "a(1,0)")
    assert cycle.is_below("b(-2,1)", "a(0,0)")


@pytest.mark.parametrize("j", [1, 2])
def test_side_chains_refuted_exactly_on_downsets(cycle, j):
    for i in range(-4, SMALL.zone_max + 1):
        for kind, pt in (("A", a_pt(i, j)), ("B", b_pt(i, j))):
            assert cycle.refutation_point((kind, i, j)) == pt


def test_margin_and_unreached_refusals(cycle):
    with pytest.raises(TruncationError):
        cycle.refutation_point(("A", SMALL.zone_max + 1, 1))
    with pytest.raises(LookupError):
        cycle.refutation_point(("E", 1, 0, 0))
    with pytest.raises(KeyError):
        cycle.downset("a(40,0)")


def test_parameter_validation():
    m, init = harness.fixture("cycle")
    with pytest.raises(TruncationError):
        build(m, init, TruncationParams(imax=10, margin=1))
    with pytest.raises(TruncationError):
        build(m, init, TruncationParams(imax=4))


def test_fault_injection_breaks_equality():
    m, init = harness.fixture("cycle")
    bad = build(m, init, SMALL, drop_pairs=[(a_pt(3, 1), a_pt(2, 1))])
    with pytest.raises(AssertionError):
        for i in range(-4, SMALL.zone_max + 1):
            bad.refutation_point(("A", i, 1))


@settings(max_examples=40)
@given(st.sampled_from(sorted(harness.FIXTURES)), st.sampled_from("AB"),
       st.integers(-4, 8), st.integers(0, 2))
def test_growing_the_truncation_keeps_forcing(name, kind, i, j):
    m, init = harness.fixture(name)
    lo = build(m, init, SMALL)
    hi = build(m, init, TruncationParams(imax=SMALL.imax + 2))
    f = enc.chain_formula(kind, i, j)
    keep = lo.frame.points
    got_lo = set(lo.frame.labels(lo.model.extension(f)))
    got_hi = set(hi.frame.labels(hi.model.extension(f))) & set(keep)
    assert got_lo == got_hi
