import pytest

from superint import encoding as enc, harness, ipc
from superint.formula import parse
from superint.machine_model import TruncationParams, a_pt, build
from superint.minsky import Configuration

SMALL = TruncationParams(imax=10)


def test_fixtures_load():
    for name in harness.FIXTURES:
        m, init = harness.fixture(name)
        assert len(m) == 2 and isinstance(init, Configuration)


def test_report_format_and_exit_codes():
    rep = harness.VerificationReport("demo")
    rep.add("x", harness.PASS, 1.25)
    assert rep.exit_code() == 0 and rep.ok
    rep.add("y", harness.REFUSED, 0.0, "margin")
    assert rep.exit_code() == 0
    rep.add("z", harness.UNKNOWN, 2.0, "budget")
    assert rep.exit_code() == 3 and not rep.ok
    with pytest.raises(ValueError):
        rep.add("w", harness.FAIL, 1.0, "no reproducer")
    rep.add("w", harness.FAIL, 1.0, "bad", "superint verify semantic cycle 0 0 0")
    assert rep.exit_code() == 1
    lines = rep.lines()
    assert lines[0] == "demo\tx\tpass\t1.2\t"
    assert lines[-1].split("\t") == ["demo", "w", "fail", "1.0", "bad", "superint verify semantic cycle 0 0 0"]
    assert "fail=1" in rep.summary() and "unknown=1" in rep.summary()
    merged = harness.merge("all", [rep])
    assert merged.entries[0].instance == "demo:x"


def test_budget_override(monkeypatch):
    assert harness.budget(5) == 5
    monkeypatch.setenv(harness.BUDGET_ENV, "17")
    assert harness.budget(5) == 17


def test_corrupted_edge_is_reported_with_witness():
    m, init = harness.fixture("cycle")
    bad = build(m, init, SMALL, drop_pairs=[(a_pt(3, 1), a_pt(2, 1))])
    rep = harness.verify_semantic(m, init, model=bad, label="cycle", codes=False)
    fails = rep.failures()
    assert fails and rep.exit_code() == 1
    assert any("a(3,1)" in e.detail for e in fails)
    assert all(e.reproducer.startswith("superint verify semantic cycle") for e in fails)


def test_margin_entries_are_refused():
    m, init = harness.fixture("transfer")
    rep = harness.verify_semantic(m, init, SMALL, codes=False)
    assert rep.count(harness.REFUSED) == 2 * 3 * SMALL.margin
    assert all(e.verdict != harness.REFUSED or int(e.instance[2:].split(",")[0]) > SMALL.zone_max
               for e in rep.entries)


def test_scrambled_key_formulas_fail():
    rep = harness.verify_keyformulas(k_max=1, index_range=(0,), scramble=True)
    assert rep.count(harness.FAIL) == len(rep.entries) == 8
    assert "--scramble" in rep.failures()[0].reproducer


def test_key_formulas_small_grid():
    rep = harness.verify_keyformulas(k_max=1, index_range=(0, 1))
    assert rep.ok and rep.count(harness.PASS) == 2 * 2 * 2 * 4


def test_tiny_budget_is_unknown_not_fail():
    rep = harness.verify_equivalence(0, 1, 1, prover_budget=1)
    assert rep.count(harness.UNKNOWN) and not rep.failures()
    assert rep.exit_code() == 3


def test_corrupted_axiom_is_caught_on_the_frame(monkeypatch):
    m, init = harness.fixture("cycle")
    monkeypatch.setattr(enc, "ax_instruction", lambda ins: parse("((p -> q) -> p) -> p"))
    rep = harness.verify_axiom(m, init, SMALL, label="cycle")
    frame = [e for e in rep.entries if e.instance.startswith("frame")]
    assert frame and all(e.verdict == harness.FAIL for e in frame)
    assert all("countervaluation refutes it" in e.detail for e in frame)


def test_axiom_tiers_pass_on_fixture():
    m, init = harness.fixture("transfer")
    rep = harness.verify_axiom(m, init, label="transfer")
    assert rep.ok and rep.count(harness.PASS) == 4


def test_step_certificates_prove_each_step():
    for name in harness.FIXTURES:
        m, init = harness.fixture(name)
        c = init
        for _ in range(3):
            nxt = harness.step(m, c)
            if nxt is None:
                break
            axiom, sub = harness.step_certificate(m, c)
            v = ipc.check_certificate(axiom, [sub], enc.e_code(*nxt) >> enc.e_code(*c))
            assert v.status == "proved"
            c = nxt


def test_truncated_exploration_is_inconclusive():
    up = harness.parse_machine("0 INC1 0\n")
    rep = harness.verify_reduction(up, (0, 0, 0), (1, 0, 0), TruncationParams(imax=12, step_bound=3))
    assert rep.entries[0].verdict == harness.INCONCLUSIVE and rep.exit_code() == 3


def test_reduction_forward_for_initial_target():
    m, init = harness.fixture("chain")
    rep = harness.verify_reduction(m, init, init, SMALL)
    assert rep.ok and "empty certificate" in rep.entries[0].detail
