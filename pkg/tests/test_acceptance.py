"""Acceptance criteria 1-9, each run at its stated bounds and tolerances.

Each test prints one PASS/FAIL line; the lines are repeated in the
terminal summary.  Failing criteria are genuine results of the shipped
constructions, not harness errors; the reason is given in the detail.
"""
import time


from conftest import record
from superint import encoding as enc, harness, ipc
from superint.formula import parse
from superint.machine_model import TruncationParams, build
from superint.minsky import Configuration, run

from test_formula import test_print_parse_round_trip as _round_trip
from test_formula import test_substitution_is_simultaneous_and_distributes as _substitution
from test_ipc import test_verdicts_are_sound as _soundness
from test_kripke import test_closure_is_a_poset_matching_naive_closure as _poset_laws
from test_kripke import test_forcing_is_persistent_and_refuters_downward_closed as _persistence

FULL = TruncationParams(imax=20, step_bound=6, counter_bound=8, margin=2)


def _failure_sample(rep, limit=3):
    return "; ".join(f"{e.instance} {e.detail}" for e in rep.failures()[:limit])


def test_criterion_1_chain_refuters():
    m, init = harness.fixture("cycle")
    t0 = time.perf_counter()
    rep = harness.verify_semantic(m, init, FULL, label="cycle", codes=False)
    secs = time.perf_counter() - t0
    checked = [e for e in rep.entries if e.verdict != harness.REFUSED]
    want = 2 * 3 * (18 + 4 + 1)
    ok = len(checked) == want and rep.ok and secs < 60
    detail = f"{rep.count(harness.PASS)}/{want} exact in {secs:.2f}s"
    if rep.failures():
        detail += f"; {len(rep.failures())} mismatches, e.g. {_failure_sample(rep, 2)}"
    assert record(1, ok, detail), detail


def test_criterion_2_code_refuters():
    t0 = time.perf_counter()
    reps = []
    for name in sorted(harness.FIXTURES):
        m, init = harness.fixture(name)
        reps.append(harness.verify_semantic(m, init, FULL, label=name, families=False))
    rep = harness.merge("codes", reps)
    secs = time.perf_counter() - t0
    ok = rep.ok and rep.count(harness.PASS) > 0 and secs < 60
    detail = f"{rep.count(harness.PASS)}/{len(rep.entries)} codes exact in {secs:.2f}s"
    if rep.failures():
        detail += f"; e.g. {_failure_sample(rep, 2)}"
    assert record(2, ok, detail), detail


def test_criterion_3_key_formulas():
    t0 = time.perf_counter()
    rep = harness.verify_keyformulas(3, (-1, 0, 1, 2), ipc.DEFAULT_BUDGET)
    secs = time.perf_counter() - t0
    ok = rep.ok and rep.count(harness.PASS) == 2 * 2 * 3 * 16 and secs < 600
    detail = (f"{rep.count(harness.PASS)} proved and replayed, {rep.count(harness.UNKNOWN)} unknown, "
              f"{secs:.1f}s")
    assert record(3, ok, detail), detail


def test_criterion_4_code_equivalences():
    t0 = time.perf_counter()
    rep = harness.verify_equivalence(1, 2, 2, ipc.DEFAULT_BUDGET)
    secs = time.perf_counter() - t0
    ok = rep.ok and rep.count(harness.PASS) == len(rep.entries) > 0
    detail = (f"{rep.count(harness.PASS)}/{len(rep.entries)} proved and replayed, "
              f"{rep.count(harness.UNKNOWN)} unknown, {secs:.1f}s")
    assert record(4, ok, detail), detail


def test_criterion_5_axiom_validity():
    reps, inc_frames = [], 0
    for name in sorted(harness.FIXTURES):
        m, init = harness.fixture(name)
        rep = harness.verify_axiom(m, init, FULL, label=name, engine="sat")
        reps.append(rep)
        inc_frames += sum(e.instance.startswith("frame[") and "INC" in e.instance and e.verdict == harness.PASS
                          for e in rep.entries)
    rep = harness.merge("axiom", reps)
    ok = rep.ok and inc_frames >= 3
    detail = (f"{rep.count(harness.PASS)}/{len(rep.entries)} pass (model tier and complete frame search "
              f"on the imax=10 truncation), {rep.count(harness.FAIL)} found")
    assert record(5, ok, detail), detail


def _unreached_targets(m, init):
    g = build(m, init, FULL).graph
    assert not g.truncated
    states = sorted(set(m.states()) | {i.target for i in m.values()})
    out = []
    for s in states:
        for a in range(3):
            for b in range(3):
                c = Configuration(s, a, b)
                if not g.reachable(c):
                    out.append(c)
    return out


def test_criterion_6_reduction():
    forward_ok, backward_ok, overlap, notes = True, {}, [], []
    vacuous = 0
    for name in sorted(harness.FIXTURES):
        m, init = harness.fixture(name)
        reached = list(dict.fromkeys(run(m, init, 4)))
        for tgt in reached:
            rep = harness.verify_reduction(m, init, tgt, FULL, label=name)
            if not rep.ok:
                forward_ok = False
                notes.append(f"{name} forward {tgt}: {_failure_sample(rep, 1)}")
            vacuous += rep.grid.get("goal_without_axioms") == "proved"
        hits = 0
        for tgt in _unreached_targets(m, init)[:6]:
            rep = harness.verify_reduction(m, init, tgt, FULL, label=name)
            if rep.ok:
                hits += 1
                if tgt in reached:
                    overlap.append((name, tgt))
            elif len(notes) < 6:
                notes.append(f"{name} backward {tgt}: {rep.entries[0].detail}")
        backward_ok[name] = hits > 0
    ok = forward_ok and all(backward_ok.values()) and not overlap
    detail = (f"forward {'all proved' if forward_ok else 'FAILED'} ({vacuous} goals provable without axioms); "
              f"backward witness per fixture: {backward_ok}")
    if notes:
        detail += "; e.g. " + " | ".join(notes[:2])
    assert record(6, ok, detail), detail


INT_AXIOMS = [
    "p -> (q -> p)", "(p -> (q -> r)) -> ((p -> q) -> (p -> r))", "p & q -> p", "p & q -> q",
    "p -> (q -> p & q)", "p -> p | q", "q -> p | q", "(p -> r) -> ((q -> r) -> (p | q -> r))",
    "(p -> q) -> ((p -> ~q) -> ~p)", "p -> (~p -> q)",
]


def test_criterion_7_prover_sanity():
    axioms = [ipc.prove(parse(a)) for a in INT_AXIOMS]
    ok_ax = all(v.status == "proved" and ipc.replay_verdict(v) for v in axioms)
    peirce = parse("((p -> q) -> p) -> p")
    v = ipc.prove(peirce)
    ok_peirce = (v.status == "refuted" and len(v.countermodel.frame) <= 3
                 and not v.countermodel.force(v.witness, peirce))
    ok_syll = ipc.prove(parse("(p -> q) -> ((q -> r) -> (p -> r))")).status == "proved"
    ok_printed = ipc.prove(parse("(p -> (q -> r)) -> ((p -> q) -> (q -> r))")).status == "refuted"
    ok = ok_ax and ok_peirce and ok_syll and ok_printed
    detail = (f"axioms={ok_ax} peirce={ok_peirce} ({len(v.countermodel.frame)} points) "
              f"syllogism={ok_syll} printed-variant-refuted={ok_printed}")
    assert record(7, ok, detail), detail


def test_criterion_8_property_suites():
    suites = [("persistence+downward closure", _persistence), ("round trip", _round_trip),
              ("substitution", _substitution), ("poset laws", _poset_laws), ("prover soundness", _soundness)]
    done, bad = [], []
    for name, fn in suites:
        assert fn.hypothesis.inner_test and fn._hypothesis_internal_use_settings.max_examples >= 1000
        try:
            fn()
            done.append(name)
        except Exception as e:  # report, then fail below
            bad.append(f"{name}: {type(e).__name__}")
    ok = not bad
    detail = f"{len(done)}/{len(suites)} suites green at 1000 cases each" + (f"; {bad}" if bad else "")
    assert record(8, ok, detail), detail


def test_criterion_9_truncation_stability():
    mismatches, checked = [], 0
    for name in sorted(harness.FIXTURES):
        m, init = harness.fixture(name)
        lo = build(m, init, FULL)
        hi = build(m, init, TruncationParams(FULL.imax + 2, FULL.step_bound, FULL.counter_bound, FULL.margin))
        keep = set(lo.frame.points)
        forms = [enc.chain_formula(k, i, j) for k in "AB" for j in range(3) for i in range(-4, FULL.zone_max + 1)]
        forms += [enc.e_code(*c) for c in lo.graph.vertices if lo.in_zone(("E",) + tuple(c))]
        for f in forms:
            a = set(lo.frame.labels(lo.model.extension(f)))
            b = set(hi.frame.labels(hi.model.extension(f))) & keep
            checked += 1
            if a != b:
                mismatches.append((name, f))
    ok = not mismatches
    detail = f"{checked} formulas agree exactly on retained points" if ok else f"{len(mismatches)} disagree"
    assert record(9, ok, detail), detail
