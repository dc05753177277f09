import pytest
from hypothesis import given, settings, strategies as st

from superint import minsky
from superint.minsky import Configuration, Instruction, MachineSyntaxError


CYCLE = "0 INC1 1\n1 DEC1 0 0\n"


def test_parse_and_text_round_trip():
    m = minsky.parse_machine("# comment\n0 inc1 1\n\n1 DEC2 2 0  # tail\n")
    assert m[0] == Instruction("INC1", 0, 1)
    assert m[1] == Instruction("DEC2", 1, 2, 0)
    assert minsky.parse_machine(m.to_text()) == m


@pytest.mark.parametrize("text,line", [
    ("0 INC1", 1),
    ("0 MUL 1", 1),
    ("0 INC1 1 2", 1),
    ("0 DEC1 1", 1),
    ("0 INC1 x", 1),
    ("0 INC1 -1", 1),
    ("0 INC1 1\n0 INC2 1", 2),
])
def test_parse_errors_name_the_line(text, line):
    with pytest.raises(MachineSyntaxError) as ei:
        minsky.parse_machine(text)
    assert ei.value.line == line


def test_step_semantics():
    m = minsky.parse_machine("0 INC1 1\n1 INC2 2\n2 DEC1 3 4\n3 DEC2 0 5\n")
    assert minsky.step(m, Configuration(0, 0, 0)) == (1, 1, 0)
    assert minsky.step(m, Configuration(1, 1, 0)) == (2, 1, 1)
    assert minsky.step(m, Configuration(2, 1, 1)) == (3, 0, 1)
    assert minsky.step(m, Configuration(2, 0, 1)) == (4, 0, 1)
    assert minsky.step(m, Configuration(3, 0, 1)) == (0, 0, 0)
    assert minsky.step(m, Configuration(3, 0, 0)) == (5, 0, 0)
    assert minsky.step(m, Configuration(4, 0, 0)) is None


def test_run_stops_at_halt():
    m = minsky.parse_machine("0 DEC2 1 1\n1 INC2 2\n")
    assert minsky.run(m, (0, 0, 0), 10) == [(0, 0, 0), (1, 0, 0), (2, 0, 1)]
    assert minsky.run(m, (0, 0, 0), 0) == [(0, 0, 0)]
    with pytest.raises(ValueError):
        minsky.run(m, (0, 0, 0), -1)


def test_cycle_classes():
    g = minsky.reach_graph(minsky.parse_machine(CYCLE), (0, 0, 0), 6, 8)
    assert not g.truncated
    q = minsky.classes(g)
    assert len(q.classes) == 1
    assert q.classes[0] == {(0, 0, 0), (1, 1, 0)}
    assert q.representative == [(0, 0, 0)]


def test_truncation_flags():
    up = minsky.parse_machine("0 INC1 0\n")
    g = minsky.reach_graph(up, (0, 0, 0), 20, 3)
    assert g.counter_truncated and not g.step_truncated
    g = minsky.reach_graph(up, (0, 0, 0), 2, 8)
    assert g.step_truncated and len(g.vertices) == 3
    assert g.reachable((0, 2, 0)) and not g.reachable((0, 3, 0))


def test_class_order_follows_reachability():
    m = minsky.parse_machine("0 DEC1 1 2\n1 INC2 0\n")
    q = minsky.classes(minsky.reach_graph(m, (0, 2, 0), 10, 8))
    a, b = q.index_of((0, 2, 0)), q.index_of((2, 0, 2))
    assert q.leq(a, b) and not q.leq(b, a)
    assert all(q.leq(k, k) for k in range(len(q.classes)))


# ---------------------------------------------------------------------------

ops = st.sampled_from(minsky.OPS)


@st.composite
def machines(draw, states=4):
    out = []
    for s in range(states):
        if draw(st.booleans()) or s == 0:
            op = draw(ops)
            t = draw(st.integers(0, states))
            alt = draw(st.integers(0, states)) if op in ("DEC1", "DEC2") else None
            out.append(Instruction(op, s, t, alt))
    return minsky.MinskyMachine(out)


@settings(max_examples=300)
@given(machines(), st.integers(0, 2), st.integers(0, 2))
def test_graph_matches_naive_closure(m, a, b):
    g = minsky.reach_graph(m, (0, a, b), 200, 50)
    if g.truncated:
        return
    assert set(g.vertices) == minsky.transitive_step_closure(m, (0, a, b))


@settings(max_examples=300)
@given(machines(), st.integers(0, 2), st.integers(0, 2))
def test_classes_are_mutual_reachability(m, a, b):
    g = minsky.reach_graph(m, (0, a, b), 12, 6)
    q = minsky.classes(g)
    succ = g.successors()

    def reach(x):
        seen, todo = {x}, [x]
        while todo:
            for y in succ[todo.pop()]:
                if y not in seen:
                    seen.add(y)
                    todo.append(y)
        return seen

    r = {v: reach(v) for v in g.vertices}
    for x in g.vertices:
        for y in g.vertices:
            same = y in r[x] and x in r[y]
            assert (q.class_of[x] == q.class_of[y]) == same
            assert q.leq(q.class_of[x], q.class_of[y]) == (y in r[x])
    for k, members in enumerate(q.classes):
        assert q.representative[k] == min(members)
