import os
import sys

from hypothesis import HealthCheck, settings, strategies as st

sys.path.insert(0, os.path.dirname(__file__))

from superint.formula import BOTTOM, And, Implies, Or, Var  # noqa: E402
from superint.kripke import KripkeModel, closure  # noqa: E402

settings.register_profile("default", deadline=None, suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")

NAMES = ("p", "q", "r")


def formulas(names=NAMES, max_leaves=12):
    leaves = st.sampled_from([Var(n) for n in names] + [BOTTOM])
    return st.recursive(
        leaves,
        lambda kids: st.builds(lambda op, a, b: op(a, b), st.sampled_from([And, Or, Implies]), kids, kids),
        max_leaves=max_leaves,
    )


@st.composite
def frames(draw, max_points=6):
    n = draw(st.integers(1, max_points))
    pairs = [(i, j) for i in range(n) for j in range(i + 1, n) if draw(st.booleans())]
    return closure(pairs, list(range(n)))


@st.composite
def models(draw, max_points=6, names=NAMES):
    fr = draw(frames(max_points))
    val = {}
    for name in names:
        seed = draw(st.integers(0, (1 << fr.size) - 1))
        val[name] = fr.up_closure(seed)
    return KripkeModel(fr, val)


# acceptance verdict lines, printed after the run
ACCEPTANCE = {}


def record(number: int, ok: bool, detail: str):
    line = f"criterion {number}: {'PASS' if ok else 'FAIL'}  {detail}"
    ACCEPTANCE[number] = line
    print(line)
    return ok


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE:
        terminalreporter.section("acceptance criteria")
        for k in sorted(ACCEPTANCE):
            terminalreporter.write_line(ACCEPTANCE[k])
