"""Countervaluation search: is a formula refutable by *some* valuation on a frame?

Two engines:

``backtrack``
    Per-point, per-variable assignment in a fixed order (maximal points
    first, variables by name, ``true`` first) with monotonicity propagation.
    Each node re-evaluates lower/upper forcing bounds of the partial
    valuation; a subtree is cut as soon as the formula is forced everywhere
    under every completion.  Complete but exponential.

``sat``
    A definitional CNF of "the formula fails at some minimal point" over
    variables ``x[node, point]``, handed to a SAT solver.  Implication uses
    the covering relation: ``A -> B`` holds at ``w`` iff ``A`` implies ``B``
    at ``w`` and it holds at every cover of ``w``.

Both return valuations that are re-verified with the forcing evaluator.
"""
from __future__ import annotations

from typing import Dict, List, Optional

from . import kernels
from .formula import AND, BOT, OR, VAR, Formula, postorder, variables
from .kripke import CountervaluationResult, KripkeFrame, KripkeModel

try:  # optional dependency for the "sat" engine
    from pysat.solvers import Solver as _SatSolver
except ImportError:  # pragma: no cover - exercised only without python-sat
    _SatSolver = None

ENGINES = ("backtrack", "sat")


def default_engine() -> str:
    return "sat" if _SatSolver is not None else "backtrack"


def search(frame: KripkeFrame, f: Formula, budget: int, engine: Optional[str] = None) -> CountervaluationResult:
    engine = engine or default_engine()
    if engine == "sat":
        if _SatSolver is None:
            raise RuntimeError("the sat engine needs python-sat")
        res = _sat_search(frame, f, budget)
    elif engine == "backtrack":
        res = _backtrack(frame, f, budget)
    else:
        raise ValueError(f"unknown countervaluation engine {engine!r}; expected one of {ENGINES}")
    if res.found:
        model = res.model(frame)
        if model.force(res.witness, f):
            raise AssertionError("countervaluation does not refute the formula at its witness")
    return res


def _as_sets(frame: KripkeFrame, val: Dict[str, int]) -> Dict[str, frozenset]:
    return {k: frozenset(frame.labels(m)) for k, m in val.items()}


def _witness(frame: KripkeFrame, f: Formula, val: Dict[str, int]):
    model = KripkeModel(frame, val)
    bad = model.refuters_mask(f)
    if not bad:
        return None
    # report a maximal refuting point: the most specific place it fails
    for w in frame.topological():
        if bad >> w & 1:
            return frame.points[w]
    return None  # pragma: no cover


# ---------------------------------------------------------------------------
# backtracking

def _backtrack(frame: KripkeFrame, f: Formula, budget: int) -> CountervaluationResult:
    names = sorted(variables(f))
    prog = kernels.compile_formula(f, names)
    full = frame.all
    order = frame.topological()  # maximal first
    slots = [(w, v) for w in order for v in range(len(names))]
    up = frame.up
    true_at = [0] * len(names)   # assigned true
    false_at = [0] * len(names)  # assigned false
    nodes = 0

    def bounds():
        lo = true_at
        hi = [full & ~false_at[v] for v in range(len(names))]
        return kernels.formula_bounds(prog, frame, lo, hi)

    # iterative DFS over slots; each frame entry is (slot index, choices left)
    stack: List[list] = []
    k = 0
    while True:
        nodes += 1
        if nodes > budget:
            return CountervaluationResult("unknown", nodes=nodes)
        lo_root, hi_root = bounds()
        cut = lo_root == full
        if not cut and hi_root != full:
            # refuted under every completion: fill the rest with false
            val = {names[v]: true_at[v] for v in range(len(names))}
            return CountervaluationResult("found", _as_sets(frame, val), _witness(frame, f, val), nodes)
        if not cut and k == len(slots):  # pragma: no cover - total valuations are decided above
            cut = True
        if not cut:
            w, v = slots[k]
            bit = 1 << w
            strict_up = up[w] & ~bit
            # monotonicity: false above forces false here
            if false_at[v] & strict_up:
                choices = [False]
            else:
                choices = [True, False]
            stack.append([k, choices])
        # pick the next untried choice, backtracking as needed
        while stack:
            top = stack[-1]
            kk, choices = top
            w, v = slots[kk]
            bit = 1 << w
            true_at[v] &= ~bit
            false_at[v] &= ~bit
            if not choices:
                stack.pop()
                continue
            c = choices.pop(0)
            if c:
                true_at[v] |= bit
            else:
                false_at[v] |= bit
            k = kk + 1
            break
        else:
            return CountervaluationResult("none", nodes=nodes)


# ---------------------------------------------------------------------------
# SAT encoding

def _sat_search(frame: KripkeFrame, f: Formula, budget: int) -> CountervaluationResult:
    nodes = postorder(f)
    n = frame.size
    base: Dict[Formula, int] = {}
    for i, node in enumerate(nodes):
        base[node] = i * n + 1
    covers = frame.covers
    solver = _SatSolver(name="cadical153")
    try:
        add = solver.add_clause
        for node in nodes:
            b = base[node]
            k = node.kind
            if k == BOT:
                for w in range(n):
                    add([-(b + w)])
            elif k == VAR:
                for w in range(n):
                    for u in covers[w]:
                        add([-(b + w), b + u])
            elif k == AND:
                l, r = base[node.left], base[node.right]
                for w in range(n):
                    x = b + w
                    add([-x, l + w])
                    add([-x, r + w])
                    add([x, -(l + w), -(r + w)])
            elif k == OR:
                l, r = base[node.left], base[node.right]
                for w in range(n):
                    x = b + w
                    add([-x, l + w, r + w])
                    add([x, -(l + w)])
                    add([x, -(r + w)])
            else:
                l, r = base[node.left], base[node.right]
                for w in range(n):
                    x = b + w
                    add([-x, -(l + w), r + w])
                    for u in covers[w]:
                        add([-x, b + u])
                    add([x, l + w] + [-(b + u) for u in covers[w]])
                    add([x, -(r + w)] + [-(b + u) for u in covers[w]])
        root = base[f]
        add([-(root + w) for w in frame.minimal()])
        solver.conf_budget(max(1, budget))
        ok = solver.solve_limited()
        stats = solver.accum_stats()
        spent = int(stats.get("decisions", 0))
        conflicts = int(stats.get("conflicts", 0))
        if ok is None:
            return CountervaluationResult("unknown", nodes=spent, conflicts=conflicts)
        if not ok:
            return CountervaluationResult("none", nodes=spent, conflicts=conflicts)
        model = set(l for l in solver.get_model() if l > 0)
    finally:
        solver.delete()
    val = {}
    for node in nodes:
        if node.kind == VAR:
            b = base[node]
            val[node.name] = sum(1 << w for w in range(n) if b + w in model)
    return CountervaluationResult("found", _as_sets(frame, val), _witness(frame, f, val), spent, conflicts)
