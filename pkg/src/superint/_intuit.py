"""Intuitionistic decision oracle: SAT modulo implications.

Formulas are flattened into two kinds of clauses over atoms:

* flat clauses ``a1 & ... & an -> b1 | ... | bm``, handed to a SAT solver;
* implication clauses ``(a -> b) -> c``, handled by the refinement loop.

Each subformula gets a positive name (implies the subformula) and a
negative name (implied by it), so the clause set is a conservative
definitional extension.  The loop asks the solver for a classical model
with the assumptions true and the goal false; every implication clause
whose ``a`` and ``c`` are false there is tested recursively from the
extended world.  A provable test yields a learned flat clause that
excludes the model; if none is provable the model is a Kripke world whose
children are the recursive countermodels.

The solver itself is bought (python-sat); only the refinement logic lives
here.
"""
from __future__ import annotations

import os
from collections import deque
from dataclasses import dataclass
from typing import Dict, FrozenSet, Iterable, List, Sequence, Tuple

from pysat.solvers import Solver

from .formula import AND, BOT, OR, VAR, Formula, postorder


POOL_SIZE = int(os.environ.get("SUPERINT_POOL", "256"))


class OracleBudget(Exception):
    pass


class World:
    """Countermodel tree node: the variables true here, plus children above."""

    __slots__ = ("true_vars", "mask", "children")

    def __init__(self, true_vars: FrozenSet[str], children: Tuple["World", ...], mask: int = 0):
        self.true_vars = true_vars
        self.mask = mask  # bit i set when solver atom i is true here
        self.children = children


@dataclass(frozen=True)
class Learned:
    """Flat clause ``core - {a} -> c`` obtained from ``core |- b`` and ``(a -> b) -> c``."""

    a: int
    b: int
    c: int
    core: FrozenSet[int]

    @property
    def body(self) -> FrozenSet[int]:
        return self.core - {self.a}


@dataclass
class Certificate:
    """A replayable record of one successful refinement run.

    ``flat`` are the definitional clauses as (negated body, head) literal
    lists, ``icl`` the implication clauses, ``learned`` the learned clauses in
    the order they were added, and ``assume |- goal`` the closing check.
    """

    flat: List[Tuple[int, ...]]
    icl: List[Tuple[int, int, int]]
    learned: List[Learned]
    assume: FrozenSet[int]
    goal: int
    names: Dict[int, str]

    def render(self, lit: int) -> str:
        return self.names.get(lit, f"#{lit}")

    def steps(self) -> List[str]:
        out = []
        for k, st in enumerate(self.learned):
            body = " & ".join(self.render(x) for x in sorted(st.body)) or "true"
            out.append(f"learn[{k}] {body} -> {self.render(st.c)} "
                       f"by ({self.render(st.a)} -> {self.render(st.b)}) -> {self.render(st.c)}")
        body = ", ".join(self.render(x) for x in sorted(self.assume))
        out.append(f"close {body} => {self.render(self.goal)}")
        return out


class Oracle:
    def __init__(self, budget: int, solver: str = "minisat22"):
        self.budget = budget
        self.spent = 0
        self.flat: List[Tuple[int, ...]] = []
        self.learned: List[Learned] = []
        self.sat = Solver(name=solver)
        self.nvars = 0
        self.var_atom: Dict[str, int] = {}
        self.atom_name: Dict[int, str] = {}
        self.pos: Dict[Formula, int] = {}
        self.neg: Dict[Formula, int] = {}
        self.icl: List[Tuple[int, int, int]] = []
        # recent countermodel worlds; old ones rarely help and cost a scan
        self.pool = deque(maxlen=POOL_SIZE)
        self.false_atom = self._fresh()
        self._clause([-self.false_atom])

    def close(self):
        self.sat.delete()

    def _clause(self, lits):
        self.flat.append(tuple(lits))
        self.sat.add_clause(lits)

    def _fresh(self) -> int:
        self.nvars += 1
        return self.nvars

    def _atom(self, name: str) -> int:
        a = self.var_atom.get(name)
        if a is None:
            a = self._fresh()
            self.var_atom[name] = a
            self.atom_name[a] = name
        return a

    # --- clausification ---------------------------------------------------
    def name_pos(self, f: Formula) -> int:
        if f not in self.pos:
            for n in postorder(f):
                if n not in self.pos:
                    self._def(n, True)
        return self.pos[f]

    def name_neg(self, f: Formula) -> int:
        if f not in self.neg:
            for n in postorder(f):
                if n not in self.neg:
                    self._def(n, False)
        return self.neg[f]

    def _need(self, n: Formula, positive: bool) -> int:
        table = self.pos if positive else self.neg
        x = table.get(n)
        if x is None:
            x = self.name_pos(n) if positive else self.name_neg(n)
        return x

    def _def(self, n: Formula, positive: bool):
        k = n.kind
        if k == VAR:
            x = self._atom(n.name)
        elif k == BOT:
            x = self.false_atom
        else:
            x = self._fresh()
            if positive:
                if k == AND:
                    a, b = self._need(n.left, True), self._need(n.right, True)
                    self._clause([-x, a])
                    self._clause([-x, b])
                elif k == OR:
                    a, b = self._need(n.left, True), self._need(n.right, True)
                    self._clause([-x, a, b])
                else:
                    a, b = self._need(n.left, False), self._need(n.right, True)
                    self._clause([-x, -a, b])
            else:
                if k == AND:
                    a, b = self._need(n.left, False), self._need(n.right, False)
                    self._clause([-a, -b, x])
                elif k == OR:
                    a, b = self._need(n.left, False), self._need(n.right, False)
                    self._clause([-a, x])
                    self._clause([-b, x])
                else:
                    a, b = self._need(n.left, True), self._need(n.right, False)
                    # (a -> b) -> x; its intuitionistically valid part b -> x is flat
                    self._clause([-b, x])
                    self.icl.append((a, b, x))
        (self.pos if positive else self.neg)[n] = x

    # --- the refinement loop ----------------------------------------------
    def decide(self, gamma: Iterable[Formula], goal: Formula):
        """``(True, Certificate)`` if ``gamma |- goal`` else ``(False, World)``."""
        assume = sorted({self.name_pos(g) for g in gamma})
        q = self.name_neg(goal)
        ok, out = self._prove(assume, q)
        if not ok:
            return False, out
        names = {v: k for k, v in self.var_atom.items()}
        names[self.false_atom] = "false"
        cert = Certificate(list(self.flat), list(self.icl), list(self.learned), out, q, names)
        return True, cert

    def _prove(self, assume: List[int], q: int):
        self.spent += 1
        if self.spent > self.budget:
            raise OracleBudget()
        sat = self.sat
        while True:
            if not sat.solve(assumptions=assume + [-q]):
                core = sat.get_core() or []
                return True, frozenset(l for l in core if l > 0)
            model = sat.get_model()
            base = [l for l in model if l > 0]
            tmask = 0
            for l in base:
                tmask |= 1 << l
            children = []
            learned = False
            open_ = [(a, b, c) for a, b, c in self.icl if not (tmask >> c & 1 or tmask >> a & 1)]
            # classically provable tests need no recursion: learn from them first
            for a, b, c in open_:
                if not sat.solve(assumptions=base + [a, -b]):
                    core = frozenset(l for l in (sat.get_core() or []) if l > 0)
                    step = Learned(a, b, c, core)
                    self.learned.append(step)
                    sat.add_clause([-l for l in sorted(step.body)] + [c])
                    learned = True
                    break
            if learned:
                continue
            # worlds found earlier above this model may already refute a query;
            # every world satisfies all consequences of the clauses, old or new
            above = [w for w in self.pool if tmask & ~w.mask == 0]
            for a, b, c in open_:
                hit = None
                for w in above:
                    if w.mask >> a & 1 and not w.mask >> b & 1:
                        hit = w
                        break
                if hit is not None:
                    children.append(hit)
                    continue
                ok, out = self._prove(base + [a], b)
                if ok:
                    step = Learned(a, b, c, out)
                    self.learned.append(step)
                    sat.add_clause([-l for l in sorted(step.body)] + [c])
                    learned = True
                    break
                children.append(out)
                above.append(out)
            if not learned:
                names = frozenset(self.atom_name[l] for l in base if l in self.atom_name)
                world = World(names, tuple(children), tmask)
                self.pool.append(world)
                return False, world


# ---------------------------------------------------------------------------
# replay, independent of the SAT solver

class CertificateError(AssertionError):
    pass


class _Chase:
    """Forward chaining over flat clauses, branching on disjunctive heads.

    For flat clauses this is a complete intuitionistic proof search: an open
    branch at a fixpoint is a classical model of the clauses.
    """

    def __init__(self, false_atom: int):
        self.false_atom = false_atom
        self.clauses: List[Tuple[FrozenSet[int], Tuple[int, ...]]] = []
        self.watch: Dict[int, List[int]] = {}

    def add(self, body: Iterable[int], head: Sequence[int]):
        idx = len(self.clauses)
        body = frozenset(body)
        self.clauses.append((body, tuple(head)))
        for x in body:
            self.watch.setdefault(x, []).append(idx)
        if not body:
            self.watch.setdefault(0, []).append(idx)

    def closes(self, facts: Iterable[int], goal: int, limit: int = 1 << 20) -> bool:
        return self._closes(set(facts), goal, [limit])

    def _closes(self, facts, goal, limit) -> bool:
        limit[0] -= 1
        if limit[0] < 0:
            raise CertificateError("forward chaining limit exceeded")
        clauses = self.clauses
        missing = [len(b) for b, _ in clauses]
        queue = list(facts) + [0]
        pending = []  # applicable disjunctive clauses
        facts = set(facts)
        seen_queue = set()
        while queue:
            x = queue.pop()
            if x in seen_queue:
                continue
            seen_queue.add(x)
            if x == goal or x == self.false_atom:
                return True
            for ci in self.watch.get(x, ()):
                if x:
                    missing[ci] -= 1
                if missing[ci]:
                    continue
                head = clauses[ci][1]
                if not head:
                    return True
                if len(head) == 1:
                    if head[0] not in facts:
                        facts.add(head[0])
                        queue.append(head[0])
                else:
                    pending.append(ci)
        for ci in pending:
            head = clauses[ci][1]
            if any(h in facts for h in head):
                continue
            return all(self._closes(facts | {h}, goal, limit) for h in head)
        return False


def replay_certificate(cert: Certificate) -> int:
    """Re-check every learned clause and the final step; returns the step count."""
    icl = set(cert.icl)
    chase = _Chase(next(k for k, v in cert.names.items() if v == "false"))
    for lits in cert.flat:
        chase.add([-l for l in lits if l < 0], [l for l in lits if l > 0])
    for k, st in enumerate(cert.learned):
        if (st.a, st.b, st.c) not in icl:
            raise CertificateError(f"learned clause {k} cites an unknown implication clause")
        if not chase.closes(st.core, st.b):
            raise CertificateError(f"learned clause {k}: premise does not close")
        chase.add(st.body, [st.c])
    if not chase.closes(cert.assume, cert.goal):
        raise CertificateError("final step does not close")
    return len(cert.learned) + 1
