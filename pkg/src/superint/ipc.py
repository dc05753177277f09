"""Intuitionistic propositional provability.

Two independent engines share one verdict type.  The default refines
classical SAT models against implication clauses (see ``_intuit``); the
other is Dyckhoff's contraction-free sequent calculus, described here.

The calculus is Dyckhoff's G4ip on set-based sequents ``Gamma => G``.  All
rules except the right disjunction rules and the left rule for nested
implications ``(C -> D) -> B`` are invertible and are applied eagerly
("saturation").  For the two non-invertible choices the search exploits a
standard fact: if the first premise ``Gamma', C, D -> B => D`` of the nested
rule is provable then the rule is invertible (its second premise is
equivalent to the conclusion), so no backtracking over it is ever needed.

A failed branch yields a countermodel: a root forcing exactly the atoms of
the saturated antecedent, placed below the countermodels of every failed
alternative.  Countermodels are re-verified with :mod:`superint.kripke` and
minimized before they are returned.
"""
from __future__ import annotations

import heapq
import sys
import threading
from dataclasses import dataclass, field
from typing import Dict, FrozenSet, Iterable, List, Mapping, Optional, Sequence, Tuple, Union

from .formula import AND, BOT, BOTTOM, IMP, OR, VAR, Formula, Iff, Implies, conj, substitute, to_text
from ._intuit import Certificate, CertificateError, Oracle, OracleBudget, replay_certificate
from .kripke import KripkeModel, closure

DEFAULT_BUDGET = 1_000_000


class _OutOfBudget(Exception):
    pass


# ---------------------------------------------------------------------------
# sequents, proofs and countermodel skeletons

@dataclass(frozen=True)
class Sequent:
    antecedent: FrozenSet[Formula]
    succedent: Formula

    def __str__(self):
        left = ", ".join(to_text(f) for f in sorted(self.antecedent))
        return f"{left} => {to_text(self.succedent)}"


class Proof:
    """A node of a closed search tree (shared as a DAG).

    ``steps`` are the invertible single-premise rules applied first, then
    ``rule`` closes the node or splits it into ``premises``.
    """

    __slots__ = ("steps", "rule", "principal", "premises")

    def __init__(self, steps, rule, principal, premises):
        self.steps: Tuple[Tuple[str, Optional[Formula]], ...] = steps
        self.rule: str = rule
        self.principal = principal
        self.premises: Tuple["Proof", ...] = premises

    def size(self) -> int:
        seen = set()
        stack = [self]
        while stack:
            p = stack.pop()
            if id(p) in seen:
                continue
            seen.add(id(p))
            stack.extend(p.premises)
        return len(seen)


class _CM:
    """Countermodel skeleton: a root forcing ``atoms`` below ``children``."""

    __slots__ = ("atoms", "children")

    def __init__(self, atoms, children):
        self.atoms: FrozenSet[str] = atoms
        self.children: Tuple["_CM", ...] = children


# ---------------------------------------------------------------------------
# verdicts

@dataclass
class Proved:
    proof: Union[Proof, "Split"]
    sequents: int = 0
    gamma: FrozenSet[Formula] = frozenset()
    goal: Optional[Formula] = None
    status: str = field(default="proved", init=False)

    @property
    def trace(self) -> List[str]:
        """Applied rules in order; a sequent proof lists shared subproofs once."""
        if isinstance(self.proof, Split):
            out = []
            for k, cert in enumerate(self.proof.certificates):
                out.append(f"part[{k}]")
                out += cert.steps()
            return out
        out: List[str] = []
        seen = set()
        stack = [self.proof]
        while stack:
            p = stack.pop()
            if id(p) in seen:
                continue
            seen.add(id(p))
            for rule, principal in p.steps:
                out.append(rule if principal is None else f"{rule} {to_text(principal)}")
            out.append(p.rule if p.principal is None else f"{p.rule} {to_text(p.principal)}")
            stack.extend(reversed(p.premises))
        return out

    def __bool__(self):
        return True


@dataclass
class Refuted:
    countermodel: KripkeModel
    witness: str
    sequents: int = 0
    status: str = field(default="refuted", init=False)

    def __bool__(self):
        return False


@dataclass
class Unknown:
    spent: int
    status: str = field(default="unknown", init=False)

    def __bool__(self):
        return False


ProverVerdict = Union[Proved, Refuted, Unknown]


# ---------------------------------------------------------------------------
# the search

class _Saturated:
    __slots__ = ("ctx", "goal", "steps", "closing")

    def __init__(self, ctx, goal, steps, closing):
        self.ctx = ctx
        self.goal = goal
        self.steps = steps
        self.closing = closing


def _closing(ctx, goal) -> Optional[Proof]:
    """Axiom-like closure, descending through goal disjunctions."""
    if BOTTOM in ctx:
        return Proof((), "botL", None, ())
    if goal in ctx:
        return Proof((), "ax", None, ())
    if goal.kind == OR:
        for i, side in enumerate((goal.left, goal.right)):
            sub = _closing(ctx, side)
            if sub is not None:
                return Proof((), "orR" + str(i), None, (sub,))
    return None


def _saturate(gamma: Iterable[Formula], goal: Formula) -> _Saturated:
    """Apply every invertible single-premise rule to a fixpoint."""
    ctx = set(gamma)
    steps: List[Tuple[str, Optional[Formula]]] = []
    heap = list(ctx)
    heapq.heapify(heap)
    waiting: Dict[Formula, List[Formula]] = {}  # antecedent -> implications parked on it

    def add(f):
        if f not in ctx:
            ctx.add(f)
            heapq.heappush(heap, f)

    while True:
        while goal.kind == IMP:
            steps.append(("impR", None))
            add(goal.left)
            goal = goal.right
        if not heap:
            break
        x = heapq.heappop(heap)
        if x not in ctx:
            continue
        k = x.kind
        if k == BOT:
            break
        if k == AND:
            ctx.discard(x)
            steps.append(("andL", x))
            add(x.left)
            add(x.right)
        elif k == IMP:
            a = x.left
            ka = a.kind
            if ka == BOT:
                ctx.discard(x)
                steps.append(("botImpL", x))
            elif a in ctx:
                ctx.discard(x)
                steps.append(("mp", x))
                add(x.right)
            elif ka == AND:
                ctx.discard(x)
                steps.append(("andImpL", x))
                add(Implies(a.left, Implies(a.right, x.right)))
            elif ka == OR:
                ctx.discard(x)
                steps.append(("orImpL", x))
                add(Implies(a.left, x.right))
                add(Implies(a.right, x.right))
            else:
                waiting.setdefault(a, []).append(x)
        parked = waiting.pop(x, None) if x in ctx else None
        if parked:
            for imp in parked:
                if imp in ctx:
                    heapq.heappush(heap, imp)
    return _Saturated(ctx, goal, tuple(steps), _closing(ctx, goal))


class Prover:
    """One G4ip search session; the memo table lives as long as the instance."""

    def __init__(self, budget: int = DEFAULT_BUDGET):
        self.budget = budget
        self.spent = 0
        self.memo: Dict[Tuple[FrozenSet[Formula], Formula], Union[Proof, _CM]] = {}

    def search(self, gamma: FrozenSet[Formula], goal: Formula) -> Union[Proof, _CM]:
        key = (gamma, goal)
        hit = self.memo.get(key)
        if hit is not None:
            return hit
        self.spent += 1
        if self.spent > self.budget:
            raise _OutOfBudget()
        res = self._expand(gamma, goal)
        self.memo[key] = res
        return res

    def _expand(self, gamma, goal):
        sat = _saturate(gamma, goal)
        steps = sat.steps
        if sat.closing is not None:
            c = sat.closing
            return Proof(steps + c.steps, c.rule, c.principal, c.premises)
        ctx, goal = sat.ctx, sat.goal
        fctx = frozenset(ctx)
        if (fctx, goal) != (gamma, goal) or steps:
            # the saturated sequent is equivalent; share its result
            inner = self.search(fctx, goal) if steps else self._branch(fctx, goal)
            if isinstance(inner, Proof):
                return Proof(steps + inner.steps, inner.rule, inner.principal, inner.premises)
            return inner
        return self._branch(fctx, goal)

    def _branch(self, ctx: FrozenSet[Formula], goal: Formula):
        # invertible branching rules
        if goal.kind == AND:
            left = self.search(ctx, goal.left)
            if not isinstance(left, Proof):
                return left
            right = self.search(ctx, goal.right)
            if not isinstance(right, Proof):
                return right
            return Proof((), "andR", None, (left, right))
        ors = [x for x in ctx if x.kind == OR]
        if ors:
            x = min(ors)
            rest = ctx - {x}
            subs = []
            for side in (x.left, x.right):
                r = self.search(rest | {side}, goal)
                if not isinstance(r, Proof):
                    return r
                subs.append(r)
            return Proof((), "orL", x, tuple(subs))

        # irreducible: atoms, atom -> B, (C -> D) -> B; goal atom, false or a disjunction
        children: List[_CM] = []
        for x in sorted(f for f in ctx if f.kind == IMP and f.left.kind == IMP):
            c, d, b = x.left.left, x.left.right, x.right
            rest = ctx - {x}
            first = self.search(rest | {Implies(d, b), c}, d)
            if isinstance(first, Proof):
                second = self.search(rest | {b}, goal)
                if isinstance(second, Proof):
                    return Proof((), "impImpL", x, (first, second))
                return second
            children.append(first)
        if goal.kind == OR:
            for i, side in enumerate((goal.left, goal.right)):
                r = self.search(ctx, side)
                if isinstance(r, Proof):
                    return Proof((), "orR" + str(i), None, (r,))
                children.append(r)
        atoms = frozenset(f.name for f in ctx if f.kind == VAR)
        return _CM(atoms, tuple(children))


# ---------------------------------------------------------------------------
# replay

ReplayError = CertificateError


def replay(proof: Proof, gamma: Iterable[Formula], goal: Formula) -> int:
    """Re-check every rule application of ``proof`` against ``gamma => goal``.

    Returns the number of distinct (node, sequent) pairs checked; raises
    ReplayError on the first illegal step.
    """
    checked = set()
    stack = [(proof, frozenset(gamma), goal)]
    while stack:
        p, ctx, g = stack.pop()
        key = (id(p), ctx, g)
        if key in checked:
            continue
        checked.add(key)
        ctx = set(ctx)
        for rule, x in p.steps:
            if rule == "impR":
                if g.kind != IMP:
                    raise ReplayError("impR on a non-implication goal")
                ctx.add(g.left)
                g = g.right
                continue
            if x not in ctx:
                raise ReplayError(f"{rule}: principal formula not in antecedent")
            ctx.discard(x)
            if rule == "andL" and x.kind == AND:
                ctx.update((x.left, x.right))
            elif rule == "botImpL" and x.kind == IMP and x.left is BOTTOM:
                pass
            elif rule == "mp" and x.kind == IMP and x.left in ctx:
                ctx.add(x.right)
            elif rule == "andImpL" and x.kind == IMP and x.left.kind == AND:
                ctx.add(Implies(x.left.left, Implies(x.left.right, x.right)))
            elif rule == "orImpL" and x.kind == IMP and x.left.kind == OR:
                ctx.update((Implies(x.left.left, x.right), Implies(x.left.right, x.right)))
            else:
                raise ReplayError(f"illegal {rule} on {to_text(x)}")
        fctx = frozenset(ctx)
        r, x, prem = p.rule, p.principal, p.premises
        if r == "ax":
            ok = g in ctx and not prem
        elif r == "botL":
            ok = BOTTOM in ctx and not prem
        elif r in ("orR0", "orR1"):
            ok = g.kind == OR and len(prem) == 1
            if ok:
                stack.append((prem[0], fctx, g.left if r == "orR0" else g.right))
        elif r == "andR":
            ok = g.kind == AND and len(prem) == 2
            if ok:
                stack += [(prem[0], fctx, g.left), (prem[1], fctx, g.right)]
        elif r == "orL":
            ok = x in ctx and x.kind == OR and len(prem) == 2
            if ok:
                rest = fctx - {x}
                stack += [(prem[0], rest | {x.left}, g), (prem[1], rest | {x.right}, g)]
        elif r == "impImpL":
            ok = x in ctx and x.kind == IMP and x.left.kind == IMP and len(prem) == 2
            if ok:
                c, d, b = x.left.left, x.left.right, x.right
                rest = fctx - {x}
                stack += [(prem[0], rest | {Implies(d, b), c}, d), (prem[1], rest | {b}, g)]
        else:
            ok = False
        if not ok:
            raise ReplayError(f"illegal terminal rule {r}")
    return len(checked)


# ---------------------------------------------------------------------------
# countermodels

def _skeleton_model(root) -> Tuple[KripkeModel, str]:
    order: List[_CM] = []
    index: Dict[int, int] = {}
    queue = [root]
    index[id(root)] = 0
    order.append(root)
    i = 0
    while i < len(queue):
        node = queue[i]
        i += 1
        for ch in node.children:
            if id(ch) not in index:
                index[id(ch)] = len(order)
                order.append(ch)
                queue.append(ch)
    names = [f"w{k}" for k in range(len(order))]
    pairs = [(names[index[id(n)]], names[index[id(ch)]]) for n in order for ch in n.children]
    frame = closure(pairs, names)
    val: Dict[str, int] = {}
    for n in order:
        for a in (n.atoms if isinstance(n, _CM) else n.true_vars):
            val[a] = val.get(a, 0) | (1 << frame.idx(names[index[id(n)]]))
    # atoms are inherited along children by construction; close upward anyway
    val = {a: frame.up_closure(m) for a, m in val.items()}
    return KripkeModel(frame, val), names[0]


def minimize_countermodel(model: KripkeModel, witness, goal: Formula) -> Tuple[KripkeModel, str]:
    """Greedily drop points (and then unused atoms) while ``witness`` still refutes ``goal``."""
    frame = model.frame
    root = frame.idx(witness)
    keep = frame.upset(witness)  # the generated submodel is enough
    cand = [w for w in range(frame.size - 1, -1, -1) if w != root and keep >> w & 1]
    # drop blocks first, halving the block size; the last pass is point by point
    size = max(1, len(cand) // 2)
    while True:
        for k in range(0, len(cand), size):
            block = 0
            for w in cand[k:k + size]:
                block |= 1 << w
            if block & keep and not model.restrict(keep & ~block).force(witness, goal):
                keep &= ~block
        cand = [w for w in cand if keep >> w & 1]
        if size == 1:
            break
        size = max(1, size // 2)
    small = model.restrict(keep)
    # rename points densely, root first
    pts = small.frame.points
    order = [witness] + [p for p in pts if p != witness]
    rename = {p: f"w{i}" for i, p in enumerate(order)}
    pairs = [(rename[pts[w]], rename[pts[v]]) for w in range(small.frame.size) for v in small.frame.covers[w]]
    frame2 = closure(pairs, [rename[p] for p in order])
    val = {}
    for a, m in small.valuation.items():
        mm = frame2.mask(rename[p] for p in small.frame.labels(m))
        if mm:
            val[a] = mm
    out = KripkeModel(frame2, val)
    assert not out.force("w0", goal)
    return out, "w0"


# ---------------------------------------------------------------------------
# public entry points

def _deep(fn):
    """Run ``fn`` on a thread with a large stack (search recursion is deep)."""
    result: list = []
    error: list = []

    def target():
        try:
            result.append(fn())
        except BaseException as e:  # re-raised in the caller
            error.append(e)

    old_limit = sys.getrecursionlimit()
    sys.setrecursionlimit(max(old_limit, 200_000))
    old_size = threading.stack_size()
    try:
        threading.stack_size(512 * 1024 * 1024)
        t = threading.Thread(target=target)
        t.start()
    finally:
        threading.stack_size(old_size)
    t.join()
    if error:
        raise error[0]
    return result[0]


ENGINES = ("intuit", "g4ip")


@dataclass(frozen=True)
class Split:
    """Sub-sequents left by eager ``->``-right and ``&``-right steps, with a certificate each."""

    parts: Tuple[Tuple[FrozenSet[Formula], Formula], ...]
    certificates: Tuple[Certificate, ...]


def _split_goal(gamma: FrozenSet[Formula], goal: Formula) -> List[Tuple[FrozenSet[Formula], Formula]]:
    out = []
    todo = [(gamma, goal)]
    while todo:
        g, f = todo.pop()
        while f.kind == IMP:
            g = g | {f.left}
            f = f.right
        if f.kind == AND:
            todo += [(g, f.right), (g, f.left)]
        else:
            out.append((g, f))
    return out


def prove_sequent(gamma: Iterable[Formula], goal: Formula, budget: int = DEFAULT_BUDGET,
                  minimize: bool = True, engine: str = "intuit") -> ProverVerdict:
    """Decide ``gamma |- goal``.

    ``engine="intuit"`` (default) runs the SAT-modulo-implications
    refinement; its Proved verdicts carry a replayable clause certificate.
    ``"g4ip"`` runs the plain sequent search, exponential on deeply nested
    implications but sharing no code with the other engine; its Proved
    verdicts carry a sequent proof.
    """
    gamma = frozenset(gamma)
    if engine == "g4ip":
        prover = Prover(budget)
        try:
            res = _deep(lambda: prover.search(gamma, goal))
        except _OutOfBudget:
            return Unknown(prover.spent)
        spent = prover.spent
    elif engine == "intuit":
        parts = _split_goal(gamma, goal)
        certs = []
        spent = 0
        res = None
        for g_i, goal_i in parts:
            oracle = Oracle(budget - spent)
            try:
                ok, out = _deep(lambda: oracle.decide(g_i, goal_i))
            except OracleBudget:
                return Unknown(spent + oracle.spent)
            finally:
                oracle.close()
            spent += oracle.spent
            if not ok:
                res = out
                gamma, goal = g_i, goal_i
                break
            certs.append(out)
        if res is None:
            res = Split(tuple(parts), tuple(certs))
    else:
        raise ValueError(f"unknown engine {engine!r}; expected one of {ENGINES}")
    if isinstance(res, (Proof, Split)):
        return Proved(res, spent, gamma, goal)
    model, root = _skeleton_model(res)
    target = Implies(conj(sorted(gamma)), goal) if gamma else goal
    if model.force(root, target):
        raise AssertionError("extracted countermodel does not refute the goal")
    if minimize:
        model, root = minimize_countermodel(model, root, target)
    return Refuted(model, root, spent)


def prove(goal: Formula, budget: int = DEFAULT_BUDGET, minimize: bool = True,
          engine: str = "intuit") -> ProverVerdict:
    """Decide ``Int |- goal``: Proved, Refuted (with a countermodel) or Unknown."""
    return prove_sequent((), goal, budget, minimize, engine)


def prove_equiv(a: Formula, b: Formula, budget: int = DEFAULT_BUDGET,
                engine: str = "intuit") -> ProverVerdict:
    return prove(Iff(a, b), budget, engine=engine)


def replay_verdict(verdict: "Proved") -> int:
    """Re-check a Proved verdict without the engine that produced it."""
    proof = verdict.proof
    if not isinstance(proof, Split):
        return replay(proof, verdict.gamma, verdict.goal)
    if list(proof.parts) != _split_goal(frozenset(verdict.gamma), verdict.goal):
        raise ReplayError("split does not match the sequent")
    total = 0
    for (g, f), cert in zip(proof.parts, proof.certificates):
        # the certificate must describe this very sub-sequent
        fresh = Oracle(0)
        try:
            assume = {fresh.name_pos(x) for x in g}
            q = fresh.name_neg(f)
            if fresh.flat != list(cert.flat) or fresh.icl != list(cert.icl):
                raise ReplayError("certificate clauses do not match the sequent")
            if q != cert.goal or not cert.assume <= assume:
                raise ReplayError("certificate closes a different sequent")
        finally:
            fresh.close()
        total += replay_certificate(cert)
    return total


def check_certificate(axiom: Formula, instances: Sequence[Mapping[str, Formula]], goal: Formula,
                      budget: int = DEFAULT_BUDGET) -> ProverVerdict:
    """Int-derivability of ``(conjunction of instances of axiom) -> goal``.

    Proved means ``Int + axiom |- goal``; a Refuted verdict only says that
    this particular instance list is not enough.
    """
    premises = [substitute(axiom, s) for s in instances]
    return prove_sequent(premises, goal, budget)


def is_theorem(goal: Formula, budget: int = DEFAULT_BUDGET) -> Optional[bool]:
    v = prove(goal, budget, minimize=False)
    return None if isinstance(v, Unknown) else isinstance(v, Proved)
