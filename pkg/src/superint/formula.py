"""Hash-consed propositional formulas over {false, variable, &, |, ->}.

Every formula is a node in one global DAG: building a structurally equal
formula twice returns the same object, so ``is`` / ``==`` are O(1) and
per-node memo tables are safe to key on the node itself.

Negation, ``true`` and ``<->`` are sugar only::

    ~A      == A -> false
    true    == false -> false
    A <-> B == (A -> B) & (B -> A)
"""
from __future__ import annotations

import re
import threading
from hashlib import blake2b
from typing import Dict, Iterable, Iterator, List, Mapping, Optional, Tuple

BOT, VAR, AND, OR, IMP = range(5)
KIND_NAMES = ("false", "var", "and", "or", "imp")

_IDENT = re.compile(r"[a-z][a-z0-9_]*\Z")


class Formula:
    """One canonical DAG node. Never instantiate directly; use the builders."""

    __slots__ = ("kind", "left", "right", "name", "uid", "key", "__weakref__")

    def __init__(self, kind, left, right, name, uid, key):
        self.kind = kind
        self.left = left
        self.right = right
        self.name = name
        self.uid = uid
        # structural digest: a construction-order-independent sort key
        self.key = key

    # identity equality/hash is inherited from object: canonical nodes make it exact

    def __repr__(self):
        return f"Formula({to_text(self)!r})"

    def __str__(self):
        return to_text(self)

    def __and__(self, other):
        return And(self, other)

    def __or__(self, other):
        return Or(self, other)

    def __rshift__(self, other):
        return Implies(self, other)

    def __invert__(self):
        return Not(self)

    def __lt__(self, other):
        return (self.key, self.uid) < (other.key, other.uid)

    @property
    def is_atom(self):
        return self.kind == VAR

    def children(self) -> Tuple["Formula", ...]:
        if self.kind in (AND, OR, IMP):
            return (self.left, self.right)
        return ()


_table: Dict[tuple, Formula] = {}
_lock = threading.Lock()
_counter = [0]


def _intern(kind, left, right, name):
    if kind == VAR:
        key = (VAR, name)
    elif kind == BOT:
        key = (BOT,)
    else:
        key = (kind, left.uid, right.uid)
    node = _table.get(key)
    if node is not None:
        return node
    with _lock:
        node = _table.get(key)
        if node is None:
            if kind == VAR:
                tag = "v:" + name
            elif kind == BOT:
                tag = "f"
            else:
                tag = f"{kind}:{left.key:x}:{right.key:x}"
            digest = int.from_bytes(blake2b(tag.encode(), digest_size=8).digest(), "big")
            node = Formula(kind, left, right, name, _counter[0], digest)
            _counter[0] += 1
            _table[key] = node
    return node


BOTTOM = _intern(BOT, None, None, None)


def Var(name: str) -> Formula:
    if not _IDENT.match(name) or name in ("false", "true"):
        raise ValueError(f"invalid variable name {name!r}")
    return _intern(VAR, None, None, name)


def And(a: Formula, b: Formula) -> Formula:
    return _intern(AND, a, b, None)


def Or(a: Formula, b: Formula) -> Formula:
    return _intern(OR, a, b, None)


def Implies(a: Formula, b: Formula) -> Formula:
    return _intern(IMP, a, b, None)


def Not(a: Formula) -> Formula:
    return Implies(a, BOTTOM)


def Iff(a: Formula, b: Formula) -> Formula:
    return And(Implies(a, b), Implies(b, a))


TOP = Not(BOTTOM)


def conj(items: Iterable[Formula]) -> Formula:
    """Right-associated conjunction; the empty conjunction is ``true``."""
    items = list(items)
    if not items:
        return TOP
    acc = items[-1]
    for f in reversed(items[:-1]):
        acc = And(f, acc)
    return acc


def disj(items: Iterable[Formula]) -> Formula:
    """Right-associated disjunction; the empty disjunction is ``false``."""
    items = list(items)
    if not items:
        return BOTTOM
    acc = items[-1]
    for f in reversed(items[:-1]):
        acc = Or(f, acc)
    return acc


def table_size() -> int:
    return len(_table)


# ---------------------------------------------------------------------------
# structural queries

def postorder(f: Formula) -> List[Formula]:
    """Distinct nodes of ``f``, children before parents (iterative)."""
    seen = set()
    out = []
    stack = [(f, False)]
    while stack:
        node, expanded = stack.pop()
        if expanded:
            out.append(node)
            continue
        if node in seen:
            continue
        seen.add(node)
        stack.append((node, True))
        for child in reversed(node.children()):
            if child not in seen:
                stack.append((child, False))
    return out


def subformulas(f: Formula) -> Iterator[Formula]:
    return iter(postorder(f))


def variables(f: Formula) -> frozenset:
    return frozenset(n.name for n in postorder(f) if n.kind == VAR)


def dag_size(f: Formula) -> int:
    return len(postorder(f))


def tree_size(f: Formula) -> int:
    """Node count of the fully unshared tree (exact big integer)."""
    size: Dict[Formula, int] = {}
    for n in postorder(f):
        if n.kind in (AND, OR, IMP):
            size[n] = 1 + size[n.left] + size[n.right]
        else:
            size[n] = 1
    return size[f]


def depth(f: Formula) -> int:
    d: Dict[Formula, int] = {}
    for n in postorder(f):
        if n.kind in (AND, OR, IMP):
            d[n] = 1 + max(d[n.left], d[n.right])
        else:
            d[n] = 0
    return d[f]


def substitute(f: Formula, s: Mapping[str, Formula]) -> Formula:
    """Simultaneous substitution of formulas for variable names."""
    if not s:
        return f
    out: Dict[Formula, Formula] = {}
    for n in postorder(f):
        k = n.kind
        if k == VAR:
            out[n] = s.get(n.name, n)
        elif k == BOT:
            out[n] = n
        else:
            a, b = out[n.left], out[n.right]
            if a is n.left and b is n.right:
                out[n] = n
            else:
                out[n] = _intern(k, a, b, None)
    return out[f]


def structurally_equal(a: Formula, b: Formula) -> bool:
    """Recursive comparison that ignores node identity (test oracle)."""
    if a.kind != b.kind:
        return False
    if a.kind == VAR:
        return a.name == b.name
    if a.kind == BOT:
        return True
    return structurally_equal(a.left, b.left) and structurally_equal(a.right, b.right)


def classical_value(f: Formula, assignment: Mapping[str, bool]) -> bool:
    val: Dict[Formula, bool] = {}
    for n in postorder(f):
        k = n.kind
        if k == BOT:
            val[n] = False
        elif k == VAR:
            val[n] = bool(assignment.get(n.name, False))
        elif k == AND:
            val[n] = val[n.left] and val[n.right]
        elif k == OR:
            val[n] = val[n.left] or val[n.right]
        else:
            val[n] = (not val[n.left]) or val[n.right]
    return val[f]


# ---------------------------------------------------------------------------
# printing

# binding strength: higher binds tighter
_PREC_IMP, _PREC_OR, _PREC_AND, _PREC_UNARY = 1, 2, 3, 4


def _iff_parts(n: Formula) -> Optional[Tuple[Formula, Formula]]:
    if n.kind == AND and n.left.kind == IMP and n.right.kind == IMP:
        a, b = n.left.left, n.left.right
        if n.right.left is b and n.right.right is a:
            return a, b
    return None


def to_text(f: Formula) -> str:
    """Minimal-parenthesis ASCII rendering; inverse of :func:`parse`."""
    memo: Dict[Tuple[Formula, int], str] = {}
    # the rendered text is exponential for deeply shared formulas anyway;
    # memoizing on (node, context) keeps the work proportional to it
    for n in postorder(f):
        _render(n, memo)
    return memo[(f, 0)]


def _render(n: Formula, memo):
    k = n.kind
    if k == BOT:
        body, prec = "false", 5
    elif k == VAR:
        body, prec = n.name, 5
    elif n is TOP:
        body, prec = "true", 5
    elif k == IMP and n.right is BOTTOM:
        body, prec = "~" + memo[(n.left, _PREC_UNARY)], _PREC_UNARY
    elif k == IMP:
        body = memo[(n.left, _PREC_IMP + 1)] + " -> " + memo[(n.right, _PREC_IMP)]
        prec = _PREC_IMP
    elif k == AND and _iff_parts(n) is not None:
        a, b = _iff_parts(n)
        body = _ctx(a, _PREC_IMP + 1, memo) + " <-> " + _ctx(b, _PREC_IMP, memo)
        prec = _PREC_IMP
    elif k == AND:
        body = memo[(n.left, _PREC_AND)] + " & " + memo[(n.right, _PREC_AND + 1)]
        prec = _PREC_AND
    else:
        body = memo[(n.left, _PREC_OR)] + " | " + memo[(n.right, _PREC_OR + 1)]
        prec = _PREC_OR
    for ctx in (0, _PREC_IMP, _PREC_IMP + 1, _PREC_OR, _PREC_OR + 1,
                _PREC_AND, _PREC_AND + 1, _PREC_UNARY):
        memo[(n, ctx)] = body if prec >= ctx else "(" + body + ")"


def _ctx(n, ctx, memo):
    return memo[(n, ctx)]


# ---------------------------------------------------------------------------
# parsing

class FormulaSyntaxError(ValueError):
    def __init__(self, message: str, text: str, pos: int):
        line = text.count("\n", 0, pos) + 1
        col = pos - (text.rfind("\n", 0, pos) + 1) + 1
        super().__init__(f"{message} at line {line}, column {col}")
        self.line = line
        self.column = col
        self.pos = pos


_TOKEN = re.compile(r"\s*(?:(<->|->|[~&|()])|([a-z][a-z0-9_]*)|(\S))")


def _tokenize(text: str):
    tokens = []
    pos = 0
    while True:
        m = _TOKEN.match(text, pos)
        if m is None:
            break
        if m.group(3) is not None:
            raise FormulaSyntaxError(f"unexpected character {m.group(3)!r}", text, m.start(3))
        if m.group(1) is not None:
            tokens.append((m.group(1), None, m.start(1)))
        else:
            tokens.append(("id", m.group(2), m.start(2)))
        pos = m.end()
    tokens.append(("eof", None, len(text)))
    return tokens


class _Parser:
    def __init__(self, text):
        self.text = text
        self.tokens = _tokenize(text)
        self.i = 0

    def peek(self):
        return self.tokens[self.i][0]

    def take(self):
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def fail(self, what):
        kind, val, pos = self.tokens[self.i]
        found = "end of input" if kind == "eof" else repr(val or kind)
        raise FormulaSyntaxError(f"expected {what}, found {found}", self.text, pos)

    def parse(self):
        f = self.implication()
        if self.peek() != "eof":
            self.fail("end of input")
        return f

    def implication(self):
        left = self.disjunction()
        op = self.peek()
        if op in ("->", "<->"):
            self.take()
            right = self.implication()
            return Implies(left, right) if op == "->" else Iff(left, right)
        return left

    def disjunction(self):
        acc = self.conjunction()
        while self.peek() == "|":
            self.take()
            acc = Or(acc, self.conjunction())
        return acc

    def conjunction(self):
        acc = self.unary()
        while self.peek() == "&":
            self.take()
            acc = And(acc, self.unary())
        return acc

    def unary(self):
        kind = self.peek()
        if kind == "~":
            self.take()
            return Not(self.unary())
        if kind == "(":
            self.take()
            f = self.implication()
            if self.peek() != ")":
                self.fail("')'")
            self.take()
            return f
        if kind == "id":
            _, name, _ = self.take()
            if name == "false":
                return BOTTOM
            if name == "true":
                return TOP
            return Var(name)
        self.fail("a formula")


def parse(text: str) -> Formula:
    """Parse ASCII formula text.

    Precedence (tightest first): ``~``, ``&``, ``|``, then ``->``/``<->``
    which share a level and associate to the right.
    """
    return _Parser(text).parse()
