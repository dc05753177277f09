"""Formula families coding Minsky-machine configurations in three variables.

All generators are memoized and return canonical DAG nodes, so repeated
calls are cheap and share structure.  Conjunction/disjunction chains are
right-associated, which keeps every printed code byte-stable.

Chain tags: ``j = 0`` lives on ``r``, ``j = 1`` on ``r, p`` and ``j = 2`` on
``r, q``.  Chain indices start at -5.
"""
from __future__ import annotations

from functools import lru_cache
from typing import Dict, Optional, Union

from .formula import BOTTOM, TOP, Formula, Not, Var, conj, disj, substitute
from .minsky import DEC1, DEC2, INC1, INC2, Instruction, MinskyMachine

P = Var("p")
Q = Var("q")
R = Var("r")
X = Var("x")
Y = Var("y")

STAR = "*"
MIN_INDEX = -5


def _check_index(i, lo, what):
    if not isinstance(i, int) or i < lo:
        raise ValueError(f"{what} index must be an integer >= {lo}, got {i!r}")


@lru_cache(maxsize=None)
def _st(i: int, x: Formula):
    if i == -2:
        return Not(x), Not(Not(x))
    s2, t2 = _st(-2, x)
    if i == -1:
        s1 = t2 >> x
        return s1, s1 >> (s2 | t2)
    s_prev, t_prev = _st(i - 1, x)
    _, t_prev2 = _st(i - 2, x)
    s = t_prev >> (s_prev | t_prev2)
    return s, s >> (s_prev | t_prev)


def s_formula(i: int, x: Formula) -> Formula:
    _check_index(i, -2, "S")
    for k in range(-2, i):  # warm the cache bottom-up; keeps recursion shallow
        _st(k, x)
    return _st(i, x)[0]


def t_formula(i: int, x: Formula) -> Formula:
    _check_index(i, -2, "T")
    for k in range(-2, i):
        _st(k, x)
    return _st(i, x)[1]


def c1() -> Formula:
    return a_formula(0, 0)


def c2() -> Formula:
    return b_formula(0, 0)


_CHAIN_VAR = {0: R, 1: P, 2: Q}


@lru_cache(maxsize=None)
def _ab(i: int, j: int):
    x = _CHAIN_VAR[j]
    if j == 0 or i <= -3:
        return s_formula(i + 3, x), t_formula(i + 3, x)
    # j in {1, 2}: the guard pair swaps between the two counter chains
    own, other = (c1(), c2()) if j == 1 else (c2(), c1())
    a3, b3 = _ab(-3, j)
    a4, b4 = _ab(-4, j)
    if i == -2:
        return b3 >> (a3 | b4), a3 >> (own | b3)
    a_prev, b_prev = _ab(i - 1, j)
    a_prev2, b_prev2 = _ab(i - 2, j)
    if i == -1:
        return b_prev >> (a_prev | b_prev2), a_prev >> (a_prev2 | b_prev)
    a = (other & b_prev) >> disj([own, a_prev, b_prev2])
    b = (other & a_prev) >> disj([own, a_prev2, b_prev])
    return a, b


def _chain(i, j):
    _check_index(i, MIN_INDEX, "chain")
    if j not in (0, 1, 2):
        raise ValueError(f"chain tag must be 0, 1 or 2, got {j!r}")
    for k in range(MIN_INDEX, i):
        _ab(k, j)
    return _ab(i, j)


def a_formula(i: int, j: int) -> Formula:
    return _chain(i, j)[0]


def b_formula(i: int, j: int) -> Formula:
    return _chain(i, j)[1]


def chain_formula(letter: str, i: int, j: int) -> Formula:
    return a_formula(i, j) if letter.lower() == "a" else b_formula(i, j)


def e_code(s: int, m: int, n: int) -> Formula:
    """Code of configuration (s, m, n)."""
    for v in (s, m, n):
        _check_index(v, 0, "configuration")
    return conj([a_formula(3 * s + 2, 0), b_formula(3 * s + 2, 0),
                 a_formula(m + 1, 1), b_formula(m + 1, 1),
                 a_formula(n + 1, 2), b_formula(n + 1, 2)]) >> \
        disj([a_formula(3 * s + 1, 0), b_formula(3 * s + 1, 0),
              a_formula(m, 1), b_formula(m, 1),
              a_formula(n, 2), b_formula(n, 2)])


# ---------------------------------------------------------------------------
# key formulas in p, q, x, y and their specialisations

@lru_cache(maxsize=None)
def _fg(k: int):
    if k == 0:
        return P, Q
    if k == 1:
        return (Y & Q) >> (X | P), (Y & P) >> (X | Q)
    f1, g1 = _fg(k - 1)
    f2, g2 = _fg(k - 2)
    return (Y & g1) >> disj([X, f1, g2]), (Y & f1) >> disj([X, g1, f2])


def f_formula(k: int) -> Formula:
    _check_index(k, 0, "F")
    for kk in range(k):
        _fg(kk)
    return _fg(k)[0]


def g_formula(k: int) -> Formula:
    _check_index(k, 0, "G")
    for kk in range(k):
        _fg(kk)
    return _fg(k)[1]


def _guards(m):
    if m == 1:
        return {"x": c1(), "y": c2()}
    if m == 2:
        return {"x": c2(), "y": c1()}
    raise ValueError(f"counter tag must be 1 or 2, got {m!r}")


def f_m(k: int, m: int) -> Formula:
    return substitute(f_formula(k), _guards(m))


def g_m(k: int, m: int) -> Formula:
    return substitute(g_formula(k), _guards(m))


def p_formula(i: int, j: int) -> Formula:
    """First conjunct on chain 1 at index i, second on chain 2 at index j."""
    _check_index(i, -1, "P")
    _check_index(j, -1, "P")
    return ((c2() >> disj([c1(), a_formula(i, 1), b_formula(i - 1, 1)]))
            & (c1() >> disj([c2(), a_formula(j, 2), b_formula(j - 1, 2)])))


def q_formula(i: int, j: int) -> Formula:
    _check_index(i, -1, "Q")
    _check_index(j, -1, "Q")
    return ((c2() >> disj([c1(), a_formula(i - 1, 1), b_formula(i, 1)]))
            & (c1() >> disj([c2(), a_formula(j - 1, 2), b_formula(j, 2)])))


def pq_substitution(i: int, j: int) -> Dict[str, Formula]:
    return {"p": p_formula(i, j), "q": q_formula(i, j)}


def key_formula(letter: str, k: int, m: int, i: int, j: int) -> Formula:
    """F_k^m or G_k^m with p, q replaced by P_{i,j}, Q_{i,j}."""
    base = f_m(k, m) if letter.upper() == "F" else g_m(k, m)
    return substitute(base, pq_substitution(i, j))


def key_target(letter: str, k: int, m: int, i: int, j: int) -> Formula:
    """The chain formula a key formula is equivalent to (A or B at n + k)."""
    n = i if m == 1 else j
    return chain_formula("A" if letter.upper() == "F" else "B", n + k, m)


# ---------------------------------------------------------------------------
# machine-level codes

def e_hat(s: int, i: int, j: int) -> Formula:
    _check_index(s, 0, "state")
    _check_index(i, 1, "Ehat")
    _check_index(j, 1, "Ehat")
    return conj([a_formula(3 * s + 2, 0), b_formula(3 * s + 2, 0),
                 f_m(i + 1, 1), g_m(i + 1, 1), f_m(j + 1, 2), g_m(j + 1, 2)]) >> \
        disj([a_formula(3 * s + 1, 0), b_formula(3 * s + 1, 0),
              f_m(i, 1), g_m(i, 1), f_m(j, 2), g_m(j, 2)])


def e_hat_0star(s: int) -> Formula:
    _check_index(s, 0, "state")
    return conj([a_formula(3 * s + 2, 0), b_formula(3 * s + 2, 0),
                 a_formula(1, 1), b_formula(1, 1)]) >> \
        disj([a_formula(3 * s + 1, 0), b_formula(3 * s + 1, 0),
              a_formula(0, 1), b_formula(0, 1), Q])


def e_hat_star0(s: int) -> Formula:
    _check_index(s, 0, "state")
    return conj([a_formula(3 * s + 2, 0), b_formula(3 * s + 2, 0),
                 a_formula(1, 2), b_formula(1, 2)]) >> \
        disj([a_formula(3 * s + 1, 0), b_formula(3 * s + 1, 0),
              P, a_formula(0, 2), b_formula(0, 2)])


def e_hat_00(s: int) -> Formula:
    return e_code(s, 0, 0)


Index = Union[int, str]


def e_hat_any(s: int, i: Index, j: Index) -> Formula:
    """Dispatch on (i, j) with ``'*'`` allowed for the boundary forms."""
    if i == 0 and j == 0:
        return e_hat_00(s)
    if i == 0 and j == STAR:
        return e_hat_0star(s)
    if i == STAR and j == 0:
        return e_hat_star0(s)
    return e_hat(s, i, j)


def phi(x: Index) -> int:
    if x == STAR:
        return 0
    if not isinstance(x, int) or x < 0:
        raise ValueError(f"phi is defined on naturals and '*', got {x!r}")
    return x - 1 if x >= 1 else 0


def equivalence_form(s: int, m: int, n: int, i: Optional[int] = None,
                     j: Optional[int] = None) -> Formula:
    """Right-hand side of the code/key-code equivalence for (s, m, n).

    With ``i, j`` given (1 <= i <= m+1, 1 <= j <= n+1) this is the general
    case; otherwise the boundary form selected by which counters are zero.
    """
    if i is not None or j is not None:
        if i is None or j is None or not (1 <= i <= m + 1 and 1 <= j <= n + 1):
            raise ValueError(f"indices ({i}, {j}) inadmissible for ({s}, {m}, {n})")
        return substitute(e_hat(s, i, j), pq_substitution(m - i, n - j))
    if m == 0 and n == 0:
        return e_hat_00(s)
    if m == 0:
        body = substitute(e_hat_0star(s), {"q": a_formula(n, 2) | b_formula(n, 2)})
        return (a_formula(n + 1, 2) & b_formula(n + 1, 2)) >> body
    if n == 0:
        body = substitute(e_hat_star0(s), {"p": a_formula(m, 1) | b_formula(m, 1)})
        return (a_formula(m + 1, 1) & b_formula(m + 1, 1)) >> body
    raise ValueError(f"({s}, {m}, {n}) has no boundary form; pass i and j")


def ax_instruction(ins: Instruction) -> Formula:
    s, t, u = ins.source, ins.target, ins.alt
    if ins.op == INC1:
        return e_hat(t, 2, 1) >> e_hat(s, 1, 1)
    if ins.op == INC2:
        return e_hat(t, 1, 2) >> e_hat(s, 1, 1)
    if ins.op == DEC1:
        return (e_hat(t, 1, 1) >> e_hat(s, 2, 1)) & (e_hat_0star(u) >> e_hat_0star(s))
    if ins.op == DEC2:
        return (e_hat(t, 1, 1) >> e_hat(s, 1, 2)) & (e_hat_star0(u) >> e_hat_star0(s))
    raise ValueError(f"unknown instruction kind {ins.op!r}")


def ax_machine(machine: MinskyMachine) -> Formula:
    """Conjunction of instruction axioms in ascending source-state order."""
    return conj(ax_instruction(machine[s]) for s in sorted(machine.states()))


def family(name: str, *indices) -> Formula:
    """Look up a family member by CLI-style name (A, B, E, F, G, P, Q, Ehat, S, T, C1, C2)."""
    key = name.upper()
    if key in ("A", "B"):
        return chain_formula(key, *indices)
    if key == "E":
        return e_code(*indices)
    if key in ("F", "G"):
        if len(indices) == 1:
            return f_formula(*indices) if key == "F" else g_formula(*indices)
        return f_m(*indices) if key == "F" else g_m(*indices)
    if key == "P":
        return p_formula(*indices)
    if key == "Q":
        return q_formula(*indices)
    if key == "EHAT":
        return e_hat_any(*indices)
    if key == "S":
        return s_formula(indices[0], Var(indices[1]) if len(indices) > 1 else R)
    if key == "T":
        return t_formula(indices[0], Var(indices[1]) if len(indices) > 1 else R)
    if key == "C1":
        return c1()
    if key == "C2":
        return c2()
    raise ValueError(f"unknown family {name!r}")


__all__ = [
    "P", "Q", "R", "X", "Y", "STAR", "s_formula", "t_formula", "a_formula", "b_formula",
    "chain_formula", "c1", "c2", "e_code", "f_formula", "g_formula", "f_m", "g_m",
    "p_formula", "q_formula", "pq_substitution", "key_formula", "key_target", "e_hat",
    "e_hat_0star", "e_hat_star0", "e_hat_00", "e_hat_any", "phi", "equivalence_form",
    "ax_instruction", "ax_machine", "family", "BOTTOM", "TOP",
]
