"""Finite truncations of the Kripke model that refutes exactly the reachable codes.

Points are ``a(i,j)``, ``b(i,j)`` for chain indices ``-5 <= i <= imax`` and
``j in {0,1,2}``, plus one ``e(s,m,n)`` per explored configuration class
(named by its lexicographically least member).  Truncation removes points
from the bottom of the order only, so the retained set is upward closed
and forcing at retained points is the same as in the untruncated model.
"""
from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Iterable, List, NamedTuple, Optional, Tuple

from . import encoding as enc
from .formula import Formula
from .kripke import FrameError, KripkeModel, check_poset, closure
from .minsky import ClassQuotient, Configuration, ConfigGraph, MinskyMachine, classes, reach_graph


class PointId(NamedTuple):
    kind: str  # "a", "b" or "e"
    idx: Tuple[int, ...]  # (i, j) for chain points, (s, m, n) for e-points

    def __str__(self):
        return f"{self.kind}({','.join(str(v) for v in self.idx)})"


def a_pt(i: int, j: int) -> PointId:
    return PointId("a", (i, j))


def b_pt(i: int, j: int) -> PointId:
    return PointId("b", (i, j))


def e_pt(s: int, m: int, n: int) -> PointId:
    return PointId("e", (s, m, n))


_POINT_RE = re.compile(r"\s*([abe])\s*\(\s*(-?\d+)\s*,\s*(-?\d+)\s*(?:,\s*(-?\d+)\s*)?\)\s*\Z")


def parse_point_id(text: str) -> PointId:
    m = _POINT_RE.match(text)
    if not m:
        raise ValueError(f"bad point id {text!r}; expected a(i,j), b(i,j) or e(s,m,n)")
    kind = m.group(1)
    nums = tuple(int(g) for g in m.groups()[1:] if g is not None)
    if (kind == "e") != (len(nums) == 3):
        raise ValueError(f"bad point id {text!r}")
    return PointId(kind, nums)


class TruncationError(ValueError):
    pass


@dataclass(frozen=True)
class TruncationParams:
    imax: int = 20
    step_bound: int = 6
    counter_bound: int = 8
    margin: int = 2

    @property
    def zone_max(self) -> int:
        """Largest chain index whose refuters may be checked."""
        return self.imax - self.margin


def chain_pairs(imax: int) -> List[Tuple[PointId, PointId]]:
    """Base (covering) pairs among chain points with index <= imax."""
    pairs = []
    for j in (0, 1, 2):
        a, b = (lambda i: a_pt(i, j)), (lambda i: b_pt(i, j))
        pairs += [(a(-4), a(-5)), (b(-4), a(-5)), (b(-4), b(-5)),
                  (a(-3), a(-4)), (a(-3), b(-5)), (b(-3), a(-4)), (b(-3), b(-4))]
        if j == 0:
            for i in range(-2, imax + 1):
                pairs += [(a(i), a(i - 1)), (a(i), b(i - 2)), (b(i), a(i - 1)), (b(i), b(i - 1))]
            continue
        guard = a_pt(0, 0) if j == 1 else b_pt(0, 0)
        pairs += [(a(-2), a(-3)), (a(-2), b(-4)), (b(-2), guard), (b(-2), b(-3))]
        for i in range(-1, imax + 1):
            pairs += [(a(i), a(i - 1)), (a(i), b(i - 2)), (b(i), a(i - 2)), (b(i), b(i - 1))]
    return pairs


def code_pairs(c: Configuration, e: PointId) -> List[Tuple[PointId, PointId]]:
    s, m, n = c
    return [(e, a_pt(3 * s + 1, 0)), (e, b_pt(3 * s + 1, 0)),
            (e, a_pt(m, 1)), (e, b_pt(m, 1)), (e, a_pt(n, 2)), (e, b_pt(n, 2))]


class MachineModel:
    """The built model together with the exploration it was built from."""

    def __init__(self, machine: MinskyMachine, init, params: TruncationParams,
                 graph: ConfigGraph, quotient: ClassQuotient, model: KripkeModel,
                 base_pairs: List[Tuple[PointId, PointId]]):
        self.machine = machine
        self.init = Configuration(*init)
        self.params = params
        self.graph = graph
        self.quotient = quotient
        self.model = model
        self.frame = model.frame
        self.base_pairs = base_pairs

    # --- point bookkeeping -------------------------------------------------
    def e_point(self, c) -> Optional[PointId]:
        c = Configuration(*c)
        k = self.quotient.class_of.get(c)
        if k is None:
            return None
        return e_pt(*self.quotient.representative[k])

    @property
    def e_points(self) -> List[PointId]:
        return [e_pt(*r) for r in self.quotient.representative]

    @property
    def explored(self) -> List[Configuration]:
        return list(self.graph.vertices)

    def downset(self, point) -> set:
        return set(self.frame.labels(self.frame.downset(self._pt(point))))

    def is_below(self, w, u) -> bool:
        return self.frame.leq(self._pt(w), self._pt(u))

    def _pt(self, point):
        if isinstance(point, str):
            point = parse_point_id(point)
        if point not in self.frame.index:
            raise KeyError(f"point {point} is not in this truncation")
        return point

    # --- family members ----------------------------------------------------
    def in_zone(self, member) -> bool:
        zone = self.params.zone_max
        kind = member[0].upper()
        if kind in ("A", "B"):
            return member[1] <= zone
        if kind == "E":
            s, m, n = member[1:]
            return max(3 * s + 2, m + 1, n + 1) <= zone
        return True  # C1, C2 sit at index 0

    def refutation_point(self, member) -> PointId:
        """The unique maximal point refuting a family member.

        ``member`` is ``("A", i, j)``, ``("B", i, j)``, ``("E", s, m, n)``,
        ``("C1",)`` or ``("C2",)``.  Raises TruncationError inside the
        margin and LookupError for a code with no refuting point.
        """
        kind = member[0].upper()
        if kind == "C1":
            member = ("A", 0, 0)
        elif kind == "C2":
            member = ("B", 0, 0)
        kind = member[0].upper()
        if not self.in_zone(member):
            raise TruncationError(f"{member} reaches into the truncation margin "
                                  f"(verified zone ends at index {self.params.zone_max})")
        if kind in ("A", "B"):
            i, j = member[1], member[2]
            point = a_pt(i, j) if kind == "A" else b_pt(i, j)
            f = enc.chain_formula(kind, i, j)
        elif kind == "E":
            point = self.e_point(member[1:])
            if point is None:
                raise LookupError(f"configuration {member[1:]} was not explored; its code has no refuter")
            f = enc.e_code(*member[1:])
        else:
            raise ValueError(f"unknown family member {member!r}")
        got = self.model.refuters_mask(f)
        want = self.frame.downset(point)
        if got != want:
            raise AssertionError(f"refuters of {member} differ from the down-set of {point}")
        return point

    def formula_of(self, member) -> Formula:
        kind = member[0].upper()
        if kind in ("A", "B"):
            return enc.chain_formula(kind, member[1], member[2])
        if kind == "E":
            return enc.e_code(*member[1:])
        return enc.family(kind)


def validate_params(params: TruncationParams, graph: ConfigGraph):
    if params.margin < 2:
        raise TruncationError("margin must be at least 2")
    if params.step_bound < 0 or params.counter_bound < 0:
        raise TruncationError("bounds must be nonnegative")
    if not graph.vertices:
        return
    need = max(max(3 * c.s + 2, c.m + 1, c.n + 1) for c in graph.vertices) + params.margin
    if params.imax < need:
        raise TruncationError(f"imax={params.imax} too small for the explored configurations "
                              f"(needs at least {need})")


def build(machine: MinskyMachine, init, params: TruncationParams = TruncationParams(),
          extra_pairs: Iterable[Tuple[PointId, PointId]] = (),
          drop_pairs: Iterable[Tuple[PointId, PointId]] = ()) -> MachineModel:
    """Build the truncated model for ``machine`` started at ``init``.

    ``extra_pairs`` / ``drop_pairs`` edit the base relation; they exist for
    fault-injection fixtures only.
    """
    init = Configuration(*init)
    graph = reach_graph(machine, init, params.step_bound, params.counter_bound)
    validate_params(params, graph)
    quotient = classes(graph)

    points: List[PointId] = []
    for j in (0, 1, 2):
        for i in range(-5, params.imax + 1):
            points += [a_pt(i, j), b_pt(i, j)]
    reps = [e_pt(*r) for r in quotient.representative]
    points += reps

    pairs = chain_pairs(params.imax)
    for c in graph.vertices:
        pairs += code_pairs(c, reps[quotient.class_of[c]])
    for ca, cb in quotient.cover_pairs():
        pairs.append((reps[ca], reps[cb]))
    pairs += list(extra_pairs)
    drop = set(drop_pairs)
    if drop:
        pairs = [p for p in pairs if p not in drop]

    try:
        frame = closure(pairs, points)
    except FrameError as e:
        raise AssertionError(f"class order is cyclic: {e}") from None
    report = check_poset(frame)
    assert report.ok, str(report)

    valuation = {}
    for var, j in (("r", 0), ("p", 1), ("q", 2)):
        false_at = frame.downset(a_pt(-4, j)) | frame.downset(b_pt(-5, j))
        valuation[var] = frame.all & ~false_at
    model = KripkeModel(frame, valuation)
    return MachineModel(machine, init, params, graph, quotient, model, pairs)
