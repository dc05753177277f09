"""Finite intuitionistic Kripke frames and models.

Points are indexed 0..n-1; each point carries its reflexive up-set and
down-set as integer bitsets.  Forcing is computed per DAG node as the set
of points forcing it (its *extension*), bottom-up, so a formula with shared
subterms is evaluated once per node for all points at the same time.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Dict, Hashable, Iterable, List, Mapping, Optional, Sequence, Tuple

from . import kernels
from .formula import Formula, postorder


class FrameError(ValueError):
    pass


def _bits(x: int) -> Iterable[int]:
    while x:
        low = x & -x
        yield low.bit_length() - 1
        x ^= low


def bits_of(x: int) -> List[int]:
    return list(_bits(x))


class KripkeFrame:
    """A finite set of points with an order given by reflexive up-sets.

    Construct with :func:`closure` (which guarantees a partial order) or
    directly from up-sets; :func:`check_poset` validates the latter.
    """

    def __init__(self, points: Sequence[Hashable], up: Sequence[int]):
        if not points:
            raise FrameError("a frame needs at least one point")
        self.points: List[Hashable] = list(points)
        self.index: Dict[Hashable, int] = {}
        self.by_name: Dict[str, int] = {}
        for i, p in enumerate(self.points):
            if p in self.index:
                raise FrameError(f"duplicate point {p!r}")
            self.index[p] = i
            self.by_name.setdefault(str(p), i)
        self.size = len(self.points)
        self.all = (1 << self.size) - 1
        self.up: List[int] = list(up)
        down = [0] * self.size
        for w, u in enumerate(self.up):
            for v in _bits(u):
                down[v] |= 1 << w
        self.down: List[int] = down
        self._covers: Optional[List[List[int]]] = None
        self._topo: Optional[List[int]] = None

    def __len__(self):
        return self.size

    def __repr__(self):
        return f"KripkeFrame({self.size} points)"

    def idx(self, point) -> int:
        i = self.index.get(point)
        if i is None:
            i = self.by_name.get(str(point))
            if i is None:
                raise KeyError(f"unknown point {point!r}")
        return i

    def leq(self, w, u) -> bool:
        return bool(self.up[self.idx(w)] >> self.idx(u) & 1)

    def successors(self, w) -> List[Hashable]:
        return [self.points[v] for v in _bits(self.up[self.idx(w)])]

    def upset(self, w) -> int:
        return self.up[self.idx(w)]

    def downset(self, w) -> int:
        return self.down[self.idx(w)]

    def down_closure(self, mask: int) -> int:
        acc = 0
        for v in _bits(mask):
            acc |= self.down[v]
        return acc

    def up_closure(self, mask: int) -> int:
        acc = 0
        for v in _bits(mask):
            acc |= self.up[v]
        return acc

    def labels(self, mask: int) -> List[Hashable]:
        return [self.points[v] for v in _bits(mask)]

    def mask(self, pts: Iterable) -> int:
        acc = 0
        for p in pts:
            acc |= 1 << self.idx(p)
        return acc

    @property
    def covers(self) -> List[List[int]]:
        """Immediate strict successors (Hasse diagram)."""
        if self._covers is None:
            out = []
            for w in range(self.size):
                strict = self.up[w] & ~(1 << w)
                hidden = 0
                for v in _bits(strict):
                    hidden |= self.up[v] & ~(1 << v)
                out.append(bits_of(strict & ~hidden))
            self._covers = out
        return self._covers

    def topological(self) -> List[int]:
        """Points ordered maximal-first (every point after all its strict successors)."""
        if self._topo is None:
            self._topo = sorted(range(self.size), key=lambda w: (bin(self.up[w]).count("1"), w))
        return self._topo

    def maximal(self) -> List[int]:
        return [w for w in range(self.size) if self.up[w] == 1 << w]

    def minimal(self) -> List[int]:
        return [w for w in range(self.size) if self.down[w] == 1 << w]

    def is_upset(self, mask: int) -> bool:
        return all(self.up[v] & ~mask == 0 for v in _bits(mask))

    def restrict(self, keep: int) -> "KripkeFrame":
        """Subframe on the points of ``keep`` with the induced order."""
        idx = bits_of(keep)
        remap = {old: new for new, old in enumerate(idx)}
        up = []
        for old in idx:
            m = 0
            for v in _bits(self.up[old] & keep):
                m |= 1 << remap[v]
            up.append(m)
        return KripkeFrame([self.points[i] for i in idx], up)


@dataclass
class PosetReport:
    ok: bool
    law: Optional[str] = None
    pair: Optional[Tuple[Hashable, ...]] = None

    def __bool__(self):
        return self.ok

    def __str__(self):
        if self.ok:
            return "ok"
        return f"{self.law} violated at {self.pair}"


def check_poset(frame: KripkeFrame) -> PosetReport:
    up = frame.up
    for w in range(frame.size):
        if not up[w] >> w & 1:
            return PosetReport(False, "reflexivity", (frame.points[w],))
    for w in range(frame.size):
        for v in _bits(up[w]):
            if up[v] & ~up[w]:
                u = (up[v] & ~up[w]).bit_length() - 1
                return PosetReport(False, "transitivity",
                                   (frame.points[w], frame.points[v], frame.points[u]))
    for w in range(frame.size):
        for v in _bits(up[w] & ~(1 << w)):
            if up[v] >> w & 1:
                return PosetReport(False, "antisymmetry", (frame.points[w], frame.points[v]))
    return PosetReport(True)


def closure(base_pairs: Iterable[Tuple[Hashable, Hashable]],
            points: Optional[Iterable[Hashable]] = None) -> KripkeFrame:
    """Reflexive-transitive closure of an acyclic relation.

    Raises FrameError if the relation has a cycle through distinct points.
    """
    pts: List[Hashable] = list(points) if points is not None else []
    seen = set(pts)
    pairs = list(base_pairs)
    for a, b in pairs:
        for x in (a, b):
            if x not in seen:
                seen.add(x)
                pts.append(x)
    index = {p: i for i, p in enumerate(pts)}
    succ: List[set] = [set() for _ in pts]
    for a, b in pairs:
        ia, ib = index[a], index[b]
        if ia != ib:
            succ[ia].add(ib)
    # Kahn on the reversed graph: emit points whose successors are all done
    outdeg = [len(s) for s in succ]
    preds: List[List[int]] = [[] for _ in pts]
    for a, ss in enumerate(succ):
        for b in ss:
            preds[b].append(a)
    ready = [i for i, d in enumerate(outdeg) if d == 0]
    up = [0] * len(pts)
    done = 0
    while ready:
        v = ready.pop()
        acc = 1 << v
        for b in succ[v]:
            acc |= up[b]
        up[v] = acc
        done += 1
        for a in preds[v]:
            outdeg[a] -= 1
            if outdeg[a] == 0:
                ready.append(a)
    if done != len(pts):
        cyc = [pts[i] for i, d in enumerate(outdeg) if d > 0]
        raise FrameError(f"relation has a cycle among distinct points (involving {cyc[:4]})")
    return KripkeFrame(pts, up)


class KripkeModel:
    """A frame plus an upward-closed valuation (variable name -> point bitset)."""

    def __init__(self, frame: KripkeFrame, valuation: Mapping[str, int], check: bool = True):
        self.frame = frame
        self.valuation: Dict[str, int] = {}
        for name, val in valuation.items():
            mask = val if isinstance(val, int) else frame.mask(val)
            if check and not frame.is_upset(mask):
                raise FrameError(f"valuation of {name!r} is not upward closed")
            self.valuation[name] = mask
        self._ext: Dict[Formula, int] = {}

    def __repr__(self):
        return f"KripkeModel({self.frame.size} points, vars={sorted(self.valuation)})"

    def extension(self, f: Formula) -> int:
        """Bitset of points forcing ``f``."""
        got = self._ext.get(f)
        if got is not None:
            return got
        todo = [n for n in postorder(f) if n not in self._ext]
        if todo:
            kernels.extend_extensions(todo, self._ext, self.frame, self.valuation)
        return self._ext[f]

    def force(self, point, f: Formula) -> bool:
        return bool(self.extension(f) >> self.frame.idx(point) & 1)

    def refuters_mask(self, f: Formula) -> int:
        return self.frame.all & ~self.extension(f)

    def refuters(self, f: Formula) -> set:
        return set(self.frame.labels(self.refuters_mask(f)))

    def valid(self, f: Formula) -> bool:
        return self.extension(f) == self.frame.all

    def true_at(self, name: str) -> List[Hashable]:
        return self.frame.labels(self.valuation.get(name, 0))

    def restrict(self, keep: int) -> "KripkeModel":
        sub = self.frame.restrict(keep)
        idx = bits_of(keep)
        val = {}
        for name, mask in self.valuation.items():
            m = 0
            for new, old in enumerate(idx):
                if mask >> old & 1:
                    m |= 1 << new
            val[name] = m
        return KripkeModel(sub, val, check=False)


def force(model: KripkeModel, point, f: Formula) -> bool:
    return model.force(point, f)


def refuters(model: KripkeModel, f: Formula) -> set:
    return model.refuters(f)


def valid_in_model(model: KripkeModel, f: Formula) -> bool:
    return model.valid(f)


# ---------------------------------------------------------------------------
# text formats

def dump_model(model: KripkeModel) -> str:
    fr = model.frame
    lines = ["points:"]
    lines.extend(str(p) for p in fr.points)
    lines.append("order:")
    for w in range(fr.size):
        cov = fr.covers[w]
        if cov:
            lines.append(f"{fr.points[w]} -> " + " ".join(str(fr.points[v]) for v in cov))
    for name in sorted(model.valuation):
        lines.append(f"val {name}:")
        lines.extend(str(p) for p in fr.labels(model.valuation[name]))
    return "\n".join(lines) + "\n"


class ModelFormatError(ValueError):
    pass


def load_model(text: str) -> KripkeModel:
    section = None
    points: List[str] = []
    pairs: List[Tuple[str, str]] = []
    val: Dict[str, List[str]] = {}
    current_var = None
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if line == "points:":
            section = "points"
            continue
        if line == "order:":
            section = "order"
            continue
        if line.startswith("val ") and line.endswith(":"):
            section = "val"
            current_var = line[4:-1].strip()
            val.setdefault(current_var, [])
            continue
        if section == "points":
            points.extend(line.split())
        elif section == "order":
            if "->" not in line:
                raise ModelFormatError(f"line {lineno}: expected 'w -> w1 w2 ...'")
            src, dst = line.split("->", 1)
            for d in dst.split():
                pairs.append((src.strip(), d))
        elif section == "val":
            val[current_var].extend(line.split())
        else:
            raise ModelFormatError(f"line {lineno}: content outside a section")
    known = set(points)
    for a, b in pairs:
        for x in (a, b):
            if x not in known:
                raise ModelFormatError(f"order mentions undeclared point {x!r}")
    try:
        frame = closure(pairs, points)
    except FrameError as e:
        raise ModelFormatError(str(e)) from None
    valuation = {}
    for name, pts in val.items():
        for p in pts:
            if p not in known:
                raise ModelFormatError(f"valuation of {name!r} mentions undeclared point {p!r}")
        valuation[name] = frame.mask(pts)
    return KripkeModel(frame, valuation)


def to_dot(model: KripkeModel, highlight: Optional[Formula] = None, name: str = "frame") -> str:
    """Covering edges; points refuting ``highlight`` are double-circled."""
    fr = model.frame
    refuted = model.refuters_mask(highlight) if highlight is not None else 0
    out = [f"digraph {name} {{", "  rankdir=BT;"]
    for w, p in enumerate(fr.points):
        shape = "doublecircle" if refuted >> w & 1 else "circle"
        true_vars = [v for v in sorted(model.valuation) if model.valuation[v] >> w & 1]
        label = str(p) + ("\\n" + ",".join(true_vars) if true_vars else "")
        out.append(f'  "{p}" [shape={shape}, label="{label}"];')
    for w in range(fr.size):
        for v in fr.covers[w]:
            out.append(f'  "{fr.points[w]}" -> "{fr.points[v]}";')
    out.append("}")
    return "\n".join(out) + "\n"


# ---------------------------------------------------------------------------
# frame validity by search

@dataclass
class CountervaluationResult:
    status: str  # "found" | "none" | "unknown"
    valuation: Optional[Dict[str, frozenset]] = None
    witness: Optional[Hashable] = None
    nodes: int = 0
    conflicts: int = 0

    @property
    def found(self) -> bool:
        return self.status == "found"

    def model(self, frame: KripkeFrame) -> KripkeModel:
        assert self.valuation is not None
        return KripkeModel(frame, {k: frame.mask(v) for k, v in self.valuation.items()})


DEFAULT_CV_BUDGET = 10_000_000


def countervaluation(frame: KripkeFrame, f: Formula, budget: int = DEFAULT_CV_BUDGET,
                     engine: Optional[str] = None) -> CountervaluationResult:
    """Search for a monotone valuation refuting ``f`` somewhere on ``frame``.

    ``none`` means the search space was exhausted, i.e. ``f`` is valid in
    the frame; ``unknown`` means the node budget ran out first.
    """
    from .cvsearch import search
    return search(frame, f, budget, engine=engine)
