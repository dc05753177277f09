"""Two-counter Minsky machines: parsing, execution, bounded reachability, SCC classes."""
from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from typing import Dict, FrozenSet, Iterable, List, Mapping, NamedTuple, Optional, Tuple

INC1, INC2, DEC1, DEC2 = "INC1", "INC2", "DEC1", "DEC2"
OPS = (INC1, INC2, DEC1, DEC2)


class MachineSyntaxError(ValueError):
    def __init__(self, message: str, line: int):
        super().__init__(f"line {line}: {message}")
        self.line = line


@dataclass(frozen=True)
class Instruction:
    op: str
    source: int
    target: int
    alt: Optional[int] = None  # zero-branch target of DEC1/DEC2

    def __post_init__(self):
        if self.op not in OPS:
            raise ValueError(f"unknown instruction {self.op!r}")
        if (self.alt is None) != (self.op in (INC1, INC2)):
            raise ValueError(f"{self.op} takes {'one' if self.op in (INC1, INC2) else 'two'} target(s)")
        for v in (self.source, self.target, self.alt):
            if v is not None and (not isinstance(v, int) or v < 0):
                raise ValueError("states are nonnegative integers")

    def __str__(self):
        tail = f" {self.alt}" if self.alt is not None else ""
        return f"{self.source} {self.op} {self.target}{tail}"


class Configuration(NamedTuple):
    s: int
    m: int
    n: int

    def __str__(self):
        return f"({self.s},{self.m},{self.n})"


class MinskyMachine(Mapping[int, Instruction]):
    """Deterministic instruction table: at most one instruction per state."""

    def __init__(self, instructions: Iterable[Instruction] = ()):
        self._table: Dict[int, Instruction] = {}
        for ins in instructions:
            if ins.source in self._table:
                raise ValueError(f"duplicate instruction for state {ins.source}")
            self._table[ins.source] = ins

    def __getitem__(self, s):
        return self._table[s]

    def __iter__(self):
        return iter(sorted(self._table))

    def __len__(self):
        return len(self._table)

    def states(self):
        return sorted(self._table)

    def __repr__(self):
        return f"MinskyMachine([{', '.join(str(i) for i in self._table.values())}])"

    def to_text(self) -> str:
        return "".join(f"{self._table[s]}\n" for s in self.states())


def parse_machine(text: str) -> MinskyMachine:
    instructions = []
    seen: Dict[int, int] = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        if len(parts) < 3:
            raise MachineSyntaxError(f"malformed instruction {raw.strip()!r}", lineno)
        op = parts[1].upper()
        want = 3 if op in (INC1, INC2) else 4 if op in (DEC1, DEC2) else None
        if want is None:
            raise MachineSyntaxError(f"unknown opcode {parts[1]!r}", lineno)
        if len(parts) != want:
            raise MachineSyntaxError(f"{op} expects {want - 2} target state(s)", lineno)
        try:
            nums = [int(x) for x in parts[:1] + parts[2:]]
        except ValueError:
            raise MachineSyntaxError(f"non-integer state in {raw.strip()!r}", lineno) from None
        if any(v < 0 for v in nums):
            raise MachineSyntaxError("states must be nonnegative", lineno)
        s = nums[0]
        if s in seen:
            raise MachineSyntaxError(f"duplicate instruction for state {s} (first on line {seen[s]})", lineno)
        seen[s] = lineno
        instructions.append(Instruction(op, s, nums[1], nums[2] if want == 4 else None))
    return MinskyMachine(instructions)


def step(machine: Mapping[int, Instruction], c: Configuration) -> Optional[Configuration]:
    """One transition, or None when no instruction exists for ``c.s`` (halted)."""
    ins = machine.get(c.s)
    if ins is None:
        return None
    s, m, n = c
    if ins.op == INC1:
        return Configuration(ins.target, m + 1, n)
    if ins.op == INC2:
        return Configuration(ins.target, m, n + 1)
    if ins.op == DEC1:
        return Configuration(ins.target, m - 1, n) if m > 0 else Configuration(ins.alt, m, n)
    return Configuration(ins.target, m, n - 1) if n > 0 else Configuration(ins.alt, m, n)


def run(machine, c: Configuration, max_steps: int) -> List[Configuration]:
    if max_steps < 0:
        raise ValueError("max_steps must be >= 0")
    c = Configuration(*c)
    trace = [c]
    for _ in range(max_steps):
        nxt = step(machine, trace[-1])
        if nxt is None:
            break
        trace.append(nxt)
    return trace


@dataclass
class ConfigGraph:
    root: Configuration
    vertices: List[Configuration]
    edges: List[Tuple[Configuration, Configuration]]
    step_truncated: bool = False
    counter_truncated: bool = False
    depth: Dict[Configuration, int] = field(default_factory=dict)

    @property
    def truncated(self) -> bool:
        return self.step_truncated or self.counter_truncated

    def successors(self) -> Dict[Configuration, List[Configuration]]:
        out: Dict[Configuration, List[Configuration]] = {v: [] for v in self.vertices}
        for a, b in self.edges:
            out[a].append(b)
        return out

    def reachable(self, target) -> bool:
        return Configuration(*target) in self.depth


def reach_graph(machine, root, step_bound: int, counter_bound: int) -> ConfigGraph:
    """Breadth-first exploration of the step relation within both bounds.

    A vertex at depth ``step_bound`` is not expanded, and a successor with a
    counter above ``counter_bound`` is not added; either event sets the
    corresponding truncation flag.
    """
    if step_bound < 0 or counter_bound < 0:
        raise ValueError("bounds must be >= 0")
    root = Configuration(*root)
    depth = {root: 0}
    order = [root]
    edges = []
    frontier_hit = counter_hit = False
    pending = []  # (vertex, successor) at the step frontier, resolved after BFS
    queue = deque([root])
    while queue:
        v = queue.popleft()
        nxt = step(machine, v)
        if nxt is None:
            continue
        if nxt.m > counter_bound or nxt.n > counter_bound:
            counter_hit = True
            continue
        if depth[v] >= step_bound:
            pending.append((v, nxt))
            continue
        edges.append((v, nxt))
        if nxt not in depth:
            depth[nxt] = depth[v] + 1
            order.append(nxt)
            queue.append(nxt)
    for v, nxt in pending:
        if nxt in depth:
            edges.append((v, nxt))
        else:
            frontier_hit = True
    return ConfigGraph(root, order, edges, frontier_hit, counter_hit, depth)


def transitive_step_closure(machine, root, limit: int = 10_000) -> FrozenSet[Configuration]:
    """Naive fixpoint of single steps (test oracle for finite orbits)."""
    seen = {Configuration(*root)}
    changed = True
    while changed:
        changed = False
        for v in list(seen):
            nxt = step(machine, v)
            if nxt is not None and nxt not in seen:
                seen.add(nxt)
                changed = True
        if len(seen) > limit:
            raise RuntimeError("orbit exceeds limit")
    return frozenset(seen)


def strongly_connected_components(vertices, succ) -> List[List]:
    """Iterative Tarjan; components come out in reverse topological order."""
    index: Dict = {}
    low: Dict = {}
    on_stack = set()
    stack: List = []
    comps: List[List] = []
    counter = 0
    for start in vertices:
        if start in index:
            continue
        work = [(start, iter(succ.get(start, ())))]
        index[start] = low[start] = counter
        counter += 1
        stack.append(start)
        on_stack.add(start)
        while work:
            v, it = work[-1]
            advanced = False
            for w in it:
                if w not in index:
                    index[w] = low[w] = counter
                    counter += 1
                    stack.append(w)
                    on_stack.add(w)
                    work.append((w, iter(succ.get(w, ()))))
                    advanced = True
                    break
                if w in on_stack:
                    low[v] = min(low[v], index[w])
            if advanced:
                continue
            work.pop()
            if work:
                parent = work[-1][0]
                low[parent] = min(low[parent], low[v])
            if low[v] == index[v]:
                comp = []
                while True:
                    w = stack.pop()
                    on_stack.discard(w)
                    comp.append(w)
                    if w == v:
                        break
                comps.append(comp)
    return comps


@dataclass
class ClassQuotient:
    """Mutual-reachability classes of an explored graph, ordered by reachability."""

    classes: List[FrozenSet[Configuration]]
    representative: List[Configuration]
    class_of: Dict[Configuration, int]
    above: List[FrozenSet[int]]  # above[c]: classes reachable from c (reflexive)
    graph: ConfigGraph

    def leq(self, a: int, b: int) -> bool:
        """True when class ``b`` is reachable from class ``a``."""
        return b in self.above[a]

    def index_of(self, c) -> int:
        return self.class_of[Configuration(*c)]

    def reps(self) -> List[Configuration]:
        return list(self.representative)

    def cover_pairs(self) -> List[Tuple[int, int]]:
        """Edge-induced pairs between distinct classes."""
        pairs = set()
        for a, b in self.graph.edges:
            ca, cb = self.class_of[a], self.class_of[b]
            if ca != cb:
                pairs.add((ca, cb))
        return sorted(pairs)


def classes(g: ConfigGraph) -> ClassQuotient:
    succ = g.successors()
    comps = strongly_connected_components(g.vertices, succ)
    comps = sorted((sorted(c) for c in comps), key=lambda c: c[0])
    class_of = {}
    for idx, comp in enumerate(comps):
        for v in comp:
            class_of[v] = idx
    cover: Dict[int, set] = {i: set() for i in range(len(comps))}
    for a, b in g.edges:
        if class_of[a] != class_of[b]:
            cover[class_of[a]].add(class_of[b])
    above: List[Optional[FrozenSet[int]]] = [None] * len(comps)

    def reach(c):
        # condensation is acyclic, so an explicit DFS post-order suffices
        todo = [(c, False)]
        while todo:
            node, done = todo.pop()
            if above[node] is not None:
                continue
            if done:
                acc = {node}
                for nb in cover[node]:
                    acc |= above[nb]
                above[node] = frozenset(acc)
                continue
            todo.append((node, True))
            todo.extend((nb, False) for nb in cover[node] if above[nb] is None)

    for c in range(len(comps)):
        reach(c)
    return ClassQuotient(
        classes=[frozenset(c) for c in comps],
        representative=[c[0] for c in comps],
        class_of=class_of,
        above=list(above),
        graph=g,
    )
