"""Verification campaigns: each step of the construction as a grid of checks.

Every campaign returns a VerificationReport whose entries are one of
``pass``, ``fail``, ``unknown`` (budget ran out), ``inconclusive`` (the
bounded exploration cannot decide the instance) or ``refused`` (the
instance lies in the truncation margin).  Failing entries carry a
reproducer command line.
"""
from __future__ import annotations

import os
import shlex
import time
from dataclasses import dataclass, field
from importlib import resources
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

from . import encoding as enc
from . import ipc
from .formula import Formula
from .kripke import DEFAULT_CV_BUDGET, countervaluation
from .machine_model import MachineModel, TruncationParams, build
from .minsky import DEC1, DEC2, INC1, INC2, Configuration, MinskyMachine, parse_machine, step

BUDGET_ENV = "SUPERINT_BUDGET"

PASS, FAIL, UNKNOWN, INCONCLUSIVE, REFUSED = "pass", "fail", "unknown", "inconclusive", "refused"

# shipped sample machines and their initial configurations
FIXTURES: Dict[str, Tuple[str, Configuration]] = {
    "cycle": ("cycle.mm", Configuration(0, 0, 0)),
    "transfer": ("transfer.mm", Configuration(0, 2, 0)),
    "chain": ("chain.mm", Configuration(0, 0, 0)),
}


def fixture(name: str) -> Tuple[MinskyMachine, Configuration]:
    fname, init = FIXTURES[name]
    text = resources.files("superint").joinpath("fixtures", fname).read_text()
    return parse_machine(text), init


def budget(default: int) -> int:
    """The default budget, unless the environment overrides all budgets."""
    raw = os.environ.get(BUDGET_ENV)
    return int(raw) if raw else default


@dataclass
class Entry:
    instance: str
    verdict: str
    millis: float
    detail: str = ""
    reproducer: str = ""


@dataclass
class VerificationReport:
    tag: str
    grid: Dict[str, object] = field(default_factory=dict)
    entries: List[Entry] = field(default_factory=list)

    def add(self, instance: str, verdict: str, millis: float, detail: str = "", reproducer: str = ""):
        if verdict == FAIL and not reproducer:
            raise ValueError("fail entries need a reproducer")
        self.entries.append(Entry(instance, verdict, millis, detail, reproducer))

    def count(self, verdict: str) -> int:
        return sum(e.verdict == verdict for e in self.entries)

    @property
    def ok(self) -> bool:
        return self.count(FAIL) == 0 and self.count(UNKNOWN) == 0 and self.count(INCONCLUSIVE) == 0

    def failures(self) -> List[Entry]:
        return [e for e in self.entries if e.verdict == FAIL]

    def exit_code(self) -> int:
        if self.count(FAIL):
            return 1
        if self.count(UNKNOWN) or self.count(INCONCLUSIVE):
            return 3
        return 0

    def lines(self) -> List[str]:
        out = []
        for e in self.entries:
            row = [self.tag, e.instance, e.verdict, f"{e.millis:.1f}", e.detail]
            if e.reproducer:
                row.append(e.reproducer)
            out.append("\t".join(row))
        return out

    def summary(self) -> str:
        parts = [f"{v}={self.count(v)}" for v in (PASS, FAIL, UNKNOWN, INCONCLUSIVE, REFUSED) if self.count(v)]
        total = sum(e.millis for e in self.entries) / 1000
        return f"{self.tag}: {len(self.entries)} instances, {', '.join(parts) or 'empty'}, {total:.2f}s"

    def write(self, path: str):
        with open(path, "w") as fh:
            fh.write("\n".join(self.lines()) + "\n")


def merge(tag: str, reports: Iterable[VerificationReport]) -> VerificationReport:
    out = VerificationReport(tag)
    for r in reports:
        for e in r.entries:
            out.entries.append(Entry(f"{r.tag}:{e.instance}", e.verdict, e.millis, e.detail, e.reproducer))
    return out


class _Timer:
    def __enter__(self):
        self.t0 = time.perf_counter()
        return self

    def __exit__(self, *exc):
        self.ms = (time.perf_counter() - self.t0) * 1000


def _machine_args(label: str, init, params: TruncationParams) -> str:
    s, m, n = init
    return (f"{shlex.quote(label)} {s} {m} {n} --imax {params.imax} --steps {params.step_bound} "
            f"--counters {params.counter_bound} --margin {params.margin}")


def _cmd(*words) -> str:
    return "superint " + " ".join(str(w) for w in words)


def _verdict(v) -> Tuple[str, str]:
    if v.status == "proved":
        ipc.replay_verdict(v)
        return PASS, "proved, replayed"
    if v.status == "refuted":
        return FAIL, f"refuted by a {len(v.countermodel.frame)}-point model at {v.witness}"
    return UNKNOWN, f"budget exhausted after {v.spent}"


def _mask_sample(model: MachineModel, mask: int, limit: int = 4) -> str:
    pts = model.frame.labels(mask)
    return " ".join(str(p) for p in pts[:limit]) + (" ..." if len(pts) > limit else "")


# ---------------------------------------------------------------------------
# chain and code refuters

def verify_semantic(machine: MinskyMachine, init, params: TruncationParams = TruncationParams(),
                    label: str = "machine", model: Optional[MachineModel] = None,
                    families: bool = True, codes: bool = True) -> VerificationReport:
    """Refuters of every chain formula and every explored code against down-sets."""
    model = model or build(machine, init, params)
    params = model.params
    rep = VerificationReport("semantic", {"machine": label, "init": tuple(init), "params": params})
    repro = _cmd("verify semantic", _machine_args(label, init, params))

    def check(name, f, point):
        with _Timer() as t:
            got = model.model.refuters_mask(f)
            want = model.frame.downset(point)
        if got == want:
            rep.add(name, PASS, t.ms)
            return
        extra, missing = got & ~want, want & ~got
        detail = []
        if extra:
            detail.append(f"refuted outside down-set({point}): {_mask_sample(model, extra)}")
        if missing:
            detail.append(f"forced inside down-set({point}): {_mask_sample(model, missing)}")
        rep.add(name, FAIL, t.ms, "; ".join(detail), repro)

    if families:
        from .machine_model import a_pt, b_pt
        for j in (0, 1, 2):
            for i in range(-4, params.imax + 1):
                for kind in ("A", "B"):
                    name = f"{kind}({i},{j})"
                    if i > params.zone_max:
                        rep.add(name, REFUSED, 0.0, f"inside the truncation margin (zone ends at {params.zone_max})")
                        continue
                    pt = a_pt(i, j) if kind == "A" else b_pt(i, j)
                    check(name, enc.chain_formula(kind, i, j), pt)
    if codes:
        for c in sorted(model.graph.vertices):
            name = f"E{c}"
            if not model.in_zone(("E",) + tuple(c)):
                rep.add(name, REFUSED, 0.0, "code reaches into the truncation margin")
                continue
            check(name, enc.e_code(*c), model.e_point(c))
    return rep


# ---------------------------------------------------------------------------
# Int equivalences

def verify_keyformulas(k_max: int = 3, index_range: Sequence[int] = (-1, 0, 1, 2),
                       prover_budget: Optional[int] = None, scramble: bool = False) -> VerificationReport:
    """Key-formula equivalences for m in {1,2}, k in 1..k_max, i, j in range.

    ``scramble`` pairs F with the B-chain and G with the A-chain; it exists
    to show the check can fail.
    """
    if k_max < 1:
        raise ValueError("k_max must be >= 1")
    b = prover_budget or budget(ipc.DEFAULT_BUDGET)
    rep = VerificationReport("keyformulas", {"k_max": k_max, "range": tuple(index_range), "budget": b})
    ks = sorted(set(range(1, k_max + 1)) | {1, 2})
    rng = ",".join(str(i) for i in index_range)
    for letter in ("F", "G"):
        for m in (1, 2):
            for k in ks:
                for i in index_range:
                    for j in index_range:
                        lhs = enc.key_formula(letter, k, m, i, j)
                        tgt = enc.key_target(letter, k, m, i, j)
                        if scramble:
                            tgt = enc.key_target("G" if letter == "F" else "F", k, m, i, j)
                        with _Timer() as t:
                            verdict, detail = _verdict(ipc.prove_equiv(lhs, tgt, budget=b))
                        repro = _cmd("verify keyformulas --kmax", max(ks), "--range", rng, "--budget", b,
                                     "--scramble" if scramble else "")
                        rep.add(f"{letter}^{m}_{k}[P({i},{j}),Q({i},{j})]", verdict, t.ms, detail,
                                repro.strip() if verdict == FAIL else "")
    return rep


def equivalence_cases(s: int, m: int, n: int) -> List[Tuple[str, Formula]]:
    """Every admissible right-hand side of the code equivalence for (s, m, n)."""
    out = []
    for i in range(1, m + 2):
        for j in range(1, n + 2):
            out.append((f"general(i={i},j={j})", enc.equivalence_form(s, m, n, i, j)))
    if m == 0 and n >= 1:
        out.append(("m=0", enc.equivalence_form(s, m, n)))
    if m >= 1 and n == 0:
        out.append(("n=0", enc.equivalence_form(s, m, n)))
    if m == 0 and n == 0:
        out.append(("m=n=0", enc.equivalence_form(s, m, n)))
    return out


def verify_equivalence(s_max: int = 1, m_max: int = 2, n_max: int = 2,
                       prover_budget: Optional[int] = None) -> VerificationReport:
    b = prover_budget or budget(ipc.DEFAULT_BUDGET)
    rep = VerificationReport("equivalence", {"s_max": s_max, "m_max": m_max, "n_max": n_max, "budget": b})
    for s in range(s_max + 1):
        for m in range(m_max + 1):
            for n in range(n_max + 1):
                code = enc.e_code(s, m, n)
                for case, rhs in equivalence_cases(s, m, n):
                    with _Timer() as t:
                        verdict, detail = _verdict(ipc.prove_equiv(code, rhs, budget=b))
                    repro = _cmd("verify equivalence --smax", s_max, "--mmax", m_max, "--nmax", n_max, "--budget", b)
                    rep.add(f"E({s},{m},{n}) {case}", verdict, t.ms, detail, repro if verdict == FAIL else "")
    return rep


# ---------------------------------------------------------------------------
# instruction axioms

def _reduced(machine, init, params: TruncationParams, imax: int = 10) -> TruncationParams:
    """The smaller frame-tier truncation: imax 10, or the least the exploration allows."""
    from .minsky import reach_graph
    g = reach_graph(machine, init, params.step_bound, params.counter_bound)
    need = max(max(3 * c.s + 2, c.m + 1, c.n + 1) for c in g.vertices) + params.margin
    return TruncationParams(max(imax, need), params.step_bound, params.counter_bound, params.margin)


def verify_axiom(machine: MinskyMachine, init, params: TruncationParams = TruncationParams(),
                 cv_budget: Optional[int] = None, label: str = "machine",
                 frame_params: Optional[TruncationParams] = None, engine: Optional[str] = None,
                 model: Optional[MachineModel] = None, frame_model: Optional[MachineModel] = None,
                 kinds: Optional[Sequence[str]] = None) -> VerificationReport:
    """Model tier on the full truncation, frame tier on ``frame_params`` (default imax=10).

    ``model`` / ``frame_model`` let a caller supply prebuilt (possibly
    mismatched) models; ``kinds`` restricts the frame tier to some opcodes.
    """
    b = cv_budget or budget(DEFAULT_CV_BUDGET)
    model = model or build(machine, init, params)
    if frame_model is None:
        fp = frame_params or _reduced(machine, init, params)
        frame_model = build(machine, init, fp)
    rep = VerificationReport("axiom", {"machine": label, "init": tuple(init), "params": model.params,
                                       "frame_params": frame_model.params, "budget": b})
    repro = _cmd("verify axiom", _machine_args(label, init, model.params),
                 "--frame-imax", frame_model.params.imax, "--budget", b)
    for s in machine.states():
        ins = machine[s]
        ax = enc.ax_instruction(ins)
        with _Timer() as t:
            bad = model.model.refuters_mask(ax)
        if bad:
            rep.add(f"model[{ins}]", FAIL, t.ms, f"refuted at {_mask_sample(model, bad)}", repro)
        else:
            rep.add(f"model[{ins}]", PASS, t.ms)
    for s in machine.states():
        ins = machine[s]
        if kinds is not None and ins.op not in kinds:
            continue
        with _Timer() as t:
            res = countervaluation(frame_model.frame, enc.ax_instruction(ins), b, engine=engine)
        name = f"frame[{ins}]"
        if res.status == "none":
            rep.add(name, PASS, t.ms, f"no countervaluation ({len(frame_model.frame)} points)")
        elif res.status == "found":
            rep.add(name, FAIL, t.ms, f"countervaluation refutes it at {res.witness}", repro)
        else:
            rep.add(name, UNKNOWN, t.ms, f"search budget {b} exhausted")
    return rep


# ---------------------------------------------------------------------------
# the reduction

def step_certificate(machine: MinskyMachine, c: Configuration) -> Tuple[Formula, Dict[str, Formula]]:
    """Axiom and substitution that carry code(step(c)) -> code(c)."""
    ins = machine[c.s]
    s, m, n = c
    if ins.op in (INC1, INC2):
        return enc.ax_instruction(ins), enc.pq_substitution(m - 1, n - 1)
    if ins.op == DEC1:
        if m > 0:
            return enc.ax_instruction(ins), enc.pq_substitution(m - 2, n - 1)
        return enc.ax_instruction(ins), {"q": enc.a_formula(n, 2) | enc.b_formula(n, 2)}
    if ins.op == DEC2:
        if n > 0:
            return enc.ax_instruction(ins), enc.pq_substitution(m - 1, n - 2)
        return enc.ax_instruction(ins), {"p": enc.a_formula(m, 1) | enc.b_formula(m, 1)}
    raise ValueError(f"unknown instruction {ins}")  # pragma: no cover


def _path(model: MachineModel, target: Configuration) -> List[Configuration]:
    succ = model.graph.successors()
    prev = {model.init: None}
    queue = [model.init]
    for v in queue:
        if v == target:
            break
        for w in succ[v]:
            if w not in prev:
                prev[w] = v
                queue.append(w)
    path = [target]
    while prev[path[-1]] is not None:
        path.append(prev[path[-1]])
    return path[::-1]


def _params_for(params: TruncationParams, target: Configuration) -> TruncationParams:
    need = max(3 * target.s + 2, target.m + 1, target.n + 1) + params.margin
    if params.imax >= need:
        return params
    return TruncationParams(need, params.step_bound, params.counter_bound, params.margin)


def verify_reduction(machine: MinskyMachine, init, target, params: TruncationParams = TruncationParams(),
                     prover_budget: Optional[int] = None, label: str = "machine",
                     model: Optional[MachineModel] = None) -> VerificationReport:
    """Forward certificate when the target is explored, model refutation otherwise.

    The truncation is widened so the target's code lies in the verified zone.
    """
    init, target = Configuration(*init), Configuration(*target)
    b = prover_budget or budget(ipc.DEFAULT_BUDGET)
    params = _params_for(params, target)
    if model is None:
        try:
            model = build(machine, init, params)
        except ValueError:
            # the explored configurations may need a wider truncation still
            probe = build(machine, init, TruncationParams(200, params.step_bound, params.counter_bound,
                                                          params.margin))
            need = max(max(3 * c.s + 2, c.m + 1, c.n + 1) for c in probe.graph.vertices) + params.margin
            params = TruncationParams(max(need, params.imax), params.step_bound, params.counter_bound,
                                      params.margin)
            model = build(machine, init, params)
    rep = VerificationReport("reduction", {"machine": label, "init": tuple(init), "target": tuple(target),
                                           "params": model.params, "budget": b})
    repro = _cmd("verify reduction", _machine_args(label, init, model.params), "--target",
                 *target, "--budget", b)
    goal = enc.e_code(*target) >> enc.e_code(*init)
    if model.graph.reachable(target):
        path = _path(model, target)
        total = 0.0
        for c, nxt in zip(path, path[1:]):
            if step(machine, c) != nxt:  # pragma: no cover - guarded by the graph
                raise AssertionError("exploration edge disagrees with step()")
            axiom, inst = step_certificate(machine, c)
            with _Timer() as t:
                v = ipc.check_certificate(axiom, [inst], enc.e_code(*nxt) >> enc.e_code(*c), budget=b)
                verdict, detail = _verdict(v)
            total += t.ms
            rep.add(f"forward step {c}->{nxt}", verdict, t.ms, f"{machine[c.s]}: {detail}",
                    repro if verdict == FAIL else "")
        if len(path) == 1:
            with _Timer() as t:
                verdict, detail = _verdict(ipc.prove(goal, budget=b))
            rep.add(f"forward {target}", verdict, t.ms, "empty certificate: " + detail, repro if verdict == FAIL else "")
        # information only: whether the goal needs the axioms at all
        with _Timer() as t:
            bare = ipc.prove(goal, budget=b, minimize=False).status
        rep.grid["goal_without_axioms"] = bare
        return rep
    if model.graph.truncated:
        rep.add(f"backward {target}", INCONCLUSIVE, 0.0,
                "target not explored and the exploration was truncated")
        return rep
    e0 = model.e_point(init)
    with _Timer() as t:
        refuted = not model.model.force(e0, goal)
    if refuted:
        rep.add(f"backward {target}", PASS, t.ms, f"refuted at {e0}")
    else:
        bad = model.model.refuters_mask(goal)
        where = _mask_sample(model, bad) if bad else "nowhere"
        rep.add(f"backward {target}", FAIL, t.ms, f"not refuted at {e0} (refuted {where})", repro)
    return rep


# ---------------------------------------------------------------------------
# refuters of key codes

def semantic3_instances(s_max: int, i_max: int = 2) -> List[Tuple[int, object, object]]:
    out = []
    for s in range(s_max + 1):
        for i in range(1, i_max + 1):
            for j in range(1, i_max + 1):
                out.append((s, i, j))
        out += [(s, 0, enc.STAR), (s, enc.STAR, 0), (s, 0, 0)]
    return out


def verify_semantic3(machine: MinskyMachine, init, params: TruncationParams = TruncationParams(),
                     label: str = "machine", model: Optional[MachineModel] = None,
                     s_max: Optional[int] = None, i_max: int = 2) -> VerificationReport:
    """Every point refuting a key code lies below a suitable explored e-point."""
    model = model or build(machine, init, params)
    params = model.params
    if s_max is None:
        s_max = max([c.s for c in model.graph.vertices] + list(machine.states()) + [0]) + 1
    rep = VerificationReport("semantic3", {"machine": label, "init": tuple(init), "params": params,
                                           "s_max": s_max, "i_max": i_max})
    repro = _cmd("verify semantic3", _machine_args(label, init, params), "--smax", s_max, "--imax-code", i_max)
    fr = model.frame
    for s, i, j in semantic3_instances(s_max, i_max):
        name = f"Ehat({s},{i},{j})"
        lo_m, lo_n = enc.phi(i), enc.phi(j)
        idx = max(3 * s + 2, (i if i != enc.STAR else 0) + 2, (j if j != enc.STAR else 0) + 2)
        if idx > params.zone_max:
            rep.add(name, REFUSED, 0.0, "indices reach into the truncation margin")
            continue
        with _Timer() as t:
            bad = model.model.refuters_mask(enc.e_hat_any(s, i, j))
            allowed = 0
            for c in model.graph.vertices:
                if c.s == s and c.m >= lo_m and c.n >= lo_n:
                    allowed |= fr.downset(model.e_point(c))
        stray = bad & ~allowed
        if stray:
            rep.add(name, FAIL, t.ms, f"refuted at {_mask_sample(model, stray)} outside every admissible e-point",
                    repro)
        else:
            rep.add(name, PASS, t.ms, f"{bin(bad).count('1')} refuting points")
    return rep


__all__ = [
    "VerificationReport", "Entry", "FIXTURES", "fixture", "budget", "merge",
    "verify_semantic", "verify_keyformulas", "verify_equivalence", "equivalence_cases",
    "verify_axiom", "verify_reduction", "step_certificate", "verify_semantic3", "semantic3_instances",
    "PASS", "FAIL", "UNKNOWN", "INCONCLUSIVE", "REFUSED", "BUDGET_ENV",
]
