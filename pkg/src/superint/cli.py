"""Command-line front end.

Exit codes: 0 success / proved / all checks pass, 1 refuted / a check
failed, 2 usage or input error, 3 budget exhausted or inconclusive.
"""
from __future__ import annotations

import argparse
import os
import sys
from typing import List, Optional

from . import encoding as enc
from . import harness, ipc, kripke, minsky
from .formula import FormulaSyntaxError, dag_size, parse, to_text, tree_size
from .machine_model import TruncationParams, build, parse_point_id


def _formula_arg(text: str):
    """A literal formula, or the contents of a file holding one."""
    if os.path.isfile(text):
        with open(text) as fh:
            text = fh.read()
    return parse(text)


def _machine_arg(text: str):
    if os.path.isfile(text):
        with open(text) as fh:
            return minsky.parse_machine(fh.read())
    if text in harness.FIXTURES:
        return harness.fixture(text)[0]
    raise FileNotFoundError(f"no machine file or fixture named {text!r}")


def _read_model(path: str) -> kripke.KripkeModel:
    with open(path) as fh:
        return kripke.load_model(fh.read())


def _write(path: Optional[str], text: str):
    if path is None or path == "-":
        sys.stdout.write(text)
    else:
        with open(path, "w") as fh:
            fh.write(text)


def _params(a) -> TruncationParams:
    return TruncationParams(a.imax, a.steps, a.counters, a.margin)


def _add_trunc(p, steps=6):
    p.add_argument("--imax", type=int, default=20)
    p.add_argument("--steps", type=int, default=steps)
    p.add_argument("--counters", type=int, default=8)
    p.add_argument("--margin", type=int, default=2)


def _add_machine(p):
    p.add_argument("machine", help="machine file or fixture name (cycle, transfer, chain)")
    for c in "smn":
        p.add_argument(c, type=int)


def _int_or_star(x: str):
    return enc.STAR if x == "*" else int(x)


# ---------------------------------------------------------------------------

def cmd_prove(a) -> int:
    goal = _formula_arg(a.formula)
    b = a.budget if a.budget is not None else harness.budget(ipc.DEFAULT_BUDGET)
    v = ipc.prove(goal, budget=b, engine=a.engine)
    if v.status == "proved":
        print("proved")
        if a.trace:
            for line in v.trace:
                print("  " + line)
        return 0
    if v.status == "refuted":
        print(f"refuted at {v.witness} in a {len(v.countermodel.frame)}-point model")
        if a.emit_countermodel:
            _write(a.emit_countermodel, kripke.dump_model(v.countermodel))
        return 1
    print(f"unknown (budget {v.spent} spent)")
    return 3


def cmd_minsky_run(a) -> int:
    m = _machine_arg(a.machine)
    for c in minsky.run(m, minsky.Configuration(a.s, a.m, a.n), a.steps):
        print(c)
    return 0


def cmd_minsky_classes(a) -> int:
    m = _machine_arg(a.machine)
    g = minsky.reach_graph(m, minsky.Configuration(a.s, a.m, a.n), a.steps, a.counters)
    q = minsky.classes(g)
    for k, members in enumerate(q.classes):
        print(f"[{q.representative[k]}] " + " ".join(str(c) for c in sorted(members)))
    for x, y in q.cover_pairs():
        print(f"[{q.representative[x]}] -> [{q.representative[y]}]")
    if g.truncated:
        flags = [n for n, on in (("steps", g.step_truncated), ("counters", g.counter_truncated)) if on]
        print("truncated: " + ",".join(flags))
    return 0


def _print_formula(f, stats: bool):
    print(to_text(f))
    if stats:
        print(f"dag_size={dag_size(f)} tree_size={tree_size(f)}", file=sys.stderr)


def cmd_encode_config(a) -> int:
    _print_formula(enc.e_code(a.s, a.m, a.n), a.stats)
    return 0


def cmd_encode_axiom(a) -> int:
    _print_formula(enc.ax_machine(_machine_arg(a.machine)), a.stats)
    return 0


def cmd_encode_family(a) -> int:
    idx = [_int_or_star(x) for x in a.indices]
    _print_formula(enc.family(a.name, *idx), a.stats)
    return 0


def cmd_model_build(a) -> int:
    mm = build(_machine_arg(a.machine), (a.s, a.m, a.n), _params(a))
    _write(a.output, kripke.dump_model(mm.model))
    return 0


def _point(model: kripke.KripkeModel, text: str):
    if text in model.frame.index:
        return text
    try:
        norm = str(parse_point_id(text))
    except ValueError:
        norm = text
    if norm in model.frame.index:
        return norm
    raise KeyError(f"unknown point {text!r}")


def cmd_model_eval(a) -> int:
    model = _read_model(a.model)
    forced = model.force(_point(model, a.point), parse(a.formula))
    print("forced" if forced else "refuted")
    return 0 if forced else 1


def cmd_model_refuters(a) -> int:
    model = _read_model(a.model)
    for p in model.frame.labels(model.refuters_mask(parse(a.formula))):
        print(p)
    return 0


def cmd_export_dot(a) -> int:
    model = _read_model(a.model)
    f = parse(a.formula) if a.formula else None
    _write(a.output, kripke.to_dot(model, f))
    return 0


def _report(a, rep: harness.VerificationReport) -> int:
    if a.report:
        rep.write(a.report)
    if a.verbose:
        for line in rep.lines():
            print(line)
    else:
        for e in rep.failures():
            print(f"FAIL {e.instance}: {e.detail}\n  reproduce: {e.reproducer}")
    print(rep.summary())
    return rep.exit_code()


def cmd_verify(a) -> int:
    kind = a.campaign
    if kind == "keyformulas":
        rng = [int(x) for x in a.range.split(",")]
        rep = harness.verify_keyformulas(a.kmax, rng, a.budget, scramble=a.scramble)
    elif kind == "equivalence":
        rep = harness.verify_equivalence(a.smax, a.mmax, a.nmax, a.budget)
    else:
        m = _machine_arg(a.machine)
        init = (a.s, a.m, a.n)
        p = _params(a)
        if kind == "semantic":
            rep = harness.verify_semantic(m, init, p, label=a.machine)
        elif kind == "semantic3":
            rep = harness.verify_semantic3(m, init, p, label=a.machine, s_max=a.smax, i_max=a.imax_code)
        elif kind == "axiom":
            fp = None
            if a.frame_imax is not None:
                fp = TruncationParams(a.frame_imax, a.steps, a.counters, a.margin)
            rep = harness.verify_axiom(m, init, p, a.budget, label=a.machine, frame_params=fp,
                                       engine=a.engine)
        else:
            rep = harness.verify_reduction(m, init, tuple(a.target), p, a.budget, label=a.machine)
    return _report(a, rep)


# ---------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="superint", description=__doc__.splitlines()[0])
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("prove", help="decide Int-derivability of a formula")
    p.add_argument("formula", help="formula literal or file")
    p.add_argument("--budget", type=int, help=f"default {ipc.DEFAULT_BUDGET}, or ${harness.BUDGET_ENV}")
    p.add_argument("--engine", choices=ipc.ENGINES, default="intuit")
    p.add_argument("--emit-countermodel", metavar="PATH")
    p.add_argument("--trace", action="store_true", help="print the proof trace")
    p.set_defaults(fn=cmd_prove)

    p = sub.add_parser("minsky", help="run machines and list configuration classes")
    ms = p.add_subparsers(dest="action", required=True)
    q = ms.add_parser("run")
    _add_machine(q)
    q.add_argument("--steps", type=int, default=10)
    q.set_defaults(fn=cmd_minsky_run)
    q = ms.add_parser("classes")
    _add_machine(q)
    q.add_argument("--steps", type=int, default=6)
    q.add_argument("--counters", type=int, default=8)
    q.set_defaults(fn=cmd_minsky_classes)

    p = sub.add_parser("encode", help="print generated formulas")
    es = p.add_subparsers(dest="action", required=True)
    q = es.add_parser("config")
    for c in "smn":
        q.add_argument(c, type=int)
    q.set_defaults(fn=cmd_encode_config)
    q = es.add_parser("axiom")
    q.add_argument("machine")
    q.set_defaults(fn=cmd_encode_axiom)
    q = es.add_parser("family")
    q.add_argument("name", help="A, B, C1, C2, E, F, G, P, Q, S, T or Ehat")
    q.add_argument("indices", nargs="*", help="indices; '*' allowed for Ehat")
    q.set_defaults(fn=cmd_encode_family)
    for q in es.choices.values():
        q.add_argument("--stats", action="store_true", help="print dag/tree sizes to stderr")

    p = sub.add_parser("model", help="build and query truncated models")
    mo = p.add_subparsers(dest="action", required=True)
    q = mo.add_parser("build")
    _add_machine(q)
    _add_trunc(q)
    q.add_argument("-o", "--output", default="-")
    q.set_defaults(fn=cmd_model_build)
    q = mo.add_parser("eval")
    q.add_argument("model")
    q.add_argument("--point", required=True)
    q.add_argument("--formula", required=True)
    q.set_defaults(fn=cmd_model_eval)
    q = mo.add_parser("refuters")
    q.add_argument("model")
    q.add_argument("--formula", required=True)
    q.set_defaults(fn=cmd_model_refuters)

    p = sub.add_parser("export", help="export a model")
    ex = p.add_subparsers(dest="action", required=True)
    q = ex.add_parser("dot")
    q.add_argument("model")
    q.add_argument("-o", "--output", default="-")
    q.add_argument("--formula", help="double-circle the points refuting this formula")
    q.set_defaults(fn=cmd_export_dot)

    p = sub.add_parser("verify", help="run a verification campaign")
    vs = p.add_subparsers(dest="campaign", required=True)
    for name in ("semantic", "semantic3", "axiom", "reduction"):
        q = vs.add_parser(name)
        _add_machine(q)
        _add_trunc(q)
    vs.choices["semantic3"].add_argument("--smax", type=int)
    vs.choices["semantic3"].add_argument("--imax-code", type=int, default=2)
    vs.choices["axiom"].add_argument("--frame-imax", type=int)
    vs.choices["axiom"].add_argument("--budget", type=int)
    vs.choices["axiom"].add_argument("--engine", choices=("sat", "backtrack"))
    vs.choices["reduction"].add_argument("--target", type=int, nargs=3, required=True, metavar=("T", "K", "L"))
    vs.choices["reduction"].add_argument("--budget", type=int)
    q = vs.add_parser("keyformulas")
    q.add_argument("--kmax", type=int, default=3)
    q.add_argument("--range", default="-1,0,1,2")
    q.add_argument("--budget", type=int)
    q.add_argument("--scramble", action="store_true", help="pair F with B and G with A (must fail)")
    q = vs.add_parser("equivalence")
    q.add_argument("--smax", type=int, default=1)
    q.add_argument("--mmax", type=int, default=2)
    q.add_argument("--nmax", type=int, default=2)
    q.add_argument("--budget", type=int)
    for q in vs.choices.values():
        q.add_argument("--report", metavar="PATH", help="write the line-format report")
        q.add_argument("-v", "--verbose", action="store_true", help="print every result line")
        q.set_defaults(fn=cmd_verify)
    return ap


def main(argv: Optional[List[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.fn(args)
    except (FormulaSyntaxError, minsky.MachineSyntaxError, kripke.ModelFormatError,
            FileNotFoundError, KeyError, ValueError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 2
    except BrokenPipeError:
        # output piped into e.g. head; silence the flush at interpreter exit
        os.dup2(os.open(os.devnull, os.O_WRONLY), sys.stdout.fileno())
        return 1


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
