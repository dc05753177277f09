"""Compare the compiled kernels with the pure-Python fallback.

Usage: python benchmarks/bench_kernels.py [--repeat N]

Workloads: extensions of every chain formula and code on a full
truncation, extensions on a large random frame, bound propagation over
random partial valuations, and one end-to-end prover call run in a
subprocess per backend.
"""
import argparse
import os
import random
import subprocess
import sys
import timeit

from superint import _pykernels, encoding as enc, harness, kernels
from superint.formula import postorder, variables
from superint.machine_model import TruncationParams, build

E2E = ("import time; from superint import encoding as enc, ipc; t = time.perf_counter(); "
       "v = ipc.prove_equiv(enc.key_formula('F', 3, 2, 2, 2), enc.key_target('F', 3, 2, 2, 2)); "
       "print(v.status, time.perf_counter() - t)")


def extension_workload(impl):
    m, init = harness.fixture("transfer")
    mm = build(m, init, TruncationParams(imax=20))
    forms = [enc.chain_formula(k, i, j) for k in "AB" for j in range(3) for i in range(-4, 19)]
    forms += [enc.e_code(*c) for c in mm.graph.vertices]
    nodes = []
    seen = set()
    for f in forms:
        for n in postorder(f):
            if n not in seen:
                seen.add(n)
                nodes.append(n)
    frame, val = mm.frame, dict(mm.model.valuation)

    def go():
        impl.extend_extensions(nodes, {}, frame, val)
    return go, f"{len(nodes)} nodes on {len(frame)} points"


def large_frame_workload(impl):
    from superint.kripke import closure
    rng = random.Random(0)
    n = 3000
    fr = closure([(i, j) for i in range(n) for j in range(i + 1, min(n, i + 6)) if rng.random() < 0.5],
                 list(range(n)))
    val = {v: fr.up_closure(rng.getrandbits(n)) for v in "pqr"}
    nodes = postorder(enc.e_code(1, 2, 2))

    def go():
        impl.extend_extensions(nodes, {}, fr, val)
    return go, f"{len(nodes)} nodes on {n} random points"


def bounds_workload(impl):
    m, init = harness.fixture("cycle")
    mm = build(m, init, TruncationParams(imax=10))
    fr = mm.frame
    f = enc.ax_instruction(m[0])
    names = sorted(variables(f))
    prog = kernels.compile_formula(f, names)
    rng = random.Random(0)
    cases = []
    for _ in range(50):
        lo = [fr.up_closure(rng.getrandbits(fr.size) & rng.getrandbits(fr.size)) for _ in names]
        cases.append((lo, [l | fr.up_closure(rng.getrandbits(fr.size)) for l in lo]))

    def go():
        for lo, hi in cases:
            impl.formula_bounds(prog, fr, lo, hi)
    return go, f"50 bound evaluations, {len(postorder(f))} nodes on {len(fr)} points"


def end_to_end(pure):
    env = dict(os.environ)
    if pure:
        env["SUPERINT_PURE_PYTHON"] = "1"
    out = subprocess.run([sys.executable, "-c", E2E], env=env, capture_output=True, text=True, check=True)
    status, secs = out.stdout.split()
    return status, float(secs)


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5)
    a = ap.parse_args(argv)
    if kernels.compiled is None:
        print("compiled extension not importable; nothing to compare")
        return 1
    print(f"{'workload':<12} {'python s':>10} {'compiled s':>11} {'speedup':>8}  size")
    for name, make in (("extensions", extension_workload), ("big frame", large_frame_workload),
                       ("bounds", bounds_workload)):
        py_fn, size = make(_pykernels)
        c_fn, _ = make(kernels.compiled)
        py = min(timeit.repeat(py_fn, number=1, repeat=a.repeat))
        cc = min(timeit.repeat(c_fn, number=1, repeat=a.repeat))
        print(f"{name:<12} {py:>10.4f} {cc:>11.4f} {py / cc:>7.1f}x  {size}")
    s1, py = end_to_end(True)
    s2, cc = end_to_end(False)
    assert s1 == s2
    print(f"{'prover':<12} {py:>10.4f} {cc:>11.4f} {py / cc:>7.1f}x  key-formula equivalence ({s1})")
    return 0


if __name__ == "__main__":
    sys.exit(main())
