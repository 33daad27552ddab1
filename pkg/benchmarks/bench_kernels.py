"""Compare the compiled and pure-Python tape runners on real campaigns.

    python benchmarks/bench_kernels.py [--repeat 3]
"""

import argparse
import itertools
import time

from concatft import _kernels
from concatft.codes import build_rm15, build_steane, concatenate
from concatft.gadgets import GADGET_BUILDERS, build_exrec
from concatft.tape import compile_exrec, encode_cases
from concatft.circuit import enumerate_faults
from concatft.verify import circuit_fault_pairs


def workloads(layout):
    for name in ("T", "CNOT", "S", "EC"):
        exrec = build_exrec(GADGET_BUILDERS[name](layout))
        faults = enumerate_faults(exrec.circuit)
        yield f"{name} single ({len(faults)} cases)", compile_exrec(exrec), encode_cases(exrec.circuit, [[f] for f in faults])
    exrec = build_exrec(GADGET_BUILDERS["T"](layout))
    pairs = list(itertools.islice(circuit_fault_pairs(exrec), 20000))
    yield f"T double ({len(pairs)} cases)", compile_exrec(exrec), encode_cases(exrec.circuit, pairs)


def best_of(fn, repeat):
    best = float("inf")
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn()
        best = min(best, time.perf_counter() - t0)
    return best, out


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args()
    layout = concatenate(build_steane(), build_rm15())
    compiled = _kernels.run_batch if _kernels.BACKEND == "cython" else None
    print(f"compiled backend available: {compiled is not None}")
    print(f"{'workload':32s} {'python s':>10s} {'cython s':>10s} {'speedup':>8s}")
    for label, tape, batch in workloads(layout):
        tp, (fp, kp) = best_of(lambda: _kernels.run_batch_python(tape, batch), args.repeat)
        if compiled is None:
            print(f"{label:32s} {tp:10.3f} {'-':>10s} {'-':>8s}")
            continue
        tc, (fc, kc) = best_of(lambda: compiled(tape, batch), args.repeat)
        assert (fp == fc).all() and (kp == kc).all(), "backends disagree"
        print(f"{label:32s} {tp:10.3f} {tc:10.4f} {tp / tc:8.1f}x")


if __name__ == "__main__":
    main()
