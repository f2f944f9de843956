"""Compare the compiled and pure-Python kernel backends.

    python3 benchmarks/bench_kernels.py [--repeat 3] [--quick]

Each case is timed on a fresh generator with the same key, and the two
backends' outputs are checked for bit-equality before any timing is reported.
"""

import argparse
import sys
import timeit

import numpy as np

from revclt import kernels
from revclt.chain_model import build_chain
from revclt.rng import RngStream


def _cases(quick: bool):
    ex1 = build_chain("example1").kernel
    stable = build_chain("stable", alpha=1.5).kernel
    k = 10 if quick else 1
    return [
        ("regen_sum  example1 n=1e6", "regen_sum", ex1, 10**6 // k),
        ("regen_runs example1 n=1e6", "regen_runs", ex1, 10**6 // k),
        ("regen_blocks stable m=1e6", "regen_blocks", stable, 10**6 // k),
        ("step_sum   example1 n=1e5", "step_sum", ex1, 10**5 // k),
        ("step_path  example1 n=1e5", "step_path", ex1, 10**5 // k),
        ("neumaier_cumsum  1e6", "neumaier_cumsum", None, 10**6 // k),
    ]


def _call(mod, name, kern, n):
    if kern is None:
        x = np.random.default_rng(0).standard_normal(n)
        return lambda: mod.neumaier_cumsum(x)
    kind, shape = kern
    return lambda: getattr(mod, name)(RngStream(1, 0, name).generator(), kind, shape, n)


def _same(a, b) -> bool:
    if isinstance(a, tuple):
        return all(_same(x, y) for x, y in zip(a, b))
    return np.array_equal(np.asarray(a), np.asarray(b))


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=3)
    ap.add_argument("--quick", action="store_true", help="sizes divided by 10")
    args = ap.parse_args(argv)
    if "cython" not in kernels.available_backends():
        print("compiled kernels are not built; nothing to compare", file=sys.stderr)
        return 1
    cy, py = kernels.get_backend("cython"), kernels.get_backend("python")
    print(f"{'case':30s} {'cython s':>10s} {'python s':>10s} {'speedup':>8s}  identical")
    for label, name, kern, n in _cases(args.quick):
        fc, fp = _call(cy, name, kern, n), _call(py, name, kern, n)
        same = _same(fc(), fp())
        tc = min(timeit.repeat(fc, number=1, repeat=args.repeat))
        tp = min(timeit.repeat(fp, number=1, repeat=args.repeat))
        print(f"{label:30s} {tc:10.4f} {tp:10.4f} {tp / tc:8.1f}  {same}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
