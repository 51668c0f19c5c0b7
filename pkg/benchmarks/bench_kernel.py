"""Compare the compiled and pure-Python reduction kernels on Groebner bases.

    python3 benchmarks/bench_kernel.py [--repeat 3] [--json out.json]

Both backends must return the same reduced basis; the script exits nonzero
if they ever disagree.
"""

import argparse
import json
import sys
import time

from kmunproj import kernel
from kmunproj.grobner import Ideal, groebner_basis
from kmunproj.poly import GradedRing
from kmunproj.singularity import singular_scheme
from kmunproj.unprojection import codim2_instance, codim3_instance


def cases():
    R5 = GradedRing.standard((1,) * 5)
    R6 = GradedRing.standard((1,) * 5 + (2,))
    quintic = codim2_instance(R5, (1, 1), 5, 1)
    ex6 = codim3_instance(R6, (2, 2, 2), (3, 4), 1)
    d31 = codim2_instance(R5, (3, 1), 5, 1)
    return {
        "X_{3,4} containing D_{2,2,2}": ex6.x_generators,
        "Y, unprojection of D_{2,2,2}": ex6.generators,
        "Y from D_{3,1} in a quintic": d31.generators,
        "Y from a plane in a quintic": quintic.generators,
        "singular scheme, quintic+plane": singular_scheme(Ideal(R5, quintic.x_generators), 1).generators,
        "singular scheme, X_{3,4}": singular_scheme(Ideal(R6, ex6.x_generators), 2).generators,
    }


def run(gens, backend, repeat):
    best, basis = float("inf"), None
    for _ in range(repeat):
        t0 = time.perf_counter()
        basis = groebner_basis(gens, backend=backend)
        best = min(best, time.perf_counter() - t0)
    return best, basis


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=3)
    ap.add_argument("--json", help="write timings here")
    args = ap.parse_args(argv)
    if not kernel.compiled_available():
        print("compiled kernel not built; run `pip install -e . --no-build-isolation` first")
        return 1
    rows, agree = [], True
    print(f"{'instance':<30} {'gb size':>7} {'cython s':>9} {'python s':>9} {'speedup':>8}")
    for name, gens in cases().items():
        tc, bc = run(gens, "cython", args.repeat)
        tp, bp = run(gens, "python", args.repeat)
        same = bc == bp
        agree &= same
        rows.append({"instance": name, "size": len(bc), "cython": tc, "python": tp, "same_basis": same})
        print(f"{name:<30} {len(bc):>7} {tc:>9.3f} {tp:>9.3f} {tp / tc:>7.1f}x{'' if same else '  MISMATCH'}")
    if args.json:
        with open(args.json, "w") as fh:
            json.dump(rows, fh, indent=1)
    return 0 if agree else 1


if __name__ == "__main__":
    sys.exit(main())
