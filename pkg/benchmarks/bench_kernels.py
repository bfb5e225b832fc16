"""Time the numba kernels against their numpy fallbacks on growing posets.

    python3 benchmarks/bench_kernels.py [--sizes 4 8 12] [--repeat 5]
"""
import argparse
import timeit

import numpy as np

from fibcalc import _kernels as K
from fibcalc.fincat import product, thin_functor, walking


def _cases(n: int):
    e = product(walking(n), walking(1))
    b = walking(n)
    p = thin_functor(e, b, [i for i in range(n + 1) for _ in range(2)])
    c = K._i
    table = (c(e.comp), c(e.src), c(e.tgt), c(e.ident))
    edge = tuple(c(a) for a in (e.src, e.tgt, e.comp, b.src, b.tgt, b.comp, p.obj, p.mor))
    return e, {
        "assoc": (K.np_assoc_violation, K.nb_assoc_violation if K.nb else None, table[:3]),
        "unit": (K.np_unit_violation, K.nb_unit_violation if K.nb else None, table),
        "inverses": (K.np_inverses, K.nb_inverses if K.nb else None, table),
        "cartesian": (K.np_cartesian_flags, K.nb_cartesian_flags if K.nb else None, edge),
    }


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--sizes", type=int, nargs="+", default=[2, 4, 8, 12])
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args()
    print(f"{'kernel':10} {'n':>3} {'morphisms':>9} {'numpy ms':>9} {'numba ms':>9} {'agree':>5}")
    for n in args.sizes:
        e, cases = _cases(n)
        for name, (f_np, f_nb, a) in cases.items():
            t_np = min(timeit.repeat(lambda: f_np(*a), number=1, repeat=args.repeat)) * 1e3
            if f_nb is None:
                print(f"{name:10} {n:3d} {e.n_mor:9d} {t_np:9.2f} {'-':>9} {'-':>5}")
                continue
            f_nb(*a)  # compile outside the timing
            t_nb = min(timeit.repeat(lambda: f_nb(*a), number=1, repeat=args.repeat)) * 1e3
            x, y = f_np(*a), f_nb(*a)
            if name == "assoc":
                agree = (x is None) == (y[0] < 0)
            else:
                agree = bool(np.array_equal(np.asarray(x), np.asarray(y)))
            print(f"{name:10} {n:3d} {e.n_mor:9d} {t_np:9.2f} {t_nb:9.2f} {str(agree):>5}")


if __name__ == "__main__":
    main()
