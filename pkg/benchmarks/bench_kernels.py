"""Compare the compiled and numpy kernel backends.

    python3 benchmarks/bench_kernels.py [--repeat 3]

Each kernel is run on identical inputs under both backends; outputs are
checked for equality before timings are reported.
"""
from __future__ import annotations

import argparse
import math
import time

import numpy as np

from relclass import kernels
from relclass.core_arith import ANY_PRIME, ResidueRule, primes_up_to


def _squarefree_args(lo: int, hi: int, admissible: ResidueRule):
    base = primes_up_to(max(math.isqrt(hi - 1), 100))
    adm = np.array([admissible(int(p)) for p in base], dtype=bool)
    mark = np.array([p % 2 == 1 for p in base], dtype=bool)
    odd = ResidueRule(2, frozenset({1}))
    return (lo, hi, base, adm, mark, admissible.modulus, admissible.table(), odd.modulus, odd.table())


def cases():
    odd_primes = primes_up_to(10**4)
    yield "sieve_odd_segment 1e7..+2e6", "sieve_odd_segment", (10**7 + 1, 10**6, odd_primes)
    yield "squarefree_segment [1e7, 1e7+2^18)", "squarefree_segment", _squarefree_args(10**7, 10**7 + 2**18, ANY_PRIME)
    yield ("squarefree_segment split mod 7", "squarefree_segment",
           _squarefree_args(10**7, 10**7 + 2**18, ResidueRule(7, frozenset({1, 6}), exclude=frozenset({2, 3}))))
    rng = np.random.default_rng(1)
    a = np.zeros(2 * 10**5 + 1)
    a[1:] = rng.integers(-3, 4, size=2 * 10**5)
    yield "dirichlet_convolve N=2e5", "dirichlet_convolve", (a, a)
    yield "reduced_forms d=-4000003", "reduced_forms", (-4000003,)
    yield "class_group_orders d=-1000003", "class_group_orders", (-1000003,)


def _same(x, y) -> bool:
    if isinstance(x, tuple) and isinstance(y, tuple):
        return len(x) == len(y) and all(_same(a, b) for a, b in zip(x, y))
    if isinstance(x, np.ndarray) or isinstance(y, np.ndarray):
        return np.array_equal(np.asarray(x), np.asarray(y))
    return x == y


def timed(fn, args, repeat: int) -> tuple[float, object]:
    best, out = math.inf, None
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn(*args)
        best = min(best, time.perf_counter() - t0)
    return best, out


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args(argv)
    mods = {m.BACKEND: m for m in kernels.backends()}
    if "cython" not in mods:
        print("compiled extension not built; only the python backend is available")
    print(f"{'kernel':40s} " + " ".join(f"{b:>10s}" for b in mods) + "   speedup")
    for label, name, a in cases():
        times, outs = {}, []
        for b, m in mods.items():
            times[b], out = timed(getattr(m, name), a, args.repeat)
            outs.append(out)
        agree = all(_same(outs[0], o) for o in outs[1:])
        speed = times["python"] / times["cython"] if "cython" in times else math.nan
        print(f"{label:40s} " + " ".join(f"{times[b] * 1e3:8.2f}ms" for b in mods)
              + f"  {speed:7.1f}x" + ("" if agree else "  MISMATCH"))
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
