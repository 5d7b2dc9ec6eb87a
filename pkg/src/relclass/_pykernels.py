"""Pure-Python/numpy implementations of the hot kernels.

Every function here has a twin with the same signature in ``_ckernels.pyx``;
``relclass.kernels`` picks one at import time.
"""
from math import gcd, isqrt

import numpy as np

BACKEND = "python"


def sieve_odd_segment(lo, count, base_primes):
    """Primality flags for the odd integers lo, lo+2, ..., lo+2*(count-1).

    ``lo`` must be odd and ``base_primes`` must contain every odd prime up to
    the square root of the last number in the segment.
    """
    flags = np.ones(count, dtype=bool)
    if count == 0:
        return flags
    hi = lo + 2 * (count - 1)
    if lo == 1:
        flags[0] = False
    for p in base_primes:
        p = int(p)
        if p == 2:
            continue
        pp = p * p
        if pp > hi:
            break
        start = max(pp, ((lo + p - 1) // p) * p)
        if start % 2 == 0:
            start += p
        flags[(start - lo) // 2 :: p] = False
    return flags


def squarefree_segment(lo, hi, base_primes, base_adm, base_mark,
                       adm_mod, adm_table, mark_mod, mark_table):
    """Squarefree/admissibility flags, omega and marked-prime counts on [lo, hi).

    Primes in ``base_primes`` carry explicit flags; any prime factor larger
    than all of them is classified through the residue tables.
    """
    n = np.arange(lo, hi, dtype=np.int64)
    size = hi - lo
    rem = n.copy()
    omega = np.zeros(size, dtype=np.int8)
    marked = np.zeros(size, dtype=np.int8)
    ok = np.ones(size, dtype=bool)
    for i in range(len(base_primes)):
        p = int(base_primes[i])
        start = ((lo + p - 1) // p) * p
        if start >= hi:
            continue
        sl = slice(start - lo, None, p)
        rem[sl] //= p
        omega[sl] += 1
        if base_mark[i]:
            marked[sl] += 1
        if not base_adm[i]:
            ok[sl] = False
        pp = p * p
        start2 = ((lo + pp - 1) // pp) * pp
        if start2 < hi:
            ok[start2 - lo :: pp] = False
    big = rem > 1
    omega[big] += 1
    adm = np.asarray(adm_table, dtype=bool)
    mk = np.asarray(mark_table, dtype=bool)
    r = rem[big]
    ok[big] &= adm[r % adm_mod]
    marked[big] += mk[r % mark_mod].astype(np.int8)
    return ok, omega, marked


def dirichlet_convolve(a, b):
    """Dirichlet convolution of two arrays indexed 1..N (index 0 ignored)."""
    n = len(a) - 1
    out = np.zeros(n + 1, dtype=np.result_type(a, b))
    if np.count_nonzero(a) > np.count_nonzero(b):
        a, b = b, a
    for d in np.flatnonzero(a):
        d = int(d)
        if d == 0:
            continue
        m = n // d
        out[d : d * m + 1 : d] += a[d] * b[1 : m + 1]
    return out


def _xgcd(a, b):
    x0, x1, y0, y1 = 1, 0, 0, 1
    while b:
        q = a // b
        a, b = b, a - q * b
        x0, x1 = x1, x0 - q * x1
        y0, y1 = y1, y0 - q * y1
    if a < 0:
        return -x0, -y0, -a
    return x0, y0, a


def reduce_form(a, b, c):
    """Reduce a positive definite binary quadratic form."""
    while True:
        if not (-a < b <= a):
            r = (a - b) // (2 * a)
            c = a * r * r + b * r + c
            b = b + 2 * r * a
        if a > c:
            a, b, c = c, -b, a
            continue
        if a == c and b < 0:
            b = -b
        return a, b, c


def compose_forms(f, g, disc):
    """Gauss composition of two primitive forms of discriminant ``disc``."""
    a1, b1, c1 = f
    a2, b2, c2 = g
    if a1 > a2:
        a1, b1, c1, a2, b2, c2 = a2, b2, c2, a1, b1, c1
    s = (b1 + b2) // 2
    n = b2 - s
    if a2 % a1 == 0:
        y1 = 0
        d = a1
    else:
        y1, _, d = _xgcd(a2, a1)
    if s % d == 0:
        x2, y2, d1 = 0, -1, d
    else:
        x2, v, d1 = _xgcd(s, d)
        y2 = -v
    v1 = a1 // d1
    v2 = a2 // d1
    r = (y1 * y2 * n - x2 * c2) % v1
    b3 = b2 + 2 * v2 * r
    a3 = v1 * v2
    c3 = (b3 * b3 - disc) // (4 * a3)
    return reduce_form(a3, b3, c3)


def reduced_forms(disc):
    """All reduced primitive forms of negative discriminant ``disc``.

    Sorted by (a, b); the principal form comes first.
    """
    out = []
    amax = isqrt(-disc // 3)
    for a in range(1, amax + 1):
        for b in range(-a + 1, a + 1):
            if (b - disc) % 2:
                continue
            num = b * b - disc
            if num % (4 * a):
                continue
            c = num // (4 * a)
            if c < a or (c == a and b < 0):
                continue
            if gcd(gcd(a, b), c) != 1:
                continue
            out.append((a, b, c))
    return out


def class_group_orders(disc):
    """Reduced forms of ``disc`` and the order of each in the class group.

    Orders come from cyclic walks: each walk starts at an element not yet
    covered and records the orders of all its powers.
    """
    forms = reduced_forms(disc)
    index = {f: i for i, f in enumerate(forms)}
    h = len(forms)
    orders = np.zeros(h, dtype=np.int64)
    orders[0] = 1
    ident = forms[0]
    for i in range(1, h):
        if orders[i]:
            continue
        g = forms[i]
        walk = [i]
        cur = g
        while True:
            cur = compose_forms(cur, g, disc)
            if cur == ident:
                break
            walk.append(index[cur])
        n = len(walk) + 1
        for j, idx in enumerate(walk, start=1):
            if not orders[idx]:
                orders[idx] = n // gcd(j, n)
    return np.array(forms, dtype=np.int64).reshape(-1, 3), orders
