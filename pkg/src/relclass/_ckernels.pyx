# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled twins of the kernels in ``_pykernels``.

Signatures and results are identical; only speed differs.
"""
import numpy as np
cimport numpy as cnp
from libc.stdint cimport int64_t, int8_t, uint8_t

cnp.import_array()

BACKEND = "cython"


cdef inline int64_t _floordiv(int64_t a, int64_t b) nogil:
    cdef int64_t q = a / b
    if (a % b != 0) and ((a < 0) != (b < 0)):
        q -= 1
    return q


cdef inline int64_t _mod(int64_t a, int64_t b) nogil:
    cdef int64_t r = a % b
    if r != 0 and ((r < 0) != (b < 0)):
        r += b
    return r


cdef inline int64_t _gcd(int64_t a, int64_t b) nogil:
    if a < 0:
        a = -a
    if b < 0:
        b = -b
    while b:
        a, b = b, a % b
    return a


cdef inline void _xgcd(int64_t a, int64_t b, int64_t* u, int64_t* v, int64_t* g) nogil:
    cdef int64_t x0 = 1, x1 = 0, y0 = 0, y1 = 1, q, t
    while b != 0:
        q = _floordiv(a, b)
        t = a - q * b
        a = b
        b = t
        t = x0 - q * x1
        x0 = x1
        x1 = t
        t = y0 - q * y1
        y0 = y1
        y1 = t
    if a < 0:
        u[0] = -x0
        v[0] = -y0
        g[0] = -a
    else:
        u[0] = x0
        v[0] = y0
        g[0] = a


def sieve_odd_segment(int64_t lo, Py_ssize_t count, base_primes):
    cdef cnp.ndarray[uint8_t, ndim=1] flags = np.ones(count, dtype=np.uint8)
    cdef int64_t[:] bp = np.ascontiguousarray(base_primes, dtype=np.int64)
    cdef Py_ssize_t i, j
    cdef int64_t p, pp, start, hi
    if count == 0:
        return flags.astype(bool)
    hi = lo + 2 * (count - 1)
    if lo == 1:
        flags[0] = 0
    for i in range(bp.shape[0]):
        p = bp[i]
        if p == 2:
            continue
        pp = p * p
        if pp > hi:
            break
        start = ((lo + p - 1) / p) * p
        if start < pp:
            start = pp
        if start % 2 == 0:
            start += p
        j = (start - lo) / 2
        while j < count:
            flags[j] = 0
            j += p
    return flags.view(bool)


def squarefree_segment(int64_t lo, int64_t hi, base_primes, base_adm, base_mark,
                       int64_t adm_mod, adm_table, int64_t mark_mod, mark_table):
    cdef Py_ssize_t size = hi - lo
    cdef cnp.ndarray[int64_t, ndim=1] rem_a = np.arange(lo, hi, dtype=np.int64)
    cdef cnp.ndarray[int8_t, ndim=1] omega_a = np.zeros(size, dtype=np.int8)
    cdef cnp.ndarray[int8_t, ndim=1] marked_a = np.zeros(size, dtype=np.int8)
    cdef cnp.ndarray[uint8_t, ndim=1] ok_a = np.ones(size, dtype=np.uint8)
    cdef int64_t[:] rem = rem_a
    cdef int8_t[:] omega = omega_a
    cdef int8_t[:] marked = marked_a
    cdef uint8_t[:] ok = ok_a
    cdef int64_t[:] bp = np.ascontiguousarray(base_primes, dtype=np.int64)
    cdef uint8_t[:] badm = np.ascontiguousarray(base_adm, dtype=np.uint8)
    cdef uint8_t[:] bmark = np.ascontiguousarray(base_mark, dtype=np.uint8)
    cdef uint8_t[:] atab = np.ascontiguousarray(adm_table, dtype=np.uint8)
    cdef uint8_t[:] mtab = np.ascontiguousarray(mark_table, dtype=np.uint8)
    cdef Py_ssize_t i, j
    cdef int64_t p, pp, start, r
    cdef uint8_t adm, mk
    with nogil:
        for i in range(bp.shape[0]):
            p = bp[i]
            start = ((lo + p - 1) / p) * p
            if start >= hi:
                continue
            adm = badm[i]
            mk = bmark[i]
            j = start - lo
            while j < size:
                rem[j] = rem[j] / p
                omega[j] += 1
                if mk:
                    marked[j] += 1
                if not adm:
                    ok[j] = 0
                j += p
            pp = p * p
            start = ((lo + pp - 1) / pp) * pp
            j = start - lo
            while j < size:
                ok[j] = 0
                j += pp
        for j in range(size):
            r = rem[j]
            if r > 1:
                omega[j] += 1
                if not atab[r % adm_mod]:
                    ok[j] = 0
                if mtab[r % mark_mod]:
                    marked[j] += 1
    return ok_a.view(bool), omega_a, marked_a


def dirichlet_convolve(a, b):
    a = np.asarray(a)
    b = np.asarray(b)
    dtype = np.result_type(a, b)
    if dtype.kind == "f":
        return _convolve_f(a.astype(np.float64), b.astype(np.float64))
    if dtype.kind in "iub":
        return _convolve_i(a.astype(np.int64), b.astype(np.int64))
    raise TypeError("unsupported dtype for compiled convolution: %s" % dtype)


cdef _convolve_f(double[:] a, double[:] b):
    cdef Py_ssize_t n = a.shape[0] - 1
    cdef cnp.ndarray[double, ndim=1] out_a = np.zeros(n + 1, dtype=np.float64)
    cdef double[:] out = out_a
    cdef Py_ssize_t d, e
    cdef double ad
    with nogil:
        for d in range(1, n + 1):
            ad = a[d]
            if ad == 0:
                continue
            e = 1
            while d * e <= n:
                out[d * e] += ad * b[e]
                e += 1
    return out_a


cdef _convolve_i(int64_t[:] a, int64_t[:] b):
    cdef Py_ssize_t n = a.shape[0] - 1
    cdef cnp.ndarray[int64_t, ndim=1] out_a = np.zeros(n + 1, dtype=np.int64)
    cdef int64_t[:] out = out_a
    cdef Py_ssize_t d, e
    cdef int64_t ad
    with nogil:
        for d in range(1, n + 1):
            ad = a[d]
            if ad == 0:
                continue
            e = 1
            while d * e <= n:
                out[d * e] += ad * b[e]
                e += 1
    return out_a


cdef inline void _reduce(int64_t* a, int64_t* b, int64_t* c) nogil:
    cdef int64_t r, t
    while True:
        if not (-a[0] < b[0] and b[0] <= a[0]):
            r = _floordiv(a[0] - b[0], 2 * a[0])
            c[0] = a[0] * r * r + b[0] * r + c[0]
            b[0] = b[0] + 2 * r * a[0]
        if a[0] > c[0]:
            t = a[0]
            a[0] = c[0]
            c[0] = t
            b[0] = -b[0]
            continue
        if a[0] == c[0] and b[0] < 0:
            b[0] = -b[0]
        return


cdef inline void _compose(int64_t a1, int64_t b1, int64_t c1,
                          int64_t a2, int64_t b2, int64_t c2, int64_t disc,
                          int64_t* a3, int64_t* b3, int64_t* c3) nogil:
    cdef int64_t t, s, n, y1, d, x2, y2, d1, u, v, v1, v2, r
    if a1 > a2:
        t = a1; a1 = a2; a2 = t
        t = b1; b1 = b2; b2 = t
        t = c1; c1 = c2; c2 = t
    s = _floordiv(b1 + b2, 2)
    n = b2 - s
    if a2 % a1 == 0:
        y1 = 0
        d = a1
    else:
        _xgcd(a2, a1, &u, &v, &d)
        y1 = u
    if _mod(s, d) == 0:
        x2 = 0
        y2 = -1
        d1 = d
    else:
        _xgcd(s, d, &u, &v, &d1)
        x2 = u
        y2 = -v
    v1 = a1 / d1
    v2 = a2 / d1
    r = _mod(_mod(y1 * y2, v1) * _mod(n, v1) - _mod(x2, v1) * _mod(c2, v1), v1)
    b3[0] = b2 + 2 * v2 * r
    a3[0] = v1 * v2
    c3[0] = (b3[0] * b3[0] - disc) / (4 * a3[0])
    _reduce(a3, b3, c3)


def reduce_form(int64_t a, int64_t b, int64_t c):
    _reduce(&a, &b, &c)
    return (a, b, c)


def compose_forms(f, g, int64_t disc):
    cdef int64_t a3, b3, c3
    _compose(f[0], f[1], f[2], g[0], g[1], g[2], disc, &a3, &b3, &c3)
    return (a3, b3, c3)


def reduced_forms(int64_t disc):
    cdef int64_t a, b, c, num, amax
    cdef list out = []
    amax = 0
    while 3 * (amax + 1) * (amax + 1) <= -disc:
        amax += 1
    for a in range(1, amax + 1):
        for b in range(-a + 1, a + 1):
            if _mod(b - disc, 2):
                continue
            num = b * b - disc
            if num % (4 * a):
                continue
            c = num / (4 * a)
            if c < a or (c == a and b < 0):
                continue
            if _gcd(_gcd(a, b), c) != 1:
                continue
            out.append((a, b, c))
    return out


cdef Py_ssize_t _lookup(int64_t[:] keys, int64_t key) nogil:
    cdef Py_ssize_t lo = 0, hi = keys.shape[0] - 1, mid
    while lo <= hi:
        mid = (lo + hi) // 2
        if keys[mid] == key:
            return mid
        if keys[mid] < key:
            lo = mid + 1
        else:
            hi = mid - 1
    return -1


def class_group_orders(int64_t disc):
    forms_list = reduced_forms(disc)
    cdef Py_ssize_t h = len(forms_list)
    cdef cnp.ndarray[int64_t, ndim=2] forms_a = np.array(forms_list, dtype=np.int64).reshape(-1, 3)
    cdef int64_t[:, :] forms = forms_a
    cdef cnp.ndarray[int64_t, ndim=1] orders_a = np.zeros(h, dtype=np.int64)
    cdef int64_t[:] orders = orders_a
    cdef int64_t width = 2 * forms[h - 1, 0] + 2
    cdef cnp.ndarray[int64_t, ndim=1] keys_a = forms_a[:, 0] * width + forms_a[:, 1] + width // 2
    cdef int64_t[:] keys = keys_a
    cdef cnp.ndarray[int64_t, ndim=1] walk_a = np.zeros(h + 1, dtype=np.int64)
    cdef int64_t[:] walk = walk_a
    cdef Py_ssize_t i, j, k, idx
    cdef int64_t ga, gb, gc, ca, cb, cc, na, nb, nc, n
    orders[0] = 1
    with nogil:
        for i in range(1, h):
            if orders[i]:
                continue
            ga = forms[i, 0]; gb = forms[i, 1]; gc = forms[i, 2]
            ca = ga; cb = gb; cc = gc
            k = 0
            walk[k] = i
            k += 1
            while True:
                _compose(ca, cb, cc, ga, gb, gc, disc, &na, &nb, &nc)
                ca = na; cb = nb; cc = nc
                if ca == 1:
                    break
                idx = _lookup(keys, ca * width + cb + width // 2)
                walk[k] = idx
                k += 1
            n = k + 1
            for j in range(k):
                idx = walk[j]
                if not orders[idx]:
                    orders[idx] = n / _gcd(j + 1, n)
    return forms_a, orders_a
