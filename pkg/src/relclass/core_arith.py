"""Integer arithmetic substrate: sieving, factorization, squarefree streams.

All integers handled here fit in 64 bits.  The prime sieve is segmented
with a fixed segment of 2**20 odd numbers.
"""
from __future__ import annotations

import math
import os
import random
import struct
from dataclasses import dataclass
from typing import Callable, Iterator

import numpy as np

from . import kernels
from .errors import BoundsError, DomainError

SEGMENT = 1 << 20
MAX_SIEVE = 1 << 40
MAX_FACTOR = 1 << 63
CACHE_MAGIC = b"RCLB"
CACHE_VERSION = 1

_MR_BASES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37)
_SMALL_PRIMES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53,
                 59, 61, 67, 71, 73, 79, 83, 89, 97)


@dataclass(frozen=True)
class Factorization:
    value: int
    factors: tuple[tuple[int, int], ...]

    def __post_init__(self):
        prev = 1
        prod = 1
        for p, e in self.factors:
            if p <= prev or e < 1:
                raise DomainError(f"malformed factorization {self.factors}")
            prev = p
            prod *= p ** e
        if prod != self.value:
            raise DomainError(f"factors {self.factors} do not multiply to {self.value}")

    @property
    def primes(self) -> tuple[int, ...]:
        return tuple(p for p, _ in self.factors)

    @property
    def omega(self) -> int:
        return len(self.factors)

    @property
    def radical(self) -> int:
        return math.prod(self.primes)

    def is_squarefree(self) -> bool:
        return all(e == 1 for _, e in self.factors)

    def __str__(self):
        if not self.factors:
            return "1"
        return "*".join(str(p) if e == 1 else f"{p}^{e}" for p, e in self.factors)


class PrimeTable:
    """Primality bitset over the odd integers up to ``limit``.

    Bit ``i`` (little-endian within each byte) stands for ``2*i + 1``.
    """

    def __init__(self, limit: int, bits: np.ndarray):
        self.limit = int(limit)
        self._bits = np.asarray(bits, dtype=np.uint8)
        self._flags = None

    @property
    def flags(self) -> np.ndarray:
        if self._flags is None:
            n_odd = (self.limit + 1) // 2
            self._flags = np.unpackbits(self._bits, bitorder="little")[:n_odd].astype(bool)
        return self._flags

    def is_prime(self, n: int) -> bool:
        if n < 0 or n > self.limit:
            raise BoundsError(f"{n} outside table range [0, {self.limit}]")
        if n == 2:
            return True
        if n < 2 or n % 2 == 0:
            return False
        return bool(self.flags[n // 2])

    def __contains__(self, n):
        return self.is_prime(n)

    def primes(self) -> np.ndarray:
        odd = np.flatnonzero(self.flags) * 2 + 1
        return np.concatenate([np.array([2], dtype=np.int64), odd.astype(np.int64)])

    def __iter__(self):
        return iter(self.primes().tolist())

    def __len__(self):
        return int(np.count_nonzero(self.flags)) + 1

    def save(self, path) -> None:
        with open(path, "wb") as fh:
            fh.write(CACHE_MAGIC)
            fh.write(bytes([CACHE_VERSION]))
            fh.write(struct.pack("<Q", self.limit))
            fh.write(self._bits.tobytes())

    @classmethod
    def load(cls, path, limit: int | None = None) -> "PrimeTable":
        with open(path, "rb") as fh:
            head = fh.read(13)
            if len(head) != 13 or head[:4] != CACHE_MAGIC:
                raise DomainError(f"{path}: not a prime table cache")
            if head[4] != CACHE_VERSION:
                raise DomainError(f"{path}: unsupported cache version {head[4]}")
            (stored,) = struct.unpack("<Q", head[5:])
            if limit is not None and stored != limit:
                raise DomainError(f"{path}: cached limit {stored} != requested {limit}")
            bits = np.frombuffer(fh.read(), dtype=np.uint8)
        n_odd = (stored + 1) // 2
        if len(bits) != (n_odd + 7) // 8:
            raise DomainError(f"{path}: truncated bitset")
        return cls(stored, bits.copy())


def _small_sieve(limit: int) -> np.ndarray:
    flags = np.ones(limit + 1, dtype=bool)
    flags[:2] = False
    for p in range(2, math.isqrt(limit) + 1):
        if flags[p]:
            flags[p * p :: p] = False
    return np.flatnonzero(flags).astype(np.int64)


def sieve_primes(limit: int, cache_dir=None) -> PrimeTable:
    """Segmented sieve of Eratosthenes over the odd numbers up to ``limit``."""
    if not 2 <= limit <= MAX_SIEVE:
        raise BoundsError(f"sieve limit {limit} outside [2, 2^40]")
    path = None
    if cache_dir is not None:
        path = os.path.join(cache_dir, f"primes_{limit}.rclb")
        if os.path.exists(path):
            return PrimeTable.load(path, limit)
    base = _small_sieve(math.isqrt(limit) + 1)
    n_odd = (limit + 1) // 2
    chunks = []
    for start in range(0, n_odd, SEGMENT):
        count = min(SEGMENT, n_odd - start)
        chunks.append(kernels.sieve_odd_segment(2 * start + 1, count, base))
    flags = np.concatenate(chunks)
    table = PrimeTable(limit, np.packbits(flags, bitorder="little"))
    table._flags = flags
    if path is not None:
        os.makedirs(cache_dir, exist_ok=True)
        table.save(path)
    return table


def primes_up_to(limit: int) -> np.ndarray:
    if limit < 2:
        return np.zeros(0, dtype=np.int64)
    return sieve_primes(limit).primes()


def is_prime(n: int) -> bool:
    """Deterministic Miller-Rabin for every n < 2**64."""
    if n < 2:
        return False
    for p in _SMALL_PRIMES:
        if n % p == 0:
            return n == p
    d = n - 1
    s = 0
    while d % 2 == 0:
        d //= 2
        s += 1
    for a in _MR_BASES:
        x = pow(a, d, n)
        if x == 1 or x == n - 1:
            continue
        for _ in range(s - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


def _pollard_brent(n: int, rng: random.Random) -> int:
    if n % 2 == 0:
        return 2
    while True:
        y = rng.randrange(1, n)
        c = rng.randrange(1, n)
        m = 128
        g = r = q = 1
        x = ys = y
        while g == 1:
            x = y
            for _ in range(r):
                y = (y * y + c) % n
            k = 0
            while k < r and g == 1:
                ys = y
                for _ in range(min(m, r - k)):
                    y = (y * y + c) % n
                    q = q * abs(x - y) % n
                g = math.gcd(q, n)
                k += m
            r *= 2
        if g == n:
            g = 1
            while g == 1:
                ys = (ys * ys + c) % n
                g = math.gcd(abs(x - ys), n)
        if g != n:
            return g


def factorize(n: int) -> Factorization:
    """Canonical factorization of ``|n|``."""
    if n == 0:
        raise DomainError("cannot factor 0")
    m = abs(n)
    if m > MAX_FACTOR:
        raise BoundsError(f"|{n}| exceeds 2^63")
    value = m
    counts: dict[int, int] = {}
    for p in _SMALL_PRIMES:
        while m % p == 0:
            counts[p] = counts.get(p, 0) + 1
            m //= p
    rng = random.Random(0x5EED)
    stack = [m] if m > 1 else []
    while stack:
        x = stack.pop()
        if is_prime(x):
            counts[x] = counts.get(x, 0) + 1
            continue
        d = _pollard_brent(x, rng)
        stack.extend((d, x // d))
    return Factorization(value, tuple(sorted(counts.items())))


def radical_omega(n: int) -> tuple[int, int]:
    f = factorize(n)
    return f.radical, f.omega


def _base_arrays(limit: int, pred):
    base = primes_up_to(max(math.isqrt(limit), 100))
    adm = np.fromiter((bool(pred(int(p))) for p in base), dtype=bool, count=len(base))
    return base, adm


def squarefree_stream(limit: int, prime_pred: Callable[[int], bool] | None = None,
                      ) -> Iterator[tuple[int, Factorization]]:
    """Squarefree n <= limit whose prime factors all satisfy ``prime_pred``.

    Yields ``(n, factorization)`` in ascending order; n = 1 comes first.
    """
    if limit < 1:
        return
    pred = prime_pred or (lambda p: True)
    base, adm = _base_arrays(limit, pred)
    bound = int(base[-1])
    cache: dict[int, bool] = {}
    no_mark = np.zeros(len(base), dtype=bool)
    for lo in range(1, limit + 1, SEGMENT):
        hi = min(lo + SEGMENT, limit + 1)
        # large prime factors are checked individually below
        ok, _, _ = kernels.squarefree_segment(
            lo, hi, base, np.ones(len(base), bool), no_mark, 1, [True], 1, [False])
        for off in np.flatnonzero(ok):
            n = lo + int(off)
            primes = []
            m = n
            good = True
            for p in base:
                p = int(p)
                if p * p > m:
                    break
                if m % p == 0:
                    primes.append(p)
                    m //= p
            if m > 1:
                primes.append(m)
            for p in primes:
                if p <= bound:
                    i = int(np.searchsorted(base, p))
                    if not adm[i]:
                        good = False
                        break
                else:
                    if p not in cache:
                        cache[p] = bool(pred(p))
                    if not cache[p]:
                        good = False
                        break
            if good:
                yield n, Factorization(n, tuple((p, 1) for p in primes))


@dataclass(frozen=True)
class ResidueRule:
    """Prime predicate of the form ``p % modulus in residues`` with exceptions.

    Residue rules let the compiled kernels classify primes of any size
    without calling back into Python.
    """

    modulus: int = 1
    residues: frozenset = frozenset({0})
    exclude: frozenset = frozenset()
    include: frozenset = frozenset()

    def __call__(self, p: int) -> bool:
        if p in self.exclude:
            return False
        if p in self.include:
            return True
        return p % self.modulus in self.residues

    def table(self) -> np.ndarray:
        t = np.zeros(self.modulus, dtype=bool)
        for r in self.residues:
            t[r % self.modulus] = True
        return t

    def max_exception(self) -> int:
        return max(self.exclude | self.include, default=0)


ANY_PRIME = ResidueRule()
NO_PRIME = ResidueRule(1, frozenset())


def squarefree_table(lo: int, hi: int, admissible: ResidueRule = ANY_PRIME,
                     marked: ResidueRule = NO_PRIME):
    """Flags and counts on [lo, hi): (ok, omega, marked_count).

    ``ok`` is true for squarefree n whose primes all satisfy ``admissible``;
    ``marked_count`` counts prime factors satisfying ``marked``.
    """
    if lo < 1 or hi < lo:
        raise BoundsError(f"bad range [{lo}, {hi})")
    bound = max(math.isqrt(max(hi - 1, 1)), 100, admissible.max_exception(), marked.max_exception())
    base = primes_up_to(bound)
    adm = np.fromiter((admissible(int(p)) for p in base), dtype=bool, count=len(base))
    mk = np.fromiter((marked(int(p)) for p in base), dtype=bool, count=len(base))
    return kernels.squarefree_segment(lo, hi, base, adm, mk,
                                      admissible.modulus, admissible.table(),
                                      marked.modulus, marked.table())


def segments(limit: int, size: int = SEGMENT):
    """Half-open ranges [lo, hi) covering 1..limit-1 in order."""
    return [(lo, min(lo + size, limit)) for lo in range(1, limit, size)]
