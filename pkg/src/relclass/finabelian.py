"""Finite abelian groups in invariant-factor form."""
from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass
from typing import Iterable, Sequence

from .errors import DomainError

U64_MAX = (1 << 64) - 1


def _is_small_prime(p: int) -> bool:
    if p < 2:
        return False
    return all(p % q for q in range(2, math.isqrt(p) + 1))


def smith_diagonal(matrix: Sequence[Sequence[int]]) -> list[int]:
    """Nonzero diagonal of the Smith normal form of an integer matrix.

    Plain Euclidean pivoting; the inputs in this package are tiny.
    """
    m = [list(map(int, row)) for row in matrix]
    rows = len(m)
    cols = len(m[0]) if rows else 0
    diag = []
    t = 0
    while t < min(rows, cols):
        nz = [(abs(m[i][j]), i, j) for i in range(t, rows) for j in range(t, cols) if m[i][j]]
        if not nz:
            break
        _, pi, pj = min(nz)
        m[t], m[pi] = m[pi], m[t]
        for row in m:
            row[t], row[pj] = row[pj], row[t]
        while True:
            dirty = False
            piv = m[t][t]
            for i in range(t + 1, rows):
                q = m[i][t] // piv
                if q:
                    m[i] = [a - q * b for a, b in zip(m[i], m[t])]
                if m[i][t]:
                    dirty = True
            for j in range(t + 1, cols):
                q = m[t][j] // piv
                if q:
                    for row in m:
                        row[j] -= q * row[t]
                if m[t][j]:
                    dirty = True
            if not dirty:
                # divisibility: fold a row with a non-multiple entry into the pivot row
                bad = next(((i, j) for i in range(t + 1, rows) for j in range(t + 1, cols)
                            if m[i][j] % piv), None)
                if bad is None:
                    break
                m[t] = [a + b for a, b in zip(m[t], m[bad[0]])]
                continue
            # move smallest remaining entry of row/column t to the pivot
            cand = [(abs(m[i][t]), i, t) for i in range(t, rows) if m[i][t]]
            cand += [(abs(m[t][j]), t, j) for j in range(t, cols) if m[t][j]]
            _, pi, pj = min(cand)
            m[t], m[pi] = m[pi], m[t]
            for row in m:
                row[t], row[pj] = row[pj], row[t]
        diag.append(abs(m[t][t]))
        t += 1
    return diag


@dataclass(frozen=True, order=True)
class FiniteAbelianGroup:
    invariant_factors: tuple[int, ...] = ()

    def __post_init__(self):
        d = tuple(int(x) for x in self.invariant_factors)
        object.__setattr__(self, "invariant_factors", d)
        for i, x in enumerate(d):
            if x < 2:
                raise DomainError(f"invariant factor {x} < 2")
            if i and x % d[i - 1]:
                raise DomainError(f"{d[i - 1]} does not divide {x}")

    @classmethod
    def trivial(cls) -> "FiniteAbelianGroup":
        return cls(())

    @classmethod
    def cyclic(cls, n: int) -> "FiniteAbelianGroup":
        return from_cyclic_list([n])

    @property
    def order(self) -> int:
        return math.prod(self.invariant_factors)

    @property
    def exponent(self) -> int:
        return self.invariant_factors[-1] if self.invariant_factors else 1

    def is_trivial(self) -> bool:
        return not self.invariant_factors

    def rank(self) -> int:
        return len(self.invariant_factors)

    def rank_p(self, p: int) -> int:
        return rank_p(self, p)

    def __mul__(self, other: "FiniteAbelianGroup") -> "FiniteAbelianGroup":
        return from_cyclic_list(self.invariant_factors + other.invariant_factors)

    def __str__(self):
        if not self.invariant_factors:
            return "1"
        return " x ".join(f"C{d}" for d in self.invariant_factors)

    @classmethod
    def parse(cls, text: str) -> "FiniteAbelianGroup":
        text = text.strip()
        if text in ("", "1", "C1"):
            return cls()
        parts = [s.strip() for s in text.replace("×", "x").split("x")]
        try:
            orders = [int(s[1:]) for s in parts if s.startswith("C")]
        except ValueError:
            raise DomainError(f"cannot parse group {text!r}") from None
        if len(orders) != len(parts):
            raise DomainError(f"cannot parse group {text!r}")
        return from_cyclic_list(orders)


def from_cyclic_list(orders: Iterable[int]) -> FiniteAbelianGroup:
    """Invariant factors of the product of Z/n for n in ``orders``."""
    orders = [int(n) for n in orders]
    if any(n < 1 for n in orders):
        raise DomainError(f"cyclic orders must be >= 1: {orders}")
    orders = [n for n in orders if n > 1]
    if not orders:
        return FiniteAbelianGroup()
    k = len(orders)
    rel = [[orders[i] if i == j else 0 for j in range(k)] for i in range(k)]
    diag = sorted(d for d in smith_diagonal(rel) if d > 1)
    return FiniteAbelianGroup(tuple(diag))


def from_elementary_divisors(prime_powers: Iterable[int]) -> FiniteAbelianGroup:
    """Regroup prime-power cyclic orders into invariant factors."""
    by_p: dict[int, list[int]] = {}
    for q in prime_powers:
        q = int(q)
        if q == 1:
            continue
        p = next(d for d in range(2, q + 1) if q % d == 0)
        by_p.setdefault(p, []).append(q)
    width = max((len(v) for v in by_p.values()), default=0)
    factors = [1] * width
    for qs in by_p.values():
        qs.sort(reverse=True)
        for i, q in enumerate(qs):
            factors[width - 1 - i] *= q
    return FiniteAbelianGroup(tuple(f for f in factors if f > 1))


def from_order_counts(order: int, counts: dict[int, int]) -> FiniteAbelianGroup:
    """Structure from the number of elements of each order.

    ``counts[m]`` is the number of elements of order exactly m.  For each
    prime p, the p-part type is read off from #{x : p^k x = 0} = p^(sum min(k, a_i)).
    """
    n = int(order)
    if sum(counts.values()) != n:
        raise DomainError("order counts do not sum to the group order")
    rest = n
    pieces = []
    p = 2
    while rest > 1:
        if rest % p == 0:
            a = 0
            while rest % p == 0:
                rest //= p
                a += 1
            # s_k = log_p #{x : x^(p^k) = 1}
            s = [0]
            for k in range(1, a + 1):
                pk = p ** k
                tot = sum(c for m, c in counts.items() if pk % m == 0)
                s.append(round(math.log(tot, p)))
            # number of cyclic factors of order >= p^k is s_k - s_{k-1}
            ge = [s[k] - s[k - 1] for k in range(1, a + 1)] + [0]
            for k in range(1, a + 1):
                pieces += [p ** k] * (ge[k - 1] - ge[k])
        p += 1 if p == 2 else 2
    return from_elementary_divisors(pieces)


def rank_p(A: FiniteAbelianGroup, p: int) -> int:
    if not _is_small_prime(p):
        raise DomainError(f"{p} is not prime")
    return sum(1 for d in A.invariant_factors if d % p == 0)


def power_subgroup(A: FiniteAbelianGroup, k: int) -> FiniteAbelianGroup:
    """The image kA of multiplication by k."""
    if k < 1:
        raise DomainError(f"k must be >= 1, got {k}")
    return from_cyclic_list(d // math.gcd(d, k) for d in A.invariant_factors)


def torsion_subgroup(A: FiniteAbelianGroup, k: int) -> FiniteAbelianGroup:
    """The kernel A[k] of multiplication by k."""
    return from_cyclic_list(math.gcd(d, k) for d in A.invariant_factors)


def hom_count(A: FiniteAbelianGroup, B: FiniteAbelianGroup) -> int:
    """|Hom(A, B)|, exact."""
    out = 1
    for a in A.invariant_factors:
        for b in B.invariant_factors:
            out *= math.gcd(a, b)
    return out


def hom_count_u64(A: FiniteAbelianGroup, B: FiniteAbelianGroup) -> tuple[int, bool]:
    """|Hom(A, B)| clamped to 64 bits; the flag says whether it saturated."""
    n = hom_count(A, B)
    if n > U64_MAX:
        return U64_MAX, True
    return n, False


def elements(A: FiniteAbelianGroup):
    """All elements as coordinate tuples (small groups only)."""
    from itertools import product

    return list(product(*(range(d) for d in A.invariant_factors)))


def element_order(A: FiniteAbelianGroup, x) -> int:
    out = 1
    for xi, d in zip(x, A.invariant_factors):
        out = math.lcm(out, d // math.gcd(xi, d))
    return out


def subgroup_generated(A: FiniteAbelianGroup, gens) -> tuple[FiniteAbelianGroup, set]:
    """Subgroup of A generated by ``gens`` (coordinate tuples), with its element set."""
    mods = A.invariant_factors
    zero = tuple(0 for _ in mods)
    seen = {zero}
    frontier = [zero]
    gens = [tuple(g) for g in gens]
    while frontier:
        nxt = []
        for x in frontier:
            for g in gens:
                y = tuple((a + b) % d for a, b, d in zip(x, g, mods))
                if y not in seen:
                    seen.add(y)
                    nxt.append(y)
        frontier = nxt
    counts = Counter(element_order(A, x) for x in seen)
    return from_order_counts(len(seen), counts), seen


def quotient(A: FiniteAbelianGroup, gens) -> FiniteAbelianGroup:
    """A / <gens>, by Smith form of the relation matrix."""
    mods = A.invariant_factors
    if not mods:
        return A
    rel = [[d if i == j else 0 for j in range(len(mods))] for i, d in enumerate(mods)]
    rel += [list(g) for g in gens]
    diag = smith_diagonal(rel)
    return FiniteAbelianGroup(tuple(sorted(d for d in diag if d > 1)))
