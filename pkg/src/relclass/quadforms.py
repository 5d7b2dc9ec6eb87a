"""Imaginary quadratic class groups from reduced binary quadratic forms,
plus fundamental-discriminant enumeration and genus theory."""
from __future__ import annotations

from collections import Counter
from dataclasses import dataclass
from typing import Iterator

import numpy as np

from . import kernels
from .core_arith import factorize, squarefree_table
from .errors import BoundsError, DomainError
from .finabelian import FiniteAbelianGroup, from_order_counts

MAX_CLASS_GROUP_DISC = 10**7


def is_fundamental(d: int) -> bool:
    if d in (0, 1):
        return False
    r = d % 4
    if r == 1:
        return _squarefree(d)
    if r == 0:
        m = d // 4
        return m % 4 in (2, 3) and _squarefree(m)
    return False


def _squarefree(n: int) -> bool:
    return factorize(n).is_squarefree()


@dataclass(frozen=True, order=True)
class QuadDisc:
    d: int

    def __post_init__(self):
        if not is_fundamental(self.d):
            raise DomainError(f"{self.d} is not a fundamental discriminant")

    @property
    def sign(self) -> int:
        return 1 if self.d > 0 else -1

    @property
    def imaginary(self) -> bool:
        return self.d < 0

    @property
    def squarefree_part(self) -> int:
        """The m with Q(sqrt m) = Q(sqrt d)."""
        return self.d if self.d % 4 == 1 else self.d // 4

    def __int__(self):
        return self.d

    def __str__(self):
        return str(self.d)


@dataclass(frozen=True)
class QForm:
    a: int
    b: int
    c: int

    @property
    def disc(self) -> int:
        return self.b * self.b - 4 * self.a * self.c

    def is_reduced(self) -> bool:
        a, b, c = self.a, self.b, self.c
        if not (abs(b) <= a <= c):
            return False
        if (abs(b) == a or a == c) and b < 0:
            return False
        return True

    def reduce(self) -> "QForm":
        return QForm(*kernels.reduce_form(self.a, self.b, self.c))

    def inverse(self) -> "QForm":
        return QForm(self.a, -self.b, self.c).reduce()

    def compose(self, other: "QForm") -> "QForm":
        if self.disc != other.disc:
            raise DomainError("forms have different discriminants")
        return QForm(*kernels.compose_forms(self.astuple(), other.astuple(), self.disc))

    def __mul__(self, other):
        return self.compose(other)

    def astuple(self) -> tuple[int, int, int]:
        return (self.a, self.b, self.c)

    @classmethod
    def principal(cls, disc: int) -> "QForm":
        return cls(1, disc % 2, (disc % 2 - disc) // 4)


def reduced_forms(d: int) -> list[QForm]:
    return [QForm(*f) for f in kernels.reduced_forms(d)]


def fundamental_discriminants(limit: int, sign: int = -1) -> Iterator[QuadDisc]:
    """Fundamental discriminants with 0 < sign*d <= limit, ascending |d|."""
    for d in fundamental_discriminant_array(limit, sign):
        yield QuadDisc(int(d))


def fundamental_discriminant_array(limit: int, sign: int = -1, lo: int = 1) -> np.ndarray:
    """Vectorised version: signed fundamental discriminants with lo <= |d| <= limit."""
    if sign not in (1, -1):
        raise DomainError("sign must be +1 or -1")
    if limit < 3:
        return np.zeros(0, dtype=np.int64)
    lo = max(lo, 1)
    ok, _, _ = squarefree_table(1, limit + 1)
    n = np.arange(1, limit + 1, dtype=np.int64)
    sd = sign * n
    # d = 1 mod 4 squarefree, or d = 4m with m = 2,3 mod 4 squarefree
    odd = ok & (sd % 4 == 1)
    m = n // 4
    even = (n % 4 == 0) & (m >= 1)
    idx = np.flatnonzero(even)
    even_ok = np.zeros_like(even)
    mm = m[idx]
    sm = sign * mm
    even_ok[idx] = ok[mm - 1] & np.isin(sm % 4, (2, 3))
    out = sd[(odd | even_ok) & (n >= lo)]
    out = out[out != 1]
    return out


def class_group(d) -> FiniteAbelianGroup:
    """Class group of Q(sqrt d) for a negative fundamental discriminant."""
    d = int(d)
    if d >= 0:
        raise DomainError("class groups are only computed for negative discriminants")
    if -d > MAX_CLASS_GROUP_DISC:
        raise BoundsError(f"|d| = {-d} exceeds {MAX_CLASS_GROUP_DISC}")
    QuadDisc(d)
    return class_group_unchecked(d)


def class_group_unchecked(d: int) -> FiniteAbelianGroup:
    _, orders = kernels.class_group_orders(d)
    return from_order_counts(len(orders), Counter(orders.tolist()))


def class_number(d: int) -> int:
    return len(kernels.reduced_forms(int(d)))


def genus_rank2(d) -> int:
    d = int(d)
    QuadDisc(d)
    return factorize(d).omega - 1


def ramified_product(d) -> int:
    """Product of the primes ramified in Q(sqrt d)."""
    d = int(d)
    QuadDisc(d)
    return factorize(d).radical


def discriminant_for_squarefree(m: int) -> int:
    """Fundamental discriminant of Q(sqrt m) for squarefree m != 1."""
    return m if m % 4 == 1 else 4 * m
