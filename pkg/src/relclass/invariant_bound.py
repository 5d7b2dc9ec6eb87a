"""Lower bounds on p-ranks of class groups from ramification data.

A profile lists, for each prime of the base field, the gcd ``e`` of the
ramification indices above it and whether its ideal class is trivial.
The invariant ideals modulo base ideals form the group of Z/e, and the
p-rank of the class group is at least the p-rank of that group minus a
constant that bounds the contribution of invariant principal ideals.
"""
from __future__ import annotations

from dataclasses import dataclass

from .core_arith import factorize
from .errors import DomainError, StructureError
from .finabelian import FiniteAbelianGroup, from_cyclic_list, power_subgroup, rank_p


@dataclass(frozen=True)
class ProfileEntry:
    label: object
    e: int
    class_trivial: bool = True

    def __post_init__(self):
        if self.e < 1:
            raise DomainError(f"ramification gcd must be >= 1, got {self.e}")


@dataclass(frozen=True)
class ClosureContext:
    """Signature and size data of the Galois closure N of L over the base K."""

    r1: int
    r2: int
    group_order: int  # |Gal(N/K)|
    rk_p_base: int = 0  # p-rank of the base class group
    degree: int | None = None  # [N : Q]

    def __post_init__(self):
        if min(self.r1, self.r2) < 0 or self.group_order < 1 or self.rk_p_base < 0:
            raise StructureError("negative or empty closure data")
        deg = self.r1 + 2 * self.r2
        if self.degree is None:
            object.__setattr__(self, "degree", deg)
        elif self.degree != deg:
            raise StructureError(f"r1 + 2 r2 = {deg} but degree is {self.degree}")
        if deg % self.group_order:
            raise StructureError(f"|G| = {self.group_order} does not divide [N:Q] = {deg}")


@dataclass(frozen=True)
class RamificationProfile:
    entries: tuple[ProfileEntry, ...]
    context: ClosureContext | None = None

    @property
    def e_values(self) -> list[int]:
        return [x.e for x in self.entries]


def profile(e_values, context: ClosureContext | None = None, class_trivial=None) -> RamificationProfile:
    """Build a profile from a list of e values (labels are positions)."""
    if class_trivial is None:
        class_trivial = [True] * len(e_values)
    entries = tuple(ProfileEntry(i, int(e), bool(t)) for i, (e, t) in enumerate(zip(e_values, class_trivial)))
    return RamificationProfile(entries, context)


IMAGINARY_QUADRATIC = ClosureContext(r1=0, r2=1, group_order=2, rk_p_base=0)
REAL_QUADRATIC = ClosureContext(r1=2, r2=0, group_order=2, rk_p_base=0)


def profile_for_discriminant(d: int) -> RamificationProfile:
    """Profile of Q(sqrt d)/Q: every ramified prime has e = 2; Q has class number one."""
    f = factorize(d)
    ctx = IMAGINARY_QUADRATIC if d < 0 else REAL_QUADRATIC
    return RamificationProfile(tuple(ProfileEntry(p, 2, True) for p in f.primes), ctx)


def invariant_quotient(prof: RamificationProfile) -> FiniteAbelianGroup:
    return from_cyclic_list(prof.e_values)


def count_divisible(prof: RamificationProfile, p: int, l: int = 1, only_trivial: bool = False) -> int:
    if l < 1:
        raise DomainError("l must be >= 1")
    q = p ** l
    return sum(1 for x in prof.entries if x.e % q == 0 and (x.class_trivial or not only_trivial))


def constant_c(prof_or_ctx) -> tuple[int, int]:
    """(sharp, coarse) rank constant.

    sharp = rk_p(base class group) + (r1 + r2) |G|
    coarse = rk_p(base class group) + [N:Q]^2
    """
    ctx = prof_or_ctx.context if isinstance(prof_or_ctx, RamificationProfile) else prof_or_ctx
    if ctx is None:
        raise StructureError("profile has no closure context")
    sharp = ctx.rk_p_base + (ctx.r1 + ctx.r2) * ctx.group_order
    coarse = ctx.rk_p_base + ctx.degree ** 2
    if sharp > coarse:
        raise StructureError("sharp constant exceeds the coarse one; context inconsistent")
    return sharp, coarse


def rank_lower_bound(prof: RamificationProfile, p: int, l: int = 1, coarse: bool = False) -> int:
    """Lower bound on rk_p of p^(l-1) Cl_L; may be negative."""
    c = constant_c(prof)[1 if coarse else 0]
    return count_divisible(prof, p, l) - c


def relative_rank_lower_bound(prof: RamificationProfile, p: int, l: int = 1, coarse: bool = False) -> int:
    """Same bound counting only primes whose class is trivial in the base."""
    c = constant_c(prof)[1 if coarse else 0]
    return count_divisible(prof, p, l, only_trivial=True) - c


def quotient_rank(prof: RamificationProfile, p: int, l: int = 1) -> int:
    """rk_p of p^(l-1) times the invariant quotient group."""
    return rank_p(power_subgroup(invariant_quotient(prof), p ** (l - 1)), p)
