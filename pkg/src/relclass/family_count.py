"""Field families over Q ordered by the product of ramified primes.

Abelian families (C2, C3, C2 x C2) are counted per squarefree support: the
number of fields with a given exact ramified set depends only on how many
support primes there are and whether the wild prime is among them.  The A4
family over a cyclic cubic field counts equivariant characters supported on
primes split in the cubic field.

Large counts never materialise records: each segment of integers is reduced
to a (grid point x gamma) histogram, and segment histograms are summed in
segment order, so results do not depend on the worker count.
"""
from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterator, Sequence

import numpy as np

from .core_arith import (ANY_PRIME, NO_PRIME, SEGMENT, ResidueRule, factorize,
                         squarefree_table)
from .errors import BoundsError, DomainError, UnsupportedError
from .finabelian import FiniteAbelianGroup, element_order, elements, from_cyclic_list

MAX_ABELIAN_X = 10**8
MAX_A4_X = 10**12
MAX_RANK_BINS = 16

# cyclic cubic conductors with the class number of the cubic field
_CUBIC_CLASS_NUMBER_ONE = {7: True, 9: True, 13: True}


# ------------------------------------------------------------------ records


@dataclass(frozen=True)
class FieldRecord:
    family: str
    support: tuple[int, ...]
    C: int
    gamma: int
    weight: int = 1
    rank: int | None = None  # exact 2-rank when known
    disc: int | None = None

    @property
    def omega(self) -> int:
        return len(self.support)

    @property
    def imaginary(self) -> bool:
        return self.disc is not None and self.disc < 0


def beta(G: FiniteAbelianGroup) -> Fraction:
    """sum over non-identity g of 1/phi(order(g))."""
    if G.order > 64:
        raise BoundsError("beta is only tabulated for |G| <= 64")
    out = Fraction(0)
    for x in elements(G):
        n = element_order(G, x)
        if n > 1:
            out += Fraction(1, _phi(n))
    return out


def _phi(n: int) -> int:
    out = n
    for p in factorize(n).primes:
        out = out // p * (p - 1)
    return out


# ------------------------------------------------------------ quadratic


def quadratic_fields_for_C(C: int) -> list[int]:
    """Squarefree m (field Q(sqrt m)) whose product of ramified primes is C."""
    if C < 2:
        return []
    if C % 2:
        return [C if C % 4 == 1 else -C]
    h = C // 2
    return sorted([2 * h, -2 * h, h if h % 4 == 3 else -h])


def enumerate_quadratic(X: int) -> Iterator[FieldRecord]:
    """Every quadratic field with C < X, ascending C (then discriminant)."""
    if X > MAX_ABELIAN_X:
        raise BoundsError(f"X = {X} exceeds {MAX_ABELIAN_X}")
    for lo, hi in _segments(X):
        ok, omega, _ = squarefree_table(lo, hi)
        for off in np.flatnonzero(ok):
            C = lo + int(off)
            if C < 2:
                continue
            support = factorize(C).primes
            gamma = len(support) - (C % 2 == 0)
            for m in quadratic_fields_for_C(C):
                disc = m if m % 4 == 1 else 4 * m
                rank = len(support) - 1 if disc < 0 else None
                yield FieldRecord("C2", support, C, gamma, 1, rank, disc)


# ----------------------------------------------------------- abelian counts


def _gaussian_binomial(n: int, k: int, q: int) -> int:
    if k < 0 or k > n:
        return 0
    num = den = 1
    for i in range(k):
        num *= q ** (n - i) - 1
        den *= q ** (i + 1) - 1
    return num // den


def _gl_order(r: int, q: int) -> int:
    return math.prod(q ** r - q ** i for i in range(r))


def elementary_abelian_fields(ell: int, r: int, local_dims: Sequence[int]) -> int:
    """Number of (C_ell)^r-fields ramified exactly at a set of primes.

    Prime i contributes a local character group of F_ell-dimension
    local_dims[i]; we count tuples of nonzero local homomorphisms whose
    images span (F_ell)^r, by Moebius inversion over subspaces, then
    divide by |GL_r(F_ell)|.
    """
    total = 0
    for w in range(r + 1):
        mu = (-1) ** (r - w) * ell ** ((r - w) * (r - w - 1) // 2)
        prod = 1
        for d in local_dims:
            prod *= ell ** (w * d) - 1
        total += _gaussian_binomial(r, w, ell) * mu * prod
    q, rem = divmod(total, _gl_order(r, ell))
    if rem:
        raise ArithmeticError("field count is not divisible by |GL|")
    return q


@dataclass(frozen=True)
class AbelianFamily:
    """Elementary abelian (C_ell)^r over Q."""

    name: str
    ell: int
    r: int
    tame_only: bool = True

    @property
    def group(self) -> FiniteAbelianGroup:
        return from_cyclic_list([self.ell] * self.r)

    def admissible(self) -> ResidueRule:
        # tame primes need ell | p - 1 for a character of order ell
        rule = ResidueRule(self.ell, frozenset({1}))
        if self.tame_only:
            return rule
        return ResidueRule(self.ell, frozenset({1}), include=frozenset({self.ell}))

    def wild_dim(self) -> int:
        # dimension of Hom((Z/ell^k)^*, C_ell) restricted to wild characters
        return 2 if self.ell == 2 else 1

    def weight_table(self, kmax: int = 12) -> np.ndarray:
        """weights[k, wild]: fields per support of k primes (wild = contains ell)."""
        out = np.zeros((kmax + 1, 2), dtype=np.int64)
        for k in range(1, kmax + 1):
            out[k, 0] = elementary_abelian_fields(self.ell, self.r, [1] * k)
            out[k, 1] = elementary_abelian_fields(self.ell, self.r, [self.wild_dim()] + [1] * (k - 1))
        return out

    def inertia_order(self) -> int:
        return self.ell


FAMILIES = {
    "C2": AbelianFamily("C2", 2, 1),
    "C3": AbelianFamily("C3", 3, 1),
    "C2xC2": AbelianFamily("C2xC2", 2, 2),
}


def abelian_family(name: str, tame_only: bool = True) -> AbelianFamily:
    key = name.replace(" ", "").replace("×", "x").upper().replace("X", "x")
    if key not in FAMILIES:
        raise DomainError(f"unsupported group {name!r}; expected one of {sorted(FAMILIES)}")
    fam = FAMILIES[key]
    return AbelianFamily(fam.name, fam.ell, fam.r, tame_only)


def marked_rule(modulus: int = 2, omega_condition: tuple[int, int] | None = None,
                inertia_order: int = 2) -> ResidueRule:
    """Primes counted by gamma: p = 1 mod modulus, p not dividing modulus,
    and tame inertia of order divisible by p0^l for omega_condition (p0, l)."""
    if omega_condition is not None:
        p0, l = omega_condition
        if inertia_order % (p0 ** l):
            return NO_PRIME
    if modulus == 1:
        return ANY_PRIME
    return ResidueRule(modulus, frozenset({1 % modulus}))


def _segments(X: int, size: int = SEGMENT) -> list[tuple[int, int]]:
    return [(lo, min(lo + size, X)) for lo in range(1, X, size)]


def count_abelian(G: str, X: int, tame_only: bool = True, modulus: int = 2,
                  omega_condition: tuple[int, int] | None = None, gamma_max: int = 8):
    """(total, gamma histogram) of G-fields with C < X."""
    res = count_grid(abelian_spec(G, tame_only, modulus, omega_condition), [X], gamma_max)
    return int(res.total[0]), {g: int(c) for g, c in enumerate(res.by_gamma[0]) if c}


def support_weight(G: str, support: Sequence[int], tame_only: bool = True) -> int:
    """Number of G-fields ramified exactly at ``support``."""
    fam = abelian_family(G, tame_only)
    rule = fam.admissible()
    if not support:
        return 0
    if any(not rule(p) for p in support):
        return 0
    dims = [fam.wild_dim() if p == fam.ell else 1 for p in support]
    return elementary_abelian_fields(fam.ell, fam.r, dims)


# ------------------------------------------------------------- A4 family


@dataclass(frozen=True)
class CubicBase:
    conductor: int
    T: frozenset  # residues mod f of split primes
    class_number_one: bool

    def split_rule(self) -> ResidueRule:
        # 2 and 3 divide |A4| and are left out
        return ResidueRule(self.conductor, self.T, exclude=frozenset({2, 3}))


def cubic_base(f: int) -> CubicBase:
    """Cyclic cubic field of conductor f (prime f = 1 mod 3, or f = 9)."""
    if f == 9:
        units = [a for a in range(1, 9) if a % 3]
    elif f > 3 and f % 3 == 1 and factorize(f).omega == 1 and factorize(f).is_squarefree():
        units = list(range(1, f))
    else:
        raise DomainError(f"no cyclic cubic field of conductor {f} in the supported range")
    T = frozenset(pow(a, 3, f) for a in units)
    if len(T) * 3 != len(units):
        raise DomainError(f"cubes mod {f} do not form an index-3 subgroup")
    return CubicBase(f, T, _CUBIC_CLASS_NUMBER_ONE.get(f, False))


def classify_prime(base: CubicBase, p: int) -> str:
    if base.conductor % p == 0:
        return "ramified"
    return "split" if p % base.conductor in base.T else "nonsplit"


def enumerate_a4(base: CubicBase, X: int) -> Iterator[FieldRecord]:
    """Supports n (squarefree, split primes only, n > 1) with n^2 < X."""
    if X > MAX_A4_X:
        raise BoundsError(f"X = {X} exceeds {MAX_A4_X}")
    Y = math.isqrt(X - 1) + 1 if X > 0 else 0  # n^2 < X  <=>  n < Y
    rule = base.split_rule()
    for lo, hi in _segments(Y):
        ok, omega, _ = squarefree_table(lo, hi, rule)
        for off in np.flatnonzero(ok):
            n = lo + int(off)
            if n == 1:
                continue
            support = factorize(n).primes
            k = len(support)
            gamma = k if base.class_number_one else -1
            yield FieldRecord(f"A4/f={base.conductor}", support, n * n, gamma, 3 ** k)


def count_a4(base: CubicBase, X: int, gamma_max: int = 8, use_gamma: bool = True):
    """(total weighted count, gamma histogram) of A4 characters with C < X."""
    if use_gamma and not base.class_number_one:
        raise UnsupportedError(f"gamma buckets need a class-number-one base (f = {base.conductor})")
    res = count_grid(a4_spec(base), [X], gamma_max)
    return int(res.total[0]), {g: int(c) for g, c in enumerate(res.by_gamma[0]) if c}


# ---------------------------------------------------------- grid counting


@dataclass(frozen=True)
class FamilySpec:
    """What to count for each squarefree n in [1, Y)."""

    kind: str  # "abelian", "quadratic", "a4"
    name: str
    admissible: ResidueRule
    marked: ResidueRule
    weights: tuple[tuple[int, int], ...] = ()  # per omega: (tame, wild)
    wild_prime: int = 0
    square_C: bool = False  # C = n^2 (A4) instead of C = n

    def weight_array(self) -> np.ndarray:
        return np.array(self.weights, dtype=np.int64).reshape(-1, 2)


def abelian_spec(G: str, tame_only: bool = True, modulus: int = 2,
                 omega_condition: tuple[int, int] | None = None) -> FamilySpec:
    fam = abelian_family(G, tame_only)
    table = fam.weight_table()
    oc = omega_condition or (fam.ell, 1)
    return FamilySpec("abelian", fam.name, fam.admissible(),
                      marked_rule(modulus, oc, fam.inertia_order()),
                      tuple(map(tuple, table.tolist())), 0 if tame_only else fam.ell)


def quadratic_spec(modulus: int = 2) -> FamilySpec:
    """All quadratic fields (wild prime 2 included), with rank data."""
    fam = abelian_family("C2", tame_only=False)
    table = fam.weight_table()
    return FamilySpec("quadratic", "quadratic", ANY_PRIME, marked_rule(modulus),
                      tuple(map(tuple, table.tolist())), 2)


def a4_spec(base: CubicBase) -> FamilySpec:
    w = tuple((3 ** k, 3 ** k) for k in range(13))
    return FamilySpec("a4", f"A4/f={base.conductor}", base.split_rule(), base.split_rule(),
                      w, 0, square_C=True)


@dataclass
class GridCounts:
    """Cumulative counts at each grid point X (fields with C < X)."""

    family: str
    grid: np.ndarray
    total: np.ndarray  # (G,)
    by_gamma: np.ndarray  # (G, gamma_max + 2); last column is "more than gamma_max"
    imag_total: np.ndarray | None = None  # (G,)
    imag_by_rank: np.ndarray | None = None  # (G, MAX_RANK_BINS)
    imag_by_gamma: np.ndarray | None = None  # (G, gamma_max + 2)

    @property
    def gamma_max(self) -> int:
        return self.by_gamma.shape[1] - 2

    def n_gamma(self, g: int) -> np.ndarray:
        if g > self.gamma_max:
            return np.zeros_like(self.total)
        return self.by_gamma[:, g]

    def moment(self, target_rank_factor: int = 2) -> np.ndarray:
        """Average of target^rk2 over imaginary fields (target C_p gives p^rank)."""
        if self.imag_by_rank is None:
            raise UnsupportedError(f"{self.family}: no exact rank data")
        pw = np.array([float(target_rank_factor) ** r for r in range(MAX_RANK_BINS)])
        with np.errstate(invalid="ignore", divide="ignore"):
            return (self.imag_by_rank * pw).sum(axis=1) / self.imag_total

    def prob_rank_le(self, r: int) -> np.ndarray:
        if self.imag_by_rank is None:
            raise UnsupportedError(f"{self.family}: no exact rank data")
        if r < 0:
            return np.zeros(len(self.grid))
        with np.errstate(invalid="ignore", divide="ignore"):
            return self.imag_by_rank[:, : r + 1].sum(axis=1) / self.imag_total


def _segment_counts(spec: FamilySpec, lo: int, hi: int, ngrid_bounds: np.ndarray, gamma_max: int):
    """Per-segment histograms (not yet cumulative) over grid cells."""
    ok, omega, marked = squarefree_table(lo, hi, spec.admissible, spec.marked)
    n = np.arange(lo, hi, dtype=np.int64)
    keep = ok & (n > 1)
    n = n[keep]
    om = omega[keep].astype(np.int64)
    mk = marked[keep].astype(np.int64)
    G = len(ngrid_bounds)
    # cell j collects n with n < bound_j but not n < bound_{j-1}
    cell = np.searchsorted(ngrid_bounds, n, side="left")
    inside = cell < G
    n, om, mk, cell = n[inside], om[inside], mk[inside], cell[inside]
    table = spec.weight_array()
    wild = (n % spec.wild_prime == 0) if spec.wild_prime else np.zeros(len(n), bool)
    w = table[om, wild.astype(np.int64)]
    gam = np.minimum(mk, gamma_max + 1)
    ncol = gamma_max + 2
    by_gamma = np.zeros(G * ncol, dtype=np.int64)
    np.add.at(by_gamma, cell * ncol + gam, w)
    total = np.zeros(G, dtype=np.int64)
    np.add.at(total, cell, w)
    out = {"total": total, "by_gamma": by_gamma.reshape(G, ncol)}
    if spec.kind == "quadratic":
        odd = n % 2 == 1
        h = n // 2
        imag = np.where(odd, (n % 4 == 3).astype(np.int64), 1 + (h % 4 == 1).astype(np.int64))
        rank = np.minimum(om - 1, MAX_RANK_BINS - 1)
        ir = np.zeros(G * MAX_RANK_BINS, dtype=np.int64)
        np.add.at(ir, cell * MAX_RANK_BINS + rank, imag)
        it = np.zeros(G, dtype=np.int64)
        np.add.at(it, cell, imag)
        ig = np.zeros(G * ncol, dtype=np.int64)
        np.add.at(ig, cell * ncol + gam, imag)
        out["imag_total"] = it
        out["imag_by_rank"] = ir.reshape(G, MAX_RANK_BINS)
        out["imag_by_gamma"] = ig.reshape(G, ncol)
    return out


def _segment_job(args):
    return _segment_counts(*args)


def count_grid(spec: FamilySpec, grid: Sequence[int], gamma_max: int = 8, workers: int = 1) -> GridCounts:
    """Counts of the family at every X in ``grid`` (ascending)."""
    grid = np.asarray(sorted(int(x) for x in grid), dtype=np.int64)
    if len(grid) == 0:
        raise DomainError("empty grid")
    Xmax = int(grid[-1])
    if spec.square_C:
        if Xmax > MAX_A4_X:
            raise BoundsError(f"X = {Xmax} exceeds {MAX_A4_X}")
        # n^2 < X  <=>  n < ceil(sqrt(X))
        bounds = np.array([math.isqrt(int(x) - 1) + 1 if x > 0 else 0 for x in grid], dtype=np.int64)
    else:
        if Xmax > MAX_ABELIAN_X:
            raise BoundsError(f"X = {Xmax} exceeds {MAX_ABELIAN_X}")
        bounds = grid.copy()
    # n contributes to grid point j iff n <= bounds[j] - 1
    ends = bounds - 1
    top = int(bounds[-1])
    jobs = [(spec, lo, hi, ends, gamma_max) for lo, hi in _segments(top)]
    if workers > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=workers) as ex:
            parts = list(ex.map(_segment_job, jobs))
    else:
        parts = [_segment_job(j) for j in jobs]
    G = len(grid)
    acc = {
        "total": np.zeros(G, dtype=np.int64),
        "by_gamma": np.zeros((G, gamma_max + 2), dtype=np.int64),
    }
    if spec.kind == "quadratic":
        acc["imag_total"] = np.zeros(G, dtype=np.int64)
        acc["imag_by_rank"] = np.zeros((G, MAX_RANK_BINS), dtype=np.int64)
        acc["imag_by_gamma"] = np.zeros((G, gamma_max + 2), dtype=np.int64)
    for part in parts:  # fixed segment order
        for k in acc:
            acc[k] += part[k]
    for k in acc:
        acc[k] = np.cumsum(acc[k], axis=0)
    return GridCounts(spec.name, grid, acc["total"], acc["by_gamma"],
                      acc.get("imag_total"), acc.get("imag_by_rank"), acc.get("imag_by_gamma"))


def geometric_grid(limit: int, decades: int, per_decade: int = 4) -> list[int]:
    """Integer grid ending at ``limit``, ``per_decade`` points per decade."""
    if decades < 1 or per_decade < 1:
        raise DomainError("grid needs at least one decade and one point per decade")
    steps = decades * per_decade
    pts = [int(round(limit * 10 ** (-(steps - i) / per_decade))) for i in range(steps + 1)]
    out = sorted(set(p for p in pts if p >= 2))
    if len(out) < 3:
        raise DomainError("grid has fewer than 3 points")
    return out


@dataclass(frozen=True)
class RatioReport:
    grid: tuple[int, ...]
    ratios: tuple[float, ...]
    decreasing: bool  # strictly, over the trailing window
    window_start: int


def hypothesis_ratio(counts: GridCounts, gamma: int, decades: int = 3) -> RatioReport:
    """N_gamma(X) / N(X) along the grid, with a strict-decrease verdict over
    the last ``decades`` decades."""
    if counts.total[-1] <= 0:
        raise DomainError(f"{counts.family}: empty family")
    with np.errstate(invalid="ignore", divide="ignore"):
        ratios = np.where(counts.total > 0, counts.n_gamma(gamma) / np.maximum(counts.total, 1), np.nan)
    start = counts.grid[-1] / 10 ** decades
    idx = np.flatnonzero(counts.grid >= start * (1 - 1e-9))
    tail = ratios[idx]
    dec = bool(len(tail) >= 2 and np.all(np.diff(tail) < 0))
    return RatioReport(tuple(int(x) for x in counts.grid), tuple(float(r) for r in ratios), dec,
                       int(counts.grid[idx[0]]) if len(idx) else int(counts.grid[-1]))
