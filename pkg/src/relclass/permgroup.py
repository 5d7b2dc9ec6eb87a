"""Small permutation groups: ramification invariants, splitting types,
and cohomology of F2-modules by explicit cochain linear algebra.

Points are 1-based in the public API (cycle notation), 0-based inside.
"""
from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass
from functools import reduce
from itertools import product
from typing import Iterable, Sequence

import numpy as np

from .errors import DomainError, SizeError, StructureError, UnsupportedError

MAX_DEGREE = 16
MAX_ORDER = 10_000
MAX_COHOM_ORDER = 24
MAX_MODULE_DIM = 8


@dataclass(frozen=True)
class Perm:
    images: tuple[int, ...]

    def __post_init__(self):
        n = len(self.images)
        if n > MAX_DEGREE:
            raise SizeError(f"degree {n} exceeds {MAX_DEGREE}")
        if sorted(self.images) != list(range(n)):
            raise DomainError(f"not a permutation: {self.images}")

    @classmethod
    def identity(cls, n: int) -> "Perm":
        return cls(tuple(range(n)))

    @classmethod
    def from_cycles(cls, n: int, cycles: Iterable[Sequence[int]]) -> "Perm":
        img = list(range(n))
        for cyc in cycles:
            for a, b in zip(cyc, list(cyc[1:]) + [cyc[0]]):
                if not (1 <= a <= n and 1 <= b <= n):
                    raise DomainError(f"point out of range in cycle {cyc}")
                img[a - 1] = b - 1
        return cls(tuple(img))

    @classmethod
    def parse(cls, n: int, text: str) -> "Perm":
        """Cycle notation such as "(135)(246)" or "(1 3 5)(2 4 6)"."""
        text = text.replace(" ", ",") if " " in text.strip("() ") else text
        cycles = []
        for chunk in text.replace(")", "").split("("):
            chunk = chunk.strip().strip(",")
            if not chunk:
                continue
            if "," in chunk:
                cycles.append([int(x) for x in chunk.split(",") if x])
            else:
                cycles.append([int(x) for x in chunk])
        return cls.from_cycles(n, cycles)

    @property
    def degree(self) -> int:
        return len(self.images)

    def __mul__(self, other: "Perm") -> "Perm":
        # apply other first, then self
        return Perm(tuple(self.images[i] for i in other.images))

    def __call__(self, point: int) -> int:
        return self.images[point - 1] + 1

    def inverse(self) -> "Perm":
        inv = [0] * self.degree
        for i, j in enumerate(self.images):
            inv[j] = i
        return Perm(tuple(inv))

    def __pow__(self, k: int) -> "Perm":
        base = self if k >= 0 else self.inverse()
        out = Perm.identity(self.degree)
        for _ in range(abs(k)):
            out = out * base
        return out

    def is_identity(self) -> bool:
        return all(i == j for i, j in enumerate(self.images))

    def cycles(self) -> list[tuple[int, ...]]:
        seen = [False] * self.degree
        out = []
        for i in range(self.degree):
            if seen[i]:
                continue
            cyc = []
            j = i
            while not seen[j]:
                seen[j] = True
                cyc.append(j + 1)
                j = self.images[j]
            out.append(tuple(cyc))
        return out

    def cycle_type(self) -> tuple[int, ...]:
        return tuple(sorted((len(c) for c in self.cycles()), reverse=True))

    def order(self) -> int:
        return reduce(math.lcm, self.cycle_type(), 1)

    def __str__(self):
        cyc = [c for c in self.cycles() if len(c) > 1]
        if not cyc:
            return "()"
        sep = "," if self.degree > 9 else ""
        return "".join("(" + sep.join(map(str, c)) + ")" for c in cyc)

    def __repr__(self):
        return f"Perm({self})"


class PermGroup:
    """A permutation group with its full element list (identity first)."""

    def __init__(self, degree: int, generators: Sequence[Perm], elements: Sequence[Perm]):
        self.degree = degree
        self.generators = tuple(generators)
        self.elements = tuple(elements)
        self._set = frozenset(self.elements)
        self._index = {g: i for i, g in enumerate(self.elements)}
        self.identity = Perm.identity(degree)

    def __len__(self):
        return len(self.elements)

    @property
    def order(self) -> int:
        return len(self.elements)

    def __contains__(self, g):
        return g in self._set

    def __iter__(self):
        return iter(self.elements)

    def index_of(self, g: Perm) -> int:
        return self._index[g]

    def subgroup(self, generators: Sequence[Perm]) -> "PermGroup":
        for g in generators:
            if g not in self:
                raise StructureError(f"{g} is not in the group")
        return closure(self.degree, generators)

    def is_subgroup_of(self, other: "PermGroup") -> bool:
        return self._set <= other._set

    def is_normal_in(self, other: "PermGroup") -> bool:
        return all(g * h * g.inverse() in self for g in other.generators for h in self.generators)

    def is_cyclic(self) -> bool:
        return any(g.order() == self.order for g in self.elements)

    def is_transitive(self) -> bool:
        return len(self.orbit(1)) == self.degree

    def orbit(self, point: int) -> set[int]:
        return {g(point) for g in self.elements}

    def stabilizer(self, point: int) -> "PermGroup":
        elts = [g for g in self.elements if g(point) == point]
        return PermGroup(self.degree, elts, elts)

    def conjugate(self, g: Perm) -> frozenset:
        ginv = g.inverse()
        return frozenset(g * h * ginv for h in self.elements)

    def multiplication_table(self) -> np.ndarray:
        n = self.order
        tab = np.empty((n, n), dtype=np.int32)
        for i, a in enumerate(self.elements):
            for j, b in enumerate(self.elements):
                tab[i, j] = self._index[a * b]
        return tab

    def __repr__(self):
        gens = ", ".join(map(str, self.generators))
        return f"PermGroup(degree={self.degree}, order={self.order}, gens=[{gens}])"


def closure(degree: int, generators: Sequence[Perm]) -> PermGroup:
    """Breadth-first closure of ``generators`` in S_degree."""
    if degree > MAX_DEGREE:
        raise SizeError(f"degree {degree} exceeds {MAX_DEGREE}")
    gens = [g for g in generators]
    for g in gens:
        if g.degree != degree:
            raise DomainError(f"generator {g} has degree {g.degree}, expected {degree}")
    ident = Perm.identity(degree)
    elements = [ident]
    seen = {ident}
    frontier = [ident]
    while frontier:
        nxt = []
        for x in frontier:
            for g in gens:
                y = g * x
                if y not in seen:
                    seen.add(y)
                    elements.append(y)
                    nxt.append(y)
                    if len(elements) > MAX_ORDER:
                        raise SizeError(f"group order exceeds {MAX_ORDER}")
        frontier = nxt
    return PermGroup(degree, gens, elements)


def symmetric_group(n: int) -> PermGroup:
    if n == 1:
        return closure(1, [])
    gens = [Perm.from_cycles(n, [(1, 2)]), Perm.from_cycles(n, [tuple(range(1, n + 1))])]
    return closure(n, gens)


def cyclic_regular(n: int) -> PermGroup:
    if n == 1:
        return closure(1, [])
    return closure(n, [Perm.from_cycles(n, [tuple(range(1, n + 1))])])


def a4_in_s6() -> PermGroup:
    """A4 acting on the six edges of a tetrahedron, as a subgroup of S6.

    Generated by (34)(56), the image of a double transposition, and
    (135)(246), the image of a 3-cycle.
    """
    return closure(6, [Perm.parse(6, "(34)(56)"), Perm.parse(6, "(135)(246)")])


def e_of(g: Perm) -> int:
    """gcd of the orbit sizes of <g> on the points (fixed points count as 1)."""
    return reduce(math.gcd, (len(c) for c in g.cycles()), 0)


def omega_set(G: PermGroup, p: int, l: int = 1) -> frozenset:
    """Elements g with p^l dividing e(g)."""
    if l < 1:
        raise DomainError("l must be >= 1")
    q = p ** l
    out = frozenset(g for g in G.elements if e_of(g) % q == 0)
    # closed under conjugation and under powers coprime to the element order
    for g in out:
        for h in G.generators:
            if h * g * h.inverse() not in out:
                raise StructureError("omega set not conjugation-stable")
        n = g.order()
        for k in range(1, n):
            if math.gcd(k, n) == 1 and g ** k not in out:
                raise StructureError("omega set not stable under coprime powers")
    return out


@dataclass(frozen=True)
class RamificationLocal:
    """Decomposition group D and inertia group I inside G, with I normal in D."""

    group: PermGroup
    decomposition: PermGroup
    inertia: PermGroup

    def __post_init__(self):
        if not self.decomposition.is_subgroup_of(self.group):
            raise StructureError("decomposition group is not a subgroup of G")
        if not self.inertia.is_subgroup_of(self.decomposition):
            raise StructureError("inertia group is not contained in the decomposition group")
        if not self.inertia.is_normal_in(self.decomposition):
            raise StructureError("inertia group is not normal in the decomposition group")

    @property
    def tame(self) -> bool:
        return self.inertia.is_cyclic()


@dataclass(frozen=True)
class SplittingType:
    pairs: tuple[tuple[int, int], ...]  # (e, f), sorted

    @property
    def e_gcd(self) -> int:
        return reduce(math.gcd, (e for e, _ in self.pairs), 0)

    @property
    def degree(self) -> int:
        return sum(e * f for e, f in self.pairs)

    def notation(self) -> str:
        """Residue degrees with ramification exponents, e.g. "(2 1^2 1^2)"."""
        toks = [str(f) if e == 1 else f"{f}^{e}" for e, f in self.pairs]
        sep = " " if any(e > 1 for e, _ in self.pairs) else ""
        return "(" + sep.join(toks) + ")"

    def __str__(self):
        return self.notation()


def double_cosets(G: PermGroup, D: PermGroup, H: PermGroup) -> list[frozenset]:
    """Double cosets D g H, in order of first appearance in G."""
    seen = set()
    out = []
    for g in G.elements:
        if g in seen:
            continue
        dc = frozenset(d * g * h for d in D.elements for h in H.elements)
        seen |= dc
        out.append(dc)
    return out


def splitting_type(local: RamificationLocal, H: PermGroup) -> SplittingType:
    """Splitting of a prime with local data (D, I) in the fixed field of H."""
    G, D, I = local.group, local.decomposition, local.inertia
    if not H.is_subgroup_of(G):
        raise StructureError("H is not a subgroup of G")
    pairs = []
    for dc in double_cosets(G, D, H):
        g = next(iter(dc))
        conj = H.conjugate(g)
        inter = sum(1 for x in I.elements if x in conj)
        e = I.order // inter
        f = len(dc) // (H.order * e)
        pairs.append((e, f))
    st = SplittingType(tuple(sorted(pairs)))
    if st.degree * H.order != G.order:
        raise StructureError("sum of e*f differs from the index of H")
    return st


# ---------------------------------------------------------------- F2 algebra


def _rank_f2(rows: Iterable[int]) -> int:
    """Rank over F2 of vectors packed into Python ints."""
    basis: dict[int, int] = {}
    rank = 0
    for v in rows:
        while v:
            top = v.bit_length() - 1
            if top in basis:
                v ^= basis[top]
            else:
                basis[top] = v
                rank += 1
                break
    return rank


def _as_f2(m) -> np.ndarray:
    return np.asarray(m, dtype=np.uint8) % 2


def _f2_matmul(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    return (a.astype(np.int64) @ b.astype(np.int64) % 2).astype(np.uint8)


class F2GModule:
    """A finite-dimensional F2[G]-module given by one matrix per generator.

    Matrices act on column vectors.  The action of every group element is
    obtained by walking words in the generators, and the module is rejected
    if two words for the same element act differently.
    """

    def __init__(self, group: PermGroup, generator_matrices: Sequence, name: str = "",
                 dim: int | None = None):
        if len(generator_matrices) != len(group.generators):
            raise DomainError("need one matrix per group generator")
        mats = [_as_f2(m) for m in generator_matrices]
        if mats:
            dim = mats[0].shape[0]
        elif dim is None:
            raise DomainError("a group without generators needs an explicit module dimension")
        if dim > MAX_MODULE_DIM:
            raise SizeError(f"module dimension {dim} exceeds {MAX_MODULE_DIM}")
        for m in mats:
            if m.shape != (dim, dim):
                raise DomainError("generator matrices must be square of equal size")
        self.group = group
        self.dim = dim
        self.name = name
        self.generator_matrices = mats
        self.action = self._extend(mats)

    def _extend(self, mats) -> dict:
        G = self.group
        act = {G.identity: np.eye(self.dim, dtype=np.uint8)}
        frontier = [G.identity]
        while frontier:
            nxt = []
            for x in frontier:
                for g, m in zip(G.generators, mats):
                    y = g * x
                    my = _f2_matmul(m, act[x])
                    if y in act:
                        if not np.array_equal(act[y], my):
                            raise StructureError("generator matrices do not satisfy the group relations")
                    else:
                        act[y] = my
                        nxt.append(y)
            frontier = nxt
        # the word check above covers every relation reachable by BFS; also verify multiplicativity
        for a in G.elements:
            for b in G.generators:
                if not np.array_equal(act[a * b], _f2_matmul(act[a], act[b])):
                    raise StructureError("action is not a homomorphism")
        return act

    def matrix(self, g: Perm) -> np.ndarray:
        return self.action[g]

    def fixed_dim(self) -> int:
        if self.dim == 0:
            return 0
        rows = np.vstack([(m ^ np.eye(self.dim, dtype=np.uint8)) for m in self.generator_matrices]) \
            if self.generator_matrices else np.zeros((0, self.dim), dtype=np.uint8)
        return self.dim - _rank_f2(_pack_rows(rows))

    def __repr__(self):
        return f"F2GModule({self.name or '?'}, dim={self.dim}, |G|={self.group.order})"


def _pack_rows(mat: np.ndarray) -> list[int]:
    out = []
    for row in np.asarray(mat, dtype=np.uint8):
        v = 0
        for j in np.flatnonzero(row):
            v |= 1 << int(j)
        out.append(v)
    return out


def _coboundary_rank(G: PermGroup, M: F2GModule, n: int) -> int:
    """Rank of d^n : C^n(G, M) -> C^(n+1)(G, M) over F2.

    Cochains are all functions G^n -> M (inhomogeneous, unnormalised).  Signs
    disappear in characteristic 2:
      (d f)(g1..g_{n+1}) = g1 f(g2..g_{n+1})
                           + sum_i f(g1..g_i g_{i+1}..g_{n+1})
                           + f(g1..g_n)
    Each basis cochain's image is packed into one Python int.
    """
    els = G.elements
    order = len(els)
    mul = G.multiplication_table()
    dim = M.dim
    mats = [M.matrix(g) for g in els]
    src_pos = {s: i for i, s in enumerate(product(range(order), repeat=n))}
    tgt_tuples = product(range(order), repeat=n + 1)
    # image of basis cochain (source tuple, basis vector k), packed as bits
    images = [0] * (len(src_pos) * dim)

    # build by iterating over target tuples: each contributes to a few sources
    for t_i, t in enumerate(tgt_tuples):
        contribs = []
        # term g1 * f(g2..)
        contribs.append((t[1:], mats[t[0]]))
        for i in range(n):
            merged = t[:i] + (int(mul[t[i], t[i + 1]]),) + t[i + 2:]
            contribs.append((merged, None))
        contribs.append((t[:n], None))
        for s, m in contribs:
            s_i = src_pos[s]
            for k in range(dim):
                if m is None:
                    images[s_i * dim + k] ^= 1 << (t_i * dim + k)
                else:
                    bits = 0
                    for j in np.flatnonzero(m[:, k]):
                        bits |= 1 << (t_i * dim + int(j))
                    images[s_i * dim + k] ^= bits
    return _rank_f2(images)


def cohomology_dim(G: PermGroup, M: F2GModule, degree: int) -> tuple[int, int, int]:
    """(dim Z^n, dim B^n, dim H^n) for n in {0, 1, 2}."""
    if degree not in (0, 1, 2):
        raise UnsupportedError("only degrees 0, 1, 2 are supported")
    if G.order > MAX_COHOM_ORDER:
        raise SizeError(f"group order {G.order} exceeds {MAX_COHOM_ORDER}")
    if M.dim > MAX_MODULE_DIM:
        raise SizeError(f"module dimension {M.dim} exceeds {MAX_MODULE_DIM}")
    if M.group is not G and set(M.group.elements) != set(G.elements):
        raise DomainError("module is over a different group")
    cochain_dim = M.dim * G.order ** degree
    rank_out = _coboundary_rank(G, M, degree)
    rank_in = _coboundary_rank(G, M, degree - 1) if degree > 0 else 0
    z = cochain_dim - rank_out
    return z, rank_in, z - rank_in


def equivariant_hom_count(M: F2GModule, N: F2GModule, G: PermGroup | None = None) -> int:
    """Number of G-equivariant F2-linear maps M -> N.

    Solves X M(g) = N(g) X for every generator g; X is dim N x dim M.
    """
    G = G or M.group
    if set(M.group.elements) != set(N.group.elements):
        raise DomainError("modules are over different groups")
    m, n = M.dim, N.dim
    nvar = m * n
    eqs = []
    # variable (r, c) of X has index r*m + c
    for g in G.generators:
        A = M.matrix(g).astype(np.int64)
        B = N.matrix(g).astype(np.int64)
        for r in range(n):
            for c in range(m):
                # (X A)[r, c] - (B X)[r, c]
                v = 0
                for k in range(m):
                    if A[k, c]:
                        v ^= 1 << (r * m + k)
                for k in range(n):
                    if B[r, k]:
                        v ^= 1 << (k * m + c)
                eqs.append(v)
    return 2 ** (nvar - _rank_f2(eqs))


def all_linear_maps_equivariant_count(M: F2GModule, N: F2GModule) -> tuple[int, int]:
    """Brute force over every dim N x dim M matrix: (equivariant, surjective equivariant)."""
    m, n = M.dim, N.dim
    total = surj = 0
    gens = M.group.generators
    for bits in range(2 ** (m * n)):
        X = np.array([(bits >> i) & 1 for i in range(m * n)], dtype=np.uint8).reshape(n, m)
        if all(np.array_equal(_f2_matmul(X, M.matrix(g)), _f2_matmul(N.matrix(g), X)) for g in gens):
            total += 1
            if _rank_f2(_pack_rows(X.T)) == n:
                surj += 1
    return total, surj


# ----------------------------------------------------------- module builders


def cyclic_group(n: int) -> PermGroup:
    """C_n as the regular permutation group on n points."""
    return cyclic_regular(n)


def trivial_module(G: PermGroup, dim: int = 1) -> F2GModule:
    eye = np.eye(dim, dtype=np.uint8)
    return F2GModule(G, [eye] * len(G.generators), name=f"trivial{dim}", dim=dim)


def klein_twist(G: PermGroup | None = None) -> F2GModule:
    """C2 x C2 with a generator of C3 permuting its three nonzero elements."""
    G = G or cyclic_group(3)
    if G.order != 3 or len(G.generators) != 1:
        raise DomainError("klein twist module needs C3 with one generator")
    return F2GModule(G, [np.array([[0, 1], [1, 1]], dtype=np.uint8)], name="klein-twist")


def permutation_module(G: PermGroup) -> F2GModule:
    """F2^n with G permuting coordinates through its action on points."""
    n = G.degree
    mats = []
    for g in G.generators:
        m = np.zeros((n, n), dtype=np.uint8)
        for i in range(n):
            m[g.images[i], i] = 1
        mats.append(m)
    return F2GModule(G, mats, name=f"perm{n}", dim=n)


def regular_module(G: PermGroup) -> F2GModule:
    """F2[G] with left multiplication."""
    n = G.order
    mats = []
    for g in G.generators:
        m = np.zeros((n, n), dtype=np.uint8)
        for i, h in enumerate(G.elements):
            m[G.index_of(g * h), i] = 1
        mats.append(m)
    return F2GModule(G, mats, name="regular", dim=n)


def named_group(name: str) -> PermGroup:
    name = name.strip().upper()
    if name in ("A4", "A4S6"):
        return a4_in_s6()
    if name.startswith("C") and name[1:].isdigit():
        return cyclic_group(int(name[1:]))
    if name.startswith("S") and name[1:].isdigit():
        return symmetric_group(int(name[1:]))
    raise DomainError(f"unknown group {name!r}")


def named_module(G: PermGroup, name: str) -> F2GModule:
    name = name.strip().lower()
    if name == "klein-twist":
        return klein_twist(G)
    if name == "trivial" or name.startswith("trivial"):
        dim = int(name[7:] or 1)
        return trivial_module(G, dim)
    if name == "permutation":
        return permutation_module(G)
    if name == "regular":
        return regular_module(G)
    raise DomainError(f"unknown module {name!r}")


# ------------------------------------------------------------- tame table


@dataclass(frozen=True)
class TameRow:
    label: str
    inertia: str
    decomposition: str
    types: tuple[str, ...]


def a4_tame_table() -> list[TameRow]:
    """Splitting of tamely ramified primes in the fixed fields of the Klein
    group (cubic), the point stabiliser (sextic) and the trivial group
    (the degree-12 Galois closure), for each possible (D, I)."""
    G = a4_in_s6()
    t = Perm.parse(6, "(34)(56)")
    s = Perm.parse(6, "(135)(246)")
    klein = G.subgroup([t, s * t * s.inverse()])
    stab = G.stabilizer(1)
    triv = G.subgroup([])
    c2 = G.subgroup([t])
    c3 = G.subgroup([s])
    cases = [
        ("I = D = C2", c2, c2),
        ("I = C2, D = V4", c2, klein),
        ("I = D = C3", c3, c3),
    ]
    rows = []
    for label, inert, dec in cases:
        loc = RamificationLocal(G, dec, inert)
        types = tuple(splitting_type(loc, H).notation() for H in (klein, stab, triv))
        rows.append(TameRow(label, _gens_str(inert), _gens_str(dec), types))
    return rows


def _gens_str(H: PermGroup) -> str:
    return "<" + ", ".join(str(g) for g in H.generators) + ">"


def element_e_histogram(G: PermGroup) -> Counter:
    return Counter(e_of(g) for g in G.elements)
