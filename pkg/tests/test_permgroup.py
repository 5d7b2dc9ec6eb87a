import time

import numpy as np
import pytest
from hypothesis import assume, given, strategies as st

from relclass import permgroup as pg
from relclass.errors import DomainError, SizeError, StructureError

TABLE_ROWS = [
    ("(111)", "(1 1 1^2 1^2)", "(1^2 1^2 1^2 1^2 1^2 1^2)"),
    ("(111)", "(2 1^2 1^2)", "(2^2 2^2 2^2)"),
    ("(1^3)", "(1^3 1^3)", "(1^3 1^3 1^3 1^3)"),
]


def test_perm_basics():
    s = pg.Perm.parse(6, "(135)(246)")
    assert s(1) == 3 and s.order() == 3
    assert str(s) == "(135)(246)"
    t = pg.Perm.parse(6, "(34)(56)")
    # right factor acts first
    assert (s * t)(3) == s(t(3))
    assert (s * s.inverse()) == pg.Perm.identity(6)
    with pytest.raises(DomainError):
        pg.Perm((0, 0, 1))


def test_a4_embedding():
    G = pg.a4_in_s6()
    assert G.order == 12
    assert G.is_transitive()
    assert G.stabilizer(1).order == 2
    hist = pg.element_e_histogram(G)
    # identity (e=1), three double transpositions (e=1, fixed points), eight elements of type (3,3)
    assert hist == {1: 4, 3: 8}


def test_symmetric_group_orders():
    assert [pg.symmetric_group(n).order for n in range(1, 6)] == [1, 2, 6, 24, 120]
    with pytest.raises(SizeError):
        pg.symmetric_group(8)


def test_table1_golden():
    t0 = time.perf_counter()
    rows = pg.a4_tame_table()
    assert [r.types for r in rows] == TABLE_ROWS
    assert time.perf_counter() - t0 < 1.0


def test_omega_two_empty_for_a4():
    assert pg.omega_set(pg.a4_in_s6(), 2, 1) == frozenset()
    assert len(pg.omega_set(pg.a4_in_s6(), 3, 1)) == 8


@given(st.integers(2, 6), st.data())
def test_omega_closed_under_conjugation(n, data):
    G = pg.symmetric_group(n)
    p = data.draw(st.sampled_from([2, 3]))
    om = pg.omega_set(G, p)
    for g in om:
        for h in G.elements:
            assert h * g * h.inverse() in om


def test_ramification_local_validation():
    G = pg.symmetric_group(3)
    D = G.subgroup([pg.Perm.parse(3, "(12)")])
    I = G.subgroup([pg.Perm.parse(3, "(123)")])
    with pytest.raises(StructureError):
        pg.RamificationLocal(G, D, I)


@given(st.integers(2, 5), st.data())
def test_splitting_degrees_sum(n, data):
    G = pg.symmetric_group(n)
    g = data.draw(st.sampled_from(G.elements))
    D = G.subgroup([g])
    loc = pg.RamificationLocal(G, D, D)
    H = G.stabilizer(1)
    st_ = pg.splitting_type(loc, H)
    assert st_.degree == n
    # totally ramified inertia: residue degrees are all 1, e's are the cycle lengths of g
    assert sorted(e for e, _ in st_.pairs) == sorted(len(c) for c in g.cycles())


def test_cohomology_klein_twist():
    G = pg.cyclic_group(3)
    M = pg.klein_twist(G)
    assert [pg.cohomology_dim(G, M, n)[2] for n in (0, 1, 2)] == [0, 0, 0]


def test_cohomology_trivial_c2():
    G = pg.cyclic_group(2)
    M = pg.trivial_module(G)
    assert [pg.cohomology_dim(G, M, n)[2] for n in (0, 1, 2)] == [1, 1, 1]


def test_cohomology_regular_module_is_acyclic():
    for n in (2, 3, 4):
        G = pg.cyclic_group(n)
        M = pg.regular_module(G) if n <= 4 else None
        assert pg.cohomology_dim(G, M, 1)[2] == 0
        assert pg.cohomology_dim(G, M, 2)[2] == 0


def test_cohomology_limits():
    with pytest.raises(SizeError):
        G = pg.symmetric_group(5)
        pg.cohomology_dim(G, pg.trivial_module(G), 1)


def _matrix_order(m, cap=16):
    cur = m.copy()
    for k in range(1, cap + 1):
        if np.array_equal(cur, np.eye(len(m), dtype=np.uint8)):
            return k
        cur = (cur.astype(np.int64) @ m.astype(np.int64) % 2).astype(np.uint8)
    return None


def _cyclic_actions():
    """(n, matrix) pairs over F2 with matrix^n = 1, for n <= 4 and dim <= 3."""
    out = []
    for dim in (1, 2, 3):
        for bits in range(2 ** (dim * dim)):
            m = np.array([(bits >> i) & 1 for i in range(dim * dim)], dtype=np.uint8).reshape(dim, dim)
            k = _matrix_order(m)
            out += [(n, m) for n in (2, 3, 4) if k is not None and n % k == 0]
    return out


CYCLIC_ACTIONS = _cyclic_actions()


@given(st.sampled_from(CYCLIC_ACTIONS))
def test_herbrand_quotient_is_one(action):
    """For cyclic G and a finite module, |H^1| = |H^2|."""
    n, m = action
    G = pg.cyclic_group(n)
    M = pg.F2GModule(G, [m])
    assert pg.cohomology_dim(G, M, 1)[2] == pg.cohomology_dim(G, M, 2)[2]
    # H^0 is the fixed space
    assert pg.cohomology_dim(G, M, 0)[2] == M.fixed_dim()


def test_module_relations_checked():
    G = pg.cyclic_group(3)
    with pytest.raises(StructureError):
        pg.F2GModule(G, [np.array([[0, 1], [1, 0]], dtype=np.uint8)])


def test_equivariant_hom_counts():
    t0 = time.perf_counter()
    G = pg.cyclic_group(3)
    split = pg.equivariant_hom_count(pg.permutation_module(G), pg.klein_twist(G))
    nonsplit = pg.equivariant_hom_count(pg.trivial_module(G), pg.klein_twist(G))
    assert (split, nonsplit) == (4, 1)
    assert pg.all_linear_maps_equivariant_count(pg.permutation_module(G), pg.klein_twist(G)) == (4, 3)
    assert pg.all_linear_maps_equivariant_count(pg.trivial_module(G), pg.klein_twist(G)) == (1, 0)
    assert time.perf_counter() - t0 < 1.0


@given(st.sampled_from(["trivial", "trivial2", "permutation", "regular", "klein-twist"]),
       st.sampled_from(["trivial", "permutation", "klein-twist"]))
def test_hom_count_solver_matches_brute_force(a, b):
    G = pg.cyclic_group(3)
    M, N = pg.named_module(G, a), pg.named_module(G, b)
    assume(M.dim * N.dim <= 12)
    assert pg.equivariant_hom_count(M, N) == pg.all_linear_maps_equivariant_count(M, N)[0]


def test_trivial_group_hom_count():
    G = pg.cyclic_group(1)
    M = pg.trivial_module(G, 2)
    N = pg.trivial_module(G, 3)
    assert pg.equivariant_hom_count(M, N) == 2 ** 6
