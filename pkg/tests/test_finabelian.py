import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from oracles import brute_group_elements, brute_hom_count
from relclass import finabelian as fa
from relclass.errors import DomainError

orders = st.lists(st.integers(1, 12), min_size=0, max_size=4)


def test_smith_diagonal_examples():
    assert fa.smith_diagonal([[2, 0], [0, 3]]) == [1, 6]
    assert fa.smith_diagonal([[4, 0], [0, 6]]) == [2, 12]
    assert fa.smith_diagonal([[0, 0], [0, 0]]) == []
    assert fa.smith_diagonal([[2, 4], [1, 2]]) == [1]


@given(st.lists(st.lists(st.integers(-20, 20), min_size=3, max_size=3), min_size=3, max_size=3))
def test_smith_diagonal_invariants(m):
    d = fa.smith_diagonal(m)
    assert all(x > 0 for x in d)
    assert all(b % a == 0 for a, b in zip(d, d[1:]))
    assert len(d) == np.linalg.matrix_rank(np.array(m, dtype=float))
    det = round(abs(np.linalg.det(np.array(m, dtype=float))))
    if len(d) == 3:
        assert math.prod(d) == det
    entries = [x for row in m for x in row]
    assert (d[0] if d else 0) == math.gcd(*entries)


def test_group_normal_form():
    A = fa.from_cyclic_list([4, 6])
    assert A.invariant_factors == (2, 12)
    assert str(A) == "C2 x C12"
    assert str(fa.FiniteAbelianGroup.trivial()) == "1"
    assert fa.FiniteAbelianGroup.parse("C2 x C2 x C12") == fa.from_cyclic_list([2, 2, 12])
    with pytest.raises(DomainError):
        fa.FiniteAbelianGroup((4, 6))


@given(orders)
def test_order_counts_roundtrip(ords):
    A = fa.from_cyclic_list(ords)
    counts = {}
    for x in fa.elements(A):
        n = fa.element_order(A, x)
        counts[n] = counts.get(n, 0) + 1
    assert fa.from_order_counts(A.order, counts) == A


@given(orders, st.sampled_from([2, 3, 5]))
def test_rank_p_counts_p_torsion(ords, p):
    A = fa.from_cyclic_list(ords)
    killed = sum(1 for x in brute_group_elements(A.invariant_factors)
                 if all((p * xi) % m == 0 for xi, m in zip(x, A.invariant_factors)))
    assert killed == p ** fa.rank_p(A, p)


def test_rank_p_rejects_composite():
    with pytest.raises(DomainError):
        fa.rank_p(fa.from_cyclic_list([4]), 4)


@given(orders, st.integers(1, 12))
def test_power_subgroup_brute(ords, k):
    A = fa.from_cyclic_list(ords)
    inv = A.invariant_factors
    image = {tuple((k * xi) % m for xi, m in zip(x, inv)) for x in brute_group_elements(inv)}
    assert fa.power_subgroup(A, k).order == len(image)
    assert fa.torsion_subgroup(A, k).order * len(image) == A.order


@given(st.lists(st.integers(1, 8), max_size=2), st.lists(st.integers(1, 8), max_size=2))
def test_hom_count_brute(a, b):
    A, B = fa.from_cyclic_list(a), fa.from_cyclic_list(b)
    assert fa.hom_count(A, B) == brute_hom_count(A.invariant_factors, B.invariant_factors)


def test_hom_count_saturates():
    big = fa.from_cyclic_list([2] * 70)
    v, sat = fa.hom_count_u64(big, fa.from_cyclic_list([2]))
    assert sat and v == fa.U64_MAX
    v, sat = fa.hom_count_u64(fa.from_cyclic_list([4]), fa.from_cyclic_list([2]))
    assert (v, sat) == (2, False)


def test_quotient_and_subgroup():
    A = fa.from_cyclic_list([2, 4])
    H, els = fa.subgroup_generated(A, [(0, 2)])
    assert H.order == 2 and len(els) == 2
    assert fa.quotient(A, [(0, 2)]) == fa.from_cyclic_list([2, 2])
    assert fa.quotient(A, [(1, 1)]).order == 2


@given(orders, orders)
def test_product_order(a, b):
    A, B = fa.from_cyclic_list(a), fa.from_cyclic_list(b)
    assert (A * B).order == A.order * B.order
    for p in (2, 3):
        assert fa.rank_p(A * B, p) == fa.rank_p(A, p) + fa.rank_p(B, p)
