import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from oracles import divisor_count, squarefree, trial_factor
from relclass import dirichlet as dl
from relclass.core_arith import ResidueRule
from relclass.errors import BoundsError, ConsistencyError, DomainError, FitError, ModeError


def test_zeta_squared_is_divisor_count():
    z = dl.zeta_series(500)
    d = z * z
    assert [int(x) for x in d.coeffs[1:]] == [divisor_count(n) for n in range(1, 501)]


def test_expand_zeta_matches_series():
    a = dl.expand(dl.EulerProductSpec.zeta(), 1000, "exact")
    assert all(x == 1 for x in a.coeffs[1:])


def test_expand_moebius():
    # prod (1 - p^-s) = 1/zeta has coefficients mu(n)
    spec = dl.EulerProductSpec.polynomial(ResidueRule(), [1, -1])
    a = dl.expand(spec, 300, "exact")
    for n in range(1, 301):
        f = trial_factor(n)
        mu = 0 if any(e > 1 for e in f.values()) else (-1) ** len(f)
        assert a[n] == mu


def test_expand_restricted_with_k():
    # prod over p = 1 mod 4 of (1 + p^-2s): squares of squarefree products of such primes
    spec = dl.EulerProductSpec.polynomial(ResidueRule(4, frozenset({1})), [1, 1], k=2)
    a = dl.expand(spec, 2000, "exact")
    want = {m * m for m in range(1, 45) if squarefree(m) and all(p % 4 == 1 for p in trial_factor(m))}
    assert {n for n in range(1, 2001) if a[n]} == want


@given(st.lists(st.integers(-5, 5), min_size=1, max_size=40),
       st.lists(st.integers(-5, 5), min_size=1, max_size=40))
def test_convolution_exact_vs_float(a, b):
    n = min(len(a), len(b))
    A, B = dl.series_from(a[:n], "exact"), dl.series_from(b[:n], "exact")
    af, bf = A.to_float(), B.to_float()
    assert np.allclose((A * B).coeffs[1:].astype(float), (af * bf).coeffs[1:])
    # brute Dirichlet convolution
    for m in range(1, n + 1):
        s = sum(a[d - 1] * b[m // d - 1] for d in range(1, m + 1) if m % d == 0)
        assert (A * B)[m] == s


@given(st.lists(st.integers(-3, 3), min_size=1, max_size=30),
       st.lists(st.integers(-3, 3), min_size=1, max_size=30),
       st.lists(st.integers(-3, 3), min_size=1, max_size=30))
def test_convolution_ring_laws(a, b, c):
    n = min(map(len, (a, b, c)))
    A, B, C = (dl.series_from(x[:n], "exact") for x in (a, b, c))
    assert (A * B).equals(B * A)
    assert ((A * B) * C).equals(A * (B * C))
    assert (A * dl.unit_series(n, "exact")).equals(A)


def test_mode_mixing_rejected():
    with pytest.raises(ModeError):
        dl.zeta_series(10, "exact") * dl.zeta_series(10, "float")


def test_bounds():
    with pytest.raises(BoundsError):
        dl.expand(dl.EulerProductSpec.zeta(), 10**8)
    with pytest.raises(BoundsError):
        dl.l_series(ResidueRule(), 9, 10)


@pytest.mark.parametrize("gamma", [0, 1, 2, 3, 4])
def test_l_series_brute(gamma):
    pred = ResidueRule(4, frozenset({1}))
    a = dl.l_series(pred, gamma, 3000)
    want = [int(squarefree(n) and len(trial_factor(n)) == gamma
                and all(p % 4 == 1 for p in trial_factor(n))) for n in range(1, 3001)]
    assert [int(x) for x in a.coeffs[1:]] == want


def test_l_series_sum_is_euler_product():
    pred = ResidueRule(3, frozenset({1}))
    N = 2000
    total = sum((dl.l_series(pred, g, N).coeffs for g in range(0, 8)), np.zeros(N + 1, dtype=object))
    prod = dl.expand(dl.EulerProductSpec.polynomial(pred, [1, 1]), N, "exact")
    assert list(total[1:]) == list(prod.coeffs[1:])


def test_l_series_mismatch_detected(monkeypatch):
    real = dl.l_direct

    def broken(pred, gamma, N, mode="exact"):
        out = real(pred, gamma, N, mode)
        if gamma == 2:
            c = out.coeffs.copy()
            c[N] += 1
            return dl.CoeffSeries(c, mode)
        return out

    monkeypatch.setattr(dl, "l_direct", broken)
    with pytest.raises(ConsistencyError):
        dl.l_series(ResidueRule(), 2, 100)


def test_evaluate_zeta_two():
    v = dl.evaluate(dl.EulerProductSpec.zeta(), 2.0, 10**5)
    assert abs(v - math.pi ** 2 / 6) < 1e-7
    with pytest.raises(DomainError):
        dl.evaluate(dl.EulerProductSpec.zeta(), 1.0)


def test_exponent_probe_full_zeta():
    r = dl.exponent_probe(dl.EulerProductSpec.zeta(), 1.0, prime_limit=10**6)
    assert abs(r.exponent - 1.0) < 0.01


def test_gamma_function():
    assert abs(dl.gamma_fn(5) - 24) < 1e-9
    assert abs(dl.gamma_fn(0.5) - math.sqrt(math.pi)) < 1e-12
    assert abs(dl.gamma_fn(-0.5) + 2 * math.sqrt(math.pi)) < 1e-11
    with pytest.raises(DomainError):
        dl.gamma_fn(-2)


def test_tauberian_shapes():
    s = dl.tauberian_predict(2, 0, 1)
    assert s.amplitude == pytest.approx(1.0) and (s.alpha, s.b, s.c) == (1.0, 1.0, 0.0)
    s = dl.tauberian_predict(0.5, 0, 1)
    assert abs(s.amplitude - 1 / math.sqrt(math.pi)) < 1e-12 and s.b == -0.5
    s = dl.tauberian_predict(0, 3, 2)
    assert (s.amplitude, s.b, s.c) == (6, -1.0, 2)


@given(st.floats(0.3, 2.0), st.floats(-2.0, 2.0), st.floats(0.1, 10.0))
def test_fit_recovers_exact_shape(alpha, b, amp):
    xs = np.geomspace(1e3, 1e7, 12)
    ys = dl.AsymptoticShape(amp, alpha, b)(xs)
    f = dl.asymptotic_fit(xs, ys, ("alpha", "b"))
    assert abs(f.alpha - alpha) < 1e-6 and abs(f.b - b) < 1e-6
    assert f.max_residual < 1e-9


def test_fit_preconditions():
    xs = np.geomspace(1e3, 1e4, 10)
    with pytest.raises(FitError):
        dl.asymptotic_fit(xs, xs)  # one decade only
    with pytest.raises(FitError):
        dl.asymptotic_fit(xs[:4], xs[:4])
    xs = np.geomspace(1e3, 1e6, 10)
    with pytest.raises(FitError):
        dl.asymptotic_fit(xs, -xs)


def test_linear_log_fit():
    xs = np.geomspace(10, 1e6, 20)
    a, k, res = dl.linear_log_fit(xs, 2 + 0.5 * np.log(xs))
    assert abs(a - 2) < 1e-9 and abs(k - 0.5) < 1e-9 and res < 1e-12


def test_l1_regular_part_all_primes():
    # Mertens: sum 1/p - loglog P -> M - gamma_E
    meissel_mertens = 0.2614972128476428
    assert abs(dl.l1_regular_part(ResidueRule(), 10**6) - (meissel_mertens - dl.EULER_GAMMA)) < 2e-3
