"""Truncated Dirichlet series, restricted-prime Euler products, singularity
probing, Tauberian shape prediction and inverse asymptotic fitting.

Two arithmetic modes: ``"exact"`` (object arrays of ints/Fractions, for
identity checks) and ``"float"`` (float64, for asymptotics).  Mixing them is
an error.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Sequence

import numpy as np

from . import kernels
from .core_arith import ResidueRule, primes_up_to
from .errors import (BoundsError, ConsistencyError, DomainError, FitError,
                     ModeError, UnsupportedError)

MAX_TERMS = 10**7
MAX_LOCAL_DEGREE = 8
MAX_GAMMA = 8
MODES = ("exact", "float")
EULER_GAMMA = 0.5772156649015329

PrimePred = Callable[[int], bool]


# ------------------------------------------------------------------ series


@dataclass(frozen=True, eq=False)
class CoeffSeries:
    """Coefficients a_1..a_N of sum a_n n^-s; index 0 is unused."""

    coeffs: np.ndarray
    mode: str = "float"

    def __post_init__(self):
        if self.mode not in MODES:
            raise ModeError(f"unknown mode {self.mode!r}")
        want = object if self.mode == "exact" else np.float64
        c = np.asarray(self.coeffs)
        if c.dtype != want:
            c = c.astype(want)
        if self.mode == "float" and not np.isfinite(c[1:2]).all():
            raise DomainError("first coefficient must be finite")
        c.setflags(write=False)
        object.__setattr__(self, "coeffs", c)

    @property
    def N(self) -> int:
        return len(self.coeffs) - 1

    def __getitem__(self, n):
        return self.coeffs[n]

    def __len__(self):
        return self.N

    def support(self) -> np.ndarray:
        return np.flatnonzero(self.coeffs[1:] != 0) + 1

    def partial_sums(self) -> np.ndarray:
        c = self.coeffs.astype(np.float64) if self.mode == "exact" else self.coeffs
        out = np.cumsum(c)
        out[0] = 0.0
        return out

    def equals(self, other: "CoeffSeries") -> bool:
        _check_modes(self, other)
        return self.N == other.N and all(a == b for a, b in zip(self.coeffs[1:], other.coeffs[1:]))

    def __mul__(self, other):
        return mul(self, other)

    def __add__(self, other):
        _check_modes(self, other)
        _check_n(self, other)
        return CoeffSeries(self.coeffs + other.coeffs, self.mode)

    def __sub__(self, other):
        _check_modes(self, other)
        _check_n(self, other)
        return CoeffSeries(self.coeffs - other.coeffs, self.mode)

    def scale(self, k) -> "CoeffSeries":
        if self.mode == "exact":
            k = Fraction(k)
            return CoeffSeries(np.array([_norm(x * k) for x in self.coeffs], dtype=object), "exact")
        return CoeffSeries(self.coeffs * float(k), "float")

    def to_float(self) -> "CoeffSeries":
        return CoeffSeries(self.coeffs.astype(np.float64), "float")

    def __repr__(self):
        head = ", ".join(str(x) for x in self.coeffs[1:9])
        return f"CoeffSeries(N={self.N}, mode={self.mode}, [{head}{', ...' if self.N > 8 else ''}])"


def _norm(x):
    if isinstance(x, Fraction) and x.denominator == 1:
        return int(x)
    return x


def _zeros(N: int, mode: str) -> np.ndarray:
    if mode == "exact":
        out = np.empty(N + 1, dtype=object)
        out[:] = 0
        return out
    return np.zeros(N + 1, dtype=np.float64)


def _check_modes(a: CoeffSeries, b: CoeffSeries):
    if a.mode != b.mode:
        raise ModeError(f"cannot combine {a.mode} and {b.mode} series")


def _check_n(a: CoeffSeries, b: CoeffSeries):
    if a.N != b.N:
        raise DomainError(f"truncations differ: {a.N} vs {b.N}")


def series_from(values: Sequence, mode: str = "float") -> CoeffSeries:
    """Series with a_n = values[n-1]."""
    c = _zeros(len(values), mode)
    c[1:] = list(values) if mode == "exact" else np.asarray(values, dtype=np.float64)
    return CoeffSeries(c, mode)


def unit_series(N: int, mode: str = "float") -> CoeffSeries:
    c = _zeros(N, mode)
    c[1] = 1
    return CoeffSeries(c, mode)


def zeta_series(N: int, mode: str = "float") -> CoeffSeries:
    c = _zeros(N, mode)
    c[1:] = 1
    return CoeffSeries(c, mode)


def mul(A: CoeffSeries, B: CoeffSeries) -> CoeffSeries:
    """Dirichlet convolution."""
    _check_modes(A, B)
    _check_n(A, B)
    if A.mode == "float":
        return CoeffSeries(kernels.dirichlet_convolve(A.coeffs, B.coeffs), "float")
    return CoeffSeries(_sparse_convolve(A.coeffs, B.coeffs), "exact")


def _sparse_convolve(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    N = len(a) - 1
    out = _zeros(N, "exact")
    na = np.flatnonzero(a[1:] != 0) + 1
    nb = np.flatnonzero(b[1:] != 0) + 1
    if len(na) > len(nb):
        a, b, na, nb = b, a, nb, na
    for d in na:
        d = int(d)
        k = int(np.searchsorted(nb, N // d, side="right"))
        if not k:
            break
        e = nb[:k]
        out[d * e] += a[d] * b[e]
    return out


def dilate(A: CoeffSeries, k: int) -> CoeffSeries:
    """The series A(ks): coefficient a_n moves to n^k."""
    if k < 1:
        raise DomainError("dilation factor must be >= 1")
    out = _zeros(A.N, A.mode)
    n = 1
    while n ** k <= A.N:
        out[n ** k] = A.coeffs[n]
        n += 1
    return CoeffSeries(out, A.mode)


# ----------------------------------------------------------- Euler products


@dataclass(frozen=True)
class EulerProductSpec:
    """prod over primes p with pred(p) of num(t)/den(t), t = p^(-k s).

    ``num`` and ``den`` are integer coefficient tuples with constant term 1.
    """

    pred: PrimePred
    num: tuple[int, ...] = (1,)
    den: tuple[int, ...] = (1,)
    k: int = 1
    name: str = ""

    def __post_init__(self):
        num = tuple(int(x) for x in self.num)
        den = tuple(int(x) for x in self.den)
        if not num or not den or num[0] != 1 or den[0] != 1:
            raise DomainError("local factor must have constant term 1")
        if max(len(num), len(den)) - 1 > MAX_LOCAL_DEGREE:
            raise DomainError(f"local factor degree exceeds {MAX_LOCAL_DEGREE}")
        if self.k < 1:
            raise DomainError("substitution exponent must be >= 1")
        object.__setattr__(self, "num", num)
        object.__setattr__(self, "den", den)

    @classmethod
    def zeta(cls, pred: PrimePred | None = None, name: str = "zeta") -> "EulerProductSpec":
        """prod (1 - p^-s)^-1 over the primes accepted by ``pred``."""
        return cls(pred or ResidueRule(), (1,), (1, -1), 1, name)

    @classmethod
    def polynomial(cls, pred: PrimePred, coeffs: Sequence[int], k: int = 1, name: str = "") -> "EulerProductSpec":
        return cls(pred, tuple(coeffs), (1,), k, name)

    @property
    def abscissa(self) -> float:
        return 1.0 / self.k

    def local_series(self, degree: int) -> list[int]:
        """Power-series coefficients c_0..c_degree of num(t)/den(t)."""
        c = [0] * (degree + 1)
        for j in range(degree + 1):
            acc = self.num[j] if j < len(self.num) else 0
            for i in range(1, min(j, len(self.den) - 1) + 1):
                acc -= self.den[i] * c[j - i]
            c[j] = acc
        return c

    def log_first_coeff(self) -> int:
        return self.local_series(1)[1]

    def local_value(self, t: float) -> float:
        num = sum(c * t ** i for i, c in enumerate(self.num))
        den = sum(c * t ** i for i, c in enumerate(self.den))
        return num / den


def _pred_flags(pred: PrimePred, primes: np.ndarray) -> np.ndarray:
    if isinstance(pred, ResidueRule):
        flags = pred.table()[primes % pred.modulus]
        for p in pred.exclude:
            flags[primes == p] = False
        for p in pred.include:
            flags[primes == p] = True
        return flags
    return np.fromiter((bool(pred(int(p))) for p in primes), dtype=bool, count=len(primes))


def expand(spec: EulerProductSpec, N: int, mode: str = "float") -> CoeffSeries:
    """Dirichlet coefficients of the Euler product up to N."""
    if N > MAX_TERMS:
        raise BoundsError(f"N = {N} exceeds {MAX_TERMS}")
    if N < 1:
        raise BoundsError("N must be >= 1")
    a = _zeros(N, mode)
    a[1] = 1
    primes = primes_up_to(N)
    primes = primes[_pred_flags(spec.pred, primes)]
    maxdeg = max(1, int(math.log2(N)) // spec.k + 1)
    local = spec.local_series(maxdeg)
    for p in primes.tolist():
        q0 = p ** spec.k
        if q0 > N:
            break
        base = a[1 : N // q0 + 1].copy()
        q = q0
        j = 1
        while q <= N:
            cj = local[j]
            if cj:
                m = N // q
                a[q : q * m + 1 : q] += cj * base[:m]
            j += 1
            q *= q0
    return CoeffSeries(a, mode)


def _class_flags(pred: PrimePred, N: int):
    """(ok, omega) on 1..N for squarefree n built from primes satisfying pred."""
    primes = primes_up_to(max(N, 2))
    adm = _pred_flags(pred, primes)
    ok, omega, _ = kernels.squarefree_segment(
        1, N + 1, primes, adm, np.zeros(len(primes), bool), 1, [False], 1, [False])
    return ok, omega


def l_direct(pred: PrimePred, gamma: int, N: int, mode: str = "exact") -> CoeffSeries:
    """Indicator of squarefree n <= N with exactly gamma prime factors, all in the class."""
    c = _zeros(N, mode)
    if gamma == 0:
        c[1] = 1
        return CoeffSeries(c, mode)
    ok, omega = _class_flags(pred, N)
    idx = np.flatnonzero(ok & (omega == gamma)) + 1
    c[idx] = 1
    return CoeffSeries(c, mode)


def l_recurrence(pred: PrimePred, gamma: int, N: int, mode: str = "exact") -> list[CoeffSeries]:
    """l_0..l_gamma from l_1 alone via

        g * l_g(s) = l_1(s) l_{g-1}(s) - sum_{j=2..g} (-1)^j l_1(js) l_{g-j}(s).
    """
    out = [unit_series(N, mode)]
    if gamma == 0:
        return out
    l1 = l_direct(pred, 1, N, mode)
    out.append(l1)
    dil = {1: l1}
    for g in range(2, gamma + 1):
        acc = mul(l1, out[g - 1])
        for j in range(2, g + 1):
            if j not in dil:
                dil[j] = dilate(l1, j)
            term = mul(dil[j], out[g - j])
            acc = acc - term if j % 2 == 0 else acc + term
        out.append(acc.scale(Fraction(1, g)) if mode == "exact" else acc.scale(1.0 / g))
    return out


def l_series(pred: PrimePred, gamma: int, N: int, method: str = "both", mode: str = "exact") -> CoeffSeries:
    """Series of squarefree integers with exactly gamma primes from the class.

    ``method="both"`` builds it directly and by recurrence and raises
    ConsistencyError on any coefficient mismatch.
    """
    if not 0 <= gamma <= MAX_GAMMA:
        raise BoundsError(f"gamma must be in [0, {MAX_GAMMA}]")
    if method == "direct":
        return l_direct(pred, gamma, N, mode)
    if method == "recurrence":
        return l_recurrence(pred, gamma, N, mode)[gamma]
    if method != "both":
        raise DomainError(f"unknown method {method!r}")
    d = l_direct(pred, gamma, N, mode)
    r = l_recurrence(pred, gamma, N, mode)[gamma]
    if mode == "exact":
        same = d.equals(r)
    else:
        same = np.allclose(d.coeffs[1:], r.coeffs[1:], atol=1e-9)
    if not same:
        bad = next(n for n in range(1, N + 1) if d[n] != r[n])
        raise ConsistencyError(f"l_{gamma}: direct and recurrence differ at n = {bad}: {d[bad]} vs {r[bad]}")
    return d


# -------------------------------------------------------------- evaluation


def _e1(x: float) -> float:
    """Exponential integral E1(x) for x > 0."""
    if x <= 0:
        raise DomainError("E1 needs x > 0")
    if x < 1.0:
        # series: -gamma - ln x + sum (-1)^(k+1) x^k / (k k!)
        s = 0.0
        term = 1.0
        for k in range(1, 60):
            term *= -x / k
            s -= term / k
            if abs(term) < 1e-18:
                break
        return -EULER_GAMMA - math.log(x) + s
    # continued fraction (modified Lentz)
    b = x + 1.0
    c = 1e300
    d = 1.0 / b
    h = d
    for i in range(1, 200):
        an = -i * i
        b += 2.0
        d = 1.0 / (an * d + b)
        c = b + an / c
        delta = c * d
        h *= delta
        if abs(delta - 1.0) < 1e-15:
            break
    return h * math.exp(-x)


def class_density(pred: PrimePred, upto: int = 10**6) -> float:
    """Share of primes in (upto/2, upto] accepted by pred."""
    primes = primes_up_to(upto)
    top = primes[primes > upto // 2]
    return float(np.count_nonzero(_pred_flags(pred, top))) / len(top)


def l1_regular_part(pred: PrimePred, prime_limit: int = 10**7) -> float:
    """Constant term of l_1(s) - density * log(1/(s-1)) at s = 1.

    Mertens-type evaluation: sum_{p <= P} 1/p - density (log log P + gamma_E),
    where gamma_E is Euler's constant.
    """
    primes = primes_up_to(prime_limit)
    sel = primes[_pred_flags(pred, primes)]
    s = float(np.sum(1.0 / sel.astype(np.float64)))
    dens = class_density(pred, prime_limit)
    return s - dens * (math.log(math.log(prime_limit)) + EULER_GAMMA)


@dataclass(frozen=True)
class Evaluation:
    value: float
    tail: float  # estimated contribution of the omitted part
    cutoff: int

    def __float__(self):
        return self.value


def evaluate_detail(obj, sigma: float, prime_limit: int = 10**6) -> Evaluation:
    """Value at real sigma of a series (partial sum) or Euler product.

    For an Euler product the primes above ``prime_limit`` are accounted for
    by the integral comparison sum_{p>P} p^-x ~ density * E1((x-1) log P),
    with the class density measured from the primes just below P.
    """
    if isinstance(obj, CoeffSeries):
        n = np.arange(1, obj.N + 1, dtype=np.float64)
        c = obj.coeffs[1:].astype(np.float64)
        if sigma <= 0:
            raise DomainError("series evaluation needs sigma > 0")
        terms = c * n ** (-sigma)
        # crude tail: next block behaves like the last decile of the terms
        last = np.abs(c[-max(1, obj.N // 10):]).mean() if obj.N else 0.0
        tail = last * obj.N ** (1 - sigma) / (sigma - 1) if sigma > 1 else math.inf
        return Evaluation(float(terms.sum()), float(tail), obj.N)
    spec: EulerProductSpec = obj
    if sigma <= spec.abscissa:
        raise DomainError(f"sigma = {sigma} is not above the abscissa {spec.abscissa}")
    primes = primes_up_to(prime_limit)
    primes = primes[_pred_flags(spec.pred, primes)]
    if len(primes) == 0:
        return Evaluation(1.0, 0.0, prime_limit)
    t = primes.astype(np.float64) ** (-spec.k * sigma)
    num = np.zeros_like(t)
    for i, c in enumerate(spec.num):
        num += c * t ** i
    den = np.zeros_like(t)
    for i, c in enumerate(spec.den):
        den += c * t ** i
    logv = float(np.log(num / den).sum())
    c1 = spec.log_first_coeff()
    dens = class_density(spec.pred, prime_limit)
    x = (spec.k * sigma - 1.0) * math.log(prime_limit)
    tail = c1 * dens * _e1(x)
    return Evaluation(math.exp(logv + tail), tail, prime_limit)


def evaluate(obj, sigma: float, prime_limit: int = 10**6) -> float:
    return evaluate_detail(obj, sigma, prime_limit).value


def probe_ladder(kmax: int = 12, eps0: float = 0.1) -> np.ndarray:
    return eps0 * 2.0 ** -np.arange(1, kmax + 1)


@dataclass(frozen=True)
class ProbeResult:
    exponent: float
    intercept: float
    max_residual: float
    eps: tuple[float, ...]
    log_values: tuple[float, ...]


def exponent_probe(spec: EulerProductSpec, sigma0: float = 1.0, ladder=None,
                   prime_limit: int = 10**6, tol: float = 0.05) -> ProbeResult:
    """Singularity exponent of an Euler product at sigma0 by slope fitting.

    Fits log F(sigma0 + eps) = kappa * log(1/eps) + const over the ladder.
    """
    eps = probe_ladder() if ladder is None else np.asarray(ladder, dtype=np.float64)
    vals = np.array([math.log(evaluate(spec, sigma0 + e, prime_limit)) for e in eps])
    if not np.isfinite(vals).all():
        raise FitError("non-finite values on the probe ladder")
    x = np.log(1.0 / eps)
    A = np.vstack([x, np.ones_like(x)]).T
    coef, *_ = np.linalg.lstsq(A, vals, rcond=None)
    resid = vals - A @ coef
    worst = float(np.abs(resid).max())
    if worst > tol:
        raise FitError(f"probe ladder is not log-linear (max residual {worst:.3g})", worst)
    return ProbeResult(float(coef[0]), float(coef[1]), worst, tuple(eps.tolist()), tuple(vals.tolist()))


# -------------------------------------------------------------- Tauberian

_LANCZOS_G = 7
_LANCZOS = (
    0.99999999999980993, 676.5203681218851, -1259.1392167224028,
    771.32342877765313, -176.61502916214059, 12.507343278686905,
    -0.13857109526572012, 9.9843695780195716e-6, 1.5056327351493116e-7,
)


def gamma_fn(x: float) -> float:
    """Gamma function by the Lanczos approximation (g = 7, 9 terms)."""
    if x <= 0 and float(x).is_integer():
        raise DomainError("Gamma has poles at non-positive integers")
    if x < 0.5:
        return math.pi / (math.sin(math.pi * x) * gamma_fn(1.0 - x))
    x -= 1.0
    a = _LANCZOS[0]
    t = x + _LANCZOS_G + 0.5
    for i in range(1, len(_LANCZOS)):
        a += _LANCZOS[i] / (x + i)
    return math.sqrt(2 * math.pi) * t ** (x + 0.5) * math.exp(-t) * a


@dataclass(frozen=True)
class AsymptoticShape:
    """amplitude * x^alpha * (log x)^b * (log log x)^c"""

    amplitude: float
    alpha: float = 1.0
    b: float = 0.0
    c: float = 0.0

    def __post_init__(self):
        if self.alpha < 0:
            raise DomainError("alpha must be >= 0")

    def __call__(self, x):
        x = np.asarray(x, dtype=np.float64)
        out = self.amplitude * x ** self.alpha
        if self.b:
            out = out * np.log(x) ** self.b
        if self.c:
            out = out * np.log(np.log(x)) ** self.c
        return out

    def describe(self) -> str:
        parts = [f"{self.amplitude:.6g}", f"x^{self.alpha:.6g}"]
        if self.b:
            parts.append(f"(log x)^{self.b:.6g}")
        if self.c:
            parts.append(f"(log log x)^{self.c:.6g}")
        return " * ".join(parts)


def tauberian_predict(alpha0: float, b0: float, g0: float) -> AsymptoticShape:
    """Partial-sum shape for a series behaving like g0 (s-1)^-alpha0 (log 1/(s-1))^b0 at s = 1."""
    if alpha0 < 0:
        raise DomainError("alpha0 must be >= 0")
    if alpha0 == 0:
        if b0 == 0:
            raise UnsupportedError("alpha0 = 0 needs b0 != 0")
        if b0 < 1:
            raise DomainError("alpha0 = 0 needs b0 >= 1")
        return AsymptoticShape(b0 * g0, 1.0, -1.0, b0 - 1)
    return AsymptoticShape(g0 / gamma_fn(alpha0), 1.0, alpha0 - 1, b0)


# --------------------------------------------------------------- fitting

PARAMS = ("alpha", "b", "c")


@dataclass(frozen=True)
class FitResult:
    shape: AsymptoticShape
    free: tuple[str, ...]
    shift: float
    residuals: tuple[float, ...]  # relative, y_fit / y - 1
    max_residual: float
    condition: float
    x_range: tuple[float, float]

    @property
    def alpha(self):
        return self.shape.alpha

    @property
    def b(self):
        return self.shape.b

    @property
    def c(self):
        return self.shape.c


def asymptotic_fit(xs, ys, free: Sequence[str] = ("alpha", "b"), fixed: dict | None = None,
                   max_condition: float = 1e8, shift: float = 0.0) -> FitResult:
    """Least squares on log y = log a + alpha log x + b log log x + c log(log log x + shift).

    Exponents not in ``free`` take their value from ``fixed`` (default 0).
    ``shift`` carries a known constant term of the log singularity into the
    loglog factor.
    """
    xs = np.asarray(xs, dtype=np.float64)
    ys = np.asarray(ys, dtype=np.float64)
    fixed = dict(fixed or {})
    free = tuple(free)
    for k in free + tuple(fixed):
        if k not in PARAMS:
            raise DomainError(f"unknown exponent {k!r}")
    if len(xs) != len(ys) or len(xs) < 6:
        raise FitError("need at least 6 sample points")
    if (ys <= 0).any() or (xs <= 0).any():
        raise FitError("samples must be positive")
    if math.log10(xs.max() / xs.min()) < 2 - 1e-9:
        raise FitError("samples must span at least two decades")
    lx = np.log(xs)
    cols = {"alpha": lx}
    if "b" in free or fixed.get("b") or "c" in free or fixed.get("c"):
        if (lx <= 1).any():
            raise FitError("log log x undefined at these samples")
        cols["b"] = np.log(lx)
    if "c" in free or fixed.get("c"):
        if (cols["b"] + shift <= 0).any():
            raise FitError("log log log x undefined at these samples")
        cols["c"] = np.log(cols["b"] + shift)
    target = np.log(ys)
    for k, v in fixed.items():
        if k not in free and v:
            target = target - v * cols[k]
    design = np.vstack([np.ones_like(lx)] + [cols[k] for k in free]).T
    scale = np.linalg.norm(design, axis=0)
    cond = float(np.linalg.cond(design / scale))
    if not np.isfinite(cond) or cond > max_condition:
        raise FitError(f"design matrix ill-conditioned (cond {cond:.3g})")
    coef, *_ = np.linalg.lstsq(design, target, rcond=None)
    params = {k: float(fixed.get(k, 0.0)) for k in PARAMS}
    for k, v in zip(free, coef[1:]):
        params[k] = float(v)
    shape = AsymptoticShape(float(math.exp(coef[0])), max(params["alpha"], 0.0), params["b"], params["c"])
    fit = np.exp(design @ coef + (np.log(ys) - target))
    rel = fit / ys - 1.0
    return FitResult(shape, free, shift, tuple(rel.tolist()), float(np.abs(rel).max()), cond,
                     (float(xs.min()), float(xs.max())))


def linear_log_fit(xs, ys) -> tuple[float, float, float]:
    """Fit y = a + k log x; returns (a, k, max relative residual)."""
    xs = np.asarray(xs, dtype=np.float64)
    ys = np.asarray(ys, dtype=np.float64)
    A = np.vstack([np.ones_like(xs), np.log(xs)]).T
    coef, *_ = np.linalg.lstsq(A, ys, rcond=None)
    rel = (A @ coef) / ys - 1.0
    return float(coef[0]), float(coef[1]), float(np.abs(rel).max())
