"""Finite-X estimators, experiment configuration and report emission."""
from __future__ import annotations

import csv
import hashlib
import io
import json
import math
import os
from dataclasses import asdict, dataclass
from typing import Callable, Iterable, Sequence

import numpy as np

from . import dirichlet, family_count as fc
from .core_arith import is_prime
from .errors import ConfigError, ConsistencyError, DomainError, UnsupportedError
from .finabelian import FiniteAbelianGroup, hom_count

CONFIG_KEYS = ("family", "limit", "base_conductor", "gamma_max", "modulus", "omega_condition")


# ----------------------------------------------------------------- estimators


def _in_family(records, X):
    return [r for r in records if r.C < X]


def prob_estimate(records: Iterable, rank_accessor: Callable, r: int, X: int) -> float:
    """Share (by weight) of records with C < X whose rank is at most r."""
    recs = _in_family(records, X)
    total = sum(x.weight for x in recs)
    if total == 0:
        raise DomainError(f"no records with C < {X}")
    hit = 0
    for x in recs:
        rk = rank_accessor(x)
        if rk is None:
            raise UnsupportedError("record without rank data")
        if rk <= r:
            hit += x.weight
    return hit / total


def moment_estimate(records: Iterable, hom_target: FiniteAbelianGroup, X: int) -> float:
    """Average |Hom(Cl, target)| over records with C < X.

    Uses 2^(k * rk2) for an elementary abelian 2-group target of rank k,
    and the full class group otherwise.
    """
    recs = _in_family(records, X)
    total = sum(x.weight for x in recs)
    if total == 0:
        raise DomainError(f"no records with C < {X}")
    inv = hom_target.invariant_factors
    elem2 = all(d == 2 for d in inv)
    acc = 0
    for x in recs:
        if x.rank is None or x.disc is None or x.disc > 0:
            raise UnsupportedError("moment needs exact rank data (imaginary quadratic records)")
        if elem2:
            acc += x.weight * 2 ** (len(inv) * x.rank)
        else:
            from .quadforms import class_group

            acc += x.weight * hom_count(class_group(x.disc), hom_target)
    return acc / total


@dataclass(frozen=True)
class EstimateRow:
    X: int
    N: int
    N_imag: int
    probs: tuple[float, ...]  # P(rk <= r) for r = 0..len-1
    moment: float
    per_gamma: tuple[int, ...]

    def __post_init__(self):
        for p in self.probs:
            if not 0.0 <= p <= 1.0:
                raise ConsistencyError(f"probability {p} outside [0, 1]")
        if self.N_imag and self.moment < 1.0:
            raise ConsistencyError("moment below 1 although the trivial map is counted")


def estimate_rows(counts: fc.GridCounts, r_max: int) -> list[EstimateRow]:
    probs = [counts.prob_rank_le(r) for r in range(r_max + 1)]
    mom = counts.moment(2)
    rows = []
    for j, X in enumerate(counts.grid):
        if counts.imag_total[j] == 0:
            continue
        rows.append(EstimateRow(int(X), int(counts.total[j]), int(counts.imag_total[j]),
                                tuple(float(p[j]) for p in probs), float(mom[j]),
                                tuple(int(v) for v in counts.by_gamma[j])))
    return rows


def chain_check(counts: fc.GridCounts, r: int, c: int = 2) -> list[tuple[int, float, float, bool]]:
    """P(rk <= r) <= sum_{gamma <= r + c} N_gamma / N on the imaginary subfamily."""
    out = []
    p = counts.prob_rank_le(r)
    g = min(r + c, counts.gamma_max)
    cum = counts.imag_by_gamma[:, : g + 1].sum(axis=1)
    for j, X in enumerate(counts.grid):
        if counts.imag_total[j] == 0:
            continue
        rhs = float(cum[j] / counts.imag_total[j]) if r + c <= counts.gamma_max else 1.0
        out.append((int(X), float(p[j]), rhs, bool(p[j] <= rhs + 1e-15)))
    return out


# ------------------------------------------------------------------- config


@dataclass(frozen=True)
class ExperimentConfig:
    command: str
    family: str = "quadratic"
    limit: int = 10**6
    grid_decades: int = 3
    per_decade: int = 4
    base_conductor: int = 7
    gamma_max: int = 4
    modulus: int = 2
    omega_condition: tuple[int, int] | None = None
    p: int = 2
    l: int = 1
    r: int = 3
    output: str | None = None
    workers: int = 1
    cache_dir: str | None = None
    tame_only: bool = True

    def __post_init__(self):
        if not is_prime(self.p):
            raise ConfigError(f"p = {self.p} is not prime")
        if self.l < 1:
            raise ConfigError("l must be >= 1")
        if self.workers < 1:
            raise ConfigError("workers must be >= 1")
        if self.limit < 2:
            raise ConfigError("limit must be >= 2")
        if self.gamma_max < 0 or self.gamma_max > 12:
            raise ConfigError("gamma_max must be in [0, 12]")
        if self.modulus < 1:
            raise ConfigError("modulus must be >= 1")

    def grid(self) -> list[int]:
        try:
            g = fc.geometric_grid(self.limit, self.grid_decades, self.per_decade)
        except DomainError as e:
            raise ConfigError(str(e)) from None
        if len(g) < 3 or any(b <= a for a, b in zip(g, g[1:])):
            raise ConfigError("grid must be ascending with at least 3 points")
        return g


def _parse_omega(value) -> tuple[int, int] | None:
    if value is None or value == "":
        return None
    if isinstance(value, (list, tuple)) and len(value) == 2:
        return int(value[0]), int(value[1])
    if isinstance(value, str):
        # "2^1" or "2"
        p, _, l = value.partition("^")
        try:
            return int(p), int(l or 1)
        except ValueError:
            raise ConfigError(f"bad omega_condition {value!r}") from None
    raise ConfigError(f"bad omega_condition {value!r}")


def load_config_file(path: str) -> dict:
    try:
        with open(path) as fh:
            doc = json.load(fh)
    except OSError as e:
        raise ConfigError(f"cannot read config {path}: {e}") from None
    except json.JSONDecodeError as e:
        raise ConfigError(f"{path}: invalid JSON: {e}") from None
    if not isinstance(doc, dict):
        raise ConfigError(f"{path}: top level must be an object")
    unknown = set(doc) - set(CONFIG_KEYS)
    if unknown:
        raise ConfigError(f"{path}: unknown keys {sorted(unknown)}")
    out = dict(doc)
    if "omega_condition" in out:
        out["omega_condition"] = _parse_omega(out["omega_condition"])
    for k in ("limit", "base_conductor", "gamma_max", "modulus"):
        if k in out:
            try:
                out[k] = int(out[k])
            except (TypeError, ValueError):
                raise ConfigError(f"{path}: {k} must be an integer") from None
    return out


# ------------------------------------------------------------------ output


def fmt(v) -> str:
    if isinstance(v, (bool, np.bool_)):
        return "1" if v else "0"
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        v = float(v)
        if math.isnan(v):
            return "nan"
        return f"{v:.12g}"
    if v is None:
        return ""
    return str(v)


def csv_text(header: Sequence[str], rows: Iterable[Sequence]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    w.writerows([fmt(v) for v in row] for row in rows)
    return buf.getvalue()


def write_reports(reports: dict[str, str], output: str | None, stream=None) -> None:
    """Write each report to ``output/<name>``, or concatenate to ``stream``."""
    if output is None:
        import sys

        stream = stream or sys.stdout
        for name, text in reports.items():
            if len(reports) > 1:
                stream.write(f"# {name}\n")
            stream.write(text)
        return
    os.makedirs(output, exist_ok=True)
    for name, text in reports.items():
        with open(os.path.join(output, name), "w", newline="\n") as fh:
            fh.write(text)


# ------------------------------------------------------------------ runner


def family_spec(cfg: ExperimentConfig) -> fc.FamilySpec:
    fam = cfg.family.replace(" ", "")
    if fam.lower() in ("quadratic", "c2-all"):
        return fc.quadratic_spec(cfg.modulus)
    if fam.upper().startswith("A4"):
        return fc.a4_spec(fc.cubic_base(cfg.base_conductor))
    try:
        fc.abelian_family(fam)
    except DomainError:
        raise ConfigError(f"unknown family {cfg.family!r}; expected quadratic, A4, "
                          f"or one of {sorted(fc.FAMILIES)}") from None
    return fc.abelian_spec(fam, cfg.tame_only, cfg.modulus, cfg.omega_condition)


def cached_grid(cfg: ExperimentConfig, spec: fc.FamilySpec, grid: Sequence[int]) -> fc.GridCounts:
    if cfg.cache_dir is None:
        return fc.count_grid(spec, grid, cfg.gamma_max, cfg.workers)
    key = hashlib.sha256(repr((spec, list(grid), cfg.gamma_max)).encode()).hexdigest()[:20]
    path = os.path.join(cfg.cache_dir, f"grid_{key}.npz")
    if os.path.exists(path):
        z = np.load(path)
        opt = {k: z[k] for k in ("imag_total", "imag_by_rank", "imag_by_gamma") if k in z.files}
        return fc.GridCounts(str(z["family"]), z["grid"], z["total"], z["by_gamma"], **opt)
    res = fc.count_grid(spec, grid, cfg.gamma_max, cfg.workers)
    os.makedirs(cfg.cache_dir, exist_ok=True)
    arrays = {k: v for k, v in asdict(res).items() if isinstance(v, np.ndarray)}
    np.savez(path, family=np.array(res.family), **arrays)
    return res


def counts_report(counts: fc.GridCounts) -> str:
    gm = counts.gamma_max
    header = ["family", "X", "N"] + [f"N_gamma{g}" for g in range(gm + 1)] + [f"N_gamma_gt{gm}"]
    rows = [[counts.family, int(X), int(counts.total[j])] + [int(v) for v in counts.by_gamma[j]]
            for j, X in enumerate(counts.grid)]
    return csv_text(header, rows)


@dataclass(frozen=True)
class FitRow:
    model: str
    target: str
    alpha: float
    b: float
    c: float
    amplitude: float
    max_residual: float
    x_lo: float
    x_hi: float


def fit_rows(counts: fc.GridCounts, spec: fc.FamilySpec) -> list[FitRow]:
    """Growth-exponent fits for the family total and (quadratic) moment/subfamilies."""
    x = counts.grid.astype(np.float64)
    rows = []
    y = counts.total.astype(np.float64)
    pos = y > 0
    if pos.sum() >= 6:
        free, fixed = ("alpha", "b"), {}
        if spec.kind == "abelian":
            free, fixed = ("b",), {"alpha": 1.0}
        if spec.square_C:
            free, fixed = ("alpha",), {}
        try:
            f = dirichlet.asymptotic_fit(x[pos], y[pos], free, fixed)
            rows.append(FitRow("x^alpha (log x)^b", "N", f.alpha, f.b, f.c, f.shape.amplitude,
                               f.max_residual, *f.x_range))
        except Exception as e:  # reported, not fatal
            rows.append(FitRow(f"failed: {e}", "N", math.nan, math.nan, math.nan, math.nan, math.nan,
                               float(x[0]), float(x[-1])))
    if spec.kind == "quadratic":
        kappa = dirichlet.l1_regular_part(spec.marked)
        for g in range(1, counts.gamma_max + 1):
            yg = counts.n_gamma(g).astype(np.float64)
            ok = yg > 0
            if ok.sum() < 6:
                continue
            try:
                f = dirichlet.asymptotic_fit(x[ok], yg[ok], ("b",), {"alpha": 1.0, "c": g - 1}, shift=kappa)
                rows.append(FitRow(f"x (log x)^b (loglog x + {kappa:.6f})^{g - 1}", f"N_gamma{g}",
                                   f.alpha, f.b, f.c, f.shape.amplitude, f.max_residual, *f.x_range))
            except Exception as e:
                rows.append(FitRow(f"failed: {e}", f"N_gamma{g}", math.nan, math.nan, math.nan,
                                   math.nan, math.nan, float(x[0]), float(x[-1])))
        m = counts.moment(2)
        ok = np.isfinite(m)
        a, k, res = dirichlet.linear_log_fit(x[ok], m[ok])
        rows.append(FitRow("a + k log x", "moment_C2", math.nan, k, math.nan, a, res,
                           float(x[ok][0]), float(x[ok][-1])))
    return rows


def fits_report(rows: list[FitRow]) -> str:
    header = ["model", "target", "alpha", "b", "c", "amplitude", "max_residual", "x_lo", "x_hi"]
    return csv_text(header, [[getattr(r, h) for h in header] for r in rows])


def estimates_report(rows: list[EstimateRow], r_max: int) -> str:
    if not rows:
        return csv_text(["X"], [])
    gm = len(rows[0].per_gamma) - 2
    header = (["X", "N", "N_imag"] + [f"P_rk_le_{r}" for r in range(r_max + 1)] + ["E_hom_C2"]
              + [f"N_gamma{g}" for g in range(gm + 1)] + [f"N_gamma_gt{gm}"])
    return csv_text(header, [[x.X, x.N, x.N_imag, *x.probs, x.moment, *x.per_gamma] for x in rows])


def ratio_report(counts: fc.GridCounts, gammas: Sequence[int], decades: int = 3) -> tuple[str, list[str]]:
    header = ["X"] + [f"ratio_gamma{g}" for g in gammas]
    reps = [fc.hypothesis_ratio(counts, g, decades) for g in gammas]
    rows = [[int(X)] + [rep.ratios[j] for rep in reps] for j, X in enumerate(counts.grid)]
    verdicts = [f"{counts.family} gamma={g}: ratio strictly decreasing from X={rep.window_start}: "
                f"{'yes' if rep.decreasing else 'no'}" for g, rep in zip(gammas, reps)]
    return csv_text(header, rows), verdicts


def run(cfg: ExperimentConfig) -> dict[str, str]:
    """Counting/fitting experiments; returns report name -> text.  Deterministic."""
    spec = family_spec(cfg)
    grid = cfg.grid()
    counts = cached_grid(cfg, spec, grid)
    reports = {"counts.csv": counts_report(counts)}
    verdicts = []
    if cfg.command in ("fit", "run"):
        reports["fits.csv"] = fits_report(fit_rows(counts, spec))
    if cfg.command in ("moments", "run"):
        if counts.imag_by_rank is None:
            raise UnsupportedError(f"family {cfg.family} carries no exact rank data")
        rows = estimate_rows(counts, cfg.r)
        reports["estimates.csv"] = estimates_report(rows, cfg.r)
        mom = [x.moment for x in rows]
        inc = all(b > a for a, b in zip(mom, mom[1:]))
        verdicts.append(f"moment E|Hom(Cl, C2)| strictly increasing along the grid: {'yes' if inc else 'no'}")
        chain = chain_check(counts, cfg.r)
        bad = [c for c in chain if not c[3]]
        verdicts.append(f"P(rk <= {cfg.r}) <= sum_(gamma <= {cfg.r}+2) N_gamma/N at every X: "
                        f"{'yes' if not bad else 'no'}")
        if bad:
            raise ConsistencyError(f"estimator chain violated at X = {bad[0][0]}")
    if cfg.command in ("hypothesis", "run"):
        text, v = ratio_report(counts, list(range(cfg.gamma_max + 1)))
        reports["ratios.csv"] = text
        verdicts += v
    if verdicts:
        reports["verdicts.txt"] = "\n".join(verdicts) + "\n"
    return reports
