"""Seeded experiment runner tying ensembles to towers and statistics.

Every (n, replica) cell derives its own counter-based stream, so results
are byte-identical regardless of worker count or scheduling. Wall-clock
timings are reported on the summary channel only; the runtime_ms column is
fixed at 0 to keep output files reproducible.
"""
from __future__ import annotations

import csv
import json
import sys

try:
    import tomllib
except ModuleNotFoundError:  # 3.10
    import tomli as tomllib
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from . import comparison, rootfind, stats
from .ensembles import (EnsembleSpec, parse_beta, parse_type1_law,
                        sample_beta_tridiag, sample_kac, sample_type1,
                        eigenvalues_sturm, semicircle_cdf)
from .polynomial import ZeroConfiguration, differentiate_coeffs
from .rng import rng_stream

CSV_COLUMNS = ["experiment_id", "n", "k", "ell", "seed", "value_re",
               "value_im", "centered", "center_re", "center_im",
               "diff_to_k0", "bound", "runtime_ms"]


@dataclass(frozen=True)
class ResultRow:
    experiment_id: str
    n: int
    k: int
    ell: int
    seed: int
    value: complex | None
    centered: bool
    center: complex | None
    diff_to_k0: float | None
    bound: float | None
    error: str | None = None

    def as_csv(self) -> list[str]:
        def num(x):
            return "" if x is None else repr(float(x))

        centered = "error" if self.error is not None else str(self.centered).lower()
        return [self.experiment_id, str(self.n), str(self.k), str(self.ell),
                str(self.seed),
                num(None if self.value is None else self.value.real),
                num(None if self.value is None else self.value.imag),
                centered,
                num(None if self.center is None else self.center.real),
                num(None if self.center is None else self.center.imag),
                num(self.diff_to_k0), num(self.bound), "0"]

    def as_dict(self) -> dict:
        d = dict(zip(CSV_COLUMNS, self.as_csv()))
        if self.error is not None:
            d["error"] = self.error
        return d


@dataclass(frozen=True)
class ExperimentConfig:
    kind: str = "type1"
    law: str = "uniform[-1,1]"
    n_grid: tuple[int, ...] = (10,)
    k_max: int = 1
    ell: int = 1
    mode: str = "A2"
    a: str | None = "n"
    b: str | None = None
    test_function: str = "gauss"
    centering: str = "none"  # none | empirical | analytic
    replicas: int = 1
    center_replicas: int | None = None
    master_seed: int = 0
    workers: int = 1
    experiment_id: str = "experiment"

    def __post_init__(self):
        if self.replicas < 1:
            raise ValueError("replicas must be >= 1")
        if self.k_max >= min(self.n_grid):
            raise ValueError("k_max must be below the smallest n")
        if self.centering not in ("none", "empirical", "analytic"):
            raise ValueError(f"unknown centering {self.centering!r}")
        if self.centering == "analytic" and self.kind != "type1":
            raise ValueError("analytic centering needs a Type-1 law")

    def plan(self) -> stats.ScalingPlan:
        return stats.ScalingPlan(self.mode, self.a, self.b)

    def test_fn(self) -> stats.TestFunction:
        f = stats.get_test_function(self.test_function)
        if self.kind == "type1":
            f.require_admissible(parse_type1_law(self.law)["c0"])
        elif self.kind == "type3":
            f.require_admissible(0.0)
        return f

    def ensemble(self, n: int) -> EnsembleSpec:
        return EnsembleSpec(self.kind, self.law, n)


def config_from_toml(path: str, **overrides) -> ExperimentConfig:
    """Load a nested key/value config file; keyword overrides win."""
    with open(path, "rb") as fh:
        doc = tomllib.load(fh)
    fields: dict = {}
    ens = doc.get("ensemble", {})
    for key in ("kind", "law", "k_max"):
        if key in ens:
            fields[key] = ens[key]
    if "n_grid" in ens:
        fields["n_grid"] = tuple(int(v) for v in ens["n_grid"])
    st = doc.get("statistic", {})
    for key in ("ell", "mode", "a", "b", "test_function", "centering"):
        if key in st:
            fields[key] = st[key]
    run = doc.get("run", {})
    for src, dst in (("replicas", "replicas"), ("center_replicas", "center_replicas"),
                     ("seed", "master_seed"), ("workers", "workers"),
                     ("id", "experiment_id")):
        if src in run:
            fields[dst] = run[src]
    fields.update({k: v for k, v in overrides.items() if v is not None})
    return ExperimentConfig(**fields)


def sample_roots(spec: EnsembleSpec, rng: np.random.Generator) -> ZeroConfiguration:
    """Sample any ensemble kind down to a zero configuration."""
    if spec.kind == "type1":
        return sample_type1(spec, rng)
    if spec.kind == "type2":
        return rootfind.polyroots_coeff(sample_kac(spec, rng))
    beta = parse_beta(spec.law)
    return eigenvalues_sturm(sample_beta_tridiag(spec.n, beta, rng))


@dataclass
class ExperimentResult:
    config: ExperimentConfig
    rows: list[ResultRow]
    error_count: int

    @property
    def exit_code(self) -> int:
        return 3 if self.error_count else 0


def _cell_records(cfg: ExperimentConfig, n: int, replica: int, stage: str):
    """All statistic records plus telescoped bounds for one (n, replica)."""
    rng = rng_stream(cfg.master_seed, replica, f"{stage}:n={n}")
    roots = sample_roots(cfg.ensemble(n), rng)
    tower = rootfind.derivative_tower(roots, cfg.k_max)
    f = cfg.test_fn()
    plan = cfg.plan()
    records = []
    for k in range(tower.k_max + 1):
        value = stats.linear_statistic(tower.levels[k], f, plan, cfg.ell, n, k)
        records.append(stats.LinearStatisticRecord(n=n, k=k, ell=cfg.ell,
                                                   value=value, seed=replica))
    bounds: dict[int, float] = {}
    if (cfg.ell == 1 and cfg.mode == "A2" and cfg.kind == "type1"
            and cfg.centering == "none"):
        total = 0.0
        for k in range(1, tower.k_max + 1):
            total += stats.theorem1_bound(tower.levels[k - 1], f, plan, n - k + 1)
            bounds[k] = total
    return records, bounds


def run_experiment(cfg: ExperimentConfig) -> ExperimentResult:
    """Run every (n, replica) cell, center if configured, and collect rows.

    Failures abort only their own cell and surface as error rows; the
    sweep keeps going.
    """
    cells = [(n, r, "zeros") for n in cfg.n_grid for r in range(cfg.replicas)]
    if cfg.centering == "empirical":
        m = cfg.center_replicas or cfg.replicas
        cells += [(n, r, "center") for n in cfg.n_grid for r in range(m)]

    def work(cell):
        n, replica, stage = cell
        try:
            return cell, _cell_records(cfg, n, replica, stage), None
        except Exception as exc:  # noqa: BLE001 - error rows by design
            return cell, None, f"{type(exc).__name__}: {exc}"

    if cfg.workers > 1:
        with ThreadPoolExecutor(max_workers=cfg.workers) as pool:
            outcomes = list(pool.map(work, cells))
    else:
        outcomes = [work(c) for c in cells]

    main: dict[tuple[int, int], tuple[list, dict]] = {}
    center_batch: list[stats.LinearStatisticRecord] = []
    errors: list[tuple[int, int, str]] = []
    for (n, replica, stage), payload, err in outcomes:
        if err is not None:
            if stage == "zeros":
                errors.append((n, replica, err))
            continue
        records, bounds = payload
        if stage == "zeros":
            main[(n, replica)] = (records, bounds)
        else:
            center_batch.extend(records)

    rows: list[ResultRow] = []
    plan = cfg.plan()
    f = cfg.test_fn()
    for (n, replica) in sorted(main):
        records, bounds = main[(n, replica)]
        if cfg.centering == "empirical":
            records = stats.center_statistic(records, "empirical",
                                             reference=center_batch)
        elif cfg.centering == "analytic":
            records = stats.center_statistic(records, "analytic", law=cfg.law,
                                             f=f, plan=plan)
        base = records[0].value
        for rec in records:
            diff = abs(rec.value - base)
            bound = bounds.get(rec.k)
            if bound is not None and rec.k == 1 and diff > bound:
                raise AssertionError(
                    f"one-step difference {diff} exceeds its proof bound "
                    f"{bound} (n={n}, replica={replica})")
            rows.append(ResultRow(cfg.experiment_id, n, rec.k, rec.ell,
                                  replica, rec.value, rec.centered,
                                  rec.center_estimate, diff, bound))
    for n, replica, err in sorted(errors):
        rows.append(ResultRow(cfg.experiment_id, n, -1, cfg.ell, replica,
                              None, False, None, None, None, error=err))
    rows.sort(key=lambda r: (r.n, r.seed, r.k))
    return ExperimentResult(cfg, rows, len(errors))


def write_csv(rows: list[ResultRow], path: str) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(CSV_COLUMNS)
        for row in rows:
            writer.writerow(row.as_csv())


def write_jsonl(rows: list[ResultRow], path: str) -> None:
    with open(path, "w") as fh:
        for row in rows:
            fh.write(json.dumps(row.as_dict(), sort_keys=True) + "\n")


# ---------------------------------------------------------------------------
# verification sweeps

@dataclass(frozen=True)
class IdentityCase:
    n: int
    t: float
    roots: ZeroConfiguration
    tower: rootfind.DerivativeTower
    certificate: comparison.ComparisonCertificate


def identity_sweep(count: int = 1000, n_min: int = 2, n_max: int = 50,
                   re_bound: float = 10.0, im_bound: float = 1.0,
                   t_bound: float = 5.0, seed: int = 0) -> list[IdentityCase]:
    """Random trace-identity certificates over box configurations."""
    cases = []
    for i in range(count):
        rng = rng_stream(seed, i, "identity")
        n = int(rng.integers(n_min, n_max + 1))
        z = (rng.uniform(-re_bound, re_bound, n)
             + 1j * rng.uniform(-im_bound, im_bound, n))
        roots = ZeroConfiguration(z, im_bound)
        t = float(rng.uniform(-t_bound, t_bound))
        tower = rootfind.derivative_tower(roots, 1)
        cert = comparison.lemma3_check(roots, t, tower)
        cases.append(IdentityCase(n, t, roots, tower, cert))
    return cases


def write_certificates(cases: list[IdentityCase], path: str) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["n", "t", "residual", "bound_c_ok", "bound_trace_ok"])
        for case in cases:
            c = case.certificate
            writer.writerow([case.n, repr(c.t), repr(c.residual),
                             str(c.bound_c_ok).lower(),
                             str(c.bound_trace_ok).lower()])


def oracle_gap(case: IdentityCase) -> float:
    """|Tr exp(itM) via scaling-and-squaring - sum over critical points|."""
    mat = comparison.build_matrix(case.roots)
    oracle = comparison.matrix_exp_trace(mat.entries, case.t)
    direct = complex(np.sum(np.exp(1j * case.t * case.tower.levels[1].zeros)))
    return abs(oracle - direct)


def prop2_sweep(configs: int = 100, n_min: int = 2, n_max: int = 40,
                points: int = 20, re_bound: float = 1.0, im_bound: float = 1.0,
                seed: int = 0) -> list[float]:
    """Max characteristic-polynomial residual per random configuration.

    Checks random points and every computed critical point. The box is
    kept unit-scale; larger boxes make the determinant grow geometrically
    in the degree, and at critical points (where the true value is ~0) its
    absolute double-precision error then swamps a small residual target.
    """
    worst = []
    for i in range(configs):
        rng = rng_stream(seed, i, "prop2")
        n = int(rng.integers(n_min, n_max + 1))
        z = (rng.uniform(-re_bound, re_bound, n)
             + 1j * rng.uniform(-im_bound, im_bound, n))
        roots = ZeroConfiguration(z, im_bound)
        mat = comparison.build_matrix(roots)
        crit = rootfind.critical_points_complex(roots)
        xs = list(rng.uniform(-re_bound - 1, re_bound + 1, points)
                  + 1j * rng.uniform(-im_bound - 1, im_bound + 1, points))
        xs += list(crit.zeros)
        worst.append(max(comparison.char_poly_residual(mat, roots, complex(x))
                         for x in xs))
    return worst


@dataclass(frozen=True)
class TowerCheck:
    n: int
    real_case: bool
    mean_drift: float          # max relative drift of the level means
    mean_abs_increase: float   # max increase of mean |zeros| down the tower
    hull_ok: bool
    interlacing_ok: bool


def _interlaces(level0: ZeroConfiguration, level1: ZeroConfiguration) -> bool:
    z = np.sort(level0.zeros.real)
    distinct, _ = rootfind._cluster_real(z, 1e-12 * level0.scale)
    crit = np.sort(level1.zeros.real)
    for lo, hi in zip(distinct[:-1], distinct[1:]):
        inside = np.count_nonzero((crit > lo + 1e-12 * level0.scale)
                                  & (crit < hi - 1e-12 * level0.scale))
        if inside != 1:
            return False
    return True


def tower_sweep(count: int = 500, n_max: int = 64, k_cap: int = 5,
                re_bound: float = 10.0, im_bound: float = 1.0,
                seed: int = 0) -> list[TowerCheck]:
    """Tower invariants over random real and strip configurations."""
    checks = []
    for i in range(count):
        rng = rng_stream(seed, i, "tower")
        n = int(rng.integers(2, n_max + 1))
        real_case = i % 2 == 0
        if real_case:
            z = rng.uniform(-re_bound, re_bound, n).astype(complex)
            roots = ZeroConfiguration(z, 0.0)
        else:
            z = (rng.uniform(-re_bound, re_bound, n)
                 + 1j * rng.uniform(-im_bound, im_bound, n))
            roots = ZeroConfiguration(z, im_bound)
        K = min(k_cap, n - 1)
        tower = rootfind.derivative_tower(roots, K)
        means = tower.level_means()
        drift = float(np.max(np.abs(means - means[0]))) / (1.0 + abs(means[0]))
        mabs = tower.level_mean_abs()
        increase = float(np.max(np.diff(mabs), initial=0.0))
        hull_ok = all(
            stats.hull_contains(tower.levels[k], tower.levels[k + 1],
                                1e-9 * roots.scale)
            for k in range(tower.k_max))
        inter_ok = (not real_case) or _interlaces(tower.levels[0],
                                                  tower.levels[1])
        checks.append(TowerCheck(n, real_case, drift, increase, hull_ok,
                                 inter_ok))
    return checks


def kac_annulus_experiment(n: int = 256, replicas: int = 20, seed: int = 0,
                           law: str = "kac-gauss", inner: float = 0.85,
                           outer: float = 1.15) -> list[tuple[float, float]]:
    """Fraction of roots of p and p' inside the annulus, per replica."""
    fractions = []
    for r in range(replicas):
        rng = rng_stream(seed, r, "kac")
        p = sample_kac(EnsembleSpec("type2", law, n), rng)
        roots_p = rootfind.polyroots_coeff(p)
        roots_dp = rootfind.polyroots_coeff(differentiate_coeffs(p))

        def frac(cfg):
            mod = np.abs(cfg.zeros)
            return float(np.mean((mod > inner) & (mod < outer)))

        fractions.append((frac(roots_p), frac(roots_dp)))
    return fractions


@dataclass(frozen=True)
class SemicircleCheck:
    ks_level0: float
    ks_level1: float
    levy_01: float


def semicircle_experiment(n: int = 1000, beta: int = 2, replicas: int = 10,
                          seed: int = 0) -> list[SemicircleCheck]:
    """Spectral and critical-point distances to the semicircle law."""
    out = []
    for r in range(replicas):
        rng = rng_stream(seed, r, "semicircle")
        T = sample_beta_tridiag(n, beta, rng)
        eig = eigenvalues_sturm(T)
        crit = rootfind.critical_points_real(eig)
        ks0 = stats.kolmogorov_distance(eig.zeros.real, semicircle_cdf)
        ks1 = stats.kolmogorov_distance(crit.zeros.real, semicircle_cdf)
        levy = stats.levy_distance(eig.zeros.real, crit.zeros.real)
        out.append(SemicircleCheck(ks0, ks1, levy))
    return out


def assumption_samples(law: str, n_grid, seed: int = 0) -> list[ZeroConfiguration]:
    """One Type-1 sample per grid point, for assumption diagnostics."""
    return [sample_type1(EnsembleSpec("type1", law, n),
                         rng_stream(seed, i, f"assume:n={n}"))
            for i, n in enumerate(n_grid)]


def summary(result: ExperimentResult, stream=sys.stderr) -> None:
    ok = sum(1 for r in result.rows if r.error is None)
    print(f"{result.config.experiment_id}: {ok} value rows, "
          f"{result.error_count} errors", file=stream)
