"""Test functions, linear statistics, scaling diagnostics, and distances.

The test functions carry closed-form Fourier data so the regularity
integrals are checkable by quadrature instead of assumed. Linear statistics
come in the three scalings (outer 1/a, argument 1/b, both), with analytic
or empirical centering. The finite-n difference bound mirrors the one-step
telescoping estimate used downstream by the harness.
"""
from __future__ import annotations

from dataclasses import dataclass, field, replace
from functools import lru_cache
from typing import Callable

import numpy as np
from scipy.integrate import quad

from .comparison import c_bound
from .ensembles import parse_type1_law
from .polynomial import ZeroConfiguration

# ---------------------------------------------------------------------------
# test functions


@dataclass(frozen=True)
class TestFunction:
    """Entire test function with Fourier density and strip certificates.

    ``eval`` accepts complex scalars or arrays. ``fourier_density`` is the
    density in f(x) = int fhat(t) e^{itx} dt. ``max_strip`` is the largest
    half-width C0 for which the regularity integral stays finite.
    """

    name: str
    eval: Callable
    fourier_density: Callable
    _sup: Callable[[float], float] = field(repr=False)
    _dsup: Callable[[float], float] = field(repr=False)
    max_strip: float = np.inf

    def require_admissible(self, c0: float) -> None:
        if c0 >= self.max_strip:
            raise ValueError(
                f"test function {self.name!r} is not regular on a strip of "
                f"half-width {c0} (limit {self.max_strip})")

    def sup_bound(self, c0: float) -> float:
        """Sup of |f| on the strip |Im z| <= c0."""
        self.require_admissible(c0)
        return self._sup(c0)

    def deriv_bound(self, c0: float) -> float:
        """Sup of |f'| on the strip |Im z| <= c0."""
        self.require_admissible(c0)
        return self._dsup(c0)

    def bound_integral(self, c0: float) -> float:
        """int |fhat(t)| e^{3 c0 |t|} dt."""
        self.require_admissible(c0)
        return _bound_integral(self.name, float(c0))

    def moment_integral(self, c0: float) -> float:
        """int |fhat(t)| psi(c0, t) e^{c0 |t|} dt with psi the Duhamel bound."""
        self.require_admissible(c0)
        return _moment_integral(self.name, float(c0))


def _grid_max(g: Callable, c0: float) -> float:
    x = np.linspace(-30.0, 30.0, 6001)
    return float(np.max(np.abs(g(x + 1j * c0))))


def _gauss_eval(z):
    z = np.asarray(z, dtype=complex)
    out = np.exp(-z * z / 2.0)
    return out if out.ndim else complex(out)


def _gauss_fhat(t):
    return np.exp(-np.asarray(t, dtype=float) ** 2 / 2.0) / np.sqrt(2.0 * np.pi)


def _poisson_eval(z):
    z = np.asarray(z, dtype=complex)
    out = 1.0 / (1.0 + z * z)
    return out if out.ndim else complex(out)


def _poisson_fhat(t):
    return np.exp(-np.abs(np.asarray(t, dtype=float))) / 2.0


_REGISTRY = {
    "gauss": TestFunction(
        name="gauss",
        eval=_gauss_eval,
        fourier_density=_gauss_fhat,
        _sup=lambda c0: float(np.exp(c0 * c0 / 2.0)),
        _dsup=lambda c0: _grid_max(lambda z: -z * np.exp(-z * z / 2.0), c0),
    ),
    "poisson": TestFunction(
        name="poisson",
        eval=_poisson_eval,
        fourier_density=_poisson_fhat,
        _sup=lambda c0: 1.0 / (1.0 - c0 * c0),
        _dsup=lambda c0: _grid_max(lambda z: -2.0 * z / (1.0 + z * z) ** 2, c0),
        max_strip=1.0 / 3.0,  # 3*C0 < 1 keeps the regularity integral finite
    ),
}


def get_test_function(name: str, c0: float | None = None) -> TestFunction:
    try:
        f = _REGISTRY[name]
    except KeyError:
        raise ValueError(f"unknown test function {name!r}") from None
    if c0 is not None:
        f.require_admissible(c0)
    return f


@lru_cache(maxsize=None)
def _bound_integral(name: str, c0: float) -> float:
    f = _REGISTRY[name]

    def integrand(t):
        # once fhat underflows the product is zero; skipping the
        # exponential factor avoids a spurious 0 * inf
        fh = float(f.fourier_density(t))
        return fh * np.exp(3.0 * c0 * t) if fh > 0.0 else 0.0

    val, _ = quad(integrand, 0.0, np.inf)
    return 2.0 * val


@lru_cache(maxsize=None)
def _moment_integral(name: str, c0: float) -> float:
    f = _REGISTRY[name]

    def integrand(t):
        fh = float(f.fourier_density(t))
        return fh * c_bound(c0, t) * np.exp(c0 * t) if fh > 0.0 else 0.0

    val, _ = quad(integrand, 0.0, np.inf)
    return 2.0 * val


def fourier_reconstruction_error(f: TestFunction, xs) -> float:
    """Max |f(x) - int fhat(t) e^{itx} dt| over a real grid (even fhat)."""
    worst = 0.0
    for x in np.atleast_1d(xs):
        val, _ = quad(lambda t: float(f.fourier_density(t)), 0.0, np.inf,
                      weight="cos", wvar=float(x))
        worst = max(worst, abs(complex(f.eval(float(x))) - 2.0 * val))
    return worst


# ---------------------------------------------------------------------------
# scaling plans

_SEQUENCES: dict[str, Callable[[int], float]] = {
    "n": lambda m: float(m),
    "sqrt(n)": lambda m: float(np.sqrt(m)),
    "1": lambda m: 1.0,
}


def parse_sequence(name: str) -> Callable[[int], float]:
    if name in _SEQUENCES:
        return _SEQUENCES[name]
    try:
        const = float(name)
    except ValueError:
        raise ValueError(f"unknown scaling sequence {name!r}") from None
    if const <= 0:
        raise ValueError("scaling sequences must be positive")
    return lambda m: const


@dataclass(frozen=True)
class ScalingPlan:
    """Generators of the a_n / b_n sequences with their assumption mode."""

    mode: str  # "A2" | "A3" | "A4"
    a_name: str | None = None
    b_name: str | None = None

    def __post_init__(self):
        if self.mode not in ("A2", "A3", "A4"):
            raise ValueError(f"unknown assumption mode {self.mode!r}")
        if self.mode == "A2" and self.a_name is None:
            raise ValueError("mode A2 needs an a-sequence")
        if self.mode == "A3" and self.b_name is None:
            raise ValueError("mode A3 needs a b-sequence")
        if self.mode == "A4" and (self.a_name is None or self.b_name is None):
            raise ValueError("mode A4 needs both sequences")

    def a(self, m: int) -> float:
        if self.a_name is None:
            raise ValueError("plan carries no a-sequence")
        val = parse_sequence(self.a_name)(m)
        if val <= 0:
            raise ValueError("a-sequence must be positive")
        return val

    def b(self, m: int) -> float:
        if self.b_name is None:
            raise ValueError("plan carries no b-sequence")
        val = parse_sequence(self.b_name)(m)
        if val <= 0:
            raise ValueError("b-sequence must be positive")
        return val


# ---------------------------------------------------------------------------
# linear statistics

@dataclass(frozen=True)
class LinearStatisticRecord:
    n: int
    k: int
    ell: int
    value: complex
    centered: bool = False
    center_estimate: complex | None = None
    seed: int = 0


def linear_statistic(level: ZeroConfiguration, f: TestFunction,
                     plan: ScalingPlan, ell: int, n: int, k: int) -> complex:
    """One of the three linear statistics on a tower level.

    ell=1: (1/a_{n-k}) sum f(x_j); ell=2: sum f(x_j / b_{n-k});
    ell=3: (1/a_{n-k}) sum f(x_j / b_{n-k}). Summation follows the stored
    index order so rounding is deterministic.
    """
    if ell not in (1, 2, 3):
        raise ValueError("ell must be 1, 2 or 3")
    m = n - k
    if level.n != m:
        raise ValueError(f"level has {level.n} points, expected {m}")
    z = level.zeros
    if ell == 1:
        return complex(np.sum(f.eval(z)) / plan.a(m))
    if ell == 2:
        return complex(np.sum(f.eval(z / plan.b(m))))
    return complex(np.sum(f.eval(z / plan.b(m))) / plan.a(m))


def expectation_under_law(law: str, g: Callable[[complex], complex]) -> complex:
    """E[g(Z)] for a Type-1 law by adaptive quadrature."""
    parsed = parse_type1_law(law)

    def split_quad(func, lo, hi, weight=None):
        re_val, _ = quad(lambda x: (func(x)).real, lo, hi)
        im_val, _ = quad(lambda x: (func(x)).imag, lo, hi)
        return re_val + 1j * im_val

    if parsed["name"] == "uniform":
        lo, hi = parsed["lo"], parsed["hi"]
        return split_quad(lambda x: complex(g(x)), lo, hi) / (hi - lo)
    if parsed["name"] == "gauss":
        phi = lambda x: np.exp(-x * x / 2.0) / np.sqrt(2.0 * np.pi)
        return split_quad(lambda x: complex(g(x)) * phi(x), -np.inf, np.inf)
    if parsed["name"] == "circle":
        return split_quad(lambda th: complex(g(np.exp(1j * th))),
                          0.0, 2.0 * np.pi) / (2.0 * np.pi)
    # rademacher
    eps = parsed["jitter"]
    total = 0j
    for s in (-1.0, 1.0):
        if eps == 0:
            total += complex(g(s))
        else:
            total += split_quad(lambda u: complex(g(s + u)), -eps, eps) / (2 * eps)
    return total / 2.0


def analytic_center(law: str, f: TestFunction, plan: ScalingPlan,
                    ell: int, n: int, k: int) -> complex:
    """Quadrature center (n-k) E[f(Z/b_{n-k})] / a_{n-k} per the ell scaling."""
    m = n - k
    b = plan.b(m) if ell in (2, 3) else 1.0
    mean_f = expectation_under_law(law, lambda x: f.eval(x / b))
    if ell == 1:
        return m * mean_f / plan.a(m)
    if ell == 2:
        return m * mean_f
    return m * mean_f / plan.a(m)


def center_statistic(records: list[LinearStatisticRecord], method: str,
                     reference: list[LinearStatisticRecord] | None = None,
                     law: str | None = None, f: TestFunction | None = None,
                     plan: ScalingPlan | None = None) -> list[LinearStatisticRecord]:
    """Subtract a center estimate from every record.

    ``empirical`` averages an independent reference batch (never the batch
    being centered); ``analytic`` integrates the Type-1 law by quadrature.
    """
    if method == "empirical":
        if reference is None:
            raise ValueError("empirical centering needs an independent "
                             "reference batch")
        groups: dict[tuple, list[complex]] = {}
        for r in reference:
            groups.setdefault((r.n, r.k, r.ell), []).append(r.value)
        out = []
        for r in records:
            vals = groups.get((r.n, r.k, r.ell))
            if not vals:
                raise ValueError(
                    f"insufficient replicas to center (n={r.n}, k={r.k})")
            center = complex(np.mean(vals))
            out.append(replace(r, value=r.value - center, centered=True,
                               center_estimate=center))
        return out
    if method == "analytic":
        if law is None or f is None or plan is None:
            raise ValueError("analytic centering needs law, test function "
                             "and plan")
        cache: dict[tuple, complex] = {}
        out = []
        for r in records:
            key = (r.n, r.k, r.ell)
            if key not in cache:
                cache[key] = analytic_center(law, f, plan, r.ell, r.n, r.k)
            center = cache[key]
            out.append(replace(r, value=r.value - center, centered=True,
                               center_estimate=center))
        return out
    raise ValueError(f"unknown centering method {method!r}")


# ---------------------------------------------------------------------------
# proof-derived finite-n bound

def theorem1_bound(roots: ZeroConfiguration, f: TestFunction,
                   plan: ScalingPlan, n: int) -> float:
    """Deterministic bound on |L_{n,1} - L_{n,1} after one derivative step|.

    Sum of the counting/rescaling part ||f||_inf (1/a_n + n|a_{n-1}-a_n|
    /(a_{n-1} a_n)) and the Duhamel part moment_integral(C0) * (|Z_1| +
    mean |Z_j|)/a_{n-1}; the moment integral absorbs the 1/(2 C0) factor so
    C0 = 0 needs no special case.
    """
    if plan.mode != "A2":
        raise ValueError("the one-step bound is defined for mode A2")
    c0 = roots.im_bound
    sup = f.sup_bound(c0)
    a_n = plan.a(n)
    a_prev = plan.a(n - 1)
    absz = np.abs(roots.zeros)
    w1 = sup / a_n + n * abs(a_prev - a_n) * sup / (a_prev * a_n)
    w2 = f.moment_integral(c0) * (float(absz[0]) + float(absz.mean())) / a_prev
    return float(w1 + w2)


# ---------------------------------------------------------------------------
# assumption diagnostics

@dataclass(frozen=True)
class AssumptionEntry:
    name: str
    k: int | None
    ns: tuple[int, ...]
    values: tuple[float, ...]
    kind: str  # "decay" | "growth"
    threshold: float
    passed: bool


@dataclass(frozen=True)
class AssumptionReport:
    mode: str
    entries: tuple[AssumptionEntry, ...]

    @property
    def passed(self) -> bool:
        return all(e.passed for e in self.entries)


def _entry(name, k, ns, values, kind, threshold):
    values = tuple(float(v) for v in values)
    if kind == "growth":
        ok = values[-1] > values[0]
    else:
        ok = ((values[-1] < values[0] or (values[0] == values[-1] == 0.0))
              and values[-1] < threshold)
    return AssumptionEntry(name, k, tuple(ns), values, kind, threshold, bool(ok))


def check_assumptions(plan: ScalingPlan, samples: list[ZeroConfiguration],
                      k_max: int, threshold: float = 1e-2) -> AssumptionReport:
    """Finite-n values of every assumption expression plus trend verdicts.

    These are explicitly labeled diagnostics over the sampled grid, never
    proofs of the limits.
    """
    if len(samples) < 3:
        raise ValueError("need at least 3 grid points")
    ns = [s.n for s in samples]
    if any(b <= a for a, b in zip(ns, ns[1:])):
        raise ValueError("samples must come on an increasing n grid")
    sup_abs = [float(np.max(np.abs(s.zeros))) for s in samples]
    sum_abs = [float(np.sum(np.abs(s.zeros))) for s in samples]
    entries = []
    kk = range(k_max + 1)
    if plan.mode in ("A2",):
        entries.append(_entry("an1", None, ns, [plan.a(n) for n in ns],
                              "growth", threshold))
        for k in kk:
            entries.append(_entry("an2", k, ns, [
                n * abs(plan.a(n - k) - plan.a(n - k - 1))
                / (plan.a(n - k) * plan.a(n - k - 1)) for n in ns],
                "decay", threshold))
            entries.append(_entry("an3", k, ns, [
                s / plan.a(n - k) for n, s in zip(ns, sup_abs)],
                "decay", threshold))
            entries.append(_entry("remark1", k, ns, [
                s / (n * plan.a(n - k)) for n, s in zip(ns, sum_abs)],
                "decay", threshold))
    elif plan.mode == "A3":
        entries.append(_entry("bn1", None, ns, [plan.b(n) for n in ns],
                              "growth", threshold))
        for k in kk:
            entries.append(_entry("bn2", k, ns, [
                abs(plan.b(n - k) - plan.b(n - k - 1))
                / (plan.b(n - k) * plan.b(n - k - 1)) * s
                for n, s in zip(ns, sum_abs)], "decay", threshold))
            entries.append(_entry("bn3", k, ns, [
                s / plan.b(n - k) for n, s in zip(ns, sup_abs)],
                "decay", threshold))
    else:  # A4
        entries.append(_entry("anbn1_a", None, ns, [plan.a(n) for n in ns],
                              "growth", threshold))
        entries.append(_entry("anbn1_b", None, ns, [plan.b(n) for n in ns],
                              "growth", threshold))
        for k in kk:
            entries.append(_entry("anbn2", k, ns, [
                abs(plan.b(n - k) - plan.b(n - k - 1))
                / (plan.a(n - k - 1) * plan.b(n - k) * plan.b(n - k - 1)) * s
                for n, s in zip(ns, sum_abs)], "decay", threshold))
            entries.append(_entry("anbn3", k, ns, [
                s / (plan.a(n - k) * plan.b(n - k))
                for n, s in zip(ns, sup_abs)], "decay", threshold))
    return AssumptionReport(plan.mode, tuple(entries))


# ---------------------------------------------------------------------------
# empirical-measure distances

def kolmogorov_distance(sample, cdf: Callable) -> float:
    """sup-distance between the empirical CDF of a sample and a target CDF."""
    xs = np.sort(np.asarray(sample, dtype=float))
    if xs.size == 0:
        raise ValueError("empty sample")
    m = xs.size
    fx = np.asarray(cdf(xs), dtype=float)
    hi = np.arange(1, m + 1) / m
    lo = np.arange(0, m) / m
    return float(np.max(np.maximum(np.abs(hi - fx), np.abs(fx - lo))))


def levy_distance(sample_a, sample_b, tol: float = 1e-9) -> float:
    """Levy metric between two empirical distribution functions.

    Bisection on epsilon with feasibility checked on the merged jump set
    (atoms plus shifted atoms evaluated through one-sided limits).
    """
    a = np.sort(np.asarray(sample_a, dtype=float))
    b = np.sort(np.asarray(sample_b, dtype=float))
    if a.size == 0 or b.size == 0:
        raise ValueError("empty sample")
    na, nb = a.size, b.size

    def F(arr, size, x, side):
        return np.searchsorted(arr, x, side) / size

    def feasible(eps):
        pad = 1e-12
        # Fb(x) <= Fa(x+eps) + eps
        if np.any(F(b, nb, b, "right") - F(a, na, b + eps, "right") > eps + pad):
            return False
        if np.any(F(b, nb, a - eps, "left") - F(a, na, a, "left") > eps + pad):
            return False
        # Fa(x-eps) - eps <= Fb(x)
        if np.any(F(a, na, a, "right") - F(b, nb, a + eps, "right") > eps + pad):
            return False
        if np.any(F(a, na, b - eps, "left") - F(b, nb, b, "left") > eps + pad):
            return False
        return True

    lo, hi = 0.0, 1.0
    if feasible(lo):
        return 0.0
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if feasible(mid):
            hi = mid
        else:
            lo = mid
    return hi


# ---------------------------------------------------------------------------
# convex-hull containment

def _convex_hull(points: list[tuple[float, float]]) -> list[tuple[float, float]]:
    pts = sorted(set(points))
    if len(pts) <= 2:
        return pts

    def cross(o, p, q):
        return (p[0] - o[0]) * (q[1] - o[1]) - (p[1] - o[1]) * (q[0] - o[0])

    lower: list = []
    for p in pts:
        while len(lower) >= 2 and cross(lower[-2], lower[-1], p) <= 0:
            lower.pop()
        lower.append(p)
    upper: list = []
    for p in reversed(pts):
        while len(upper) >= 2 and cross(upper[-2], upper[-1], p) <= 0:
            upper.pop()
        upper.append(p)
    return lower[:-1] + upper[:-1]


def _segment_distance(p, a, b) -> float:
    ax, ay = a
    bx, by = b
    px, py = p
    vx, vy = bx - ax, by - ay
    vv = vx * vx + vy * vy
    if vv == 0:
        return float(np.hypot(px - ax, py - ay))
    s = max(0.0, min(1.0, ((px - ax) * vx + (py - ay) * vy) / vv))
    return float(np.hypot(px - ax - s * vx, py - ay - s * vy))


def hull_contains(outer: ZeroConfiguration, inner: ZeroConfiguration,
                  tol: float) -> bool:
    """Every inner point inside (or within tol of) the convex hull of outer.

    Collinear and single-point hulls degrade to segment/point distance.
    """
    pts = [(float(z.real), float(z.imag)) for z in outer.zeros]
    hull = _convex_hull(pts)
    inner_pts = [(float(z.real), float(z.imag)) for z in inner.zeros]
    if len(hull) <= 2:
        a = hull[0]
        b = hull[-1]
        return all(_segment_distance(p, a, b) <= tol for p in inner_pts)
    for p in inner_pts:
        for v1, v2 in zip(hull, hull[1:] + hull[:1]):
            ex, ey = v2[0] - v1[0], v2[1] - v1[1]
            cross = ex * (p[1] - v1[1]) - ey * (p[0] - v1[0])
            if cross < -tol * float(np.hypot(ex, ey)):
                return False
    return True
