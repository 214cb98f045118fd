"""Zeros of derivatives from zeros, and zeros from coefficients.

Derivative zeros are located on the logarithmic derivative directly, so the
badly conditioned expansion to coefficients is never touched when roots are
known. Coefficient input (Kac polynomials) goes through a simultaneous
Aberth-Ehrlich iteration with Newton-polygon initial radii.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .polynomial import (CoefficientPolynomial, ZeroConfiguration,
                         horner_eval_with_derivative)


class ConvergenceError(RuntimeError):
    """Simultaneous iteration failed to meet its residual target."""


# ---------------------------------------------------------------------------
# multiplicity clustering

def _cluster_real(z: np.ndarray, tol: float):
    """Sorted distinct representatives and multiplicities (exact-ish dups)."""
    z = np.sort(z)
    if z.size == 1:
        return z.copy(), np.ones(1, dtype=np.int64)
    breaks = np.nonzero(np.diff(z) > tol)[0]
    starts = np.r_[0, breaks + 1]
    ends = np.r_[breaks + 1, z.size]
    counts = ends - starts
    reps = np.add.reduceat(z, starts) / counts
    return reps, counts


def _cluster_complex(z: np.ndarray, tol: float):
    order = np.lexsort((z.imag, z.real))
    reps: list[complex] = []
    counts: list[int] = []
    for w in z[order]:
        if reps and abs(w - reps[-1]) <= tol:
            k = counts[-1]
            reps[-1] = (reps[-1] * k + w) / (k + 1)
            counts[-1] = k + 1
        else:
            reps.append(complex(w))
            counts.append(1)
    return np.array(reps, dtype=complex), np.array(counts, dtype=np.int64)


def _sort_complex(z: np.ndarray) -> np.ndarray:
    return z[np.lexsort((z.imag, z.real))]


# ---------------------------------------------------------------------------
# real configurations: interlacing bisection

def critical_points_real(roots: ZeroConfiguration,
                         max_iter: int = 120) -> ZeroConfiguration:
    """All n-1 real critical points, with multiplicity, sorted ascending.

    A root of multiplicity m contributes itself m-1 times; each open
    interval between consecutive distinct roots holds exactly one simple
    critical point, bracketed by bisection on s1 (strictly decreasing
    between poles) and polished by a few safeguarded Newton steps.
    """
    if roots.im_bound != 0.0:
        raise ValueError("real solver requires im_bound = 0")
    if roots.n < 2:
        raise ValueError("need at least two zeros")
    scale = roots.scale
    distinct, counts = _cluster_real(roots.zeros.real.astype(float),
                                     1e-12 * scale)
    from_multiplicity = np.repeat(distinct, counts - 1)
    weights = counts.astype(float)

    if distinct.size >= 2:
        lo = distinct[:-1].copy()
        hi = distinct[1:].copy()

        def s_sums(x):
            inv = 1.0 / (x[:, None] - distinct[None, :])
            return (inv * weights).sum(axis=1), (inv * inv * weights).sum(axis=1)

        # bisection: s1 -> +inf at the left pole, -inf at the right one
        bisect_iters = min(max_iter, 90)
        for _ in range(bisect_iters):
            mid = 0.5 * (lo + hi)
            s1, _ = s_sums(mid)
            pos = s1 > 0
            lo = np.where(pos, mid, lo)
            hi = np.where(pos, hi, mid)
            if np.all(hi - lo <= 1e-11 * np.maximum(1.0, np.abs(mid))):
                break
        x = 0.5 * (lo + hi)
        # Newton polish (s1' = -s2 < 0), clipped back into the bracket
        for _ in range(3):
            s1, s2 = s_sums(x)
            x = np.clip(x + s1 / s2, lo, hi)
        simple = x
        out = np.sort(np.concatenate([from_multiplicity, simple]))
    else:
        out = np.sort(from_multiplicity)
    return ZeroConfiguration(out, 0.0)


# ---------------------------------------------------------------------------
# complex configurations: simultaneous Newton/Aberth on the log-derivative

_INIT_SEED = 0x9E3779B9


def critical_points_complex(roots: ZeroConfiguration,
                            tol_newton: float = 1e-10,
                            max_iter: int = 200) -> ZeroConfiguration:
    """All n-1 critical points of a complex configuration.

    Multiple roots (exact duplicates at 1e-12*scale) are emitted directly
    with multiplicity m-1; the remaining simple critical points are the
    zeros of sum_j m_j/(x - zeta_j), found by an Aberth-style simultaneous
    iteration with the Newton correction w = s1/(s1^2 - s2) generalized to
    weighted sums. Initial guesses are the pole-shift estimates
    zeta_j - m_j/S_j with S_j = sum_{k!=j} m_k/(zeta_j - zeta_k): each
    zero typically has a critical point at roughly that offset, and for
    boundary-concentrated configurations (zeros near a circle) these
    guesses converge in ~15 sweeps where midpoint-style guesses need
    hundreds. The least trustworthy candidate (largest shift) is dropped
    to match the n-1 target count; shifts beyond the configuration
    diameter are clipped onto it.
    """
    if roots.n < 2:
        raise ValueError("need at least two zeros")
    scale = roots.scale
    distinct, mult = _cluster_complex(roots.zeros, 1e-12 * scale)
    locked = np.repeat(distinct, mult - 1)
    d = distinct.size
    if d == 1:
        return ZeroConfiguration(_sort_complex(locked), roots.im_bound)

    # clustered-but-distinct roots converge only linearly; allow more sweeps
    if d > 1:
        seps = np.abs(distinct[:, None] - distinct[None, :])
        np.fill_diagonal(seps, np.inf)
        if float(seps.min()) < 1e-6 * scale:
            max_iter *= 4

    w_mult = mult.astype(float)
    diffm = distinct[:, None] - distinct[None, :]
    np.fill_diagonal(diffm, np.inf)
    s_self = (w_mult[None, :] / diffm).sum(axis=1)
    with np.errstate(divide="ignore", invalid="ignore"):
        shift = np.where(s_self == 0, np.inf,
                         w_mult / np.where(s_self == 0, 1.0, s_self))
    gap = np.abs(diffm).min(axis=1)
    nn = np.argmin(np.abs(diffm), axis=1)
    # a shift past half the nearest-neighbour gap can land anywhere
    # (including on another pole); fall back to the neighbour midpoint
    ok = np.abs(shift) <= 0.5 * gap
    cand = np.where(ok, distinct - shift, 0.5 * (distinct + distinct[nn]))
    quality = np.where(ok, np.abs(shift), np.inf)
    drop = int(np.argmax(quality))
    keep = np.ones(d, dtype=bool)
    keep[drop] = False
    x = cand[keep]
    spread = np.where(ok, np.abs(shift), 0.25 * gap)[keep]
    rng = np.random.default_rng(_INIT_SEED)
    x = x + 1e-3 * spread * (rng.standard_normal(d - 1)
                             + 1j * rng.standard_normal(d - 1))
    active = np.ones(d - 1, dtype=bool)
    worst = np.inf
    for _ in range(max_iter):
        xa = x[active]
        if xa.size == 0:
            break
        diff = xa[:, None] - distinct[None, :]
        # nudge points that collided with a pole of the log-derivative
        hit = np.abs(diff).min(axis=1) < 1e-15 * scale
        if np.any(hit):
            xa = xa + np.where(hit, 1e-9 * scale * (1 + 1j), 0)
            diff = xa[:, None] - distinct[None, :]
            x[active] = xa
        u = 1.0 / diff
        s1w = (u * w_mult).sum(axis=1)
        s2w = (u * u * w_mult).sum(axis=1)
        s1d = u.sum(axis=1)
        mag = (np.abs(u) * w_mult).sum(axis=1)
        res = np.abs(s1w)
        # floor: one ulp of movement in x changes s1 by ~|s2|*ulp, so a
        # residual below that is already zero at double resolution
        # (critical points squeezed between near-duplicate zeros hit this)
        floor = np.finfo(float).eps * (1.0 + np.abs(xa)) \
            * (np.abs(u) ** 2 * w_mult).sum(axis=1)
        conv = res <= tol_newton * mag + floor
        if np.all(conv):
            idx = np.flatnonzero(active)
            active[idx[conv]] = False
            continue
        denom = s1d * s1w - s2w
        denom = np.where(denom == 0, 1e-300, denom)
        w = s1w / denom
        pair = x[active][:, None] - x[None, :]
        pair_inv = np.where(pair == 0, 0, 1.0 / np.where(pair == 0, 1, pair))
        rep = pair_inv.sum(axis=1)
        corr = w / (1.0 - w * rep)
        step = np.where(conv, 0, corr)
        x[active] = x[active] - step
        idx = np.flatnonzero(active)
        active[idx[conv]] = False

    if np.any(active):
        diff = x[active][:, None] - distinct[None, :]
        u = 1.0 / diff
        s1w = (u * w_mult).sum(axis=1)
        mag = (np.abs(u) * w_mult).sum(axis=1)
        floor = np.finfo(float).eps * (1.0 + np.abs(x[active])) \
            * (np.abs(u) ** 2 * w_mult).sum(axis=1)
        bad = np.abs(s1w) > tol_newton * mag + floor
        if np.any(bad):
            worst = float(np.max(np.abs(s1w)[bad] / mag[bad]))
            raise ConvergenceError(
                f"{int(bad.sum())} critical points unconverged after "
                f"{max_iter} iterations; worst relative residual {worst:.3e}")
    out = _sort_complex(np.concatenate([locked, x]))
    return ZeroConfiguration(out, roots.im_bound)


# ---------------------------------------------------------------------------
# towers

@dataclass(frozen=True)
class DerivativeTower:
    """Zeros of p, p', ..., p^(K) as levels; levels[k] has n-k zeros."""

    levels: tuple[ZeroConfiguration, ...]
    source_n: int

    @property
    def k_max(self) -> int:
        return len(self.levels) - 1

    def level_means(self) -> np.ndarray:
        return np.array([lvl.mean() for lvl in self.levels])

    def level_mean_abs(self) -> np.ndarray:
        return np.array([lvl.mean_abs() for lvl in self.levels])


def derivative_tower(roots: ZeroConfiguration, K: int) -> DerivativeTower:
    """Build the tower by repeated critical-point solves.

    The real bisection solver runs when im_bound = 0, the complex one
    otherwise. The tower stops early at a single-zero level and reports the
    K actually reached via ``k_max``.
    """
    if K >= roots.n:
        raise ValueError("K must be smaller than the number of zeros")
    levels = [roots]
    for k in range(K):
        current = levels[-1]
        if current.n < 2:
            break
        try:
            if current.im_bound == 0.0:
                nxt = critical_points_real(current)
            else:
                nxt = critical_points_complex(current)
        except ConvergenceError as exc:
            raise ConvergenceError(f"tower level {k + 1}: {exc}") from exc
        levels.append(nxt)
    return DerivativeTower(tuple(levels), roots.n)


# ---------------------------------------------------------------------------
# roots from coefficients (Kac polynomials)

def _newton_polygon_radii(coeffs: np.ndarray) -> np.ndarray:
    """Initial root-modulus estimates from the upper Newton polygon."""
    n = coeffs.size - 1
    jj = np.flatnonzero(coeffs != 0)
    pts = [(int(j), float(np.log(np.abs(coeffs[j])))) for j in jj]
    hull: list[tuple[int, float]] = []
    for p in pts:
        while len(hull) >= 2:
            (x1, y1), (x2, y2) = hull[-2], hull[-1]
            if (x2 - x1) * (p[1] - y1) - (p[0] - x1) * (y2 - y1) >= 0:
                hull.pop()
            else:
                break
        hull.append(p)
    radii = np.empty(n)
    for (j1, l1), (j2, l2) in zip(hull[:-1], hull[1:]):
        radii[j1:j2] = np.exp((l1 - l2) / (j2 - j1))
    return radii


def polyroots_coeff(p: CoefficientPolynomial,
                    tol: float = 1e-12,
                    max_iter: int = 200) -> ZeroConfiguration:
    """All roots of a coefficient polynomial by Aberth-Ehrlich.

    Deterministic given the fixed initial-guess rule (Newton-polygon radii,
    evenly spread phases with a fixed offset). Exact zero trailing
    coefficients are peeled off as roots at the origin first.
    """
    if p.degree < 1:
        raise ValueError("need degree >= 1")
    k0 = int(np.argmax(p.coeffs != 0))  # multiplicity of the root at 0
    work = CoefficientPolynomial(p.coeffs[k0:]) if k0 else p
    deg = work.degree
    if deg == 0:
        allr = np.zeros(k0, dtype=complex)
        return ZeroConfiguration(allr, 0.0)

    radii = _newton_polygon_radii(work.coeffs)
    j = np.arange(deg)
    angles = 2 * np.pi * j / deg + 0.5 / deg + 0.25
    x = radii * np.exp(1j * angles)

    abs_coeffs = CoefficientPolynomial(np.abs(work.coeffs) + 0j)
    # Cauchy bound: every root satisfies |x| < r_clamp, so iterates that
    # shoot past it are pulled back onto the disk (also keeps the Horner
    # pass from overflowing at high degree)
    r_clamp = 1.0 + float(np.max(np.abs(work.coeffs[:-1]))
                          / np.abs(work.coeffs[-1]))
    active = np.ones(deg, dtype=bool)
    for _ in range(max_iter):
        if not np.any(active):
            break
        over = np.abs(x) > r_clamp
        if np.any(over):
            x = np.where(over, x / np.abs(np.where(over, x, 1.0)) * r_clamp, x)
        xa = x[active]
        pv, dv = horner_eval_with_derivative(work, xa)
        pv = np.atleast_1d(pv)
        dv = np.atleast_1d(dv)
        scale_p = np.abs(np.atleast_1d(_horner_abs(abs_coeffs, np.abs(xa))))
        conv = np.abs(pv) <= tol * np.maximum(scale_p, 1e-300)
        dv = np.where(dv == 0, 1e-300, dv)
        w = pv / dv
        pair = xa[:, None] - x[None, :]
        pair_inv = np.where(pair == 0, 0, 1.0 / np.where(pair == 0, 1, pair))
        rep = pair_inv.sum(axis=1)
        corr = w / (1.0 - w * rep)
        stalled = np.abs(corr) <= 1e-16 * (1.0 + np.abs(xa))
        step = np.where(conv, 0, corr)
        x[active] = xa - step
        idx = np.flatnonzero(active)
        active[idx[conv | stalled]] = False

    pv, _ = horner_eval_with_derivative(work, x)
    pv = np.atleast_1d(pv)
    scale_p = np.abs(np.atleast_1d(_horner_abs(abs_coeffs, np.abs(x))))
    bad = np.abs(pv) > 10 * tol * np.maximum(scale_p, 1e-300)
    if np.any(bad):
        raise ConvergenceError(
            f"roots {list(np.flatnonzero(bad))} unconverged after {max_iter} "
            f"iterations; worst residual {float(np.max(np.abs(pv)[bad])):.3e}")
    allr = _sort_complex(np.concatenate([np.zeros(k0, dtype=complex), x]))
    return ZeroConfiguration(allr, float(np.max(np.abs(allr.imag))))


def _horner_abs(p_abs: CoefficientPolynomial, r):
    acc = np.zeros_like(np.asarray(r, dtype=complex))
    for c in p_abs.coeffs[::-1]:
        acc = acc * r + c
    return acc
