"""Samplers for the three randomness types and Type-3 spectral machinery.

Type 1 draws zeros directly, Type 2 draws Kac coefficients, Type 3 samples
the tridiagonal beta-ensemble (equal in spectral law to GOE/GUE) whose
eigenvalues come out of a Sturm-sequence bisection, already scaled so the
limiting spectral law is the semicircle on [-2, 2].
"""
from __future__ import annotations

import re
from dataclasses import dataclass

import numpy as np

from .polynomial import CoefficientPolynomial, ZeroConfiguration


class UnknownLawError(ValueError):
    """Law name not in the registry."""


@dataclass(frozen=True)
class EnsembleSpec:
    """Which randomness type to sample, and its law, degree, and C0."""

    kind: str  # "type1" | "type2" | "type3"
    law: str
    n: int
    declared_c0: float | None = None

    def __post_init__(self):
        if self.kind not in ("type1", "type2", "type3"):
            raise ValueError(f"unknown ensemble kind {self.kind!r}")
        if self.n < 1:
            raise ValueError("degree must be >= 1")


@dataclass(frozen=True)
class TridiagonalMatrix:
    """Symmetric tridiagonal matrix stored as its two bands."""

    diagonal: np.ndarray
    offdiagonal: np.ndarray

    def __post_init__(self):
        d = np.asarray(self.diagonal, dtype=float)
        e = np.asarray(self.offdiagonal, dtype=float)
        if e.size != max(d.size - 1, 0):
            raise ValueError("off-diagonal must have length n-1")
        object.__setattr__(self, "diagonal", d)
        object.__setattr__(self, "offdiagonal", e)

    @property
    def n(self) -> int:
        return self.diagonal.size

    def norm_inf(self) -> float:
        d, e = np.abs(self.diagonal), np.abs(self.offdiagonal)
        row = d.copy()
        if e.size:
            row[:-1] += e
            row[1:] += e
        return float(np.max(row))

    def trace(self) -> float:
        return float(np.sum(self.diagonal))


# ---------------------------------------------------------------------------
# law parsing

_UNIFORM_RE = re.compile(r"^uniform\[\s*([-+0-9.eE]+)\s*,\s*([-+0-9.eE]+)\s*\]$")
_RADEMACHER_RE = re.compile(r"^rademacher(?:\(jitter=([-+0-9.eE]+)\))?$")
_BETA_RE = re.compile(r"^beta-tridiag\(beta=([12])\)$")


def parse_type1_law(law: str) -> dict:
    """Parse a Type-1 law string into (name, params, certified C0)."""
    if law == "circle":
        return {"name": "circle", "c0": 1.0}
    if law == "gauss":
        return {"name": "gauss", "c0": 0.0}
    m = _UNIFORM_RE.match(law)
    if m:
        lo, hi = float(m.group(1)), float(m.group(2))
        if not lo < hi:
            raise UnknownLawError(f"empty uniform support in {law!r}")
        return {"name": "uniform", "lo": lo, "hi": hi, "c0": 0.0}
    m = _RADEMACHER_RE.match(law)
    if m:
        jitter = float(m.group(1)) if m.group(1) is not None else 1e-6
        return {"name": "rademacher", "jitter": jitter, "c0": 0.0}
    raise UnknownLawError(f"unknown Type-1 law {law!r}")


def parse_beta(law: str) -> int:
    m = _BETA_RE.match(law)
    if not m:
        raise UnknownLawError(f"unknown Type-3 law {law!r}")
    return int(m.group(1))


# ---------------------------------------------------------------------------
# samplers

def sample_type1(spec: EnsembleSpec, rng: np.random.Generator) -> ZeroConfiguration:
    """n i.i.d. zeros from the named law, with its certified C0."""
    if spec.kind != "type1":
        raise ValueError("spec is not Type 1")
    law = parse_type1_law(spec.law)
    n = spec.n
    if law["name"] == "circle":
        theta = rng.uniform(0.0, 2.0 * np.pi, n)
        z = np.exp(1j * theta)
    elif law["name"] == "uniform":
        z = rng.uniform(law["lo"], law["hi"], n).astype(complex)
    elif law["name"] == "gauss":
        z = rng.standard_normal(n).astype(complex)
    else:  # rademacher
        signs = rng.integers(0, 2, n) * 2.0 - 1.0
        z = (signs + law["jitter"] * rng.uniform(-1.0, 1.0, n)).astype(complex)
    c0 = spec.declared_c0 if spec.declared_c0 is not None else law["c0"]
    if float(np.max(np.abs(z.imag))) > c0:
        raise AssertionError("sampled configuration violates its C0 certificate")
    return ZeroConfiguration(z, c0)


def sample_kac(spec: EnsembleSpec, rng: np.random.Generator) -> CoefficientPolynomial:
    """n+1 i.i.d. coefficients; the leading one is resampled if it is zero."""
    if spec.kind != "type2":
        raise ValueError("spec is not Type 2")
    n = spec.n
    if spec.law == "kac-gauss":
        draw = rng.standard_normal
    elif spec.law == "kac-rademacher":
        def draw(size=None):
            return rng.integers(0, 2, size) * 2.0 - 1.0
    else:
        raise UnknownLawError(f"unknown Type-2 law {spec.law!r}")
    coeffs = np.asarray(draw(n + 1), dtype=complex)
    while coeffs[-1] == 0:
        coeffs[-1] = complex(draw())
    return CoefficientPolynomial(coeffs)


def sample_beta_tridiag(n: int, beta: int,
                        rng: np.random.Generator) -> TridiagonalMatrix:
    """Tridiagonal beta-ensemble, scaled so the spectrum targets [-2, 2].

    Diagonal: Gaussian with variance 2/(beta n). Off-diagonal: chi variables
    with decreasing degrees of freedom beta(n-1), ..., beta, over sqrt(beta n).
    """
    if beta not in (1, 2):
        raise ValueError("beta must be 1 or 2")
    if n < 1:
        raise ValueError("n must be >= 1")
    diag = rng.standard_normal(n) * np.sqrt(2.0 / (beta * n))
    if n > 1:
        dof = beta * np.arange(n - 1, 0, -1)
        off = np.sqrt(rng.chisquare(dof) / (beta * n))
    else:
        off = np.zeros(0)
    return TridiagonalMatrix(diag, off)


# ---------------------------------------------------------------------------
# deterministic spectral machinery

def _sturm_counts(diag: np.ndarray, off2: np.ndarray, x: np.ndarray,
                  pivmin: float) -> np.ndarray:
    """Number of eigenvalues strictly below each shift in x."""
    d = diag[0] - x
    d = np.where(np.abs(d) < pivmin, -pivmin, d)
    count = (d < 0).astype(np.int64)
    for i in range(1, diag.size):
        d = diag[i] - x - off2[i - 1] / d
        d = np.where(np.abs(d) < pivmin, -pivmin, d)
        count += d < 0
    return count


def eigenvalues_sturm(T: TridiagonalMatrix) -> ZeroConfiguration:
    """All eigenvalues, ascending, by Sturm-count bisection.

    Gershgorin discs provide the initial bracket; every eigenvalue is
    bisected to absolute width 1e-12 * (1 + ||T||_inf).
    """
    n = T.n
    diag = T.diagonal
    off = T.offdiagonal
    if n == 1:
        return ZeroConfiguration(diag.astype(complex), 0.0)
    radius = np.zeros(n)
    radius[:-1] += np.abs(off)
    radius[1:] += np.abs(off)
    lo0 = float(np.min(diag - radius))
    hi0 = float(np.max(diag + radius))
    tol = 1e-12 * (1.0 + T.norm_inf())
    pivmin = np.finfo(float).eps * max(1.0, float(np.max(off * off, initial=0.0)))
    off2 = off * off
    kk = np.arange(n)
    lo = np.full(n, lo0)
    hi = np.full(n, hi0 + tol)
    for _ in range(120):
        if float(np.max(hi - lo)) <= tol:
            break
        mid = 0.5 * (lo + hi)
        cnt = _sturm_counts(diag, off2, mid, pivmin)
        take_lo = cnt <= kk
        lo = np.where(take_lo, mid, lo)
        hi = np.where(take_lo, hi, mid)
    vals = 0.5 * (lo + hi)
    return ZeroConfiguration(np.sort(vals).astype(complex), 0.0)


def semicircle_cdf(x):
    """CDF of the semicircle law on [-2, 2]."""
    arr = np.asarray(x, dtype=float)
    c = np.clip(arr, -2.0, 2.0)
    val = 0.5 + (c * np.sqrt(4.0 - c * c) + 4.0 * np.arcsin(c / 2.0)) / (4.0 * np.pi)
    val = np.where(arr <= -2.0, 0.0, np.where(arr >= 2.0, 1.0, val))
    return float(val) if arr.ndim == 0 else val
