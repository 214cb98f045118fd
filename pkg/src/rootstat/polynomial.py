"""Polynomial primitives in root and coefficient representation.

Everything downstream prefers the root representation: log-derivative sums
let the solvers and identities avoid the exponentially ill-conditioned
expansion into coefficients. Coefficient form is kept for round trips,
Kac polynomials, and term-by-term differentiation.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

#: Hard ceiling for expanding a root set into coefficients. Beyond this the
#: coefficient representation is numerically meaningless in doubles.
MAX_EXPANSION_DEGREE = 2048

_FACTOR_SHUFFLE_SEED = 0x5DEECE66D


class PoleProximityError(ValueError):
    """Evaluation point is numerically indistinguishable from a zero."""


def _readonly_complex(values) -> np.ndarray:
    arr = np.atleast_1d(np.array(values, dtype=complex))
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True)
class ZeroConfiguration:
    """Ordered multiset of complex zeros with a declared imaginary-part bound.

    ``im_bound == 0`` means all zeros are real to machine tolerance.
    """

    zeros: np.ndarray
    im_bound: float = 0.0

    def __post_init__(self):
        arr = _readonly_complex(self.zeros)
        if arr.ndim != 1 or arr.size < 1:
            raise ValueError("a zero configuration needs at least one zero")
        if self.im_bound < 0:
            raise ValueError("im_bound must be non-negative")
        scale = max(1.0, float(np.max(np.abs(arr))))
        if float(np.max(np.abs(arr.imag))) > self.im_bound + 1e-9 * scale:
            raise ValueError("imaginary parts exceed the declared bound")
        object.__setattr__(self, "zeros", arr)

    @property
    def n(self) -> int:
        return self.zeros.size

    @property
    def scale(self) -> float:
        return max(1.0, float(np.max(np.abs(self.zeros))))

    def mean(self) -> complex:
        return complex(np.mean(self.zeros))

    def mean_abs(self) -> float:
        return float(np.mean(np.abs(self.zeros)))


@dataclass(frozen=True)
class CoefficientPolynomial:
    """Dense polynomial, coefficients in ascending degree order."""

    coeffs: np.ndarray

    def __post_init__(self):
        arr = _readonly_complex(self.coeffs)
        if arr.ndim != 1 or arr.size < 1:
            raise ValueError("need at least one coefficient")
        if arr[-1] == 0:
            raise ValueError("leading coefficient must be non-zero")
        object.__setattr__(self, "coeffs", arr)

    @property
    def degree(self) -> int:
        return self.coeffs.size - 1


def coeffs_from_roots(roots: ZeroConfiguration,
                      max_degree: int = MAX_EXPANSION_DEGREE) -> CoefficientPolynomial:
    """Expand a monic polynomial from its roots.

    Factors are multiplied in a fixed shuffled order to limit systematic
    cancellation growth. Degrees above ``max_degree`` are refused outright
    as a conditioning hazard.
    """
    n = roots.n
    if n > max_degree:
        raise ValueError(
            f"degree {n} exceeds expansion ceiling {max_degree}; "
            "use the root representation instead")
    order = np.random.default_rng(_FACTOR_SHUFFLE_SEED).permutation(n)
    coeffs = np.ones(1, dtype=complex)
    for z in roots.zeros[order]:
        coeffs = np.convolve(coeffs, np.array([-z, 1.0 + 0j]))
    return CoefficientPolynomial(coeffs)


def horner_eval(p: CoefficientPolynomial, x):
    """Evaluate p at x (scalar or array) by nested multiplication."""
    acc = np.zeros_like(np.asarray(x, dtype=complex))
    for c in p.coeffs[::-1]:
        acc = acc * x + c
    return acc if acc.ndim else complex(acc)


def horner_eval_with_derivative(p: CoefficientPolynomial, x):
    """Evaluate (p(x), p'(x)) in one Horner pass."""
    x = np.asarray(x, dtype=complex)
    v = np.zeros_like(x)
    dv = np.zeros_like(x)
    for c in p.coeffs[::-1]:
        dv = dv * x + v
        v = v * x + c
    if v.ndim:
        return v, dv
    return complex(v), complex(dv)


def differentiate_coeffs(p: CoefficientPolynomial) -> CoefficientPolynomial:
    """Coefficient-wise derivative; degree drops by exactly one."""
    if p.degree < 1:
        raise ValueError("constant polynomial has an empty derivative")
    k = np.arange(1, p.degree + 1)
    return CoefficientPolynomial(p.coeffs[1:] * k)


def log_derivative_sums(roots: ZeroConfiguration, x: complex,
                        eps_pole: float | None = None):
    """Return (s1, s2) with s1 = sum 1/(x-z_j) and s2 = sum 1/(x-z_j)^2.

    s1 is p'/p and the identity p''/p = s1^2 - s2 is available to callers.
    The pole tolerance is scale-relative because configurations get
    rescaled downstream.
    """
    if eps_pole is None:
        eps_pole = 1e-12 * roots.scale
    diff = x - roots.zeros
    if float(np.min(np.abs(diff))) < eps_pole:
        raise PoleProximityError(f"point {x} is within {eps_pole} of a zero")
    inv = 1.0 / diff
    return complex(np.sum(inv)), complex(np.sum(inv * inv))
