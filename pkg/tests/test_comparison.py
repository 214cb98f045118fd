import numpy as np
import pytest
from scipy.integrate import quad
from scipy.linalg import expm

from rootstat.comparison import (build_matrix, c_bound, c_factor,
                                 char_poly_residual, jtilde_dense,
                                 jtilde_trace, lemma3_check, matrix_exp_trace,
                                 s_tilde)
from rootstat.polynomial import ZeroConfiguration
from rootstat.rootfind import derivative_tower


def test_build_matrix_examples():
    m = build_matrix(ZeroConfiguration([1.0, -1.0]))
    assert m.size == 1
    assert np.allclose(m.entries, [[0.0]])

    m = build_matrix(ZeroConfiguration([0.0, 1.0, 2.0]))
    assert np.allclose(m.entries, [[2 / 3, -1 / 3], [-2 / 3, 4 / 3]])
    eig = np.sort(np.linalg.eigvals(m.entries).real)
    assert np.allclose(eig, [1 - 1 / np.sqrt(3), 1 + 1 / np.sqrt(3)])


def test_matrix_trace_mean_preservation():
    rng = np.random.default_rng(31)
    for _ in range(20):
        n = int(rng.integers(2, 30))
        z = rng.uniform(-5, 5, n) + 1j * rng.uniform(-1, 1, n)
        m = build_matrix(ZeroConfiguration(z, 1.0))
        want = (n - 1) / n * np.sum(z)
        assert abs(m.trace() - want) <= 1e-12 * (1 + abs(want))
        assert np.allclose(m.entries, np.diag(z[1:])
                           + np.outer(z[0] - z[1:], np.ones(n - 1)) / n)


def test_char_poly_residual_examples():
    roots = ZeroConfiguration([1.0, -1.0])
    assert char_poly_residual(build_matrix(roots), roots, 0.0) <= 1e-14

    roots = ZeroConfiguration([0.0, 1.0, 2.0])
    m = build_matrix(roots)
    assert char_poly_residual(m, roots, 1 + 1 / np.sqrt(3)) <= 1e-10
    assert char_poly_residual(m, roots, 5.0) <= 1e-10


def test_s_tilde():
    assert s_tilde(ZeroConfiguration([0.0, 1.0, 2.0])) == pytest.approx(-3.0)
    assert s_tilde(ZeroConfiguration([2.0, 2.0, 2.0])) == pytest.approx(0.0)
    assert s_tilde(ZeroConfiguration([1.0, -1.0])) == pytest.approx(2.0)
    rng = np.random.default_rng(32)
    for _ in range(20):
        n = int(rng.integers(2, 40))
        z = rng.standard_normal(n) + 1j * 0
        roots = ZeroConfiguration(z)
        st = s_tilde(roots)
        want = n * (z[0] - np.mean(z))
        assert abs(st - want) <= 1e-14 * n * (1 + abs(want))


def test_c_factor_examples():
    # identical zeros: integrand is 1
    assert c_factor(ZeroConfiguration([2.0, 2.0]), 1.7) == pytest.approx(1.7)
    c = c_factor(ZeroConfiguration([0.0, 1.0, 2.0]), np.pi)
    assert c == pytest.approx(-2j, abs=1e-12)
    # real zeros: |c| <= |t|
    rng = np.random.default_rng(33)
    for _ in range(50):
        n = int(rng.integers(2, 20))
        roots = ZeroConfiguration(rng.uniform(-5, 5, n))
        t = float(rng.uniform(-5, 5))
        assert abs(c_factor(roots, t)) <= abs(t) + 1e-12


def test_c_factor_quadrature_cross_check():
    rng = np.random.default_rng(34)
    for _ in range(25):
        n = int(rng.integers(2, 30))
        z = rng.uniform(-10, 10, n) + 1j * rng.uniform(-1, 1, n)
        roots = ZeroConfiguration(z, 1.0)
        t = float(rng.uniform(-5, 5))
        theta = s_tilde(roots) / n
        re, _ = quad(lambda u: np.exp(1j * u * theta).real, 0, t)
        im, _ = quad(lambda u: np.exp(1j * u * theta).imag, 0, t)
        assert abs(c_factor(roots, t) - (re + 1j * im)) <= 1e-10


def test_c_factor_series_switch_continuity():
    # tiny S~/n must agree with the closed form just above the switch
    z = ZeroConfiguration([1e-7, 0.0], 0.0)   # theta = n(z1 - mean)/n = 5e-8
    t = 2.0
    theta = 5e-8
    closed = (np.exp(1j * t * theta) - 1) / (1j * theta)
    assert abs(c_factor(z, t) - closed) <= 1e-12


def test_c_bound_limit_continuity():
    t = 3.0
    assert c_bound(0.0, t) == pytest.approx(t)
    assert c_bound(1e-9, t) == pytest.approx(c_bound(1e-7, t), rel=1e-5)
    assert c_bound(0.5, t) == pytest.approx(np.expm1(3.0), rel=1e-12)


def test_jtilde_trace_examples():
    roots = ZeroConfiguration([0.0, 1.0, 2.0])
    assert jtilde_trace(roots, 0.0) == pytest.approx(-1.0)
    assert jtilde_trace(ZeroConfiguration([3.0, 3.0]), 1.3) == pytest.approx(0.0)
    # bound at equality for t=0
    assert abs(jtilde_trace(roots, 0.0)) <= 0 + np.mean(np.abs(roots.zeros)) + 1e-15


def test_jtilde_power_law():
    rng = np.random.default_rng(35)
    for _ in range(20):
        n = int(rng.integers(2, 11))
        z = rng.uniform(-3, 3, n) + 1j * rng.uniform(-1, 1, n)
        roots = ZeroConfiguration(z, 1.0)
        jt = jtilde_dense(roots)
        st = s_tilde(roots)
        power = jt.copy()
        for k in range(2, 6):
            power = power @ jt
            want = st ** (k - 1) * jt
            scale = np.max(np.abs(want)) + 1.0
            assert np.max(np.abs(power - want)) <= 1e-10 * scale


def test_matrix_exp_trace_examples():
    assert matrix_exp_trace(np.array([[0.0]]), 2.5) == pytest.approx(1.0)
    assert matrix_exp_trace(np.diag([1.0, 2.0]), np.pi) == pytest.approx(0.0, abs=1e-12)
    m = build_matrix(ZeroConfiguration([0.0, 1.0, 2.0])).entries
    want = np.exp(1j * (1 - 1 / np.sqrt(3))) + np.exp(1j * (1 + 1 / np.sqrt(3)))
    assert matrix_exp_trace(m, 1.0) == pytest.approx(want, abs=1e-12)
    with pytest.raises(ValueError):
        matrix_exp_trace(np.eye(65), 1.0)


def test_lemma3_two_zeros_exact():
    roots = ZeroConfiguration([1.0, -1.0])
    tower = derivative_tower(roots, 1)
    for t in (0.3, -2.0, 4.9):
        cert = lemma3_check(roots, t, tower)
        want = 1 - np.exp(-1j * t)
        assert cert.lhs == pytest.approx(want, abs=1e-12)
        assert cert.residual <= 1e-12
        assert cert.passed and cert.bound_c_ok and cert.bound_trace_ok


def test_lemma3_identical_zeros():
    roots = ZeroConfiguration([2.0, 2.0, 2.0])
    tower = derivative_tower(roots, 1)
    cert = lemma3_check(roots, 1.1, tower)
    assert abs(cert.lhs) <= 1e-12
    assert abs(cert.rhs) <= 1e-12
    assert cert.passed


def test_closed_form_rhs_is_the_split_product_trace():
    """rhs == Tr(e^{itD} e^{itJ~/n}) - Tr(e^{itD}) exactly.

    The certificate's lhs uses the true e^{itM}; because D and J~ do not
    commute the two differ by the Lie product-splitting error, so residuals
    are genuinely nonzero for n >= 3. This pins down what the closed form
    computes.
    """
    rng = np.random.default_rng(36)
    for _ in range(30):
        n = int(rng.integers(3, 9))
        z = rng.uniform(-10, 10, n) + 1j * rng.uniform(-1, 1, n)
        roots = ZeroConfiguration(z, 1.0)
        t = float(rng.uniform(-5, 5))
        D = np.diag(z[1:])
        jt = jtilde_dense(roots)
        split = np.trace(expm(1j * t * D) @ expm(1j * t * jt / n)) \
            - np.trace(expm(1j * t * D))
        rhs = 1j * c_factor(roots, t) * jtilde_trace(roots, t)
        assert abs(split - rhs) <= 1e-10 * (1 + abs(split))


def test_lemma3_residual_is_splitting_error_not_a_bug():
    # concrete n=3 case where the discrepancy is macroscopic
    roots = ZeroConfiguration([0.0, 1.0, 2.0])
    tower = derivative_tower(roots, 1)
    cert = lemma3_check(roots, 1.0, tower)
    M = build_matrix(roots).entries
    D = np.diag([1.0, 2.0])
    true_lhs = np.trace(expm(1j * M)) - np.trace(expm(1j * D))
    assert cert.lhs == pytest.approx(true_lhs, abs=1e-10)
    assert cert.residual == pytest.approx(abs(true_lhs - cert.rhs), abs=1e-12)
    assert cert.residual > 1e-2      # not an implementation artifact
    assert not cert.passed
