import numpy as np
import pytest

from rootstat.polynomial import (CoefficientPolynomial, PoleProximityError,
                                 ZeroConfiguration, coeffs_from_roots,
                                 differentiate_coeffs, horner_eval,
                                 horner_eval_with_derivative,
                                 log_derivative_sums)


def test_zero_configuration_basic():
    z = ZeroConfiguration([1.0, 2.0, 3.0])
    assert z.n == 3
    assert z.scale == 3.0
    assert z.mean() == 2.0
    assert z.mean_abs() == 2.0


def test_zero_configuration_rejects_imag_over_bound():
    with pytest.raises(ValueError):
        ZeroConfiguration([1.0 + 0.5j], im_bound=0.1)
    # within declared bound is fine
    ZeroConfiguration([1.0 + 0.5j], im_bound=0.5)


def test_zero_configuration_readonly():
    z = ZeroConfiguration([1.0, 2.0])
    with pytest.raises(ValueError):
        z.zeros[0] = 5.0


def test_coeffs_from_roots_cubic():
    # (z-1)(z-2)(z-3) = z^3 - 6z^2 + 11z - 6
    p = coeffs_from_roots(ZeroConfiguration([1, 2, 3]))
    assert np.allclose(p.coeffs, [-6, 11, -6, 1])


def test_coeffs_from_roots_degree_ceiling():
    z = ZeroConfiguration(np.zeros(5))
    with pytest.raises(ValueError):
        coeffs_from_roots(z, max_degree=4)


def test_round_trip_roots_evaluate_to_zero():
    rng = np.random.default_rng(11)
    for _ in range(30):
        n = int(rng.integers(1, 21))
        z = rng.uniform(-2, 2, n) + 1j * rng.uniform(-2, 2, n)
        roots = ZeroConfiguration(z, im_bound=2.0)
        p = coeffs_from_roots(roots)
        vals = horner_eval(p, roots.zeros)
        # residual scales with the evaluated magnitude of |coeffs|, not
        # with the root scale: coefficients grow geometrically in n
        mag = np.polyval(np.abs(p.coeffs[::-1]), np.abs(roots.zeros))
        assert np.max(np.abs(vals) / (1.0 + mag)) <= 1e-12


def test_mean_identity_monic():
    rng = np.random.default_rng(12)
    for _ in range(20):
        n = int(rng.integers(2, 21))
        z = rng.uniform(-2, 2, n) + 1j * rng.uniform(-2, 2, n)
        roots = ZeroConfiguration(z, im_bound=2.0)
        p = coeffs_from_roots(roots)
        total = np.sum(roots.zeros)
        assert abs(total + p.coeffs[-2]) <= 1e-12 * (1 + abs(total))


def test_horner_matches_derivative_pair():
    p = CoefficientPolynomial([-6, 11, -6, 1])
    v, dv = horner_eval_with_derivative(p, 5.0)
    assert v == pytest.approx(24.0)
    assert dv == pytest.approx(26.0)  # 3*25 - 12*5 + 11
    assert horner_eval(p, 5.0) == pytest.approx(24.0)


def test_differentiate_coeffs():
    p = CoefficientPolynomial([-6, 11, -6, 1])
    dp = differentiate_coeffs(p)
    assert np.allclose(dp.coeffs, [11, -12, 3])
    with pytest.raises(ValueError):
        differentiate_coeffs(CoefficientPolynomial([5]))


def test_leading_zero_rejected():
    with pytest.raises(ValueError):
        CoefficientPolynomial([1, 2, 0])


def test_derivative_consistency_with_log_sums():
    rng = np.random.default_rng(13)
    for _ in range(10):
        n = int(rng.integers(2, 21))
        z = rng.uniform(-2, 2, n) + 1j * rng.uniform(-2, 2, n)
        roots = ZeroConfiguration(z, im_bound=2.0)
        p = coeffs_from_roots(roots)
        dp = differentiate_coeffs(p)
        for _ in range(20):
            x = complex(rng.uniform(-3, 3), rng.uniform(-3, 3))
            if np.min(np.abs(x - z)) < 1e-3:
                continue
            s1, _ = log_derivative_sums(roots, x)
            lhs = horner_eval(dp, x)
            rhs = s1 * horner_eval(p, x)
            assert abs(lhs - rhs) <= 1e-9 * (1 + abs(lhs))


def test_log_derivative_sums_examples():
    s1, s2 = log_derivative_sums(ZeroConfiguration([1, -1]), 0.0)
    assert s1 == pytest.approx(0.0)
    assert s2 == pytest.approx(2.0)
    s1, s2 = log_derivative_sums(ZeroConfiguration([0]), 2.0)
    assert s1 == pytest.approx(0.5)
    assert s2 == pytest.approx(0.25)


def test_log_derivative_sums_pole():
    with pytest.raises(PoleProximityError):
        log_derivative_sums(ZeroConfiguration([1, -1]), 1.0 + 1e-15)
