import numpy as np
import pytest

from rootstat.ensembles import (EnsembleSpec, TridiagonalMatrix,
                                UnknownLawError, eigenvalues_sturm,
                                parse_beta, parse_type1_law,
                                sample_beta_tridiag, sample_kac, sample_type1,
                                semicircle_cdf)
from rootstat.rng import rng_stream


def test_parse_type1_laws():
    assert parse_type1_law("circle")["c0"] == 1.0
    u = parse_type1_law("uniform[-1,1]")
    assert (u["lo"], u["hi"], u["c0"]) == (-1.0, 1.0, 0.0)
    r = parse_type1_law("rademacher")
    assert r["jitter"] == pytest.approx(1e-6)
    r = parse_type1_law("rademacher(jitter=0.01)")
    assert r["jitter"] == pytest.approx(0.01)
    assert parse_type1_law("gauss")["c0"] == 0.0
    with pytest.raises(UnknownLawError):
        parse_type1_law("cauchy")
    with pytest.raises(UnknownLawError):
        parse_type1_law("uniform[1,-1]")


def test_parse_beta():
    assert parse_beta("beta-tridiag(beta=1)") == 1
    assert parse_beta("beta-tridiag(beta=2)") == 2
    with pytest.raises(UnknownLawError):
        parse_beta("beta-tridiag(beta=4)")


def test_sample_type1_shapes_and_bounds():
    rng = rng_stream(5, 0, "test")
    z = sample_type1(EnsembleSpec("type1", "circle", 50), rng)
    assert z.n == 50
    assert np.allclose(np.abs(z.zeros), 1.0)
    assert z.im_bound == 1.0

    z = sample_type1(EnsembleSpec("type1", "uniform[-1,1]", 40), rng)
    assert z.im_bound == 0.0
    assert np.all(np.abs(z.zeros.real) <= 1.0)
    assert np.all(z.zeros.imag == 0)

    z = sample_type1(EnsembleSpec("type1", "rademacher", 30), rng)
    assert np.all(np.abs(np.abs(z.zeros.real) - 1.0) <= 2e-6)


def test_sample_type1_wrong_kind():
    with pytest.raises(ValueError):
        sample_type1(EnsembleSpec("type2", "kac-gauss", 5), rng_stream(0, 0, "x"))


def test_sample_kac():
    rng = rng_stream(6, 0, "test")
    p = sample_kac(EnsembleSpec("type2", "kac-gauss", 16), rng)
    assert p.degree == 16
    assert p.coeffs[-1] != 0
    p = sample_kac(EnsembleSpec("type2", "kac-rademacher", 16), rng)
    assert np.all(np.abs(np.abs(p.coeffs.real) - 1.0) <= 1e-15)
    with pytest.raises(UnknownLawError):
        sample_kac(EnsembleSpec("type2", "kac-cauchy", 16), rng)


def test_beta_tridiag_shapes():
    rng = rng_stream(7, 0, "test")
    T = sample_beta_tridiag(20, 2, rng)
    assert T.n == 20
    assert T.offdiagonal.size == 19
    assert np.all(T.offdiagonal > 0)
    with pytest.raises(ValueError):
        sample_beta_tridiag(10, 3, rng)


def test_tridiagonal_norms():
    T = TridiagonalMatrix([1.0, -2.0, 1.0], [0.5, 0.25])
    assert T.trace() == pytest.approx(0.0)
    assert T.norm_inf() == pytest.approx(2.75)
    with pytest.raises(ValueError):
        TridiagonalMatrix([1.0, 2.0], [0.1, 0.2])


def test_sturm_known_spectrum():
    # free Jacobi matrix on 3 nodes: eigenvalues -sqrt(2), 0, sqrt(2)
    T = TridiagonalMatrix([0.0, 0.0, 0.0], [1.0, 1.0])
    out = eigenvalues_sturm(T)
    assert np.allclose(out.zeros.real, [-np.sqrt(2), 0.0, np.sqrt(2)],
                       atol=1e-10)
    assert out.im_bound == 0.0


def test_sturm_matches_dense_eigensolver():
    rng = np.random.default_rng(41)
    for _ in range(20):
        n = int(rng.integers(1, 40))
        d = rng.standard_normal(n)
        e = rng.standard_normal(max(n - 1, 0))
        T = TridiagonalMatrix(d, e)
        dense = np.diag(d).astype(float)
        if n > 1:
            dense[np.arange(n - 1), np.arange(1, n)] = e
            dense[np.arange(1, n), np.arange(n - 1)] = e
        want = np.sort(np.linalg.eigvalsh(dense))
        got = eigenvalues_sturm(T).zeros.real
        assert np.max(np.abs(got - want)) <= 1e-9 * (1 + np.max(np.abs(want)))


def test_semicircle_cdf_values():
    assert semicircle_cdf(-2.5) == 0.0
    assert semicircle_cdf(2.5) == 1.0
    assert semicircle_cdf(0.0) == pytest.approx(0.5)
    assert semicircle_cdf(1.0) == pytest.approx(0.80449889, abs=1e-8)
    arr = semicircle_cdf(np.array([-3.0, 0.0, 3.0]))
    assert np.allclose(arr, [0.0, 0.5, 1.0])
    # monotone
    x = np.linspace(-2.2, 2.2, 500)
    assert np.all(np.diff(semicircle_cdf(x)) >= 0)


def test_spec_validation():
    with pytest.raises(ValueError):
        EnsembleSpec("type9", "circle", 5)
    with pytest.raises(ValueError):
        EnsembleSpec("type1", "circle", 0)
