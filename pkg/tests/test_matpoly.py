import numpy as np
import pytest
from scipy.stats import unitary_group

from multieig import MatrixPolynomial
from multieig.errors import (
    DegenerateDegreeError,
    SingularLeadingCoefficientError,
)
from multieig.matpoly import (
    derivative,
    diagonalization_residual,
    evaluate,
    from_diagonals,
    is_weakly_normal,
    pencil_spectrum,
    simultaneous_diagonalizer,
    spectrum,
)

from conftest import REF_COEFFS, crandn, random_dense, random_weakly_normal


def test_eval_reference_at_minus_four(ref_P):
    # 16 + 12 + 2, 16 + 4, 16 - 12 + 2
    np.testing.assert_allclose(evaluate(ref_P, -4), np.diag([30, 20, 6]), atol=0)


def test_eval_at_zero_is_constant_term(rng):
    P = random_dense(rng, 4, 3)
    np.testing.assert_array_equal(evaluate(P, 0), P.coeffs[0])


def test_eval_identity_pencil():
    P = MatrixPolynomial([np.zeros((3, 3)), np.eye(3)])
    np.testing.assert_array_equal(P(5), 5 * np.eye(3))


def test_horner_matches_power_sum(rng):
    for _ in range(120):
        n = int(rng.integers(1, 7))
        m = int(rng.integers(0, 5))
        P = random_dense(rng, n, m)
        lam = complex(*rng.standard_normal(2)) * 2
        naive = sum(A * lam**j for j, A in enumerate(P.coeffs))
        h = evaluate(P, lam)
        scale = sum(np.linalg.norm(A) * abs(lam) ** j for j, A in enumerate(P.coeffs))
        assert np.linalg.norm(h - naive) <= 1e-12 * scale


def test_derivative_reference(ref_P):
    dP = derivative(ref_P)
    np.testing.assert_array_equal(dP.coeffs[0], np.diag([-3, -1, 3]))
    np.testing.assert_array_equal(dP.coeffs[1], 2 * np.eye(3))
    np.testing.assert_allclose(dP(-4), np.diag([-11, -9, -5]))


def test_derivative_linear_and_monomial(rng):
    A0, A1 = crandn(rng, 3, 3), crandn(rng, 3, 3)
    d = derivative(MatrixPolynomial([A0, A1]))
    assert d.m == 0
    np.testing.assert_array_equal(d.coeffs[0], A1)
    d2 = derivative(MatrixPolynomial([np.zeros((2, 2)), np.zeros((2, 2)), np.eye(2)]))
    np.testing.assert_array_equal(d2.coeffs[1], 2 * np.eye(2))
    np.testing.assert_array_equal(d2.coeffs[0], np.zeros((2, 2)))


def test_derivative_of_constant_fails():
    with pytest.raises(DegenerateDegreeError):
        derivative(MatrixPolynomial([np.eye(2)]))


def test_spectrum_reference(ref_P):
    ev = np.sort_complex(spectrum(ref_P))
    np.testing.assert_allclose(ev, np.sort_complex(np.array([1, 2, 0, 1, -1, -2], dtype=complex)),
                               atol=1e-7)


def test_spectrum_linear_diagonal():
    d = np.array([3.0, -1.0, 2.5 + 1j])
    P = MatrixPolynomial([-np.diag(d), np.eye(3)])
    np.testing.assert_allclose(np.sort_complex(spectrum(P)), np.sort_complex(d), atol=1e-12)


def test_spectrum_printed_perturbed_polynomial():
    # printed coefficients carry 4 decimals; a double root moves like the square root
    # of that rounding, hence the loose tolerance on the pair near -4
    Q = MatrixPolynomial([
        [[2, 0, 0], [0, -0.9320, 0.0152], [0, -0.1552, 1.5986]],
        [[-3, 0, 0], [0, -0.0680, -0.0152], [0, 0.1552, 3.4014]],
        [[1, 0, 0], [0, 0.0680, 0.0152], [0, -0.1552, 0.5986]],
    ])
    ev = spectrum(Q)
    for target in (1, 2, 4.1982, -0.5140):
        assert np.min(np.abs(ev - target)) < 1e-3
    assert np.sum(np.abs(ev + 4) < 3e-2) == 2


def test_spectrum_singular_values_vanish(rng):
    for _ in range(30):
        P = random_dense(rng, int(rng.integers(1, 6)), int(rng.integers(1, 4)))
        big = max(np.linalg.norm(A, 2) for A in P.coeffs)
        for lam in spectrum(P):
            smin = np.linalg.svd(P(lam), compute_uv=False)[-1]
            assert smin <= 1e-8 * big * max(1.0, abs(lam)) ** P.m


def test_singular_leading_coefficient_rejected():
    with pytest.raises(SingularLeadingCoefficientError):
        MatrixPolynomial([np.eye(2), np.zeros((2, 2))])
    with pytest.raises(SingularLeadingCoefficientError):
        MatrixPolynomial([np.eye(2), np.diag([1.0, 1e-14])])


def test_pencil_spectrum_drops_infinite():
    P = MatrixPolynomial([np.diag([-1.0, -2.0]), np.diag([1.0, 0.0])], check_leading=False)
    ev = pencil_spectrum(P)
    np.testing.assert_allclose(ev, [1.0], atol=1e-12)


def test_weak_normality_reference(ref_P):
    wit = is_weakly_normal(ref_P)
    assert wit.is_weakly_normal
    assert wit.residual < 1e-12
    # a permutation up to column phases
    absU = np.abs(wit.diagonalizer)
    np.testing.assert_allclose(np.sort(absU, axis=0), np.vstack([np.zeros((2, 3)), np.ones(3)]),
                               atol=1e-12)


def test_weak_normality_rejects_triangular():
    coeffs = [c.copy() for c in REF_COEFFS]
    coeffs[1] = np.array([[-3.0, 1.0, 0.0], [0.0, -1.0, 2.0], [0.0, 0.0, 3.0]])
    wit = is_weakly_normal(MatrixPolynomial(coeffs))
    assert not wit.is_weakly_normal
    assert wit.diagonalizer is None


def test_weak_normality_conjugated_family(rng):
    for _ in range(10):
        P, _ = random_weakly_normal(rng, int(rng.integers(2, 7)), int(rng.integers(1, 4)))
        wit = is_weakly_normal(P)
        assert wit.is_weakly_normal
        U = wit.diagonalizer
        assert np.linalg.norm(U.conj().T @ U - np.eye(P.n)) < 1e-10
        assert wit.residual < 1e-10


def test_weak_normality_unitary_invariance(rng):
    for _ in range(10):
        n = int(rng.integers(2, 6))
        W = unitary_group.rvs(n, random_state=rng)
        P, _ = random_weakly_normal(rng, n, 2)
        D = random_dense(rng, n, 2)
        assert is_weakly_normal(P.conjugate_by(W)).is_weakly_normal
        assert not is_weakly_normal(D.conjugate_by(W)).is_weakly_normal


def test_simultaneous_diagonalizer_diagonal_family():
    P = from_diagonals([[1, 2, 3], [4, 5, 6], [1, 1, 2]])
    U = simultaneous_diagonalizer(P)
    assert diagonalization_residual(P, U) < 1e-14


def test_simultaneous_diagonalizer_repeated_joint_eigenvalues(rng):
    # two equal joint eigen-tuples: any basis of that subspace works
    d0 = np.array([1.0, 1.0, 2.0, 3.0])
    d1 = np.array([5.0, 5.0, -1.0, 2.0])
    Q = unitary_group.rvs(4, random_state=rng)
    P = from_diagonals([d0, d1], Q)
    U = simultaneous_diagonalizer(P)
    assert diagonalization_residual(P, U) < 1e-10


def test_simultaneous_diagonalizer_reference(ref_P):
    assert diagonalization_residual(ref_P, simultaneous_diagonalizer(ref_P)) < 1e-12


def test_weakly_normal_evaluations_are_normal(rng):
    for _ in range(20):
        P, _ = random_weakly_normal(rng, int(rng.integers(2, 7)), int(rng.integers(1, 4)))
        mu = complex(*rng.standard_normal(2)) * 3
        A = P(mu)
        assert np.linalg.norm(A @ A.conj().T - A.conj().T @ A) <= 1e-10 * np.linalg.norm(A) ** 2
