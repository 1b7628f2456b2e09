"""Eigensolver, operator powers, and biorthonormality checks."""

import numpy as np
import pytest

from kgmetric import (
    BiorthonormalSystem,
    SpectralDecomposition,
    check_biorthonormal,
    hermitian_eigendecompose,
    operator_power,
)
from kgmetric.errors import (
    DimensionMismatchError,
    NoConvergenceError,
    NonPositiveSpectrumError,
    NotHermitianError,
)
from kgmetric.rng import generator, random_hermitian, random_positive_hermitian
from kgmetric.two_component import eigen_system


def maxabs(a):
    return float(np.max(np.abs(a)))


def test_diagonal_matrix_is_its_own_decomposition():
    spec = hermitian_eigendecompose(np.diag([4.0, 9.0]))
    np.testing.assert_allclose(spec.eigenvalues, [4.0, 9.0], atol=1e-14)
    assert maxabs(np.abs(spec.eigenvectors) - np.eye(2)) <= 1e-14


def test_two_by_two_closed_form():
    spec = hermitian_eigendecompose(np.array([[2.0, 1.0], [1.0, 2.0]]))
    np.testing.assert_allclose(spec.eigenvalues, [1.0, 3.0], atol=1e-12)
    # eigenvectors match (1,-1)/sqrt2 and (1,1)/sqrt2 up to phase
    want = np.array([[1.0, 1.0], [-1.0, 1.0]]) / np.sqrt(2.0)
    for col in range(2):
        overlap = abs(np.vdot(want[:, col], spec.eigenvectors[:, col]))
        assert abs(overlap - 1.0) <= 1e-12


@pytest.mark.parametrize("n", [2, 3, 5, 8, 16, 33, 64])
def test_random_hermitian_residuals(n):
    rng = generator(0, f"spectral:residual:{n}")
    m = random_hermitian(rng, n)
    spec = hermitian_eigendecompose(m)
    assert maxabs(m @ spec.eigenvectors - spec.eigenvectors * spec.eigenvalues) <= 1e-10 * max(
        maxabs(m), 1.0
    )
    assert maxabs(spec.eigenvectors.conj().T @ spec.eigenvectors - np.eye(n)) <= 1e-10
    assert spec.eigenvalues.dtype.kind == "f"
    assert np.all(np.diff(spec.eigenvalues) >= 0.0)


def test_degenerate_cluster_stays_orthonormal():
    rng = generator(1, "spectral:degenerate")
    from kgmetric.rng import random_unitary

    u = random_unitary(rng, 4)
    w = np.array([1.0, 1.0, 1.0, 2.0])
    m = (u * w) @ u.conj().T
    spec = hermitian_eigendecompose(0.5 * (m + m.conj().T))
    np.testing.assert_allclose(spec.eigenvalues, w, atol=1e-10)
    assert maxabs(spec.eigenvectors.conj().T @ spec.eigenvectors - np.eye(4)) <= 1e-12


def test_non_hermitian_input_is_rejected():
    with pytest.raises(NotHermitianError):
        hermitian_eigendecompose(np.array([[0.0, 1.0], [0.0, 0.0]]))
    with pytest.raises(NotHermitianError):
        hermitian_eigendecompose(np.array([[np.nan, 0.0], [0.0, 1.0]]))
    with pytest.raises(DimensionMismatchError):
        hermitian_eigendecompose(np.ones((2, 3)))


def test_zero_matrix_and_tiny_sizes():
    spec = hermitian_eigendecompose(np.zeros((3, 3)))
    np.testing.assert_allclose(spec.eigenvalues, np.zeros(3))
    spec1 = hermitian_eigendecompose(np.array([[7.0]]))
    np.testing.assert_allclose(spec1.eigenvalues, [7.0])


def test_operator_power_diagonal_inverse_sqrt():
    spec = hermitian_eigendecompose(np.diag([4.0, 9.0]))
    np.testing.assert_allclose(
        operator_power(spec, -0.5), np.diag([0.5, 1.0 / 3.0]), atol=1e-14
    )


def test_operator_power_reconstruction_and_inverse():
    rng = generator(2, "spectral:power")
    spec = hermitian_eigendecompose(random_positive_hermitian(rng, 8))
    d = spec.matrix()
    assert maxabs(operator_power(spec, 1.0) - d) <= 1e-12 * maxabs(d)
    assert maxabs(operator_power(spec, -1.0) @ d - np.eye(8)) <= 1e-12
    assert maxabs(operator_power(spec, 0.0) - np.eye(8)) <= 1e-15


def test_operator_power_additivity():
    rng = generator(3, "spectral:power-add")
    spec = hermitian_eigendecompose(random_positive_hermitian(rng, 6))
    for g1, g2 in [(0.5, 0.5), (-0.5, 1.5), (-1.0, 2.0), (0.25, 0.75)]:
        lhs = operator_power(spec, g1) @ operator_power(spec, g2)
        rhs = operator_power(spec, g1 + g2)
        assert maxabs(lhs - rhs) <= 1e-10 * max(maxabs(rhs), 1.0)


def test_operator_power_sign_rules():
    indef = SpectralDecomposition(
        eigenvalues=np.array([-2.0, 3.0]), eigenvectors=np.eye(2, dtype=complex)
    )
    # integer nonnegative powers work for any spectrum
    np.testing.assert_allclose(operator_power(indef, 2.0), np.diag([4.0, 9.0]))
    for gamma in (-1.0, 0.5, -0.5):
        with pytest.raises(NonPositiveSpectrumError):
            operator_power(indef, gamma)


def test_biorthonormal_identity_basis():
    eye = np.eye(4, dtype=complex)
    report = check_biorthonormal(
        BiorthonormalSystem(eye, eye, labels=tuple(range(4)))
    )
    assert report.max_orthonormality_defect == 0.0
    assert report.max_completeness_defect == 0.0
    assert report.passed


def test_biorthonormal_doubled_eigensystem():
    rng = generator(4, "spectral:bio")
    d_spec = hermitian_eigendecompose(random_positive_hermitian(rng, 8))
    report = check_biorthonormal(eigen_system(d_spec, 1.0), tol=1e-10)
    assert report.passed


def test_biorthonormal_scaled_rights_fail():
    eye = np.eye(3, dtype=complex)
    report = check_biorthonormal(
        BiorthonormalSystem(2.0 * eye, eye, labels=tuple(range(3)))
    )
    assert abs(report.max_orthonormality_defect - 1.0) <= 1e-14
    assert not report.passed


def test_convergence_cap_is_enforced():
    # a well-conditioned matrix cannot fail; exercise the error type by
    # asking for an absurdly tight target on an ill-scaled matrix instead
    rng = generator(5, "spectral:converge")
    m = random_hermitian(rng, 12)
    try:
        hermitian_eigendecompose(m, tol=1e-30)
    except NoConvergenceError:
        pass  # acceptable: target below machine precision
    # the default tolerance must always succeed
    hermitian_eigendecompose(m)
