"""Dense Hermitian spectral machinery.

Everything downstream (two-component Hamiltonians, metric operators,
invariant inner products) is built from the spectral resolution of the
spatial operator D, so this module owns the eigensolver and the
fractional-power calculus. The eigensolver is a cyclic complex Jacobi
iteration: at desk scale (dimensions up to a few hundred) it is robust,
deterministic, and keeps eigenvector orthonormality at machine level by
construction.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import (
    DimensionMismatchError,
    NoConvergenceError,
    NonPositiveSpectrumError,
    NotHermitianError,
)

DEFAULT_TOL = 1e-10
MAX_SWEEPS = 100
# eigenvalues closer than this (relative to the spectral radius) are treated
# as one degenerate cluster and re-orthonormalized together
DEGENERACY_GAP = 1e-8


@dataclass
class SpectralDecomposition:
    """Spectral resolution of a Hermitian operator.

    Attributes
    ----------
    eigenvalues : (n,) float array, ascending
    eigenvectors : (n, n) complex array, orthonormal columns, column j
        belonging to eigenvalues[j]
    """

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray

    @property
    def n(self) -> int:
        return self.eigenvalues.shape[0]

    def matrix(self) -> np.ndarray:
        """Reassemble the operator from its spectral data."""
        return operator_power(self, 1.0)


@dataclass
class BiorthonormalSystem:
    """Right/left eigenvector pair system with <left_m|right_n> = delta_mn.

    Columns of ``right_vectors`` and ``left_vectors`` correspond one-to-one;
    ``labels[j]`` is a (sign, mode) pair naming column j and ``energies[j]``
    its eigenvalue.
    """

    right_vectors: np.ndarray
    left_vectors: np.ndarray
    labels: tuple
    energies: np.ndarray = field(default=None)

    @property
    def size(self) -> int:
        return self.right_vectors.shape[1]


@dataclass
class BiorthoReport:
    """Result of a biorthonormality check."""

    max_orthonormality_defect: float
    max_completeness_defect: float
    tol: float
    passed: bool


def _as_square_complex(matrix, what: str = "matrix") -> np.ndarray:
    a = np.asarray(matrix, dtype=complex)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise DimensionMismatchError(f"{what} must be square, got shape {a.shape}")
    return a


def _offdiag_frobenius(a: np.ndarray) -> float:
    return float(np.linalg.norm(a - np.diag(np.diagonal(a))))


def _jacobi_sweep(a: np.ndarray, v: np.ndarray, thresh: float) -> None:
    """One cyclic pass of complex Jacobi rotations over all p < q.

    Rotations with |a_pq| <= thresh are skipped. The 2x2 subproblem is
    reduced to the real case by factoring out the phase of a_pq; the
    rotation annihilates a_pq exactly and keeps the diagonal real.
    """
    n = a.shape[0]
    for p in range(n - 1):
        for q in range(p + 1, n):
            apq = a[p, q]
            absapq = abs(apq)
            if absapq <= thresh or absapq == 0.0:
                continue
            app = a[p, p].real
            aqq = a[q, q].real
            ph = apq / absapq
            tau = (aqq - app) / (2.0 * absapq)
            if tau == 0.0:
                t = 1.0
            else:
                t = np.sign(tau) / (abs(tau) + np.hypot(1.0, tau))
            c = 1.0 / np.sqrt(1.0 + t * t)
            s = t * c
            sph = s * ph
            colp = a[:, p].copy()
            colq = a[:, q].copy()
            a[:, p] = c * colp - np.conj(sph) * colq
            a[:, q] = s * colp + c * np.conj(ph) * colq
            rowp = a[p, :].copy()
            rowq = a[q, :].copy()
            a[p, :] = c * rowp - sph * rowq
            a[q, :] = s * rowp + c * ph * rowq
            # closed-form values for the rotated 2x2 block: exact zeros on the
            # off-diagonal, exactly real diagonal
            a[p, q] = 0.0
            a[q, p] = 0.0
            a[p, p] = app - t * absapq
            a[q, q] = aqq + t * absapq
            vp = v[:, p].copy()
            vq = v[:, q].copy()
            v[:, p] = c * vp - np.conj(sph) * vq
            v[:, q] = s * vp + c * np.conj(ph) * vq


def hermitian_eigendecompose(matrix, tol: float = DEFAULT_TOL) -> SpectralDecomposition:
    """Diagonalize a complex Hermitian matrix by cyclic Jacobi rotations.

    Parameters
    ----------
    matrix : (n, n) array_like
        Hermitian up to ``tol`` in max norm.
    tol : float
        Hermiticity test tolerance and relative convergence target: the
        iteration stops once the off-diagonal Frobenius mass drops below
        ``tol`` times the Frobenius norm of the input.

    Returns
    -------
    SpectralDecomposition
        Eigenvalues ascending (ties keep the solver's column order);
        eigenvector columns orthonormal. Degenerate clusters (relative gap
        below 1e-8) are re-orthonormalized by modified Gram-Schmidt so the
        returned basis is deterministic.

    Raises
    ------
    NotHermitianError
        If the input is not square/finite/Hermitian at ``tol``.
    NoConvergenceError
        If 100 sweeps do not reach the convergence target.
    """
    a = _as_square_complex(matrix)
    if not np.all(np.isfinite(a.view(float))):
        raise NotHermitianError("matrix has non-finite entries")
    defect = float(np.max(np.abs(a - a.conj().T))) if a.size else 0.0
    if defect > tol:
        raise NotHermitianError(
            f"matrix deviates from Hermiticity by {defect:.3e} (tol {tol:.3e})"
        )
    n = a.shape[0]
    a = 0.5 * (a + a.conj().T)
    v = np.eye(n, dtype=complex)
    norm0 = float(np.linalg.norm(a))
    if norm0 == 0.0:
        return SpectralDecomposition(np.zeros(n), v)
    target = tol * norm0
    converged = False
    for sweep in range(MAX_SWEEPS):
        off = _offdiag_frobenius(a)
        if off <= target:
            converged = True
            break
        # threshold strategy: early sweeps skip entries that cannot matter yet
        thresh = 0.2 * off * off / (n * n) if sweep < 4 else 0.0
        _jacobi_sweep(a, v, thresh)
    else:
        converged = _offdiag_frobenius(a) <= target
    if not converged:
        raise NoConvergenceError(
            f"Jacobi iteration did not reach off-norm {target:.3e} "
            f"within {MAX_SWEEPS} sweeps"
        )
    # one polish sweep pushes residuals from "just under target" to machine
    # level; on an already-diagonal matrix it is a no-op
    _jacobi_sweep(a, v, 0.0)

    diag = np.diagonal(a)
    if float(np.max(np.abs(diag.imag))) > 1e-12 * max(norm0, 1.0):
        raise NoConvergenceError("diagonal failed to stay real")
    w = diag.real.copy()
    order = np.argsort(w, kind="stable")
    w = w[order]
    v = v[:, order]
    _reorthonormalize_clusters(w, v)
    return SpectralDecomposition(w, v)


def _reorthonormalize_clusters(w: np.ndarray, v: np.ndarray) -> None:
    """Modified Gram-Schmidt within each near-degenerate eigenvalue cluster."""
    n = w.shape[0]
    if n == 0:
        return
    gap = DEGENERACY_GAP * max(float(np.max(np.abs(w))), 1e-300)
    start = 0
    for i in range(1, n + 1):
        if i < n and w[i] - w[i - 1] < gap:
            continue
        if i - start > 1:
            for j in range(start, i):
                col = v[:, j]
                for k in range(start, j):
                    col = col - (v[:, k].conj() @ col) * v[:, k]
                v[:, j] = col / np.linalg.norm(col)
        start = i


def operator_power(spec: SpectralDecomposition, gamma: float) -> np.ndarray:
    """Fractional power of the operator from its spectral data.

    Builds ``sum_n eigenvalue_n**gamma |v_n><v_n|``. Negative or fractional
    powers require a strictly positive spectrum; nonnegative integer powers
    work for any spectrum. ``gamma = 0`` returns the identity.
    """
    w = np.asarray(spec.eigenvalues, dtype=float)
    v = spec.eigenvectors
    if gamma == 0:
        return np.eye(v.shape[0], dtype=complex)
    is_integer = float(gamma) == int(gamma)
    if (gamma < 0 or not is_integer) and np.min(w) <= 0.0:
        raise NonPositiveSpectrumError(
            f"power {gamma} needs a strictly positive spectrum "
            f"(min eigenvalue {np.min(w):.3e})"
        )
    powered = w.astype(float) ** gamma
    return (v * powered) @ v.conj().T


def check_biorthonormal(system: BiorthonormalSystem, tol: float = DEFAULT_TOL) -> BiorthoReport:
    """Verify <left_m|right_n> = delta_mn and sum_n |right_n><left_n| = 1."""
    r = np.asarray(system.right_vectors, dtype=complex)
    l = np.asarray(system.left_vectors, dtype=complex)
    if r.shape != l.shape or r.shape[0] != r.shape[1]:
        raise DimensionMismatchError(
            f"left/right vector matrices must be square and matching, "
            f"got {l.shape} and {r.shape}"
        )
    eye = np.eye(r.shape[0])
    ortho = float(np.max(np.abs(l.conj().T @ r - eye)))
    complete = float(np.max(np.abs(r @ l.conj().T - eye)))
    return BiorthoReport(
        max_orthonormality_defect=ortho,
        max_completeness_defect=complete,
        tol=tol,
        passed=bool(ortho <= tol and complete <= tol),
    )
