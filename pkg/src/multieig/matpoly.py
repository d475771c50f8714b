"""Matrix polynomials ``P(lam) = A_0 + A_1 lam + ... + A_m lam^m``.

Coefficients are stored in ascending order and always as complex arrays.
"""

from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np
import scipy.linalg

from .errors import (
    DegenerateCombinationError,
    DegenerateDegreeError,
    SingularLeadingCoefficientError,
)

TOL_SING = 1e-10
TOL_WEAK = 1e-10
TOL_UNITARY = 1e-10


def is_nonsingular(A, tol=TOL_SING):
    s = np.linalg.svd(A, compute_uv=False)
    return s[0] > 0 and s[-1] > tol * s[0]


class MatrixPolynomial:
    """Square matrix polynomial with ascending coefficients ``A_0, ..., A_m``.

    Parameters
    ----------
    coeffs : sequence of (n, n) array_like
        Coefficients from the constant term upwards.
    check_leading : bool
        Enforce a nonsingular leading coefficient. Derivatives and
        intermediate objects are built with ``check_leading=False``.
    tol_sing : float
        Relative threshold on the smallest singular value of ``A_m``.
    """

    def __init__(self, coeffs, check_leading=True, tol_sing=TOL_SING):
        arrs = [np.array(A, dtype=complex) for A in coeffs]
        if not arrs:
            raise ValueError("a matrix polynomial needs at least one coefficient")
        n = arrs[0].shape[0] if arrs[0].ndim == 2 else -1
        for j, A in enumerate(arrs):
            if A.ndim != 2 or A.shape != (n, n):
                raise ValueError(
                    f"coefficient A_{j} has shape {A.shape}, expected ({n}, {n})")
        if n < 1:
            raise ValueError("matrix size must be positive")
        if check_leading and not is_nonsingular(arrs[-1], tol_sing):
            raise SingularLeadingCoefficientError(
                f"leading coefficient A_{len(arrs) - 1} is numerically singular")
        for A in arrs:
            A.setflags(write=False)
        self._coeffs = tuple(arrs)
        self.leading_checked = check_leading

    @property
    def coeffs(self):
        return self._coeffs

    @property
    def n(self):
        return self._coeffs[0].shape[0]

    @property
    def m(self):
        return len(self._coeffs) - 1

    def __call__(self, lam):
        return evaluate(self, lam)

    def __repr__(self):
        return f"MatrixPolynomial(n={self.n}, m={self.m})"

    def conjugate_by(self, U):
        """Return the polynomial with coefficients ``U* A_j U``."""
        U = np.asarray(U, dtype=complex)
        return MatrixPolynomial([U.conj().T @ A @ U for A in self._coeffs],
                                check_leading=self.leading_checked)

    def scaled(self, c):
        return MatrixPolynomial([c * A for A in self._coeffs],
                                check_leading=self.leading_checked)

    def max_coeff_norm(self):
        """Largest spectral norm over the coefficients."""
        return max(np.linalg.norm(A, 2) for A in self._coeffs)


def evaluate(P, lam):
    """Evaluate ``P(lam)`` with the Horner recurrence."""
    lam = complex(lam)
    out = P.coeffs[-1].copy()
    for A in reversed(P.coeffs[:-1]):
        out = out * lam + A
    return out


def derivative(P):
    """Coefficients ``j A_j`` shifted down one degree.

    The result is not required to have a nonsingular leading coefficient.
    """
    if P.m < 1:
        raise DegenerateDegreeError("derivative of a constant polynomial is not defined here (m = 0)")
    return MatrixPolynomial([j * A for j, A in enumerate(P.coeffs) if j > 0],
                            check_leading=False)


def companion(P):
    """Block companion matrix of the monic form ``A_m^{-1} P(lam)``.

    Eigenvalues of the returned ``mn x mn`` matrix are the roots of
    ``det P(lam)``.
    """
    n, m = P.n, P.m
    if m < 1:
        raise DegenerateDegreeError("a constant polynomial has no finite spectrum")
    Am = P.coeffs[-1]
    if not is_nonsingular(Am):
        raise SingularLeadingCoefficientError("leading coefficient is numerically singular")
    lower = -np.linalg.solve(Am, np.hstack(P.coeffs[:-1]))
    C = np.zeros((m * n, m * n), dtype=complex)
    C[: (m - 1) * n, n:] = np.eye((m - 1) * n)
    C[(m - 1) * n:, :] = lower
    return C


def spectrum(P):
    """All ``m*n`` finite eigenvalues of ``P`` (with multiplicity)."""
    return np.linalg.eigvals(companion(P))


def pencil_spectrum(P):
    """Finite eigenvalues via the generalized companion pencil.

    Unlike :func:`spectrum` this tolerates a singular leading coefficient;
    infinite eigenvalues are dropped.
    """
    n, m = P.n, P.m
    N = m * n
    C = np.zeros((N, N), dtype=complex)
    D = np.eye(N, dtype=complex)
    C[: (m - 1) * n, n:] = np.eye((m - 1) * n)
    C[(m - 1) * n:, :] = -np.hstack(P.coeffs[:-1])
    D[(m - 1) * n:, (m - 1) * n:] = P.coeffs[-1]
    ev = scipy.linalg.eigvals(C, D)
    return ev[np.isfinite(ev)]


@dataclass(frozen=True)
class WeakNormalityWitness:
    is_weakly_normal: bool
    diagonalizer: Optional[np.ndarray]
    residual: float
    normality_defect: float
    commutator_defect: float


def _offdiag_norm(A):
    return np.linalg.norm(A - np.diag(np.diag(A)))


def _normality_defects(coeffs):
    norms = [np.linalg.norm(A) for A in coeffs]
    normal = 0.0
    for A, a in zip(coeffs, norms):
        if a > 0:
            normal = max(normal, np.linalg.norm(A @ A.conj().T - A.conj().T @ A) / a**2)
    comm = 0.0
    for i in range(len(coeffs)):
        for j in range(i + 1, len(coeffs)):
            scale = norms[i] * norms[j]
            if scale > 0:
                c = np.linalg.norm(coeffs[i] @ coeffs[j] - coeffs[j] @ coeffs[i])
                comm = max(comm, c / scale)
    return normal, comm


def diagonalization_residual(P, U):
    """Largest Frobenius norm of the off-diagonal part of ``U* A_j U``."""
    return max(_offdiag_norm(A) for A in P.conjugate_by(U).coeffs)


def simultaneous_diagonalizer(P, tol_weak=TOL_WEAK, retries=5, seed=0):
    """Common unitary diagonalizer of normal, mutually commuting coefficients.

    A random real combination ``sum c_j A_j`` is reduced to Schur form; for a
    normal matrix the Schur factor is a unitary eigenbasis. The basis is
    accepted when every ``U* A_j U`` is diagonal to ``tol_weak`` relative to
    the coefficient scale, otherwise a fresh combination is drawn.
    """
    rng = np.random.default_rng(seed)
    coeffs = P.coeffs
    scale = max(max(np.linalg.norm(A) for A in coeffs), np.finfo(float).tiny)
    best = np.inf
    for _ in range(retries + 1):
        c = rng.standard_normal(len(coeffs))
        C = sum(cj * A for cj, A in zip(c, coeffs))
        _, Z = scipy.linalg.schur(C, output="complex")
        res = diagonalization_residual(P, Z)
        best = min(best, res)
        if res <= tol_weak * scale:
            return Z
    raise DegenerateCombinationError(
        f"no diagonalizing combination found after {retries} retries "
        f"(best off-diagonal residual {best:.3e}); consider raising tol_weak")


def is_weakly_normal(P, tol_weak=TOL_WEAK, seed=0):
    """Test whether all coefficients are normal and mutually commuting.

    Returns
    -------
    WeakNormalityWitness
        On success carries the common diagonalizer ``U`` and the residual of
        ``U* A_j U`` off the diagonal.
    """
    normal, comm = _normality_defects(P.coeffs)
    if normal > tol_weak or comm > tol_weak:
        return WeakNormalityWitness(False, None, np.nan, normal, comm)
    try:
        U = simultaneous_diagonalizer(P, tol_weak=tol_weak, seed=seed)
    except DegenerateCombinationError:
        return WeakNormalityWitness(False, None, np.nan, normal, comm)
    if np.linalg.norm(U.conj().T @ U - np.eye(P.n)) > TOL_UNITARY:
        return WeakNormalityWitness(False, None, np.nan, normal, comm)
    return WeakNormalityWitness(True, U, diagonalization_residual(P, U), normal, comm)


def from_diagonals(diagonals: Sequence[Sequence[complex]], U=None):
    """Build ``U diag(d_j) U*`` coefficients, a weakly normal polynomial."""
    mats = [np.diag(np.asarray(d, dtype=complex)) for d in diagonals]
    if U is not None:
        U = np.asarray(U, dtype=complex)
        mats = [U @ D @ U.conj().T for D in mats]
    return MatrixPolynomial(mats)
