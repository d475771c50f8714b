"""Singular vector pairs that satisfy ``u_2^* P'(mu) v_1 = 0``.

When ``s_*`` is a multiple singular value the SVD returns an arbitrary
orthonormal basis of the singular subspaces, and its pairs generally violate
the orthogonality condition. Writing the wanted pair as ``sum_j alpha_j``
times the basis pairs turns the condition into ``alpha^* M alpha = 0`` with the
Hermitian, indefinite ``r x r`` matrix
``M[i, j] = u_2^{(i)*} P'(mu) v_1^{(j)}``; mixing the eigenvectors of the
extreme eigenvalues with weights ``sqrt(|eta_min| / (|eta_max| + |eta_min|))``
and ``sqrt(|eta_max| / (|eta_max| + |eta_min|))`` solves it.
"""

from dataclasses import dataclass
import logging

import numpy as np

from .errors import ConsistencyError, NoAdmissibleCombinationError

log = logging.getLogger(__name__)

TOL_HERM = 1e-8
TOL_DEF = 1e-8
TOL_COMB = 1e-10
# acceptance thresholds for the two orthogonality properties
LEMMA_TOL1 = 1e-8
LEMMA_TOL2 = 1e-4


@dataclass(frozen=True)
class CombinationProblem:
    r: int
    M: np.ndarray
    eigvals: np.ndarray
    eigvecs: np.ndarray
    hermitian_residual: float
    scale: float


@dataclass(frozen=True)
class CombinedSingularPair:
    u_tilde: np.ndarray
    v_tilde: np.ndarray
    alpha: np.ndarray
    residual_prop1: float
    residual_prop2: float

    @property
    def n(self):
        return self.u_tilde.size // 2

    @property
    def U_mat(self):
        """``[u_1 u_2]`` as an ``n x 2`` matrix."""
        n = self.n
        return np.column_stack([self.u_tilde[:n], self.u_tilde[n:]])

    @property
    def V_mat(self):
        n = self.n
        return np.column_stack([self.v_tilde[:n], self.v_tilde[n:]])


def _phase_normalize(w):
    k = int(np.argmax(np.abs(w)))
    return w * (np.conj(w[k]) / abs(w[k]))


def build_M(left_basis, right_basis, Pprime_mu, tol_herm=TOL_HERM, tol_def=TOL_DEF):
    """Cross quadratic forms ``u_2^{(i)*} P'(mu) v_1^{(j)}`` of the basis pairs.

    Tolerances are relative to ``max(||M||, ||P'(mu)||_2)`` so that the
    ``1 x 1`` case with ``M ~ 0`` is judged against a meaningful scale.

    Raises
    ------
    ConsistencyError
        ``M`` is not Hermitian; the basis or ``gamma`` does not belong to a
        maximizer.
    NoAdmissibleCombinationError
        ``M`` is definite.
    """
    L = np.asarray(left_basis, dtype=complex)
    R = np.asarray(right_basis, dtype=complex)
    Pp = np.asarray(Pprime_mu, dtype=complex)
    n = Pp.shape[0]
    if L.shape != R.shape or L.shape[0] != 2 * n:
        raise ValueError("bases must both be 2n x r")
    M = L[n:, :].conj().T @ Pp @ R[:n, :]
    r = M.shape[0]
    scale = max(np.linalg.norm(M, 2), np.linalg.norm(Pp, 2))
    herm = np.linalg.norm(M - M.conj().T)
    if herm > tol_herm * max(np.linalg.norm(M), np.linalg.norm(Pp, 2)):
        raise ConsistencyError(
            f"combination matrix is not Hermitian (residual {herm:.3e}); "
            "bases or gamma do not belong to the maximizer")
    eta, W = np.linalg.eigh(0.5 * (M + M.conj().T))
    W = np.column_stack([_phase_normalize(W[:, k]) for k in range(r)])
    lim = tol_def * scale
    if eta[0] > lim or eta[-1] < -lim:
        raise NoAdmissibleCombinationError(
            f"combination matrix is definite (eigenvalues in [{eta[0]:.4g}, {eta[-1]:.4g}]); "
            "gamma is not the true maximizer")
    return CombinationProblem(r, M, eta, W, float(herm), float(scale))


def solve_combination(cp, tol_def=TOL_DEF, tol_comb=TOL_COMB):
    """Unit ``alpha`` with ``alpha^* M alpha = 0``.

    A near-null eigenvector is returned as is; otherwise the eigenvectors of
    the largest and smallest eigenvalues are mixed.
    """
    eta, W = cp.eigvals, cp.eigvecs
    lim = tol_def * cp.scale
    k0 = int(np.argmin(np.abs(eta)))
    if abs(eta[k0]) <= lim:
        return W[:, k0].copy()
    eta_min, eta_max = eta[0], eta[-1]
    if not (eta_min < 0 < eta_max):
        raise NoAdmissibleCombinationError("no sign change among the eigenvalues of M")
    tot = abs(eta_max) + abs(eta_min)
    alpha = (np.sqrt(abs(eta_min) / tot) * W[:, -1]
             + np.sqrt(abs(eta_max) / tot) * W[:, 0])
    q = np.vdot(alpha, cp.M @ alpha)
    if abs(q) > tol_comb * cp.scale:
        raise ConsistencyError(f"quadratic form not annihilated: {abs(q):.3e}")
    return alpha


def lemma_residuals(u, v, Pprime_mu):
    """``|u_2^* P'(mu) v_1|`` and ``||U^*U - V^*V||_2`` for a stacked pair."""
    Pp = np.asarray(Pprime_mu, dtype=complex)
    n = Pp.shape[0]
    r1 = abs(np.vdot(u[n:], Pp @ v[:n]))
    Um = np.column_stack([u[:n], u[n:]])
    Vm = np.column_stack([v[:n], v[n:]])
    r2 = np.linalg.norm(Um.conj().T @ Um - Vm.conj().T @ Vm, 2)
    return float(r1), float(r2)


def combine(left_basis, right_basis, alpha, Pprime_mu):
    """Combined unit pair ``(sum alpha_j u^{(j)}, sum alpha_j v^{(j)})``."""
    alpha = np.asarray(alpha, dtype=complex).ravel()
    nrm = np.linalg.norm(alpha)
    if abs(nrm - 1.0) > 1e-12:
        raise ValueError(f"alpha must be a unit vector (norm {nrm})")
    u = np.asarray(left_basis, dtype=complex) @ alpha
    v = np.asarray(right_basis, dtype=complex) @ alpha
    r1, r2 = lemma_residuals(u, v, Pprime_mu)
    return CombinedSingularPair(u, v, alpha, r1, r2)


def verify_lemma(pair, Pprime_mu):
    """Recompute both orthogonality residuals of ``pair``."""
    return lemma_residuals(pair.u_tilde, pair.v_tilde, Pprime_mu)


def lemma_ok(residual_prop1, residual_prop2, Pprime_mu,
             tol1=LEMMA_TOL1, tol2=LEMMA_TOL2):
    """Whether both residuals are below the acceptance thresholds."""
    return (residual_prop1 <= tol1 * np.linalg.norm(Pprime_mu, 2)
            and residual_prop2 <= tol2)


def select_pair(left_basis, right_basis, Pprime_mu, tol_herm=TOL_HERM,
                tol_def=TOL_DEF, tol_comb=TOL_COMB):
    """Run the whole selection; returns ``(CombinationProblem, CombinedSingularPair)``.

    For a simple singular value (``r = 1``) the pair is used directly and only
    checked; a violation is logged, not raised.
    """
    L = np.asarray(left_basis)
    if L.shape[1] == 1:
        pair = combine(left_basis, right_basis, np.ones(1), Pprime_mu)
        Pp = np.asarray(Pprime_mu)
        M = np.array([[np.vdot(pair.u_tilde[Pp.shape[0]:], Pp @ pair.v_tilde[:Pp.shape[0]])]])
        cp = CombinationProblem(1, M, np.array([M[0, 0].real]), np.ones((1, 1), dtype=complex),
                                float(abs(M[0, 0].imag) * np.sqrt(2)),
                                float(max(abs(M[0, 0]), np.linalg.norm(Pp, 2))))
        if not lemma_ok(pair.residual_prop1, pair.residual_prop2, Pp):
            log.warning("simple s_*: orthogonality residuals %.3e / %.3e exceed thresholds",
                        pair.residual_prop1, pair.residual_prop2)
        return cp, pair
    cp = build_M(left_basis, right_basis, Pprime_mu, tol_herm=tol_herm, tol_def=tol_def)
    alpha = solve_combination(cp, tol_def=tol_def, tol_comb=tol_comb)
    return cp, combine(left_basis, right_basis, alpha, Pprime_mu)
