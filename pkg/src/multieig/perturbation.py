"""Perturbation attaining the upper bound, and its verification.

With ``K = [[1, -gamma_* phi], [0, 1]]`` the core matrix is
``Delta = -s_* U K V^+`` and coefficient ``j`` of the perturbed polynomial is
``A_j + (w_j / w(|mu|)) (conj(mu)/|mu|)^j Delta``.
"""

from dataclasses import dataclass, field
import logging
import math
from typing import List, Optional

import numpy as np

from .errors import RankError
from .matpoly import MatrixPolynomial, pencil_spectrum, spectrum, is_nonsingular

log = logging.getLogger(__name__)

TOL_EIG = 5e-3


@dataclass(frozen=True)
class WeightSet:
    weights: tuple

    def __post_init__(self):
        w = tuple(float(x) for x in self.weights)
        if not w:
            raise ValueError("at least one weight is required")
        if any(x < 0 or not np.isfinite(x) for x in w):
            raise ValueError("weights must be finite and nonnegative")
        if w[0] <= 0:
            raise ValueError("w_0 must be positive")
        object.__setattr__(self, "weights", w)

    @property
    def m(self):
        return len(self.weights) - 1

    def __call__(self, t):
        """Scalar weight polynomial ``w(t) = sum w_j t^j``."""
        return sum(wj * t**j for j, wj in enumerate(self.weights))

    def deriv(self, t):
        return sum(j * wj * t ** (j - 1) for j, wj in enumerate(self.weights) if j > 0)

    def check_degree(self, P):
        if self.m != P.m:
            raise ValueError(f"{len(self.weights)} weights given for a degree-{P.m} polynomial")


def unit_direction(mu):
    """``conj(mu) / |mu|``, taken as 0 at ``mu = 0``."""
    mu = complex(mu)
    return 0j if mu == 0 else mu.conjugate() / abs(mu)


def phi(w, mu):
    """``(w'(|mu|) / w(|mu|)) * conj(mu) / |mu|``."""
    a = abs(complex(mu))
    return w.deriv(a) / w(a) * unit_direction(mu)


def _inner(gamma_star, ph):
    return np.array([[1.0, -gamma_star * ph], [0.0, 1.0]], dtype=complex)


def _pinv(V):
    rcond = max(2 * V.shape[0], 2) * np.finfo(float).eps
    # the pseudoinverse of a numerically zero matrix is useless here
    if np.linalg.norm(V, 2) == 0:
        raise RankError("V has rank 0")
    return np.linalg.pinv(V, rcond=rcond)


def build_delta(s_star, gamma_star, pair, ph):
    """Core perturbation ``-s_* U K V^+``."""
    return -s_star * pair.U_mat @ _inner(gamma_star, ph) @ _pinv(pair.V_mat)


def upper_bound(s_star, gamma_star, pair, ph, w, mu):
    """``(s_* / w(|mu|)) ||V K V^+||_2``."""
    V = pair.V_mat
    return float(s_star / w(abs(complex(mu))) * np.linalg.norm(V @ _inner(gamma_star, ph) @ _pinv(V), 2))


def coefficient_perturbations(delta, w, mu):
    """The ``Delta_j`` added to each coefficient."""
    c = unit_direction(mu)
    wm = w(abs(complex(mu)))
    out = []
    for j, wj in enumerate(w.weights):
        f = (wj / wm) * (c**j if j else 1.0)
        out.append(f * delta if wj != 0 else np.zeros_like(delta))
    return out


def assemble_Q(P, delta, w, mu):
    """Perturbed polynomial ``Q(lam) = P(lam) + sum_j Delta_j lam^j``."""
    w.check_degree(P)
    dj = coefficient_perturbations(np.asarray(delta, dtype=complex), w, mu)
    return MatrixPolynomial([A + D for A, D in zip(P.coeffs, dj)], check_leading=False)


def verify_multiple_eigenvalue(Q, mu, tol_eig=TOL_EIG):
    """Check for at least two eigenvalues of ``Q`` within ``tol_eig`` of ``mu``.

    Returns
    -------
    eigs_near_mu : ndarray
        Eigenvalues within ``tol_eig``, nearest first.
    gap : float
        Distance from ``mu`` to its second nearest eigenvalue.
    success : bool
    eigs : ndarray
        The whole finite spectrum.
    """
    mu = complex(mu)
    if is_nonsingular(Q.coeffs[-1]):
        eigs = spectrum(Q)
    else:
        eigs = pencil_spectrum(Q)
    d = np.abs(eigs - mu)
    order = np.argsort(d, kind="stable")
    near = eigs[order][d[order] <= tol_eig]
    gap = float(d[order][1]) if eigs.size >= 2 else np.inf
    return near, gap, bool(near.size >= 2), eigs


def coupled_tol_eig(residual_prop1, residual_prop2, s_star, cap=TOL_EIG):
    """Expected eigenvalue split ``10 sqrt(res2 + res1 / s_*)``, capped at ``cap``.

    A double eigenvalue perturbed by ``delta`` splits like ``sqrt(delta)``,
    so orthogonality residuals of the selected pair show up in ``Q`` at that
    scale. Empirical, used for diagnostics only.
    """
    t = 10.0 * math.sqrt(residual_prop2 + residual_prop1 / s_star) if s_star > 0 else math.inf
    return min(t, cap)


@dataclass
class PerturbationReport:
    epsilon: float
    delta_core: np.ndarray
    delta_coeffs: List[np.ndarray]
    Q: MatrixPolynomial
    eigs_near_mu: np.ndarray
    boundary_residuals: List[float]
    mult_eig_gap: float
    boundary_defect: float
    success: bool
    spectrum_Q: np.ndarray
    phi: complex
    tol_eig: float
    tol_eig_coupled: float = math.nan
    lower_bound: Optional[float] = None
    notes: List[str] = field(default_factory=list)

    def rank_delta(self, rtol=1e-10):
        s = np.linalg.svd(self.delta_core, compute_uv=False)
        return int(np.sum(s > rtol * s[0])) if s[0] > 0 else 0


def construct(P, mu, w, s_star, gamma_star, pair, tol_eig=TOL_EIG, lower_bound=None):
    """Build the perturbation for a compliant pair and verify the result."""
    w.check_degree(P)
    ph = phi(w, mu)
    delta = build_delta(s_star, gamma_star, pair, ph)
    eps = upper_bound(s_star, gamma_star, pair, ph, w, mu)
    dj = coefficient_perturbations(delta, w, mu)
    Q = MatrixPolynomial([A + D for A, D in zip(P.coeffs, dj)], check_leading=False)
    residuals = [abs(np.linalg.norm(D, 2) - eps * wj) for D, wj in zip(dj, w.weights)]
    # max_j |‖Delta_j‖_2 / w_j - eps| over positive weights
    defect = max((abs(np.linalg.norm(D, 2) / wj - eps)
                  for D, wj in zip(dj, w.weights) if wj > 0), default=0.0)
    near, gap, ok, eigs = verify_multiple_eigenvalue(Q, mu, tol_eig)
    tc = coupled_tol_eig(pair.residual_prop1, pair.residual_prop2, s_star)
    log.info("eigenvalue gap %.3e, coupled tolerance %.3e%s", gap, tc,
             "" if gap <= tc else " (exceeded)")
    return PerturbationReport(eps, delta, dj, Q, near, residuals, gap, float(defect), ok,
                              eigs, ph, tol_eig, tc, lower_bound)
