"""Closed-form singular value curves for weakly normal polynomials.

When a single unitary ``U`` diagonalizes every coefficient,
``F[P(mu); gamma]`` is unitarily similar to a direct sum of ``2 x 2`` blocks
``[[zeta_i, 0], [gamma * xi_i, zeta_i]]`` with ``zeta_i = (U* P(mu) U)_ii``
and ``xi_i = (U* P'(mu) U)_ii``. Each block has the explicit singular values
``s_{i,1}(gamma) >= s_{i,2}(gamma)`` computed below, so the maximizer of
``s_{2n-1}`` reduces to a one-dimensional root find. This module is kept
independent of :mod:`multieig.svcurve` and serves as its oracle.
"""

from dataclasses import dataclass
import math

import numpy as np

from .errors import DerivativeSingularError
from .matpoly import TOL_SING, derivative, evaluate

TOL_EQ = 1e-10
GAMMA_TOL = 1e-12


@dataclass(frozen=True)
class BlockData:
    """Diagonal entries of ``U* P(mu) U`` and ``U* P'(mu) U``, sorted by ``|zeta|`` descending."""

    zetas: np.ndarray
    xis: np.ndarray

    def __post_init__(self):
        z = np.asarray(self.zetas, dtype=complex)
        x = np.asarray(self.xis, dtype=complex)
        if z.shape != x.shape or z.ndim != 1 or z.size == 0:
            raise ValueError("zetas and xis must be nonempty vectors of equal length")
        if np.any(np.diff(np.abs(z)) > 0):
            raise ValueError("|zeta_i| must be nonincreasing")
        if np.any(np.abs(x) == 0):
            raise DerivativeSingularError("derivative singular at mu (some xi_i = 0)")
        object.__setattr__(self, "zetas", z)
        object.__setattr__(self, "xis", x)

    @property
    def n(self):
        return self.zetas.size

    @classmethod
    def from_values(cls, zetas, xis):
        """Sort raw pairs into canonical order (stable, by ``|zeta|`` descending)."""
        z = np.asarray(zetas, dtype=complex)
        x = np.asarray(xis, dtype=complex)
        order = np.argsort(-np.abs(z), kind="stable")
        return cls(z[order], x[order])


def block_singular_values(zeta, xi, gamma):
    """Singular values ``(s1, s2)`` of ``[[zeta, 0], [gamma*xi, zeta]]``.

    ``s1^2 = a + b`` and ``s2^2 = a - b`` with
    ``a = |zeta|^2 + gamma^2 |xi|^2 / 2`` and
    ``b = gamma |xi| sqrt(|zeta|^2 + gamma^2 |xi|^2 / 4)``.
    When ``a - b`` cancels badly ``s2`` is evaluated as ``|zeta|^2 / s1``.
    """
    z = abs(zeta)
    gx = gamma * abs(xi)
    # scale to unit size so the squares neither overflow nor underflow
    c = max(z, gx)
    if c == 0:
        return 0.0, 0.0
    z, gx = z / c, gx / c
    z2 = z * z
    a = z2 + 0.5 * gx * gx
    b = gx * math.sqrt(z2 + 0.25 * gx * gx)
    s1 = math.sqrt(a + b)
    if b <= 0.5 * a:
        s2 = math.sqrt(max(a - b, 0.0))
    else:
        s2 = z2 / s1
    return c * s1, c * s2


def block_data(P, mu, U, tol_sing=TOL_SING):
    """Diagonal data of ``U* P(mu) U`` and ``U* P'(mu) U`` in canonical order."""
    U = np.asarray(U, dtype=complex)
    D = U.conj().T @ evaluate(P, mu) @ U
    Dp = U.conj().T @ evaluate(derivative(P), mu) @ U
    zetas, xis = np.diag(D), np.diag(Dp)
    ax = np.abs(xis)
    if ax.max() == 0 or ax.min() <= tol_sing * ax.max():
        raise DerivativeSingularError(f"derivative singular at mu = {complex(mu)}")
    return BlockData.from_values(zetas, xis)


def all_singular_values(bd, gamma):
    """Union of the block singular values, sorted nonincreasing."""
    vals = []
    for z, x in zip(bd.zetas, bd.xis):
        vals.extend(block_singular_values(z, x, gamma))
    return np.sort(np.array(vals))[::-1]


def _crossing(zeta_n, xi_n, zeta_k, xi_k, tol=GAMMA_TOL):
    """Positive root of ``s_{n,1}(gamma) = s_{k,2}(gamma)`` by bisection."""

    def diff(g):
        return block_singular_values(zeta_n, xi_n, g)[0] - block_singular_values(zeta_k, xi_k, g)[1]

    lo, hi = 0.0, 1.0
    while diff(hi) <= 0:
        lo, hi = hi, 2.0 * hi
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if mid <= lo or mid >= hi:
            break
        if diff(mid) > 0:
            hi = mid
        else:
            lo = mid
    return 0.5 * (lo + hi)


def oracle_gamma_star(bd, tol_eq=TOL_EQ):
    """Maximizer of ``s_{2n-1}`` from the block formulas.

    Returns
    -------
    gamma_star : float
    s_star : float
    kappa : int
        1-based index of the decreasing curve ``s_{kappa,2}`` met first by
        ``s_{n,1}``; ``n - 1`` in the tied case.
    is_case2 : bool
        ``|zeta_n| == |zeta_{n-1}|`` within ``tol_eq``; then ``gamma_* = 0``.
    """
    n = bd.n
    if n < 2:
        raise ValueError("the block reduction needs n >= 2")
    zn, xn = bd.zetas[-1], bd.xis[-1]
    a_n, a_nm1 = abs(zn), abs(bd.zetas[-2])
    if abs(a_n - a_nm1) <= tol_eq * max(1.0, a_nm1):
        return 0.0, float(a_n), n - 1, True
    best = None
    for k in range(n - 1):
        g = _crossing(zn, xn, bd.zetas[k], bd.xis[k])
        # ties go to the smaller kappa
        if best is None or g < best[0]:
            best = (g, k)
    g, k = best
    s = block_singular_values(zn, xn, g)[0]
    return float(g), float(s), k + 1, False
