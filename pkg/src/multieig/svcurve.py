"""The singular value curve ``gamma -> s_{2n-1}(F[P(mu); gamma])`` and its maximizer.

``F[P(mu); gamma]`` is the ``2n x 2n`` block lower triangular matrix

    [[ P(mu),              0     ],
     [ gamma * P'(mu),     P(mu) ]]

Singular values are indexed from 1 in the docstrings (``s_1 >= s_2 >= ...``)
and from 0 in code.
"""

from dataclasses import dataclass, field
import logging
import math

import numpy as np

from .errors import AlreadyMultipleError, DerivativeSingularError, PreconditionError
from .matpoly import TOL_SING, derivative, evaluate

log = logging.getLogger(__name__)

TOL_MULT = 1e-6
TOL_ZERO = 1e-10
GRID_SIZE = 200
DECREASE_RUN = 20
MAX_DOUBLINGS = 40
INVPHI = (math.sqrt(5.0) - 1.0) / 2.0


@dataclass(frozen=True)
class GammaStarResult:
    """Maximizer of ``s_{2n-1}`` and the singular subspaces at the maximum.

    ``left_basis[:, 0]`` / ``right_basis[:, 0]`` is the pair belonging to
    ``s_{2n-1}`` itself; further columns follow the other clustered values.
    """

    gamma_star: float
    s_star: float
    multiplicity_r: int
    left_basis: np.ndarray
    right_basis: np.ndarray
    is_case2: bool
    singular_values: np.ndarray
    at_search_boundary: bool = False
    gamma_max: float = math.nan
    evaluations: int = 0
    cluster_indices: tuple = field(default=())


def _block(P_mu, Pp_mu, gamma):
    n = P_mu.shape[0]
    F = np.zeros((2 * n, 2 * n), dtype=complex)
    F[:n, :n] = P_mu
    F[n:, n:] = P_mu
    F[n:, :n] = gamma * Pp_mu
    return F


def build_F(P, mu, gamma):
    """Return ``F[P(mu); gamma]``."""
    return _block(evaluate(P, mu), evaluate(derivative(P), mu), float(gamma))


def singular_values_at(P, mu, gamma):
    """All ``2n`` singular values of ``F[P(mu); gamma]``, nonincreasing."""
    return np.linalg.svd(build_F(P, mu, gamma), compute_uv=False)


def curve_samples(P, mu, gammas):
    """Rows ``(gamma, s_{2n-1}, s_{2n-2})`` for each ``gamma`` in the grid."""
    gammas = np.asarray(gammas, dtype=float).ravel()
    if gammas.size == 0:
        raise ValueError("gamma grid is empty")
    if np.any(gammas < 0):
        raise ValueError("gamma grid must be nonnegative")
    if P.n < 2:
        raise PreconditionError("s_{2n-2} needs n >= 2")
    P_mu = evaluate(P, mu)
    Pp_mu = evaluate(derivative(P), mu)
    n = P.n
    out = np.empty((gammas.size, 3))
    for k, g in enumerate(gammas):
        s = np.linalg.svd(_block(P_mu, Pp_mu, g), compute_uv=False)
        out[k] = (g, s[2 * n - 2], s[2 * n - 3])
    return out


def _phase_normalize_pair(u, v):
    """Rotate ``u`` and ``v`` by a common phase so that ``u``'s largest entry is real positive."""
    k = int(np.argmax(np.abs(u)))
    ph = np.conj(u[k]) / abs(u[k])
    return u * ph, v * ph


class _Objective:
    """Cached evaluation of ``s_{2n-1}`` for fixed ``P(mu)`` and ``P'(mu)``."""

    def __init__(self, P_mu, Pp_mu):
        self.P_mu = P_mu
        self.Pp_mu = Pp_mu
        self.n = P_mu.shape[0]
        self.calls = 0

    def __call__(self, gamma):
        self.calls += 1
        s = np.linalg.svd(_block(self.P_mu, self.Pp_mu, gamma), compute_uv=False)
        return s[2 * self.n - 2]

    def slope(self, gamma):
        # d s_{2n-1} / d gamma = Re(u_2^* P'(mu) v_1) where the singular value is simple
        self.calls += 1
        U, _, Vh = np.linalg.svd(_block(self.P_mu, self.Pp_mu, gamma))
        k = 2 * self.n - 2
        u2 = U[self.n:, k]
        v1 = Vh[k, : self.n].conj()
        return float(np.real(np.vdot(u2, self.Pp_mu @ v1)))


def golden_section_max(f, a, b, xtol, max_iter=400):
    """Maximize a unimodal ``f`` on ``[a, b]``; returns ``(x, f(x), a, b)``.

    Works without derivatives, so kinks at the maximum are fine.
    """
    c = b - INVPHI * (b - a)
    d = a + INVPHI * (b - a)
    fc, fd = f(c), f(d)
    for _ in range(max_iter):
        if b - a <= xtol:
            break
        if fc >= fd:
            b, d, fd = d, c, fc
            c = b - INVPHI * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + INVPHI * (b - a)
            fd = f(d)
    if fc >= fd:
        return c, fc, a, b
    return d, fd, a, b


def _polish_smooth_max(obj, a, b, max_iter=200):
    """Bisect on the analytic slope when the maximum is a smooth critical point.

    Golden section alone only locates a smooth maximum to about the square root
    of machine precision; the slope changes sign there and bisection on it
    reaches full precision. Returns ``None`` when the slope does not bracket.
    """
    sa, sb = obj.slope(a), obj.slope(b)
    if not (sa > 0 > sb):
        return None
    for _ in range(max_iter):
        mid = 0.5 * (a + b)
        if mid <= a or mid >= b:
            break
        sm = obj.slope(mid)
        if sm > 0:
            a = mid
        elif sm < 0:
            b = mid
        else:
            return mid
    return 0.5 * (a + b)


def _scan(obj, gamma_max, grid_size):
    grid = np.linspace(0.0, gamma_max, grid_size)
    vals = np.array([obj(g) for g in grid])
    return grid, vals


def _tail_decreasing(vals, run):
    if len(vals) <= run:
        return False
    tail = vals[-(run + 1):]
    return bool(np.all(np.diff(tail) < 0))


def _local_max_indices(vals):
    idx = []
    N = len(vals)
    for i in range(N):
        left = vals[i - 1] if i > 0 else -np.inf
        right = vals[i + 1] if i < N - 1 else -np.inf
        if vals[i] >= left and vals[i] >= right:
            idx.append(i)
    return idx


def maximize_s2nm1(P, mu, tol_mult=TOL_MULT, tol_zero=TOL_ZERO, tol_sing=TOL_SING,
                   grid_size=GRID_SIZE, gamma_max=None, expand=True):
    """Locate ``gamma_* = argmax_{gamma >= 0} s_{2n-1}(F[P(mu); gamma])``.

    A uniform grid on ``[0, gamma_max]`` brackets every local maximum; the grid
    is doubled until ``s_{2n-1}`` decreases over the trailing samples. Each
    bracket is refined by golden section and the best refined point wins.

    Parameters
    ----------
    P : MatrixPolynomial
    mu : complex
    tol_mult : float
        Singular values within ``tol_mult * max(1, s_*)`` of ``s_*`` count
        towards its multiplicity.
    tol_zero : float
        ``s_* <= tol_zero * max_j ||A_j||_2`` means ``mu`` already is a
        multiple eigenvalue.
    gamma_max : float, optional
        Initial right end of the scan. Defaults to
        ``10 ||P(mu)||_2 / sigma_min(P'(mu))``.
    expand : bool
        Double ``gamma_max`` until the tail of the curve is decreasing.

    Returns
    -------
    GammaStarResult
    """
    n = P.n
    if n < 2:
        raise PreconditionError("s_{2n-1} has no finite maximum for n = 1")
    if P.m < 1:
        raise PreconditionError("constant polynomials have no derivative term")
    mu = complex(mu)
    P_mu = evaluate(P, mu)
    Pp_mu = evaluate(derivative(P), mu)
    sp = np.linalg.svd(Pp_mu, compute_uv=False)
    if sp[0] == 0 or sp[-1] <= tol_sing * sp[0]:
        raise DerivativeSingularError(f"derivative singular at mu = {mu}")

    obj = _Objective(P_mu, Pp_mu)
    if gamma_max is None:
        gamma_max = 10.0 * np.linalg.norm(P_mu, 2) / sp[-1]
    if not gamma_max > 0:
        # P(mu) = 0: any positive scale will do, s_{2n-1} vanishes anyway
        gamma_max = 1.0
    grid, vals = _scan(obj, gamma_max, grid_size)
    doublings = 0
    while expand and not _tail_decreasing(vals, DECREASE_RUN) and doublings < MAX_DOUBLINGS:
        gamma_max *= 2.0
        doublings += 1
        grid, vals = _scan(obj, gamma_max, grid_size)
    at_boundary = not _tail_decreasing(vals, DECREASE_RUN)

    h = grid[1] - grid[0]
    xtol = 1e-13 * max(1.0, gamma_max)
    best_g, best_s = 0.0, vals[0]
    for i in _local_max_indices(vals):
        a = grid[max(i - 1, 0)]
        b = grid[min(i + 1, len(grid) - 1)]
        g, s, lo, hi = golden_section_max(obj, a, b, xtol)
        if vals[i] > s:
            g, s = grid[i], vals[i]
        if s > best_s or (s == best_s and g < best_g):
            best_g, best_s = g, s
    if best_g > 0:
        # s_{2n-1} is double at gamma = 0, so keep the bracket off the origin
        lo = best_g - h if best_g > h else 0.5 * best_g
        hi = min(best_g + h, grid[-1])
        g_pol = _polish_smooth_max(obj, lo, hi)
        if g_pol is not None:
            s_pol = obj(g_pol)
            # values agree to rounding at a smooth maximum; the slope root is the sharper estimate
            if s_pol >= best_s - 16 * np.finfo(float).eps * max(1.0, best_s):
                best_g, best_s = g_pol, s_pol
    s0 = obj(0.0)
    if s0 >= best_s:
        best_g, best_s = 0.0, s0
    if best_g == grid[-1]:
        at_boundary = True

    if best_s <= tol_zero * P.max_coeff_norm():
        raise AlreadyMultipleError(
            f"mu = {mu} is already (near) a multiple eigenvalue (s_* = {best_s:.3e}); distance bound 0")
    if at_boundary:
        log.warning("maximizer found at the expanding search boundary (gamma = %g)", best_g)

    return _extract(P_mu, Pp_mu, best_g, tol_mult, at_boundary, gamma_max, obj.calls)


def _extract(P_mu, Pp_mu, gamma, tol_mult, at_boundary=False, gamma_max=math.nan, calls=0):
    n = P_mu.shape[0]
    U, s, Vh = np.linalg.svd(_block(P_mu, Pp_mu, gamma))
    V = Vh.conj().T
    k0 = 2 * n - 2
    s_star = float(s[k0])
    thresh = tol_mult * max(1.0, s_star)
    cluster = [k for k in range(2 * n) if abs(s[k] - s_star) <= thresh]
    order = [k0] + sorted((k for k in cluster if k != k0), reverse=True)
    left = np.empty((2 * n, len(order)), dtype=complex)
    right = np.empty((2 * n, len(order)), dtype=complex)
    for c, k in enumerate(order):
        left[:, c], right[:, c] = _phase_normalize_pair(U[:, k], V[:, k])
    return GammaStarResult(
        gamma_star=float(gamma),
        s_star=s_star,
        multiplicity_r=len(order),
        left_basis=left,
        right_basis=right,
        is_case2=gamma == 0.0,
        singular_values=s,
        at_search_boundary=at_boundary,
        gamma_max=float(gamma_max),
        evaluations=calls,
        cluster_indices=tuple(order),
    )


def gamma_star_result_at(P, mu, gamma, tol_mult=TOL_MULT):
    """Singular subspace data of ``F[P(mu); gamma]`` at a given ``gamma``."""
    return _extract(evaluate(P, mu), evaluate(derivative(P), mu), float(gamma), tol_mult)
