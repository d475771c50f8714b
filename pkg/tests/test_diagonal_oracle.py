import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy.stats import unitary_group

from multieig.diagonal_oracle import (
    BlockData,
    all_singular_values,
    block_data,
    block_singular_values,
    oracle_gamma_star,
)
from multieig.errors import DerivativeSingularError
from multieig.matpoly import from_diagonals, is_weakly_normal
from multieig.svcurve import maximize_s2nm1, singular_values_at

from conftest import REF_MU, random_weakly_normal

REF_BD = BlockData([30, 20, 6], [-11, -9, -5])

finite = dict(allow_nan=False, allow_infinity=False)
cplx = st.complex_numbers(max_magnitude=1e3, **finite)
nonzero = cplx.filter(lambda z: abs(z) > 1e-3)
gammas = st.floats(min_value=0.0, max_value=1e3, **finite)


def direct_block(zeta, xi, gamma):
    return np.linalg.svd(np.array([[zeta, 0], [gamma * xi, zeta]]), compute_uv=False)


def test_block_gamma_zero():
    assert block_singular_values(6, -5, 0.0) == (6.0, 6.0)
    assert block_singular_values(3 + 4j, 1j, 0.0) == (5.0, 5.0)


def test_block_reference_crossing_value():
    # n-th block at the printed maximizer, first singular value
    s1, _ = block_singular_values(6, -5, 2.0180)
    assert s1 == pytest.approx(12.8841, abs=2e-3)
    _, s2 = block_singular_values(20, -9, 2.0180)
    assert s2 == pytest.approx(12.8841, abs=2e-3)


@settings(max_examples=300, deadline=None)
@given(zeta=cplx, xi=nonzero, gamma=gammas)
def test_block_matches_direct_svd(zeta, xi, gamma):
    s1, s2 = block_singular_values(zeta, xi, gamma)
    d = direct_block(zeta, xi, gamma)
    scale = max(1.0, d[0])
    assert abs(s1 - d[0]) <= 1e-12 * scale
    assert abs(s2 - d[1]) <= 1e-12 * scale


@settings(max_examples=300, deadline=None)
@given(zeta=cplx, xi=nonzero, gamma=gammas)
def test_block_determinant_and_bounds(zeta, xi, gamma):
    s1, s2 = block_singular_values(zeta, xi, gamma)
    z = abs(zeta)
    assert abs(s1 * s2 - z * z) <= 1e-10 * max(1.0, z * z)
    assert s2 <= z * (1 + 1e-14) + 1e-300
    assert s1 >= z * (1 - 1e-14)
    assert s1 >= s2


@settings(max_examples=100, deadline=None)
@given(zeta=nonzero, xi=nonzero, g1=gammas, g2=gammas)
def test_block_monotone(zeta, xi, g1, g2):
    lo, hi = sorted((g1, g2))
    a1, a2 = block_singular_values(zeta, xi, lo)
    b1, b2 = block_singular_values(zeta, xi, hi)
    assert b1 >= a1 * (1 - 1e-14)
    assert b2 <= a2 * (1 + 1e-14)


def test_block_large_gamma_no_cancellation():
    # s2 ~ |zeta|^2 / (gamma |xi|) for large gamma
    s1, s2 = block_singular_values(1.0, 1.0, 1e9)
    assert s2 == pytest.approx(1e-9, rel=1e-12)


def test_oracle_reference():
    g, s, kappa, case2 = oracle_gamma_star(REF_BD)
    assert g == pytest.approx(2.0180, abs=1e-3)
    assert s == pytest.approx(12.8841, abs=1e-3)
    assert kappa == 2
    assert not case2


def test_oracle_tied_smallest_moduli():
    g, s, kappa, case2 = oracle_gamma_star(BlockData([5, 3, 3], [1, 1, 1]))
    assert case2 and g == 0.0 and s == 3.0 and kappa == 2


def test_oracle_two_by_two():
    # one crossing only: s_{2,1} meets s_{1,2}
    g, s, kappa, case2 = oracle_gamma_star(BlockData([4.0, 1.0], [1.0, 2.0]))
    assert kappa == 1 and not case2
    assert s == pytest.approx(block_singular_values(4.0, 1.0, g)[1], rel=1e-12)
    assert s == pytest.approx(block_singular_values(1.0, 2.0, g)[0], rel=1e-12)


def test_oracle_s_star_range(rng):
    for _ in range(100):
        n = int(rng.integers(2, 7))
        z = rng.standard_normal(n) + 1j * rng.standard_normal(n)
        x = rng.standard_normal(n) + 1j * rng.standard_normal(n)
        bd = BlockData.from_values(z, x)
        g, s, kappa, case2 = oracle_gamma_star(bd)
        assert not case2 and g > 0
        assert abs(bd.zetas[-1]) < s < abs(bd.zetas[-2])
        assert 1 <= kappa <= n - 1
        # the maximizer value is the (2n-1)-th of the union
        assert s == pytest.approx(all_singular_values(bd, g)[2 * n - 2], rel=1e-9)


def test_union_equals_full_svd(rng):
    for _ in range(30):
        n = int(rng.integers(2, 7))
        P, Q = random_weakly_normal(rng, n, int(rng.integers(1, 4)))
        mu = complex(*rng.standard_normal(2))
        bd = block_data(P, mu, Q)
        g = rng.uniform(0, 5)
        a = all_singular_values(bd, g)
        b = singular_values_at(P, mu, g)
        np.testing.assert_allclose(a, b, atol=1e-10 * b[0])


def test_block_data_reference(ref_P):
    bd = block_data(ref_P, REF_MU, np.eye(3))
    np.testing.assert_array_equal(bd.zetas, [30, 20, 6])
    np.testing.assert_array_equal(bd.xis, [-11, -9, -5])


def test_block_data_sorts_by_modulus():
    P = from_diagonals([[1.0, 5.0, 2.0], [1.0, 1.0, 1.0]])
    bd = block_data(P, 0.0, np.eye(3))
    np.testing.assert_array_equal(np.abs(bd.zetas), [5, 2, 1])


def test_block_data_is_unitary_invariant(ref_P, rng):
    W = unitary_group.rvs(3, random_state=rng)
    Pw = ref_P.conjugate_by(W)
    U = is_weakly_normal(Pw).diagonalizer
    bd = block_data(Pw, REF_MU, U)
    np.testing.assert_allclose(np.abs(bd.zetas), [30, 20, 6], atol=1e-12)
    np.testing.assert_allclose(np.abs(bd.xis), [11, 9, 5], atol=1e-12)


def test_block_data_rejects_zero_xi():
    P = from_diagonals([[1.0, 2.0], [0.0, 1.0], [1.0, 1.0]])
    # P'(l) = diag(2l, 2l + 1) vanishes at 0 in the first entry
    with pytest.raises(DerivativeSingularError):
        block_data(P, 0.0, np.eye(2))


def test_blockdata_validation():
    with pytest.raises(ValueError):
        BlockData([1, 2], [1, 1])
    with pytest.raises(DerivativeSingularError):
        BlockData([2, 1], [1, 0])


def test_oracle_agrees_with_svcurve(rng):
    for _ in range(20):
        n = int(rng.integers(2, 7))
        P, Q = random_weakly_normal(rng, n, int(rng.integers(1, 4)))
        mu = complex(*rng.standard_normal(2))
        g, s, _, _ = oracle_gamma_star(block_data(P, mu, Q))
        r = maximize_s2nm1(P, mu)
        assert abs(r.gamma_star - g) <= 1e-6 * max(1.0, g)
        assert abs(r.s_star - s) <= 1e-6 * max(1.0, s)
        assert math.isclose(r.s_star, s, rel_tol=1e-10)
