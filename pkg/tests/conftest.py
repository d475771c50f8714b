import numpy as np
import pytest
from scipy.stats import unitary_group

from multieig import MatrixPolynomial, WeightSet
from multieig.matpoly import from_diagonals
from multieig.problem import ProblemSpec

# diag(l^2 - 3l + 2, l^2 - l, l^2 + 3l + 2)
REF_COEFFS = [np.diag([2.0, 0.0, 2.0]), np.diag([-3.0, -1.0, 3.0]), np.eye(3)]
REF_MU = -4.0


def reference_polynomial():
    return MatrixPolynomial(REF_COEFFS)


def reference_spec(**kw):
    return ProblemSpec(reference_polynomial(), REF_MU, WeightSet([1, 1, 1]), **kw)


def crandn(rng, *shape):
    return rng.standard_normal(shape) + 1j * rng.standard_normal(shape)


def random_weakly_normal(rng, n, m):
    """``Q diag(d_j) Q*`` coefficients with a Haar random unitary ``Q``."""
    Q = unitary_group.rvs(n, random_state=rng)
    return from_diagonals([crandn(rng, n) for _ in range(m + 1)], Q), Q


def random_dense(rng, n, m):
    return MatrixPolynomial([crandn(rng, n, n) for _ in range(m + 1)])


def weakly_normal_cases(count, seed=2024):
    """(P, mu, w) triples with n in 2..6 and m in 1..3."""
    rng = np.random.default_rng(seed)
    out = []
    for k in range(count):
        n = 2 + k % 5
        m = 1 + k % 3
        P, _ = random_weakly_normal(rng, n, m)
        mu = complex(*rng.standard_normal(2))
        w = WeightSet(rng.uniform(0.5, 2.0, m + 1))
        out.append((P, mu, w))
    return out


def dense_cases(count, seed=77):
    rng = np.random.default_rng(seed)
    out = []
    for k in range(count):
        n = 2 + k % 5
        m = 1 + k % 3
        out.append((random_dense(rng, n, m), complex(*rng.standard_normal(2)),
                    WeightSet(rng.uniform(0.5, 2.0, m + 1))))
    return out


@pytest.fixture
def ref_P():
    return reference_polynomial()


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def pytest_configure(config):
    config.acceptance_lines = []


def pytest_terminal_summary(terminalreporter, config):
    lines = getattr(config, "acceptance_lines", [])
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in sorted(lines, key=lambda s: int(s.split()[1].rstrip(":"))):
            terminalreporter.write_line(line)
