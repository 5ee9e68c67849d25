import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from alphadpp.alpha_det import alpha_det_enum
from alphadpp.errors import (
    DimensionTooLarge,
    EmptyExpansion,
    EmptySubset,
    OutsideConvergenceDomain,
    SingularOperator,
)
from alphadpp.operators import (
    KernelMatrix,
    block_alpha_det,
    block_expand,
    compositions,
    det_power,
    expansion_coefficient,
    expansion_table,
    fredholm_det,
    j_kernel,
    nonempty_subsets,
    restrict,
    taylor_coefficients,
    verify_expansion,
)

from oracles import block_expand_loops, random_complex


def test_restrict():
    rng = np.random.default_rng(0)
    K = random_complex(rng, 3)
    np.testing.assert_array_equal(restrict(K, [0, 1, 2]).entries, K)
    np.testing.assert_array_equal(restrict([[1, 2], [3, 4]], [1]).entries, [[4]])
    K4 = random_complex(rng, 4)
    np.testing.assert_array_equal(restrict(K4, [2, 0]).entries, K4[[0, 2]][:, [0, 2]])
    with pytest.raises(EmptySubset):
        restrict(K, [])


def test_fredholm_det():
    assert fredholm_det([[-1]], 2) == pytest.approx(-1)
    assert fredholm_det(np.zeros((3, 3)), 0.7) == pytest.approx(1)
    lam = np.array([0.2, -0.5, 1.5])
    assert fredholm_det(np.diag(lam), 0.4) == pytest.approx(np.prod(1 + 0.4 * lam))


def test_j_kernel_examples():
    np.testing.assert_allclose(j_kernel([[-1]], 2).entries, [[1]])
    np.testing.assert_allclose(j_kernel([[0.3]], -1).entries, [[0.3 / 0.7]])
    np.testing.assert_array_equal(j_kernel(np.zeros((2, 2)), 1).entries, np.zeros((2, 2)))
    with pytest.raises(SingularOperator):
        j_kernel([[1.0]], -1)


@given(st.integers(1, 5), st.sampled_from([-1.0, -0.5, 0.5, 1.0, 2.0]), st.randoms(use_true_random=False))
def test_j_kernel_resolvent_identity(d, alpha, rnd):
    rng = np.random.default_rng(rnd.randrange(2 ** 32))
    K = random_complex(rng, d, 0.3)
    for S in nonempty_subsets(d):
        KS = K[np.ix_(S, S)]
        J = j_kernel(K, alpha, S).entries
        I = np.eye(len(S))
        np.testing.assert_allclose((I - alpha * J) @ (I + alpha * KS), I, atol=1e-10)


@given(st.integers(1, 5), st.sampled_from([-1.0, -0.5, 0.5, 1.0]), st.randoms(use_true_random=False))
def test_eigenvalue_map(d, alpha, rnd):
    rng = np.random.default_rng(rnd.randrange(2 ** 32))
    V = random_complex(rng, d)
    nu = rng.uniform(-0.4, 0.4, d) + 1j * rng.uniform(-0.4, 0.4, d)
    K = V @ np.diag(nu) @ np.linalg.inv(V)
    mapped = np.sort_complex(nu / (1 + alpha * nu))
    got = np.sort_complex(np.linalg.eigvals(j_kernel(K, alpha).entries))
    np.testing.assert_allclose(got, mapped, atol=1e-8)


def test_block_expand():
    A = np.array([[1, 2], [3, 4]])
    np.testing.assert_array_equal(block_expand(A, (2, 1)), [[1, 1, 2], [1, 1, 2], [3, 3, 4]])
    B = np.arange(9).reshape(3, 3)
    np.testing.assert_array_equal(block_expand(B, (1, 1, 1)), B)
    np.testing.assert_array_equal(block_expand(B, (0, 0, 1)), [[8]])
    with pytest.raises(EmptyExpansion):
        block_expand(B, (0, 0, 0))


@given(st.lists(st.integers(0, 3), min_size=1, max_size=4), st.randoms(use_true_random=False))
def test_block_expand_matches_loops(counts, rnd):
    if sum(counts) == 0:
        return
    rng = np.random.default_rng(rnd.randrange(2 ** 32))
    A = random_complex(rng, len(counts))
    np.testing.assert_array_equal(block_expand(A, counts), block_expand_loops(A, counts))


@given(st.integers(2, 4), st.sampled_from([-1.0, -0.5, 1.0, 1.5]), st.randoms(use_true_random=False))
def test_block_relabel_symmetry(d, alpha, rnd):
    rng = np.random.default_rng(rnd.randrange(2 ** 32))
    A = random_complex(rng, d, 0.6)
    counts = rng.integers(0, 3, d)
    counts[0] += 1
    p = rng.permutation(d)
    lhs = block_alpha_det(A[np.ix_(p, p)], counts[p], alpha)
    assert lhs == pytest.approx(block_alpha_det(A, counts, alpha), rel=1e-9, abs=1e-9)


def test_block_alpha_det_bound():
    with pytest.raises(DimensionTooLarge):
        block_alpha_det(np.eye(2), (11, 10), 1.0)


def test_expansion_coefficient_examples():
    rng = np.random.default_rng(1)
    K = random_complex(rng, 2)
    assert expansion_coefficient(K, 1.0, (0, 0)) == 1
    assert expansion_coefficient([[0.7]], 1.0, (2,)) == pytest.approx(0.49)
    assert expansion_coefficient(K, -1.0, (1, 1)) == pytest.approx(np.linalg.det(K))


def test_compositions_order():
    assert list(compositions(2, 2)) == [(0, 2), (1, 1), (2, 0)]
    assert list(compositions(3, 2, cap=2)) == [(1, 2), (2, 1)]
    assert sum(1 for _ in compositions(4, 3)) == math.comb(6, 2)


def test_verify_expansion_determinantal_exact():
    rng = np.random.default_rng(2)
    for d in (1, 2, 3):
        K = random_complex(rng, d)
        z = random_complex(rng, d)[0]
        assert verify_expansion(K, -1.0, z, d) < 1e-10


def test_verify_expansion_zero_point():
    K = random_complex(np.random.default_rng(3), 2)
    assert verify_expansion(K, 0.5, np.zeros(2), 3) == 0.0


def test_verify_expansion_scalar_geometric():
    assert verify_expansion([[0.3]], 1.0, [0.5], 12) < 1e-8


def test_outside_convergence_domain():
    with pytest.raises(OutsideConvergenceDomain):
        det_power([[2.0]], 1.0, [0.9])


@pytest.mark.parametrize("m", [1, 2, 3])
@pytest.mark.parametrize("d", [1, 2, 3])
def test_power_of_determinant_coefficients(m, d):
    """Taylor coefficients of det(I + Z A)**m, read off by a DFT, against det_{-1/m} of block expansions."""
    rng = np.random.default_rng(10 * m + d)
    A = random_complex(rng, d, 0.8)
    coef = taylor_coefficients(lambda z: np.linalg.det(np.eye(d) + z[:, None] * A) ** m, [m] * d)
    for n in np.ndindex(*coef.shape):
        total = sum(n)
        expected = 1.0 if total == 0 else (
            m ** total * alpha_det_enum(block_expand(A, n), -1.0 / m) / math.prod(map(math.factorial, n)))
        assert abs(coef[n] - expected) < 1e-8, (n, coef[n], expected)


def test_coefficients_vanish_beyond_m():
    rng = np.random.default_rng(5)
    K = random_complex(rng, 2)
    for n, c in expansion_table(K, -0.5, 5):
        if max(n) > 2:
            assert abs(c) < 1e-10


def test_kernel_matrix_flags():
    H = KernelMatrix([[1, 1j], [-1j, 2]])
    assert H.hermitian and not H.is_real
    assert not KernelMatrix([[1, 2], [0, 1]]).hermitian
    with pytest.raises(ValueError):
        H.entries[0, 0] = 5
