import numpy as np
import pytest

from ciph import (
    BracketMatrix,
    DimensionMismatch,
    Tensor4,
    check_psd_c,
    check_raw_iii,
    default_directions,
    flatten_pairs,
    is_skew,
    product_tensor,
    rank_one_factor,
    split_product,
    split_tensor,
    symmetrize_34,
    unflatten_pairs,
)
from ciph.splitter import (
    NEGATIVE_GAMMA,
    NOT_PROPORTIONAL,
    NOT_RANK_ONE,
    NOT_SKEW,
    SPLIT,
)

from conftest import random_unit_scaled_skew


def block_diag_skew(*lams: float) -> np.ndarray:
    """Block-diagonal matrix of 2x2 skew blocks scaled by the given factors."""
    n = 2 * len(lams)
    out = np.zeros((n, n))
    for b, lam in enumerate(lams):
        out[2 * b, 2 * b + 1] = lam
        out[2 * b + 1, 2 * b] = -lam
    return out


class TestFlattenPairs:
    def test_zero(self):
        assert np.array_equal(flatten_pairs(Tensor4.zeros(2)), np.zeros((4, 4)))

    def test_product_becomes_outer_product(self, j_std):
        rng = np.random.default_rng(50)
        A = BracketMatrix(rng.standard_normal((2, 2)))
        F = flatten_pairs(product_tensor(A, j_std))
        outer = np.outer(A.array.ravel(), j_std.array.ravel())
        assert np.array_equal(F, outer)

    def test_golden_tensor_rows(self, golden_eps):
        F = flatten_pairs(golden_eps)
        assert np.array_equal(F[1], [0.0, 2.0, -1.0, 0.0])  # row for pair (1,2)
        assert np.array_equal(F[2], [0.0, -1.0, 2.0, 0.0])  # row for pair (2,1)
        assert np.linalg.matrix_rank(F) >= 2

    def test_round_trip_bijection(self):
        rng = np.random.default_rng(51)
        for n in (1, 2, 3, 4):
            t = Tensor4(n, rng.standard_normal((n, n, n, n)))
            assert unflatten_pairs(flatten_pairs(t), n) == t


class TestRankOneFactor:
    def test_zero_matrix(self):
        result = rank_one_factor(np.zeros((4, 4)))
        assert result.ok
        assert result.A == BracketMatrix.zeros(2)
        assert result.B == BracketMatrix.zeros(2)

    def test_exact_product_reconstructs(self, j_std):
        t = product_tensor(j_std, j_std)
        result = rank_one_factor(flatten_pairs(t))
        assert result.ok
        assert result.residual == 0.0
        assert product_tensor(result.A, result.B) == t

    def test_golden_tensor_is_not_rank_one(self, golden_eps):
        result = rank_one_factor(flatten_pairs(golden_eps))
        assert not result.ok
        assert result.residual > 0.1


class TestSplitProduct:
    def test_standard_pair_with_factor_two(self, j_std):
        result = split_product(j_std, BracketMatrix(2.0 * j_std.array))
        assert result.status == SPLIT
        assert result.gamma == pytest.approx(2.0, abs=1e-12)
        assert np.array_equal(result.J.array, j_std.array)

    def test_non_skew_first_factor(self, j_std):
        result = split_product(BracketMatrix(np.eye(2)), j_std)
        assert result.status == NOT_SKEW
        # cross-check: such a product cannot satisfy the annihilation identities
        t = product_tensor(BracketMatrix(np.eye(2)), j_std)
        assert not check_raw_iii(t).passed

    def test_block_mismatch_is_not_proportional(self):
        A = BracketMatrix(block_diag_skew(1.0, 1.0))
        B = BracketMatrix(block_diag_skew(1.0, 2.0))
        result = split_product(A, B)
        assert result.status == NOT_PROPORTIONAL
        # cross-check: the contracted matrix is asymmetric on a sampled direction
        t = product_tensor(A, B)
        report = check_psd_c(t, default_directions(4))
        assert not report.passed

    def test_negative_factor(self, j_std):
        result = split_product(j_std, BracketMatrix(-3.0 * j_std.array))
        assert result.status == NEGATIVE_GAMMA

    def test_zero_factor_splits_trivially(self, j_std):
        result = split_product(BracketMatrix.zeros(2), j_std)
        assert result.status == SPLIT
        assert result.gamma == 0.0
        assert result.J == BracketMatrix.zeros(2)

    def test_gauge_sign_convention(self):
        # A's first nonzero entry is negative: J flips so its own is positive.
        A = BracketMatrix([[0.0, -2.0], [2.0, 0.0]])
        result = split_product(A, BracketMatrix(0.5 * A.array))
        assert result.status == SPLIT
        assert result.J.array[0, 1] == 1.0
        assert result.gamma == pytest.approx(0.5 * 4.0)  # lambda * scale^2

    def test_dimension_mismatch(self, j_std):
        with pytest.raises(DimensionMismatch):
            split_product(j_std, BracketMatrix.zeros(3))


class TestSplitTensor:
    def test_golden_tensor_splits_via_symmetric_branch(self, golden_eps, j_std):
        result = split_tensor(golden_eps)
        assert result.status == SPLIT
        assert result.gamma == pytest.approx(2.0, abs=1e-9)
        assert np.max(np.abs(result.J.array - j_std.array)) <= 1e-12
        assert result.residual <= 1e-12

    def test_raw_product_splits_via_rank_one_branch(self):
        rng = np.random.default_rng(60)
        J = random_unit_scaled_skew(rng, 3)
        t = product_tensor(J, BracketMatrix(3.0 * J.array))
        result = split_tensor(t)
        assert result.status == SPLIT
        assert result.gamma == pytest.approx(3.0, abs=1e-12)
        recon = product_tensor(result.J, BracketMatrix(result.gamma * result.J.array))
        assert np.max(np.abs(recon.values - t.values)) <= 1e-12

    def test_delta_product_is_not_splittable(self):
        t = Tensor4(2, np.einsum("ij,kl->ijkl", np.eye(2), np.eye(2)))
        assert split_tensor(t).status == NOT_RANK_ONE

    def test_zero_tensor_splits_trivially(self):
        result = split_tensor(Tensor4.zeros(3))
        assert result.status == SPLIT
        assert result.gamma == 0.0

    def test_round_trip_many_random_products(self):
        rng = np.random.default_rng(61)
        for trial in range(60):
            n = int(rng.integers(2, 6))
            J = random_unit_scaled_skew(rng, n)
            gamma = float(rng.uniform(1e-3, 10.0))
            result = split_tensor(product_tensor(J, BracketMatrix(gamma * J.array)))
            assert result.status == SPLIT
            assert abs(result.gamma - gamma) <= 1e-9
            # J recoverable up to global sign only
            delta = min(
                float(np.max(np.abs(result.J.array - J.array))),
                float(np.max(np.abs(result.J.array + J.array))),
            )
            assert delta <= 1e-9

    def test_symmetric_representative_doubles_gamma(self):
        rng = np.random.default_rng(62)
        for _ in range(25):
            n = int(rng.integers(2, 6))
            J = random_unit_scaled_skew(rng, n)
            gamma = float(rng.uniform(0.1, 5.0))
            t = symmetrize_34(
                Tensor4(n, 2.0 * product_tensor(J, BracketMatrix(gamma * J.array)).values)
            )
            result = split_tensor(t)
            assert result.status == SPLIT
            assert result.gamma == pytest.approx(2.0 * gamma, abs=1e-9)

    def test_split_results_pass_forward_conditions(self):
        rng = np.random.default_rng(63)
        for _ in range(10):
            n = int(rng.integers(2, 5))
            J = random_unit_scaled_skew(rng, n)
            gamma = float(rng.uniform(0.1, 4.0))
            result = split_tensor(product_tensor(J, BracketMatrix(gamma * J.array)))
            assert result.status == SPLIT
            recon = product_tensor(result.J, BracketMatrix(result.gamma * result.J.array))
            assert check_raw_iii(recon).passed
            assert check_psd_c(recon, default_directions(n)).passed

    def test_non_skew_products_fail_raw_iii(self):
        rng = np.random.default_rng(64)
        for _ in range(20):
            n = int(rng.integers(2, 6))
            A = BracketMatrix(rng.standard_normal((n, n)))
            if is_skew(A, 1e-6):
                continue
            B = BracketMatrix(rng.standard_normal((n, n)))
            if B.max_abs() == 0.0:
                continue
            assert not check_raw_iii(product_tensor(A, B)).passed

    def test_disconnected_blocks_recover_with_cross_sign(self):
        # Block-diagonal skew with two components: the cross entries of the
        # symmetric representative pin the relative block sign.
        base = block_diag_skew(1.0, 0.5)
        t = symmetrize_34(
            Tensor4(4, 2.0 * 1.5 * np.einsum("ik,jl->ijkl", base, base))
        )
        result = split_tensor(t)
        assert result.status == SPLIT
        assert result.gamma == pytest.approx(3.0, abs=1e-9)
        delta = min(
            float(np.max(np.abs(result.J.array - base))),
            float(np.max(np.abs(result.J.array + base))),
        )
        assert delta <= 1e-9

    def test_symmetric_but_wrong_shape_rejected(self):
        # symmetric in the last two slots yet not of the two-bracket form
        t = Tensor4.zeros(3).set(1, 1, 2, 3, 1.0).set(1, 1, 3, 2, 1.0)
        assert split_tensor(t).status != SPLIT
