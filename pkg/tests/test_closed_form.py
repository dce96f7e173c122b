import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from nucmin.closed_form import (
    MethodTag,
    partition_v,
    shape_interaction_matrix,
    solve_azb,
    solve_lrr,
    solve_lrr_full_row_rank,
    solve_semiorthogonal,
)
from nucmin.errors import DimensionMismatch, Infeasible, NotFullRowRank, NotSemiOrthogonal, ZeroDictionary
from nucmin.linalg import Tolerances, nuclear_norm, numerical_rank, pseudo_inverse, relative_distance
from nucmin.oracle import admm_solve_azb, feasible_perturbation_lrr, feasible_perturbation_semiorthogonal
from nucmin.sampling import PROFILES, random_low_rank, random_lrr_instance, random_semi_orthogonal, random_shapes

R2 = 1 / np.sqrt(2)


def feasible_line_minimum():
    # feasible set of [[1, 1]] Z = [[2]] is Z(t) = [2 - t, t]^T
    ts = np.linspace(-1.0, 3.0, 40001)
    norms = np.sqrt((2 - ts) ** 2 + ts**2)
    i = np.argmin(norms)
    return ts[i], norms[i]


class TestSolveLrr:
    def test_identity_dictionary(self):
        X = np.array([[3.0, 1.0], [2.0, 5.0]])
        sol = solve_lrr(X, np.eye(2))
        np.testing.assert_allclose(sol.minimizer, X, atol=1e-14)
        assert sol.method_tag is MethodTag.THEOREM1
        assert sol.objective == pytest.approx(nuclear_norm(X), rel=1e-12)

    def test_row_dictionary_against_line_scan(self):
        t_best, norm_best = feasible_line_minimum()
        assert t_best == pytest.approx(1.0, abs=1e-4)
        sol = solve_lrr([[2.0]], [[1.0, 1.0]])
        np.testing.assert_allclose(sol.minimizer, [[2 - t_best], [t_best]], atol=1e-4)
        np.testing.assert_allclose(sol.minimizer, [[1.0], [1.0]], atol=1e-14)
        assert sol.objective == pytest.approx(norm_best, abs=1e-8)
        assert sol.objective == pytest.approx(np.sqrt(2), rel=1e-14)

    def test_column_dictionary(self):
        sol = solve_lrr([[2.0], [4.0]], [[1.0], [2.0]])
        np.testing.assert_allclose(sol.minimizer, [[2.0]])

    def test_zero_data(self):
        sol = solve_lrr(np.zeros((3, 2)), np.ones((3, 4)))
        np.testing.assert_array_equal(sol.minimizer, np.zeros((4, 2)))
        assert sol.objective == 0.0

    def test_errors(self):
        with pytest.raises(ZeroDictionary):
            solve_lrr(np.ones((2, 1)), np.zeros((2, 2)))
        with pytest.raises(ZeroDictionary):
            solve_lrr(np.ones((2, 1)), np.ones((2, 2)), Tolerances(rank_tol_factor=1.0))
        with pytest.raises(Infeasible):
            solve_lrr([[0.0], [1.0]], [[1.0], [0.0]])
        with pytest.raises(DimensionMismatch):
            solve_lrr(np.ones((3, 1)), np.ones((2, 1)))

    def test_solution_is_immutable(self):
        sol = solve_lrr(np.eye(2), np.eye(2))
        with pytest.raises(ValueError):
            sol.minimizer[0, 0] = 1.0

    def test_deterministic(self, rng):
        inst = random_lrr_instance(5, 12, 20, 7)
        a = solve_lrr(inst.X, inst.A).minimizer
        b = solve_lrr(inst.X.copy(), inst.A.copy()).minimizer
        assert np.array_equal(a, b)

    @settings(max_examples=80, deadline=None)
    @given(seed=st.integers(0, 2**32 - 1), profile=st.sampled_from(PROFILES))
    def test_round_trip_and_minimality(self, seed, profile):
        gen = np.random.default_rng(seed)
        m, k, n = random_shapes(gen, profile, high=30)
        inst = random_lrr_instance(seed, m, k, n, profile)
        sol = solve_lrr(inst.X, inst.A)
        assert np.linalg.norm(inst.A @ sol.minimizer - inst.X) <= 1e-8 * (1 + np.linalg.norm(inst.X))
        assert sol.objective <= nuclear_norm(inst.Z0) + 1e-8
        assert relative_distance(sol.minimizer, pseudo_inverse(inst.A) @ inst.X) <= 1e-8

    def test_null_space_perturbations_increase_norm(self):
        inst = random_lrr_instance(3, 10, 15, 6, "deficient", rank=4)
        sol = solve_lrr(inst.X, inst.A)
        for seed in range(100):
            N = feasible_perturbation_lrr(inst.A, sol.minimizer.shape, seed)
            assert nuclear_norm(sol.minimizer + N) > sol.objective


class TestFullRowRank:
    def test_identity(self, rng):
        X = rng.standard_normal((3, 4))
        np.testing.assert_allclose(solve_lrr_full_row_rank(X, np.eye(3)).minimizer, X)

    def test_row_dictionary(self):
        sol = solve_lrr_full_row_rank([[2.0]], [[1.0, 1.0]])
        np.testing.assert_allclose(sol.minimizer, [[1.0], [1.0]])
        np.testing.assert_allclose(sol.minimizer, solve_lrr([[2.0]], [[1.0, 1.0]]).minimizer, rtol=1e-12)
        assert sol.method_tag is MethodTag.COROLLARY1

    def test_diagonal(self):
        sol = solve_lrr_full_row_rank([[2.0, 0.0], [0.0, 8.0]], np.diag([2.0, 4.0]))
        np.testing.assert_allclose(sol.minimizer, [[1.0, 0.0], [0.0, 2.0]])

    def test_rank_deficient_rejected(self):
        with pytest.raises(NotFullRowRank):
            solve_lrr_full_row_rank(np.ones((2, 1)), np.ones((2, 3)))

    def test_agrees_with_general_route(self):
        for seed in range(20):
            inst = random_lrr_instance(seed, 8, 14, 5, "full_row_rank")
            a = solve_lrr(inst.X, inst.A).minimizer
            b = solve_lrr_full_row_rank(inst.X, inst.A).minimizer
            assert relative_distance(a, b) <= 1e-8


class TestShapeInteractionMatrix:
    def test_rank_one_axis(self):
        sol = shape_interaction_matrix([[1.0, 0.0], [0.0, 0.0]])
        np.testing.assert_allclose(sol.minimizer, [[1.0, 0.0], [0.0, 0.0]])
        assert sol.method_tag is MethodTag.COROLLARY2

    def test_full_rank_is_identity(self, rng):
        np.testing.assert_allclose(shape_interaction_matrix(rng.standard_normal((4, 4))).minimizer, np.eye(4), atol=1e-13)

    def test_ones(self):
        # V_X = [1, 1]/sqrt(2) from the rank-one SVD example
        v = np.array([[R2], [R2]])
        sol = shape_interaction_matrix(np.ones((2, 2)))
        np.testing.assert_allclose(sol.minimizer, v @ v.T)
        np.testing.assert_allclose(sol.minimizer, np.full((2, 2), 0.5))

    def test_zero_rejected(self):
        with pytest.raises(ZeroDictionary):
            shape_interaction_matrix(np.zeros((2, 3)))

    @pytest.mark.parametrize("seed", range(10))
    def test_projector_laws(self, seed):
        gen = np.random.default_rng(seed)
        m, n = gen.integers(2, 25, size=2)
        X = random_low_rank(gen, m, n, int(gen.integers(1, min(m, n) + 1)))
        Z = shape_interaction_matrix(X).minimizer
        assert np.linalg.norm(Z - Z.T) <= 1e-9
        assert np.linalg.norm(Z @ Z - Z) <= 1e-9
        assert round(np.trace(Z)) == numerical_rank(X)
        assert relative_distance(Z, solve_lrr(X, X).minimizer) <= 1e-8


class TestSemiOrthogonal:
    def test_identity(self, rng):
        M = rng.standard_normal((3, 2))
        np.testing.assert_allclose(solve_semiorthogonal(np.eye(3), np.eye(2), M).minimizer, M)

    def test_embed_scalar(self):
        e1 = np.array([[1.0], [0.0]])
        sol = solve_semiorthogonal(e1, e1, [[5.0]])
        np.testing.assert_array_equal(sol.minimizer, [[5.0, 0.0], [0.0, 0.0]])
        assert sol.method_tag is MethodTag.LEMMA3

    def test_random_uniqueness(self, rng):
        U = random_semi_orthogonal(rng, 4, 2)
        V = random_semi_orthogonal(rng, 3, 2)
        M = rng.standard_normal((2, 2))
        sol = solve_semiorthogonal(U, V, M)
        assert np.linalg.norm(U.T @ sol.minimizer @ V - M) <= 1e-10
        assert sol.objective == pytest.approx(nuclear_norm(M), rel=1e-10)
        for seed in range(100):
            H = feasible_perturbation_semiorthogonal(U, V, sol.minimizer.shape, seed)
            assert np.linalg.norm(H) == pytest.approx(1.0)
            assert nuclear_norm(sol.minimizer + H) > sol.objective

    def test_errors(self):
        with pytest.raises(NotSemiOrthogonal):
            solve_semiorthogonal(np.diag([2.0, 1.0]), np.eye(2), np.eye(2))
        with pytest.raises(DimensionMismatch):
            solve_semiorthogonal(np.eye(3), np.eye(2), np.eye(2))


class TestAzb:
    def test_identity_b_reduces_to_lrr(self):
        inst = random_lrr_instance(1, 6, 9, 4)
        sol = solve_azb(inst.X, inst.A, np.eye(4))
        assert relative_distance(sol.minimizer, solve_lrr(inst.X, inst.A).minimizer) <= 1e-10
        assert sol.method_tag is MethodTag.AZB

    def test_identities(self, rng):
        X = rng.standard_normal((3, 4))
        np.testing.assert_allclose(solve_azb(X, np.eye(3), np.eye(4)).minimizer, X, atol=1e-14)

    def test_ones_instance_against_admm(self):
        A, B, X = np.array([[1.0, 1.0]]), np.array([[1.0], [1.0]]), np.array([[4.0]])
        candidate = pseudo_inverse(A) @ X @ pseudo_inverse(B)
        np.testing.assert_allclose(candidate, np.ones((2, 2)))
        sol = solve_azb(X, A, B)
        np.testing.assert_allclose(sol.minimizer, np.ones((2, 2)), atol=1e-14)
        report = admm_solve_azb(X, A, B, reference=sol.minimizer)
        assert report.converged
        np.testing.assert_allclose(report.iterate, np.ones((2, 2)), atol=1e-4)

    def test_pinv_form(self, rng):
        for _ in range(20):
            m, k, p, n = rng.integers(2, 12, size=4)
            A = random_low_rank(rng, m, k, int(rng.integers(1, min(m, k) + 1)))
            B = random_low_rank(rng, p, n, int(rng.integers(1, min(p, n) + 1)))
            X = A @ rng.standard_normal((k, p)) @ B
            sol = solve_azb(X, A, B)
            assert np.linalg.norm(A @ sol.minimizer @ B - X) <= 1e-8 * (1 + np.linalg.norm(X))
            expected = pseudo_inverse(A) @ X @ pseudo_inverse(B)
            assert relative_distance(sol.minimizer, expected) <= 1e-8

    def test_errors(self):
        with pytest.raises(ZeroDictionary):
            solve_azb(np.ones((2, 2)), np.zeros((2, 2)), np.eye(2))
        with pytest.raises(ZeroDictionary):
            solve_azb(np.ones((2, 2)), np.eye(2), np.zeros((2, 2)))
        with pytest.raises(Infeasible):
            solve_azb(np.eye(2), np.array([[1.0], [0.0]]), np.eye(2))
        with pytest.raises(DimensionMismatch):
            solve_azb(np.ones((2, 3)), np.eye(2), np.eye(2))


class TestPartition:
    def test_equal_columns(self):
        part = partition_v([[1.0], [0.0]], [[1.0], [0.0]])
        assert part.rank == 1
        np.testing.assert_allclose(part.sigma, [np.sqrt(2)])
        np.testing.assert_allclose(part.V_X, [[R2]])
        np.testing.assert_allclose(part.V_A, [[R2]])

    def test_zero_block(self):
        part = partition_v(np.zeros((2, 1)), [[1.0], [0.0]])
        np.testing.assert_allclose(np.abs(part.V_X), [[0.0]])
        np.testing.assert_allclose(np.abs(part.V_A), [[1.0]])

    def test_reconstruction(self):
        X = np.array([[2.0], [0.0]])
        A = np.eye(2)
        part = partition_v(X, A)
        US = part.U * part.sigma
        assert np.linalg.norm(US @ part.V_X.T - X) <= 1e-10 * np.linalg.norm(X)
        assert np.linalg.norm(US @ part.V_A.T - A) <= 1e-10 * np.linalg.norm(A)

    def test_va_full_column_rank_when_feasible(self, rng):
        inst = random_lrr_instance(2, 10, 8, 6, "deficient", rank=3)
        part = partition_v(inst.X, inst.A)
        assert part.rank == 3
        assert numerical_rank(part.V_A) == part.rank

    def test_mismatch(self):
        with pytest.raises(DimensionMismatch):
            partition_v(np.ones((2, 1)), np.ones((3, 1)))
