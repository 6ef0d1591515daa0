import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from zdguard import (
    ConfigurationError,
    InfeasibleError,
    LtiSystem,
    StateVector,
    eigenvalues,
    exp_input_map,
    integrate_step,
    is_hurwitz,
    null_space,
    rk4_propagators,
    solve_lyapunov,
    spectral_norm,
)


class TestLtiSystem:
    def test_dimensions(self):
        sys = LtiSystem(np.eye(3) * -1, np.ones((3, 2)), np.ones((1, 3)))
        assert (sys.n, sys.m, sys.p) == (3, 2, 1)

    def test_rejects_nonsquare_a(self):
        with pytest.raises(ConfigurationError):
            LtiSystem(np.ones((2, 3)), np.ones((2, 1)), np.ones((1, 2)))

    def test_rejects_mismatched_b(self):
        with pytest.raises(ConfigurationError):
            LtiSystem(np.eye(2), np.ones((3, 1)), np.ones((1, 2)))

    def test_rejects_mismatched_c(self):
        with pytest.raises(ConfigurationError):
            LtiSystem(np.eye(2), np.ones((2, 1)), np.ones((1, 3)))

    def test_rejects_nonfinite(self):
        with pytest.raises(ConfigurationError):
            LtiSystem(np.array([[np.nan]]), np.eye(1), np.eye(1))


class TestIntegrateStep:
    def test_zero_dynamics_keeps_state(self):
        sys = LtiSystem([[0.0]], [[0.0]], [[1.0]])
        out = integrate_step(sys, StateVector([1.0]), [0.0], 0.1)
        assert out.values[0] == pytest.approx(1.0, abs=0.0)
        assert out.time == pytest.approx(0.1)

    def test_scalar_decay_matches_exponential(self):
        # d x/dt = -x from 1.0: closed form exp(-1) after 1000 steps of 1e-3
        sys = LtiSystem([[-1.0]], [[0.0]], [[1.0]])
        state = StateVector([1.0])
        for _ in range(1000):
            state = integrate_step(sys, state, [0.0], 1e-3)
        assert abs(state.values[0] - np.exp(-1.0)) < 1e-9
        # RK4 local error O(dt^4): global error at t=1 stays below 1e-10
        assert abs(state.values[0] - np.exp(-1.0)) < 1e-10

    def test_double_integrator_closed_form(self):
        # x1(t) = t^2/2, x2(t) = t under unit acceleration
        sys = LtiSystem([[0.0, 1.0], [0.0, 0.0]], [[0.0], [1.0]], [[1.0, 0.0]])
        state = StateVector([0.0, 0.0])
        for _ in range(1000):
            state = integrate_step(sys, state, [1.0], 1e-3)
        assert np.allclose(state.values, [0.5, 1.0], atol=1e-9)

    def test_rejects_bad_dt_and_dimension(self):
        sys = LtiSystem([[-1.0]], [[1.0]], [[1.0]])
        with pytest.raises(ConfigurationError):
            integrate_step(sys, StateVector([1.0]), [0.0], 0.0)
        with pytest.raises(ConfigurationError):
            integrate_step(sys, StateVector([1.0]), [0.0, 1.0], 0.1)

    def test_propagators_reproduce_stages(self):
        rng = np.random.default_rng(3)
        for _ in range(5):
            A = rng.standard_normal((3, 3))
            B = rng.standard_normal((3, 2))
            sys = LtiSystem(A, B, np.eye(3))
            x = rng.standard_normal(3)
            u = rng.standard_normal(2)
            Phi, Gam = rk4_propagators(A, B, 0.01)
            stepped = integrate_step(sys, StateVector(x), u, 0.01).values
            assert np.allclose(Phi @ x + Gam @ u, stepped, rtol=0, atol=1e-14)


class TestExpInputMap:
    def test_rate_zero_equals_hold_map(self):
        rng = np.random.default_rng(5)
        A = rng.standard_normal((3, 3))
        B = rng.standard_normal((3, 1))
        _, Gam = rk4_propagators(A, B, 0.02)
        assert np.array_equal(exp_input_map(A, B, 0.02, 0.0), Gam)

    def test_exponential_forcing_is_exact_on_zero_direction(self):
        # With (rate I - A) x0 = B v, stepping must follow x0 * exp(rate t).
        A = np.array([[-1.0, 0.3], [0.0, -2.0]])
        B = np.array([[1.0], [0.5]])
        rate = 0.04
        v = np.array([0.7])
        x0 = np.linalg.solve(rate * np.eye(2) - A, B @ v)
        Phi, _ = rk4_propagators(A, B, 1e-3)
        Gam_e = exp_input_map(A, B, 1e-3, rate)
        x = x0.copy()
        for i in range(2000):
            x = Phi @ x + Gam_e @ (v * np.exp(rate * i * 1e-3))
        assert np.allclose(x, x0 * np.exp(rate * 2.0), rtol=1e-12)

    def test_rejects_rate_at_eigenvalue(self):
        with pytest.raises(ConfigurationError):
            exp_input_map(np.array([[-1.0]]), np.array([[1.0]]), 0.01, -1.0)


class TestEigenvalues:
    def test_diagonal(self):
        assert sorted(eigenvalues([[-1.0, 0.0], [0.0, -2.0]]).real) == [-2.0, -1.0]

    def test_rotation_generator(self):
        w = np.sort_complex(eigenvalues([[0.0, 1.0], [-1.0, 0.0]]))
        assert np.allclose(w, [-1j, 1j])

    def test_companion(self):
        # characteristic polynomial s^2 + 3 s + 2 = (s+1)(s+2)
        w = np.sort(eigenvalues([[0.0, 1.0], [-2.0, -3.0]]).real)
        assert np.allclose(w, [-2.0, -1.0], atol=1e-10)

    def test_rejects_nonsquare(self):
        with pytest.raises(ConfigurationError):
            eigenvalues(np.ones((2, 3)))

    def test_is_hurwitz(self):
        assert is_hurwitz([[-1.0, 0.0], [0.0, -0.01]])
        assert not is_hurwitz([[0.0, 1.0], [-1.0, 0.0]])


class TestSolveLyapunov:
    def test_scalar(self):
        P = solve_lyapunov(np.array([[-1.0]]), np.array([[2.0]]))
        assert P[0, 0] == pytest.approx(1.0, rel=1e-12)

    def test_decoupled_diagonal(self):
        P = solve_lyapunov(np.diag([-1.0, -2.0]), np.eye(2))
        assert np.allclose(P, np.diag([0.5, 0.25]), atol=1e-12)

    def test_against_kronecker_oracle(self):
        # Independent oracle: vectorize A^T P + P A = -Q as a linear system.
        A = np.array([[0.0, 1.0], [-2.0, -3.0]])
        Q = np.eye(2)
        n = 2
        Kmat = np.kron(np.eye(n), A.T) + np.kron(A.T, np.eye(n))
        P_vec = np.linalg.solve(Kmat, -Q.reshape(-1))
        P_oracle = P_vec.reshape(n, n)
        P = solve_lyapunov(A, Q)
        assert np.allclose(P, P_oracle, atol=1e-12)
        assert np.linalg.norm(P - P.T) < 1e-12
        assert np.linalg.eigvalsh(P).min() > 0
        assert np.linalg.norm(A.T @ P + P @ A + Q) < 1e-9

    def test_rejects_non_hurwitz(self):
        with pytest.raises(InfeasibleError):
            solve_lyapunov(np.array([[1.0]]), np.array([[1.0]]))

    @settings(max_examples=25, deadline=None)
    @given(st.integers(2, 5), st.integers(0, 10_000))
    def test_random_hurwitz_gives_pd_solution(self, n, seed):
        rng = np.random.default_rng(seed)
        M = rng.standard_normal((n, n))
        A = M - (np.max(np.real(np.linalg.eigvals(M))) + 0.5) * np.eye(n)
        P = solve_lyapunov(A, np.eye(n))
        assert np.linalg.norm(P - P.T) < 1e-12
        assert np.linalg.eigvalsh(P).min() > 0


class TestNullSpace:
    def test_full_rank_empty(self):
        assert null_space(np.eye(2)) == []

    def test_rank_one_symmetric(self):
        basis = null_space(np.array([[1.0, 1.0], [1.0, 1.0]]))
        assert len(basis) == 1
        v = basis[0]
        expected = np.array([1.0, -1.0]) / np.sqrt(2.0)
        assert abs(abs(v @ expected) - 1.0) < 1e-12

    def test_constructed_rank_two(self):
        rng = np.random.default_rng(11)
        u1, u2 = rng.standard_normal((2, 3))
        M = np.outer(u1, rng.standard_normal(3)) + np.outer(u2, rng.standard_normal(3))
        basis = null_space(M, tol=1e-10)
        assert len(basis) == 1
        assert np.linalg.norm(M @ basis[0]) < 1e-9

    @settings(max_examples=30, deadline=None)
    @given(st.integers(2, 6), st.integers(1, 3), st.integers(0, 9999))
    def test_residual_bound(self, n, defect, seed):
        defect = min(defect, n - 1)
        rng = np.random.default_rng(seed)
        U = rng.standard_normal((n, n - defect))
        V = rng.standard_normal((n - defect, n))
        M = U @ V
        tol = 1e-10
        for v in null_space(M, tol=tol):
            assert np.linalg.norm(M @ v) <= 10 * tol * max(
                1.0, np.linalg.norm(M, 2))

    def test_rejects_bad_tol(self):
        with pytest.raises(ConfigurationError):
            null_space(np.eye(2), tol=0.0)


def test_spectral_norm_matches_svd():
    rng = np.random.default_rng(7)
    M = rng.standard_normal((4, 3))
    assert spectral_norm(M) == pytest.approx(np.linalg.svd(M, compute_uv=False)[0])
