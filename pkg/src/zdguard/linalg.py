"""Dense small-matrix linear algebra and fixed-step LTI integration.

Numeric substrate for the rest of the package: state-space containers,
classical RK4 stepping with zero-order-hold inputs, eigenvalue and
Lyapunov-equation helpers, and SVD-based null spaces.  Everything works on
plain float64/complex128 numpy arrays; matrices are small and dense.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import scipy.linalg as sla

from .errors import ConfigurationError, InfeasibleError

__all__ = [
    "LtiSystem",
    "StateVector",
    "integrate_step",
    "rk4_propagators",
    "eigenvalues",
    "solve_lyapunov",
    "null_space",
    "spectral_norm",
    "is_hurwitz",
]


def _as_matrix(M, name: str) -> np.ndarray:
    M = np.atleast_2d(np.asarray(M, dtype=float))
    if M.ndim != 2:
        raise ConfigurationError(f"{name} must be 2-dimensional, got shape {M.shape}")
    if M.size == 0:
        raise ConfigurationError(f"{name} must be non-empty")
    if not np.all(np.isfinite(M)):
        raise ConfigurationError(f"{name} contains non-finite entries")
    return M


@dataclass(frozen=True)
class LtiSystem:
    """State-space triple (A, B, C) for dx/dt = A x + B u, y = C x."""

    A: np.ndarray
    B: np.ndarray
    C: np.ndarray

    def __post_init__(self):
        A = _as_matrix(self.A, "A")
        B = _as_matrix(self.B, "B")
        C = _as_matrix(self.C, "C")
        if A.shape[0] != A.shape[1]:
            raise ConfigurationError(f"A must be square, got {A.shape}")
        if B.shape[0] != A.shape[0]:
            raise ConfigurationError(
                f"B has {B.shape[0]} rows, expected {A.shape[0]}")
        if C.shape[1] != A.shape[0]:
            raise ConfigurationError(
                f"C has {C.shape[1]} columns, expected {A.shape[0]}")
        object.__setattr__(self, "A", A)
        object.__setattr__(self, "B", B)
        object.__setattr__(self, "C", C)

    @property
    def n(self) -> int:
        return self.A.shape[0]

    @property
    def m(self) -> int:
        return self.B.shape[1]

    @property
    def p(self) -> int:
        return self.C.shape[0]


@dataclass
class StateVector:
    """State sample with its timestamp.

    Entries are allowed to grow without bound (zero-dynamics attacks diverge
    on purpose); divergence is detected by callers, not rejected here.
    """

    values: np.ndarray
    time: float = 0.0

    def __post_init__(self):
        self.values = np.atleast_1d(np.asarray(self.values, dtype=float))

    def copy(self) -> "StateVector":
        return StateVector(self.values.copy(), self.time)


def integrate_step(sys: LtiSystem, state: StateVector, u, dt: float) -> StateVector:
    """Advance dx/dt = A x + B u one classical RK4 step with u held constant.

    Zero-order hold of the input matches networked-control semantics where u
    only changes at communication events.

    Parameters
    ----------
    sys : LtiSystem
    state : StateVector
    u : array_like, shape (m,)
    dt : float, > 0

    Returns
    -------
    StateVector at time ``state.time + dt``.
    """
    if dt <= 0:
        raise ConfigurationError(f"dt must be positive, got {dt}")
    u = np.atleast_1d(np.asarray(u, dtype=float))
    if u.shape[0] != sys.m:
        raise ConfigurationError(f"input has dimension {u.shape[0]}, expected {sys.m}")
    A, B = sys.A, sys.B
    x = state.values
    bu = B @ u
    k1 = A @ x + bu
    k2 = A @ (x + 0.5 * dt * k1) + bu
    k3 = A @ (x + 0.5 * dt * k2) + bu
    k4 = A @ (x + dt * k3) + bu
    x_next = x + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
    return StateVector(x_next, state.time + dt)


def rk4_propagators(A: np.ndarray, B: np.ndarray, dt: float):
    """Closed-form affine map of one RK4 step for a linear ODE with ZOH input.

    For dx/dt = A x + B u with u constant over the step, the classical RK4
    update is exactly ``x+ = Phi @ x + Gam @ u`` with Phi the degree-4 Taylor
    polynomial of expm(A dt).  Used by the simulation engine so that one step
    costs two small matvecs.

    Returns
    -------
    (Phi, Gam) : ndarray pair, shapes (n, n) and (n, m).
    """
    A = _as_matrix(A, "A")
    B = _as_matrix(B, "B")
    if dt <= 0:
        raise ConfigurationError(f"dt must be positive, got {dt}")
    n = A.shape[0]
    I = np.eye(n)
    Adt = A * dt
    A2 = Adt @ Adt
    A3 = A2 @ Adt
    Phi = I + Adt + A2 / 2.0 + A3 / 6.0 + A3 @ Adt / 24.0
    Gam = dt * (I + Adt / 2.0 + A2 / 6.0 + A3 / 24.0) @ B
    return Phi, Gam


def exp_input_map(A: np.ndarray, B: np.ndarray, dt: float, rate: float = 0.0):
    """Per-step input map for inputs of the form v * exp(rate * t).

    Companion to :func:`rk4_propagators`: with ``(Phi, Gam) =
    rk4_propagators(A, B, dt)``, stepping ``x+ = Phi x + Gam_e v_n`` where
    ``v_n = v * exp(rate * t_n)`` and

        Gam_e = (exp(rate dt) I - Phi) (rate I - A)^{-1} B

    propagates the exponential forcing without sampling error: if the pair
    (x0, v) satisfies (rate I - A) x0 = B v, the discrete trajectory from x0
    is exactly x0 * exp(rate * t_n).  For rate = 0 the expression reduces
    algebraically to the RK4 zero-order-hold map, which is returned directly
    (also covering a singular A); a rate equal to an eigenvalue of A is
    rejected.
    """
    A = _as_matrix(A, "A")
    B = _as_matrix(B, "B")
    if dt <= 0:
        raise ConfigurationError(f"dt must be positive, got {dt}")
    Phi, Gam = rk4_propagators(A, B, dt)
    if rate == 0.0:
        return Gam
    n = A.shape[0]
    S = rate * np.eye(n) - A
    if abs(np.linalg.det(S)) < 1e-14 * max(1.0, float(np.abs(S).max())) ** n:
        raise ConfigurationError(
            f"rate {rate} coincides with an eigenvalue of A; no exponential input map")
    return (np.exp(rate * dt) * np.eye(n) - Phi) @ np.linalg.solve(S, B)


def eigenvalues(M) -> np.ndarray:
    """All eigenvalues of a square matrix, any order."""
    M = np.atleast_2d(np.asarray(M))
    if M.shape[0] != M.shape[1]:
        raise ConfigurationError(f"eigenvalues needs a square matrix, got {M.shape}")
    return np.linalg.eigvals(M)


def is_hurwitz(M, margin: float = 0.0) -> bool:
    """True iff every eigenvalue has real part < -margin."""
    return bool(np.max(np.real(eigenvalues(M))) < -margin)


def solve_lyapunov(A, Q, residual_tol: float = 1e-9) -> np.ndarray:
    """Solve A^T P + P A = -Q for symmetric positive definite P.

    Parameters
    ----------
    A : ndarray, Hurwitz.
    Q : ndarray, symmetric positive definite.

    Raises
    ------
    InfeasibleError
        If A is not Hurwitz (no PD solution exists).
    """
    A = _as_matrix(A, "A")
    Q = _as_matrix(Q, "Q")
    if A.shape != Q.shape or A.shape[0] != A.shape[1]:
        raise ConfigurationError(f"A {A.shape} and Q {Q.shape} must be square and equal")
    if not np.allclose(Q, Q.T, atol=1e-12 * max(1.0, float(np.abs(Q).max()))):
        raise ConfigurationError("Q must be symmetric")
    if not is_hurwitz(A):
        raise InfeasibleError("A is not Hurwitz; the Lyapunov equation has no PD solution")
    # scipy solves a X + X a^H = q; take a = A^T, q = -Q.
    P = sla.solve_continuous_lyapunov(A.T, -Q)
    P = 0.5 * (P + P.T)
    residual = np.linalg.norm(A.T @ P + P @ A + Q)
    scale = max(1.0, float(np.linalg.norm(Q)))
    if residual > residual_tol * scale:
        raise InfeasibleError(f"Lyapunov residual {residual:.3e} exceeds tolerance")
    return P


def null_space(M, tol: float = 1e-10) -> list:
    """Orthonormal basis of the numerical null space of M.

    Singular vectors whose singular value is below ``tol * s_max`` are kept.
    Returns an empty list for full-rank M.  Real input yields real vectors;
    complex input yields complex ones.
    """
    if tol <= 0:
        raise ConfigurationError(f"tol must be positive, got {tol}")
    M = np.atleast_2d(np.asarray(M))
    _, s, Vh = np.linalg.svd(M)
    if s.size == 0 or s[0] == 0.0:
        return [Vh[i].conj() for i in range(Vh.shape[0])]
    cutoff = tol * s[0]
    ncols = Vh.shape[0]
    rank = int(np.sum(s > cutoff))
    return [Vh[i].conj() for i in range(rank, ncols)]


def spectral_norm(M) -> float:
    """Largest singular value; the matrix norm used in the triggering bounds."""
    M = np.atleast_2d(np.asarray(M, dtype=float))
    return float(np.linalg.norm(M, 2))
