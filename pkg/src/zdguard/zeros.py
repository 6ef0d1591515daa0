"""Invariant zeros, zero directions, and the zero-dynamics attack signal.

An invariant zero is a frequency s0 where the Rosenbrock matrix

    P(s) = [ sI - A   -B ]
           [   C       0 ]

loses rank relative to its normal rank.  The pair (x0, a0) spanning the null
space of P(s0) gives an initial state and an exponential input a0 * exp(s0 t)
that keep the output identically zero while the state follows x0 * exp(s0 t);
for Re(s0) > 0 the state diverges silently.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg as sla

from .errors import ConfigurationError, NotAZeroError
from .linalg import LtiSystem, null_space

__all__ = [
    "RosenbrockPencil",
    "ZeroData",
    "rosenbrock_at",
    "normal_rank",
    "invariant_zeros",
    "attack_direction",
    "zd_signal",
]

# Random-probe frequencies for the normal rank are fixed for determinism.
_PROBE_SEED = 20240117
_N_PROBES = 5


@dataclass(frozen=True)
class RosenbrockPencil:
    """The matrix function s -> [sI - A, -B; C, 0] held by its constant blocks."""

    sys: LtiSystem

    def at(self, s: complex) -> np.ndarray:
        return rosenbrock_at(self.sys, s)

    @property
    def shape(self) -> tuple:
        return (self.sys.n + self.sys.p, self.sys.n + self.sys.m)


@dataclass(frozen=True)
class ZeroData:
    """Zero frequency with its state/input directions.

    ``np.concatenate([x0, a0])`` spans the null space of the Rosenbrock
    matrix at s0; for real s0 both directions are real.
    """

    s0: complex
    x0: np.ndarray
    a0: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "x0", np.atleast_1d(np.asarray(self.x0)))
        object.__setattr__(self, "a0", np.atleast_1d(np.asarray(self.a0)))

    @property
    def pair(self) -> np.ndarray:
        return np.concatenate([self.x0, self.a0])


def rosenbrock_at(sys: LtiSystem, s: complex) -> np.ndarray:
    """Evaluate [sI - A, -B; C, 0] at the complex frequency s."""
    n, m, p = sys.n, sys.m, sys.p
    dtype = complex if np.iscomplexobj(np.asarray(s)) or np.imag(s) != 0 else float
    s = complex(s).real if dtype is float else complex(s)
    top = np.hstack([s * np.eye(n) - sys.A, -sys.B])
    bot = np.hstack([sys.C, np.zeros((p, m))])
    return np.vstack([top, bot]).astype(dtype)


def _rank(M: np.ndarray, rtol: float) -> int:
    s = np.linalg.svd(M, compute_uv=False)
    if s.size == 0 or s[0] == 0.0:
        return 0
    return int(np.sum(s > rtol * s[0]))


def normal_rank(sys: LtiSystem, rtol: float = 1e-8) -> int:
    """Normal rank of the Rosenbrock matrix, by probing random complex frequencies.

    Five probes of magnitude ~1 give the generic (maximal) rank with
    probability one; the probe set is fixed so results are reproducible.
    """
    rng = np.random.default_rng(_PROBE_SEED)
    best = 0
    for _ in range(_N_PROBES):
        s = complex(*rng.standard_normal(2))
        best = max(best, _rank(rosenbrock_at(sys, s), rtol))
    return best


def invariant_zeros(sys: LtiSystem, rtol: float = 1e-8) -> np.ndarray:
    """Finite invariant zeros of a square-channel system (m == p).

    Zeros are the finite generalized eigenvalues of the pencil
    ([A, B; C, 0], diag(I, 0)); eigenvalues whose mass-matrix component is
    (numerically) zero are "at infinity" and discarded.  Every candidate is
    confirmed by an explicit rank drop of the Rosenbrock matrix.
    """
    if sys.m != sys.p:
        raise ConfigurationError(
            f"invariant_zeros supports square channels only (m == p), got m={sys.m}, p={sys.p}")
    n, m, p = sys.n, sys.m, sys.p
    L = np.block([[sys.A, sys.B], [sys.C, np.zeros((p, m))]])
    M = np.zeros_like(L)
    M[:n, :n] = np.eye(n)
    _, _, alpha, beta, _, _ = sla.ordqz(L, M, output="complex")
    finite = np.abs(beta) > 1e-10
    candidates = alpha[finite] / beta[finite]

    nr = normal_rank(sys, rtol)
    zeros = [s for s in candidates if _rank(rosenbrock_at(sys, s), rtol) < nr]
    return np.array(sorted(zeros, key=lambda z: (z.real, z.imag)), dtype=complex)


def attack_direction(sys: LtiSystem, s0: complex, magnitude: float | None = None,
                     rtol: float = 1e-8) -> ZeroData:
    """Extract the (x0, a0) pair from the Rosenbrock null space at s0.

    For real s0 the returned pair is real, normalized to unit combined norm,
    with the sign fixed so the largest-magnitude input component is positive.
    ``magnitude`` rescales the pair so that ||a0|| takes the given value.

    Raises
    ------
    NotAZeroError
        If the Rosenbrock matrix is full rank at s0.
    """
    P = rosenbrock_at(sys, s0)
    basis = null_space(P, tol=rtol)
    if not basis:
        raise NotAZeroError(f"s0={s0} is not an invariant zero (full-rank Rosenbrock matrix)")
    v = np.asarray(basis[0])
    if np.imag(complex(s0)) == 0.0:
        # Rotate the complex null vector onto the real axis; for real s0 the
        # null space of the real matrix admits a real basis.
        idx = int(np.argmax(np.abs(v)))
        phase = v[idx] / abs(v[idx])
        v = v / phase
        if np.max(np.abs(v.imag)) > 1e-8 * np.max(np.abs(v.real)):
            raise NotAZeroError(f"no real null direction at real zero s0={s0}")
        v = v.real
        s0 = float(np.real(s0))
    v = v / np.linalg.norm(v)
    x0, a0 = v[:sys.n], v[sys.n:]
    k = int(np.argmax(np.abs(a0)))
    if np.real(a0[k]) < 0:
        x0, a0 = -x0, -a0
    if magnitude is not None:
        if magnitude <= 0:
            raise ConfigurationError(f"attack magnitude must be positive, got {magnitude}")
        na = np.linalg.norm(a0)
        if na == 0:
            raise NotAZeroError("null direction has zero input component; cannot scale")
        x0, a0 = x0 * (magnitude / na), a0 * (magnitude / na)
    return ZeroData(s0=s0, x0=x0, a0=a0)


def zd_signal(zd: ZeroData, t) -> np.ndarray:
    """Zero-dynamics attack input a0 * exp(s0 t), real part for complex zeros.

    Accepts scalar or array t (t >= 0); scalar t yields shape (m,), array t
    yields shape (len(t), m).
    """
    t = np.asarray(t, dtype=float)
    expf = np.exp(np.multiply.outer(t, zd.s0))
    out = np.real(np.multiply.outer(expf, zd.a0))
    return out
