"""Offline design and certificate checks.

Builds the auxiliary system and gains (A_z = lambda0*I, B_z = C_z = I, K and L
such that the augmented matrix is Hurwitz), assembles the augmented error
dynamics, numerically verifies the two stability LMIs by a
Lyapunov-solve-then-check scan, and evaluates the Zeno lower bound

    t_{j+1} - t_j >= (1/||A_z||) * ln(||A_z|| M2 / M + 1),
    M2 = sqrt(2 eps2) / sqrt(4 + 4 delta^2).

The LMIs are verification certificates, not synthesis targets, so no
semidefinite-programming dependency is used: P candidates come from
``solve_lyapunov`` over Q = I * 10^k, k = -2..2, and every candidate is
checked by an independent eigenvalue computation.  A scan can come up empty;
the report then says so explicitly (the block signs of the boundedness
inequality make it very restrictive -- both sign conventions are evaluated
and recorded).
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigurationError, DesignError, InfeasibleError
from .linalg import LtiSystem, eigenvalues, is_hurwitz, solve_lyapunov, spectral_norm
from .triggering import budget_s

__all__ = [
    "DesignBundle",
    "LmiScanEntry",
    "FeasibilityReport",
    "build_augmented",
    "verify_boundedness_lmi",
    "verify_observer_lmi",
    "design_gains",
    "zeno_bound",
]

_Q_EXPONENTS = range(-2, 3)


@dataclass(frozen=True)
class DesignBundle:
    """Auxiliary system plus all gains needed by one closed-loop deployment."""

    aux: LtiSystem          # (A_z, B_z, C_z)
    K: np.ndarray           # controller gain, m x p
    L: np.ndarray           # auxiliary-observer gain, n_z x m
    L2: np.ndarray          # plant-observer gain, n x p
    lambda0: float

    def __post_init__(self):
        object.__setattr__(self, "K", np.atleast_2d(np.asarray(self.K, dtype=float)))
        object.__setattr__(self, "L", np.atleast_2d(np.asarray(self.L, dtype=float)))
        object.__setattr__(self, "L2", np.atleast_2d(np.asarray(self.L2, dtype=float)))
        if self.lambda0 >= 0:
            raise ConfigurationError(f"lambda0 must have negative real part, got {self.lambda0}")

    @property
    def az_norm(self) -> float:
        return spectral_norm(self.aux.A)

    @property
    def czbz_norm(self) -> float:
        return spectral_norm(self.aux.C @ self.aux.B)


@dataclass(frozen=True)
class LmiScanEntry:
    q_exponent: int
    max_eig: float
    min_eig_P: float


@dataclass(frozen=True)
class FeasibilityReport:
    """Outcome of one LMI scan, with the certified P when one exists."""

    name: str
    feasible: bool
    certified_P: np.ndarray | None
    certified_max_eig: float | None
    scanned: tuple
    diagnosis: str
    diagnostics: dict = field(default_factory=dict)

    def summary(self) -> str:
        lines = [f"[{self.name}] feasible: {self.feasible}"]
        for e in self.scanned:
            lines.append(
                f"  Q = I*10^{e.q_exponent:+d}: max eig(Pi) = {e.max_eig: .6g}, "
                f"min eig(P) = {e.min_eig_P:.6g}")
        if self.feasible:
            lines.append(f"  certified max eig = {self.certified_max_eig:.6g}")
        lines.append(f"  {self.diagnosis}")
        for k, v in self.diagnostics.items():
            lines.append(f"  {k} = {v}")
        return "\n".join(lines)


def build_augmented(plant: LtiSystem, bundle: DesignBundle):
    """Block matrices of the augmented error dynamics (A_eta, B_eta, B_a).

    State order is (x, z, z_tilde); the forcing splits into the event errors
    e = (e_y, e_z) and the attacks a = (a_u, a_z held).
    """
    A, B, C = plant.A, plant.B, plant.C
    Az, Bz, Cz = bundle.aux.A, bundle.aux.B, bundle.aux.C
    K, L = bundle.K, bundle.L
    n, m, p = plant.n, plant.m, plant.p
    nz = bundle.aux.n
    if K.shape != (m, p):
        raise ConfigurationError(f"K must be {m}x{p}, got {K.shape}")
    if L.shape != (nz, bundle.aux.p):
        raise ConfigurationError(f"L must be {nz}x{bundle.aux.p}, got {L.shape}")
    if Bz.shape[1] != m:
        raise ConfigurationError(
            f"auxiliary input dimension {Bz.shape[1]} differs from plant's {m}")
    A_eta = np.block([
        [A + B @ K @ C, np.zeros((n, nz)), np.zeros((n, nz))],
        [Bz @ K @ C, Az, np.zeros((nz, nz))],
        [np.zeros((nz, n)), np.zeros((nz, nz)), Az + L @ Cz],
    ])
    B_eta = np.block([
        [B @ K, np.zeros((n, bundle.aux.p))],
        [Bz @ K, np.zeros((nz, bundle.aux.p))],
        [np.zeros((nz, p)), L],
    ])
    B_a = np.block([
        [B, np.zeros((n, bundle.aux.p))],
        [Bz, np.zeros((nz, bundle.aux.p))],
        [np.zeros((nz, m)), L],
    ])
    return A_eta, B_eta, B_a


def _scan_lmi(A_stab: np.ndarray, assemble, name: str, diagnostics: dict) -> FeasibilityReport:
    """Shared scan: P from A_stab^T P + P A_stab = -I*10^k, then eigencheck."""
    entries = []
    certified = None
    cert_eig = None
    for k in _Q_EXPONENTS:
        Q = np.eye(A_stab.shape[0]) * 10.0 ** k
        P = solve_lyapunov(A_stab, Q)
        Pi = assemble(P)
        Pi = 0.5 * (Pi + Pi.T)
        max_eig = float(np.linalg.eigvalsh(Pi).max())
        min_p = float(np.linalg.eigvalsh(P).min())
        entries.append(LmiScanEntry(k, max_eig, min_p))
        if max_eig < 0.0 and certified is None:
            certified = P
            cert_eig = max_eig
    if certified is not None:
        diag = "certified by independent eigenvalue check"
    else:
        diag = ("no scanned candidate satisfies the inequality; the scan is a "
                "sufficient check only -- see the recorded entries")
    return FeasibilityReport(
        name=name,
        feasible=certified is not None,
        certified_P=certified,
        certified_max_eig=cert_eig,
        scanned=tuple(entries),
        diagnosis=diag,
        diagnostics=diagnostics,
    )


def verify_boundedness_lmi(plant: LtiSystem, bundle: DesignBundle,
                           sigma: float, c1: float, c2: float, delta: float,
                           eps: float, eps2: float) -> dict:
    """Scan-and-certify the closed-loop boundedness LMI.

    The block inequality being certified is

        [ -P/2 + delta F3' Cz' Cz F3        P B_eta           ]
        [ *                       -(1-c2) F'F - F2'F2         ]  < 0

    with selector matrices F = [I 0], F2 = [0 I], F3 = [0 I 0].  The e_y
    coefficient in the lower-right block is ambiguous between the two sign
    conventions -(1-c2) and -(1+c2); both are evaluated and returned under
    the keys ``"one_minus_c2"`` and ``"one_plus_c2"``.  Each report carries
    the decay-rate diagnostics beta = min(lambda_min(P)/2, c1 - sigma) and
    eps3 = eps + eps2 of the underlying estimate; the resulting ultimate
    bound 2*eps3/beta is a loose certificate and is reported, not enforced.

    Raises
    ------
    InfeasibleError
        If the augmented matrix is not Hurwitz (precondition for any P).
    """
    A_eta, B_eta, _ = build_augmented(plant, bundle)
    if not is_hurwitz(A_eta):
        bad = max(np.real(eigenvalues(A_eta)))
        raise InfeasibleError(
            f"augmented matrix not Hurwitz (max Re eig = {bad:.4g}); "
            "choose K and L so that it is")
    n, p = plant.n, plant.p
    nz = bundle.aux.n
    Cz = bundle.aux.C
    F = np.hstack([np.eye(p), np.zeros((p, bundle.aux.p))])
    F2 = np.hstack([np.zeros((bundle.aux.p, p)), np.eye(bundle.aux.p)])
    F3 = np.hstack([np.zeros((nz, n)), np.eye(nz), np.zeros((nz, nz))])

    P0 = solve_lyapunov(A_eta, np.eye(A_eta.shape[0]))
    beta = min(0.5 * float(np.linalg.eigvalsh(P0).min()), c1 - sigma)
    diagnostics = {
        "beta": beta,
        "eps3": eps + eps2,
        "ultimate_bound_2eps3_over_beta": 2.0 * (eps + eps2) / beta,
    }

    reports = {}
    for key, ey_coeff in (("one_minus_c2", -(1.0 - c2)),
                          ("one_plus_c2", -(1.0 + c2))):
        lower_right = ey_coeff * F.T @ F - F2.T @ F2

        def assemble(P, lr=lower_right):
            return np.block([[-0.5 * P + delta * F3.T @ Cz.T @ Cz @ F3, P @ B_eta],
                             [B_eta.T @ P, lr]])

        reports[key] = _scan_lmi(A_eta, assemble,
                                 f"boundedness LMI ({key} sign)", dict(diagnostics))
    return reports


def verify_observer_lmi(plant: LtiSystem, L2, c2: float) -> FeasibilityReport:
    """Scan-and-certify the plant-observer LMI [[-P/2, P L2], [*, -(1+c2) I]] < 0.

    Raises
    ------
    InfeasibleError
        If A + L2 C is not Hurwitz.
    """
    L2 = np.atleast_2d(np.asarray(L2, dtype=float))
    if L2.shape != (plant.n, plant.p):
        raise ConfigurationError(f"L2 must be {plant.n}x{plant.p}, got {L2.shape}")
    A_tilde = plant.A + L2 @ plant.C
    if not is_hurwitz(A_tilde):
        bad = max(np.real(eigenvalues(A_tilde)))
        raise InfeasibleError(
            f"A + L2 C not Hurwitz (max Re eig = {bad:.4g}); pick another L2")
    p = plant.p

    def assemble(P):
        return np.block([[-0.5 * P, P @ L2],
                         [L2.T @ P, -(1.0 + c2) * np.eye(p)]])

    return _scan_lmi(A_tilde, assemble, "plant-observer LMI", {})


def design_gains(plant: LtiSystem, lambda0: float = -1.0,
                 K=None, L=None, L2=None,
                 seed: int = 0, budget: int = 10_000) -> DesignBundle:
    """Build a DesignBundle: A_z = lambda0*I_m, B_z = C_z = I_m, gains checked.

    Supplied gains are validated and accepted; missing ones are synthesized:
    K by a randomized static-output-feedback search scored by the spectral
    abscissa of A + B K C (zero gain is tried first, so open-loop-stable
    plants get K = 0), L = -I (with C_z = I any shift below -lambda0 works),
    and L2 = -c*C^T scanned over a few magnitudes.

    Raises
    ------
    DesignError
        If a supplied gain fails its Hurwitz check, or no stabilizing K is
        found within the sample budget; supply gains explicitly in that case.
    """
    if lambda0 >= 0:
        raise ConfigurationError(f"lambda0 must be negative, got {lambda0}")
    m = plant.m
    aux = LtiSystem(lambda0 * np.eye(m), np.eye(m), np.eye(m))

    if K is not None:
        K = np.atleast_2d(np.asarray(K, dtype=float))
        if K.shape != (m, plant.p):
            raise ConfigurationError(f"K must be {m}x{plant.p}, got {K.shape}")
        if not is_hurwitz(plant.A + plant.B @ K @ plant.C):
            raise DesignError("supplied K does not make A + BKC Hurwitz")
    else:
        K = _search_output_feedback(plant, seed, budget)

    if L is not None:
        L = np.atleast_2d(np.asarray(L, dtype=float))
        if not is_hurwitz(aux.A + L @ aux.C):
            raise DesignError("supplied L does not make A_z + L C_z Hurwitz")
    else:
        L = -np.eye(m)

    if L2 is not None:
        L2 = np.atleast_2d(np.asarray(L2, dtype=float))
        if not is_hurwitz(plant.A + L2 @ plant.C):
            raise DesignError("supplied L2 does not make A + L2 C Hurwitz")
    else:
        L2 = None
        for scale in (1.0, 0.1, 10.0, 0.01, 100.0):
            cand = -scale * plant.C.T
            if is_hurwitz(plant.A + cand @ plant.C):
                L2 = cand
                break
        if L2 is None:
            raise DesignError("no output-injection gain -c*C^T stabilizes the plant "
                              "observer; supply L2 explicitly")

    bundle = DesignBundle(aux=aux, K=K, L=L, L2=L2, lambda0=lambda0)
    A_eta, _, _ = build_augmented(plant, bundle)
    if not is_hurwitz(A_eta):
        raise DesignError("assembled augmented matrix is not Hurwitz")
    return bundle


def _search_output_feedback(plant: LtiSystem, seed: int, budget: int) -> np.ndarray:
    """Randomized search for K with A + BKC Hurwitz (zero gain tried first)."""
    m, p = plant.m, plant.p
    zero = np.zeros((m, p))
    if is_hurwitz(plant.A + plant.B @ zero @ plant.C):
        return zero
    rng = np.random.default_rng(seed)
    best_abscissa = np.inf
    for _ in range(budget):
        scale = 10.0 ** rng.uniform(-3, 2)
        K = rng.standard_normal((m, p)) * scale
        absc = float(np.max(np.real(eigenvalues(plant.A + plant.B @ K @ plant.C))))
        if absc < best_abscissa:
            best_abscissa = absc
        if absc < 0:
            return K
    raise DesignError(
        f"no stabilizing static output feedback found in {budget} samples "
        f"(best spectral abscissa {best_abscissa:.4g}); supply K explicitly")


def zeno_bound(az_norm: float, delta: float, eps2: float, M: float) -> float:
    """Guaranteed minimum auxiliary inter-event time for rate bound M > 0."""
    if M <= 0:
        raise ConfigurationError(f"M must be positive, got {M}")
    if az_norm <= 0:
        raise ConfigurationError(f"az_norm must be positive, got {az_norm}")
    M2 = budget_s(0.0, delta, eps2)
    return float(np.log(az_norm * M2 / M + 1.0) / az_norm)
