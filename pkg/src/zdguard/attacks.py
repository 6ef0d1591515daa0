"""Attack signal generators for every channel.

Input channel: the zero-dynamics exponential a0 * exp(s0 (t - t_on)), or a
constant bias for the non-zero-dynamics comparison runs.

Auxiliary channel (false data injected at event times, held between events):

* ``naive_negation`` -- a_z(t_j) = -a_u(t_j), an attacker without knowledge of
  the auxiliary dynamics;
* ``covert`` -- the attacker simulates the auxiliary dynamics driven by its
  own input attack,

      dx_a/dt = A_z x_a + B_z a_u,      a_z = -C_z x_a,

  which removes a_u's signature from the received auxiliary output exactly.

Output channel: optional additive bias on the transmitted samples, used to
exercise the non-zero-dynamics row of the isolation table.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace

import numpy as np

from .errors import ConfigurationError
from .linalg import LtiSystem, StateVector, integrate_step
from .zeros import ZeroData, zd_signal

__all__ = [
    "AttackScenario",
    "a_u",
    "a_y",
    "covert_step",
    "a_z_at_event",
    "stealth_equality_gap",
    "INPUT_KINDS",
    "AUX_KINDS",
]

INPUT_KINDS = ("none", "zd", "bias")
AUX_KINDS = ("none", "naive_negation", "covert")


@dataclass
class AttackScenario:
    """Which channels are attacked, with which generator and parameters.

    The zero-dynamics attack is the pair (state direction, exponential
    input): with ``zd_state_offset`` set (default), the plant state acquires
    the x0 offset at the onset instant, which by superposition keeps the
    output exactly on its attack-free trajectory while the state diverges.
    Clearing the flag injects the input signal alone, leaving the decaying
    output transient of a mid-run launch.

    ``covert_dynamics`` is the (A_z, B_z, C_z) triple the covert attacker
    replicates; it is normally the designed auxiliary system.  The generator
    uses B_z as the input matrix: that is the only choice that cancels a_u's
    effect on y_z exactly.  ``covert_use_plant_b`` switches to the plant's B
    when its shape permits, for comparison runs.
    """

    input_kind: str = "none"
    zd: ZeroData | None = None
    start_time: float = 10.0
    zd_state_offset: bool = True
    bias: np.ndarray | None = None
    aux_kind: str = "none"
    covert_dynamics: LtiSystem | None = None
    covert_use_plant_b: bool = False
    plant_b: np.ndarray | None = None
    output_bias: np.ndarray | None = None
    x_a: StateVector | None = None

    def __post_init__(self):
        if self.input_kind not in INPUT_KINDS:
            raise ConfigurationError(f"input_kind must be one of {INPUT_KINDS}")
        if self.aux_kind not in AUX_KINDS:
            raise ConfigurationError(f"aux_kind must be one of {AUX_KINDS}")
        if self.start_time < 0:
            raise ConfigurationError(f"start_time must be >= 0, got {self.start_time}")
        if self.input_kind == "zd" and self.zd is None:
            raise ConfigurationError("input_kind 'zd' requires zero data")
        if self.input_kind == "bias" and self.bias is None:
            raise ConfigurationError("input_kind 'bias' requires a bias vector")
        if self.bias is not None:
            self.bias = np.atleast_1d(np.asarray(self.bias, dtype=float))
        if self.output_bias is not None:
            self.output_bias = np.atleast_1d(np.asarray(self.output_bias, dtype=float))
        if self.aux_kind == "covert":
            if self.covert_dynamics is None:
                raise ConfigurationError("covert attack requires the auxiliary dynamics")
            nz = self.covert_dynamics.n
            if self.x_a is None:
                self.x_a = StateVector(np.zeros(nz))
            elif self.x_a.values.shape[0] != nz:
                raise ConfigurationError(
                    f"covert state dimension {self.x_a.values.shape[0]} != {nz}")

    def input_dim(self, m: int) -> int:
        return m

    def covert_input_matrix(self) -> np.ndarray:
        """Input matrix of the covert generator (B_z, or the plant's B on request)."""
        Bz = self.covert_dynamics.B
        if self.covert_use_plant_b:
            if self.plant_b is None:
                raise ConfigurationError("covert_use_plant_b requires plant_b")
            Bp = np.asarray(self.plant_b, dtype=float)
            if Bp.shape != Bz.shape:
                raise ConfigurationError(
                    f"plant B {Bp.shape} does not fit the covert state; need {Bz.shape}")
            return Bp
        return Bz


def attack_rate(scn: AttackScenario) -> float:
    """Exponential growth rate of the input-channel attack (0 unless ZD)."""
    if scn.input_kind == "zd":
        return float(np.real(complex(scn.zd.s0)))
    return 0.0


def a_u(scn: AttackScenario, t: float, m: int) -> np.ndarray:
    """Input-channel attack sample at time t (zero before the onset)."""
    if scn.input_kind == "none" or t < scn.start_time:
        return np.zeros(m)
    if scn.input_kind == "zd":
        return np.atleast_1d(zd_signal(scn.zd, t - scn.start_time))
    out = scn.bias
    if out.shape[0] != m:
        raise ConfigurationError(f"bias has dimension {out.shape[0]}, expected {m}")
    return out


def a_y(scn: AttackScenario, t: float, p: int) -> np.ndarray:
    """Output-channel additive bias at time t (zero before the onset)."""
    if scn.output_bias is None or t < scn.start_time:
        return np.zeros(p)
    if scn.output_bias.shape[0] != p:
        raise ConfigurationError(
            f"output bias has dimension {scn.output_bias.shape[0]}, expected {p}")
    return scn.output_bias


def covert_step(scn: AttackScenario, a_u_now, dt: float) -> AttackScenario:
    """Advance the covert attacker's internal state one RK4 step."""
    if scn.aux_kind != "covert":
        raise ConfigurationError("covert_step requires aux_kind == 'covert'")
    aux = scn.covert_dynamics
    gen = LtiSystem(aux.A, scn.covert_input_matrix(), aux.C)
    return replace(scn, x_a=integrate_step(gen, scn.x_a, a_u_now, dt))


def a_z_at_event(scn: AttackScenario, a_u_now, t_j: float) -> np.ndarray:
    """Auxiliary-channel injection at the event time t_j, held until the next event."""
    a_u_now = np.atleast_1d(np.asarray(a_u_now, dtype=float))
    if scn.aux_kind == "none":
        return np.zeros_like(a_u_now)
    if scn.aux_kind == "naive_negation":
        return -a_u_now
    return -(scn.covert_dynamics.C @ scn.x_a.values)


def stealth_equality_gap(plant_side_ratio: float, cc_ratio: float) -> float:
    """|s_j/omega_j - s_i^C/omega_i^C| between the two scheduled intervals.

    Strictly positive whenever a nonzero input attack shifts the plant-side
    rate bound; this is the quantity the trigger-time residual measures.
    """
    return abs(float(plant_side_ratio) - float(cc_ratio))
