"""Command & control half of the loop.

Hosts the output-feedback controller u = K y(t_k), a Luenberger observer for
the auxiliary state driven by the received (possibly corrupted) channel
value, a plant-state observer for isolation, and a replica of the auxiliary
system driven by u alone.  From the replica it computes, independently of the
plant, when the next auxiliary transmission should arrive; the gap between
computed and actual arrival is the trigger-time residual that exposes
zero-dynamics attacks even when the channel value itself is made consistent.

Residuals:
    res_z = ||received y_z - C_z z_hat||     (observer discrepancy)
    dis_t = expected arrival - actual arrival (seconds, on the grid)
    res_x = ||received y    - C   x_hat||     (isolation residual)
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

from .design import DesignBundle
from .errors import ConfigurationError
from .linalg import LtiSystem, rk4_propagators
from .plant import AuxMessage, OutputMessage, fire_step
from .triggering import (
    SelfTriggerState,
    budget_s,
    self_trigger_recompute_on_control_update,
    self_trigger_schedule,
)

__all__ = ["Verdict", "ResidualRecord", "CommandCenter", "isolate"]


class Verdict(enum.Enum):
    NO_ATTACK = "no-attack"
    NON_ZD_ATTACK = "non-ZD attack"
    ZD_ATTACK = "ZD attack"
    ZD_COVERT_AUX = "ZD attack with covert aux channel"
    UNCLASSIFIED = "unclassified"


def isolate(res_x_alarm: bool, res_z_alarm: bool, dis_t_alarm: bool) -> Verdict:
    """Isolation truth table over the three alarm flags.

    Combinations outside the four designed rows are surfaced as UNCLASSIFIED
    rather than guessed.
    """
    table = {
        (False, False, False): Verdict.NO_ATTACK,
        (True, True, True): Verdict.NON_ZD_ATTACK,
        (False, True, True): Verdict.ZD_ATTACK,
        (False, False, True): Verdict.ZD_COVERT_AUX,
    }
    return table.get((bool(res_x_alarm), bool(res_z_alarm), bool(dis_t_alarm)),
                     Verdict.UNCLASSIFIED)


@dataclass(frozen=True)
class ResidualRecord:
    """Timestamped residual values with their alarm flags and verdict."""

    t: float
    res_z: float
    dis_t: float
    res_x: float
    res_z_alarm: bool
    dis_t_alarm: bool
    res_x_alarm: bool
    verdict: Verdict


class CommandCenter:
    """Controller, observers, replica auxiliary system, and residual generators."""

    def __init__(self, plant: LtiSystem, bundle: DesignBundle, *,
                 delta: float, eps2: float, dt: float,
                 gamma_z: float, gamma_x: float, latency_threshold: float = 0.0,
                 z0=None, zhat0=None, xhat0=None):
        if gamma_z <= 0 or gamma_x <= 0:
            raise ConfigurationError("residual thresholds must be positive")
        if latency_threshold < 0:
            raise ConfigurationError("latency threshold must be >= 0")
        self.plant = plant
        self.aux = bundle.aux
        self.K, self.L, self.L2 = bundle.K, bundle.L, bundle.L2
        self.dt = dt
        self.az_norm = bundle.az_norm
        self.czbz_norm = bundle.czbz_norm
        self.gamma_z = gamma_z
        self.gamma_x = gamma_x
        self.latency_threshold = latency_threshold
        nz, n, p, m = self.aux.n, plant.n, plant.p, plant.m
        # Replica must start from the auxiliary system's initial state.
        self.z_C = np.zeros(nz) if z0 is None else np.asarray(z0, dtype=float).copy()
        self.z_hat = np.zeros(nz) if zhat0 is None else np.asarray(zhat0, dtype=float).copy()
        self.x_hat = np.zeros(n) if xhat0 is None else np.asarray(xhat0, dtype=float).copy()
        self.held_y = np.zeros(p)
        self.held_yz_star = np.zeros(self.aux.p)
        self.u = np.zeros(m)
        # z_hat observer: inputs (u, received y_z*).
        self.Phi_zh, Gam_zh = rk4_propagators(
            self.aux.A + self.L @ self.aux.C,
            np.hstack([self.aux.B, -self.L]), dt)
        self.Gam_zh_u, self.Gam_zh_y = Gam_zh[:, :m], Gam_zh[:, m:]
        # x_hat observer: inputs (u, received y).
        self.Phi_xh, Gam_xh = rk4_propagators(
            plant.A + self.L2 @ plant.C,
            np.hstack([plant.B, -self.L2]), dt)
        self.Gam_xh_u, self.Gam_xh_y = Gam_xh[:, :m], Gam_xh[:, m:]
        # Replica auxiliary system: input u only, no correction term.
        self.Phi_zc, self.Gam_zc = rk4_propagators(self.aux.A, self.aux.B, dt)
        self.sched = SelfTriggerState(
            t_j=0.0, next_time=0.0, s_j=budget_s(0.0, delta, eps2),
            omega_j=1.0, delta=delta, eps2=eps2,
            last_sent_yz=np.zeros(self.aux.p))
        self.expected_fire_step = 0
        self.last_dis_t = 0.0
        self.event_count = 0

    # -- message handling ----------------------------------------------------

    def receive_output(self, msg: OutputMessage) -> None:
        """Latch the received output sample and update the controller."""
        self.held_y = np.asarray(msg.y, dtype=float).copy()
        self.u = self.K @ self.held_y

    def receive_aux(self, msg: AuxMessage) -> float:
        """Latch the received auxiliary value; compare and refresh the schedule.

        The trigger-time residual is (expected - actual) arrival on the shared
        clock.  The replica re-anchors at the arrival: its own output and the
        norm of u (the only input it knows) rebuild the budget and rate bound
        with the same formulas the plant uses.
        """
        self.held_yz_star = np.asarray(msg.value, dtype=float).copy()
        dis = (self.expected_fire_step - msg.step) * self.dt
        self.last_dis_t = dis
        yzc = self.aux.C @ self.z_C
        self.sched = self_trigger_schedule(
            self.sched, yzc, float(np.linalg.norm(self.u)),
            self.az_norm, self.czbz_norm, msg.t)
        self.expected_fire_step = fire_step(self.sched.next_time, msg.step, self.dt)
        self.event_count += 1
        return dis

    def recompute_schedule(self, step: int) -> None:
        """Mirror of the plant-side budget recomputation at an output event."""
        t = step * self.dt
        self.sched = self_trigger_recompute_on_control_update(
            self.sched, float(np.linalg.norm(self.u)), t,
            self.az_norm, self.czbz_norm)
        self.expected_fire_step = fire_step(self.sched.next_time, step, self.dt)

    # -- continuous dynamics ---------------------------------------------------

    def observer_step(self) -> None:
        """Advance z_hat, x_hat and the replica one step (held inputs)."""
        self.z_hat = (self.Phi_zh @ self.z_hat + self.Gam_zh_u @ self.u
                      + self.Gam_zh_y @ self.held_yz_star)
        self.x_hat = (self.Phi_xh @ self.x_hat + self.Gam_xh_u @ self.u
                      + self.Gam_xh_y @ self.held_y)
        self.z_C = self.Phi_zc @ self.z_C + self.Gam_zc @ self.u

    # -- residuals -------------------------------------------------------------

    def residuals(self, t: float) -> ResidualRecord:
        res_z = float(np.linalg.norm(self.held_yz_star - self.aux.C @ self.z_hat))
        res_x = float(np.linalg.norm(self.held_y - self.plant.C @ self.x_hat))
        rz = res_z > self.gamma_z
        rx = res_x > self.gamma_x
        rt = abs(self.last_dis_t) > self.latency_threshold
        return ResidualRecord(
            t=t, res_z=res_z, dis_t=self.last_dis_t, res_x=res_x,
            res_z_alarm=rz, dis_t_alarm=rt, res_x_alarm=rx,
            verdict=isolate(rx, rz, rt))
