"""Physical-plant half of the loop.

Owns the plant and auxiliary continuous states, the received (held) control
input, the two outgoing channels with their trigger mechanisms, and the
measurement noise applied to output samples.  The attacked input
u* = u + a_u drives both the plant and the auxiliary system; the channel
attacks corrupt only what leaves on the wire, never the local trigger
bookkeeping (triggering hardware is unaffected by false data injection).

This is the step-by-step reference implementation; the simulation engine runs
a fused, compiled version of the same semantics for long horizons.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .attacks import AttackScenario, a_u, a_y, a_z_at_event, attack_rate
from .design import DesignBundle
from .errors import ConfigurationError
from .linalg import LtiSystem, exp_input_map, rk4_propagators
from .triggering import (
    DynamicEventState,
    SelfTriggerState,
    budget_s,
    record_output_event,
    self_trigger_recompute_on_control_update,
    self_trigger_schedule,
    update_g,
)

__all__ = ["NoiseSource", "OutputMessage", "AuxMessage", "PlantSide"]


class NoiseSource:
    """Pre-drawn Gaussian measurement noise, one p-vector per simulation step.

    Drawing the whole sequence up front from one seeded generator keeps runs
    bit-reproducible and lets the reference and compiled paths share samples.
    """

    def __init__(self, seed: int, n_steps: int, p: int, std: float, enabled: bool = True):
        if std < 0:
            raise ConfigurationError(f"noise std must be >= 0, got {std}")
        self.std = std
        self.enabled = enabled and std > 0.0
        if self.enabled:
            rng = np.random.default_rng(seed)
            self.rows = rng.standard_normal((n_steps + 1, p)) * std
        else:
            self.rows = np.zeros((n_steps + 1, p))

    def row(self, i: int) -> np.ndarray:
        return self.rows[i]


@dataclass(frozen=True)
class OutputMessage:
    """Event-triggered output sample as received at the control side."""

    t: float
    y: np.ndarray
    index: int


@dataclass(frozen=True)
class AuxMessage:
    """Self-triggered auxiliary output sample (possibly corrupted on the wire)."""

    t: float
    value: np.ndarray
    index: int
    step: int


def fire_step(next_time: float, sched_step: int, dt: float) -> int:
    """First grid step at which a scheduled (real-valued) time is due.

    Events live on the simulation grid: the emission happens at the first
    grid point at or after ``next_time`` that is strictly later than the step
    the schedule was computed on.  Both sides of the link use this rule, so
    attack-free schedules agree exactly.
    """
    k = int(np.ceil(next_time / dt - 1e-9))
    return max(k, sched_step + 1)


class PlantSide:
    """Plant + auxiliary system with event- and self-triggered channels."""

    def __init__(self, plant: LtiSystem, bundle: DesignBundle, *,
                 sigma: float, c1: float, c2: float, eps: float,
                 delta: float, eps2: float, dt: float,
                 x0=None, z0=None, g0: float | None = None,
                 scenario: AttackScenario | None = None,
                 noise: NoiseSource | None = None):
        self.plant = plant
        self.aux = bundle.aux
        self.dt = dt
        self.az_norm = bundle.az_norm
        self.czbz_norm = bundle.czbz_norm
        self.scenario = scenario if scenario is not None else AttackScenario()
        self.noise = noise
        self.x = np.zeros(plant.n) if x0 is None else np.asarray(x0, dtype=float).copy()
        self.z = np.zeros(self.aux.n) if z0 is None else np.asarray(z0, dtype=float).copy()
        self.held_u = np.zeros(plant.m)
        self.Phi_x, self.Gam_x = rk4_propagators(plant.A, plant.B, dt)
        self.Phi_z, self.Gam_z = rk4_propagators(self.aux.A, self.aux.B, dt)
        # The attack component integrates through its own input map so the
        # exponential signal excites the zero direction without sampling bias.
        rate = attack_rate(self.scenario)
        self.Gam_ax = exp_input_map(plant.A, plant.B, dt, rate)
        self.Gam_az = exp_input_map(self.aux.A, self.aux.B, dt, rate)
        g_init = (2.0 * eps / c1) if g0 is None else g0
        if g_init <= eps / c1:
            raise ConfigurationError(
                f"g(0) = {g_init} must exceed eps/c1 = {eps / c1} for the threshold floor")
        self.trig_out = DynamicEventState(
            g=g_init, sigma=sigma, c1=c1, c2=c2, eps=eps,
            last_sent_y=np.zeros(plant.p), t_k=0.0)
        self.trig_aux = SelfTriggerState(
            t_j=0.0, next_time=0.0, s_j=budget_s(0.0, delta, eps2),
            omega_j=1.0, delta=delta, eps2=eps2,
            last_sent_yz=np.zeros(self.aux.p))
        self.aux_fire_step = 0          # bootstrap event at t = 0
        self.out_event_count = 0
        self.aux_event_count = 0
        self._ey2_for_g = 0.0
        self._offset_applied = False

    def arm_attack(self, step: int) -> None:
        """At the onset instant the zero-dynamics pair adds its state direction.

        Call once per step before the channel checks; a no-op for other
        attack kinds or when the offset is disabled.
        """
        scn = self.scenario
        if (scn.input_kind == "zd" and scn.zd_state_offset
                and not self._offset_applied
                and step * self.dt >= scn.start_time):
            self.x = self.x + np.real(np.asarray(scn.zd.x0))
            self._offset_applied = True

    # -- measurements ------------------------------------------------------

    def measured_y(self, step: int) -> np.ndarray:
        y = self.plant.C @ self.x
        if self.noise is not None:
            y = y + self.noise.row(step)
        return y

    def y_z(self) -> np.ndarray:
        return self.aux.C @ self.z

    def u_star(self, t: float) -> np.ndarray:
        return self.held_u + a_u(self.scenario, t, self.plant.m)

    # -- channel checks (call order: output first, then auxiliary) ----------

    def check_output_channel(self, step: int) -> OutputMessage | None:
        """Fire the output channel when the dynamic event condition is violated.

        On an event the transmitted sample is the (noisy) measurement plus any
        output-channel injection; the local error memory keeps the clean
        sample.  Also latches ||e_y||^2 for this step's threshold update
        (zero after an event, since the error resets).
        """
        t = step * self.dt
        y_meas = self.measured_y(step)
        e_y = self.trig_out.last_sent_y - y_meas
        ey2 = float(e_y @ e_y)
        fire = step == 0 or ey2 >= self.trig_out.sigma * self.trig_out.g
        if not fire:
            self._ey2_for_g = ey2
            return None
        self._ey2_for_g = 0.0
        self.trig_out = record_output_event(self.trig_out, y_meas, t)
        self.out_event_count += 1
        sent = y_meas + a_y(self.scenario, t, self.plant.p)
        return OutputMessage(t=t, y=sent, index=self.out_event_count - 1)

    def aux_due(self, step: int) -> bool:
        return step == self.aux_fire_step

    def emit_aux(self, step: int) -> AuxMessage:
        """Emit at the scheduled step and book the next transmission.

        The fresh schedule uses the true local output y_z(t_j) and the norm of
        the input actually driving the hardware, ||u + a_u|| at the event
        instant (after any same-step control update).
        """
        t = step * self.dt
        yz = self.y_z()
        au_now = a_u(self.scenario, t, self.plant.m)
        sent = yz + a_z_at_event(self.scenario, au_now, t)
        self.trig_aux = self_trigger_schedule(
            self.trig_aux, yz, float(np.linalg.norm(self.held_u + au_now)),
            self.az_norm, self.czbz_norm, t)
        self.aux_fire_step = fire_step(self.trig_aux.next_time, step, self.dt)
        self.aux_event_count += 1
        return AuxMessage(t=t, value=sent, index=self.aux_event_count - 1, step=step)

    def recompute_aux_schedule(self, step: int) -> None:
        """Re-spend the remaining budget after a control update mid-interval."""
        t = step * self.dt
        au_now = a_u(self.scenario, t, self.plant.m)
        self.trig_aux = self_trigger_recompute_on_control_update(
            self.trig_aux, float(np.linalg.norm(self.held_u + au_now)), t,
            self.az_norm, self.czbz_norm)
        self.aux_fire_step = fire_step(self.trig_aux.next_time, step, self.dt)

    def set_held_u(self, u: np.ndarray) -> None:
        self.held_u = np.asarray(u, dtype=float).copy()

    # -- continuous dynamics -------------------------------------------------

    def integrate(self, step: int) -> None:
        """Advance x, z, and the event threshold over [t, t+dt] (held inputs)."""
        t = step * self.dt
        au = a_u(self.scenario, t, self.plant.m)
        self.x = self.Phi_x @ self.x + self.Gam_x @ self.held_u + self.Gam_ax @ au
        self.z = self.Phi_z @ self.z + self.Gam_z @ self.held_u + self.Gam_az @ au
        ey = np.sqrt(self._ey2_for_g)
        self.trig_out = update_g(self.trig_out, np.array([ey]), self.dt)

    def e_z(self) -> np.ndarray:
        """Current auxiliary event error y_z(t_j) - y_z(t) (true values)."""
        return self.trig_aux.last_sent_yz - self.y_z()
