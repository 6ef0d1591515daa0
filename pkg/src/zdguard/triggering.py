"""Event conditions for the two communication channels.

Output channel: dynamic event triggering.  Transmit y when the squared event
error reaches sigma * g(t), where the threshold variable g obeys

    dg/dt = -c1 g - c2 ||e_y||^2 + eps,      c1 > 1, 0 < c2 < 1, eps > 0.

With g(0) > eps/c1 the threshold stays above eps/(c1 + sigma c2) > 0 forever,
so the trigger never degenerates.

Auxiliary channel: self triggering.  At each event the sensor budgets the
admissible error growth

    s_j = (||y_z(t_j)|| + sqrt(2 eps2)) / sqrt(4 + 4 delta^2)

bounds the error rate by omega_j = ||A_z|| s_j + M with
M = ||A_z|| ||y_z(t_j)|| + ||C_z B_z|| ||u*||, and books the next transmission
at t_j + s_j / omega_j.  When the control input changes mid-interval the
remaining budget is re-spent against the new rate bound.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from .errors import ConfigurationError

__all__ = [
    "DynamicEventState",
    "SelfTriggerState",
    "update_g",
    "output_event_violated",
    "record_output_event",
    "self_trigger_schedule",
    "self_trigger_recompute_on_control_update",
    "g_floor",
    "budget_s",
]


@dataclass(frozen=True)
class DynamicEventState:
    """Per-channel bookkeeping for the dynamic output event condition."""

    g: float
    sigma: float
    c1: float
    c2: float
    eps: float
    last_sent_y: np.ndarray
    t_k: float = 0.0

    def __post_init__(self):
        if not (0.0 < self.sigma < 1.0):
            raise ConfigurationError(f"sigma must be in (0,1), got {self.sigma}")
        if self.c1 <= 1.0:
            raise ConfigurationError(f"c1 must be > 1, got {self.c1}")
        if not (0.0 < self.c2 < 1.0):
            raise ConfigurationError(f"c2 must be in (0,1), got {self.c2}")
        if self.eps <= 0.0:
            raise ConfigurationError(f"eps must be positive, got {self.eps}")
        object.__setattr__(self, "last_sent_y",
                           np.atleast_1d(np.asarray(self.last_sent_y, dtype=float)))


@dataclass(frozen=True)
class SelfTriggerState:
    """Self-trigger schedule for the auxiliary channel.

    ``yz_norm_at_event`` keeps ||y_z(t_j)|| because the rate bound must be
    rebuilt from the event-time output when the schedule is recomputed.
    ``budget_left``/``anchor_time`` track how much of the error budget s_j is
    still unspent and since when the current rate bound has been charging it,
    so repeated mid-interval control updates account correctly.
    """

    t_j: float
    next_time: float
    s_j: float
    omega_j: float
    delta: float
    eps2: float
    last_sent_yz: np.ndarray
    yz_norm_at_event: float = 0.0
    budget_left: float = 0.0
    anchor_time: float = 0.0

    def __post_init__(self):
        if self.delta <= 1.0:
            raise ConfigurationError(f"delta must be > 1, got {self.delta}")
        if self.eps2 <= 0.0:
            raise ConfigurationError(f"eps2 must be positive, got {self.eps2}")
        object.__setattr__(self, "last_sent_yz",
                           np.atleast_1d(np.asarray(self.last_sent_yz, dtype=float)))


def g_floor(sigma: float, c1: float, c2: float, eps: float) -> float:
    """Lower bound eps / (c1 + sigma*c2) that g(t) never crosses."""
    return eps / (c1 + sigma * c2)


def update_g(state: DynamicEventState, e_y, dt: float) -> DynamicEventState:
    """Advance g one RK4 step of dg/dt = -c1 g - c2 ||e_y||^2 + eps.

    The event error is held constant over the step (it is re-sampled every
    simulation step anyway).
    """
    if dt <= 0:
        raise ConfigurationError(f"dt must be positive, got {dt}")
    e_y = np.atleast_1d(np.asarray(e_y, dtype=float))
    drive = -state.c2 * float(e_y @ e_y) + state.eps
    c1 = state.c1
    g = state.g

    def f(gv):
        return -c1 * gv + drive

    k1 = f(g)
    k2 = f(g + 0.5 * dt * k1)
    k3 = f(g + 0.5 * dt * k2)
    k4 = f(g + dt * k3)
    return replace(state, g=g + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4))


def output_event_violated(state: DynamicEventState, y_now) -> bool:
    """True iff ||y(t_k) - y_now||^2 >= sigma * g, i.e. the channel must fire."""
    y_now = np.atleast_1d(np.asarray(y_now, dtype=float))
    e_y = state.last_sent_y - y_now
    return bool(float(e_y @ e_y) >= state.sigma * state.g)


def record_output_event(state: DynamicEventState, y_now, now: float) -> DynamicEventState:
    """Bookkeeping after a transmission: e_y resets to zero at time ``now``."""
    y_now = np.atleast_1d(np.asarray(y_now, dtype=float))
    return replace(state, last_sent_y=y_now, t_k=now)


def budget_s(yz_norm: float, delta: float, eps2: float) -> float:
    """Error budget (||y_z(t_j)|| + sqrt(2 eps2)) / sqrt(4 + 4 delta^2)."""
    return (yz_norm + np.sqrt(2.0 * eps2)) / np.sqrt(4.0 + 4.0 * delta * delta)


def self_trigger_schedule(state: SelfTriggerState, yz_at_event, u_star_norm: float,
                          az_norm: float, czbz_norm: float, now: float) -> SelfTriggerState:
    """Fresh schedule computed at an auxiliary event occurring at ``now``.

    Raises
    ------
    ConfigurationError
        If az_norm is zero; the design algorithm guarantees a nonzero A_z,
        which makes omega_j strictly positive.
    """
    if az_norm <= 0.0:
        raise ConfigurationError("az_norm must be positive (A_z nonzero by design)")
    yz = np.atleast_1d(np.asarray(yz_at_event, dtype=float))
    yz_norm = float(np.linalg.norm(yz))
    s_j = budget_s(yz_norm, state.delta, state.eps2)
    M = az_norm * yz_norm + czbz_norm * float(u_star_norm)
    omega_j = az_norm * s_j + M
    return replace(
        state,
        t_j=now,
        next_time=now + s_j / omega_j,
        s_j=s_j,
        omega_j=omega_j,
        last_sent_yz=yz,
        yz_norm_at_event=yz_norm,
        budget_left=s_j,
        anchor_time=now,
    )


def self_trigger_recompute_on_control_update(
        state: SelfTriggerState, new_u_star_norm: float, now: float,
        az_norm: float, czbz_norm: float) -> SelfTriggerState:
    """Re-spend the remaining error budget after a mid-interval control update.

    omega_j_old upper-bounds the error rate on the elapsed segment, so
    ``r = s_j - omega_j_old * (now - t_j)`` still bounds the headroom; the new
    rate bound (same s_j, same ||y_z(t_j)||, new ||u*||) spends it.  A
    non-positive r triggers immediately.
    """
    if az_norm <= 0.0:
        raise ConfigurationError("az_norm must be positive (A_z nonzero by design)")
    elapsed = now - state.anchor_time
    if elapsed < 0:
        raise ConfigurationError("recompute time precedes the schedule anchor")
    r = max(0.0, state.budget_left - state.omega_j * elapsed)
    M_new = az_norm * state.yz_norm_at_event + czbz_norm * float(new_u_star_norm)
    omega_new = az_norm * state.s_j + M_new
    return replace(state, next_time=now + r / omega_new, omega_j=omega_new,
                   budget_left=r, anchor_time=now)
