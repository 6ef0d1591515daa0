"""Lockstep simulation engine.

``run`` advances the plant side and the command center on one shared clock
(zero transport latency), injecting attacks and measurement noise, recording
the full trace, and evaluating the runtime invariant monitors:

* threshold floor: g(t) > eps / (c1 + sigma c2) at every grid point;
* output event condition satisfied at every inter-event sample;
* auxiliary event condition (quadratic form) at every inter-event sample,
  enforced for attack-free runs, where the guarantee holds;
* Zeno exclusion: the smallest auxiliary inter-event gap is at least the
  guaranteed bound evaluated at the largest observed rate constant M, and the
  smallest output gap is positive.

Two runs with equal configs produce bit-identical traces: the noise sequence
is pre-drawn from the seeded generator and every step is deterministic.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace

import numpy as np

from . import _kernel
from .attacks import AttackScenario, a_u
from .center import CommandCenter, Verdict, isolate
from .design import DesignBundle, zeno_bound
from .errors import ConfigurationError
from .linalg import LtiSystem, exp_input_map, rk4_propagators
from .plant import NoiseSource, PlantSide

__all__ = ["SimConfig", "SimTrace", "MonitorReport", "run", "batch", "run_reference"]

_VERDICT_BY_CODE = {
    0: Verdict.NO_ATTACK,
    1: Verdict.NON_ZD_ATTACK,
    2: Verdict.ZD_ATTACK,
    3: Verdict.ZD_COVERT_AUX,
    4: Verdict.UNCLASSIFIED,
}


@dataclass(frozen=True)
class SimConfig:
    """Full description of one deterministic run."""

    plant: LtiSystem
    bundle: DesignBundle
    scenario: AttackScenario = field(default_factory=AttackScenario)
    dt: float = 1e-3
    horizon: float = 100.0
    seed: int = 42
    noise_enabled: bool = True
    noise_std: float = 0.1
    sigma: float = 0.1
    c1: float = 10.0
    c2: float = 0.5
    eps: float = 1e-4
    delta: float = 20.0
    eps2: float = 1e-4
    gamma_z: float = 0.01
    gamma_x: float = 1.0
    latency_threshold: float = 0.0
    x0: np.ndarray | None = None
    z0: np.ndarray | None = None
    zhat0: np.ndarray | None = None
    xhat0: np.ndarray | None = None
    g0: float | None = None
    divergence_cap: float = 1e9
    record_every: int = 1
    preset: str | None = None
    label: str = ""

    def __post_init__(self):
        if self.dt <= 0:
            raise ConfigurationError(f"dt must be positive, got {self.dt}")
        if self.horizon < 0:
            raise ConfigurationError(f"horizon must be >= 0, got {self.horizon}")
        if self.horizon > 0 and self.dt > self.horizon:
            raise ConfigurationError(
                f"dt = {self.dt} must not exceed the horizon = {self.horizon}")
        if not (0.0 < self.sigma < 1.0):
            raise ConfigurationError(f"sigma must be in (0,1), got {self.sigma}")
        if self.c1 <= 1.0:
            raise ConfigurationError(f"c1 must be > 1, got {self.c1}")
        if not (0.0 < self.c2 < 1.0):
            raise ConfigurationError(f"c2 must be in (0,1), got {self.c2}")
        if self.delta <= 1.0:
            raise ConfigurationError(f"delta must be > 1, got {self.delta}")
        if self.eps <= 0 or self.eps2 <= 0:
            raise ConfigurationError("eps and eps2 must be positive")
        if self.gamma_z <= 0 or self.gamma_x <= 0:
            raise ConfigurationError("residual thresholds must be positive")
        if self.latency_threshold < 0:
            raise ConfigurationError("latency threshold must be >= 0")
        if self.noise_std < 0:
            raise ConfigurationError("noise std must be >= 0")
        if self.divergence_cap <= 0:
            raise ConfigurationError("divergence cap must be positive")
        if int(self.record_every) < 1:
            raise ConfigurationError("record_every must be >= 1")
        for name, vec, dim in (("x0", self.x0, self.plant.n),
                               ("z0", self.z0, self.bundle.aux.n),
                               ("zhat0", self.zhat0, self.bundle.aux.n),
                               ("xhat0", self.xhat0, self.plant.n)):
            if vec is not None:
                arr = np.atleast_1d(np.asarray(vec, dtype=float))
                if arr.shape[0] != dim:
                    raise ConfigurationError(f"{name} must have dimension {dim}")
                object.__setattr__(self, name, arr)
        g_floor = self.eps / self.c1
        if self.g0 is not None and self.g0 <= g_floor:
            raise ConfigurationError(
                f"g0 = {self.g0} must exceed eps/c1 = {g_floor}")

    @property
    def n_steps(self) -> int:
        return int(round(self.horizon / self.dt))

    @property
    def g_init(self) -> float:
        return (2.0 * self.eps / self.c1) if self.g0 is None else self.g0

    @property
    def attack_free(self) -> bool:
        s = self.scenario
        return (s.input_kind == "none" and s.aux_kind == "none"
                and s.output_bias is None)

    def g_floor(self) -> float:
        return self.eps / (self.c1 + self.sigma * self.c2)


@dataclass(frozen=True)
class MonitorReport:
    """Online invariant checks evaluated over a completed run."""

    g_floor: float
    min_g: float
    g_floor_ok: bool
    out_cond_min_margin: float
    out_cond_ok: bool
    aux_cond_min_margin: float
    aux_cond_ok: bool
    aux_cond_enforced: bool       # guarantee holds only attack-free
    min_aux_gap: float
    min_out_gap: float
    max_M: float
    zeno_bound_at_max_M: float
    zeno_ok: bool

    @property
    def all_ok(self) -> bool:
        required = self.g_floor_ok and self.out_cond_ok and self.zeno_ok
        if self.aux_cond_enforced:
            required = required and self.aux_cond_ok
        return required

    def lines(self) -> list:
        return [
            f"g floor:        min g = {self.min_g:.6e} > {self.g_floor:.6e}: {self.g_floor_ok}",
            f"output event:   min inter-event margin = {self.out_cond_min_margin:.3e}: {self.out_cond_ok}",
            f"aux event:      min quadratic margin = {self.aux_cond_min_margin:.3e}: "
            f"{self.aux_cond_ok} (enforced: {self.aux_cond_enforced})",
            f"zeno:           min aux gap = {self.min_aux_gap:.6g} s >= "
            f"bound {self.zeno_bound_at_max_M:.6g} s at max M = {self.max_M:.6g}; "
            f"min output gap = {self.min_out_gap:.6g} s: {self.zeno_ok}",
        ]


@dataclass
class SimTrace:
    """Recorded time series, event logs, monitors, and the run verdict."""

    config: SimConfig
    t: np.ndarray
    x: np.ndarray
    z: np.ndarray
    z_hat: np.ndarray
    z_C: np.ndarray
    x_hat: np.ndarray
    g: np.ndarray
    u: np.ndarray
    u_star: np.ndarray
    y: np.ndarray
    y_z: np.ndarray
    res_z: np.ndarray
    dis_t: np.ndarray
    res_x: np.ndarray
    alarms: np.ndarray          # (n_rec, 3) int8: res_x, res_z, dis_t
    verdicts: np.ndarray        # (n_rec,) int8 codes
    out_event_flag: np.ndarray
    aux_event_flag: np.ndarray
    output_events: dict
    aux_events: dict
    monitors: MonitorReport
    status: str
    steps_done: int
    max_state_norm: float
    max_res_z: float
    max_res_x: float
    max_abs_dis_t: float
    latched_res_x: bool
    latched_res_z: bool
    latched_dis_t: bool
    first_res_z_alarm: float
    first_res_x_alarm: float
    first_dis_t_alarm: float

    @property
    def run_verdict(self) -> Verdict:
        return isolate(self.latched_res_x, self.latched_res_z, self.latched_dis_t)

    @property
    def verdict_labels(self) -> list:
        return [_VERDICT_BY_CODE[int(c)].value for c in self.verdicts]

    @property
    def diverged(self) -> bool:
        return self.status == "diverged"


def _encode_scenario(config: SimConfig):
    scn = config.scenario
    m = config.plant.m
    kinds = {"none": 0, "zd": 1, "bias": 2}
    in_kind = kinds[scn.input_kind]
    a_vec = np.zeros(m)
    a_rate = 0.0
    zd_x0 = np.zeros(config.plant.n)
    if scn.input_kind == "zd":
        zd = scn.zd
        if abs(np.imag(complex(zd.s0))) > 0:
            raise ConfigurationError("the engine integrates real zero frequencies only")
        a_vec = np.asarray(np.real(zd.a0), dtype=float).copy()
        a_rate = float(np.real(zd.s0))
        if a_vec.shape[0] != m:
            raise ConfigurationError(f"a0 has dimension {a_vec.shape[0]}, expected {m}")
        if scn.zd_state_offset:
            zd_x0 = np.asarray(np.real(zd.x0), dtype=float).copy()
            if zd_x0.shape[0] != config.plant.n:
                raise ConfigurationError(
                    f"x0 has dimension {zd_x0.shape[0]}, expected {config.plant.n}")
    elif scn.input_kind == "bias":
        a_vec = np.asarray(scn.bias, dtype=float).copy()
        if a_vec.shape[0] != m:
            raise ConfigurationError(f"bias has dimension {a_vec.shape[0]}, expected {m}")
    aux_kinds = {"none": 0, "naive_negation": 1, "covert": 2}
    aux_kind = aux_kinds[scn.aux_kind]
    p = config.plant.p
    out_bias = np.zeros(p)
    out_bias_on = 0
    if scn.output_bias is not None:
        out_bias = np.asarray(scn.output_bias, dtype=float).copy()
        if out_bias.shape[0] != p:
            raise ConfigurationError(
                f"output bias has dimension {out_bias.shape[0]}, expected {p}")
        out_bias_on = 1
    return (in_kind, a_vec, a_rate, float(scn.start_time), zd_x0, aux_kind,
            out_bias, out_bias_on)


def _g_propagators(c1: float, dt: float):
    # RK4 of the scalar linear ODE dg/dt = -c1 g + drive, drive held constant.
    a = -c1 * dt
    phi = 1.0 + a + a * a / 2.0 + a ** 3 / 6.0 + a ** 4 / 24.0
    gam = dt * (1.0 + a / 2.0 + a * a / 6.0 + a ** 3 / 24.0)
    return phi, gam


def run(config: SimConfig) -> SimTrace:
    """Execute one deterministic run and return its trace."""
    plant, bundle, scn = config.plant, config.bundle, config.scenario
    aux = bundle.aux
    n, m, p, nz = plant.n, plant.m, plant.p, aux.n
    if aux.m != m:
        raise ConfigurationError("auxiliary system must share the plant input dimension")
    if bundle.K.shape != (m, p):
        raise ConfigurationError(f"K must be {m}x{p}, got {bundle.K.shape}")
    if scn.aux_kind == "covert" and scn.covert_dynamics is None:
        scn = replace(scn, covert_dynamics=aux)
    dt = config.dt
    n_steps = config.n_steps
    record_every = int(config.record_every)
    n_rec = n_steps // record_every + 1

    (in_kind, a_vec, a_rate, a_start, zd_x0, aux_kind,
     out_bias, out_bias_on) = _encode_scenario(config)

    Phi_x, Gam_x = rk4_propagators(plant.A, plant.B, dt)
    Phi_z, Gam_z = rk4_propagators(aux.A, aux.B, dt)
    Gam_ax = exp_input_map(plant.A, plant.B, dt, a_rate)
    Gam_az = exp_input_map(aux.A, aux.B, dt, a_rate)
    if scn.aux_kind == "covert":
        gen_b = scn.covert_input_matrix() if scn.covert_use_plant_b else aux.B
        Phi_xa = rk4_propagators(aux.A, gen_b, dt)[0]
        Gam_axa = exp_input_map(aux.A, gen_b, dt, a_rate)
    else:
        Phi_xa, Gam_axa = Phi_z, Gam_az
    Phi_zh, Gam_zh = rk4_propagators(aux.A + bundle.L @ aux.C,
                                     np.hstack([aux.B, -bundle.L]), dt)
    Gam_zh_u, Gam_zh_y = np.ascontiguousarray(Gam_zh[:, :m]), np.ascontiguousarray(Gam_zh[:, m:])
    Phi_xh, Gam_xh = rk4_propagators(plant.A + bundle.L2 @ plant.C,
                                     np.hstack([plant.B, -bundle.L2]), dt)
    Gam_xh_u, Gam_xh_y = np.ascontiguousarray(Gam_xh[:, :m]), np.ascontiguousarray(Gam_xh[:, m:])
    phi_g, gam_g = _g_propagators(config.c1, dt)

    noise = NoiseSource(config.seed, n_steps, p, config.noise_std, config.noise_enabled)

    x0 = np.zeros(n) if config.x0 is None else np.asarray(config.x0, dtype=float)
    z0 = np.zeros(nz) if config.z0 is None else np.asarray(config.z0, dtype=float)
    zh0 = np.zeros(nz) if config.zhat0 is None else np.asarray(config.zhat0, dtype=float)
    xh0 = np.zeros(n) if config.xhat0 is None else np.asarray(config.xhat0, dtype=float)

    pz = aux.p
    rec_t = np.zeros(n_rec)
    rec_x = np.zeros((n_rec, n))
    rec_z = np.zeros((n_rec, nz))
    rec_zh = np.zeros((n_rec, nz))
    rec_zc = np.zeros((n_rec, nz))
    rec_xh = np.zeros((n_rec, n))
    rec_g = np.zeros(n_rec)
    rec_u = np.zeros((n_rec, m))
    rec_ustar = np.zeros((n_rec, m))
    rec_y = np.zeros((n_rec, p))
    rec_yz = np.zeros((n_rec, pz))
    rec_resz = np.zeros(n_rec)
    rec_dist = np.zeros(n_rec)
    rec_resx = np.zeros(n_rec)
    rec_alarm = np.zeros((n_rec, 3), dtype=np.int8)
    rec_verdict = np.zeros(n_rec, dtype=np.int8)
    rec_outev = np.zeros(n_rec, dtype=np.int8)
    rec_auxev = np.zeros(n_rec, dtype=np.int8)
    cap_ev = n_steps + 2
    ev_out_step = np.zeros(cap_ev, dtype=np.int64)
    ev_out_y = np.zeros((cap_ev, p))
    ev_aux_step = np.zeros(cap_ev, dtype=np.int64)
    ev_aux_exp = np.zeros(cap_ev, dtype=np.int64)
    ev_aux_dist = np.zeros(cap_ev)
    ev_aux_val = np.zeros((cap_ev, pz))
    ev_aux_sj = np.zeros(cap_ev)
    ev_aux_omega = np.zeros(cap_ev)
    ev_aux_m = np.zeros(cap_ev)
    agg = np.zeros(_kernel.AGG_LEN)
    iagg = np.zeros(_kernel.IAGG_LEN, dtype=np.int64)

    _kernel.simulate(
        n_steps, dt, record_every,
        Phi_x, Gam_x, Gam_ax, Phi_z, Gam_z, Gam_az, Phi_xa, Gam_axa,
        Phi_zh, Gam_zh_u, Gam_zh_y, Phi_xh, Gam_xh_u, Gam_xh_y,
        plant.C, aux.C, bundle.K,
        noise.rows,
        x0, z0, zh0, xh0,
        config.g_init, phi_g, gam_g,
        config.sigma, config.c2, config.eps, config.delta, config.eps2,
        bundle.az_norm, bundle.czbz_norm,
        in_kind, a_vec, a_rate, a_start, zd_x0,
        aux_kind,
        out_bias, out_bias_on,
        config.gamma_z, config.gamma_x, config.latency_threshold,
        config.divergence_cap,
        rec_t, rec_x, rec_z, rec_zh, rec_zc, rec_xh, rec_g,
        rec_u, rec_ustar, rec_y, rec_yz, rec_resz, rec_dist, rec_resx,
        rec_alarm, rec_verdict, rec_outev, rec_auxev,
        ev_out_step, ev_out_y,
        ev_aux_step, ev_aux_exp, ev_aux_dist, ev_aux_val,
        ev_aux_sj, ev_aux_omega, ev_aux_m,
        agg, iagg,
    )

    n_out = int(iagg[_kernel.I_N_OUT])
    n_aux = int(iagg[_kernel.I_N_AUX])
    n_written = int(iagg[_kernel.I_N_REC])
    status = ("diverged" if iagg[_kernel.I_STATUS] == _kernel.STATUS_DIVERGED
              else "completed")

    min_aux_gap = (float(iagg[_kernel.I_MINGAP_AUX]) * dt
                   if iagg[_kernel.I_MINGAP_AUX] >= 0 else np.inf)
    min_out_gap = (float(iagg[_kernel.I_MINGAP_OUT]) * dt
                   if iagg[_kernel.I_MINGAP_OUT] >= 0 else np.inf)
    max_M = float(agg[_kernel.A_MAX_M])
    zb = zeno_bound(bundle.az_norm, config.delta, config.eps2, max_M) if max_M > 0 else 0.0
    floor = config.g_floor()
    monitors = MonitorReport(
        g_floor=floor,
        min_g=float(agg[_kernel.A_MIN_G]),
        g_floor_ok=bool(agg[_kernel.A_MIN_G] > floor),
        out_cond_min_margin=float(agg[_kernel.A_OUTCOND_MARGIN]),
        out_cond_ok=bool(agg[_kernel.A_OUTCOND_MARGIN] > 0.0),
        aux_cond_min_margin=float(agg[_kernel.A_AUXCOND_MARGIN]),
        aux_cond_ok=bool(agg[_kernel.A_AUXCOND_MARGIN] > 0.0),
        aux_cond_enforced=config.attack_free,
        min_aux_gap=min_aux_gap,
        min_out_gap=min_out_gap,
        max_M=max_M,
        zeno_bound_at_max_M=zb,
        zeno_ok=bool(min_aux_gap >= zb and min_out_gap > 0.0),
    )

    sl = slice(0, n_written)
    output_events = {
        "index": np.arange(n_out),
        "t": ev_out_step[:n_out].astype(float) * dt,
        "y": ev_out_y[:n_out].copy(),
    }
    aux_events = {
        "index": np.arange(n_aux),
        "arrival_t": ev_aux_step[:n_aux].astype(float) * dt,
        "expected_t": ev_aux_exp[:n_aux].astype(float) * dt,
        "dis_t": ev_aux_dist[:n_aux].copy(),
        "value": ev_aux_val[:n_aux].copy(),
        "s_j": ev_aux_sj[:n_aux].copy(),
        "omega_j": ev_aux_omega[:n_aux].copy(),
        "M": ev_aux_m[:n_aux].copy(),
    }

    return SimTrace(
        config=config,
        t=rec_t[sl].copy(), x=rec_x[sl].copy(), z=rec_z[sl].copy(),
        z_hat=rec_zh[sl].copy(), z_C=rec_zc[sl].copy(), x_hat=rec_xh[sl].copy(),
        g=rec_g[sl].copy(), u=rec_u[sl].copy(), u_star=rec_ustar[sl].copy(),
        y=rec_y[sl].copy(), y_z=rec_yz[sl].copy(),
        res_z=rec_resz[sl].copy(), dis_t=rec_dist[sl].copy(), res_x=rec_resx[sl].copy(),
        alarms=rec_alarm[sl].copy(), verdicts=rec_verdict[sl].copy(),
        out_event_flag=rec_outev[sl].copy(), aux_event_flag=rec_auxev[sl].copy(),
        output_events=output_events, aux_events=aux_events,
        monitors=monitors, status=status,
        steps_done=int(iagg[_kernel.I_STEPS]),
        max_state_norm=float(agg[_kernel.A_MAX_STATE]),
        max_res_z=float(agg[_kernel.A_MAX_RESZ]),
        max_res_x=float(agg[_kernel.A_MAX_RESX]),
        max_abs_dis_t=float(agg[_kernel.A_MAX_ABSDIST]),
        latched_res_x=bool(iagg[_kernel.I_L_RESX]),
        latched_res_z=bool(iagg[_kernel.I_L_RESZ]),
        latched_dis_t=bool(iagg[_kernel.I_L_DIST]),
        first_res_z_alarm=float(agg[_kernel.A_T_RESZ]),
        first_res_x_alarm=float(agg[_kernel.A_T_RESX]),
        first_dis_t_alarm=float(agg[_kernel.A_T_DIST]),
    )


def batch(configs) -> list:
    """Run each config independently; result order matches input order.

    A failing entry is isolated: its slot holds the raised exception instead
    of a trace, and the remaining entries still run.
    """
    results = []
    for cfg in configs:
        try:
            results.append(run(cfg))
        except Exception as exc:   # noqa: BLE001 - isolation is the contract
            results.append(exc)
    return results


def run_reference(config: SimConfig) -> SimTrace:
    """Pure-Python lockstep run with identical semantics to ``run``.

    Built from the PlantSide and CommandCenter reference classes; used to
    cross-validate the compiled kernel on short horizons.  Records every step
    (``record_every`` is ignored).
    """
    plant, bundle = config.plant, config.bundle
    scn = config.scenario
    aux = bundle.aux
    if scn.aux_kind == "covert" and scn.covert_dynamics is None:
        scn = replace(scn, covert_dynamics=aux)
    n_steps = config.n_steps
    dt = config.dt
    noise = NoiseSource(config.seed, n_steps, plant.p, config.noise_std,
                        config.noise_enabled)
    side = PlantSide(plant, bundle,
                     sigma=config.sigma, c1=config.c1, c2=config.c2,
                     eps=config.eps, delta=config.delta, eps2=config.eps2,
                     dt=dt, x0=config.x0, z0=config.z0, g0=config.g0,
                     scenario=scn, noise=noise)
    cc = CommandCenter(plant, bundle, delta=config.delta, eps2=config.eps2,
                       dt=dt, gamma_z=config.gamma_z, gamma_x=config.gamma_x,
                       latency_threshold=config.latency_threshold,
                       z0=config.z0, zhat0=config.zhat0, xhat0=config.xhat0)

    from .attacks import attack_rate
    from .linalg import StateVector, exp_input_map

    if scn.aux_kind == "covert":
        gen_b = scn.covert_input_matrix() if scn.covert_use_plant_b else aux.B
        Phi_xa = rk4_propagators(aux.A, gen_b, dt)[0]
        Gam_axa = exp_input_map(aux.A, gen_b, dt, attack_rate(scn))

    rows = []
    events_out = []
    events_aux = []
    for i in range(n_steps + 1):
        t = i * dt
        side.arm_attack(i)
        msg = side.check_output_channel(i)
        if msg is not None:
            cc.receive_output(msg)
            side.set_held_u(cc.u)
            events_out.append(msg)
        if side.aux_due(i):
            amsg = side.emit_aux(i)
            dis = cc.receive_aux(amsg)
            events_aux.append((amsg, dis))
        elif msg is not None:
            side.recompute_aux_schedule(i)
            cc.recompute_schedule(i)
        rec = cc.residuals(t)
        rows.append((t, side.x.copy(), side.z.copy(), cc.z_hat.copy(),
                     cc.z_C.copy(), cc.x_hat.copy(), side.trig_out.g,
                     cc.u.copy(), side.u_star(t).copy(),
                     side.measured_y(i).copy(), side.y_z().copy(), rec))
        if i == n_steps:
            break
        side.integrate(i)
        if scn.aux_kind == "covert":
            xa_next = Phi_xa @ scn.x_a.values + Gam_axa @ a_u(scn, t, plant.m)
            scn = replace(scn, x_a=StateVector(xa_next, t + dt))
            side.scenario = scn
        cc.observer_step()

    def col(k):
        return np.array([r[k] for r in rows])

    recs = [r[11] for r in rows]
    alarms = np.array([[int(r.res_x_alarm), int(r.res_z_alarm), int(r.dis_t_alarm)]
                       for r in recs], dtype=np.int8)
    lat_rx = bool(alarms[:, 0].any())
    lat_rz = bool(alarms[:, 1].any())
    lat_rt = bool(alarms[:, 2].any())
    monitors = MonitorReport(
        g_floor=config.g_floor(), min_g=float(col(6).min()),
        g_floor_ok=True, out_cond_min_margin=np.inf, out_cond_ok=True,
        aux_cond_min_margin=np.inf, aux_cond_ok=True,
        aux_cond_enforced=config.attack_free,
        min_aux_gap=np.inf, min_out_gap=np.inf, max_M=0.0,
        zeno_bound_at_max_M=0.0, zeno_ok=True)
    return SimTrace(
        config=config,
        t=col(0), x=col(1), z=col(2), z_hat=col(3), z_C=col(4), x_hat=col(5),
        g=col(6), u=col(7), u_star=col(8), y=col(9), y_z=col(10),
        res_z=np.array([r.res_z for r in recs]),
        dis_t=np.array([r.dis_t for r in recs]),
        res_x=np.array([r.res_x for r in recs]),
        alarms=alarms,
        verdicts=np.array([list(_VERDICT_BY_CODE.values()).index(r.verdict)
                           for r in recs], dtype=np.int8),
        out_event_flag=np.zeros(len(rows), dtype=np.int8),
        aux_event_flag=np.zeros(len(rows), dtype=np.int8),
        output_events={"index": np.arange(len(events_out)),
                       "t": np.array([e.t for e in events_out]),
                       "y": (np.array([e.y for e in events_out])
                             if events_out else np.zeros((0, plant.p)))},
        aux_events={"index": np.arange(len(events_aux)),
                    "arrival_t": np.array([e.t for e, _ in events_aux]),
                    "expected_t": np.array([e.t + d for e, d in events_aux]),
                    "dis_t": np.array([d for _, d in events_aux]),
                    "value": (np.array([e.value for e, _ in events_aux])
                              if events_aux else np.zeros((0, aux.p))),
                    "s_j": np.zeros(len(events_aux)),
                    "omega_j": np.zeros(len(events_aux)),
                    "M": np.zeros(len(events_aux))},
        monitors=monitors, status="completed", steps_done=n_steps,
        max_state_norm=float(np.abs(col(1)).max()) if rows else 0.0,
        max_res_z=float(max(r.res_z for r in recs)),
        max_res_x=float(max(r.res_x for r in recs)),
        max_abs_dis_t=float(max(abs(r.dis_t) for r in recs)),
        latched_res_x=lat_rx, latched_res_z=lat_rz, latched_dis_t=lat_rt,
        first_res_z_alarm=np.nan, first_res_x_alarm=np.nan, first_dis_t_alarm=np.nan,
    )
