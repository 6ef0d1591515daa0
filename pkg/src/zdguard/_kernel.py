"""Fused lockstep simulation kernel.

Compiled mirror of ``plant.PlantSide`` + ``center.CommandCenter`` driven in
lockstep on one clock; used by the engine for long horizons.  Per-step cycle:

1. sample the input-channel attack;
2. output channel: dynamic event check on the noisy sample, controller update
   on an event (zero transport latency, so the plant's held input updates at
   the same instant);
3. auxiliary channel: emit + fresh schedule when the booked step is reached,
   else re-spend the remaining budget if the control input just changed; the
   replica side mirrors every scheduling action using ||u|| where the plant
   uses ||u + a_u||;
4. monitors and the residual record at the current grid point;
5. one RK4 step (precomputed affine propagators) of every continuous state
   with zero-order-held inputs.

All floating-point expressions that must agree between the plant and the
replica (integration, norms, schedule arithmetic) go through the same helper
code so attack-free runs give bit-identical schedules and dis_t == 0.
"""

import numpy as np
from numba import njit

# Aggregate slots (float).
A_MIN_G = 0
A_OUTCOND_MARGIN = 1
A_AUXCOND_MARGIN = 2
A_MAX_RESZ = 3
A_MAX_RESX = 4
A_MAX_ABSDIST = 5
A_MAX_M = 6
A_MAX_STATE = 7
A_T_RESZ = 8
A_T_RESX = 9
A_T_DIST = 10
AGG_LEN = 11

# Aggregate slots (integer).
I_STATUS = 0        # 0 completed, 1 diverged
I_STEPS = 1
I_N_OUT = 2
I_N_AUX = 3
I_MINGAP_AUX = 4    # in steps; -1 when fewer than 2 events
I_MINGAP_OUT = 5
I_L_RESZ = 6
I_L_RESX = 7
I_L_DIST = 8
I_N_REC = 9
IAGG_LEN = 10

STATUS_COMPLETED = 0
STATUS_DIVERGED = 1

VERDICT_CODES = {
    (0, 0, 0): 0,   # no attack
    (1, 1, 1): 1,   # non-ZD attack
    (0, 1, 1): 2,   # ZD attack
    (0, 0, 1): 3,   # ZD + covert aux channel
}


@njit(cache=True)
def _norm(v):
    s = 0.0
    for i in range(v.shape[0]):
        s += v[i] * v[i]
    return np.sqrt(s)


@njit(cache=True)
def _maxabs(v):
    m = 0.0
    for i in range(v.shape[0]):
        a = abs(v[i])
        if a > m:
            m = a
    return m


@njit(cache=True)
def _fire_step(next_time, sched_step, dt):
    k = int(np.ceil(next_time / dt - 1e-9))
    if k <= sched_step:
        k = sched_step + 1
    return k


@njit(cache=True)
def _verdict_code(rx, rz, rt):
    if not rx and not rz and not rt:
        return 0
    if rx and rz and rt:
        return 1
    if (not rx) and rz and rt:
        return 2
    if (not rx) and (not rz) and rt:
        return 3
    return 4


@njit(cache=True)
def simulate(
    n_steps, dt, record_every,
    Phi_x, Gam_x, Gam_ax, Phi_z, Gam_z, Gam_az, Phi_xa, Gam_axa,
    Phi_zh, Gam_zh_u, Gam_zh_y, Phi_xh, Gam_xh_u, Gam_xh_y,
    C, Cz, K,
    noise,
    x0, z0, zh0, xh0,
    g0, phi_g, gam_g,
    sigma, c2, eps, delta, eps2,
    az_norm, czbz_norm,
    in_kind, a_vec, a_rate, a_start, zd_x0,
    aux_kind,
    out_bias, out_bias_on,
    gamma_z, gamma_x, lat_thr, div_cap,
    rec_t, rec_x, rec_z, rec_zh, rec_zc, rec_xh, rec_g,
    rec_u, rec_ustar, rec_y, rec_yz, rec_resz, rec_dist, rec_resx,
    rec_alarm, rec_verdict, rec_outev, rec_auxev,
    ev_out_step, ev_out_y,
    ev_aux_step, ev_aux_exp, ev_aux_dist, ev_aux_val,
    ev_aux_sj, ev_aux_omega, ev_aux_m,
    agg, iagg,
):
    n = x0.shape[0]
    nz = z0.shape[0]
    p = C.shape[0]
    m = K.shape[0]

    x = x0.copy()
    z = z0.copy()
    z_c = z0.copy()
    zh = zh0.copy()
    xh = xh0.copy()
    xa = np.zeros(nz)
    g = g0

    u = np.zeros(m)
    last_sent_y = np.zeros(p)
    held_y = np.zeros(p)
    held_yz = np.zeros(Cz.shape[0])

    # Plant-side schedule state.
    pl_sj = 0.0
    pl_omega = 1.0
    pl_yznorm_ev = 0.0
    pl_budget = 0.0
    pl_anchor = 0.0
    pl_fire = 0
    pl_yz_ev = np.zeros(Cz.shape[0])
    # Replica schedule state.
    cc_sj = 0.0
    cc_omega = 1.0
    cc_yznorm_ev = 0.0
    cc_budget = 0.0
    cc_anchor = 0.0
    cc_fire = 0

    last_out_step = -1
    last_aux_step = -1
    last_dist = 0.0

    agg[A_MIN_G] = g
    agg[A_OUTCOND_MARGIN] = np.inf
    agg[A_AUXCOND_MARGIN] = np.inf
    agg[A_MAX_RESZ] = 0.0
    agg[A_MAX_RESX] = 0.0
    agg[A_MAX_ABSDIST] = 0.0
    agg[A_MAX_M] = 0.0
    agg[A_MAX_STATE] = 0.0
    agg[A_T_RESZ] = np.nan
    agg[A_T_RESX] = np.nan
    agg[A_T_DIST] = np.nan
    iagg[I_STATUS] = STATUS_COMPLETED
    iagg[I_STEPS] = 0
    iagg[I_N_OUT] = 0
    iagg[I_N_AUX] = 0
    iagg[I_MINGAP_AUX] = -1
    iagg[I_MINGAP_OUT] = -1
    iagg[I_L_RESZ] = 0
    iagg[I_L_RESX] = 0
    iagg[I_L_DIST] = 0
    iagg[I_N_REC] = 0

    irec = 0
    a_u_t = np.zeros(m)
    offset_pending = in_kind == 1

    for i in range(n_steps + 1):
        t = i * dt

        # -- 1. input-channel attack sample (held over the step) -------------
        if in_kind == 0 or t < a_start:
            for k in range(m):
                a_u_t[k] = 0.0
        elif in_kind == 1:
            if offset_pending:
                # Definition of the attack: the exponential input acts from
                # the state direction x0 (zero vector when disabled).
                x = x + zd_x0
                offset_pending = False
            f = np.exp(a_rate * (t - a_start))
            for k in range(m):
                a_u_t[k] = a_vec[k] * f
        else:
            for k in range(m):
                a_u_t[k] = a_vec[k]

        # -- 2. output channel -----------------------------------------------
        y_meas = C @ x + noise[i]
        e_y = last_sent_y - y_meas
        ey2 = 0.0
        for k in range(p):
            ey2 += e_y[k] * e_y[k]
        out_fire = (i == 0) or (ey2 >= sigma * g)
        if out_fire:
            if last_out_step >= 0:
                gap = i - last_out_step
                if iagg[I_MINGAP_OUT] < 0 or gap < iagg[I_MINGAP_OUT]:
                    iagg[I_MINGAP_OUT] = gap
            last_out_step = i
            last_sent_y = y_meas.copy()
            if out_bias_on == 1 and t >= a_start:
                held_y = y_meas + out_bias
            else:
                held_y = y_meas.copy()
            u = K @ held_y
            ey2_g = 0.0
            k_out = iagg[I_N_OUT]
            ev_out_step[k_out] = i
            for k in range(p):
                ev_out_y[k_out, k] = held_y[k]
            iagg[I_N_OUT] = k_out + 1
        else:
            ey2_g = ey2
            margin = sigma * g - ey2
            if margin < agg[A_OUTCOND_MARGIN]:
                agg[A_OUTCOND_MARGIN] = margin

        # -- 3. auxiliary channel ----------------------------------------------
        aux_fire = i == pl_fire
        if aux_fire:
            if last_aux_step >= 0:
                gap = i - last_aux_step
                if iagg[I_MINGAP_AUX] < 0 or gap < iagg[I_MINGAP_AUX]:
                    iagg[I_MINGAP_AUX] = gap
            last_aux_step = i

            yz = Cz @ z
            if aux_kind == 0:
                held_yz = yz.copy()
            elif aux_kind == 1:
                held_yz = yz - a_u_t
            else:
                held_yz = yz - Cz @ xa

            # Plant: fresh schedule from the true local output and ||u + a_u||.
            ustar_norm = _norm(u + a_u_t)
            yznorm = _norm(yz)
            pl_yz_ev = yz.copy()
            pl_yznorm_ev = yznorm
            pl_sj = (yznorm + np.sqrt(2.0 * eps2)) / np.sqrt(4.0 + 4.0 * delta * delta)
            M = az_norm * yznorm + czbz_norm * ustar_norm
            pl_omega = az_norm * pl_sj + M
            pl_budget = pl_sj
            pl_anchor = t
            pl_fire = _fire_step(t + pl_sj / pl_omega, i, dt)
            if M > agg[A_MAX_M]:
                agg[A_MAX_M] = M

            # Replica: arrival-vs-expected gap, then re-anchor from its own data.
            dis = (cc_fire - i) * dt
            last_dist = dis
            if abs(dis) > agg[A_MAX_ABSDIST]:
                agg[A_MAX_ABSDIST] = abs(dis)
            yzc = Cz @ z_c
            u_norm = _norm(u)
            yzcnorm = _norm(yzc)
            cc_yznorm_ev = yzcnorm
            cc_sj = (yzcnorm + np.sqrt(2.0 * eps2)) / np.sqrt(4.0 + 4.0 * delta * delta)
            Mc = az_norm * yzcnorm + czbz_norm * u_norm
            cc_omega = az_norm * cc_sj + Mc
            cc_budget = cc_sj
            cc_anchor = t
            cc_fire = _fire_step(t + cc_sj / cc_omega, i, dt)

            k_aux = iagg[I_N_AUX]
            ev_aux_step[k_aux] = i
            ev_aux_exp[k_aux] = i + int(round(dis / dt))
            ev_aux_dist[k_aux] = dis
            for k in range(held_yz.shape[0]):
                ev_aux_val[k_aux, k] = held_yz[k]
            ev_aux_sj[k_aux] = pl_sj
            ev_aux_omega[k_aux] = pl_omega
            ev_aux_m[k_aux] = M
            iagg[I_N_AUX] = k_aux + 1

            if abs(dis) > lat_thr and iagg[I_L_DIST] == 0:
                iagg[I_L_DIST] = 1
                agg[A_T_DIST] = t
        elif out_fire:
            # Control input changed mid-interval: re-spend the remaining
            # budget on both sides with the updated rate bound.
            r = pl_budget - pl_omega * (t - pl_anchor)
            if r < 0.0:
                r = 0.0
            ustar_norm = _norm(u + a_u_t)
            M = az_norm * pl_yznorm_ev + czbz_norm * ustar_norm
            pl_omega = az_norm * pl_sj + M
            pl_budget = r
            pl_anchor = t
            pl_fire = _fire_step(t + r / pl_omega, i, dt)
            if M > agg[A_MAX_M]:
                agg[A_MAX_M] = M

            rc = cc_budget - cc_omega * (t - cc_anchor)
            if rc < 0.0:
                rc = 0.0
            u_norm = _norm(u)
            Mc = az_norm * cc_yznorm_ev + czbz_norm * u_norm
            cc_omega = az_norm * cc_sj + Mc
            cc_budget = rc
            cc_anchor = t
            cc_fire = _fire_step(t + rc / cc_omega, i, dt)

        # -- 4. monitors and residual record at the current grid point --------
        yz_now = Cz @ z
        if not aux_fire:
            e_z = pl_yz_ev - yz_now
            ez2 = 0.0
            for k in range(e_z.shape[0]):
                ez2 += e_z[k] * e_z[k]
            yznorm2 = 0.0
            for k in range(yz_now.shape[0]):
                yznorm2 += yz_now[k] * yz_now[k]
            margin2 = delta * yznorm2 + eps2 - ez2
            if margin2 < agg[A_AUXCOND_MARGIN]:
                agg[A_AUXCOND_MARGIN] = margin2

        res_z = _norm(held_yz - Cz @ zh)
        res_x = _norm(held_y - C @ xh)
        rz = res_z > gamma_z
        rx = res_x > gamma_x
        rt = abs(last_dist) > lat_thr
        if res_z > agg[A_MAX_RESZ]:
            agg[A_MAX_RESZ] = res_z
        if res_x > agg[A_MAX_RESX]:
            agg[A_MAX_RESX] = res_x
        if rz and iagg[I_L_RESZ] == 0:
            iagg[I_L_RESZ] = 1
            agg[A_T_RESZ] = t
        if rx and iagg[I_L_RESX] == 0:
            iagg[I_L_RESX] = 1
            agg[A_T_RESX] = t

        if i % record_every == 0:
            rec_t[irec] = t
            for k in range(n):
                rec_x[irec, k] = x[k]
                rec_xh[irec, k] = xh[k]
            for k in range(nz):
                rec_z[irec, k] = z[k]
                rec_zh[irec, k] = zh[k]
                rec_zc[irec, k] = z_c[k]
            rec_g[irec] = g
            for k in range(m):
                rec_u[irec, k] = u[k]
                rec_ustar[irec, k] = u[k] + a_u_t[k]
            for k in range(p):
                rec_y[irec, k] = y_meas[k]
            for k in range(yz_now.shape[0]):
                rec_yz[irec, k] = yz_now[k]
            rec_resz[irec] = res_z
            rec_dist[irec] = last_dist
            rec_resx[irec] = res_x
            rec_alarm[irec, 0] = 1 if rx else 0
            rec_alarm[irec, 1] = 1 if rz else 0
            rec_alarm[irec, 2] = 1 if rt else 0
            rec_verdict[irec] = _verdict_code(rx, rz, rt)
            rec_outev[irec] = 1 if out_fire else 0
            rec_auxev[irec] = 1 if aux_fire else 0
            irec += 1
            iagg[I_N_REC] = irec

        # -- 5. integrate every continuous state over [t, t + dt] -------------
        # The attack component enters through its own input map (exact for
        # the exponential signal, identical to the ZOH map for a constant),
        # so the discrete plant keeps the invariant-zero structure exactly.
        if i == n_steps:
            break
        x = Phi_x @ x + Gam_x @ u + Gam_ax @ a_u_t
        z = Phi_z @ z + Gam_z @ u + Gam_az @ a_u_t
        z_c = Phi_z @ z_c + Gam_z @ u
        if aux_kind == 2:
            xa = Phi_xa @ xa + Gam_axa @ a_u_t
        zh = Phi_zh @ zh + Gam_zh_u @ u + Gam_zh_y @ held_yz
        xh = Phi_xh @ xh + Gam_xh_u @ u + Gam_xh_y @ held_y
        g = phi_g * g + gam_g * (eps - c2 * ey2_g)
        if g < agg[A_MIN_G]:
            agg[A_MIN_G] = g
        iagg[I_STEPS] = i + 1

        sx = _maxabs(x)
        sz = _maxabs(z)
        sa = _maxabs(xa)
        snorm = max(sx, max(sz, sa))
        if snorm > agg[A_MAX_STATE]:
            agg[A_MAX_STATE] = snorm
        if snorm > div_cap:
            iagg[I_STATUS] = STATUS_DIVERGED
            break

    return irec
