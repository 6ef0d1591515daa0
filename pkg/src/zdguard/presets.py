"""Case-study presets: quadruple-tank and aircraft throttle-to-speed benchmarks.

Case 1 is the standard quadruple-tank linearization at its
non-minimum-phase operating point (tank cross sections 28/32 cm^2, outlet
areas 0.071/0.057 cm^2, flow splits 0.43/0.34, level gain 0.5).  Its
transmission zero sits at s0 ~ 0.01278 with the zero direction carried by the
upper tanks; the benchmark values below (s0 = 0.01273 and the printed
direction) are reproduced to a fraction of a percent and are used as
validation targets, not as simulation inputs.

Case 2 is a two-state throttle-to-speed model with a non-minimum-phase zero
at s0 = 0.0601.  The state-space realization is constructed: A is chosen
stable (and such that the benchmark feedback gain keeps A + BKC stable), B is
derived from (s0 I - A) x0 = B a0 so the zero frequency and its direction
(x0, a0) match the benchmark exactly, and C stacks two redundant sensors
measuring the output combination orthogonal to x0 -- with a two-dimensional
state, any output annihilating x0 is a multiple of that row, which is also
what makes the printed 1x2 controller gain meaningful.

Both presets ship the benchmark gains: Case 1 K = [[0.0094, 0.0295],
[-0.0042, 0.0344]], L = -9 I2 with A_z = -I2; Case 2 K = [0.7499, 3.9509],
L = 9 with A_z = -10 (the scalar observer needs lambda0 + L < 0, so the
positive L pins lambda0 = -10).
"""

from __future__ import annotations

import math

import numpy as np

from .attacks import AttackScenario
from .design import DesignBundle, design_gains
from .engine import SimConfig, run
from .errors import ConfigurationError
from .linalg import LtiSystem
from .zeros import ZeroData, attack_direction, invariant_zeros

__all__ = [
    "quadruple_tank",
    "aircraft",
    "case1_bundle",
    "case2_bundle",
    "tank_zero_data",
    "aircraft_zero_data",
    "case1_config",
    "case2_config",
    "preset_config",
    "preset_names",
    "calibrate_gamma_x",
    "TANK_S0_REF",
    "TANK_X0_REF",
    "TANK_A0_REF",
    "AIRCRAFT_S0_REF",
    "AIRCRAFT_X0_REF",
    "AIRCRAFT_A0_REF",
    "CASE1_GAMMA_X",
    "CASE2_GAMMA_X",
]

# Benchmark zero data the preset realizations must reproduce (validation
# targets; the simulator itself always uses the realization's computed zero).
TANK_S0_REF = 0.01273
TANK_X0_REF = np.array([0.0, 0.0, -0.63597, 0.618476])
TANK_A0_REF = np.array([0.33778, -0.314538])
AIRCRAFT_S0_REF = 0.0601
AIRCRAFT_X0_REF = np.array([0.4327, 0.9001])
AIRCRAFT_A0_REF = np.array([0.0507])

CASE1_K = np.array([[0.0094, 0.0295], [-0.0042, 0.0344]])
CASE1_L = -9.0 * np.eye(2)
CASE2_K = np.array([[0.7499, 3.9509]])
CASE2_L = np.array([[9.0]])

# Isolation thresholds: 3x the largest attack-free res_x over a 500 s
# calibration run (seed 42, noise power 0.01) plus one noise standard
# deviation; see calibrate_gamma_x.  The largest attack-free res_x observed
# across eleven seeds is 0.58, so the margin is ~3x.
CASE1_GAMMA_X = 1.66
CASE2_GAMMA_X = 1.66

_DEFAULTS = dict(sigma=0.1, c1=10.0, c2=0.5, eps=1e-4, delta=20.0, eps2=1e-4,
                 gamma_z=0.01, noise_std=math.sqrt(0.01))
_ATTACK_START = 10.0


def quadruple_tank() -> LtiSystem:
    """Quadruple-tank linearization, non-minimum-phase operating point."""
    a_tank = (28.0, 32.0, 28.0, 32.0)       # tank cross sections [cm^2]
    a_hole = (0.071, 0.057, 0.071, 0.057)   # outlet hole areas [cm^2]
    levels = (12.6, 13.0, 4.8, 4.9)         # operating levels [cm]
    k_pump = (3.14, 3.29)                   # pump flow gains [cm^3/Vs]
    split = (0.43, 0.34)                    # valve flow splits (NMP setting)
    kc = 0.5                                # level-to-voltage sensor gain
    grav = 981.0
    T = [a_tank[i] / a_hole[i] * math.sqrt(2.0 * levels[i] / grav) for i in range(4)]
    A = np.array([
        [-1.0 / T[0], 0.0, a_tank[2] / (a_tank[0] * T[2]), 0.0],
        [0.0, -1.0 / T[1], 0.0, a_tank[3] / (a_tank[1] * T[3])],
        [0.0, 0.0, -1.0 / T[2], 0.0],
        [0.0, 0.0, 0.0, -1.0 / T[3]],
    ])
    B = np.array([
        [split[0] * k_pump[0] / a_tank[0], 0.0],
        [0.0, split[1] * k_pump[1] / a_tank[1]],
        [0.0, (1.0 - split[1]) * k_pump[1] / a_tank[2]],
        [(1.0 - split[0]) * k_pump[0] / a_tank[3], 0.0],
    ])
    C = np.array([[kc, 0.0, 0.0, 0.0], [0.0, kc, 0.0, 0.0]])
    return LtiSystem(A, B, C)


def aircraft() -> LtiSystem:
    """Two-state throttle-to-speed model with the benchmark zero structure.

    B is derived from the zero-direction identity (s0 I - A) x0 = B a0, so the
    realization has its non-minimum-phase zero exactly at s0 with the
    benchmark null direction.  Both sensor rows measure the output
    combination orthogonal to x0 (redundant sensing).
    """
    A = np.array([[-0.4975, 0.2222], [-0.7783, 0.3375]])
    s0 = AIRCRAFT_S0_REF
    x0 = AIRCRAFT_X0_REF
    a0 = float(AIRCRAFT_A0_REF[0])
    B = ((s0 * np.eye(2) - A) @ x0 / a0).reshape(2, 1)
    r = np.array([0.9001, -0.4327])
    C = np.vstack([r, r])
    return LtiSystem(A, B, C)


def case1_bundle() -> DesignBundle:
    """Tank-case design: A_z = -I2, B_z = C_z = I2, benchmark K and L."""
    plant = quadruple_tank()
    return design_gains(plant, lambda0=-1.0, K=CASE1_K, L=CASE1_L,
                        L2=-plant.C.T)


def case2_bundle() -> DesignBundle:
    """Aircraft-case design: scalar A_z = -10 so the L = 9 observer is stable."""
    plant = aircraft()
    return design_gains(plant, lambda0=-10.0, K=CASE2_K, L=CASE2_L,
                        L2=-plant.C.T)


_zero_cache: dict = {}


def tank_zero_data() -> ZeroData:
    """Computed zero data of the tank preset (cached)."""
    if "tank" not in _zero_cache:
        sys = quadruple_tank()
        zs = invariant_zeros(sys)
        nmp = [z for z in zs if z.real > 0]
        if len(nmp) != 1:
            raise ConfigurationError("tank preset must have exactly one NMP zero")
        _zero_cache["tank"] = attack_direction(sys, float(nmp[0].real))
    return _zero_cache["tank"]


def aircraft_zero_data() -> ZeroData:
    """Computed zero data of the aircraft preset (cached).

    The aircraft preset has one input and two (redundant) outputs, so the
    square-channel zero finder does not apply; the zero frequency is known by
    construction and only the direction is extracted numerically.
    """
    if "aircraft" not in _zero_cache:
        _zero_cache["aircraft"] = attack_direction(aircraft(), AIRCRAFT_S0_REF)
    return _zero_cache["aircraft"]


def _scenario(kind: str, plant: LtiSystem, bundle: DesignBundle,
              zd: ZeroData, start: float) -> AttackScenario:
    if kind == "free":
        return AttackScenario()
    if kind == "s1":
        return AttackScenario(input_kind="zd", zd=zd, start_time=start)
    if kind == "s2":
        return AttackScenario(input_kind="zd", zd=zd, start_time=start,
                              aux_kind="naive_negation")
    if kind == "s3":
        return AttackScenario(input_kind="zd", zd=zd, start_time=start,
                              aux_kind="covert", covert_dynamics=bundle.aux)
    if kind == "nonzd":
        # Constant false data on the input and output channels; magnitudes
        # large enough to push every residual past its threshold.
        return AttackScenario(input_kind="bias", bias=np.full(plant.m, 2.0),
                              start_time=start,
                              output_bias=np.full(plant.p, 3.0))
    raise ConfigurationError(f"unknown scenario kind {kind!r}")


def case1_config(kind: str = "s1", **overrides) -> SimConfig:
    """Quadruple-tank run configuration.

    kind: 'free' (no attack), 's1' (ZD input attack only), 's2' (ZD plus
    naive channel negation), 's3' (ZD plus covert channel attack), or
    'nonzd' (constant input/output false data).

    Preset traces record every 10th step by default (the in-kernel monitors
    always see every step); pass record_every=1 for a full-resolution trace.
    """
    plant = quadruple_tank()
    bundle = case1_bundle()
    zd = tank_zero_data()
    start = overrides.pop("attack_start", _ATTACK_START)
    base = dict(_DEFAULTS)
    base.update(
        plant=plant, bundle=bundle,
        scenario=_scenario(kind, plant, bundle, zd, start),
        horizon=1000.0, gamma_x=CASE1_GAMMA_X, record_every=10,
        preset=f"case1-{kind}", label=f"case1-{kind}",
    )
    base.update(overrides)
    return SimConfig(**base)


def case2_config(kind: str = "s3", **overrides) -> SimConfig:
    """Aircraft run configuration (default: ZD attack with covert channel)."""
    plant = aircraft()
    bundle = case2_bundle()
    zd = aircraft_zero_data()
    start = overrides.pop("attack_start", _ATTACK_START)
    base = dict(_DEFAULTS)
    base.update(
        plant=plant, bundle=bundle,
        scenario=_scenario(kind, plant, bundle, zd, start),
        horizon=300.0, gamma_x=CASE2_GAMMA_X, record_every=10,
        preset=f"case2-{kind}" if kind != "s3" else "case2",
        label=f"case2-{kind}",
    )
    base.update(overrides)
    return SimConfig(**base)


_PRESETS = {
    "case1-s1": lambda **ov: case1_config("s1", **ov),
    "case1-s2": lambda **ov: case1_config("s2", **ov),
    "case1-s3": lambda **ov: case1_config("s3", **ov),
    "case2": lambda **ov: case2_config("s3", **ov),
}


def preset_names() -> list:
    return sorted(_PRESETS)


def preset_config(name: str, **overrides) -> SimConfig:
    """Named scenario bundle for the command line and tests."""
    if name not in _PRESETS:
        raise ConfigurationError(
            f"unknown preset {name!r}; choose from {preset_names()}")
    return _PRESETS[name](**overrides)


def calibrate_gamma_x(config: SimConfig, factor: float = 3.0) -> float:
    """Isolation threshold from an attack-free calibration run.

    Returns factor * max res_x over the run plus one noise standard
    deviation.  Pass an attack-free config (same preset constants and seed
    policy as the runs the threshold will guard).
    """
    if not config.attack_free:
        raise ConfigurationError("calibration requires an attack-free config")
    trace = run(config)
    return factor * trace.max_res_x + config.noise_std
