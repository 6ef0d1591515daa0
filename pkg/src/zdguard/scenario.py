"""Scenario files: a YAML schema that maps onto SimConfig.

A file either names a preset (optionally overriding run parameters) or
specifies a plant (with gains) explicitly.  Validation is strict: unknown
keys anywhere are rejected with their path, wrong shapes and out-of-range
constants are reported before anything runs.

Example::

    preset: case1-s3
    horizon: 500.0
    seed: 7

    # or, fully explicit:
    plant:
      A: [[-1.0, 0.0], [0.0, -2.0]]
      B: [[1.0], [1.0]]
      C: [[1.0, 0.0]]
    bundle:
      lambda0: -1.0
      K: [[0.1, 0.0]]        # optional; synthesized when omitted
    constants: {sigma: 0.1, c1: 10.0, c2: 0.5, eps: 1.0e-4, delta: 20.0, eps2: 1.0e-4}
    thresholds: {gamma_z: 0.01, gamma_x: 1.0, latency: 0.0}
    noise: {enabled: true, std: 0.1}
    attack:
      input: {kind: zd, start: 10.0}
      aux: {kind: covert}
    initial: {x0: [0.0, 0.0]}
"""

from __future__ import annotations

import numpy as np
import yaml

from .attacks import AttackScenario
from .design import design_gains
from .engine import SimConfig
from .errors import ConfigurationError
from .linalg import LtiSystem
from .presets import preset_config, preset_names
from .zeros import attack_direction, invariant_zeros

__all__ = ["load_scenario", "load_plant_file", "load_bundle_file", "OVERRIDE_KEYS"]

# Keys a preset-based file may override without --force.
OVERRIDE_KEYS = {"seed", "record_every"}

_TOP_KEYS = {"preset", "horizon", "dt", "seed", "record_every", "noise",
             "constants", "thresholds", "attack", "initial", "divergence_cap",
             "plant", "bundle", "label"}
_NOISE_KEYS = {"enabled", "std"}
_CONST_KEYS = {"sigma", "c1", "c2", "eps", "delta", "eps2"}
_THRESH_KEYS = {"gamma_z", "gamma_x", "latency"}
_ATTACK_KEYS = {"input", "aux", "output_bias"}
_INPUT_KEYS = {"kind", "start", "bias", "s0", "magnitude"}
_AUX_KEYS = {"kind", "use_plant_b"}
_INITIAL_KEYS = {"x0", "z0", "zhat0", "xhat0", "g0"}
_PLANT_KEYS = {"A", "B", "C"}
_BUNDLE_KEYS = {"lambda0", "K", "L", "L2"}


def _require_mapping(node, path: str) -> dict:
    if not isinstance(node, dict):
        raise ConfigurationError(f"{path}: expected a mapping, got {type(node).__name__}")
    return node


def _check_keys(node: dict, allowed: set, path: str) -> None:
    unknown = set(node) - allowed
    if unknown:
        raise ConfigurationError(
            f"{path}: unknown key(s) {sorted(unknown)}; allowed: {sorted(allowed)}")


def _matrix(node, path: str) -> np.ndarray:
    try:
        M = np.asarray(node, dtype=float)
    except (TypeError, ValueError) as exc:
        raise ConfigurationError(f"{path}: not a numeric matrix ({exc})") from exc
    if M.ndim != 2:
        raise ConfigurationError(f"{path}: expected a 2-D matrix, got shape {M.shape}")
    return M


def _vector(node, path: str) -> np.ndarray:
    try:
        v = np.asarray(node, dtype=float)
    except (TypeError, ValueError) as exc:
        raise ConfigurationError(f"{path}: not a numeric vector ({exc})") from exc
    if v.ndim != 1:
        raise ConfigurationError(f"{path}: expected a flat list of numbers")
    return v


def _load_yaml(path: str) -> dict:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            data = yaml.safe_load(fh)
    except OSError as exc:
        raise ConfigurationError(f"cannot read {path}: {exc}") from exc
    except yaml.YAMLError as exc:
        # yaml errors carry line/column marks; keep them in the message
        raise ConfigurationError(f"{path}: YAML parse error: {exc}") from exc
    if data is None:
        data = {}
    return _require_mapping(data, path)


def load_plant_file(path: str) -> LtiSystem:
    """Read a plant file: a mapping with matrices A, B, C."""
    data = _load_yaml(path)
    _check_keys(data, _PLANT_KEYS | {"lambda0"}, path)
    for key in ("A", "B", "C"):
        if key not in data:
            raise ConfigurationError(f"{path}: missing matrix {key!r}")
    return LtiSystem(_matrix(data["A"], f"{path}:A"),
                     _matrix(data["B"], f"{path}:B"),
                     _matrix(data["C"], f"{path}:C"))


def load_bundle_file(path: str):
    """Read plant + gains (+ constants) for the certificate checks.

    Returns (plant, bundle, constants_dict).
    """
    data = _load_yaml(path)
    _check_keys(data, {"plant", "bundle", "constants"}, path)
    if "plant" not in data:
        raise ConfigurationError(f"{path}: missing 'plant' section")
    pnode = _require_mapping(data["plant"], f"{path}:plant")
    _check_keys(pnode, _PLANT_KEYS, f"{path}:plant")
    plant = LtiSystem(_matrix(pnode["A"], f"{path}:plant.A"),
                      _matrix(pnode["B"], f"{path}:plant.B"),
                      _matrix(pnode["C"], f"{path}:plant.C"))
    bnode = _require_mapping(data.get("bundle", {}), f"{path}:bundle")
    _check_keys(bnode, _BUNDLE_KEYS, f"{path}:bundle")
    bundle = design_gains(
        plant,
        lambda0=float(bnode.get("lambda0", -1.0)),
        K=bnode.get("K"), L=bnode.get("L"), L2=bnode.get("L2"))
    cnode = _require_mapping(data.get("constants", {}), f"{path}:constants")
    _check_keys(cnode, _CONST_KEYS, f"{path}:constants")
    constants = {k: float(v) for k, v in cnode.items()}
    return plant, bundle, constants


def load_scenario(path: str, force: bool = False, **cli_overrides):
    """Build a SimConfig from a scenario file.

    ``cli_overrides`` (dt, horizon, seed, ...) come from command-line flags.
    For preset-based configurations, overrides of preset-pinned run
    parameters (anything except seed and record_every) are ignored unless
    ``force`` is true, keeping the named bundles reproducible.

    Returns
    -------
    (config, ignored) : SimConfig and the list of override keys that were
        dropped by the preset-immutability rule.
    """
    data = _load_yaml(path)
    _check_keys(data, _TOP_KEYS, path)
    cli_overrides = {k: v for k, v in cli_overrides.items() if v is not None}

    if "preset" in data:
        name = data["preset"]
        if name not in preset_names():
            raise ConfigurationError(
                f"{path}: unknown preset {name!r}; choose from {preset_names()}")
        run_param_keys = {"horizon", "dt", "seed", "record_every",
                          "divergence_cap", "label"}
        extra = set(data) - {"preset"} - run_param_keys
        if extra:
            raise ConfigurationError(
                f"{path}: a preset-based file only takes run parameters "
                f"{sorted(run_param_keys)}; found {sorted(extra)} "
                "(write an explicit plant configuration to change those)")
        overrides = {key: data[key] for key in run_param_keys if key in data}
        overrides.update(cli_overrides)
        ignored = []
        if not force:
            for key in list(overrides):
                if key not in OVERRIDE_KEYS:
                    ignored.append(key)
                    overrides.pop(key)
        return preset_config(name, **_typed_run_params(overrides)), sorted(ignored)

    if "plant" not in data:
        raise ConfigurationError(f"{path}: either 'preset' or 'plant' is required")
    pnode = _require_mapping(data["plant"], f"{path}:plant")
    _check_keys(pnode, _PLANT_KEYS, f"{path}:plant")
    plant = LtiSystem(_matrix(pnode["A"], f"{path}:plant.A"),
                      _matrix(pnode["B"], f"{path}:plant.B"),
                      _matrix(pnode["C"], f"{path}:plant.C"))
    bnode = _require_mapping(data.get("bundle", {}), f"{path}:bundle")
    _check_keys(bnode, _BUNDLE_KEYS, f"{path}:bundle")
    bundle = design_gains(
        plant,
        lambda0=float(bnode.get("lambda0", -1.0)),
        K=bnode.get("K"), L=bnode.get("L"), L2=bnode.get("L2"))

    kwargs = {"plant": plant, "bundle": bundle}
    kwargs.update(_typed_run_params({k: data[k] for k in
                                     ("horizon", "dt", "seed", "record_every",
                                      "divergence_cap", "label") if k in data}))

    if "noise" in data:
        nnode = _require_mapping(data["noise"], f"{path}:noise")
        _check_keys(nnode, _NOISE_KEYS, f"{path}:noise")
        if "enabled" in nnode:
            kwargs["noise_enabled"] = bool(nnode["enabled"])
        if "std" in nnode:
            kwargs["noise_std"] = float(nnode["std"])
    if "constants" in data:
        cnode = _require_mapping(data["constants"], f"{path}:constants")
        _check_keys(cnode, _CONST_KEYS, f"{path}:constants")
        for k, v in cnode.items():
            kwargs[k] = float(v)
    if "thresholds" in data:
        tnode = _require_mapping(data["thresholds"], f"{path}:thresholds")
        _check_keys(tnode, _THRESH_KEYS, f"{path}:thresholds")
        if "gamma_z" in tnode:
            kwargs["gamma_z"] = float(tnode["gamma_z"])
        if "gamma_x" in tnode:
            kwargs["gamma_x"] = float(tnode["gamma_x"])
        if "latency" in tnode:
            kwargs["latency_threshold"] = float(tnode["latency"])
    if "initial" in data:
        inode = _require_mapping(data["initial"], f"{path}:initial")
        _check_keys(inode, _INITIAL_KEYS, f"{path}:initial")
        for k in ("x0", "z0", "zhat0", "xhat0"):
            if k in inode:
                kwargs[k] = _vector(inode[k], f"{path}:initial.{k}")
        if "g0" in inode:
            kwargs["g0"] = float(inode["g0"])
    kwargs["scenario"] = _build_attack(data.get("attack"), plant, bundle, path)
    kwargs.update(_typed_run_params(cli_overrides))
    return SimConfig(**kwargs), []


def _typed_run_params(d: dict) -> dict:
    out = {}
    for k, v in d.items():
        if k in ("horizon", "dt", "divergence_cap"):
            out[k] = float(v)
        elif k in ("seed", "record_every"):
            out[k] = int(v)
        else:
            out[k] = v
    return out


def _build_attack(node, plant: LtiSystem, bundle, path: str) -> AttackScenario:
    if node is None:
        return AttackScenario()
    node = _require_mapping(node, f"{path}:attack")
    _check_keys(node, _ATTACK_KEYS, f"{path}:attack")
    kwargs = {}
    inode = _require_mapping(node.get("input", {"kind": "none"}), f"{path}:attack.input")
    _check_keys(inode, _INPUT_KEYS, f"{path}:attack.input")
    kind = inode.get("kind", "none")
    start = float(inode.get("start", 10.0))
    kwargs["start_time"] = start
    if kind == "zd":
        kwargs["input_kind"] = "zd"
        if "s0" in inode:
            s0 = float(inode["s0"])
        else:
            zeros = invariant_zeros(plant)
            nmp = [z for z in zeros if z.real > 0]
            if not nmp:
                raise ConfigurationError(
                    f"{path}: plant has no non-minimum-phase zero; give attack.input.s0")
            s0 = float(max(nmp, key=lambda z: z.real).real)
        mag = inode.get("magnitude")
        kwargs["zd"] = attack_direction(plant, s0,
                                        magnitude=None if mag is None else float(mag))
    elif kind == "bias":
        if "bias" not in inode:
            raise ConfigurationError(f"{path}: attack.input.bias required for kind 'bias'")
        kwargs["input_kind"] = "bias"
        kwargs["bias"] = _vector(inode["bias"], f"{path}:attack.input.bias")
    elif kind != "none":
        raise ConfigurationError(f"{path}: attack.input.kind must be none|zd|bias")

    anode = _require_mapping(node.get("aux", {"kind": "none"}), f"{path}:attack.aux")
    _check_keys(anode, _AUX_KEYS, f"{path}:attack.aux")
    akind = anode.get("kind", "none")
    if akind not in ("none", "naive_negation", "covert"):
        raise ConfigurationError(
            f"{path}: attack.aux.kind must be none|naive_negation|covert")
    kwargs["aux_kind"] = akind
    if akind == "covert":
        kwargs["covert_dynamics"] = bundle.aux
        if anode.get("use_plant_b"):
            kwargs["covert_use_plant_b"] = True
            kwargs["plant_b"] = plant.B
    if "output_bias" in node:
        kwargs["output_bias"] = _vector(node["output_bias"], f"{path}:attack.output_bias")
    return AttackScenario(**kwargs)
