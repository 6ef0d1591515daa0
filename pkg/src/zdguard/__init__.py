"""Event-triggered CPS simulation and zero-dynamics attack detection toolbox.

A deterministic desk-scale testbed for an LTI plant with an event-triggered
output channel, an auxiliary system with a self-triggered channel, false data
injection on every channel, observer-based residuals at a command center, and
a trigger-time discrepancy residual that exposes zero-dynamics attacks even
when the channel data itself is made consistent by a covert attacker.
"""

from .attacks import (
    AttackScenario,
    a_u,
    a_z_at_event,
    attack_rate,
    covert_step,
    stealth_equality_gap,
)
from .center import CommandCenter, ResidualRecord, Verdict, isolate
from .design import (
    DesignBundle,
    FeasibilityReport,
    build_augmented,
    design_gains,
    verify_observer_lmi,
    verify_boundedness_lmi,
    zeno_bound,
)
from .engine import MonitorReport, SimConfig, SimTrace, batch, run, run_reference
from .errors import ConfigurationError, DesignError, InfeasibleError, NotAZeroError
from .linalg import (
    LtiSystem,
    StateVector,
    eigenvalues,
    exp_input_map,
    integrate_step,
    is_hurwitz,
    null_space,
    rk4_propagators,
    solve_lyapunov,
    spectral_norm,
)
from .scenario import load_bundle_file, load_plant_file, load_scenario
from .traceio import (
    export_residual_plots_data,
    read_trace_csv,
    write_events_csv,
    write_summary,
    write_trace_csv,
)
from .plant import NoiseSource, PlantSide
from .presets import (
    aircraft,
    aircraft_zero_data,
    calibrate_gamma_x,
    case1_bundle,
    case1_config,
    case2_bundle,
    case2_config,
    preset_config,
    preset_names,
    quadruple_tank,
    tank_zero_data,
)
from .triggering import (
    DynamicEventState,
    SelfTriggerState,
    output_event_violated,
    self_trigger_recompute_on_control_update,
    self_trigger_schedule,
    update_g,
)
from .zeros import (
    RosenbrockPencil,
    ZeroData,
    attack_direction,
    invariant_zeros,
    normal_rank,
    rosenbrock_at,
    zd_signal,
)

__version__ = "0.1.0"
