"""Spin-singlet entanglement simulator.

Prepare two-particle spin states, couple them to three-state pointer
devices, reduce to per-observer density matrices, and put the resulting
statistics through locality, factorization, CHSH, and hidden-variable
analyses, exactly or by seeded Monte Carlo.
"""

from .errors import (
    DimensionError,
    EprSimError,
    EventError,
    FrameError,
    LabelError,
    ScenarioError,
    ShapeError,
    StateError,
    UndefinedConditionalError,
)
from .evolution import (
    FreeEvolution,
    equal_outcome_probability,
    evolve_back,
    gauge_equivalence_check,
    retrodicted_pair_state,
)
from .linalg import (
    SubsystemLayout,
    assert_density_matrix,
    dagger,
    is_hermitian,
    kron,
    kron_all,
    min_eigenvalue,
    partial_trace,
)
from .locality import (
    ConditionalEvent,
    CorrelationTable,
    HiddenVariableModel,
    bell_locality_test,
    chsh_report,
    chsh_value,
    conditional_probability,
    estimate_correlations,
    exact_correlation_table,
    factorization_test,
    joint_table,
    lhv_brute_force,
    pair_records,
)
from .measurement import (
    MeasurementRecord,
    PointerDevice,
    attach_device,
    measure_unitary,
    measurement_unitary,
    records_to_csv,
    records_to_jsonl,
    sample_outcomes,
)
from .observers import (
    ObserverFrame,
    carol_view,
    equal_reading_probability,
    matrix_from_json,
    matrix_payload,
    matrix_to_json,
    no_signaling_check,
    pointer_joint_distribution,
    reduced_view,
)
from .quantum import (
    IDENTITY_2,
    SIGMA_X,
    SIGMA_Y,
    SIGMA_Z,
    X_AXIS,
    Y_AXIS,
    Z_AXIS,
    MeasurementAxis,
    Outcome,
    QuantumSystem,
    angle_between,
    axes_equal,
    axis_ket,
    born_probability,
    make_singlet,
    outcome_distribution,
    pair_correlation,
    projector,
    spin_operator,
)
from .runner import execute, run_scenario
from .scenario import (
    ANALYSES,
    AxisSpec,
    RetrodictionSpec,
    Scenario,
    StateSpec,
    StationSpec,
    bundled_scenarios,
    load_scenario,
    scenario_from_dict,
    scenario_from_toml,
    scenario_to_dict,
    scenario_to_toml,
)

__version__ = "0.1.0"

__all__ = [
    "ANALYSES",
    "AxisSpec",
    "ConditionalEvent",
    "CorrelationTable",
    "DimensionError",
    "EprSimError",
    "EventError",
    "FrameError",
    "FreeEvolution",
    "HiddenVariableModel",
    "IDENTITY_2",
    "LabelError",
    "MeasurementAxis",
    "MeasurementRecord",
    "ObserverFrame",
    "Outcome",
    "PointerDevice",
    "QuantumSystem",
    "RetrodictionSpec",
    "Scenario",
    "ScenarioError",
    "ShapeError",
    "SIGMA_X",
    "SIGMA_Y",
    "SIGMA_Z",
    "StateError",
    "StateSpec",
    "StationSpec",
    "SubsystemLayout",
    "UndefinedConditionalError",
    "X_AXIS",
    "Y_AXIS",
    "Z_AXIS",
    "angle_between",
    "assert_density_matrix",
    "attach_device",
    "axes_equal",
    "axis_ket",
    "bell_locality_test",
    "born_probability",
    "bundled_scenarios",
    "carol_view",
    "chsh_report",
    "chsh_value",
    "conditional_probability",
    "dagger",
    "equal_outcome_probability",
    "equal_reading_probability",
    "estimate_correlations",
    "evolve_back",
    "exact_correlation_table",
    "execute",
    "factorization_test",
    "gauge_equivalence_check",
    "is_hermitian",
    "joint_table",
    "kron",
    "kron_all",
    "lhv_brute_force",
    "load_scenario",
    "make_singlet",
    "matrix_from_json",
    "matrix_payload",
    "matrix_to_json",
    "measure_unitary",
    "measurement_unitary",
    "min_eigenvalue",
    "no_signaling_check",
    "outcome_distribution",
    "pair_correlation",
    "pair_records",
    "partial_trace",
    "pointer_joint_distribution",
    "projector",
    "records_to_csv",
    "records_to_jsonl",
    "reduced_view",
    "retrodicted_pair_state",
    "run_scenario",
    "sample_outcomes",
    "scenario_from_dict",
    "scenario_from_toml",
    "scenario_to_dict",
    "scenario_to_toml",
    "spin_operator",
    "__version__",
]
