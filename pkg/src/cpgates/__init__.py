"""Composite-pulse phase gates for driven two-level systems.

Build error-resilient phase gates from pairs of composite pulse sequences,
compute their propagators under systematic parameter errors, and map gate
infidelity across parameter sweeps.
"""

__version__ = "0.1.0"

from .su2 import (
    IDENTITY,
    Propagator,
    TargetGate,
    compose,
    infidelity,
    phase_invariant_infidelity,
    sequence_propagator,
    target_gate_matrix,
    with_phase,
)
from .pulses import (
    ConstantDetuning,
    DEFAULT_CONFIG,
    IntegrationError,
    IntegratorConfig,
    PulseSpec,
    TanhChirp,
    constituent_propagator,
    integrate_pulse,
    resonant_rect_propagator,
    transition_probability,
)
from .sequences import (
    CompositePhases,
    PhaseGateSequence,
    broadband_phases,
    composite_phases,
    detuning_phases,
    gate_propagator,
    make_phase_gate_sequence,
    sequence_table,
    universal_phases,
)
from .scan import (
    ScanError,
    ScanResult,
    SweepAxis,
    error_order,
    high_fidelity_bandwidth,
    read_scan_csv,
    save_scan_csv,
    scan_1d,
    scan_2d,
    write_scan_csv,
)
from .presets import PRESETS, preset_jobs

__all__ = [
    "__version__",
    "IDENTITY",
    "Propagator",
    "TargetGate",
    "compose",
    "infidelity",
    "phase_invariant_infidelity",
    "sequence_propagator",
    "target_gate_matrix",
    "with_phase",
    "ConstantDetuning",
    "DEFAULT_CONFIG",
    "IntegrationError",
    "IntegratorConfig",
    "PulseSpec",
    "TanhChirp",
    "constituent_propagator",
    "integrate_pulse",
    "resonant_rect_propagator",
    "transition_probability",
    "CompositePhases",
    "PhaseGateSequence",
    "broadband_phases",
    "composite_phases",
    "detuning_phases",
    "gate_propagator",
    "make_phase_gate_sequence",
    "sequence_table",
    "universal_phases",
    "ScanError",
    "ScanResult",
    "SweepAxis",
    "error_order",
    "high_fidelity_bandwidth",
    "read_scan_csv",
    "save_scan_csv",
    "scan_1d",
    "scan_2d",
    "write_scan_csv",
    "PRESETS",
    "preset_jobs",
]
