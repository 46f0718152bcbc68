"""Truncated-Fock-space simulation of postselected linear-optical CNOT gates."""

from .detection import (
    DetectorPattern,
    click,
    coincidence_table,
    conditional_state,
    exactly,
    noclick,
    outcome_probability,
    pattern,
)
from .elements import (
    Beamsplitter,
    HalfWavePlate,
    PhaseShift,
    PolarizingBS,
    apply_circuit,
    apply_mode_matrix,
    circuit_matrix,
    dense_lift_oracle,
    load_circuit,
    mode_matrix,
    save_circuit,
)
from .gates import (
    GATE_NAMES,
    GateDefinition,
    find_accept_pattern,
    gate_by_name,
    ideal_cnot,
    knill_gate,
    pjf_gate,
    run_conditioned,
    sklm_gate,
    truth_table,
)
from .sources import (
    DoubleCrystalPlusSPDC,
    QubitAmplitudes,
    SinglePhotons,
    SPDCPlusCoherent,
    SourceSpec,
    TwoSPDC,
    assemble_input,
    coherent_state,
    double_crystal_state,
    encode_qubit,
    source_state,
    spdc_state,
)
from .state import ModeLayout, SparseState

__all__ = [name for name in dir() if not name.startswith("_")]

__version__ = "0.1.0"
