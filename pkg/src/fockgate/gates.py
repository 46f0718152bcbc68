"""The three postselected linear-optical CNOT implementations.

Each gate is a named bundle of mode layout, element sequence, ideal ancilla
preparation, exact-count accepting pattern, and click-based coincidence
pattern.  Constructors verify at build time that the conditioned action on
the computational basis is proportional to CNOT, so a convention slip in an
angle or element ordering fails loudly instead of skewing results.

All angle constants are computed from their closed forms at run time.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Callable, Iterable

import numpy as np

from .detection import DetectorPattern, click, conditional_state, exactly, outcome_probability, pattern
from .elements import (
    Beamsplitter,
    Circuit,
    HalfWavePlate,
    PhaseShift,
    PolarizingBS,
    apply_circuit,
)
from .sources import QubitAmplitudes, SinglePhotons, assemble_input
from .state import ModeLayout, SparseState, product_on_layout

GATE_NAMES = ("sklm", "pjf", "knill")

QUBIT_LAYOUT = ModeLayout(("c_h", "c_v", "t_h", "t_v"))

# Conditioned action in the basis [hh, hv, vh, vv]: control v flips the target.
CNOT_MATRIX = np.array(
    [[1, 0, 0, 0],
     [0, 1, 0, 0],
     [0, 0, 0, 1],
     [0, 0, 1, 0]], dtype=complex)

_MAP_TOL = 1e-9


@dataclass(frozen=True)
class GateDefinition:
    """One named CNOT implementation and everything needed to run it."""

    name: str
    layout: ModeLayout
    circuit: Circuit
    control_pair: tuple[str, str]
    target_pair: tuple[str, str]
    accept: DetectorPattern
    coincidence: DetectorPattern
    nominal_success: float
    ancilla_occupancy: tuple[tuple[str, int], ...]
    entangled_ancilla_modes: tuple[str, str, str, str] | None
    fock_ancilla_modes: tuple[str, str] | None
    compatible_sources: frozenset[str]

    def ideal_ancilla(self, n_max: int) -> SparseState:
        """Ideal ancilla preparation on the gate's full layout."""
        vac = SparseState.vacuum(self.layout, n_max)
        if self.entangled_ancilla_modes is None:
            return vac.apply_monomial(_powers(self.layout, dict(self.ancilla_occupancy)))
        a_h, b_h, a_v, b_v = self.entangled_ancilla_modes
        horizontal = vac.apply_monomial(_powers(self.layout, {a_h: 1, b_h: 1}))
        vertical = vac.apply_monomial(_powers(self.layout, {a_v: 1, b_v: 1}))
        return horizontal.add_scaled(vertical).scaled(1.0 / math.sqrt(2.0))


def _powers(layout: ModeLayout, counts: dict[str, int]) -> tuple[int, ...]:
    powers = [0] * layout.n_modes
    for name, count in counts.items():
        powers[layout.index(name)] = count
    return tuple(powers)


def ideal_cnot(control: QubitAmplitudes, target: QubitAmplitudes) -> SparseState:
    """Reference CNOT output on the four polarization modes."""
    amps = {
        (1, 0, 1, 0): control.h * target.h,
        (1, 0, 0, 1): control.h * target.v,
        (0, 1, 1, 0): control.v * target.v,
        (0, 1, 0, 1): control.v * target.h,
    }
    return SparseState(QUBIT_LAYOUT, amps, 2)


# ---------------------------------------------------------------------------
# Conditioned-map verification
# ---------------------------------------------------------------------------

def _basis_input(layout: ModeLayout, c_mode: str, t_mode: str,
                 ancilla: SparseState, n_max: int) -> SparseState:
    photons = SparseState.vacuum(layout, n_max).apply_monomial(
        _powers(layout, {c_mode: 1, t_mode: 1}))
    return product_on_layout(photons, ancilla)


def conditioned_qubit_map(layout: ModeLayout, circuit: Circuit, ancilla: SparseState,
                          accept: DetectorPattern, control_pair: tuple[str, str],
                          target_pair: tuple[str, str], n_max: int = 4):
    """(4x4 amplitude matrix over [hh,hv,vh,vv], per-column leakage).

    Column j holds the unnormalized accepted amplitudes when the control and
    target photons enter in basis state j; leakage is accepted probability
    that does not land in the single-photon qubit subspace (zero for a
    working gate).
    """
    c_h, c_v = control_pair
    t_h, t_v = target_pair
    combos = [(c_h, t_h), (c_h, t_v), (c_v, t_h), (c_v, t_v)]
    accept_counts = {det.modes[0]: det.count for det in accept}

    t_matrix = np.zeros((4, 4), dtype=complex)
    leakage = np.zeros(4)
    for col, (c_in, t_in) in enumerate(combos):
        out = apply_circuit(_basis_input(layout, c_in, t_in, ancilla, n_max), circuit)
        accepted = outcome_probability(out, accept)
        for row, (c_out, t_out) in enumerate(combos):
            counts = dict(accept_counts)
            counts[c_out] = counts.get(c_out, 0) + 1
            counts[t_out] = counts.get(t_out, 0) + 1
            t_matrix[row, col] = out.amplitude(_powers(layout, counts))
        leakage[col] = accepted - float(np.sum(np.abs(t_matrix[:, col]) ** 2))
    return t_matrix, leakage


def _proportional_to_cnot(t_matrix: np.ndarray, leakage: np.ndarray) -> complex | None:
    """Overall amplitude z with t_matrix = z * CNOT, or None if no match."""
    z = t_matrix[0, 0]
    if abs(z) < 1e-6:
        return None
    if np.max(np.abs(t_matrix - z * CNOT_MATRIX)) > _MAP_TOL:
        return None
    if np.max(np.abs(leakage)) > _MAP_TOL:
        return None
    return z


def find_accept_pattern(layout: ModeLayout, circuit: Circuit, ancilla: SparseState,
                        a_candidates: Iterable[str], b_candidates: Iterable[str],
                        zero_modes: Iterable[str],
                        control_pair: tuple[str, str] = ("c_h", "c_v"),
                        target_pair: tuple[str, str] = ("t_h", "t_v")) -> DetectorPattern:
    """Search single-photon exact detection patterns on the ancilla modes.

    Candidates place one photon on one mode from each candidate group with
    zero photons on the remaining candidate modes and on ``zero_modes``;
    the first pattern whose conditioned map is proportional to CNOT wins.
    Raises if none qualifies, which signals a convention bug upstream.
    """
    a_candidates = tuple(a_candidates)
    b_candidates = tuple(b_candidates)
    zero_modes = tuple(zero_modes)
    for mode_a in a_candidates:
        for mode_b in b_candidates:
            zeros = [m for m in (*a_candidates, *b_candidates, *zero_modes)
                     if m not in (mode_a, mode_b)]
            candidate = pattern(
                exactly("a", 1, mode_a),
                exactly("b", 1, mode_b),
                *(exactly(m, 0, m) for m in zeros),
            )
            t_matrix, leakage = conditioned_qubit_map(
                layout, circuit, ancilla, candidate, control_pair, target_pair)
            if _proportional_to_cnot(t_matrix, leakage) is not None:
                return candidate
    raise RuntimeError(
        "no single-photon accepting pattern reproduces CNOT; "
        "check element conventions and circuit ordering")


def _verified_success(name: str, layout, circuit, ancilla, accept,
                      control_pair, target_pair) -> float:
    t_matrix, leakage = conditioned_qubit_map(
        layout, circuit, ancilla, accept, control_pair, target_pair)
    z = _proportional_to_cnot(t_matrix, leakage)
    if z is None:
        raise RuntimeError(f"{name}: conditioned action is not proportional to CNOT")
    return float(abs(z) ** 2)


# ---------------------------------------------------------------------------
# Gate constructors
# ---------------------------------------------------------------------------

def sklm_angles() -> tuple[float, float]:
    theta1 = math.acos(math.sqrt(5.0 - 3.0 * math.sqrt(2.0)))
    theta2 = math.acos(math.sqrt((3.0 - math.sqrt(2.0)) / 7.0))
    return theta1, theta2


def knill_angles() -> tuple[float, float, float]:
    theta1 = math.acos(math.sqrt(1.0 / 3.0))
    theta3 = math.acos(math.sqrt(0.5 + 1.0 / math.sqrt(6.0)))
    return theta1, -theta1, theta3


@lru_cache(maxsize=None)
def sklm_gate() -> GateDefinition:
    """Simplified sequential-beamsplitter CNOT on eight modes.

    Conditioned on one photon in each of the ancilla modes a and b and none
    in the vacuum modes v1 and v2.  Its success probability carries no
    closed form here and is derived at construction.
    """
    layout = ModeLayout(("c_h", "c_v", "t_h", "t_v", "a", "b", "v1", "v2"))
    theta1, theta2 = sklm_angles()
    quarter = math.pi / 4.0
    circuit: Circuit = (
        Beamsplitter(theta1, "v1", "c_v"),
        Beamsplitter(quarter, "t_h", "t_v"),
        Beamsplitter(theta1, "t_h", "v2"),
        Beamsplitter(quarter, "c_v", "t_h"),
        Beamsplitter(theta2, "a", "c_v"),
        Beamsplitter(theta2, "b", "t_h"),
        Beamsplitter(quarter, "c_v", "t_h"),
        Beamsplitter(quarter, "t_h", "t_v"),
    )
    accept = pattern(
        exactly("a", 1, "a"), exactly("b", 1, "b"),
        exactly("v1", 0, "v1"), exactly("v2", 0, "v2"),
    )
    coincidence = pattern(
        click("c", "c_h", "c_v"), click("t", "t_h", "t_v"),
        click("a", "a"), click("b", "b"),
    )
    ancilla_occupancy = (("a", 1), ("b", 1))
    ancilla = SparseState.vacuum(layout, 4).apply_monomial(
        _powers(layout, dict(ancilla_occupancy)))
    success = _verified_success("sklm", layout, circuit, ancilla, accept,
                                ("c_h", "c_v"), ("t_h", "t_v"))
    return GateDefinition(
        name="sklm", layout=layout, circuit=circuit,
        control_pair=("c_h", "c_v"), target_pair=("t_h", "t_v"),
        accept=accept, coincidence=coincidence, nominal_success=success,
        ancilla_occupancy=ancilla_occupancy, entangled_ancilla_modes=None,
        fock_ancilla_modes=("a", "b"),
        compatible_sources=frozenset({"single_photons", "two_spdc", "spdc_coherent"}),
    )


@lru_cache(maxsize=None)
def pjf_gate() -> GateDefinition:
    """Entangled-ancilla CNOT on ten modes (two dump ports), success 1/16.

    The accepting measurement basis on the ancilla polarization modes is
    discovered by :func:`find_accept_pattern` rather than assumed.
    """
    layout = ModeLayout(("c_h", "c_v", "t_h", "t_v",
                         "a_h", "a_v", "b_h", "b_v", "d", "e"))
    circuit: Circuit = (
        PolarizingBS(("a_h", "a_v"), ("c_h", "c_v")),
        HalfWavePlate("b_h", "b_v"),
        HalfWavePlate("t_h", "t_v"),
        PolarizingBS(("b_h", "b_v"), ("t_h", "t_v")),
        HalfWavePlate("b_h", "b_v"),
        HalfWavePlate("t_h", "t_v"),
        HalfWavePlate("a_h", "a_v"),
        PolarizingBS(("a_h", "a_v"), (None, "e")),
        PolarizingBS(("b_h", "b_v"), (None, "d")),
    )
    entangled_modes = ("a_h", "b_h", "a_v", "b_v")
    vac = SparseState.vacuum(layout, 4)
    ancilla = vac.apply_monomial(_powers(layout, {"a_h": 1, "b_h": 1})).add_scaled(
        vac.apply_monomial(_powers(layout, {"a_v": 1, "b_v": 1}))).scaled(1.0 / math.sqrt(2.0))
    accept = find_accept_pattern(
        layout, circuit, ancilla,
        a_candidates=("a_h", "a_v"), b_candidates=("b_h", "b_v"),
        zero_modes=("d", "e"))
    success = _verified_success("pjf", layout, circuit, ancilla, accept,
                                ("c_h", "c_v"), ("t_h", "t_v"))
    nominal = 1.0 / 16.0
    if abs(success - nominal) > _MAP_TOL:
        raise RuntimeError(f"pjf: success probability {success} differs from 1/16")
    coincidence = pattern(
        click("c", "c_h", "c_v"), click("t", "t_h", "t_v"),
        click("a", "a_h", "a_v"), click("b", "b_h", "b_v"),
    )
    return GateDefinition(
        name="pjf", layout=layout, circuit=circuit,
        control_pair=("c_h", "c_v"), target_pair=("t_h", "t_v"),
        accept=accept, coincidence=coincidence, nominal_success=nominal,
        ancilla_occupancy=(), entangled_ancilla_modes=entangled_modes,
        fock_ancilla_modes=None,
        compatible_sources=frozenset({"single_photons", "double_crystal"}),
    )


@lru_cache(maxsize=None)
def knill_gate() -> GateDefinition:
    """Six-mode CNOT found by numerical search, success 2/27."""
    layout = ModeLayout(("c_h", "c_v", "t_h", "t_v", "a", "b"))
    theta1, theta2, theta3 = knill_angles()
    quarter = math.pi / 4.0
    circuit: Circuit = (
        PhaseShift(math.pi, "a"),
        Beamsplitter(quarter, "t_v", "t_h"),
        Beamsplitter(theta1, "c_v", "a"),
        Beamsplitter(theta1, "t_v", "b"),
        Beamsplitter(theta2, "c_v", "t_v"),
        Beamsplitter(theta3, "a", "b"),
        Beamsplitter(quarter, "t_v", "t_h"),
    )
    accept = pattern(exactly("a", 1, "a"), exactly("b", 1, "b"))
    coincidence = pattern(
        click("c", "c_h", "c_v"), click("t", "t_h", "t_v"),
        click("a", "a"), click("b", "b"),
    )
    ancilla_occupancy = (("a", 1), ("b", 1))
    ancilla = SparseState.vacuum(layout, 4).apply_monomial(
        _powers(layout, dict(ancilla_occupancy)))
    success = _verified_success("knill", layout, circuit, ancilla, accept,
                                ("c_h", "c_v"), ("t_h", "t_v"))
    nominal = 2.0 / 27.0
    if abs(success - nominal) > _MAP_TOL:
        raise RuntimeError(f"knill: success probability {success} differs from 2/27")
    return GateDefinition(
        name="knill", layout=layout, circuit=circuit,
        control_pair=("c_h", "c_v"), target_pair=("t_h", "t_v"),
        accept=accept, coincidence=coincidence, nominal_success=nominal,
        ancilla_occupancy=ancilla_occupancy, entangled_ancilla_modes=None,
        fock_ancilla_modes=("a", "b"),
        compatible_sources=frozenset({"single_photons", "two_spdc"}),
    )


def gate_by_name(name: str) -> GateDefinition:
    constructors: dict[str, Callable[[], GateDefinition]] = {
        "sklm": sklm_gate, "pjf": pjf_gate, "knill": knill_gate,
    }
    try:
        return constructors[name]()
    except KeyError:
        raise ValueError(f"unknown gate {name!r}; choose from {GATE_NAMES}") from None


# ---------------------------------------------------------------------------
# Running a gate with ideal inputs
# ---------------------------------------------------------------------------

def run_conditioned(gate: GateDefinition, control: QubitAmplitudes,
                    target: QubitAmplitudes, n_max: int = 4) -> tuple[SparseState, float]:
    """Ideal-input run: conditioned control/target state and success probability."""
    state = assemble_input(gate, SinglePhotons(), control, target, n_max)
    out = apply_circuit(state, gate.circuit)
    return conditional_state(out, gate.accept)


def truth_table(gate: GateDefinition, n_max: int = 4) -> list[dict]:
    """Fidelity and success probability rows for the standard verification set."""
    plus = QubitAmplitudes.plus()
    h = QubitAmplitudes.basis_h()
    v = QubitAmplitudes.basis_v()
    inputs = [
        ("h,h", h, h), ("h,v", h, v), ("v,h", v, h), ("v,v", v, v),
        ("+,h", plus, h), ("h,+", h, plus),
    ]
    rows = []
    for label, control, target in inputs:
        conditioned, prob = run_conditioned(gate, control, target, n_max)
        rows.append({
            "input": label,
            "success": prob,
            "fidelity": conditioned.fidelity(ideal_cnot(control, target)),
        })
    return rows
