"""Photon sources and polarization-qubit encoding.

Sources are built as unnormalized creation-operator expansions, truncated at
the joint total-photon bound, then normalized numerically; amplitude ratios
(the physically meaningful content) are exact.  Photons destined for the
control and target qubits start horizontally polarized; the qubit state is
imprinted afterwards by a polarization rotation (:func:`encode_qubit`).
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from typing import Union

import numpy as np

from .elements import apply_mode_matrix
from .state import ModeLayout, SparseState, product_on_layout


@dataclass(frozen=True)
class QubitAmplitudes:
    """Amplitudes (h, v) of a polarization qubit; must be unit norm."""

    h: complex
    v: complex

    def __post_init__(self):
        if abs(abs(self.h) ** 2 + abs(self.v) ** 2 - 1.0) > 1e-12:
            raise ValueError(f"qubit amplitudes not normalized: {self}")

    @classmethod
    def basis_h(cls) -> "QubitAmplitudes":
        return cls(1.0, 0.0)

    @classmethod
    def basis_v(cls) -> "QubitAmplitudes":
        return cls(0.0, 1.0)

    @classmethod
    def plus(cls) -> "QubitAmplitudes":
        r = 1.0 / math.sqrt(2.0)
        return cls(r, r)

    @classmethod
    def from_bloch(cls, theta: float, phi: float) -> "QubitAmplitudes":
        """Bloch-sphere angles theta in [0, pi], phi in [0, 2*pi)."""
        return cls(math.cos(theta / 2.0), cmath.exp(1j * phi) * math.sin(theta / 2.0))


def _check_strength(value: complex, name: str) -> complex:
    value = complex(value)
    if abs(value) >= 1.0:
        raise ValueError(f"source strength |{name}| must be < 1, got {abs(value):.4g}")
    return value


@dataclass(frozen=True)
class SinglePhotons:
    """Ideal inputs: exact Fock photons plus the gate's ideal ancilla."""

    kind = "single_photons"


@dataclass(frozen=True)
class TwoSPDC:
    """Independent downconverters feeding (control, target) and (a, b)."""

    lam: complex
    eps: complex
    kind = "two_spdc"

    def __post_init__(self):
        _check_strength(self.lam, "lambda")
        _check_strength(self.eps, "epsilon")


@dataclass(frozen=True)
class SPDCPlusCoherent:
    """Downconverter on (control, target), weak coherent ancillas on a, b."""

    lam: complex
    alpha: complex
    beta: complex
    kind = "spdc_coherent"

    def __post_init__(self):
        _check_strength(self.lam, "lambda")


@dataclass(frozen=True)
class DoubleCrystalPlusSPDC:
    """Sandwiched-crystal entangled ancilla source plus an independent
    downconverter for the control and target photons."""

    eps: complex
    lam: complex
    kind = "double_crystal"

    def __post_init__(self):
        _check_strength(self.eps, "epsilon")
        _check_strength(self.lam, "lambda")


SourceSpec = Union[SinglePhotons, TwoSPDC, SPDCPlusCoherent, DoubleCrystalPlusSPDC]


def source_spec_from_json(obj: dict) -> SourceSpec:
    """Parse {variant, lambda, epsilon, alpha, beta} (complex as [re, im])."""

    def grab(key, default=0.0):
        val = obj.get(key, default)
        if isinstance(val, (list, tuple)):
            return complex(val[0], val[1])
        return complex(val)

    variant = obj["variant"]
    if variant == "single_photons":
        return SinglePhotons()
    if variant == "two_spdc":
        return TwoSPDC(grab("lambda"), grab("epsilon"))
    if variant == "spdc_coherent":
        beta = grab("beta") if "beta" in obj else 1j * grab("alpha")
        return SPDCPlusCoherent(grab("lambda"), grab("alpha"), beta)
    if variant == "double_crystal":
        return DoubleCrystalPlusSPDC(grab("epsilon"), grab("lambda"))
    raise ValueError(f"unknown source variant {variant!r}")


# ---------------------------------------------------------------------------
# Unnormalized expansions (shared by the public constructors and assembly)
# ---------------------------------------------------------------------------

def spdc_expansion(lam: complex, mode_a: str, mode_b: str,
                   layout: ModeLayout, n_max: int) -> SparseState:
    """Pair expansion: amplitude lam^k on k photons in each of two modes."""
    ia, ib = layout.index(mode_a), layout.index(mode_b)
    if ia == ib:
        raise ValueError("downconverter needs two distinct modes")
    zeros = [0] * layout.n_modes
    amps = {}
    for k in range(n_max // 2 + 1):
        occ = list(zeros)
        occ[ia] = occ[ib] = k
        amps[tuple(occ)] = lam ** k
    return SparseState(layout, amps, n_max)


def double_crystal_expansion(eps: complex, modes: tuple[str, str, str, str],
                             layout: ModeLayout, n_max: int) -> SparseState:
    """Two sandwiched pair sources with a fixed relative phase.

    Modes are (a_h, b_h, a_v, b_v); amplitude eps^(m+k) on m photon pairs
    in the horizontal arms and k pairs in the vertical arms, so the
    two-photon sector is proportional to |1100> + |0011>.
    """
    idx = layout.indices(modes)
    if len(set(idx)) != 4:
        raise ValueError("double-crystal source needs four distinct modes")
    amps = {}
    for m in range(n_max // 2 + 1):
        for k in range(n_max // 2 - m + 1):
            occ = [0] * layout.n_modes
            occ[idx[0]] = occ[idx[1]] = m
            occ[idx[2]] = occ[idx[3]] = k
            amps[tuple(occ)] = eps ** (m + k)
    return SparseState(layout, amps, n_max)


def coherent_expansion(alpha: complex, mode: str,
                       layout: ModeLayout, n_max: int) -> SparseState:
    """Coherent-state expansion: amplitude alpha^n / sqrt(n!) on |n>."""
    i = layout.index(mode)
    amps = {}
    for n in range(n_max + 1):
        occ = [0] * layout.n_modes
        occ[i] = n
        amps[tuple(occ)] = alpha ** n / math.sqrt(math.factorial(n))
    return SparseState(layout, amps, n_max)


# ---------------------------------------------------------------------------
# Public source constructors
# ---------------------------------------------------------------------------

def _own_layout(names: tuple[str, ...], layout: ModeLayout | None) -> ModeLayout:
    return layout if layout is not None else ModeLayout(names)


def spdc_state(lam: complex, mode_a: str = "a", mode_b: str = "b",
               n_max: int = 6, layout: ModeLayout | None = None) -> SparseState:
    """Normalized two-mode downconversion state, truncated at n_max."""
    lam = _check_strength(lam, "lambda")
    layout = _own_layout((mode_a, mode_b), layout)
    return spdc_expansion(lam, mode_a, mode_b, layout, n_max).normalize()


def double_crystal_state(eps: complex, modes: tuple[str, str, str, str] = ("a_h", "b_h", "a_v", "b_v"),
                         n_max: int = 6, layout: ModeLayout | None = None) -> SparseState:
    """Normalized polarization-entangled pair source, truncated at n_max."""
    eps = _check_strength(eps, "epsilon")
    layout = _own_layout(modes, layout)
    return double_crystal_expansion(eps, modes, layout, n_max).normalize()


def coherent_state(alpha: complex, mode: str = "a", n_max: int = 6,
                   layout: ModeLayout | None = None) -> SparseState:
    """Normalized coherent state, truncated at n_max."""
    layout = _own_layout((mode,), layout)
    return coherent_expansion(complex(alpha), mode, layout, n_max).normalize()


def encode_qubit(state: SparseState, pair: tuple[str, str], q: QubitAmplitudes) -> SparseState:
    """Rotate a polarization pair so h-photons carry the qubit (h, v) -> q.

    Realized as the unitary sending h -> q.h * h + q.v * v on the creation
    operators of the pair; photons must sit in the h mode beforehand for the
    encoding to mean "prepare this qubit".
    """
    ih, iv = state.layout.index(pair[0]), state.layout.index(pair[1])
    m = np.eye(state.layout.n_modes, dtype=complex)
    m[ih, ih] = q.h
    m[iv, ih] = q.v
    m[ih, iv] = -np.conj(q.v)
    m[iv, iv] = np.conj(q.h)
    return apply_mode_matrix(state, m)


# ---------------------------------------------------------------------------
# Gate input assembly
# ---------------------------------------------------------------------------

def source_state(gate, src: SourceSpec, n_max: int) -> SparseState:
    """Normalized pre-encoding input for ``gate`` (a GateDefinition).

    All control/target photons sit in the horizontal modes; the ancilla
    occupation is the gate's ideal one for :class:`SinglePhotons` and the
    appropriate truncated expansion otherwise.
    """
    if src.kind not in gate.compatible_sources:
        raise ValueError(f"source {src.kind!r} is not compatible with gate {gate.name!r}")
    layout = gate.layout
    c_h = gate.control_pair[0]
    t_h = gate.target_pair[0]

    if isinstance(src, SinglePhotons):
        pairs = SparseState.vacuum(layout, n_max).apply_monomial(
            _powers(layout, {c_h: 1, t_h: 1}))
        return product_on_layout(pairs, gate.ideal_ancilla(n_max)).normalize()
    if isinstance(src, TwoSPDC):
        ct = spdc_expansion(src.lam, c_h, t_h, layout, n_max)
        ab = spdc_expansion(src.eps, gate.fock_ancilla_modes[0], gate.fock_ancilla_modes[1],
                            layout, n_max)
        return product_on_layout(ct, ab).normalize()
    if isinstance(src, SPDCPlusCoherent):
        ct = spdc_expansion(src.lam, c_h, t_h, layout, n_max)
        ca = coherent_expansion(src.alpha, gate.fock_ancilla_modes[0], layout, n_max)
        cb = coherent_expansion(src.beta, gate.fock_ancilla_modes[1], layout, n_max)
        return product_on_layout(product_on_layout(ct, ca), cb).normalize()
    if isinstance(src, DoubleCrystalPlusSPDC):
        ct = spdc_expansion(src.lam, c_h, t_h, layout, n_max)
        anc = double_crystal_expansion(src.eps, gate.entangled_ancilla_modes, layout, n_max)
        return product_on_layout(ct, anc).normalize()
    raise TypeError(f"unknown source spec {src!r}")


def assemble_input(gate, src: SourceSpec, control: QubitAmplitudes,
                   target: QubitAmplitudes, n_max: int) -> SparseState:
    """Full encoded input state of a gate for one source configuration."""
    state = source_state(gate, src, n_max)
    state = encode_qubit(state, gate.control_pair, control)
    return encode_qubit(state, gate.target_pair, target)


def _powers(layout: ModeLayout, counts: dict[str, int]) -> tuple[int, ...]:
    powers = [0] * layout.n_modes
    for name, count in counts.items():
        powers[layout.index(name)] = count
    return tuple(powers)
