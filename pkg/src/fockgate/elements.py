"""Linear-optical elements, their mode-space matrices, and Fock-space lifting.

Every element is a unitary on the vector of creation operators: applying an
element to a state substitutes a_i^dag -> sum_j M_ji a_j^dag in each basis
term and expands multinomially.  A circuit is an ordered tuple of elements
applied left to right in time; written operator products where the rightmost
factor acts first must therefore be reversed when building a circuit.

Beamsplitter convention (reflectivity cos^2 theta, a reflection so the
element is its own inverse):

    a -> a cos(theta) + b sin(theta)
    b -> a sin(theta) - b cos(theta)
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Union

import numpy as np
import scipy.sparse as sp

from .state import ModeLayout, SparseState, basis_size, occupations_upto

UNITARITY_TOL = 1e-9
_ZERO_TOL = 1e-14

# Largest Fock-basis dimension the dense oracle will build.
ORACLE_DIM_LIMIT = 5000


@dataclass(frozen=True)
class Beamsplitter:
    """Two-mode beamsplitter; ``cos(theta)**2`` is the reflectivity."""

    theta: float
    mode_a: str
    mode_b: str


@dataclass(frozen=True)
class PhaseShift:
    """Phase e^{i theta} on a single mode."""

    theta: float
    mode: str


@dataclass(frozen=True)
class HalfWavePlate:
    """Half-wave plate on a polarization mode pair.

    At waveplate angle phi the (h, v) pair is rotated by the reflection
    [[cos 2phi, sin 2phi], [sin 2phi, -cos 2phi]]; the default phi = pi/8
    enacts h -> (h+v)/sqrt2, v -> (h-v)/sqrt2.
    """

    mode_h: str
    mode_v: str
    angle: float = math.pi / 8


@dataclass(frozen=True)
class PolarizingBS:
    """Polarizing beamsplitter: transmits h, exchanges the two v modes.

    The horizontal partners are untouched by the action and may be ``None``
    when a port carries no horizontal mode (a vacuum dump port).
    """

    pair1: tuple[str | None, str]
    pair2: tuple[str | None, str]


OpticalElement = Union[Beamsplitter, PhaseShift, HalfWavePlate, PolarizingBS]
Circuit = tuple[OpticalElement, ...]


def mode_matrix(element: OpticalElement, layout: ModeLayout) -> np.ndarray:
    """M x M unitary of one element; identity outside the touched modes."""
    m = np.eye(layout.n_modes, dtype=complex)
    if isinstance(element, Beamsplitter):
        i, j = layout.index(element.mode_a), layout.index(element.mode_b)
        _require_distinct(i, j, element)
        c, s = math.cos(element.theta), math.sin(element.theta)
        m[i, i], m[i, j] = c, s
        m[j, i], m[j, j] = s, -c
    elif isinstance(element, PhaseShift):
        i = layout.index(element.mode)
        m[i, i] = complex(math.cos(element.theta), math.sin(element.theta))
    elif isinstance(element, HalfWavePlate):
        i, j = layout.index(element.mode_h), layout.index(element.mode_v)
        _require_distinct(i, j, element)
        c, s = math.cos(2 * element.angle), math.sin(2 * element.angle)
        m[i, i], m[i, j] = c, s
        m[j, i], m[j, j] = s, -c
    elif isinstance(element, PolarizingBS):
        v1, v2 = layout.index(element.pair1[1]), layout.index(element.pair2[1])
        _require_distinct(v1, v2, element)
        m[v1, v1] = m[v2, v2] = 0.0
        m[v1, v2] = m[v2, v1] = 1.0
    else:
        raise TypeError(f"unknown element {element!r}")
    return m


def _require_distinct(i: int, j: int, element) -> None:
    if i == j:
        raise ValueError(f"element references the same mode twice: {element!r}")


def circuit_matrix(circuit: Circuit, layout: ModeLayout) -> np.ndarray:
    """Pre-multiplied mode matrix of a circuit (later elements on the left)."""
    m = np.eye(layout.n_modes, dtype=complex)
    for element in circuit:
        m = mode_matrix(element, layout) @ m
    return m


def check_unitary(m: np.ndarray, tol: float = UNITARITY_TOL) -> None:
    dev = np.max(np.abs(m @ m.conj().T - np.eye(m.shape[0])))
    if dev > tol:
        raise ValueError(f"mode matrix is not unitary (deviation {dev:.2e})")


class _SubstitutionPlan:
    """Per-matrix expansion data: which columns differ from the identity."""

    __slots__ = ("active", "columns")

    def __init__(self, m: np.ndarray):
        n = m.shape[0]
        self.active: list[int] = []
        self.columns: dict[int, tuple[tuple[int, ...], tuple[complex, ...]]] = {}
        for i in range(n):
            col = m[:, i]
            ident = np.zeros(n)
            ident[i] = 1.0
            if np.max(np.abs(col - ident)) <= _ZERO_TOL:
                continue
            targets = tuple(int(j) for j in np.nonzero(np.abs(col) > _ZERO_TOL)[0])
            self.active.append(i)
            self.columns[i] = (targets, tuple(complex(col[j]) for j in targets))


def _compositions(n: int, k: int):
    """All tuples of k non-negative integers summing to n."""
    if k == 1:
        yield (n,)
        return
    for first in range(n + 1):
        for rest in _compositions(n - first, k - 1):
            yield (first,) + rest


def _expand_term(occ, amp, plan: _SubstitutionPlan, out: dict) -> None:
    """Multinomial expansion of one basis term into the accumulator ``out``."""
    # partial: photons added per mode index -> accumulated coefficient
    partial: dict[tuple[tuple[int, int], ...], complex] = {(): amp}
    in_fact = 1.0
    for i in plan.active:
        n_i = occ[i]
        if n_i == 0:
            continue
        in_fact *= math.factorial(n_i)
        targets, coeffs = plan.columns[i]
        branches = []
        for dist in _compositions(n_i, len(targets)):
            c = math.factorial(n_i)
            w = 1.0 + 0.0j
            for d, m_ji in zip(dist, coeffs):
                c //= math.factorial(d)
                w *= m_ji ** d
            if abs(w) > _ZERO_TOL:
                branches.append((dist, c * w))
        new_partial: dict[tuple[tuple[int, int], ...], complex] = {}
        for added, coeff in partial.items():
            for dist, w in branches:
                key = added + tuple((t, d) for t, d in zip(targets, dist) if d)
                new_partial[key] = new_partial.get(key, 0.0) + coeff * w
        partial = new_partial

    root = math.sqrt(in_fact)
    for added, coeff in partial.items():
        new_occ = list(occ)
        for i in plan.active:
            new_occ[i] = 0
        out_fact = 1.0
        counts: dict[int, int] = {}
        for t, d in added:
            counts[t] = counts.get(t, 0) + d
        for t, d in counts.items():
            new_occ[t] = d
            out_fact *= math.factorial(d)
        key = tuple(new_occ)
        out[key] = out.get(key, 0.0) + coeff * math.sqrt(out_fact) / root


def apply_mode_matrix(state: SparseState, m: np.ndarray) -> SparseState:
    """Lift a mode-space unitary onto the Fock space and apply it.

    Total photon number of every term is preserved; the norm is preserved
    to rounding for states wholly below the truncation bound.
    """
    if m.shape != (state.layout.n_modes, state.layout.n_modes):
        raise ValueError("matrix shape does not match layout")
    check_unitary(m)
    plan = _SubstitutionPlan(m)
    out: dict[tuple[int, ...], complex] = {}
    for occ, amp in state.items():
        _expand_term(occ, amp, plan, out)
    return SparseState(state.layout, out, state.n_max)


def apply_element(state: SparseState, element: OpticalElement) -> SparseState:
    return apply_mode_matrix(state, mode_matrix(element, state.layout))


def apply_circuit(state: SparseState, circuit: Circuit, fuse: bool = False) -> SparseState:
    """Apply the elements in order; ``fuse`` premultiplies them first.

    Both paths agree to rounding and are cross-checked in the test suite.
    """
    if fuse:
        return apply_mode_matrix(state, circuit_matrix(circuit, state.layout))
    for element in circuit:
        state = apply_element(state, element)
    return state


# ---------------------------------------------------------------------------
# Dense lifting oracle (test-only verification path)
# ---------------------------------------------------------------------------

def dense_lift_oracle(m: np.ndarray, layout: ModeLayout, n_max: int) -> np.ndarray:
    """Explicit Fock-basis matrix of a mode unitary, for small instances.

    Built independently of the multinomial expansion: each column is
    produced by repeatedly applying the substituted creation operators
    D_i = sum_j M_ji a_j^dag, one photon at a time, to a dense vacuum
    vector.  Intended for differential tests only.
    """
    n_modes = layout.n_modes
    dim = basis_size(n_modes, n_max)
    if dim > ORACLE_DIM_LIMIT:
        raise ValueError(f"oracle basis dimension {dim} exceeds limit {ORACLE_DIM_LIMIT}")
    basis = list(occupations_upto(n_modes, n_max))
    index = {occ: k for k, occ in enumerate(basis)}

    # Dense creation operators on the enumerated basis.
    creators = []
    for j in range(n_modes):
        op = np.zeros((dim, dim), dtype=complex)
        for occ, k in index.items():
            if sum(occ) < n_max:
                lifted = list(occ)
                lifted[j] += 1
                op[index[tuple(lifted)], k] = math.sqrt(occ[j] + 1)
        creators.append(op)
    substituted = [
        sum(m[j, i] * creators[j] for j in range(n_modes)) for i in range(n_modes)
    ]

    out = np.zeros((dim, dim), dtype=complex)
    for occ, k in index.items():
        vec = np.zeros(dim, dtype=complex)
        vec[index[(0,) * n_modes]] = 1.0
        for i, n_i in enumerate(occ):
            for _ in range(n_i):
                vec = substituted[i] @ vec
            vec /= math.sqrt(math.factorial(n_i))
        out[:, k] = vec
    return out


# ---------------------------------------------------------------------------
# Cached sparse lifting (fast path for sweeps; validated against apply_circuit)
# ---------------------------------------------------------------------------

@lru_cache(maxsize=32)
def lifted_circuit(circuit: Circuit, layout: ModeLayout, n_max: int):
    """Basis enumeration plus one sparse lifted matrix per circuit element.

    The matrices are built column-by-column with the same expansion as
    :func:`apply_mode_matrix`, so this path is an accelerator, not an
    independent oracle.
    """
    basis = list(occupations_upto(layout.n_modes, n_max))
    index = {occ: k for k, occ in enumerate(basis)}
    dim = len(basis)
    mats = []
    for element in circuit:
        plan = _SubstitutionPlan(mode_matrix(element, layout))
        rows, cols, vals = [], [], []
        for k, occ in enumerate(basis):
            expanded: dict[tuple[int, ...], complex] = {}
            _expand_term(occ, 1.0, plan, expanded)
            for occ2, amp in expanded.items():
                if abs(amp) > _ZERO_TOL:
                    rows.append(index[occ2])
                    cols.append(k)
                    vals.append(amp)
        mats.append(sp.csr_matrix((vals, (rows, cols)), shape=(dim, dim), dtype=complex))
    return basis, index, mats


def propagate_columns(columns: np.ndarray, mats) -> np.ndarray:
    """Push a (dim x k) block of amplitude columns through the lifted chain."""
    for mat in mats:
        columns = mat @ columns
    return columns


# ---------------------------------------------------------------------------
# Circuit description files
# ---------------------------------------------------------------------------

def circuit_to_json_obj(circuit: Circuit) -> list[dict]:
    """Schema: ordered list of {type, modes, theta}.

    type 'beamsplitter': modes [a, b]; 'phase': modes [a];
    'halfwaveplate': modes [h, v]; 'polarizing_bs': modes [h1, v1, h2, v2]
    with null for an absent horizontal partner.  theta is radians and is
    omitted for the polarizing beamsplitter.
    """
    out = []
    for el in circuit:
        if isinstance(el, Beamsplitter):
            out.append({"type": "beamsplitter", "modes": [el.mode_a, el.mode_b], "theta": el.theta})
        elif isinstance(el, PhaseShift):
            out.append({"type": "phase", "modes": [el.mode], "theta": el.theta})
        elif isinstance(el, HalfWavePlate):
            out.append({"type": "halfwaveplate", "modes": [el.mode_h, el.mode_v], "theta": el.angle})
        elif isinstance(el, PolarizingBS):
            out.append({"type": "polarizing_bs", "modes": [*el.pair1, *el.pair2]})
        else:
            raise TypeError(f"unknown element {el!r}")
    return out


def circuit_from_json_obj(obj: list[dict]) -> Circuit:
    elements: list[OpticalElement] = []
    for entry in obj:
        kind = entry["type"]
        modes = entry["modes"]
        if kind == "beamsplitter":
            elements.append(Beamsplitter(float(entry["theta"]), modes[0], modes[1]))
        elif kind == "phase":
            elements.append(PhaseShift(float(entry["theta"]), modes[0]))
        elif kind == "halfwaveplate":
            elements.append(HalfWavePlate(modes[0], modes[1], float(entry.get("theta", math.pi / 8))))
        elif kind == "polarizing_bs":
            elements.append(PolarizingBS((modes[0], modes[1]), (modes[2], modes[3])))
        else:
            raise ValueError(f"unknown element type {kind!r}")
    return tuple(elements)


def save_circuit(circuit: Circuit, path: str) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(circuit_to_json_obj(circuit), fh, indent=2)


def load_circuit(path: str) -> Circuit:
    with open(path, encoding="utf-8") as fh:
        return circuit_from_json_obj(json.load(fh))
