"""Sparse multimode Fock states and the bosonic ladder algebra.

States are maps from occupation vectors (one photon count per optical mode)
to complex amplitudes, truncated at a total photon number ``n_max``.  All
operations are pure: they return new states and never mutate their inputs,
so states can be shared freely across parallel workers.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from typing import Iterable, Iterator

import numpy as np

# Amplitudes below this magnitude are dropped after every bulk operation.
# Keeps states sparse without disturbing 1e-12-level comparisons.
PRUNE_THRESHOLD = 1e-15


@dataclass(frozen=True)
class ModeLayout:
    """Ordered registry of named optical modes.

    The position of a name fixes the index of that mode in every
    occupation vector, so two states are only compatible when they share
    a layout.
    """

    names: tuple[str, ...]

    def __post_init__(self):
        if len(set(self.names)) != len(self.names):
            raise ValueError(f"duplicate mode names in layout: {self.names}")

    @property
    def n_modes(self) -> int:
        return len(self.names)

    def index(self, name: str) -> int:
        try:
            return self.names.index(name)
        except ValueError:
            raise KeyError(f"mode {name!r} not in layout {self.names}") from None

    def indices(self, names: Iterable[str]) -> tuple[int, ...]:
        return tuple(self.index(n) for n in names)

    def concat(self, other: "ModeLayout") -> "ModeLayout":
        overlap = set(self.names) & set(other.names)
        if overlap:
            raise ValueError(f"layouts share mode names: {sorted(overlap)}")
        return ModeLayout(self.names + other.names)

    def __contains__(self, name: str) -> bool:
        return name in self.names

    def __len__(self) -> int:
        return len(self.names)


def occupations_upto(n_modes: int, n_max: int) -> Iterator[tuple[int, ...]]:
    """Yield every occupation vector with total photon number <= n_max.

    Order is lexicographic in the occupation entries, which fixes the
    basis indexing used by the dense oracle and the lifted matrices.
    """
    if n_modes == 0:
        yield ()
        return
    for head in range(n_max + 1):
        for rest in occupations_upto(n_modes - 1, n_max - head):
            yield (head,) + rest


def basis_size(n_modes: int, n_max: int) -> int:
    """Number of occupation vectors with total <= n_max (stars and bars)."""
    return math.comb(n_max + n_modes, n_modes)


class SparseState:
    """Sparse Fock-space state: occupation vector -> complex amplitude.

    Invariants: every stored key has total photon number <= ``n_max``,
    every key length equals the layout's mode count, and no stored
    amplitude is smaller in magnitude than :data:`PRUNE_THRESHOLD`.
    """

    __slots__ = ("layout", "n_max", "_amp")

    def __init__(self, layout: ModeLayout, amplitudes: dict[tuple[int, ...], complex],
                 n_max: int, *, _validate: bool = True):
        if n_max < 0:
            raise ValueError("n_max must be non-negative")
        self.layout = layout
        self.n_max = int(n_max)
        if _validate:
            amplitudes = self._cleaned(layout, amplitudes, n_max)
        self._amp = amplitudes

    @staticmethod
    def _cleaned(layout, amplitudes, n_max):
        out = {}
        m = layout.n_modes
        for occ, amp in amplitudes.items():
            occ = tuple(int(n) for n in occ)
            if len(occ) != m:
                raise ValueError(f"occupation {occ} has wrong length for {m}-mode layout")
            if any(n < 0 for n in occ):
                raise ValueError(f"negative photon count in {occ}")
            if sum(occ) > n_max:
                continue
            if abs(amp) >= PRUNE_THRESHOLD:
                out[occ] = complex(amp)
        return out

    # -- constructors ------------------------------------------------------

    @classmethod
    def vacuum(cls, layout: ModeLayout, n_max: int) -> "SparseState":
        return cls(layout, {(0,) * layout.n_modes: 1.0}, n_max, _validate=False)

    @classmethod
    def basis_state(cls, layout: ModeLayout, occupation: Iterable[int], n_max: int) -> "SparseState":
        return cls(layout, {tuple(occupation): 1.0}, n_max)

    # -- inspection --------------------------------------------------------

    def amplitude(self, occupation: Iterable[int]) -> complex:
        return self._amp.get(tuple(occupation), 0.0 + 0.0j)

    def items(self):
        return self._amp.items()

    def keys(self):
        return self._amp.keys()

    def __len__(self) -> int:
        return len(self._amp)

    def norm_sq(self) -> float:
        return sum((amp.real * amp.real + amp.imag * amp.imag) for amp in self._amp.values())

    def norm(self) -> float:
        return math.sqrt(self.norm_sq())

    def __repr__(self) -> str:
        head = ", ".join(f"{occ}: {amp:.4g}" for occ, amp in sorted(self._amp.items())[:4])
        more = "" if len(self._amp) <= 4 else f", ... ({len(self._amp)} terms)"
        return f"SparseState({head}{more}; n_max={self.n_max})"

    # -- algebra -----------------------------------------------------------

    def scaled(self, c: complex) -> "SparseState":
        amps = {occ: amp * c for occ, amp in self._amp.items()}
        return SparseState(self.layout, amps, self.n_max)

    def normalize(self) -> "SparseState":
        n = self.norm()
        if n < 1e-300:
            raise ValueError("state annihilated: cannot normalize the zero state")
        return self.scaled(1.0 / n)

    def truncate(self, n: int) -> "SparseState":
        amps = {occ: amp for occ, amp in self._amp.items() if sum(occ) <= n}
        return SparseState(self.layout, amps, min(self.n_max, n), _validate=False)

    def filter_total(self, n: int) -> "SparseState":
        """Keep only the fixed-total-photon-number sector ``n``."""
        amps = {occ: amp for occ, amp in self._amp.items() if sum(occ) == n}
        return SparseState(self.layout, amps, self.n_max, _validate=False)

    def apply_monomial(self, powers: Iterable[int], coeff: complex = 1.0) -> "SparseState":
        """Apply a creation-operator monomial prod_i (a_i^dag)^{p_i} times coeff.

        Each term |n> picks up the bosonic factor
        prod_i sqrt((n_i+1)(n_i+2)...(n_i+p_i)) and shifts to |n+p>.
        Terms pushed past n_max are silently dropped (truncation contract).
        """
        powers = tuple(int(p) for p in powers)
        if len(powers) != self.layout.n_modes:
            raise ValueError("powers length does not match layout")
        if any(p < 0 for p in powers):
            raise ValueError("creation powers must be non-negative")
        shift = sum(powers)
        out: dict[tuple[int, ...], complex] = {}
        for occ, amp in self._amp.items():
            if sum(occ) + shift > self.n_max:
                continue
            factor = 1.0
            for n_i, p_i in zip(occ, powers):
                for k in range(1, p_i + 1):
                    factor *= n_i + k
            new_occ = tuple(n + p for n, p in zip(occ, powers))
            out[new_occ] = out.get(new_occ, 0.0) + amp * coeff * math.sqrt(factor)
        return SparseState(self.layout, out, self.n_max)

    def inner_product(self, other: "SparseState") -> complex:
        """<self|other> over shared occupation vectors."""
        if self.layout != other.layout:
            raise ValueError("inner product requires matching layouts")
        small, big = (self, other) if len(self) <= len(other) else (other, self)
        total = 0.0 + 0.0j
        for occ, amp in small._amp.items():
            other_amp = big._amp.get(occ)
            if other_amp is not None:
                if small is self:
                    total += amp.conjugate() * other_amp
                else:
                    total += other_amp.conjugate() * amp
        return total

    def add_scaled(self, other: "SparseState", c: complex = 1.0) -> "SparseState":
        """Return self + c * other (same layout required)."""
        if self.layout != other.layout:
            raise ValueError("add_scaled requires matching layouts")
        amps = dict(self._amp)
        for occ, amp in other._amp.items():
            amps[occ] = amps.get(occ, 0.0) + c * amp
        return SparseState(self.layout, amps, max(self.n_max, other.n_max))

    def tensor(self, other: "SparseState") -> "SparseState":
        """Tensor product onto the concatenated layout.

        The truncation bound of the product is the sum of the operands'
        bounds; callers wanting a joint cutoff truncate afterwards.
        """
        layout = self.layout.concat(other.layout)
        amps: dict[tuple[int, ...], complex] = {}
        for occ1, amp1 in self._amp.items():
            for occ2, amp2 in other._amp.items():
                amps[occ1 + occ2] = amp1 * amp2
        return SparseState(layout, amps, self.n_max + other.n_max)

    def fidelity(self, other: "SparseState") -> float:
        """|<self|other>|^2 for normalized states."""
        return abs(self.inner_product(other)) ** 2

    # -- serialization -----------------------------------------------------

    def to_json_obj(self) -> list[dict]:
        """Debug form: amplitudes sorted lexicographically by occupation."""
        return [
            {"occupation": list(occ), "re": amp.real, "im": amp.imag}
            for occ, amp in sorted(self._amp.items())
        ]

    def to_json(self, indent: int | None = None) -> str:
        return json.dumps(self.to_json_obj(), indent=indent)


def product_on_layout(s1: SparseState, s2: SparseState) -> SparseState:
    """Combine two states on the *same* layout with disjoint mode support.

    Occupation vectors add entrywise and amplitudes multiply; this is the
    tensor product expressed without reshuffling modes.  Raises if any mode
    is occupied in both operands.
    """
    if s1.layout != s2.layout:
        raise ValueError("product_on_layout requires a shared layout")
    occupied1 = set()
    for occ in s1.keys():
        occupied1.update(i for i, n in enumerate(occ) if n > 0)
    occupied2 = set()
    for occ in s2.keys():
        occupied2.update(i for i, n in enumerate(occ) if n > 0)
    clash = occupied1 & occupied2
    if clash:
        names = [s1.layout.names[i] for i in sorted(clash)]
        raise ValueError(f"operands both occupy modes {names}")
    amps: dict[tuple[int, ...], complex] = {}
    n_max = max(s1.n_max, s2.n_max)
    for occ1, amp1 in s1.items():
        for occ2, amp2 in s2.items():
            occ = tuple(a + b for a, b in zip(occ1, occ2))
            if sum(occ) <= n_max:
                amps[occ] = amps.get(occ, 0.0) + amp1 * amp2
    return SparseState(s1.layout, amps, n_max)


def states_allclose(s1: SparseState, s2: SparseState, atol: float = 1e-10) -> bool:
    """Amplitude-wise comparison over the union of supports."""
    if s1.layout != s2.layout:
        return False
    for occ in set(s1.keys()) | set(s2.keys()):
        if abs(s1.amplitude(occ) - s2.amplitude(occ)) > atol:
            return False
    return True


def dense_vector(state: SparseState, basis_index: dict[tuple[int, ...], int]) -> np.ndarray:
    """Amplitudes of ``state`` as a dense vector over an enumerated basis."""
    vec = np.zeros(len(basis_index), dtype=complex)
    for occ, amp in state.items():
        vec[basis_index[occ]] = amp
    return vec
