"""Detector models: click/no-click POVMs, exact-count conditioning, readout.

A non-selective detector only distinguishes "no photons" from "one or more",
so a Click predicate on a bucket of modes means the bucket holds at least
one photon in total.  Exact-count detectors model ideal number-resolving
measurement and are used to condition a state on an accepted pattern.
Modes not covered by any detector are unconstrained (traced out).
"""

from __future__ import annotations

from dataclasses import dataclass

from .state import ModeLayout, SparseState

CLICK = "click"
NOCLICK = "noclick"
EXACTLY = "exactly"


@dataclass(frozen=True)
class Detector:
    """One detector: a bucket of modes plus the observed outcome."""

    name: str
    modes: tuple[str, ...]
    outcome: str
    count: int | None = None

    def __post_init__(self):
        if self.outcome not in (CLICK, NOCLICK, EXACTLY):
            raise ValueError(f"unknown outcome {self.outcome!r}")
        if self.outcome == EXACTLY:
            if self.count is None or self.count < 0:
                raise ValueError("exact-count detector needs count >= 0")
        elif self.count is not None:
            raise ValueError("count only applies to exact-count detectors")
        if len(set(self.modes)) != len(self.modes):
            raise ValueError(f"detector {self.name!r} repeats a mode")


def click(name: str, *modes: str) -> Detector:
    return Detector(name, modes, CLICK)


def noclick(name: str, *modes: str) -> Detector:
    return Detector(name, modes, NOCLICK)


def exactly(name: str, count: int, *modes: str) -> Detector:
    return Detector(name, modes, EXACTLY, count)


@dataclass(frozen=True)
class DetectorPattern:
    """A set of detectors over pairwise-disjoint mode buckets."""

    detectors: tuple[Detector, ...]

    def __post_init__(self):
        seen: set[str] = set()
        for det in self.detectors:
            overlap = seen & set(det.modes)
            if overlap:
                raise ValueError(f"detector buckets overlap on modes {sorted(overlap)}")
            seen.update(det.modes)

    def __iter__(self):
        return iter(self.detectors)

    def monitored_modes(self) -> tuple[str, ...]:
        return tuple(m for det in self.detectors for m in det.modes)

    def to_json_obj(self) -> list[dict]:
        out = []
        for det in self.detectors:
            outcome = {"exactly": det.count} if det.outcome == EXACTLY else det.outcome
            out.append({"detector": det.name, "modes": list(det.modes), "outcome": outcome})
        return out

    @classmethod
    def from_json_obj(cls, obj: list[dict]) -> "DetectorPattern":
        dets = []
        for entry in obj:
            outcome = entry["outcome"]
            modes = tuple(entry["modes"])
            if isinstance(outcome, dict):
                dets.append(exactly(entry["detector"], int(outcome["exactly"]), *modes))
            elif outcome == CLICK:
                dets.append(click(entry["detector"], *modes))
            elif outcome == NOCLICK:
                dets.append(noclick(entry["detector"], *modes))
            else:
                raise ValueError(f"unknown outcome {outcome!r}")
        return cls(tuple(dets))


def pattern(*detectors: Detector) -> DetectorPattern:
    return DetectorPattern(tuple(detectors))


def _compiled(pattern: DetectorPattern, layout: ModeLayout):
    return [
        (layout.indices(det.modes), det.outcome, det.count)
        for det in pattern
    ]


def _matches(occ, compiled) -> bool:
    for idx, outcome, count in compiled:
        total = 0
        for i in idx:
            total += occ[i]
        if outcome == CLICK:
            if total == 0:
                return False
        elif outcome == NOCLICK:
            if total != 0:
                return False
        else:
            if total != count:
                return False
    return True


def outcome_probability(state: SparseState, pat: DetectorPattern) -> float:
    """Probability weight of the basis terms satisfying every detector.

    For a normalized state this is the outcome probability; callers may
    also feed unnormalized components to read off their raw contribution.
    """
    compiled = _compiled(pat, state.layout)
    total = 0.0
    for occ, amp in state.items():
        if _matches(occ, compiled):
            total += amp.real * amp.real + amp.imag * amp.imag
    return total


def conditional_state(state: SparseState, pat: DetectorPattern) -> tuple[SparseState, float]:
    """Project on an exact-count pattern and trace out the measured modes.

    Every detector must be exact-count; buckets of more than one mode are
    only allowed for count 0 (otherwise the per-mode occupation of the
    remainder would be ambiguous).  Returns the normalized remainder on the
    reduced layout together with the projection probability.
    """
    for det in pat:
        if det.outcome != EXACTLY:
            raise ValueError("conditional_state requires exact-count detectors")
        if len(det.modes) > 1 and det.count != 0:
            raise ValueError("multi-mode exact detectors only supported for count 0")
    compiled = _compiled(pat, state.layout)
    measured = set(state.layout.indices(pat.monitored_modes()))
    keep = [i for i in range(state.layout.n_modes) if i not in measured]
    reduced_layout = ModeLayout(tuple(state.layout.names[i] for i in keep))

    amps: dict[tuple[int, ...], complex] = {}
    prob = 0.0
    for occ, amp in state.items():
        if _matches(occ, compiled):
            prob += amp.real * amp.real + amp.imag * amp.imag
            key = tuple(occ[i] for i in keep)
            amps[key] = amps.get(key, 0.0) + amp
    if prob <= 1e-300:
        raise ValueError("conditioning annihilates state: zero-probability outcome")
    reduced = SparseState(reduced_layout, amps, state.n_max)
    return reduced.normalize(), prob


def coincidence_table(state: SparseState, control_pair: tuple[str, str],
                      target_pair: tuple[str, str],
                      ancilla_accept: DetectorPattern) -> dict[str, float]:
    """Polarization-resolved joint click statistics of the qubit modes.

    For each of hh/hv/vh/vv: the named polarization mode of each qubit
    clicks, the orthogonal one does not, and the ancilla accept pattern is
    satisfied.  The four entries sum to the total coincidence success
    probability, not to one.
    """
    c_h, c_v = control_pair
    t_h, t_v = target_pair
    table = {}
    for key, (c_on, c_off, t_on, t_off) in {
        "hh": (c_h, c_v, t_h, t_v),
        "hv": (c_h, c_v, t_v, t_h),
        "vh": (c_v, c_h, t_h, t_v),
        "vv": (c_v, c_h, t_v, t_h),
    }.items():
        dets = (
            click("control", c_on), noclick("control_off", c_off),
            click("target", t_on), noclick("target_off", t_off),
        ) + ancilla_accept.detectors
        table[key] = outcome_probability(state, DetectorPattern(dets))
    return table
