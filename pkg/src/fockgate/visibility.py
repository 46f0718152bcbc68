"""Single-photon visibility: signal, worst-case error search, sweeps.

The figure of merit is V = ((s - e)/(s + e) + 1)/2, where s is the
probability of drawing the ideal single-photon input from the source times
the ideal gate success probability, and e is the worst-case deviation
|P - s| of the actual four-fold coincidence probability over all product
qubit inputs.

The error maximization is exact but cheap: for a fixed gate, source and
truncation the coincidence probability is a quadratic form in the monomials
of the qubit amplitudes, so the circuit is propagated once per monomial and
the optimizer only evaluates a small Gram form.  The direct evaluation path
(:func:`coincidence_P`) is kept as the reference; the two are equal to
rounding and cross-checked in the tests.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable

import numpy as np
from scipy.optimize import minimize

from .detection import DetectorPattern, _compiled, _matches, outcome_probability
from .elements import apply_circuit, lifted_circuit, propagate_columns
from .gates import GateDefinition, gate_by_name, run_conditioned
from .sources import (
    DoubleCrystalPlusSPDC,
    QubitAmplitudes,
    SinglePhotons,
    SourceSpec,
    SPDCPlusCoherent,
    TwoSPDC,
    assemble_input,
    source_state,
)
from .state import SparseState


@dataclass(frozen=True)
class OptimizerSettings:
    """Two-stage error search: coarse Bloch grid, then simplex refinement."""

    coarse_points: int = 9
    objective_tol: float = 1e-8
    max_evals: int = 2000


@dataclass(frozen=True)
class VisibilityRecord:
    """One point of a visibility analysis."""

    gate: str
    source: str
    lam: float
    eps: float
    n_max: int
    p1: float
    P1: float
    s: float
    e: float
    V: float
    argmax_angles: tuple[float, float, float, float]

    @property
    def argmax_input(self) -> tuple[QubitAmplitudes, QubitAmplitudes]:
        th_a, ph_a, th_b, ph_b = self.argmax_angles
        return (QubitAmplitudes.from_bloch(th_a, ph_a),
                QubitAmplitudes.from_bloch(th_b, ph_b))


@dataclass(frozen=True)
class SweepGrid:
    """Parameter grid for a visibility sweep.

    ``coincidence_override`` replaces the gate's click pattern with a custom
    one (the escape hatch for non-standard detector placements).
    """

    gate: str
    source_kind: str
    lam_values: tuple[float, ...]
    eps_values: tuple[float, ...] = (0.0,)
    n_max: int = 6
    tie_eps_to_lam: bool = False
    optimizer: OptimizerSettings = OptimizerSettings()
    coincidence_override: DetectorPattern | None = None

    def __post_init__(self):
        if not self.lam_values or not self.eps_values:
            raise ValueError("sweep grid must be nonempty")
        for v in (*self.lam_values, *self.eps_values):
            if abs(v) >= 1.0:
                raise ValueError("source strengths must be < 1")


def make_source(kind: str, lam: float, eps: float) -> SourceSpec:
    """Source spec from a sweep's (kind, lambda, second-strength) triple.

    For the coherent variant the second strength is the coherent amplitude
    alpha, with beta = i*alpha tied to it.
    """
    if kind == "single_photons":
        return SinglePhotons()
    if kind == "two_spdc":
        return TwoSPDC(lam, eps)
    if kind == "spdc_coherent":
        return SPDCPlusCoherent(lam, eps, 1j * eps)
    if kind == "double_crystal":
        return DoubleCrystalPlusSPDC(eps, lam)
    raise ValueError(f"unknown source kind {kind!r}")


# ---------------------------------------------------------------------------
# Coincidence probability
# ---------------------------------------------------------------------------

def coincidence_P(gate: GateDefinition, src: SourceSpec, control: QubitAmplitudes,
                  target: QubitAmplitudes, n_max: int = 6) -> float:
    """Four-fold coincidence probability with non-selective detectors."""
    state = assemble_input(gate, src, control, target, n_max)
    return outcome_probability(apply_circuit(state, gate.circuit), gate.coincidence)


def coincidence_contribution(gate: GateDefinition, component: SparseState) -> float:
    """Raw coincidence weight contributed by one (unnormalized) input component."""
    return outcome_probability(apply_circuit(component, gate.circuit), gate.coincidence)


class CoincidenceEvaluator:
    """Fast P(control, target) for a fixed gate, source and truncation.

    Writing the encoded input as a sum of monomials in the qubit amplitudes
    with fixed coefficient states, the coincidence probability becomes
    m^dag G m for the monomial vector m and the Gram matrix G of the
    propagated, coincidence-projected coefficient states.
    """

    def __init__(self, gate: GateDefinition, src: SourceSpec, n_max: int):
        self.gate = gate
        self.n_max = n_max
        source = source_state(gate, src, n_max)
        layout = gate.layout
        ic_h, ic_v = layout.indices(gate.control_pair)
        it_h, it_v = layout.indices(gate.target_pair)

        groups: dict[tuple[int, int, int, int], dict[tuple[int, ...], complex]] = {}
        for occ, amp in source.items():
            k_c, k_t = occ[ic_h], occ[it_h]
            for j in range(k_c + 1):
                for l in range(k_t + 1):
                    factor = math.sqrt(math.comb(k_c, j) * math.comb(k_t, l))
                    new_occ = list(occ)
                    new_occ[ic_h], new_occ[ic_v] = j, k_c - j
                    new_occ[it_h], new_occ[it_v] = l, k_t - l
                    key = (j, k_c - j, l, k_t - l)
                    bucket = groups.setdefault(key, {})
                    occ_t = tuple(new_occ)
                    bucket[occ_t] = bucket.get(occ_t, 0.0) + amp * factor

        basis, index, mats = lifted_circuit(gate.circuit, layout, n_max)
        self.exponents = np.array(sorted(groups), dtype=float)
        columns = np.zeros((len(basis), len(groups)), dtype=complex)
        for col, key in enumerate(sorted(groups)):
            for occ, amp in groups[key].items():
                columns[index[occ], col] = amp
        propagated = propagate_columns(columns, mats)
        compiled = _compiled(gate.coincidence, layout)
        mask = np.fromiter((_matches(occ, compiled) for occ in basis),
                           dtype=bool, count=len(basis))
        accepted = propagated[mask, :]
        self.gram = accepted.conj().T @ accepted

    def _mono_vector(self, a_h, a_v, b_h, b_v) -> np.ndarray:
        comps = np.array([a_h, a_v, b_h, b_v], dtype=complex)
        return np.prod(comps[None, :] ** self.exponents, axis=1)

    def probability(self, control: QubitAmplitudes, target: QubitAmplitudes) -> float:
        m = self._mono_vector(control.h, control.v, target.h, target.v)
        return float(np.real(m.conj() @ self.gram @ m))

    def probability_from_bloch(self, angles) -> float:
        th_a, ph_a, th_b, ph_b = angles
        return self.probability(QubitAmplitudes.from_bloch(th_a, ph_a),
                                QubitAmplitudes.from_bloch(th_b, ph_b))

    def probability_grid(self, th_a, ph_a, th_b, ph_b) -> np.ndarray:
        """Vectorized evaluation over arrays of Bloch angles."""
        comps = np.stack([
            np.cos(th_a / 2.0).astype(complex),
            np.exp(1j * ph_a) * np.sin(th_a / 2.0),
            np.cos(th_b / 2.0).astype(complex),
            np.exp(1j * ph_b) * np.sin(th_b / 2.0),
        ], axis=-1)
        m = np.prod(comps[:, None, :] ** self.exponents[None, :, :], axis=-1)
        return np.einsum("ij,jk,ik->i", m.conj(), self.gram, m).real


# ---------------------------------------------------------------------------
# Signal, error supremum, visibility
# ---------------------------------------------------------------------------

def single_photon_signal(gate: GateDefinition, src: SourceSpec,
                         n_max: int = 6) -> tuple[float, float, float]:
    """(p1, P1, s): single-photon source weight, ideal success, their product."""
    ideal = source_state(gate, SinglePhotons(), n_max)
    actual = source_state(gate, src, n_max)
    p1 = abs(ideal.inner_product(actual)) ** 2
    _, P1 = run_conditioned(gate, QubitAmplitudes.basis_h(),
                            QubitAmplitudes.basis_h(), n_max)
    return p1, P1, p1 * P1


def error_sup(gate: GateDefinition, src: SourceSpec, n_max: int = 6,
              settings: OptimizerSettings = OptimizerSettings(),
              evaluator: CoincidenceEvaluator | None = None,
              signal: float | None = None) -> tuple[float, tuple[float, float, float, float]]:
    """Maximize |P - s| over product qubit inputs on the Bloch spheres.

    Deterministic: a coarse grid scan (endpoints included, ties to the first
    maximum) seeds one bounded Nelder-Mead refinement; the result is never
    below the best coarse-grid value.
    """
    if signal is None:
        signal = single_photon_signal(gate, src, n_max)[2]
    if evaluator is None:
        evaluator = CoincidenceEvaluator(gate, src, n_max)

    k = settings.coarse_points
    thetas = np.linspace(0.0, math.pi, k)
    phis = np.linspace(0.0, 2.0 * math.pi, k)
    grid = np.array(np.meshgrid(thetas, phis, thetas, phis, indexing="ij"))
    points = grid.reshape(4, -1).T
    values = np.abs(evaluator.probability_grid(points[:, 0], points[:, 1],
                                               points[:, 2], points[:, 3]) - signal)
    best = int(np.argmax(values))
    best_val = float(values[best])
    x0 = points[best]

    def neg_objective(x):
        return -abs(evaluator.probability_from_bloch(x) - signal)

    res = minimize(
        neg_objective, x0, method="Nelder-Mead",
        bounds=[(0.0, math.pi), (0.0, 2.0 * math.pi)] * 2,
        options={"fatol": settings.objective_tol, "xatol": 1e-6,
                 "maxfev": settings.max_evals},
    )
    if -res.fun > best_val:
        return float(-res.fun), tuple(float(v) for v in res.x)
    return best_val, tuple(float(v) for v in x0)


def visibility_value(s: float, e: float) -> float:
    """V = ((s - e)/(s + e) + 1)/2; V = 1 when errors vanish, 1/2 when e = s."""
    if s + e <= 0.0:
        raise ValueError("visibility undefined: signal and error are both zero")
    return 0.5 * ((s - e) / (s + e) + 1.0)


def visibility(gate: GateDefinition, src: SourceSpec, n_max: int = 6,
               settings: OptimizerSettings = OptimizerSettings(),
               evaluator: CoincidenceEvaluator | None = None) -> VisibilityRecord:
    """Assemble the full visibility record for one source configuration."""
    p1, P1, s = single_photon_signal(gate, src, n_max)
    e, angles = error_sup(gate, src, n_max, settings, evaluator=evaluator, signal=s)
    v = visibility_value(s, e)
    lam, eps = _strengths(src)
    return VisibilityRecord(
        gate=gate.name, source=src.kind, lam=lam, eps=eps, n_max=n_max,
        p1=p1, P1=P1, s=s, e=e, V=v, argmax_angles=angles,
    )


def _strengths(src: SourceSpec) -> tuple[float, float]:
    if isinstance(src, TwoSPDC):
        return abs(src.lam), abs(src.eps)
    if isinstance(src, SPDCPlusCoherent):
        return abs(src.lam), abs(src.alpha)
    if isinstance(src, DoubleCrystalPlusSPDC):
        return abs(src.lam), abs(src.eps)
    return 0.0, 0.0


# ---------------------------------------------------------------------------
# Sweeps and scaling
# ---------------------------------------------------------------------------

def _sweep_point(args) -> VisibilityRecord:
    gate_name, source_kind, lam, eps, n_max, settings, coincidence = args
    gate = gate_by_name(gate_name)
    if coincidence is not None:
        from dataclasses import replace
        gate = replace(gate, coincidence=coincidence)
    src = make_source(source_kind, lam, eps)
    return visibility(gate, src, n_max, settings)


def sweep(grid: SweepGrid, jobs: int = 1,
          on_error: str = "log") -> list[VisibilityRecord]:
    """One visibility record per grid point, in grid order.

    Points are independent pure evaluations, so parallel execution cannot
    change the results.  A failing point is logged and skipped when
    ``on_error`` is "log", re-raised when it is "raise".
    """
    tasks = []
    for eps in grid.eps_values:
        for lam in grid.lam_values:
            eff_eps = lam if grid.tie_eps_to_lam else eps
            tasks.append((grid.gate, grid.source_kind, lam, eff_eps,
                          grid.n_max, grid.optimizer, grid.coincidence_override))
    records: list[VisibilityRecord] = []
    if jobs > 1:
        from concurrent.futures import ProcessPoolExecutor
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(_sweep_point_safe, tasks))
    else:
        results = [_sweep_point_safe(t) for t in tasks]
    for task, result in zip(tasks, results):
        if isinstance(result, VisibilityRecord):
            records.append(result)
        elif on_error == "raise":
            raise RuntimeError(f"sweep point {task[:4]} failed: {result}")
        else:
            import logging
            logging.getLogger(__name__).warning(
                "sweep point (gate=%s source=%s lam=%g eps=%g) failed: %s", *task[:4], result)
    return records


def _sweep_point_safe(args):
    try:
        return _sweep_point(args)
    except Exception as exc:  # collected by the caller
        return exc


@dataclass(frozen=True)
class ScalingReport:
    """Log-log fit of the error-to-signal ratio against source strength."""

    records: tuple[VisibilityRecord, ...]
    slope: float
    intercept: float
    curvature: float          # c in V = 1/(1 + c * lam^2)
    max_fit_residual: float


def sklm_scaling_check(lam_values: Iterable[float], n_max: int = 8,
                       settings: OptimizerSettings = OptimizerSettings(),
                       jobs: int = 1) -> ScalingReport:
    """Visibility of the simplified gate with eps = lam and a power-law fit.

    (1 - V)/V equals the error-to-signal ratio, which should grow
    quadratically in the source strength, i.e. V ~ 1/(1 + c * lam^2).
    """
    lam_values = tuple(lam_values)
    grid = SweepGrid(gate="sklm", source_kind="two_spdc",
                     lam_values=lam_values, tie_eps_to_lam=True,
                     n_max=n_max, optimizer=settings)
    records = sweep(grid, jobs=jobs, on_error="raise")
    lams = np.array([r.lam for r in records])
    ratio = np.array([(1.0 - r.V) / r.V for r in records])
    slope, intercept = np.polyfit(np.log(lams), np.log(ratio), 1)
    fitted = slope * np.log(lams) + intercept
    curvature = float(np.exp(intercept))
    return ScalingReport(
        records=tuple(records), slope=float(slope), intercept=float(intercept),
        curvature=curvature,
        max_fit_residual=float(np.max(np.abs(fitted - np.log(ratio)))),
    )


# ---------------------------------------------------------------------------
# CSV output
# ---------------------------------------------------------------------------

CSV_HEADER = "gate,source,lambda,epsilon,n_max,p1,P1,s,e,V,theta_A,phi_A,theta_B,phi_B"


def record_csv_row(r: VisibilityRecord) -> str:
    floats = [r.lam, r.eps]
    fields = [r.gate, r.source]
    fields += [f"{v:.12g}" for v in floats]
    fields.append(str(r.n_max))
    fields += [f"{v:.12g}" for v in (r.p1, r.P1, r.s, r.e, r.V, *r.argmax_angles)]
    return ",".join(fields)


def write_csv(records: Iterable[VisibilityRecord], path: str) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(CSV_HEADER + "\n")
        for r in records:
            fh.write(record_csv_row(r) + "\n")
