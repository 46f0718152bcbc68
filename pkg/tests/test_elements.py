import math

import numpy as np
import pytest

from fockgate.elements import (
    Beamsplitter,
    HalfWavePlate,
    PhaseShift,
    PolarizingBS,
    apply_circuit,
    apply_element,
    apply_mode_matrix,
    circuit_from_json_obj,
    circuit_matrix,
    circuit_to_json_obj,
    dense_lift_oracle,
    lifted_circuit,
    mode_matrix,
    propagate_columns,
)
from fockgate.state import ModeLayout, SparseState, dense_vector, occupations_upto

LAYOUT2 = ModeLayout(("a", "b"))
INV_SQRT2 = 1.0 / math.sqrt(2.0)


def test_beamsplitter_block_theta_zero():
    m = mode_matrix(Beamsplitter(0.0, "a", "b"), LAYOUT2)
    assert np.allclose(m, [[1, 0], [0, -1]])


def test_beamsplitter_block_theta_quarter_pi():
    m = mode_matrix(Beamsplitter(math.pi / 4, "a", "b"), LAYOUT2)
    assert np.allclose(m, [[INV_SQRT2, INV_SQRT2], [INV_SQRT2, -INV_SQRT2]])


def test_pbs_swaps_vertical_modes():
    layout = ModeLayout(("a_h", "a_v", "b_h", "b_v"))
    m = mode_matrix(PolarizingBS(("a_h", "a_v"), ("b_h", "b_v")), layout)
    expect = np.eye(4)
    expect[1, 1] = expect[3, 3] = 0.0
    expect[1, 3] = expect[3, 1] = 1.0
    assert np.allclose(m, expect)


def test_hwp_default_is_hadamard():
    m = mode_matrix(HalfWavePlate("a", "b"), LAYOUT2)
    assert np.allclose(m, np.array([[1, 1], [1, -1]]) * INV_SQRT2)


def test_phase_shift_pi_flips_sign():
    m = mode_matrix(PhaseShift(math.pi, "a"), LAYOUT2)
    assert np.allclose(m, [[-1, 0], [0, 1]], atol=1e-15)


def test_elements_are_unitary():
    layout = ModeLayout(("a_h", "a_v", "b_h", "b_v"))
    for el in (Beamsplitter(0.3, "a_h", "b_h"), PhaseShift(1.1, "a_v"),
               HalfWavePlate("a_h", "a_v", 0.2),
               PolarizingBS(("a_h", "a_v"), ("b_h", "b_v"))):
        m = mode_matrix(el, layout)
        assert np.allclose(m @ m.conj().T, np.eye(4), atol=1e-12)


def test_duplicate_mode_rejected():
    with pytest.raises(ValueError):
        mode_matrix(Beamsplitter(0.1, "a", "a"), LAYOUT2)


def test_single_photon_fifty_fifty():
    s = SparseState.vacuum(LAYOUT2, 4).apply_monomial((1, 0))
    out = apply_element(s, Beamsplitter(math.pi / 4, "a", "b"))
    assert out.amplitude((1, 0)) == pytest.approx(INV_SQRT2)
    assert out.amplitude((0, 1)) == pytest.approx(INV_SQRT2)


def test_hong_ou_mandel_dip():
    s = SparseState.vacuum(LAYOUT2, 4).apply_monomial((1, 1))
    out = apply_element(s, Beamsplitter(math.pi / 4, "a", "b"))
    assert out.amplitude((1, 1)) == 0.0
    assert out.amplitude((2, 0)) == pytest.approx(INV_SQRT2)
    assert out.amplitude((0, 2)) == pytest.approx(-INV_SQRT2)


def test_identity_matrix_preserves_state():
    s = SparseState(LAYOUT2, {(1, 0): 0.6, (0, 2): 0.8j}, 4)
    out = apply_mode_matrix(s, np.eye(2, dtype=complex))
    assert out.amplitude((1, 0)) == pytest.approx(0.6)
    assert out.amplitude((0, 2)) == pytest.approx(0.8j)


def test_beamsplitter_convention_is_involution():
    s = SparseState(LAYOUT2, {(2, 1): 0.5, (1, 0): 0.5, (0, 0): 0.707}, 4)
    bs = Beamsplitter(math.pi / 4, "a", "b")
    out = apply_circuit(s, (bs, bs))
    for occ in set(s.keys()) | set(out.keys()):
        assert out.amplitude(occ) == pytest.approx(s.amplitude(occ), abs=1e-12)


def test_non_unitary_matrix_rejected():
    s = SparseState.vacuum(LAYOUT2, 2)
    with pytest.raises(ValueError, match="unitary"):
        apply_mode_matrix(s, np.array([[1.0, 0.0], [0.0, 0.5]], dtype=complex))


def test_empty_circuit_is_identity():
    s = SparseState(LAYOUT2, {(1, 1): 1.0}, 4)
    out = apply_circuit(s, ())
    assert out.amplitude((1, 1)) == pytest.approx(1.0)


def _random_circuit(rng, layout, n_elements):
    elements = []
    names = layout.names
    for _ in range(n_elements):
        kind = rng.integers(0, 2)
        if kind == 0 and layout.n_modes >= 2:
            i, j = rng.choice(layout.n_modes, size=2, replace=False)
            elements.append(Beamsplitter(float(rng.uniform(0, math.pi)), names[i], names[j]))
        else:
            elements.append(PhaseShift(float(rng.uniform(0, 2 * math.pi)),
                                       names[int(rng.integers(0, layout.n_modes))]))
    return tuple(elements)


def _random_state(rng, layout, n_max):
    occs = list(occupations_upto(layout.n_modes, n_max))
    amps = {occ: complex(*rng.normal(size=2)) for occ in occs}
    return SparseState(layout, amps, n_max).normalize()


def test_photon_number_conservation():
    rng = np.random.default_rng(1)
    layout = ModeLayout(("a", "b", "c"))
    circuit = _random_circuit(rng, layout, 5)
    for n in range(4):
        state = _random_state(rng, layout, 3).filter_total(n)
        if len(state) == 0:
            continue
        out = apply_circuit(state, circuit)
        assert all(sum(occ) == n for occ in out.keys())


def test_norm_preservation_random_circuits():
    rng = np.random.default_rng(2)
    layout = ModeLayout(("a", "b", "c", "d"))
    for _ in range(5):
        circuit = _random_circuit(rng, layout, 6)
        state = _random_state(rng, layout, 4)
        out = apply_circuit(state, circuit)
        assert out.norm() == pytest.approx(state.norm(), abs=1e-10)


def test_fused_equals_sequential():
    rng = np.random.default_rng(3)
    layout = ModeLayout(("a", "b", "c"))
    for _ in range(5):
        circuit = _random_circuit(rng, layout, 8)
        state = _random_state(rng, layout, 4)
        seq = apply_circuit(state, circuit)
        fused = apply_circuit(state, circuit, fuse=True)
        for occ in set(seq.keys()) | set(fused.keys()):
            assert seq.amplitude(occ) == pytest.approx(fused.amplitude(occ), abs=1e-10)


# ---------------------------------------------------------------------------
# Dense oracle differential tests
# ---------------------------------------------------------------------------

def test_oracle_identity_small():
    layout = ModeLayout(("a", "b"))
    m = dense_lift_oracle(np.eye(2, dtype=complex), layout, 1)
    assert m.shape == (3, 3)
    assert np.allclose(m, np.eye(3))


def test_oracle_dimension_guard():
    layout = ModeLayout(tuple(f"m{i}" for i in range(8)))
    with pytest.raises(ValueError, match="dimension"):
        dense_lift_oracle(np.eye(8, dtype=complex), layout, 8)


@pytest.mark.parametrize("n_modes,n_max", [(2, 4), (3, 3), (4, 3), (6, 4)])
def test_oracle_agrees_with_expansion_on_all_basis_states(n_modes, n_max):
    rng = np.random.default_rng(n_modes)
    layout = ModeLayout(tuple(f"m{i}" for i in range(n_modes)))
    matrix = circuit_matrix(_random_circuit(rng, layout, 5), layout)
    oracle = dense_lift_oracle(matrix, layout, n_max)
    basis = list(occupations_upto(n_modes, n_max))
    index = {occ: k for k, occ in enumerate(basis)}
    for occ in basis:
        out = apply_mode_matrix(SparseState.basis_state(layout, occ, n_max), matrix)
        assert np.max(np.abs(dense_vector(out, index) - oracle[:, index[occ]])) < 1e-10


def test_oracle_unitary_per_photon_sector():
    rng = np.random.default_rng(9)
    layout = ModeLayout(("a", "b", "c"))
    matrix = circuit_matrix(_random_circuit(rng, layout, 4), layout)
    n_max = 3
    oracle = dense_lift_oracle(matrix, layout, n_max)
    basis = list(occupations_upto(3, n_max))
    for n in range(n_max + 1):
        idx = [k for k, occ in enumerate(basis) if sum(occ) == n]
        block = oracle[np.ix_(idx, idx)]
        assert np.allclose(block @ block.conj().T, np.eye(len(idx)), atol=1e-10)


def test_oracle_agrees_on_random_states_fifty():
    rng = np.random.default_rng(4)
    layout = ModeLayout(("a", "b"))
    matrix = mode_matrix(Beamsplitter(math.pi / 4, "a", "b"), layout)
    oracle = dense_lift_oracle(matrix, layout, 4)
    basis = list(occupations_upto(2, 4))
    index = {occ: k for k, occ in enumerate(basis)}
    for _ in range(50):
        state = _random_state(rng, layout, 4)
        direct = dense_vector(apply_mode_matrix(state, matrix), index)
        via_oracle = oracle @ dense_vector(state, index)
        assert np.max(np.abs(direct - via_oracle)) < 1e-10


def test_lifted_sparse_chain_matches_apply_circuit():
    rng = np.random.default_rng(5)
    layout = ModeLayout(("a", "b", "c"))
    circuit = _random_circuit(rng, layout, 6)
    basis, index, mats = lifted_circuit(circuit, layout, 3)
    state = _random_state(rng, layout, 3)
    col = dense_vector(state, index).reshape(-1, 1)
    fast = propagate_columns(col, mats)[:, 0]
    slow = dense_vector(apply_circuit(state, circuit), index)
    assert np.max(np.abs(fast - slow)) < 1e-12


def test_circuit_json_roundtrip(tmp_path):
    circuit = (
        Beamsplitter(0.7, "a", "b"),
        PhaseShift(math.pi, "a"),
        HalfWavePlate("a", "b", 0.4),
        PolarizingBS(("a", "b"), (None, "c")),
    )
    assert circuit_from_json_obj(circuit_to_json_obj(circuit)) == circuit
