"""What real sources feed into the gates, and which error terms survive.

Downconversion sources emit photon pairs with geometrically decaying
amplitudes, so alongside the wanted one-pair-per-source term the gates see
double-pair and higher contributions.  Postselecting a fourfold coincidence
removes some of these exactly; this script shows which, for each scheme.
"""

import math

import numpy as np

from fockgate import (
    QubitAmplitudes,
    SPDCPlusCoherent,
    TwoSPDC,
    encode_qubit,
    knill_gate,
    sklm_gate,
    spdc_state,
    source_state,
)
from fockgate.state import SparseState
from fockgate.visibility import coincidence_contribution

print("== a downconversion source, truncated at six photons ==")
s = spdc_state(0.3, n_max=6)
for occ, amp in sorted(s.items()):
    print(f"   {occ}: {amp:.6f}")
print("   amplitude ratios follow powers of lambda = 0.3")

print("\n== four-photon input terms of two independent sources ==")
gate = sklm_gate()
lam = eps = 0.2
four = source_state(gate, TwoSPDC(lam, eps), 6).filter_total(4)
for occ, amp in sorted(four.items()):
    names = {m: n for m, n in zip(gate.layout.names, occ) if n}
    print(f"   {names}: {amp:.6f}")

rng = np.random.default_rng(1)
control = QubitAmplitudes.from_bloch(rng.uniform(0, math.pi), rng.uniform(0, 2 * math.pi))
target = QubitAmplitudes.from_bloch(rng.uniform(0, math.pi), rng.uniform(0, 2 * math.pi))


def term(gate, counts, coeff):
    powers = [0] * gate.layout.n_modes
    for name, k in counts.items():
        powers[gate.layout.index(name)] = k
    state = SparseState.vacuum(gate.layout, 6).apply_monomial(tuple(powers), coeff)
    state = encode_qubit(state, gate.control_pair, control)
    return encode_qubit(state, gate.target_pair, target)


print("\n== which double-pair terms survive the fourfold coincidence? ==")
for gate in (sklm_gate(), knill_gate()):
    ct = coincidence_contribution(gate, term(gate, {"c_h": 2, "t_h": 2}, lam ** 2 / 2))
    ab = coincidence_contribution(gate, term(gate, {"a": 2, "b": 2}, eps ** 2 / 2))
    print(f"   {gate.name:>5}: control/target double pair -> {ct:.3e}   "
          f"ancilla double pair -> {ab:.3e}")
print("   the simplified gate postselects both away; the Knill gate keeps an error")

print("\n== coherent ancillas: the beta = i*alpha trick ==")
alpha = 0.1
for phase_name, beta in (("beta = alpha", alpha), ("beta = i*alpha", 1j * alpha)):
    gate = sklm_gate()
    mixed = term(gate, {"c_h": 1, "t_h": 1, "a": 2}, lam * alpha ** 2 / 2).add_scaled(
        term(gate, {"c_h": 1, "t_h": 1, "b": 2}, lam * beta ** 2 / 2))
    print(f"   {phase_name:>14}: mixed-term coincidence weight = "
          f"{coincidence_contribution(gate, mixed):.3e}")

print("\n== what remains is a qubit-independent four-photon error ==")
src = SPDCPlusCoherent(lam, alpha, 1j * alpha)
state = source_state(sklm_gate(), src, 6)
lay = sklm_gate().layout
occ31 = [0] * lay.n_modes
occ31[lay.index("a")], occ31[lay.index("b")] = 3, 1
print(f"   amplitude on three a-photons, one b-photon: {state.amplitude(occ31):.3e}")
print("   (purely imaginary, proportional to alpha^4, untouched by the qubit encoding)")
