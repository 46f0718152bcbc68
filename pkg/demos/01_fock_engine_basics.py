"""Tour of the sparse Fock engine: states, beamsplitters, interference.

Everything downstream is built on two ideas shown here: states are sparse
maps from photon-occupation tuples to complex amplitudes, and a linear
element acts by substituting creation operators and expanding.
"""

import math

import numpy as np

from fockgate import Beamsplitter, ModeLayout, SparseState, apply_circuit, dense_lift_oracle
from fockgate.elements import apply_element, mode_matrix
from fockgate.state import dense_vector, occupations_upto

layout = ModeLayout(("a", "b"))
vacuum = SparseState.vacuum(layout, n_max=4)

print("== creating photons ==")
one = vacuum.apply_monomial((1, 0))          # a^dag |0>  ->  |1,0>
two = one.apply_monomial((1, 0))             # a^dag |1,0> -> sqrt(2) |2,0>
print("single photon:", one.to_json())
print("double photon amplitude (sqrt 2):", two.amplitude((2, 0)))

print("\n== a 50:50 beamsplitter on one photon ==")
bs = Beamsplitter(math.pi / 4, "a", "b")
print(apply_element(one, bs).to_json())

print("\n== Hong-Ou-Mandel: two photons meet, |1,1> vanishes ==")
both = vacuum.apply_monomial((1, 1))
out = apply_element(both, bs)
for occ, amp in sorted(out.items()):
    print(f"  {occ}: {amp:+.6f}")
print("  amplitude on (1, 1):", out.amplitude((1, 1)))

print("\n== the beamsplitter convention is an involution ==")
back = apply_circuit(both, (bs, bs))
print("  two passes restore the input:", abs(back.amplitude((1, 1)) - 1) < 1e-12)

print("\n== cross-checking against the dense lifting oracle ==")
matrix = mode_matrix(bs, layout)
oracle = dense_lift_oracle(matrix, layout, n_max=4)
basis = list(occupations_upto(2, 4))
index = {occ: k for k, occ in enumerate(basis)}
worst = 0.0
for occ in basis:
    sparse = apply_element(SparseState.basis_state(layout, occ, 4), bs)
    worst = max(worst, np.max(np.abs(dense_vector(sparse, index) - oracle[:, index[occ]])))
print(f"  max |sparse - dense| over all {len(basis)} basis states: {worst:.2e}")
