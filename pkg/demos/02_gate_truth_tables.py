"""Ideal operation of the three postselected CNOT implementations.

Each gate routes four photons (control, target, two ancillas) through its
element sequence and is conditioned on an exact detection pattern.  With
ideal inputs the conditioned control/target state is a perfect CNOT output;
only the success probability differs between the schemes.
"""

from fockgate import (
    QubitAmplitudes,
    gate_by_name,
    ideal_cnot,
    run_conditioned,
    truth_table,
)

H = QubitAmplitudes.basis_h()
PLUS = QubitAmplitudes.plus()

for name in ("sklm", "pjf", "knill"):
    gate = gate_by_name(name)
    print(f"== {name} ==")
    print(f"   modes: {', '.join(gate.layout.names)}")
    print(f"   accepting pattern: "
          + ", ".join(f"{d.modes[0]}={d.count}" for d in gate.accept))
    print(f"   nominal success probability: {gate.nominal_success:.10f}")
    print(f"   {'input':>6} {'success':>12} {'fidelity':>12}")
    for row in truth_table(gate):
        print(f"   {row['input']:>6} {row['success']:>12.8f} {row['fidelity']:>12.10f}")

    # the gate entangles: a superposed control yields a Bell pair
    state, _ = run_conditioned(gate, PLUS, H)
    bell = ideal_cnot(PLUS, H)
    print(f"   Bell-state fidelity for (+, h) input: {state.fidelity(bell):.10f}\n")
