"""Walk through one basic block on three qubits.

A random U(8) is split into Q, built from seven multiplexors, followed by a
diagonal. The diagonal is then synthesized separately and the product is
checked against the input.
"""

import numpy as np

from bqdsynth import lamat
from bqdsynth.circuit import circuit_matrix, count_gates
from bqdsynth.mux import synth_diagonal
from bqdsynth.synthesis import basic_block_q

u = lamat.haar_random_unitary(3, seed=2024)
block = basic_block_q(u)

q = count_gates(block.q_circuit)
print(f"Q(8): {q.cnot} CNOTs, {q.one_qubit} one-qubit gates")

# Delta * Q must give back U
lhs = block.delta.matrix(3) @ circuit_matrix(block.q_circuit)
print("residual of Delta*Q vs U:", lamat.phase_invariant_distance(lhs, u))

diag = synth_diagonal(block.delta)
d = count_gates(diag)
print(f"Delta on 3 wires: {d.cnot} CNOTs, {d.one_qubit} rotations")

full = circuit_matrix(block.q_circuit)
full = circuit_matrix(diag) @ full
print("residual of the whole circuit:", lamat.phase_invariant_distance(full, u))
print("phases of Delta:", np.round(np.angle(block.delta.phases), 3))
