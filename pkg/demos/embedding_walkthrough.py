"""Walk through the qubit-into-qudit trick on a GKP circuit.

A half-lattice position shift is not a logical qubit Clifford, so a
qubit tableau cannot follow it.  Reading the same wavefunction as a d2 = 8
GKP codeword turns the shift into the Pauli X_8, and the 8-dimensional
tableau simulates the circuit exactly.  Run with

    python demos/embedding_walkthrough.py
"""

import numpy as np

from cvstab import pipeline, tableau as tb
from cvstab.dsl import parse
from cvstab.encoding import EmbeddingParams, codeword_support, encode_basis_state
from cvstab.oracles import grid

TEXT = """
code gkp d1=2
init 0 0
dispq 0 1/2
homodyne 0
"""

circuit = parse(TEXT)
compiled = pipeline.compile_circuit(circuit)
plan = compiled.plan
print(f"embedding: d1={plan.d1} -> d2={plan.d2} (a={plan.A})")

p = EmbeddingParams(2, plan.A)
print("support of |0_2> in d2:", codeword_support(p, 0))
print(tb.to_text(encode_basis_state(p, 0)))
print(compiled.program)

report = pipeline.run(circuit, verify=True)
print("exact outcome distribution:", report["strong"]["marginals"]["q0"])
print("grid oracle:", report["verification"]["cv"]["distribution"])

# the finite-squeezing picture: peaks of |0_2> land on even d2 = 8 classes
spec = grid.choose_grid(plan.d2)
psi = grid.gkp_wavefunction(spec, 2, 0)
alpha2 = spec.alpha2
peaks = spec.q[np.abs(psi) ** 2 > 0.5 * np.max(np.abs(psi) ** 2)]
print("peak classes mod d2:", np.unique(np.rint(peaks / alpha2).astype(int) % plan.d2))
