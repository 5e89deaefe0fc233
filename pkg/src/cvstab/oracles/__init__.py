"""Independent reference simulators used to check the tableau pipeline.

``dense`` works with full state vectors in C^(d^n), ``grid`` samples
finite-squeezing GKP wavefunctions in position, and ``fock`` holds
truncated Fock amplitudes for rotation-symmetric codes.
"""
