"""
Fidelity as a measurement overlap
=================================

Fidelity can be read off from measurement statistics: every POVM gives a
classical overlap at least as large as the fidelity, and one POVM reaches it.
"""

import numpy as np

from nobroadcast import (
    bloch_qubit,
    brute_force_min_overlap,
    check_povm_optimality,
    fidelity,
    optimal_povm,
    povm_overlap,
)

# Two qubit states whose Bloch vectors point along z and x
rho0 = bloch_qubit((0.0, 0.0, 0.8))
rho1 = bloch_qubit((0.8, 0.0, 0.0))
print("F =", fidelity(rho0, rho1))

# Measuring in the computational basis is not optimal here
z_basis = [np.diag([1.0, 0.0]), np.diag([0.0, 1.0])]
print("overlap in the z basis:", povm_overlap(rho0, rho1, z_basis))

# Scanning every projective qubit measurement finds the minimum numerically
print("minimum over a 400x400 grid of directions:", brute_force_min_overlap(rho0, rho1, grid=400))

# The constructed POVM attains the fidelity up to rounding
witness = optimal_povm(rho0, rho1)
print("optimal POVM overlap:", povm_overlap(rho0, rho1, witness.optimal_povm))
print("eigenvalues of M:", witness.mu)

report = check_povm_optimality(rho0, rho1, witness.optimal_povm)
print("equality conditions hold:", report.optimal, "max residual", report.residuals.max())

# A singular second state adds a projector onto its null space
pure = bloch_qubit((0.0, 0.0, 1.0))
w = optimal_povm(bloch_qubit((0.3, 0.1, 0.2)), pure)
print("outcomes with a pure rho1:", len(w.optimal_povm), "mu:", w.optimal_povm.mu)
