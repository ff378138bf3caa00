"""
Why cloning fails
=================

A cloner would map rho_s to rho_s ⊗ rho_s. Fidelity is multiplicative, so the
clones would be less alike than the originals, which no channel can do.
"""

import numpy as np

from nobroadcast import (
    bloch_qubit,
    clonable,
    fidelity,
    product_candidate,
    pure_state,
    tensor,
    verify_chain,
)

rho0 = bloch_qubit((0.0, 0.0, 0.8))
rho1 = bloch_qubit((0.6, 0.0, 0.0))
f = fidelity(rho0, rho1)
f2 = fidelity(tensor(rho0, rho0), tensor(rho1, rho1))
print(f"F = {f:.6f}, F of the clones = {f2:.6f}, F^2 = {f * f:.6f}")

# The verifier flags the cloning candidate as inconsistent with any channel
rep = verify_chain(product_candidate(rho0, rho1))
print("marginals are correct:", rep.broadcasts)
print("consistent with a channel:", rep.channel_consistent)
print(rep.notes[0])

# Only identical or orthogonal pairs survive
print("clonable(rho0, rho1):", clonable(rho0, rho1))
print("clonable(|0>, |1>):", clonable(pure_state([1, 0]), pure_state([0, 1])))
print("clonable(rho0, rho0):", clonable(rho0, rho0))
