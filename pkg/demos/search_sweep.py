"""
Searching for a broadcaster
===========================

Hill climbing over dilation unitaries finds an exact broadcaster when the
inputs commute. It falls short when they do not. The shortfall from
hill climbing is evidence only; it depends on the optimizer as much as on
the states. Runs in under half a minute.
"""

import numpy as np

from nobroadcast import SearchConfig, search_broadcast, sweep_csv, sweep_noncommutativity
from nobroadcast.states import bloch_qubit

cfg = SearchConfig(ancilla_dim=2, restarts=4, max_iters=1500, seed=0)

res = search_broadcast(np.diag([0.7, 0.3]), np.diag([0.2, 0.8]), cfg)
print("commuting pair: quality", res.quality, "certified", res.certified)

z, x = bloch_qubit((0, 0, 0.8)), bloch_qubit((0.8, 0, 0))
res = search_broadcast(z, x, cfg)
print("noncommuting pair: quality", res.quality, "certified", res.certified)
print("per-restart best:", np.round(res.restart_qualities, 6))

# Averaging the four marginal fidelities gives a smoother landscape; the
# climber then gets much closer to 1 but still stops short of it.
mean_cfg = SearchConfig(ancilla_dim=2, restarts=2, max_iters=4000, seed=0,
                        objective="mean_marginal_fidelity")
res = search_broadcast(z, x, mean_cfg)
print("noncommuting pair, mean objective:", res.quality)

# Quality against the angle between the Bloch vectors
rows = sweep_noncommutativity(np.linspace(0, np.pi / 2, 5), 0.8,
                              SearchConfig(restarts=2, max_iters=800))
print(sweep_csv(rows))
