"""Shortest-path biases and how they shape backpressure before any queues build.

The bias gives every packet a downhill gradient toward its destination,
so routing is purposeful from the first slot instead of a random walk.
"""

import numpy as np

from spbp import (
    assign_link_rates,
    compute_bias,
    edge_weights,
    generate_network,
)
from spbp.queueing import backpressures, inject, make_state

g = generate_network(n=12, seed=3)
rates = assign_link_rates(g, seed=3)

for scheme in ("sp_rbar", "sp_rbar_rmax_over_r"):
    w = edge_weights(rates, scheme)
    print(f"{scheme}: weight range [{w.min():.1f}, {w.max():.1f}]")

commodities = [0, 5]
bias = compute_bias(g, edge_weights(rates, "sp_rbar_rmax_over_r"), commodities)
print(f"\nbias toward node 0 (first 6 nodes): {np.round(bias.B[:6, 0], 1)}")
print(f"bias at each destination is zero: "
      f"{bias.B[0, 0] == 0.0 and bias.B[5, 1] == 0.0}")

state = make_state(g, bias)
bp_empty = backpressures(state)
print(f"\nwith empty queues, positive-backpressure links point downhill: "
      f"{int((bp_empty > 0).sum())} of {bp_empty.size} (link, commodity) pairs")

arrivals = np.zeros_like(state.Q)
arrivals[7, 0] = 25  # 25 packets for commodity 0 appear at node 7
inject(state, arrivals)
bp_loaded = backpressures(state)
e_best = int(bp_loaded[:, 0].argmax())
i, j = g.links[e_best]
print(f"after loading node 7, the strongest gradient for commodity 0 is "
      f"link {i}->{j} with backpressure {bp_loaded[e_best, 0]:.1f}")
print(f"biased backlog at node 7: {state.Q[7, 0]} queued + {bias.B[7, 0]:.1f} bias")
