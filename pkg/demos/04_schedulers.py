"""One scheduling slot under all three schedulers, on the same state.

The conflict-graph scheduler activates at most one link per device; the
hypergraph schedulers let multi-antenna devices run several streams while
re-shrinking the rate assignments so no packet is promised to two links.
"""

import numpy as np

from spbp import (
    TransceiverSpec,
    assign_link_rates,
    build_ach,
    build_siso_conflict_graph,
    compute_bias,
    edge_weights,
    generate_network,
    sample_antennas,
    sample_realtime_rates,
)
from spbp.commodity import maxu_assign
from spbp.queueing import backpressures, make_state
from spbp.scheduler import lgs_ach, lgs_mimo, lgs_siso, validate_assignment

g = generate_network(n=14, seed=21)
rates = assign_link_rates(g, seed=21)
commodities = [1, 6, 11]
bias = compute_bias(g, edge_weights(rates, "sp_rbar"), commodities)
state = make_state(g, bias)
rng = np.random.default_rng(0)
state.Q = rng.integers(0, 18, size=state.Q.shape).astype(np.int64)

rt = sample_realtime_rates(rates, t=0, seed=21)
assign = maxu_assign(state, rt)
bp = backpressures(state)

rng_range = 1.5 * g.comm_radius
siso = build_siso_conflict_graph(g, rng_range)
spec = TransceiverSpec(sample_antennas(g.num_nodes, seed=5))
ach = build_ach(g, spec, rng_range)
ones = TransceiverSpec(np.ones(g.num_nodes, dtype=np.int64))

x_lgs = lgs_siso(assign.w, siso)
mu_lgs = assign.gamma * (x_lgs == 1)[:, None]
mu_ach, x_ach = lgs_ach(assign.w, rt, assign.gamma, state.Q, bp, g, ach)
trace = []
mu_mimo, x_mimo = lgs_mimo(assign.w, rt, assign.gamma, state.Q, bp, g, spec, ach,
                           trace=trace)

for name, mu, x, conflict, sp in (
    ("conflict-graph greedy", mu_lgs, x_lgs, siso, ones),
    ("hypergraph greedy    ", mu_ach, x_ach, ach, spec),
    ("transceiver protocol ", mu_mimo, x_mimo, ach, spec),
):
    active = int((x == 1).sum())
    moved = int(mu.sum())
    util = float((mu * np.maximum(bp, 0)).sum())
    feasible = validate_assignment(g, conflict, sp, rt, state.Q, mu, x) == []
    print(f"{name}: {active:2d} links active, {moved:3d} packets scheduled, "
          f"scheduled utility {util:8.1f}, feasible: {feasible}")

print(f"\nprotocol decision trace ({len(trace)} records); first three:")
for entry in trace[:3]:
    print(" ", entry)
