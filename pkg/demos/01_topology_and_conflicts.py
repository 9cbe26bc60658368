"""Build a random multi-hop network and inspect its conflict structures.

Shows how the same topology yields a dense pairwise conflict graph for
single-antenna radios, and a sparser hypergraph once multi-antenna
receivers can nullify interference.
"""

import numpy as np

from spbp import (
    TransceiverSpec,
    assign_link_rates,
    build_ach,
    build_siso_conflict_graph,
    export_edge_list,
    generate_network,
    sample_antennas,
)
from spbp.conflicts import export_conflicts_text

g = generate_network(n=16, seed=42)
rates = assign_link_rates(g, seed=42)
print(f"nodes: {g.num_nodes}, directed links: {g.num_links}, "
      f"mean degree: {g.num_links / g.num_nodes:.1f}")
print(f"long-term rates: min {rates.long_term.min():.1f}, "
      f"mean {rates.long_term.mean():.1f}, max {rates.long_term.max():.1f} packets/slot")

print("\nfirst lines of the edge-list export:")
print("\n".join(export_edge_list(g, rates).splitlines()[:4]))

interference_range = 1.5 * g.comm_radius
siso = build_siso_conflict_graph(g, interference_range)

eta = sample_antennas(g.num_nodes, seed=7)
print(f"\nantenna counts: {np.bincount(eta, minlength=5)[1:]} (1..4 antennas)")
spec = TransceiverSpec(eta)
ach = build_ach(g, spec, interference_range)
ach_off = build_ach(g, spec, interference_range, nullification=False)

print(f"single-antenna conflict edges:          {len(siso.pair_edges)}")
print(f"hypergraph edges (nullification on):    {len(ach.pair_edges)}")
print(f"hypergraph edges (nullification off):   {len(ach_off.pair_edges)}")

all_ones = TransceiverSpec(np.ones(g.num_nodes, dtype=np.int64))
degenerate = build_ach(g, all_ones, interference_range)
print(f"all antennas forced to 1: edges match the plain conflict graph -> "
      f"{degenerate.pair_edges == siso.pair_edges}")

print("\nhyperedge sample (capacity, owner):")
for line in export_conflicts_text(ach).splitlines():
    if line.startswith("H"):
        print(" ", line)
        break
