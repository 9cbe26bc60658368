"""Conflict models: SISO conflict graphs and attributed capacity hypergraphs.

Vertices are directed links. Pairwise edges mark pairs that can never be
active together (half-duplex interface conflicts, wireless interference);
per-device tx/rx hyperedges carry stream capacities that bound the total
scheduled cost at each transceiver.
"""

from dataclasses import dataclass, field

import numpy as np

from .topology import ConnectivityGraph, TransceiverSpec


@dataclass
class Hyperedge:
    capacity: int
    members: np.ndarray  # link ids
    kind: str            # 'tx' | 'rx'
    owner: int           # node id


@dataclass
class ConflictStructure:
    """Pair edges plus capacity hyperedges over the links of one network."""

    num_links: int
    pair_matrix: np.ndarray        # (m, m) bool, symmetric, zero diagonal
    hyperedges: list
    neighbors: list = field(init=False, repr=False)   # per link: np array of pair-adjacent links
    tx_capacity: np.ndarray = field(init=False)       # per node
    rx_capacity: np.ndarray = field(init=False)

    def __post_init__(self):
        self.neighbors = [np.nonzero(self.pair_matrix[e])[0] for e in range(self.num_links)]
        n_nodes = 1 + max(h.owner for h in self.hyperedges) if self.hyperedges else 0
        self.tx_capacity = np.ones(n_nodes, dtype=np.int64)
        self.rx_capacity = np.ones(n_nodes, dtype=np.int64)
        for h in self.hyperedges:
            if h.kind == "tx":
                self.tx_capacity[h.owner] = h.capacity
            else:
                self.rx_capacity[h.owner] = h.capacity

    @property
    def pair_edges(self) -> set:
        a, b = np.nonzero(np.triu(self.pair_matrix))
        return {(int(x), int(y)) for x, y in zip(a, b)}


def _node_hyperedges(g: ConnectivityGraph, eta_tx, eta_rx) -> list:
    edges = []
    for i in range(g.num_nodes):
        edges.append(Hyperedge(int(eta_tx[i]), g.out_links[i], "tx", i))
        edges.append(Hyperedge(int(eta_rx[i]), g.in_links[i], "rx", i))
    return edges


def _tx_rx_distance(g: ConnectivityGraph) -> np.ndarray:
    """D[a, b] = distance from transmitter of link a to receiver of link b."""
    tx = g.positions[g.links[:, 0]]
    rx = g.positions[g.links[:, 1]]
    diff = tx[:, None, :] - rx[None, :, :]
    return np.hypot(diff[..., 0], diff[..., 1])


def build_siso_conflict_graph(g: ConnectivityGraph, interference_range: float) -> ConflictStructure:
    """Conflict graph for single-antenna networks.

    Two links conflict iff they share a device (interface conflict) or the
    transmitter of one is within ``interference_range`` of the receiver of
    the other (wireless interference). Unit-capacity tx/rx hyperedges are
    attached so the structure doubles as the eta=1 case of the ACH.
    """
    src, dst = g.links[:, 0], g.links[:, 1]
    share = (
        (src[:, None] == src[None, :])
        | (src[:, None] == dst[None, :])
        | (dst[:, None] == src[None, :])
        | (dst[:, None] == dst[None, :])
    )
    d = _tx_rx_distance(g)
    interf = d <= interference_range
    pair = share | interf | interf.T
    np.fill_diagonal(pair, False)
    ones = np.ones(g.num_nodes, dtype=np.int64)
    return ConflictStructure(g.num_links, pair, _node_hyperedges(g, ones, ones))


def build_ach(
    g: ConnectivityGraph,
    spec: TransceiverSpec,
    interference_range: float,
    nullification: bool = True,
) -> ConflictStructure:
    """Attributed capacity hypergraph for mixed SISO/MIMO transceivers.

    Pair edges: (a) half-duplex conflicts between each device's outgoing and
    incoming links; (b) interference conflicts, kept only when the victim
    receiver cannot nullify them -- with ``nullification`` on, a receiver
    with eta >= 2 suppresses all external interference, a single-antenna
    receiver cannot. Hyperedges: one tx and one rx per device with its
    stream capacities.
    """
    src, dst = g.links[:, 0], g.links[:, 1]
    halfdup = (src[:, None] == dst[None, :]) | (dst[:, None] == src[None, :])
    d = _tx_rx_distance(g)
    if nullification:
        vulnerable = spec.antennas[dst] == 1  # per victim link's receiver
    else:
        vulnerable = np.ones(g.num_links, dtype=bool)
    interf = (d <= interference_range) & vulnerable[None, :]
    pair = halfdup | interf | interf.T
    np.fill_diagonal(pair, False)
    return ConflictStructure(g.num_links, pair, _node_hyperedges(g, spec.eta_tx, spec.eta_rx))


def tx_cost(gamma_sum: float, realtime_rate: float, eta_src: int) -> float:
    """Transmission cost tau of one link.

    Multi-antenna transmitters spend one stream (tau = 1); single-antenna
    transmitters spend the air-time fraction needed to move ``gamma_sum``
    packets, capped at a full slot. A zero-rate TDMA link is saturated.
    """
    if eta_src > 1:
        return 1.0
    if realtime_rate <= 0.0:
        return 1.0
    return min(1.0, gamma_sum / realtime_rate)


def tx_costs(gamma_sums: np.ndarray, realtime: np.ndarray, eta_src: np.ndarray) -> np.ndarray:
    """Vectorized ``tx_cost`` over links."""
    with np.errstate(divide="ignore", invalid="ignore"):
        frac = np.where(realtime > 0.0, gamma_sums / np.maximum(realtime, 1e-300), 1.0)
    tau = np.minimum(1.0, frac)
    return np.where(eta_src > 1, 1.0, tau)


@dataclass
class CostVector:
    """Per-link transmission and (unit) reception costs."""

    tau: np.ndarray
    sigma: np.ndarray

    @classmethod
    def from_assignment(cls, gamma: np.ndarray, realtime: np.ndarray,
                        eta_src: np.ndarray) -> "CostVector":
        tau = tx_costs(gamma.sum(axis=1), realtime, eta_src)
        return cls(tau=tau, sigma=np.ones_like(tau))


def export_conflicts_text(cs: ConflictStructure) -> str:
    """Text form: 'P e1 e2' per pair edge, 'H kind owner capacity e...' per hyperedge."""
    lines = [f"P {a} {b}" for a, b in sorted(cs.pair_edges)]
    for h in cs.hyperedges:
        members = " ".join(str(int(e)) for e in h.members)
        lines.append(f"H {h.kind} {h.owner} {h.capacity} {members}".rstrip())
    return "\n".join(lines) + "\n"
