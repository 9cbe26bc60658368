"""Per-node per-commodity FIFO queues, biased backlogs, and slot transitions.

Queue lengths live in an integer matrix Q[(node, commodity)]; the FIFO
discipline and per-packet bookkeeping (injection slot, hop count, delivery
slot) are kept alongside so end-to-end metrics can be computed per flow.
All departures in one slot are computed against the slot-start queues:
a packet moves at most one hop per slot.
"""

from collections import deque
from dataclasses import dataclass, field

import numpy as np

from .bias import BiasMatrix
from .topology import ConnectivityGraph

FEAS_EPS = 1e-9


class InfeasibleAssignmentError(RuntimeError):
    """A final rate assignment violated a feasibility constraint (scheduler bug)."""


@dataclass
class PacketRecord:
    id: int
    commodity: int      # destination node
    src: int
    inject_slot: int
    hops: int
    deliver_slot: int   # -1 while pending


class PacketLog:
    """Columnar store of every packet ever injected."""

    def __init__(self):
        self.commodity = []
        self.src = []
        self.inject_slot = []
        self.hops = []
        self.deliver_slot = []

    def new_packet(self, commodity: int, src: int, slot: int) -> int:
        pid = len(self.commodity)
        self.commodity.append(commodity)
        self.src.append(src)
        self.inject_slot.append(slot)
        self.hops.append(0)
        self.deliver_slot.append(-1)
        return pid

    def record(self, pid: int) -> PacketRecord:
        return PacketRecord(
            pid, self.commodity[pid], self.src[pid],
            self.inject_slot[pid], self.hops[pid], self.deliver_slot[pid],
        )

    def __len__(self):
        return len(self.commodity)


@dataclass
class NetworkState:
    """Mutable simulation state owned by a single run."""

    g: ConnectivityGraph
    bias: BiasMatrix
    Q: np.ndarray                 # (n, C) int64
    fifo: list                    # fifo[i][k]: deque of packet ids
    packets: PacketLog
    t: int = 0
    commodities: np.ndarray = field(init=False)
    dest_index: dict = field(init=False)

    def __post_init__(self):
        self.commodities = self.bias.commodities
        self.dest_index = {int(c): k for k, c in enumerate(self.commodities)}

    def total_queued(self) -> int:
        return int(self.Q.sum())

    def delivered_count(self) -> int:
        return sum(1 for d in self.packets.deliver_slot if d >= 0)

    def fifo_lengths(self) -> np.ndarray:
        return np.array(
            [[len(q) for q in row] for row in self.fifo], dtype=np.int64
        )


def make_state(g: ConnectivityGraph, bias: BiasMatrix) -> NetworkState:
    n, C = g.num_nodes, len(bias.commodities)
    fifo = [[deque() for _ in range(C)] for _ in range(n)]
    return NetworkState(
        g=g, bias=bias, Q=np.zeros((n, C), dtype=np.int64),
        fifo=fifo, packets=PacketLog(),
    )


def biased_backlogs(state: NetworkState) -> np.ndarray:
    """U = Q + B for every (node, commodity)."""
    return state.Q + state.bias.B


def biased_backlog(state: NetworkState, i: int, c: int) -> float:
    """Biased backlog of commodity c (destination node id) at node i."""
    k = state.dest_index[c]
    return float(state.Q[i, k] + state.bias.B[i, k])


def backpressures(state: NetworkState) -> np.ndarray:
    """Per-(link, commodity) backpressure: U at the transmitter minus U at the receiver."""
    U = biased_backlogs(state)
    links = state.g.links
    return U[links[:, 0]] - U[links[:, 1]]


def backpressure(state: NetworkState, link, c: int) -> float:
    i, j = link
    return biased_backlog(state, i, c) - biased_backlog(state, j, c)


def inject(state: NetworkState, arrivals: np.ndarray):
    """Append newly generated packets (A matrix, per node x commodity)."""
    for i, k in np.argwhere(arrivals > 0):
        count = int(arrivals[i, k])
        dest = int(state.commodities[k])
        for _ in range(count):
            pid = state.packets.new_packet(dest, int(i), state.t)
            state.fifo[i][k].append(pid)
        state.Q[i, k] += count


def apply_transition(
    state: NetworkState,
    mu: np.ndarray,
    arrivals: np.ndarray,
    realtime: np.ndarray,
    x: np.ndarray | None = None,
) -> NetworkState:
    """One synchronous queue-evolution step.

    Moves ``mu[(link, commodity)]`` packets FIFO head-first against the
    slot-start queues, delivers packets reaching their destination, then
    injects ``arrivals``. Raises :class:`InfeasibleAssignmentError` when mu
    exceeds a real-time link rate or a slot-start queue length.
    """
    g = state.g
    src, dst = g.links[:, 0], g.links[:, 1]
    if (mu < 0).any():
        raise InfeasibleAssignmentError(f"negative rate assignment at slot {state.t}")
    link_tot = mu.sum(axis=1)
    over = link_tot > realtime + FEAS_EPS
    if over.any():
        e = int(np.nonzero(over)[0][0])
        raise InfeasibleAssignmentError(
            f"slot {state.t}: link {e} assigned {link_tot[e]} > rate {realtime[e]:.3f}"
        )
    out_tot = np.zeros_like(state.Q)
    np.add.at(out_tot, src, mu)
    short = out_tot > state.Q
    if short.any():
        i, k = np.argwhere(short)[0]
        raise InfeasibleAssignmentError(
            f"slot {state.t}: node {int(i)} commodity {int(state.commodities[k])} "
            f"assigned {int(out_tot[i, k])} > queue {int(state.Q[i, k])}"
        )
    if x is not None and ((mu.sum(axis=1) > 0) != (x == 1)).any():
        raise InfeasibleAssignmentError(
            f"slot {state.t}: schedule indicator inconsistent with assignment"
        )

    t = state.t
    packets = state.packets
    staged = []  # (dst node, commodity idx, [pids]) applied after all pops
    for e, k in np.argwhere(mu > 0):
        qty = int(mu[e, k])
        i, j = int(src[e]), int(dst[e])
        q = state.fifo[i][k]
        moved = [q.popleft() for _ in range(qty)]
        for pid in moved:
            packets.hops[pid] += 1
        if j == int(state.commodities[k]):
            for pid in moved:
                packets.deliver_slot[pid] = t
        else:
            staged.append((j, int(k), moved))
    state.Q -= out_tot
    for j, k, moved in staged:
        state.fifo[j][k].extend(moved)
        state.Q[j, k] += len(moved)
    inject(state, arrivals)
    state.t = t + 1
    return state
