"""Shortest-path bias matrices for biased backlogs.

The bias of node i toward commodity c is the weighted shortest-path
distance from i to c on the directed connectivity graph; it is computed
once from long-term link rates and held fixed for a whole run.
"""

from dataclasses import dataclass

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import dijkstra

from .topology import ConnectivityGraph, LinkRates

SCHEMES = ("sp_rbar", "sp_rbar_rmax_over_r")


class UnreachableDestinationError(RuntimeError):
    """Some node cannot reach some commodity (graph not strongly connected)."""


@dataclass
class BiasMatrix:
    """B[i, k]: bias of node i toward the k-th commodity, in packet units."""

    B: np.ndarray              # (n, C) float
    commodities: np.ndarray    # (C,) destination node ids

    def to_csv(self) -> str:
        header = "node," + ",".join(str(int(c)) for c in self.commodities)
        rows = [
            f"{i}," + ",".join(f"{v:.9g}" for v in self.B[i])
            for i in range(self.B.shape[0])
        ]
        return "\n".join([header] + rows) + "\n"


def edge_weights(rates: LinkRates, scheme: str) -> np.ndarray:
    """Per-link shortest-path weights.

    ``sp_rbar``: every link weighs the network-wide mean long-term rate.
    ``sp_rbar_rmax_over_r``: link e weighs rbar * rmax / r_e, favoring
    fast links with short distances.
    """
    r = rates.long_term
    rbar = float(r.mean())
    if scheme == "sp_rbar":
        return np.full_like(r, rbar)
    if scheme == "sp_rbar_rmax_over_r":
        return rbar * r.max() / r
    raise ValueError(f"unknown bias scheme {scheme!r}, expected one of {SCHEMES}")


def compute_bias(g: ConnectivityGraph, weights: np.ndarray, commodities) -> BiasMatrix:
    """Exact weighted shortest-path distances from every node to each commodity.

    Runs Dijkstra from each destination on the reversed graph, so entry
    (i, c) is the forward i -> c distance.
    """
    commodities = np.asarray(sorted(int(c) for c in commodities), dtype=np.int64)
    n = g.num_nodes
    # reversed graph: original (i, j) becomes (j, i)
    adj = csr_matrix(
        (weights, (g.links[:, 1], g.links[:, 0])), shape=(n, n)
    )
    dist = dijkstra(adj, directed=True, indices=commodities)  # (C, n), from c
    B = dist.T.copy()
    if np.isinf(B).any():
        i, k = np.argwhere(np.isinf(B))[0]
        raise UnreachableDestinationError(
            f"node {int(i)} cannot reach commodity {int(commodities[k])}"
        )
    return BiasMatrix(B=B, commodities=commodities)
