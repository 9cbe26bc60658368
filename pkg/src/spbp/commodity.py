"""Preliminary per-link rate assignment: exclusive vs MaxU link sharing.

Exclusive selection gives each link's whole integer rate budget to its
single highest-backpressure commodity. MaxU filters commodities with
positive backpressure and non-empty queues, sorts them by decreasing
backpressure, and walks the sorted list assigning the residual budget,
so one link can carry several commodities in a slot.

Both emit the same link utility w = sum_c gamma * max(backpressure, 0),
which is what makes the per-link dominance of MaxU exact.
"""

from dataclasses import dataclass

import numpy as np

from .queueing import NetworkState, backpressures


@dataclass
class RateAssignment:
    """Preliminary (gamma) and final (mu) integer rates plus schedule state.

    ``x`` is -1 while a link is undecided, 0 muted, 1 scheduled.
    """

    gamma: np.ndarray   # (m, C) int64
    mu: np.ndarray      # (m, C) int64
    w: np.ndarray       # (m,) float
    x: np.ndarray       # (m,) int8


def _utilities(gamma: np.ndarray, bp: np.ndarray) -> np.ndarray:
    return (gamma * np.maximum(bp, 0.0)).sum(axis=1)


def _empty_assignment(gamma: np.ndarray, bp: np.ndarray) -> RateAssignment:
    return RateAssignment(
        gamma=gamma,
        mu=np.zeros_like(gamma),
        w=_utilities(gamma, bp),
        x=np.full(gamma.shape[0], -1, dtype=np.int8),
    )


def exclusive_gamma(bp: np.ndarray, q_src: np.ndarray, budget: np.ndarray) -> np.ndarray:
    """Whole budget to the argmax-backpressure commodity, if its backpressure is positive."""
    m = bp.shape[0]
    if bp.shape[1] == 0:
        return np.zeros_like(q_src)
    rows = np.arange(m)
    cstar = bp.argmax(axis=1)  # first max: lowest commodity index wins ties
    ustar = bp[rows, cstar]
    qty = np.where(ustar > 0, np.minimum(budget, q_src[rows, cstar]), 0)
    gamma = np.zeros_like(q_src)
    gamma[rows, cstar] = qty
    return gamma


def maxu_gamma(bp: np.ndarray, q_src: np.ndarray, budget: np.ndarray) -> np.ndarray:
    """Residual-budget walk over commodities sorted by decreasing backpressure.

    Commodities with non-positive backpressure or empty queues are filtered
    out first; ties in the sort fall to the lower commodity index. The walk
    is closed-form: cumulative allocation equals min(cumsum queues, budget).
    """
    alpha = (bp > 0) & (q_src > 0)
    key = np.where(alpha, bp, -np.inf)
    order = np.argsort(-key, axis=1, kind="stable")
    q_eff = np.where(alpha, q_src, 0)
    q_sorted = np.take_along_axis(q_eff, order, axis=1)
    capped = np.minimum(q_sorted.cumsum(axis=1), budget[:, None])
    alloc = np.diff(capped, axis=1, prepend=0)
    gamma = np.zeros_like(q_src)
    np.put_along_axis(gamma, order, alloc, axis=1)
    return gamma


def exclusive_select(state: NetworkState, link) -> int:
    """Optimal commodity (destination node id) of one link: argmax backpressure."""
    e = state.g.link_index[tuple(link)] if not np.isscalar(link) else int(link)
    bp = backpressures(state)[e]
    return int(state.commodities[bp.argmax()])


def exclusive_assign(state: NetworkState, realtime: np.ndarray) -> RateAssignment:
    bp = backpressures(state)
    q_src = state.Q[state.g.links[:, 0]]
    budget = np.floor(realtime).astype(np.int64)
    return _empty_assignment(exclusive_gamma(bp, q_src, budget), bp)


def maxu_assign(state: NetworkState, realtime: np.ndarray) -> RateAssignment:
    bp = backpressures(state)
    q_src = state.Q[state.g.links[:, 0]]
    budget = np.floor(realtime).astype(np.int64)
    return _empty_assignment(maxu_gamma(bp, q_src, budget), bp)


SELECTORS = {"excl": exclusive_assign, "maxu": maxu_assign}
