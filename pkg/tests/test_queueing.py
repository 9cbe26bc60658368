"""Queue state, biased backlogs, and the slot transition."""

import numpy as np
import pytest

from spbp.bias import BiasMatrix
from spbp.queueing import (
    InfeasibleAssignmentError,
    apply_transition,
    backpressure,
    backpressures,
    biased_backlog,
    biased_backlogs,
    inject,
    make_state,
)
from spbp.topology import ConnectivityGraph


def line_state(bias_rows, commodities=(2,)):
    """3-node line 0-1-2, links both ways, explicit bias column(s)."""
    g = ConnectivityGraph(
        positions=np.array([[0.0, 0], [1.0, 0], [2.0, 0]]),
        links=np.array([(0, 1), (1, 0), (1, 2), (2, 1)]),
        comm_radius=1.0,
    )
    bias = BiasMatrix(
        B=np.asarray(bias_rows, dtype=float),
        commodities=np.asarray(commodities, dtype=np.int64),
    )
    return g, make_state(g, bias)


def test_biased_backlog_values():
    g, state = line_state([[4.0], [2.5], [0.0]])
    assert biased_backlog(state, 2, 2) == 0.0
    assert biased_backlog(state, 0, 2) == 4.0
    state.Q[1, 0] = 5
    assert biased_backlog(state, 1, 2) == 7.5
    assert np.allclose(biased_backlogs(state), [[4.0], [7.5], [0.0]])


def test_backpressure_values_and_antisymmetry():
    g, state = line_state([[4.0], [1.0], [0.0]])
    state.Q[0, 0] = 3  # U0 = 7, U1 = 1
    assert backpressure(state, (0, 1), 2) == pytest.approx(6.0)
    assert backpressure(state, (1, 0), 2) == pytest.approx(-6.0)
    bp = backpressures(state)
    e01 = g.link_index[(0, 1)]
    e10 = g.link_index[(1, 0)]
    assert bp[e01, 0] == -bp[e10, 0]


def test_identity_transition():
    g, state = line_state([[2.0], [1.0], [0.0]])
    inject(state, np.array([[3], [0], [0]]))
    q_before = state.Q.copy()
    t_before = state.t
    mu = np.zeros((g.num_links, 1), dtype=np.int64)
    apply_transition(state, mu, np.zeros_like(state.Q), np.full(g.num_links, 10.0))
    assert np.array_equal(state.Q, q_before)
    assert state.t == t_before + 1


def test_single_hop_move_and_delivery():
    g, state = line_state([[2.0], [1.0], [0.0]])
    inject(state, np.array([[5], [0], [0]]))
    mu = np.zeros((g.num_links, 1), dtype=np.int64)
    mu[g.link_index[(0, 1)], 0] = 3
    apply_transition(state, mu, np.zeros_like(state.Q), np.full(g.num_links, 10.0))
    assert state.Q[0, 0] == 2 and state.Q[1, 0] == 3
    # forward to the destination: packets leave the system
    mu2 = np.zeros_like(mu)
    mu2[g.link_index[(1, 2)], 0] = 3
    apply_transition(state, mu2, np.zeros_like(state.Q), np.full(g.num_links, 10.0))
    assert state.Q[1, 0] == 0 and state.Q[2, 0] == 0
    assert state.delivered_count() == 3
    recs = [state.packets.record(p) for p in range(3)]
    assert all(r.deliver_slot == 1 and r.hops == 2 for r in recs)
    assert all(r.deliver_slot >= r.inject_slot for r in recs)


def test_fifo_departure_order():
    g, state = line_state([[2.0], [1.0], [0.0]])
    inject(state, np.array([[4], [0], [0]]))  # packets 0..3
    mu = np.zeros((g.num_links, 1), dtype=np.int64)
    mu[g.link_index[(0, 1)], 0] = 2
    apply_transition(state, mu, np.zeros_like(state.Q), np.full(g.num_links, 10.0))
    assert list(state.fifo[0][0]) == [2, 3]
    assert list(state.fifo[1][0]) == [0, 1]


def test_packet_conservation_random_walk():
    g, state = line_state([[2.0], [1.0], [0.0]])
    rng = np.random.default_rng(0)
    injected = 0
    for t in range(60):
        mu = np.zeros((g.num_links, 1), dtype=np.int64)
        for e in range(g.num_links):
            i = g.links[e, 0]
            room = int(state.Q[i, 0])
            if room:
                mu[e, 0] = rng.integers(0, min(room, 4) + 1)
        # clip per-node totals to queue contents
        for i in range(3):
            out = [e for e in g.out_links[i]]
            while mu[out].sum() > state.Q[i, 0]:
                mu[out[rng.integers(len(out))].item(), 0] = 0
        arrivals = np.zeros_like(state.Q)
        arrivals[0, 0] = rng.integers(0, 3)
        injected += arrivals[0, 0]
        apply_transition(state, mu, arrivals, np.full(g.num_links, 50.0))
        assert (state.Q >= 0).all()
        assert np.array_equal(state.Q, state.fifo_lengths())
        assert state.total_queued() + state.delivered_count() == injected
        assert state.total_queued() + state.delivered_count() == len(state.packets)


def test_infeasible_rate_raises():
    g, state = line_state([[2.0], [1.0], [0.0]])
    inject(state, np.array([[5], [0], [0]]))
    mu = np.zeros((g.num_links, 1), dtype=np.int64)
    mu[g.link_index[(0, 1)], 0] = 5
    with pytest.raises(InfeasibleAssignmentError):
        apply_transition(state, mu, np.zeros_like(state.Q), np.full(g.num_links, 3.0))


def test_infeasible_queue_raises():
    g, state = line_state([[2.0], [1.0], [0.0]])
    inject(state, np.array([[2], [0], [0]]))
    mu = np.zeros((g.num_links, 1), dtype=np.int64)
    mu[g.link_index[(0, 1)], 0] = 3
    with pytest.raises(InfeasibleAssignmentError):
        apply_transition(state, mu, np.zeros_like(state.Q), np.full(g.num_links, 10.0))


def test_inconsistent_indicator_raises():
    g, state = line_state([[2.0], [1.0], [0.0]])
    inject(state, np.array([[2], [0], [0]]))
    mu = np.zeros((g.num_links, 1), dtype=np.int64)
    x = np.zeros(g.num_links, dtype=np.int8)
    mu[g.link_index[(0, 1)], 0] = 1  # mu positive but x says muted
    with pytest.raises(InfeasibleAssignmentError):
        apply_transition(state, mu, np.zeros_like(state.Q), np.full(g.num_links, 10.0), x)


def test_destination_queue_stays_empty():
    g, state = line_state([[2.0], [1.0], [0.0]])
    inject(state, np.array([[0], [4], [0]]))
    mu = np.zeros((g.num_links, 1), dtype=np.int64)
    mu[g.link_index[(1, 2)], 0] = 4
    apply_transition(state, mu, np.zeros_like(state.Q), np.full(g.num_links, 10.0))
    assert state.Q[2, 0] == 0
    assert len(state.fifo[2][0]) == 0
    assert state.delivered_count() == 4
