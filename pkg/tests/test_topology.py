"""Topology generation, link rates, and antenna sampling."""

import numpy as np
import pytest

from spbp.topology import (
    GenerationError,
    GenerationParams,
    LinkRates,
    TransceiverSpec,
    assign_link_rates,
    export_edge_list,
    generate_network,
    sample_antennas,
    sample_realtime_rates,
)


def transitive_closure_connected(n, links):
    """Independent oracle: boolean Floyd-Warshall transitive closure."""
    reach = np.eye(n, dtype=bool)
    for i, j in links:
        reach[i, j] = True
    for k in range(n):
        reach |= reach[:, k:k + 1] & reach[k:k + 1, :]
    return bool(reach.all())


def test_minimal_pair_within_radius():
    params = GenerationParams(comm_radius=1.0, area_side=0.5)
    g = generate_network(2, seed=1, params=params)
    assert {tuple(l) for l in g.links} == {(0, 1), (1, 0)}


def test_random_graph_strongly_connected_by_oracle():
    g = generate_network(20, seed=7)
    assert transitive_closure_connected(g.num_nodes, g.links)


@pytest.mark.parametrize("seed", range(6))
def test_bidirectional_and_connected(seed):
    g = generate_network(15, seed=seed)
    pairs = {tuple(l) for l in g.links}
    assert all((j, i) in pairs for i, j in pairs)
    assert transitive_closure_connected(g.num_nodes, g.links)


def test_generation_failure_when_out_of_range():
    params = GenerationParams(
        comm_radius=0.01, area_side=1000.0, max_retries=3, radius_growth_steps=2
    )
    with pytest.raises(GenerationError):
        generate_network(2, seed=0, params=params)


def test_generation_deterministic():
    a = generate_network(18, seed=3)
    b = generate_network(18, seed=3)
    assert np.array_equal(a.positions, b.positions)
    assert np.array_equal(a.links, b.links)


def test_link_rate_bounds_and_determinism():
    g = generate_network(20, seed=2)
    r1 = assign_link_rates(g, seed=11)
    r2 = assign_link_rates(g, seed=11)
    assert np.array_equal(r1.long_term, r2.long_term)
    assert (r1.long_term >= 10.0).all() and (r1.long_term <= 42.0).all()
    assert not np.array_equal(r1.long_term, assign_link_rates(g, seed=12).long_term)


def test_link_rate_empirical_mean():
    g = generate_network(25, seed=4)
    samples = np.concatenate(
        [assign_link_rates(g, seed=s).long_term for s in range(100_000 // g.num_links + 1)]
    )[:100_000]
    assert samples.mean() == pytest.approx(26.0, abs=0.5)


def test_realtime_bounds_and_determinism():
    g = generate_network(20, seed=5)
    rates = assign_link_rates(g, seed=5)
    rt1 = sample_realtime_rates(rates, t=17, seed=9)
    rt2 = sample_realtime_rates(rates, t=17, seed=9)
    assert np.array_equal(rt1, rt2)
    assert (rt1 >= 0).all()
    assert (np.abs(rt1 - rates.long_term) <= 9.0 + 1e-12).all()
    assert not np.array_equal(rt1, sample_realtime_rates(rates, t=18, seed=9))


def test_realtime_empirical_mean_matches_long_term():
    # symmetric truncation at 3 sigma: empirical mean ~ r_e
    rates = LinkRates(long_term=np.full(1000, 26.37))
    draws = np.concatenate([sample_realtime_rates(rates, t, seed=3) for t in range(100)])
    assert draws.mean() == pytest.approx(26.37, abs=0.05)


def test_antenna_distribution():
    eta = sample_antennas(100_000, seed=1)
    assert set(np.unique(eta)) <= {1, 2, 3, 4}
    freq = np.bincount(eta, minlength=5)[1:] / len(eta)
    assert np.allclose(freq, [0.2, 0.5, 0.2, 0.1], atol=0.01)


def test_antenna_siso_override():
    assert (sample_antennas(50, seed=2, mode="siso") == 1).all()


def test_transceiver_spec_capacities():
    spec = TransceiverSpec(np.array([1, 2, 4]))
    assert spec.eta_tx.tolist() == [1, 2, 4]
    assert spec.eta_rx.tolist() == [1, 2, 4]
    with pytest.raises(ValueError):
        TransceiverSpec(np.array([0, 1]))


def test_export_edge_list_roundtrip():
    g = generate_network(8, seed=6)
    rates = assign_link_rates(g, seed=6)
    lines = export_edge_list(g, rates).strip().splitlines()
    assert len(lines) == g.num_links
    e, i, j, r = lines[0].split()
    assert int(e) == 0 and (int(i), int(j)) == tuple(g.links[0])
    assert float(r) == pytest.approx(rates.long_term[0], abs=1e-5)
