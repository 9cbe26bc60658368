"""Random wireless multi-hop network generation with stochastic link rates.

Networks are drawn from a 2D point process on a square whose side is scaled
so that the expected node degree is ~6 at the default communication radius.
Every link is directed; generation emits both directions of each in-range
pair, and rejects samples that are not strongly connected.
"""

from dataclasses import dataclass, field

import numpy as np

RATE_LOW = 10.0
RATE_HIGH = 42.0
RATE_STD = 3.0
RATE_TRUNC = 9.0

ANTENNA_VALUES = (1, 2, 3, 4)
ANTENNA_PROBS = (0.2, 0.5, 0.2, 0.1)


class GenerationError(RuntimeError):
    """No strongly connected sample found within the retry budget."""


@dataclass(frozen=True)
class GenerationParams:
    comm_radius: float = 1.0
    area_side: float | None = None  # None: derived from target_degree
    target_degree: float = 6.0
    max_retries: int = 50
    radius_growth_steps: int = 10


@dataclass
class ConnectivityGraph:
    """Directed link topology over nodes placed in the plane.

    ``links`` is an (m, 2) integer array of (src, dst) pairs; the row index
    is the link id and is the total order used for tie-breaking everywhere.
    """

    positions: np.ndarray          # (n, 2) float
    links: np.ndarray              # (m, 2) int
    comm_radius: float
    out_links: list = field(init=False, repr=False)
    in_links: list = field(init=False, repr=False)
    link_index: dict = field(init=False, repr=False)

    def __post_init__(self):
        n = self.num_nodes
        self.out_links = [[] for _ in range(n)]
        self.in_links = [[] for _ in range(n)]
        self.link_index = {}
        for e, (i, j) in enumerate(self.links):
            self.out_links[int(i)].append(e)
            self.in_links[int(j)].append(e)
            self.link_index[(int(i), int(j))] = e
        self.out_links = [np.asarray(v, dtype=np.int64) for v in self.out_links]
        self.in_links = [np.asarray(v, dtype=np.int64) for v in self.in_links]

    @property
    def num_nodes(self) -> int:
        return self.positions.shape[0]

    @property
    def num_links(self) -> int:
        return self.links.shape[0]

    @property
    def nodes(self) -> np.ndarray:
        return np.arange(self.num_nodes)

    def link_distance(self, e1: int, e2: int) -> float:
        """Distance between transmitter of e1 and receiver of e2."""
        tx = self.positions[self.links[e1, 0]]
        rx = self.positions[self.links[e2, 1]]
        return float(np.hypot(*(tx - rx)))


@dataclass
class LinkRates:
    """Per-link mean rates and (optionally sampled) per-slot rates, packets/slot."""

    long_term: np.ndarray  # (m,) float, r_e


@dataclass
class TransceiverSpec:
    """Per-node antenna counts and stream capacities.

    Multi-antenna devices support eta concurrent streams each way (SDMA);
    single-antenna devices keep unit capacities, with fractional air-time
    transmission costs handled by the cost model (TDMA).
    """

    antennas: np.ndarray   # (n,) int, eta_i >= 1
    eta_tx: np.ndarray = field(init=False)
    eta_rx: np.ndarray = field(init=False)

    def __post_init__(self):
        eta = np.asarray(self.antennas, dtype=np.int64)
        if np.any(eta < 1):
            raise ValueError("antenna counts must be >= 1")
        self.antennas = eta
        self.eta_tx = eta.copy()
        self.eta_rx = eta.copy()


def _links_within_radius(positions: np.ndarray, radius: float) -> np.ndarray:
    """All ordered pairs (i, j), i != j, with dist(i, j) <= radius."""
    diff = positions[:, None, :] - positions[None, :, :]
    dist = np.hypot(diff[..., 0], diff[..., 1])
    np.fill_diagonal(dist, np.inf)
    src, dst = np.nonzero(dist <= radius)
    order = np.lexsort((dst, src))
    return np.stack([src[order], dst[order]], axis=1).astype(np.int64)


def is_strongly_connected(n: int, links: np.ndarray) -> bool:
    """BFS forward and backward from node 0; both must reach every node."""
    if n == 0:
        return False
    adj_fwd = [[] for _ in range(n)]
    adj_bwd = [[] for _ in range(n)]
    for i, j in links:
        adj_fwd[i].append(j)
        adj_bwd[j].append(i)
    for adj in (adj_fwd, adj_bwd):
        seen = np.zeros(n, dtype=bool)
        seen[0] = True
        stack = [0]
        while stack:
            u = stack.pop()
            for v in adj[u]:
                if not seen[v]:
                    seen[v] = True
                    stack.append(v)
        if not seen.all():
            return False
    return True


def default_area_side(n: int, params: GenerationParams) -> float:
    """Square side giving expected degree ~target_degree for uniform points."""
    if params.area_side is not None:
        return params.area_side
    return float(np.sqrt(n * np.pi * params.comm_radius**2 / params.target_degree))


def generate_network(n: int, seed: int, params: GenerationParams | None = None) -> ConnectivityGraph:
    """Sample node positions and in-range links until strongly connected.

    Resamples with incremented seed up to ``max_retries`` times; if that
    fails, grows the radius by 10% steps and retries the budget again.
    """
    if n < 2:
        raise ValueError("need at least 2 nodes")
    params = params or GenerationParams()
    side = default_area_side(n, params)
    radius = params.comm_radius
    for _ in range(params.radius_growth_steps + 1):
        for attempt in range(params.max_retries):
            rng = np.random.default_rng([seed + attempt, n])
            positions = rng.uniform(0.0, side, size=(n, 2))
            links = _links_within_radius(positions, radius)
            if len(links) and is_strongly_connected(n, links):
                return ConnectivityGraph(positions=positions, links=links, comm_radius=radius)
        radius *= 1.1
    raise GenerationError(
        f"no strongly connected graph with n={n} within "
        f"{params.max_retries} retries and {params.radius_growth_steps} radius growths"
    )


def assign_link_rates(g: ConnectivityGraph, seed: int) -> LinkRates:
    """Draw long-term rates r_e ~ Uniform(10, 42), independent per directed link."""
    rng = np.random.default_rng([seed, 0x17A7E5])
    return LinkRates(long_term=rng.uniform(RATE_LOW, RATE_HIGH, size=g.num_links))


def sample_realtime_rates(rates: LinkRates, t: int, seed: int) -> np.ndarray:
    """Per-slot rates: Normal(r_e, sd=3) truncated to r_e +- 9, clamped at 0.

    Truncation by rejection (bounded redraws, then clamp); deterministic
    given (seed, t) and the link ordering.
    """
    r = rates.long_term
    rng = np.random.default_rng([seed, t, 0x5107])
    rt = rng.normal(r, RATE_STD)
    for _ in range(8):
        bad = np.abs(rt - r) > RATE_TRUNC
        if not bad.any():
            break
        rt[bad] = rng.normal(r[bad], RATE_STD)
    rt = np.clip(rt, r - RATE_TRUNC, r + RATE_TRUNC)
    return np.maximum(rt, 0.0)


def sample_antennas(n: int, seed: int, mode: str = "mimo") -> np.ndarray:
    """Per-node antenna counts: i.i.d. categorical P(1,2,3,4)=(.2,.5,.2,.1).

    ``mode='siso'`` forces every count to 1.
    """
    if mode == "siso":
        return np.ones(n, dtype=np.int64)
    rng = np.random.default_rng([seed, 0xA27E])
    return rng.choice(ANTENNA_VALUES, size=n, p=ANTENNA_PROBS).astype(np.int64)


def export_edge_list(g: ConnectivityGraph, rates: LinkRates) -> str:
    """One line per link: 'link_id src dst r_e'."""
    lines = [
        f"{e} {i} {j} {rates.long_term[e]:.6f}"
        for e, (i, j) in enumerate(g.links)
    ]
    return "\n".join(lines) + "\n"
