"""Distributed greedy MaxWeight link schedulers.

Three schedulers share one contract: given per-link utilities and the
preliminary per-commodity rates, emit a schedule x in {0,1} per link and
the final integer rates mu, feasible against pair conflicts, per-device
stream capacities, real-time link rates, and queue contents.

* ``lgs_siso``: classic local greedy solver on a pairwise conflict graph.
* ``lgs_ach``: link-level greedy on a capacity hypergraph; each iteration
  re-shrinks undecided links' rates to the residual backlogs so the same
  packets are never committed to two transmitters.
* ``lgs_mimo``: transceiver-level protocol simulation (RTS/CTS rounds with
  local conflict graphs and greedy MWIS at each receiver), synchronous and
  deterministic; functionally a distributed realization of ``lgs_ach``.
"""

from dataclasses import dataclass, field

import numpy as np

from .conflicts import ConflictStructure, tx_costs
from .topology import ConnectivityGraph, TransceiverSpec

EPS = 1e-9


@dataclass
class SchedulerState:
    """Working state of one scheduling call (one slot)."""

    x: np.ndarray                    # (m,) int8, -1 undecided / 0 muted / 1 scheduled
    residual_Q: np.ndarray           # (n, C) int64
    residual_eta_tx: np.ndarray      # (n,) float (air-time fractions for TDMA)
    residual_eta_rx: np.ndarray      # (n,) int
    K: int
    v_tx: np.ndarray | None = None   # (n,) bool, transmitter-active flags
    v_rx: np.ndarray | None = None
    rejection_lists: list = field(default_factory=list)   # phi per node
    grant_sets: list = field(default_factory=list)        # theta per node

    def undecided(self) -> np.ndarray:
        return np.nonzero(self.x == -1)[0]


def _beats(w: np.ndarray, a: int, b: int) -> bool:
    """Strict total order on links: higher utility wins, ties to lower id."""
    return (w[a], -a) > (w[b], -b)


def lgs_siso(w: np.ndarray, conflict: ConflictStructure, trace: list | None = None) -> np.ndarray:
    """Greedy distributed MWIS on a pairwise conflict graph.

    Waves run until every link is decided: any undecided positive-utility
    link that beats all its undecided neighbors is scheduled and its
    neighbors are muted. No two scheduled links share a conflict edge.
    """
    m = len(w)
    x = np.full(m, -1, dtype=np.int8)
    x[w <= 0] = 0
    neighbors = conflict.neighbors
    while True:
        und = np.nonzero(x == -1)[0]
        if len(und) == 0:
            break
        winners = []
        for e in und:
            nb = neighbors[e]
            nb_und = nb[x[nb] == -1]
            if len(nb_und):
                best = nb_und[np.lexsort((nb_und, -w[nb_und]))[0]]
                if not _beats(w, e, int(best)):
                    continue
            winners.append(e)
        for e in winners:
            x[e] = 1
            if trace is not None:
                trace.append({"iter": 0, "link": int(e), "action": "schedule", "w": float(w[e])})
            nb = neighbors[e]
            x[nb[x[nb] == -1]] = 0
    return x


def rate_reassign(
    gamma: np.ndarray,
    bp_pos: np.ndarray,
    residual_Q: np.ndarray,
    src: np.ndarray,
    realtime: np.ndarray,
    eta_src: np.ndarray,
    mask: np.ndarray,
):
    """Shrink undecided links' preliminary rates to the residual backlogs.

    The elementwise min against residual queues is exactly what re-running
    the sorted residual-budget walk would give: earlier allocations only
    shrink, so the freed budget can never lawfully move to a commodity the
    original walk had capped. Utilities and transmission costs follow.
    Mutates ``gamma`` rows selected by ``mask``; returns (w, tau) for them.
    """
    rows = np.nonzero(mask)[0]
    gamma[rows] = np.minimum(gamma[rows], residual_Q[src[rows]])
    w_rows = (gamma[rows] * bp_pos[rows]).sum(axis=1)
    tau_rows = tx_costs(gamma[rows].sum(axis=1), realtime[rows], eta_src[rows])
    return w_rows, tau_rows


def lgs_ach(
    w: np.ndarray,
    realtime: np.ndarray,
    gamma: np.ndarray,
    Q: np.ndarray,
    bp: np.ndarray,
    g: ConnectivityGraph,
    ach: ConflictStructure,
    K: int = 20,
    decouple: bool = False,
    trace: list | None = None,
):
    """Link-level greedy solver on an attributed capacity hypergraph.

    Per iteration: refresh rates/utilities/costs against residual backlogs
    (unless decoupled), mute capacity-infeasible links, then schedule every
    link that is simultaneously the best undecided member of its
    transmitter's hyperedge, best among its undecided pair neighbors, and
    within the top residual-rx-capacity members of its receiver's
    hyperedge. Ties always fall to the lower link id. Undecided links left
    after K iterations are muted.
    """
    m = g.num_links
    src, dst = g.links[:, 0], g.links[:, 1]
    gamma = gamma.copy()
    w = w.astype(float).copy()
    bp_pos = np.maximum(bp, 0.0)
    eta_src = ach.tx_capacity[src]
    s = SchedulerState(
        x=np.full(m, -1, dtype=np.int8),
        residual_Q=Q.copy(),
        residual_eta_tx=ach.tx_capacity.astype(float).copy(),
        residual_eta_rx=ach.rx_capacity.copy(),
        K=K,
    )
    x = s.x
    mu = np.zeros_like(gamma)
    tau = tx_costs(gamma.sum(axis=1), realtime, eta_src)

    for k in range(1, K + 1):
        und_mask = x == -1
        if not und_mask.any():
            break
        if not decouple:
            w_u, tau_u = rate_reassign(
                gamma, bp_pos, s.residual_Q, src, realtime, eta_src, und_mask
            )
            w[und_mask] = w_u
            tau[und_mask] = tau_u
        for e in np.nonzero(und_mask)[0]:
            if (
                w[e] <= 0.0
                or tau[e] > s.residual_eta_tx[src[e]] + EPS
                or s.residual_eta_rx[dst[e]] <= 0
            ):
                x[e] = 0
                if trace is not None:
                    trace.append({"iter": k, "link": int(e), "action": "mute", "w": float(w[e])})

        und = np.nonzero(x == -1)[0]
        if len(und) == 0:
            continue
        best_out = {}    # node -> best undecided outgoing link
        for e in und:
            i = int(src[e])
            if i not in best_out or _beats(w, int(e), best_out[i]):
                best_out[i] = int(e)
        rx_rank = {}     # link -> rank among undecided incoming links of its receiver
        by_rx = {}
        for e in und:
            by_rx.setdefault(int(dst[e]), []).append(int(e))
        for j, edges in by_rx.items():
            edges.sort(key=lambda e: (-w[e], e))
            for r, e in enumerate(edges):
                rx_rank[e] = r

        winners = []
        for e in und:
            e = int(e)
            if best_out[int(src[e])] != e:
                continue
            nb = ach.neighbors[e]
            nb_und = nb[x[nb] == -1]
            if len(nb_und):
                best = nb_und[np.lexsort((nb_und, -w[nb_und]))[0]]
                if not _beats(w, e, int(best)):
                    continue
            if rx_rank[e] >= s.residual_eta_rx[dst[e]]:
                continue
            winners.append(e)
        for e in winners:
            i, j = int(src[e]), int(dst[e])
            x[e] = 1
            mu[e] = gamma[e]
            s.residual_Q[i] -= gamma[e]
            s.residual_eta_rx[j] -= 1
            s.residual_eta_tx[i] -= tau[e]
            nb = ach.neighbors[e]
            x[nb[x[nb] == -1]] = 0
            if trace is not None:
                trace.append({"iter": k, "link": e, "action": "schedule", "w": float(w[e])})
    x[x == -1] = 0
    return mu, x


@dataclass
class LocalConflictGraph:
    """Conflict graph a device assembles from the transmission requests it hears."""

    weights: dict                 # link id -> utility
    adj: dict                     # link id -> set of locally conflicting link ids

    @property
    def vertices(self) -> list:
        return sorted(self.weights)

    @property
    def edges(self) -> set:
        return {
            (min(a, b), max(a, b)) for a, nbs in self.adj.items() for b in nbs
        }


def build_local_conflict_graph(
    incoming,
    rts: dict,
    own: int | None,
    pair_matrix: np.ndarray,
) -> LocalConflictGraph:
    """Assemble one device's local conflict graph from received requests.

    Vertices: the device's own candidate, every announced link destined to
    it (half-duplex conflict with the own candidate), every announced link
    that conflicts the own candidate, and every announced link conflicting
    one of its announced incoming links. A foreign announcement carries
    edges to the own candidate and to every announced incoming link it
    conflicts, so contention for a grant is judged against all of them.
    The pair relation of the global conflict structure stands in for
    signal analysis of the requests.
    """
    weights = {}
    adj: dict = {}

    def add_vertex(e):
        if e not in weights:
            weights[e] = rts[e]
            adj[e] = set()

    def add_edge(a, b):
        adj[a].add(b)
        adj[b].add(a)

    if own is not None:
        add_vertex(own)
    in_set = set(int(e) for e in incoming)
    announced = sorted(int(e) for e in rts)
    my_in = [e for e in announced if e in in_set and e != own]
    for e in my_in:
        add_vertex(e)
        if own is not None:
            add_edge(own, e)
    for e in announced:
        if e in in_set or (own is not None and e == own):
            continue
        if own is not None and pair_matrix[e, own]:
            add_vertex(e)
            add_edge(own, e)
        for e2 in my_in:
            if pair_matrix[e, e2]:
                add_vertex(e)
                add_edge(e, e2)
    return LocalConflictGraph(weights=weights, adj=adj)


def greedy_mwis_local(lcg: LocalConflictGraph) -> list:
    """Greedy maximum-weight independent set, heaviest first, ties to lower id."""
    order = sorted(lcg.weights, key=lambda e: (-lcg.weights[e], e))
    muted = set()
    chosen = []
    for e in order:
        if e in muted or lcg.weights[e] <= 0:
            continue
        chosen.append(e)
        muted |= lcg.adj[e]
    return chosen


def device_neighborhoods(g: ConnectivityGraph, ach: ConflictStructure) -> list:
    """Control-message neighborhoods: devices whose links share an edge or hyperedge."""
    n, m = g.num_nodes, g.num_links
    incident = np.zeros((n, m), dtype=bool)
    src, dst = g.links[:, 0], g.links[:, 1]
    incident[src, np.arange(m)] = True
    incident[dst, np.arange(m)] = True
    inc = incident.astype(np.int64)
    shared_pair = (inc @ ach.pair_matrix.astype(np.int64) @ inc.T) > 0
    shared_hyper = (inc @ inc.T) > 0  # hyperedges are per-device link stars
    nearby = shared_pair | shared_hyper
    np.fill_diagonal(nearby, False)
    return [np.nonzero(nearby[i])[0] for i in range(n)]


def lgs_mimo(
    w: np.ndarray,
    realtime: np.ndarray,
    gamma: np.ndarray,
    Q: np.ndarray,
    bp: np.ndarray,
    g: ConnectivityGraph,
    spec: TransceiverSpec,
    ach: ConflictStructure,
    K: int = 20,
    decouple: bool = False,
    nearby: list | None = None,
    trace: list | None = None,
):
    """Transceiver-level greedy scheduler, simulated synchronously.

    Each round: (1) every transmitter refreshes its undecided outgoing
    links against its residual backlog, drops cost-infeasible ones, and
    announces its best candidate; (2) every device builds a local conflict
    graph from the announcements it hears, runs greedy MWIS, grants up to
    its residual reception capacity, and rejects the grants' local
    conflictors; (3) every announcing transmitter folds in the grant and
    rejection broadcasts: rejected candidates are muted, granted ones are
    scheduled and the transmitter's residual backlog and air-time shrink.
    Devices also remember grants they overhear and preemptively reject any
    later announcement conflicting one, which keeps decisions from
    different rounds mutually feasible. Leftover undecided links after K
    rounds are muted.
    """
    n, m = g.num_nodes, g.num_links
    src, dst = g.links[:, 0], g.links[:, 1]
    gamma = gamma.copy()
    w = w.astype(float).copy()
    bp_pos = np.maximum(bp, 0.0)
    eta_src = spec.eta_tx[src]
    if nearby is None:
        nearby = device_neighborhoods(g, ach)
    pair = ach.pair_matrix

    s = SchedulerState(
        x=np.full(m, -1, dtype=np.int8),
        residual_Q=Q.copy(),
        residual_eta_tx=spec.eta_tx.astype(float).copy(),
        residual_eta_rx=spec.eta_rx.copy(),
        K=K,
        v_tx=np.ones(n, dtype=bool),
        v_rx=np.ones(n, dtype=bool),
        rejection_lists=[set() for _ in range(n)],
        grant_sets=[set() for _ in range(n)],
    )
    x = s.x
    mu = np.zeros_like(gamma)
    tau = tx_costs(gamma.sum(axis=1), realtime, eta_src)
    phi = s.rejection_lists
    known_scheduled = [set() for _ in range(n)]
    granted_any: set = set()

    for k in range(1, K + 1):
        if not (s.v_tx | s.v_rx).any():
            break

        # -- candidate selection and request announcement --
        cand = np.full(n, -1, dtype=np.int64)
        for i in range(n):
            if not s.v_tx[i]:
                continue
            out_und = g.out_links[i][x[g.out_links[i]] == -1]
            if len(out_und) == 0:
                s.v_tx[i] = False
                continue
            if not decouple:
                mask = np.zeros(m, dtype=bool)
                mask[out_und] = True
                w_u, tau_u = rate_reassign(
                    gamma, bp_pos, s.residual_Q, src, realtime, eta_src, mask
                )
                w[out_und] = w_u
                tau[out_und] = tau_u
            for e in out_und:
                if (
                    w[e] <= 0.0
                    or tau[e] > s.residual_eta_tx[i] + EPS
                    or any(pair[e, sch] for sch in known_scheduled[i])
                ):
                    x[e] = 0
                    if trace is not None:
                        trace.append({"iter": k, "link": int(e), "action": "mute", "w": float(w[e])})
            pool = out_und[x[out_und] == -1]
            if len(pool) == 0:
                s.v_tx[i] = False
                continue
            cand[i] = pool[np.lexsort((pool, -w[pool]))[0]]

        # -- local contention and grant/reject broadcasts --
        theta: dict = {}
        for j in range(n):
            if not (s.v_tx[j] or s.v_rx[j]):
                continue
            heard = {int(cand[u]) for u in nearby[j] if cand[u] >= 0}
            own = int(cand[j]) if cand[j] >= 0 else None
            if own is not None:
                heard.add(own)
            if heard:
                doomed = {
                    e for e in heard
                    if any(pair[e, sch] for sch in known_scheduled[j])
                }
                phi[j] |= doomed
                live = {e: float(w[e]) for e in heard - doomed}
                own_live = own if own is not None and own in live else None
                lcg = build_local_conflict_graph(g.in_links[j], live, own_live, pair)
                winners = set(greedy_mwis_local(lcg))
                if s.residual_eta_rx[j] > 0 and (own_live is None or own_live not in winners):
                    cand_in = sorted(
                        (e for e in winners if dst[e] == j),
                        key=lambda e: (-w[e], e),
                    )
                    grants = []
                    blocked = []
                    for e in cand_in:
                        if len(grants) >= s.residual_eta_rx[j]:
                            break
                        # grants of one round must not conflict each other
                        if any(pair[e, g_e] for g_e in grants):
                            blocked.append(e)
                            continue
                        grants.append(e)
                    phi[j] |= set(blocked)
                    if grants:
                        theta[j] = grants
                        s.grant_sets[j] |= set(grants)
                        granted_any |= set(grants)
                        s.residual_eta_rx[j] -= len(grants)
                        for t_e in grants:
                            phi[j] |= lcg.adj[t_e]
                            if trace is not None:
                                trace.append({"iter": k, "link": int(t_e), "action": "grant", "w": float(w[t_e])})
                        # committing to receive: half-duplex defers own request
                        if own is not None and x[own] == -1:
                            x[own] = 0
                            if trace is not None:
                                trace.append({"iter": k, "link": own, "action": "mute", "w": float(w[own])})
            und_in = [
                int(e) for e in g.in_links[j]
                if x[e] == -1 and int(e) not in granted_any
            ]
            if s.residual_eta_rx[j] <= 0 or not und_in:
                s.v_rx[j] = False
                phi[j] |= set(und_in)

        # -- transmitters fold in grant/reject broadcasts --
        for i in range(n):
            if cand[i] < 0:
                continue
            e = int(cand[i])
            near = list(nearby[i]) + [i]
            big_theta = set().union(*(theta.get(int(j), []) for j in near)) if theta else set()
            big_phi = set().union(*(phi[int(j)] for j in near))
            if x[e] == -1:
                if e in big_phi:
                    x[e] = 0
                    if trace is not None:
                        trace.append({"iter": k, "link": e, "action": "reject", "w": float(w[e])})
                elif e in big_theta:
                    x[e] = 1
                    mu[e] = gamma[e]
                    s.residual_Q[i] -= gamma[e]
                    s.residual_eta_tx[i] -= tau[e]
                    phi[i] |= {int(f) for f in g.in_links[i]}
                    if trace is not None:
                        trace.append({"iter": k, "link": e, "action": "schedule", "w": float(w[e])})
            phi[i] |= {int(f) for f in big_phi if dst[f] == i}

        # grants overheard this round inform later rejections everywhere
        for j, grants in theta.items():
            for d in list(nearby[j]) + [j]:
                known_scheduled[int(d)] |= set(grants)

    x[x == -1] = 0
    return mu, x


def validate_assignment(
    g: ConnectivityGraph,
    conflict: ConflictStructure,
    spec: TransceiverSpec,
    realtime: np.ndarray,
    Q: np.ndarray,
    mu: np.ndarray,
    x: np.ndarray,
) -> list:
    """All feasibility constraints a final (mu, x) must satisfy; returns violations."""
    src, dst = g.links[:, 0], g.links[:, 1]
    problems = []
    if (mu < 0).any():
        problems.append("negative rate assignment")
    active = x == 1
    link_tot = mu.sum(axis=1)
    if ((link_tot > 0) != active).any():
        problems.append("schedule indicator inconsistent with rates")
    over = link_tot > realtime + EPS
    for e in np.nonzero(over)[0]:
        problems.append(f"link {e}: total rate {link_tot[e]} > realtime {realtime[e]:.3f}")
    out_tot = np.zeros_like(Q)
    np.add.at(out_tot, src, mu)
    for i, k in np.argwhere(out_tot > Q):
        problems.append(f"node {i} commodity col {k}: out {out_tot[i, k]} > queue {Q[i, k]}")
    act_ids = np.nonzero(active)[0]
    sub = conflict.pair_matrix[np.ix_(act_ids, act_ids)]
    for a, b in np.argwhere(np.triu(sub)):
        problems.append(f"conflicting links {act_ids[a]} and {act_ids[b]} both scheduled")
    tau_final = tx_costs(link_tot, realtime, spec.eta_tx[src])
    for i in range(g.num_nodes):
        out_act = [e for e in g.out_links[i] if active[e]]
        in_act = [e for e in g.in_links[i] if active[e]]
        if out_act and sum(tau_final[e] for e in out_act) > spec.eta_tx[i] + 1e-6:
            problems.append(f"node {i}: tx cost {sum(tau_final[e] for e in out_act):.6f} > {spec.eta_tx[i]}")
        if len(in_act) > spec.eta_rx[i]:
            problems.append(f"node {i}: {len(in_act)} receptions > {spec.eta_rx[i]}")
    return problems
