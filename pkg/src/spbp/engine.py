"""Time-slotted simulation: traffic generation, the per-slot routing and
scheduling pipeline, packet tracking, and per-flow metric aggregation.

Every random stream is derived from (master seed, instance, realization,
purpose[, slot]) so that algorithm variants compared on the same instance
see identical topologies, rates, flows, and arrivals.
"""

import math
from dataclasses import dataclass

import numpy as np

from . import commodity as commodity_mod
from .bias import compute_bias, edge_weights
from .conflicts import build_ach, build_siso_conflict_graph
from .queueing import (
    InfeasibleAssignmentError,
    apply_transition,
    backpressures,
    make_state,
)
from .scheduler import (
    device_neighborhoods,
    lgs_ach,
    lgs_mimo,
    lgs_siso,
    validate_assignment,
)
from .topology import (
    GenerationParams,
    TransceiverSpec,
    assign_link_rates,
    generate_network,
    sample_antennas,
    sample_realtime_rates,
)

# purpose tags for seed derivation
_TOPO, _RATES, _ANT, _FLOWS, _RT, _ARR, _RESOLVE = range(1, 8)

SCHEDULERS = ("lgs", "lgs-ach", "lgs-mimo")
BURSTY_DURATION = 30


def derive_seed(*parts) -> int:
    return int(np.random.SeedSequence([int(p) for p in parts]).generate_state(1, np.uint64)[0])


@dataclass(frozen=True)
class FlowSpec:
    src: int
    dst: int
    rate: float              # packets/slot Poisson intensity
    kind: str                # 'streaming' | 'bursty'
    start_slot: int = 0
    duration: int | None = None   # None: whole horizon

    def active(self, t: int) -> bool:
        if self.kind == "streaming":
            return True
        return self.start_slot <= t < self.start_slot + self.duration


@dataclass
class FlowMetrics:
    throughput: float
    mean_latency: float
    delivery_ratio: float
    mean_trip_length: float
    composite_latency: float
    injected: int = 0
    delivered: int = 0


@dataclass(frozen=True)
class RunConfig:
    n: int
    T: int = 1000
    master_seed: int = 0
    instance: int = 0
    realization: int = 0
    commodity_selection: str = "maxu"    # excl | maxu
    bias_scheme: str = "sp_rbar"
    scheduler: str = "lgs"               # lgs | lgs-ach | lgs-mimo
    decouple: bool = False
    antennas: str = "siso"               # siso | mimo (ignored by lgs)
    comm_radius: float = 1.0
    interference_factor: float = 1.5
    nullification: bool = True
    mix: float = 0.5                     # probability a flow is streaming
    lambda_override: float | None = None
    flow_count: int | None = None
    K: int = 20
    validate: bool = False
    queue_dump: str | None = None   # per-slot queue matrix CSV
    trace_path: str | None = None   # scheduler decisions as JSON lines


@dataclass
class RunResult:
    config: RunConfig
    flows: list
    metrics: list
    aggregates: dict
    state: object = None
    graph: object = None


def generate_flows(
    g, seed: int, T: int, mix: float = 0.5,
    lambda_override: float | None = None, count: int | None = None,
) -> list:
    """Distinct-pair flows: floor(0.4 n) by default, Poisson rates U(0.1, 1).

    A flow is streaming with probability ``mix``, otherwise bursty for 30
    slots from a start drawn uniformly in [0, T-100]. Short horizons are
    allowed only for all-streaming traffic.
    """
    if T < 200 and mix < 1.0:
        raise ValueError("horizon too short for bursty traffic windows (need T >= 200)")
    n = g.num_nodes
    n_flows = int(0.4 * n) if count is None else count
    rng = np.random.default_rng([seed, 0xF10])
    idx = rng.choice(n * (n - 1), size=n_flows, replace=False)
    src = idx // (n - 1)
    rem = idx % (n - 1)
    dst = rem + (rem >= src)
    lam = rng.uniform(0.1, 1.0, size=n_flows)
    if lambda_override is not None:
        lam = np.full(n_flows, float(lambda_override))
    streaming = rng.random(n_flows) < mix
    starts = rng.integers(0, max(T - 100, 0) + 1, size=n_flows)
    flows = []
    for f in range(n_flows):
        if streaming[f]:
            flows.append(FlowSpec(int(src[f]), int(dst[f]), float(lam[f]), "streaming"))
        else:
            flows.append(FlowSpec(int(src[f]), int(dst[f]), float(lam[f]), "bursty",
                                  int(starts[f]), BURSTY_DURATION))
    return flows


def arrivals(flows, t: int, seed: int, n_nodes: int, dest_index: dict) -> np.ndarray:
    """Per-(node, commodity) Poisson packet counts for slot t."""
    A = np.zeros((n_nodes, len(dest_index)), dtype=np.int64)
    if not flows:
        return A
    rng = np.random.default_rng([seed, t, 0xA441])
    lam = np.array([f.rate if f.active(t) else 0.0 for f in flows])
    counts = rng.poisson(lam)
    for f, c in zip(flows, counts):
        if c:
            A[f.src, dest_index[f.dst]] += int(c)
    return A


def resolve_overcommit(mu: np.ndarray, Q: np.ndarray, g, rng) -> np.ndarray:
    """Randomly pick one scheduled outgoing link per surplus packet.

    Used by the decoupled ablation, where the same packets can be granted
    on several outgoing links: each available packet keeps one of its
    grants (multivariate hypergeometric over the granted quotas), so the
    applied rates never exceed the queue contents.
    """
    src = g.links[:, 0]
    out_tot = np.zeros_like(Q)
    np.add.at(out_tot, src, mu)
    over = np.argwhere(out_tot > Q)
    if len(over) == 0:
        return mu
    mu = mu.copy()
    for i, k in over:
        links = [e for e in g.out_links[i] if mu[e, k] > 0]
        quotas = np.array([mu[e, k] for e in links])
        keep = rng.multivariate_hypergeometric(quotas, int(Q[i, k]))
        for e, q in zip(links, keep):
            mu[e, k] = q
    return mu


def _flow_metrics(flows, state, T: int) -> list:
    log = state.packets
    src = np.array(log.src, dtype=np.int64)
    com = np.array(log.commodity, dtype=np.int64)
    inj = np.array(log.inject_slot, dtype=np.int64)
    dlv = np.array(log.deliver_slot, dtype=np.int64)
    hop = np.array(log.hops, dtype=np.int64)
    out = []
    for f in flows:
        mask = (src == f.src) & (com == f.dst)
        injected = int(mask.sum())
        done = mask & (dlv >= 0)
        delivered = int(done.sum())
        if injected == 0:
            out.append(FlowMetrics(0.0, 0.0, 1.0, 0.0, 0.0, 0, 0))
            continue
        ratio = delivered / injected
        if delivered:
            latency = float((dlv[done] - inj[done]).mean())
            trip = float(hop[done].mean())
        else:
            latency = math.nan
            trip = math.nan
        composite = (latency if delivered else 0.0) * ratio + T * (1.0 - ratio)
        out.append(FlowMetrics(delivered / T, latency, ratio, trip, composite,
                               injected, delivered))
    return out


METRIC_NAMES = ("throughput", "mean_latency", "delivery_ratio",
                "trip_length", "composite_latency")

_METRIC_ATTRS = {
    "throughput": "throughput",
    "mean_latency": "mean_latency",
    "delivery_ratio": "delivery_ratio",
    "trip_length": "mean_trip_length",
    "composite_latency": "composite_latency",
}


def aggregate_metrics(metrics) -> dict:
    """Mean over flows and 95th-percentile flow, per metric."""
    agg = {}
    for name in METRIC_NAMES:
        vals = np.array([getattr(m, _METRIC_ATTRS[name]) for m in metrics], dtype=float)
        if len(vals) == 0 or np.isnan(vals).all():
            agg[name] = {"mean": math.nan, "p95": math.nan}
        else:
            agg[name] = {
                "mean": float(np.nanmean(vals)),
                "p95": float(np.nanpercentile(vals, 95)),
            }
    return agg


def build_instance(config: RunConfig):
    """Deterministic network, rates, transceivers, and flows for one run."""
    ms, inst, real = config.master_seed, config.instance, config.realization
    g = generate_network(
        config.n, derive_seed(ms, inst, _TOPO),
        GenerationParams(comm_radius=config.comm_radius),
    )
    rates = assign_link_rates(g, derive_seed(ms, inst, real, _RATES))
    antennas = sample_antennas(config.n, derive_seed(ms, inst, _ANT), mode=config.antennas)
    spec = TransceiverSpec(antennas)
    flows = generate_flows(
        g, derive_seed(ms, inst, real, _FLOWS), config.T,
        mix=config.mix, lambda_override=config.lambda_override,
        count=config.flow_count,
    )
    return g, rates, spec, flows


def write_trace_jsonl(trace: list, path: str):
    """Dump scheduler decision records, one JSON object per line."""
    import json

    with open(path, "w") as fh:
        for entry in trace:
            fh.write(json.dumps(entry, sort_keys=True) + "\n")


def run(config: RunConfig, slot_hook=None, trace: list | None = None) -> RunResult:
    """Execute one full simulation and return per-flow metrics.

    ``slot_hook(state, realtime, assignment, mu, x)`` is called before each
    transition, for tests and instrumentation.
    """
    if config.scheduler not in SCHEDULERS:
        raise ValueError(f"unknown scheduler {config.scheduler!r}")
    g, rates, spec, flows = build_instance(config)
    commodities = sorted({f.dst for f in flows})
    weights = edge_weights(rates, config.bias_scheme)
    bias = compute_bias(g, weights, commodities)
    state = make_state(g, bias)
    selector = commodity_mod.SELECTORS[config.commodity_selection]

    irange = config.interference_factor * g.comm_radius
    if config.scheduler == "lgs":
        conflict = build_siso_conflict_graph(g, irange)
        spec_eff = TransceiverSpec(np.ones(config.n, dtype=np.int64))
        nearby = None
    else:
        conflict = build_ach(g, spec, irange, nullification=config.nullification)
        spec_eff = spec
        nearby = device_neighborhoods(g, conflict) if config.scheduler == "lgs-mimo" else None

    ms, inst, real = config.master_seed, config.instance, config.realization
    rt_seed = derive_seed(ms, inst, real, _RT)
    arr_seed = derive_seed(ms, inst, real, _ARR)
    resolve_seed = derive_seed(ms, inst, real, _RESOLVE)

    if config.trace_path is not None and trace is None:
        trace = []
    dump_fh = None
    if config.queue_dump is not None:
        dump_fh = open(config.queue_dump, "w")
        dump_fh.write("t,node," + ",".join(str(c) for c in commodities) + "\n")

    for t in range(config.T):
        rt = sample_realtime_rates(rates, t, rt_seed)
        assign = selector(state, rt)
        slot_trace = [] if trace is not None else None
        if config.scheduler == "lgs":
            x = lgs_siso(assign.w, conflict, trace=slot_trace)
            mu = assign.gamma * (x == 1)[:, None]
        else:
            bp = backpressures(state)
            if config.scheduler == "lgs-ach":
                mu, x = lgs_ach(assign.w, rt, assign.gamma, state.Q, bp, g, conflict,
                                K=config.K, decouple=config.decouple, trace=slot_trace)
            else:
                mu, x = lgs_mimo(assign.w, rt, assign.gamma, state.Q, bp, g, spec,
                                 conflict, K=config.K, decouple=config.decouple,
                                 nearby=nearby, trace=slot_trace)
        if config.decouple:
            rng = np.random.default_rng([resolve_seed, t])
            mu = resolve_overcommit(mu, state.Q, g, rng)
            x = (mu.sum(axis=1) > 0).astype(np.int8)
        assign.mu = mu
        assign.x = x
        if slot_trace:
            for entry in slot_trace:
                entry["slot"] = t
            trace.extend(slot_trace)
        if config.validate:
            problems = validate_assignment(g, conflict, spec_eff, rt, state.Q, mu, x)
            if problems:
                raise InfeasibleAssignmentError(
                    f"slot {t}: " + "; ".join(problems[:5])
                )
        A = (
            arrivals(flows, t, arr_seed, g.num_nodes, state.dest_index)
            if t <= config.T - 2
            else np.zeros_like(state.Q)
        )
        if slot_hook is not None:
            slot_hook(state, rt, assign, mu, x)
        apply_transition(state, mu, A, rt, x)
        if dump_fh is not None:
            for i in range(g.num_nodes):
                dump_fh.write(
                    f"{t},{i}," + ",".join(str(int(v)) for v in state.Q[i]) + "\n"
                )

    if dump_fh is not None:
        dump_fh.close()
    if config.trace_path is not None:
        write_trace_jsonl(trace or [], config.trace_path)
    metrics = _flow_metrics(flows, state, config.T)
    return RunResult(
        config=config, flows=flows, metrics=metrics,
        aggregates=aggregate_metrics(metrics), state=state, graph=g,
    )
