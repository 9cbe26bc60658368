"""Shortest-path-biased backpressure routing and scheduling for wireless
multi-hop networks, with link-sharing commodity selection and distributed
MaxWeight schedulers on conflict graphs and capacity hypergraphs."""

__version__ = "0.1.0"

from .bias import BiasMatrix, compute_bias, edge_weights
from .commodity import RateAssignment, exclusive_assign, exclusive_select, maxu_assign
from .conflicts import (
    ConflictStructure,
    CostVector,
    build_ach,
    build_siso_conflict_graph,
    tx_cost,
)
from .engine import (
    FlowMetrics,
    FlowSpec,
    RunConfig,
    RunResult,
    arrivals,
    generate_flows,
    run,
)
from .experiment import ExperimentConfig, load_config, run_experiment, summarize
from .queueing import (
    InfeasibleAssignmentError,
    NetworkState,
    PacketRecord,
    apply_transition,
    backpressure,
    backpressures,
    biased_backlog,
    biased_backlogs,
    make_state,
)
from .scheduler import (
    LocalConflictGraph,
    SchedulerState,
    build_local_conflict_graph,
    greedy_mwis_local,
    lgs_ach,
    lgs_mimo,
    lgs_siso,
    rate_reassign,
    validate_assignment,
)
from .topology import (
    ConnectivityGraph,
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
