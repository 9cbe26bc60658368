"""Experiment sweeps: config files, parallel fan-out, CSV artifacts.

A sweep is the cross product sizes x lambda values x variants x instances
x realizations. Variants under comparison share every random stream, so
differences between their metrics are paired. Results are written in task
order regardless of completion order, keeping reruns byte-identical.
"""

import csv
import io
import math
import os
from dataclasses import asdict, dataclass
from multiprocessing import Pool

import numpy as np
import yaml

from .bias import SCHEMES
from .commodity import SELECTORS
from .engine import METRIC_NAMES, RunConfig, SCHEDULERS, aggregate_metrics, run

FLOW_COLUMNS = [
    "network_size", "instance_id", "realization", "seed", "variant",
    "scheduler", "flow_src", "flow_dst", "kind", "lambda",
    "throughput", "mean_latency", "delivery_ratio", "trip_length",
    "composite_latency",
]

AGG_COLUMNS = ["network_size", "lambda", "variant", "scheduler", "n_runs"] + [
    col
    for m in METRIC_NAMES
    for col in (f"{m}_mean", f"{m}_mean_ci95", f"{m}_p95", f"{m}_p95_ci95")
]


class ConfigError(ValueError):
    """Bad experiment configuration; reported with exit code 2."""


@dataclass(frozen=True)
class VariantSpec:
    name: str
    commodity_selection: str = "maxu"
    bias: str = "sp_rbar"
    scheduler: str = "lgs"
    decouple: bool = False
    antennas: str | None = None   # None: radio-section default


@dataclass
class ExperimentConfig:
    sizes: list
    variants: list
    instances_per_size: int = 10
    realizations_per_instance: int = 10
    T: int = 1000
    seed: int = 0
    output: str = "out"
    mix: float = 0.5
    lambdas: list | None = None          # sweep of identical-rate overrides
    comm_radius: float = 1.0
    interference_factor: float = 1.5
    nullification: bool = True
    antennas: str = "siso"
    jobs: int | None = None

    def to_dict(self) -> dict:
        d = asdict(self)
        d["variants"] = [asdict(v) for v in self.variants]
        return d


def _require(cond, msg):
    if not cond:
        raise ConfigError(msg)


def config_from_dict(raw: dict) -> ExperimentConfig:
    if "config" in raw and isinstance(raw["config"], dict):
        raw = raw["config"]  # manifest wrapper
    _require(isinstance(raw, dict), "config root must be a mapping")
    known = {
        "sizes", "variants", "instances_per_size", "realizations_per_instance",
        "T", "seed", "output", "traffic", "radio", "jobs",
        # flat form written by manifests
        "mix", "lambdas", "comm_radius", "interference_factor",
        "nullification", "antennas",
    }
    for key in raw:
        _require(key in known, f"unknown config key {key!r}")
    sizes = raw.get("sizes")
    _require(isinstance(sizes, list) and sizes, "sizes must be a non-empty list")
    _require(all(isinstance(s, int) and s >= 2 for s in sizes), "sizes must be ints >= 2")

    traffic = raw.get("traffic", {}) or {}
    radio = raw.get("radio", {}) or {}
    mix = float(traffic.get("mix", raw.get("mix", 0.5)))
    lambdas = traffic.get("lambda", raw.get("lambdas"))
    if lambdas is not None and not isinstance(lambdas, list):
        lambdas = [lambdas]
    if lambdas is not None:
        _require(all(isinstance(v, (int, float)) and v > 0 for v in lambdas),
                 "traffic.lambda entries must be positive numbers")

    antennas = str(radio.get("antennas", raw.get("antennas", "siso")))
    _require(antennas in ("siso", "mimo"), f"radio.antennas must be siso|mimo, got {antennas!r}")

    variants_raw = raw.get("variants")
    _require(isinstance(variants_raw, list) and variants_raw, "variants must be a non-empty list")
    variants = []
    for v in variants_raw:
        _require(isinstance(v, dict) and "name" in v, "each variant needs a name")
        spec = VariantSpec(
            name=str(v["name"]),
            commodity_selection=str(v.get("commodity_selection", "maxu")),
            bias=str(v.get("bias", "sp_rbar")),
            scheduler=str(v.get("scheduler", "lgs")),
            decouple=bool(v.get("decouple", False)),
            antennas=v.get("antennas"),
        )
        _require(spec.commodity_selection in SELECTORS,
                 f"variant {spec.name!r}: unknown commodity_selection {spec.commodity_selection!r}")
        _require(spec.bias in SCHEMES,
                 f"variant {spec.name!r}: unknown bias {spec.bias!r}")
        _require(spec.scheduler in SCHEDULERS,
                 f"variant {spec.name!r}: unknown scheduler {spec.scheduler!r}")
        _require(spec.antennas in (None, "siso", "mimo"),
                 f"variant {spec.name!r}: unknown antennas {spec.antennas!r}")
        variants.append(spec)
    names = [v.name for v in variants]
    _require(len(set(names)) == len(names), "variant names must be unique")

    return ExperimentConfig(
        sizes=list(sizes),
        variants=variants,
        instances_per_size=int(raw.get("instances_per_size", 10)),
        realizations_per_instance=int(raw.get("realizations_per_instance", 10)),
        T=int(raw.get("T", 1000)),
        seed=int(raw.get("seed", 0)),
        output=str(raw.get("output", "out")),
        mix=mix,
        lambdas=lambdas,
        comm_radius=float(radio.get("comm_radius", raw.get("comm_radius", 1.0))),
        interference_factor=float(radio.get("interference_range",
                                            raw.get("interference_factor", 1.5))),
        nullification=bool(radio.get("nullification", raw.get("nullification", True))),
        antennas=antennas,
        jobs=raw.get("jobs"),
    )


def load_config(path: str) -> ExperimentConfig:
    try:
        with open(path) as fh:
            raw = yaml.safe_load(fh)
    except (OSError, yaml.YAMLError) as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    return config_from_dict(raw or {})


def _tasks(cfg: ExperimentConfig):
    lambdas = cfg.lambdas if cfg.lambdas is not None else [None]
    for size in cfg.sizes:
        for lam in lambdas:
            for variant in cfg.variants:
                for inst in range(cfg.instances_per_size):
                    for real in range(cfg.realizations_per_instance):
                        rc = RunConfig(
                            n=size, T=cfg.T, master_seed=cfg.seed,
                            instance=inst, realization=real,
                            commodity_selection=variant.commodity_selection,
                            bias_scheme=variant.bias,
                            scheduler=variant.scheduler,
                            decouple=variant.decouple,
                            antennas=variant.antennas or cfg.antennas,
                            comm_radius=cfg.comm_radius,
                            interference_factor=cfg.interference_factor,
                            nullification=cfg.nullification,
                            mix=cfg.mix,
                            lambda_override=lam,
                        )
                        yield (size, lam, variant.name, inst, real, rc)


def _run_task(task):
    size, lam, vname, inst, real, rc = task
    result = run(rc)
    rows = []
    for f, m in zip(result.flows, result.metrics):
        rows.append([
            size, inst, real, rc.master_seed, vname, rc.scheduler,
            f.src, f.dst, f.kind, f.rate,
            m.throughput, m.mean_latency, m.delivery_ratio,
            m.mean_trip_length, m.composite_latency,
        ])
    agg = aggregate_metrics(result.metrics)
    return rows, (size, lam, vname, rc.scheduler, agg)


def _fmt(v) -> str:
    if isinstance(v, float):
        return f"{v:.10g}"
    if v is None:
        return ""
    return str(v)


def _ci95(values: np.ndarray) -> float:
    values = values[~np.isnan(values)]
    if len(values) < 2:
        return math.nan
    return float(1.96 * values.std(ddof=1) / math.sqrt(len(values)))


def build_aggregate_rows(records) -> list:
    """Group per-run aggregates by (size, lambda, variant) into mean +- CI rows."""
    groups = {}
    order = []
    for size, lam, vname, sched, agg in records:
        key = (size, lam, vname, sched)
        if key not in groups:
            groups[key] = []
            order.append(key)
        groups[key].append(agg)
    rows = []
    for key in order:
        size, lam, vname, sched = key
        aggs = groups[key]
        row = [size, lam, vname, sched, len(aggs)]
        for m in METRIC_NAMES:
            for stat in ("mean", "p95"):
                vals = np.array([a[m][stat] for a in aggs], dtype=float)
                center = float(np.nanmean(vals)) if not np.isnan(vals).all() else math.nan
                row.extend([center, _ci95(vals)])
        rows.append(row)
    return rows


def _write_csv(path: str, header: list, rows: list):
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([_fmt(v) for v in row])
    with open(path, "w", newline="") as fh:
        fh.write(buf.getvalue())


def run_experiment(cfg: ExperimentConfig, out_dir: str | None = None,
                   jobs: int | None = None) -> dict:
    """Execute the sweep and write flows.csv, aggregate.csv, manifest.json."""
    from . import __version__

    out_dir = out_dir or cfg.output
    os.makedirs(out_dir, exist_ok=True)
    tasks = list(_tasks(cfg))
    jobs = jobs or cfg.jobs or os.cpu_count() or 1
    if jobs > 1 and len(tasks) > 1:
        with Pool(processes=min(jobs, len(tasks))) as pool:
            results = pool.map(_run_task, tasks, chunksize=1)
    else:
        results = [_run_task(t) for t in tasks]

    flow_rows = [row for rows, _ in results for row in rows]
    agg_rows = build_aggregate_rows([rec for _, rec in results])

    paths = {
        "flows": os.path.join(out_dir, "flows.csv"),
        "aggregate": os.path.join(out_dir, "aggregate.csv"),
        "manifest": os.path.join(out_dir, "manifest.json"),
    }
    _write_csv(paths["flows"], FLOW_COLUMNS, flow_rows)
    _write_csv(paths["aggregate"], AGG_COLUMNS, agg_rows)
    import json

    with open(paths["manifest"], "w") as fh:
        json.dump({"version": __version__, "config": cfg.to_dict()},
                  fh, indent=2, sort_keys=True)
        fh.write("\n")
    return paths


def summarize(csv_dir: str) -> str:
    """Human-readable mean +- CI table from an aggregate.csv directory."""
    path = os.path.join(csv_dir, "aggregate.csv")
    if not os.path.exists(path):
        raise FileNotFoundError(f"no aggregate.csv under {csv_dir}")
    with open(path) as fh:
        reader = csv.reader(fh)
        header = next(reader)
        rows = list(reader)
    idx = {name: i for i, name in enumerate(header)}
    lines = [
        f"{'size':>5} {'lambda':>7} {'variant':>18} "
        + " ".join(f"{m:>24}" for m in METRIC_NAMES)
    ]
    for row in rows:
        cells = []
        for m in METRIC_NAMES:
            center = row[idx[f'{m}_mean']]
            ci = row[idx[f'{m}_mean_ci95']]
            try:
                c = float(center)
            except ValueError:
                c = math.nan
            try:
                e = float(ci)
            except ValueError:
                e = math.nan
            ci_txt = "—" if math.isnan(e) else f"{e:.3g}"
            cells.append(f"{c:.4g} ± {ci_txt}".rjust(24))
        lam = row[idx["lambda"]] or "-"
        lines.append(
            f"{row[idx['network_size']]:>5} {lam:>7} {row[idx['variant']]:>18} "
            + " ".join(cells)
        )
    return "\n".join(lines)
