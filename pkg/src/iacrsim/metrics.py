"""Throughput, outage and energy metrics; experiment sweeps and CSV output.

A run's throughput is delivered over sent packets across its flows; outage is
the fraction of per-packet route SINR minima at or below the reception
threshold (a route is as good as its weakest link); energy is mean consumed
joules per node. Sweeps run one cell per (protocol, swept value, seed),
aggregate per-cell means and standard errors, and write one CSV row per
(protocol, value), plus a JSON manifest with everything needed to reproduce
the numbers.
"""

import csv
import io
import json
import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace

from . import kernels, traces
from .config import ScenarioConfig
from .engine import Simulator
from .routing import PROTOCOLS


class MetricsError(ValueError):
    """Undefined or internally inconsistent metric computation."""


SWEEPABLE = ("n_nodes", "sinr_threshold_db")

CSV_COLUMNS = ["protocol", "n_nodes", "sinr_threshold_db", "delta",
               "seed_count", "throughput_mean", "throughput_stderr",
               "outage_mean", "outage_stderr", "energy_mean_j"]


def throughput(n_s: int, t_p: int) -> float:
    """Delivered-to-sent packet ratio; zero for a flow that never started."""
    if t_p == 0:
        return 0.0
    if n_s > t_p or n_s < 0:
        raise MetricsError(f"delivered count {n_s} exceeds sent count {t_p}")
    return n_s / t_p


def outage(samples, threshold: float) -> float:
    """Empirical probability that the route SINR is at or below threshold."""
    samples = list(samples)
    if not samples:
        raise MetricsError("outage over an empty sample list is undefined")
    return sum(1 for s in samples if s <= threshold) / len(samples)


def quantize(x: float) -> float:
    """Clamp to the 12-significant-digit grid used by the CSV format."""
    return float(f"{x:.12g}")


@dataclass(frozen=True)
class RunMetrics:
    throughput: float
    outage: float
    mean_energy: float
    sent: int
    delivered: int
    flow_failures: int
    reroutes: int


def compute_run_metrics(records) -> RunMetrics:
    """Metrics for one simulation trace (list of records or a trace file's
    parsed content)."""
    scenario = next(r for r in records if r["kind"] == "scenario")
    cfg = scenario["config"]
    threshold = 10.0 ** (cfg["sinr_threshold_db"] / 10.0)
    sent = delivered = 0
    failures = reroutes = 0
    samples = []
    energies = []
    for r in records:
        kind = r["kind"]
        if kind == "flow":
            sent += r["sent"]
            delivered += r["delivered"]
            if r["failed"]:
                failures += 1
        elif kind == "delivery":
            samples.append(r["min_sinr"])
        elif kind == "energy":
            energies.append(r["joules"])
        elif kind == "route" and r.get("event") == "reroute":
            reroutes += 1
    return RunMetrics(
        throughput=throughput(delivered, sent),
        outage=outage(samples, threshold) if samples else 1.0,
        mean_energy=sum(energies) / max(len(energies), 1),
        sent=sent, delivered=delivered,
        flow_failures=failures, reroutes=reroutes)


@dataclass(frozen=True)
class MetricsRecord:
    scenario_id: str
    protocol: str
    n_nodes: int
    sinr_threshold_db: float
    delta: float
    throughput: float
    outage: float
    mean_energy: float
    seeds_aggregated: int
    throughput_stderr: float
    outage_stderr: float

    def csv_row(self) -> list:
        return [self.protocol, self.n_nodes,
                f"{self.sinr_threshold_db:.12g}", f"{self.delta:.12g}",
                self.seeds_aggregated,
                f"{self.throughput:.12g}", f"{self.throughput_stderr:.12g}",
                f"{self.outage:.12g}", f"{self.outage_stderr:.12g}",
                f"{self.mean_energy:.12g}"]


@dataclass
class SweepSpec:
    parameter: str                      # n_nodes | sinr_threshold_db
    values: list
    base: ScenarioConfig
    seeds: list
    protocols: tuple = PROTOCOLS

    def validate(self):
        if self.parameter not in SWEEPABLE:
            raise MetricsError(f"swept parameter must be one of {SWEEPABLE}")
        if not self.values:
            raise MetricsError("sweep value list must not be empty")
        if list(self.values) != sorted(self.values) or \
                len(set(self.values)) != len(self.values):
            raise MetricsError("sweep values must be strictly increasing")
        if not self.seeds:
            raise MetricsError("sweep needs at least one seed")
        for p in self.protocols:
            if p not in PROTOCOLS:
                raise MetricsError(f"unknown protocol {p!r}")
        return self

    def cell_config(self, protocol: str, value, seed: int) -> ScenarioConfig:
        return make_cell_config(self.base, self.parameter, protocol, value, seed)


def make_cell_config(base: ScenarioConfig, parameter: str, protocol: str,
                     value, seed: int) -> ScenarioConfig:
    cfg = replace(base, protocol=protocol, seed=seed)
    setattr(cfg, parameter, type(getattr(cfg, parameter))(value))
    return cfg.validate()


def _run_cell(args):
    """Worker for one sweep cell; must stay importable for process pools."""
    protocol, value, seed, spec_parameter, base = args
    cfg = make_cell_config(base, spec_parameter, protocol, value, seed)
    records = Simulator(cfg).run()
    m = compute_run_metrics(records)
    return {"protocol": protocol, "value": value, "seed": seed,
            "throughput": m.throughput, "outage": m.outage,
            "energy": m.mean_energy}


def _mean_stderr(xs):
    n = len(xs)
    mean = sum(xs) / n
    if n < 2:
        return mean, 0.0
    var = sum((x - mean) ** 2 for x in xs) / (n - 1)
    return mean, math.sqrt(var / n)


def aggregate_cells(spec: SweepSpec, cells) -> list[MetricsRecord]:
    """Reduce per-seed cell results to one record per (protocol, value)."""
    out = []
    for protocol in spec.protocols:
        for value in spec.values:
            rows = [c for c in cells
                    if c["protocol"] == protocol and c["value"] == value]
            if not rows:
                continue
            rows.sort(key=lambda c: c["seed"])
            tp_mean, tp_se = _mean_stderr([r["throughput"] for r in rows])
            out_mean, out_se = _mean_stderr([r["outage"] for r in rows])
            e_mean, _ = _mean_stderr([r["energy"] for r in rows])
            cfg = spec.cell_config(protocol, value, rows[0]["seed"])
            out.append(MetricsRecord(
                scenario_id=f"{protocol}-{spec.parameter}={value}",
                protocol=protocol, n_nodes=cfg.n_nodes,
                sinr_threshold_db=cfg.sinr_threshold_db, delta=cfg.delta,
                throughput=quantize(tp_mean), outage=quantize(out_mean),
                mean_energy=quantize(e_mean), seeds_aggregated=len(rows),
                throughput_stderr=quantize(tp_se),
                outage_stderr=quantize(out_se)))
    return out


def run_sweep(spec: SweepSpec, jobs: int = 1):
    """Execute every (protocol, value, seed) cell.

    Returns (records, cells, failures): aggregated records ordered by
    (protocol, value), the per-seed cell results, and a list of
    (cell args, error string) for cells that failed. Failed cells leave
    their aggregate computed from the surviving seeds.
    """
    spec.validate()
    tasks = [(p, v, s, spec.parameter, spec.base)
             for p in spec.protocols for v in spec.values for s in spec.seeds]
    cells = []
    failures = []
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            for task, result in zip(tasks, pool.map(_run_cell_safe, tasks)):
                if isinstance(result, str):
                    failures.append((task[:3], result))
                else:
                    cells.append(result)
    else:
        for task in tasks:
            result = _run_cell_safe(task)
            if isinstance(result, str):
                failures.append((task[:3], result))
            else:
                cells.append(result)
    return aggregate_cells(spec, cells), cells, failures


def _run_cell_safe(args):
    try:
        return _run_cell(args)
    except Exception as exc:  # cell failure must not kill the sweep
        return f"{type(exc).__name__}: {exc}"


def records_to_csv(records) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CSV_COLUMNS)
    for r in records:
        writer.writerow(r.csv_row())
    return buf.getvalue()


def csv_to_records(text: str) -> list[MetricsRecord]:
    reader = csv.reader(io.StringIO(text))
    header = next(reader)
    if header != CSV_COLUMNS:
        raise MetricsError(f"unexpected CSV header {header}")
    out = []
    for row in reader:
        (protocol, n_nodes, th_db, delta, seeds, tp, tp_se, og, og_se, en) = row
        out.append(MetricsRecord(
            scenario_id=f"{protocol}-row", protocol=protocol,
            n_nodes=int(n_nodes), sinr_threshold_db=float(th_db),
            delta=float(delta), throughput=float(tp), outage=float(og),
            mean_energy=float(en), seeds_aggregated=int(seeds),
            throughput_stderr=float(tp_se), outage_stderr=float(og_se)))
    return out


def write_sweep_outputs(spec: SweepSpec, records, cells, failures, out_dir,
                        name: str = "sweep"):
    """CSV + reproducibility manifest, written atomically."""
    csv_path = os.path.join(out_dir, f"{name}.csv")
    manifest_path = os.path.join(out_dir, f"{name}.manifest.json")
    traces.write_text(records_to_csv(records), csv_path)
    manifest = {
        "parameter": spec.parameter,
        "values": list(spec.values),
        "protocols": list(spec.protocols),
        "seeds": list(spec.seeds),
        "base_config": spec.base.to_dict(),
        "kernel_backend": kernels.BACKEND,
        "cells_completed": len(cells),
        "cells_failed": [{"cell": list(c), "error": e} for c, e in failures],
        "csv": os.path.basename(csv_path),
    }
    traces.write_text(json.dumps(manifest, indent=2, sort_keys=True) + "\n",
                      manifest_path)
    return csv_path, manifest_path
