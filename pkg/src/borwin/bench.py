"""Benchmark harness: run algorithms over an instance directory, emit CSV.

One record per (instance, algorithm). Timeouts are cooperative: each
solver loop checks a wall-clock deadline, so a timed-out run reports
status "timeout" with an empty value. A solved-within-t summary usable
for cactus plots is written next to the main CSV.
"""

from __future__ import annotations

import csv
import time
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence, TextIO, Union

from .baselines import brute_force, rcsp_label_setting
from .graph import TimeoutExceeded, WindowedDag, prune_unreachable
from .huc import HucInstance, build_graph, solve_huc
from .rational import rat_str
from .solver import OPTIMAL, solve_awclpp

CSV_COLUMNS = [
    "instance",
    "algo",
    "status",
    "value",
    "time_ms",
    "p1_iters",
    "p2_iters",
    "labels_created",
    "labels_pruned_bound",
    "labels_pruned_dom",
    "labels_pruned_ub",
]

ALGOS = ("borwin", "rcsp", "oracle")


@dataclass
class BenchRecord:
    instance: str
    algo: str
    status: str  # "opt" | "infeasible" | "timeout" | "error"
    value: Optional[Fraction] = None
    time_ms: float = 0.0
    p1_iters: Optional[int] = None
    p2_iters: Optional[int] = None
    labels_created: Optional[int] = None
    labels_pruned_bound: Optional[int] = None
    labels_pruned_dom: Optional[int] = None
    labels_pruned_ub: Optional[int] = None

    def row(self) -> list[str]:
        def opt(x) -> str:
            return "" if x is None else str(x)

        return [
            self.instance,
            self.algo,
            self.status,
            "" if self.value is None else rat_str(self.value),
            f"{self.time_ms:.3f}",
            opt(self.p1_iters),
            opt(self.p2_iters),
            opt(self.labels_created),
            opt(self.labels_pruned_bound),
            opt(self.labels_pruned_dom),
            opt(self.labels_pruned_ub),
        ]


def _as_dag(kind: str, obj: Union[WindowedDag, HucInstance]) -> WindowedDag:
    if kind == "dag":
        return obj
    dag, _ = build_graph(obj)
    return prune_unreachable(dag)[0]


def run_one(
    name: str,
    kind: str,
    obj: Union[WindowedDag, HucInstance],
    algo: str,
    timeout_ms: Optional[float],
) -> BenchRecord:
    deadline = None if timeout_ms is None else time.monotonic() + timeout_ms / 1000.0
    start = time.perf_counter()
    rec = BenchRecord(instance=name, algo=algo, status="error")
    try:
        if algo == "borwin":
            if kind == "huc":
                sol = solve_huc(obj, deadline=deadline)
                rec.status = "opt" if sol.status == OPTIMAL else "infeasible"
                rec.value = sol.revenue
                stats = sol.stats
            else:
                sol = solve_awclpp(obj, deadline=deadline)
                rec.status = "opt" if sol.status == OPTIMAL else "infeasible"
                rec.value = sol.value
                stats = sol.stats
            rec.p1_iters = stats.phase1_iterations
            rec.p2_iters = stats.phase2_iterations
            rec.labels_created = stats.labels_created
            rec.labels_pruned_bound = stats.labels_pruned_bound
            rec.labels_pruned_dom = stats.labels_pruned_dominance
            rec.labels_pruned_ub = stats.labels_pruned_ub
        elif algo == "rcsp":
            res = rcsp_label_setting(_as_dag(kind, obj), deadline=deadline)
            rec.status = "opt" if res.status == "optimal" else "infeasible"
            rec.value = res.value
        elif algo == "oracle":
            res = brute_force(_as_dag(kind, obj), strict=False, deadline=deadline)
            rec.status = "opt" if res.status == "optimal" else "infeasible"
            rec.value = res.value
        else:
            raise ValueError(f"unknown algorithm {algo!r}")
    except TimeoutExceeded:
        rec.status = "timeout"
        rec.value = None
    except Exception:
        rec.status = "error"
        rec.value = None
    rec.time_ms = (time.perf_counter() - start) * 1000.0
    return rec


def run_bench(
    files: Sequence[tuple[str, str, Union[WindowedDag, HucInstance]]],
    algos: Sequence[str] = ALGOS,
    timeout_ms: Optional[float] = None,
) -> list[BenchRecord]:
    records = []
    for name, kind, obj in files:
        for algo in algos:
            records.append(run_one(name, kind, obj, algo, timeout_ms))
    return records


def write_csv(records: Sequence[BenchRecord], fh: TextIO) -> None:
    writer = csv.writer(fh, lineterminator="\n")
    writer.writerow(CSV_COLUMNS)
    for rec in records:
        writer.writerow(rec.row())


def write_summary(records: Sequence[BenchRecord], fh: TextIO) -> None:
    """Cumulative instances solved per algorithm, by increasing time."""
    writer = csv.writer(fh, lineterminator="\n")
    writer.writerow(["algo", "time_ms", "solved"])
    algos = sorted({r.algo for r in records})
    for algo in algos:
        times = sorted(r.time_ms for r in records if r.algo == algo and r.status == "opt")
        for k, t in enumerate(times, start=1):
            writer.writerow([algo, f"{t:.3f}", k])
