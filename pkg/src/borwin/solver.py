"""End-to-end exact solve: orientation, bounding phase, enumeration phase."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Optional

from .bounds import OrientedBound, ValueTailBound
from .graph import Path, SinkUnreachable, WindowedDag, check_windows, path_metrics
from .phase1 import (
    LIE,
    Infeasible,
    Pair,
    Phase1TraceEvent,
    PhaseOneOutcome,
    SolvedAtSp,
    orient_dag,
    run_phase1,
)
from .phase2 import NoFeasiblePath, SolveStats, Trace, run_phase2

ZERO = Fraction(0)

OPTIMAL = "optimal"
INFEASIBLE = "infeasible"


@dataclass
class AwclppSolution:
    status: str  # "optimal" | "infeasible"
    path: Optional[Path]  # original coordinates
    value: Optional[Fraction]
    phase1: Optional[PhaseOneOutcome]
    stats: SolveStats


def solve_awclpp(
    dag: WindowedDag,
    *,
    ub_provider="default",
    use_dominance: bool = True,
    use_bound_prune: bool = True,
    use_ub_prune: bool = True,
    trace_phase1: Optional[Callable[[Phase1TraceEvent], None]] = None,
    trace_phase2: Optional[Trace] = None,
    deadline: Optional[float] = None,
) -> AwclppSolution:
    """Solve a windowed instance exactly.

    ``ub_provider`` may be "default" (window-relaxed value tails), None
    (disable the complementary rule) or any object with the provider
    contract, understood to reason in original resource coordinates.
    """
    try:
        outcome = run_phase1(dag, trace=trace_phase1)
    except SinkUnreachable:
        return AwclppSolution(INFEASIBLE, None, None, None, SolveStats())

    if isinstance(outcome, Infeasible):
        return AwclppSolution(INFEASIBLE, None, None, outcome, SolveStats())

    if isinstance(outcome, SolvedAtSp):
        if check_windows(dag, outcome.path) is None:
            # the window-relaxed optimum is feasible, hence optimal
            return AwclppSolution(OPTIMAL, outcome.path, outcome.path.value, outcome, SolveStats())
        work = dag
        delta = ZERO
        oriented = False
        iterations = 0
    else:
        assert isinstance(outcome, Pair)
        oriented = outcome.orientation == LIE
        work = orient_dag(dag) if oriented else dag
        delta = outcome.delta
        iterations = outcome.iterations

    if ub_provider == "default":
        ub = ValueTailBound(work)
    elif ub_provider is None:
        ub = None
    else:
        ub = OrientedBound(ub_provider) if oriented else ub_provider

    try:
        result = run_phase2(
            work,
            delta,
            ub,
            use_dominance=use_dominance,
            use_bound_prune=use_bound_prune,
            use_ub_prune=use_ub_prune and ub is not None,
            trace=trace_phase2,
            deadline=deadline,
        )
    except NoFeasiblePath:
        stats = SolveStats(phase1_iterations=iterations)
        return AwclppSolution(INFEASIBLE, None, None, outcome, stats)

    result.stats.phase1_iterations = iterations
    best = result.best
    assert best is not None and best.arc_ids is not None
    if oriented:
        best = path_metrics(dag, best.arc_ids, start=best.start)
    return AwclppSolution(OPTIMAL, best, best.value, outcome, result.stats)
