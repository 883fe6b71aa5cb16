"""Windowed DAG instances, path arithmetic and the weighted longest-path kernel.

An instance is a directed acyclic graph with a designated source ``s``
and sink ``p``. Every arc carries an exact value and an exact resource
amount. Every vertex carries a window: a closed interval that the
cumulative resource of a source-anchored path must hit whenever the
path visits the vertex. The solved problem is to find a maximum-value
s-p path whose cumulative resource respects every visited window.

Both solver phases and all baselines are built on the two primitives in
this module: window checking of explicit paths, and a single dynamic
program over the reverse topological order that computes, for every
vertex, a best path to the sink under a parametric arc weight.
"""

from __future__ import annotations

import heapq

from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Iterator, Optional, Sequence, Union

from .rational import Weight, _PlusInfinity

ZERO = Fraction(0)


class GraphError(Exception):
    """Base class for instance and solver errors."""


class NonContiguous(GraphError):
    """Arc list does not form a contiguous walk."""


class SinkUnreachable(GraphError):
    """Requested a path to the sink from a vertex that cannot reach it."""


class TimeoutExceeded(GraphError):
    """Cooperative deadline hit inside a solver loop."""


@dataclass(frozen=True)
class Window:
    """Closed interval on cumulative resource; ``None`` means unbounded."""

    lo: Optional[Fraction] = None
    hi: Optional[Fraction] = None

    def contains(self, r: Fraction) -> bool:
        if self.lo is not None and r < self.lo:
            return False
        if self.hi is not None and r > self.hi:
            return False
        return True

    def violated_side(self, r: Fraction) -> Optional[str]:
        if self.lo is not None and r < self.lo:
            return "lo"
        if self.hi is not None and r > self.hi:
            return "hi"
        return None


@dataclass(frozen=True)
class Arc:
    src: int
    dst: int
    value: Fraction
    resource: Fraction


@dataclass(frozen=True)
class WindowViolation:
    vertex: int
    side: str  # "lo" | "hi"


class WindowedDag:
    """Immutable problem instance.

    Vertices are dense integers ``0..n-1``; ``labels`` keeps the external
    names for display. ``topo_order`` is derived when the graph is acyclic
    and not supplied; an unusable order is kept as ``None`` so that
    :func:`validate` can report the defect instead of construction failing.
    """

    __slots__ = (
        "n",
        "windows",
        "arcs",
        "source",
        "sink",
        "labels",
        "topo_order",
        "out_arcs",
        "in_arcs",
        "_topo_pos",
    )

    def __init__(
        self,
        windows: Sequence[Window],
        arcs: Sequence[Arc],
        source: int,
        sink: int,
        labels: Optional[Sequence[str]] = None,
        topo_order: Optional[Sequence[int]] = None,
    ):
        self.n = len(windows)
        self.windows = tuple(windows)
        self.arcs = tuple(arcs)
        self.source = source
        self.sink = sink
        self.labels = tuple(labels) if labels is not None else tuple(str(i) for i in range(self.n))
        out: list[list[int]] = [[] for _ in range(self.n)]
        inn: list[list[int]] = [[] for _ in range(self.n)]
        for idx, a in enumerate(self.arcs):
            if 0 <= a.src < self.n and 0 <= a.dst < self.n:
                out[a.src].append(idx)
                inn[a.dst].append(idx)
        self.out_arcs = tuple(tuple(v) for v in out)
        self.in_arcs = tuple(tuple(v) for v in inn)
        if topo_order is not None:
            self.topo_order = tuple(topo_order)
        else:
            self.topo_order = _kahn(self.n, self.arcs)
        self._topo_pos = None
        if self.topo_order is not None and len(self.topo_order) == self.n:
            pos = [0] * self.n
            for i, u in enumerate(self.topo_order):
                if not 0 <= u < self.n:
                    pos = None
                    break
                pos[u] = i
            self._topo_pos = pos

    # -- lookups -----------------------------------------------------------

    def vertex(self, label: str) -> int:
        return self.labels.index(label)

    def find_arc(self, src: int, dst: int) -> int:
        """Index of the first src->dst arc (fixtures and tests)."""
        for idx in self.out_arcs[src]:
            if self.arcs[idx].dst == dst:
                return idx
        raise KeyError(f"no arc {src}->{dst}")


def _kahn(n: int, arcs: Sequence[Arc]) -> Optional[tuple[int, ...]]:
    indeg = [0] * n
    out: list[list[int]] = [[] for _ in range(n)]
    for a in arcs:
        if not (0 <= a.src < n and 0 <= a.dst < n):
            continue
        indeg[a.dst] += 1
        out[a.src].append(a.dst)
    queue = sorted(v for v in range(n) if indeg[v] == 0)
    order: list[int] = []
    heapq.heapify(queue)
    while queue:
        u = heapq.heappop(queue)
        order.append(u)
        for w in out[u]:
            indeg[w] -= 1
            if indeg[w] == 0:
                heapq.heappush(queue, w)
    if len(order) != n:
        return None
    return tuple(order)


@dataclass(frozen=True)
class ValidationReport:
    ok: bool
    code: Optional[str] = None  # CycleDetected | BadTopoOrder | InvertedWindow | DanglingArc | BadSourceWindow
    detail: Optional[str] = None
    warnings: tuple[str, ...] = ()


def validate(dag: WindowedDag) -> ValidationReport:
    """Check the structural invariants; the report names the first violation.

    Windows on vertices that cannot lie on any s-p path are legal but
    pointless, so they are surfaced as warnings rather than errors.
    """
    for idx, a in enumerate(dag.arcs):
        if not (0 <= a.src < dag.n and 0 <= a.dst < dag.n):
            return ValidationReport(False, "DanglingArc", f"arc {idx} endpoints out of range")
        if a.src == a.dst:
            return ValidationReport(False, "CycleDetected", f"arc {idx} is a self-loop")
    if not (0 <= dag.source < dag.n and 0 <= dag.sink < dag.n):
        return ValidationReport(False, "DanglingArc", "source or sink out of range")
    if _kahn(dag.n, dag.arcs) is None:
        return ValidationReport(False, "CycleDetected", "graph contains a directed cycle")
    if dag.topo_order is None or sorted(dag.topo_order) != list(range(dag.n)):
        return ValidationReport(False, "BadTopoOrder", "stored order is not a permutation of the vertices")
    pos = {u: i for i, u in enumerate(dag.topo_order)}
    for idx, a in enumerate(dag.arcs):
        if pos[a.src] >= pos[a.dst]:
            return ValidationReport(False, "BadTopoOrder", f"arc {idx} goes backwards in the stored order")
    for v, w in enumerate(dag.windows):
        if w.lo is not None and w.hi is not None and w.lo > w.hi:
            return ValidationReport(False, "InvertedWindow", f"vertex {dag.labels[v]} has lo > hi")
    if not dag.windows[dag.source].contains(ZERO):
        return ValidationReport(False, "BadSourceWindow", "source window does not contain resource 0")
    warnings = []
    on_path = reachable_from(dag, dag.source) & reaching(dag, dag.sink)
    for v in range(dag.n):
        w = dag.windows[v]
        if v not in on_path and (w.lo is not None or w.hi is not None):
            warnings.append(f"window on vertex {dag.labels[v]} is off every s-p path and is ignored")
    return ValidationReport(True, warnings=tuple(warnings))


def reachable_from(dag: WindowedDag, v: int) -> set[int]:
    seen = {v}
    stack = [v]
    while stack:
        u = stack.pop()
        for idx in dag.out_arcs[u]:
            w = dag.arcs[idx].dst
            if w not in seen:
                seen.add(w)
                stack.append(w)
    return seen


def reaching(dag: WindowedDag, v: int) -> set[int]:
    seen = {v}
    stack = [v]
    while stack:
        u = stack.pop()
        for idx in dag.in_arcs[u]:
            w = dag.arcs[idx].src
            if w not in seen:
                seen.add(w)
                stack.append(w)
    return seen


# -- paths ----------------------------------------------------------------


@dataclass(frozen=True)
class Path:
    """A contiguous walk with cached totals.

    ``prefix_resources[k]`` is the cumulative resource after the first k
    arcs, so it aligns with ``vertices()`` and starts at 0 at the path's
    own start vertex. ``arc_ids`` is kept when the path was built from
    arc indices; it is what lets a path be re-read on a re-oriented copy
    of the instance.
    """

    start: int
    arcs: tuple[Arc, ...]
    value: Fraction
    resource: Fraction
    prefix_resources: tuple[Fraction, ...]
    arc_ids: Optional[tuple[int, ...]] = None

    def vertices(self) -> list[int]:
        return [self.start] + [a.dst for a in self.arcs]

    @property
    def end(self) -> int:
        return self.arcs[-1].dst if self.arcs else self.start

    def labelled(self, dag: WindowedDag) -> list[str]:
        return [dag.labels[v] for v in self.vertices()]


ArcRef = Union[int, Arc]


def path_metrics(dag: WindowedDag, arcs: Sequence[ArcRef], start: Optional[int] = None) -> Path:
    """Build a :class:`Path` with cached value, resource and prefixes.

    ``arcs`` may be arc indices or Arc objects; an empty list needs
    ``start`` (defaulting to the source).
    """
    ids: Optional[list[int]] = []
    resolved: list[Arc] = []
    for ref in arcs:
        if isinstance(ref, Arc):
            ids = None
            resolved.append(ref)
        else:
            if ids is not None:
                ids.append(ref)
            resolved.append(dag.arcs[ref])
    if resolved:
        at = resolved[0].src if start is None else start
        if at != resolved[0].src:
            raise NonContiguous(f"path starts at {at} but first arc leaves {resolved[0].src}")
    else:
        at = dag.source if start is None else start
    prefixes = [ZERO]
    value = ZERO
    resource = ZERO
    cursor = at
    for a in resolved:
        if a.src != cursor:
            raise NonContiguous(f"arc {a.src}->{a.dst} does not continue from {cursor}")
        value += a.value
        resource += a.resource
        prefixes.append(resource)
        cursor = a.dst
    return Path(
        start=at,
        arcs=tuple(resolved),
        value=value,
        resource=resource,
        prefix_resources=tuple(prefixes),
        arc_ids=tuple(ids) if ids is not None else None,
    )


def path_by_vertices(dag: WindowedDag, vertices: Sequence[Union[int, str]]) -> Path:
    """Convenience: resolve a vertex sequence (ids or labels) to a Path."""
    ids = [dag.vertex(v) if isinstance(v, str) else v for v in vertices]
    arc_ids = [dag.find_arc(u, w) for u, w in zip(ids, ids[1:])]
    return path_metrics(dag, arc_ids, start=ids[0])


def check_windows(dag: WindowedDag, path: Path) -> Optional[WindowViolation]:
    """Feasibility of a source-anchored path: every visited vertex's
    cumulative resource must lie in its window. Returns the earliest
    violation, or None when feasible."""
    if path.start != dag.source:
        raise ValueError("check_windows expects a source-anchored path")
    for v, r in zip(path.vertices(), path.prefix_resources):
        side = dag.windows[v].violated_side(r)
        if side is not None:
            return WindowViolation(v, side)
    return None


# -- parametric longest paths to the sink ---------------------------------


@dataclass(frozen=True)
class TailInfo:
    mu: Fraction
    value: Fraction
    resource: Fraction
    next_arc: Optional[int]  # None at the sink


class TailMap:
    """Best window-relaxed tails to the sink for one aggregation weight.

    One reverse-topological sweep; vertices that cannot reach the sink
    are absent. Tie-breaks are deterministic: among equal aggregate
    steps prefer the larger arc value, then the larger arc resource,
    then the smaller successor index, then the smaller arc index.
    """

    def __init__(self, dag: WindowedDag, info: dict[int, TailInfo]):
        self._dag = dag
        self._info = info

    def __contains__(self, u: int) -> bool:
        return u in self._info

    def __getitem__(self, u: int) -> TailInfo:
        return self._info[u]

    def get(self, u: int) -> Optional[TailInfo]:
        return self._info.get(u)

    def vertices(self) -> Iterator[int]:
        return iter(self._info)

    def arc_ids(self, u: int) -> tuple[int, ...]:
        ids = []
        cur = u
        while True:
            nxt = self._info[cur].next_arc
            if nxt is None:
                return tuple(ids)
            ids.append(nxt)
            cur = self._dag.arcs[nxt].dst

    def path(self, u: int) -> Path:
        return path_metrics(self._dag, self.arc_ids(u), start=u)


def _sweep_tails(dag: WindowedDag, step: Callable[[Arc], Fraction]) -> dict[int, TailInfo]:
    if dag.topo_order is None:
        raise GraphError("instance is not acyclic")
    mu: dict[int, Fraction] = {dag.sink: ZERO}
    val: dict[int, Fraction] = {dag.sink: ZERO}
    res: dict[int, Fraction] = {dag.sink: ZERO}
    nxt: dict[int, Optional[int]] = {dag.sink: None}
    key: dict[int, tuple] = {}
    for u in reversed(dag.topo_order):
        for aidx in dag.out_arcs[u]:
            a = dag.arcs[aidx]
            if a.dst not in mu:
                continue
            cand = step(a) + mu[a.dst]
            ck = (cand, a.value, a.resource, -a.dst, -aidx)
            if u not in key or ck > key[u]:
                key[u] = ck
                mu[u] = cand
                val[u] = a.value + val[a.dst]
                res[u] = a.resource + res[a.dst]
                nxt[u] = aidx
    return {
        u: TailInfo(mu=mu[u], value=val[u], resource=res[u], next_arc=nxt[u])
        for u in mu
    }


def all_tails(dag: WindowedDag, delta: Weight) -> TailMap:
    """For every vertex that reaches the sink, a tail maximizing the
    aggregated weight value + delta * resource (resource alone for the
    +infinity sentinel), windows ignored."""
    if isinstance(delta, _PlusInfinity):
        info = _sweep_tails(dag, lambda a: a.resource)
    else:
        d = delta
        if d == 0:
            info = _sweep_tails(dag, lambda a: a.value)
        else:
            info = _sweep_tails(dag, lambda a: a.value + d * a.resource)
    return TailMap(dag, info)


def longest_path(dag: WindowedDag, delta: Weight, start: Optional[int] = None) -> tuple[Path, Fraction]:
    """Window-relaxed best path from ``start`` (default: source) to the sink
    under the aggregated weight, with its aggregate value."""
    at = dag.source if start is None else start
    tails = all_tails(dag, delta)
    info = tails.get(at)
    if info is None:
        raise SinkUnreachable(f"vertex {dag.labels[at]} cannot reach the sink")
    return tails.path(at), info.mu


def prune_unreachable(dag: WindowedDag) -> tuple[WindowedDag, tuple[int, ...]]:
    """Drop vertices off every s-p path. Returns the reduced instance and,
    per new vertex id, the old id it came from. Source and sink are always
    kept so the reduced instance stays well formed."""
    keep_set = (reachable_from(dag, dag.source) & reaching(dag, dag.sink)) | {dag.source, dag.sink}
    keep = sorted(keep_set)
    new_of_old = {old: new for new, old in enumerate(keep)}
    windows = [dag.windows[old] for old in keep]
    labels = [dag.labels[old] for old in keep]
    arcs = [
        Arc(new_of_old[a.src], new_of_old[a.dst], a.value, a.resource)
        for a in dag.arcs
        if a.src in keep_set and a.dst in keep_set
    ]
    reduced = WindowedDag(
        windows, arcs, new_of_old[dag.source], new_of_old[dag.sink], labels=labels
    )
    return reduced, tuple(keep)
