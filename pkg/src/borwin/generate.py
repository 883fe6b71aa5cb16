"""Seeded instance generators.

Identical configs produce byte-identical instance files: all randomness
flows through one ``random.Random(seed)`` and the JSON rendering is
canonical. DAG windows are sampled against the per-vertex envelope of
attainable prefix resources, wide enough to keep a healthy share of
feasible instances and tight enough that a good share are infeasible.
Commitment instances are built around a randomly walked legal schedule,
re-checked by the legality oracle, so at least one feasible schedule is
guaranteed by construction.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

from .graph import Arc, Window, WindowedDag
from .huc import HucInstance, OperatingPoint, cumulative_flows, legal_moves, schedule_is_legal
from .io import dag_to_dict, huc_to_dict

ZERO = Fraction(0)


@dataclass(frozen=True)
class GeneratorConfig:
    seed: int
    family: str  # "dag" | "huc"
    vertices: int = 10
    density: float = 0.5
    periods: int = 6
    points: int = 3
    min_updown: int = 2
    price_mode: str = "independent"  # | "near-flat"

    def check(self) -> None:
        if self.family not in ("dag", "huc"):
            raise ValueError(f"unknown family {self.family!r}")
        if self.price_mode not in ("independent", "near-flat"):
            raise ValueError(f"unknown price mode {self.price_mode!r}")
        if self.family == "dag" and self.vertices < 2:
            raise ValueError("dag family needs at least 2 vertices")
        if self.family == "huc" and (self.periods < 1 or self.points < 2 or self.min_updown < 1):
            raise ValueError("huc family needs periods >= 1, points >= 2, min_updown >= 1")


def generate(config: GeneratorConfig) -> dict:
    config.check()
    rng = random.Random(config.seed)
    if config.family == "dag":
        dag = random_dag(rng, config.vertices, config.density)
        return dag_to_dict(dag)
    inst = random_huc(rng, config.periods, config.points, config.min_updown, config.price_mode)
    return huc_to_dict(inst)


def random_dag(rng: random.Random, n: int, density: float = 0.5) -> WindowedDag:
    """Layered DAG with integer arc data and randomized windows.

    Every vertex lies on an s-p path. Window bounds are drawn around the
    attainable prefix-resource envelope; roughly two in five instances
    admit no feasible path, which is the mix the cross-checking sweeps
    want.
    """
    labels = ["s"] + [f"u{k}" for k in range(1, n - 1)] + ["p"]
    layers = max(2, min(n - 1, 2 + n // 3))
    layer_of = [0] + sorted(rng.randint(1, layers - 1) for _ in range(n - 2)) + [layers]

    def draw_arc(u: int, v: int) -> Arc:
        return Arc(u, v, Fraction(rng.randint(-3, 12)), Fraction(rng.randint(0, 9)))

    arcs: list[Arc] = []
    seen: set[tuple[int, int]] = set()
    for v in range(1, n):
        ahead = [u for u in range(v) if layer_of[u] < layer_of[v]]
        u = rng.choice(ahead)
        arcs.append(draw_arc(u, v))
        seen.add((u, v))
    for u in range(n - 1):
        behind = [v for v in range(u + 1, n) if layer_of[v] > layer_of[u] and (u, v) not in seen]
        if not any(a.src == u for a in arcs):
            v = rng.choice(behind or [n - 1])
            arcs.append(draw_arc(u, v))
            seen.add((u, v))
        for v in behind:
            if rng.random() < density * 0.5:
                arcs.append(draw_arc(u, v))
                seen.add((u, v))
    # guarantee every vertex reaches the sink
    for u in range(1, n - 1):
        if not any(a.src == u for a in arcs):
            arcs.append(draw_arc(u, n - 1))

    # attainable prefix-resource envelope
    lo_env = [None] * n
    hi_env = [None] * n
    lo_env[0] = hi_env[0] = ZERO
    for v in range(1, n):
        ins = [(a.src, a.resource) for a in arcs if a.dst == v]
        los = [lo_env[u] + r for u, r in ins if lo_env[u] is not None]
        his = [hi_env[u] + r for u, r in ins if hi_env[u] is not None]
        if los:
            lo_env[v] = min(los)
            hi_env[v] = max(his)

    windows = [Window(ZERO, None)]
    for v in range(1, n):
        lo = lo_env[v] if lo_env[v] is not None else ZERO
        hi = hi_env[v] if hi_env[v] is not None else lo
        span = hi - lo
        windowed = v == n - 1 or rng.random() < 0.6
        if not windowed:
            windows.append(Window(None, None))
            continue
        w_lo: Optional[Fraction] = lo + Fraction(rng.randint(0, int(span) + 3))
        w_hi: Optional[Fraction] = w_lo + Fraction(rng.randint(0, max(1, int(span))))
        style = rng.random()
        if style < 0.2:
            w_lo = None
        elif style < 0.35:
            w_hi = None
        if w_lo is not None and w_hi is not None and w_lo > w_hi:
            w_lo, w_hi = w_hi, w_lo
        windows.append(Window(w_lo, w_hi))
    return WindowedDag(windows, arcs, 0, n - 1, labels=labels)


def random_huc(
    rng: random.Random,
    periods: int,
    points: int,
    min_updown: int,
    price_mode: str = "independent",
) -> HucInstance:
    flows = sorted(rng.sample(range(1, 10), points - 1))
    powers = sorted(rng.sample(range(1, 15), points - 1))
    ops = (OperatingPoint(ZERO, ZERO),) + tuple(
        OperatingPoint(Fraction(d), Fraction(p)) for d, p in zip(flows, powers)
    )
    base_price = Fraction(rng.randint(5, 300), 10)
    if price_mode == "near-flat":
        prices = tuple(base_price * Fraction(rng.randint(95, 105), 100) for _ in range(periods))
    else:
        prices = tuple(Fraction(rng.randint(5, 300), 10) for _ in range(periods))
    phi1 = Fraction(rng.randint(0, 120), 10)
    phi2 = Fraction(rng.randint(0, 120), 10)
    ramp_up = Fraction(rng.randint(max(flows[0], 2), sum(flows) + 2))
    ramp_down = Fraction(rng.randint(max(flows[0], 2), sum(flows) + 2))

    probe = HucInstance(
        periods=periods,
        points=ops,
        ramp_up=ramp_up,
        ramp_down=ramp_down,
        min_updown=min_updown,
        prices=prices,
        water_value_upstream=phi1,
        water_value_downstream=phi2,
        win_lo=tuple(ZERO for _ in range(periods)),
        win_hi=tuple(Fraction(10**9) for _ in range(periods)),
    )
    # walk a random legal schedule and window its cumulative flows
    cum_f = cumulative_flows(probe)
    level, hold = 0, 0
    cum = ZERO
    cums: list[Fraction] = []
    walked: list[int] = []
    for _ in range(periods):
        level, hold = rng.choice(legal_moves(probe, level, hold))
        walked.append(level)
        cum += cum_f[level]
        cums.append(cum)
    win_lo = []
    win_hi = []
    for c in cums:
        slack_lo = Fraction(rng.randint(0, 6))
        slack_hi = Fraction(rng.randint(0, 6))
        win_lo.append(max(ZERO, c - slack_lo))
        win_hi.append(c + slack_hi)
    inst = HucInstance(
        periods=periods,
        points=ops,
        ramp_up=ramp_up,
        ramp_down=ramp_down,
        min_updown=min_updown,
        prices=prices,
        water_value_upstream=phi1,
        water_value_downstream=phi2,
        win_lo=tuple(win_lo),
        win_hi=tuple(win_hi),
    )
    inst.check()
    assert schedule_is_legal(inst, walked), "generator walked an illegal schedule"
    return inst
