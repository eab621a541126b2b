"""Aircraft maintenance routing as a compact integer program.

The week is cyclic. A vertex is a (leg, k) pair where k counts days since
the aircraft last spent a night at a maintenance base; k never exceeds the
maintenance interval T. An arc follows one airplane-feasible connection:
same-day connections keep k, overnight stays at a base reset k to 1, and
overnight stays elsewhere advance k by the midnights crossed (dropped when
that would exceed T, which is exactly the maintenance rule). A cycle that
never rests at a base cannot close, because k strictly increases along it.

Each selected arc spans the tail leg's flight plus the ground time to the
head leg's departure. The number of times that span contains the weekly
Monday-midnight instant equals, summed over a route, the number of weeks
the route takes, and one aircraft is needed per week of route span. The
fleet budget row caps that sum; forcing rows require chosen connections to
be flown, which is how crew-side short connections are imposed.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from .instance import (
    WEEK_MINUTES,
    Connection,
    Instance,
    build_connections,
)
from .milp import MipStatus, solve_mip
from .milp.model import LinearProgram


@dataclass(frozen=True)
class RoutingArc:
    conn: Connection
    k_from: int
    k_to: int
    crossings: int


@dataclass
class RoutingGraph:
    inst: Instance
    arcs: list[RoutingArc]
    vertex_of: dict[tuple[int, int], int]
    in_arcs_of_leg: dict[int, list[int]]
    out_arcs_of_leg: dict[int, list[int]]
    arcs_of_conn: dict[tuple[int, int], list[int]]
    conn_keys: set[tuple[int, int]]


def weekly_crossings(start: int, length: int, instant: int = 0) -> int:
    """How often [start, start + length) contains the weekly instant."""
    if length <= 0:
        return 0
    d0 = (instant - start) % WEEK_MINUTES
    if d0 >= length:
        return 0
    return 1 + (length - 1 - d0) // WEEK_MINUTES


def build_routing_graph(
    inst: Instance, connections: list[Connection] | None = None
) -> RoutingGraph:
    if connections is None:
        connections = build_connections(inst)
    legs = {l.id: l for l in inst.legs}
    t_max = inst.rules.T

    vertex_of = {}
    for leg in sorted(inst.legs, key=lambda l: l.id):
        for k in range(1, t_max + 1):
            vertex_of[(leg.id, k)] = len(vertex_of)

    arcs: list[RoutingArc] = []
    in_arcs: dict[int, list[int]] = {l.id: [] for l in inst.legs}
    out_arcs: dict[int, list[int]] = {l.id: [] for l in inst.legs}
    arcs_of_conn: dict[tuple[int, int], list[int]] = {}
    for c in connections:
        tail = legs[c.from_leg]
        cross = weekly_crossings(tail.dep_time,
                                 tail.flying_minutes + c.ground_minutes)
        at_base = inst.airport(tail.arr_airport).is_base
        for k in range(1, t_max + 1):
            if c.midnights_crossed == 0:
                k2 = k
            elif at_base:
                k2 = 1
            else:
                k2 = k + c.midnights_crossed
                if k2 > t_max:
                    continue
            aid = len(arcs)
            arcs.append(RoutingArc(c, k, k2, cross))
            in_arcs[c.to_leg].append(aid)
            out_arcs[c.from_leg].append(aid)
            arcs_of_conn.setdefault(c.key, []).append(aid)
    return RoutingGraph(inst, arcs, vertex_of, in_arcs, out_arcs, arcs_of_conn,
                        conn_keys={c.key for c in connections})


def build_ar_model(
    graph: RoutingGraph,
    budget: int | None,
    forced: dict[tuple[int, int], int],
) -> tuple[LinearProgram, list[int]]:
    """Flow + cover + budget + forcing rows over binary arc variables."""
    inst = graph.inst
    lp = LinearProgram(name="routing")
    x = [lp.add_variable(obj=float(a.crossings), binary=True, name=f"a{i}")
         for i, a in enumerate(graph.arcs)]

    flow: dict[tuple[int, int], dict[int, float]] = {
        key: {} for key in graph.vertex_of
    }
    for i, a in enumerate(graph.arcs):
        flow[(a.conn.to_leg, a.k_to)][x[i]] = flow[(a.conn.to_leg, a.k_to)].get(x[i], 0.0) + 1.0
        tail_key = (a.conn.from_leg, a.k_from)
        flow[tail_key][x[i]] = flow[tail_key].get(x[i], 0.0) - 1.0
    for key in sorted(flow):
        lp.add_row(flow[key], "=", 0.0, name=f"flow_{key[0]}_{key[1]}")

    for leg_id in sorted(graph.in_arcs_of_leg):
        coefs = {x[i]: 1.0 for i in graph.in_arcs_of_leg[leg_id]}
        lp.add_row(coefs, "=", 1.0, name=f"cover_{leg_id}")

    if budget is not None:
        coefs = {x[i]: float(a.crossings)
                 for i, a in enumerate(graph.arcs) if a.crossings}
        lp.add_row(coefs, "<=", float(budget), name="budget")

    for key in sorted(forced):
        if key not in graph.conn_keys:
            raise ValueError(f"forced connection {key} does not exist")
        # A connection whose arcs were all dropped by the maintenance cap
        # yields an unsatisfiable row, i.e. a proof of infeasibility.
        coefs = {x[i]: 1.0 for i in graph.arcs_of_conn.get(key, [])}
        lp.add_row(coefs, ">=", float(forced[key]), name=f"force_{key[0]}_{key[1]}")
    return lp, x


@dataclass
class Route:
    legs: list[int]
    week_span: int


@dataclass
class RoutingResult:
    status: str
    n_aircraft: int | None
    routes: list[Route]
    forced: list[tuple[int, int]]
    uncoverable_legs: list[int] = field(default_factory=list)
    nodes: int = 0

    @property
    def feasible(self) -> bool:
        return self.status == "optimal"

    def as_dict(self) -> dict:
        return {
            "status": self.status,
            "aircraft_used": self.n_aircraft,
            "routes": [r.legs for r in self.routes],
            "a0_crossings": [r.week_span for r in self.routes],
            "forced": [list(k) for k in self.forced],
            "uncoverable_legs": self.uncoverable_legs,
        }


def _extract_routes(graph: RoutingGraph, x) -> list[Route]:
    inst = graph.inst
    legs = {l.id: l for l in inst.legs}
    succ: dict[int, tuple[int, int]] = {}
    for i, a in enumerate(graph.arcs):
        if x[i] > 0.5:
            if a.conn.from_leg in succ:
                raise RuntimeError("leg with two selected outgoing arcs")
            succ[a.conn.from_leg] = (a.conn.to_leg, a.crossings)
    if set(succ) != set(legs):
        raise RuntimeError("selected arcs do not cover every leg")

    routes = []
    seen: set[int] = set()
    for start in sorted(legs):
        if start in seen:
            continue
        cycle = [start]
        seen.add(start)
        crossings = succ[start][1]
        cur = succ[start][0]
        while cur != start:
            cycle.append(cur)
            seen.add(cur)
            crossings += succ[cur][1]
            cur = succ[cur][0]

        # Independent week count: total cyclic duration must be a whole
        # number of weeks and must match the crossing count.
        total = 0
        for a, b in zip(cycle, cycle[1:] + cycle[:1]):
            leg = legs[a]
            gap = (legs[b].dep_time - leg.arr_time) % WEEK_MINUTES
            total += leg.flying_minutes + gap
        if total % WEEK_MINUTES != 0 or total // WEEK_MINUTES != crossings:
            raise RuntimeError(
                f"route week span {crossings} disagrees with duration {total}"
            )
        routes.append(Route(legs=cycle, week_span=crossings))
    return routes


def _structural_gaps(graph: RoutingGraph) -> list[int]:
    bad = [leg for leg, lst in graph.in_arcs_of_leg.items() if not lst]
    bad += [leg for leg, lst in graph.out_arcs_of_leg.items() if not lst]
    return sorted(set(bad))


def solve_routing(
    inst: Instance,
    connections: list[Connection] | None = None,
    forced=None,
    budget: int | None = -1,
    node_limit: int = 200_000,
) -> RoutingResult:
    """Minimum-aircraft maintenance routing under a fleet budget.

    ``budget=-1`` means the instance's fleet size; ``budget=None`` drops the
    budget row entirely (pure aircraft minimization).
    """
    if budget == -1:
        budget = inst.rules.n_a
    if forced is None:
        forced = {}
    elif not isinstance(forced, dict):
        forced = {tuple(k): 1 for k in forced}
    graph = build_routing_graph(inst, connections)
    forced_keys = sorted(forced)

    gaps = _structural_gaps(graph)
    if gaps:
        return RoutingResult(status="infeasible", n_aircraft=None, routes=[],
                             forced=forced_keys, uncoverable_legs=gaps)

    lp, x = build_ar_model(graph, budget, forced)
    mip = solve_mip(lp, node_limit=node_limit)
    if mip.status == MipStatus.NODE_LIMIT:
        return RoutingResult(status="limit", n_aircraft=None, routes=[],
                             forced=forced_keys, nodes=mip.nodes)
    if mip.status == MipStatus.INFEASIBLE:
        return RoutingResult(status="infeasible", n_aircraft=None, routes=[],
                             forced=forced_keys, nodes=mip.nodes)
    routes = _extract_routes(graph, mip.x)
    n_air = sum(r.week_span for r in routes)
    return RoutingResult(status="optimal", n_aircraft=n_air, routes=routes,
                         forced=forced_keys, nodes=mip.nodes)


def minimize_aircraft(
    inst: Instance,
    connections: list[Connection] | None = None,
    node_limit: int = 200_000,
) -> RoutingResult:
    """Fewest aircraft that can fly the whole schedule, no budget row."""
    return solve_routing(inst, connections, forced=None, budget=None,
                         node_limit=node_limit)
