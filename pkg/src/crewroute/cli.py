"""Command line interface.

Reports are JSON with sorted keys and no timing fields by default, so the
same command on the same input produces byte-identical output; --stats adds
wall-clock numbers and is therefore not reproducible. Exit codes: 0 solved,
1 input or validation error (single "crewroute: error:" line on stderr),
2 proven infeasible, 3 a node, path or iteration limit was hit.
"""

from __future__ import annotations

import argparse
import json
import sys

from . import oracles
from .generate import generate_instance
from .instance import (
    ConnectionKind,
    Instance,
    build_connections,
    dumps_instance,
    load_instance,
)
from .integrated import solve_integrated
from .pairing import solve_crew_pairing
from .routing import minimize_aircraft, solve_routing

_EXIT_BY_STATUS = {"optimal": 0, "feasible": 0, "infeasible": 2, "limit": 3}


def _emit(obj: dict, output: str | None) -> None:
    text = json.dumps(obj, indent=2, sort_keys=True) + "\n"
    if output:
        with open(output, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _load(path: str) -> Instance:
    return load_instance(path)


def _parse_kappa(value: str):
    if value == "auto":
        return "auto"
    try:
        return int(value)
    except ValueError:
        raise argparse.ArgumentTypeError("kappa must be an integer or 'auto'")


def _parse_conn(value: str) -> tuple[int, int]:
    try:
        a, b = value.split(",")
        return int(a), int(b)
    except ValueError:
        raise argparse.ArgumentTypeError("connection must look like FROM,TO")


def _add_common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--output", help="write the JSON report here instead of stdout")
    p.add_argument("--stats", action="store_true",
                   help="include wall-clock statistics (not reproducible)")
    p.add_argument("--jobs", type=int, default=1,
                   help="worker threads for window pricing")
    p.add_argument("--limit-nodes", type=int, default=200_000,
                   help="branch and bound node limit")
    p.add_argument("--limit-paths", type=int, default=200_000,
                   help="path cap for the enumeration phase")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="crewroute",
        description="Aircraft routing and crew pairing over a cyclic week.",
    )
    sub = ap.add_subparsers(dest="command", required=True)

    g = sub.add_parser("generate", help="write a random feasible instance")
    g.add_argument("--airports", type=int, default=4)
    g.add_argument("--bases", type=int, default=1)
    g.add_argument("--legs", type=int, required=True)
    g.add_argument("--aircraft", type=int, required=True)
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--output", help="write the instance here instead of stdout")

    r = sub.add_parser("route", help="maintenance-feasible aircraft routing")
    r.add_argument("instance")
    r.add_argument("--force", action="append", type=_parse_conn, default=[],
                   metavar="FROM,TO", help="connection the aircraft must fly")
    r.add_argument("--budget", type=int, default=None,
                   help="fleet size (default: instance value)")
    r.add_argument("--minimize", action="store_true",
                   help="drop the budget row and minimize aircraft")
    _add_common(r)

    c = sub.add_parser("pair", help="crew pairing by column generation")
    c.add_argument("instance")
    c.add_argument("--kappa", type=_parse_kappa, default=None,
                   help="bound states per vertex, or 'auto'")
    _add_common(c)

    i = sub.add_parser("integrated", help="pairing consistent with routing")
    i.add_argument("instance")
    i.add_argument("--kappa", type=_parse_kappa, default=None)
    i.add_argument("--gamma", type=float, default=None,
                   help="cut depth in (0, 1]; 1 keeps the loop exact")
    i.add_argument("--iteration-limit", type=int, default=100)
    _add_common(i)

    o = sub.add_parser("oracle", help="brute-force reference on small instances")
    o.add_argument("instance")
    o.add_argument("problem", choices=["pairing", "routing", "integrated"])
    o.add_argument("--output")

    s = sub.add_parser("report", help="summarize an instance file")
    s.add_argument("instance")
    s.add_argument("--output")

    return ap


def _cmd_generate(args) -> int:
    inst = generate_instance(
        n_airports=args.airports, n_bases=args.bases, n_legs=args.legs,
        n_aircraft=args.aircraft, seed=args.seed,
    )
    text = dumps_instance(inst)
    if args.output:
        with open(args.output, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return 0


def _cmd_route(args) -> int:
    inst = _load(args.instance)
    if args.minimize:
        res = minimize_aircraft(inst, node_limit=args.limit_nodes)
    else:
        budget = args.budget if args.budget is not None else -1
        res = solve_routing(inst, forced=args.force, budget=budget,
                            node_limit=args.limit_nodes)
    _emit(res.as_dict(), args.output)
    return _EXIT_BY_STATUS[res.status]


def _cmd_pair(args) -> int:
    inst = _load(args.instance)
    res = solve_crew_pairing(
        inst, kappa=args.kappa, path_limit=args.limit_paths,
        node_limit=args.limit_nodes, jobs=args.jobs,
    )
    _emit(res.as_dict(include_timing=args.stats), args.output)
    return _EXIT_BY_STATUS[res.status]


def _cmd_integrated(args) -> int:
    inst = _load(args.instance)
    res = solve_integrated(
        inst, gamma=args.gamma, iteration_limit=args.iteration_limit,
        kappa=args.kappa, path_limit=args.limit_paths,
        node_limit=args.limit_nodes, jobs=args.jobs,
    )
    _emit(res.as_dict(include_timing=args.stats), args.output)
    return _EXIT_BY_STATUS[res.status]


def _cmd_oracle(args) -> int:
    inst = _load(args.instance)
    conns = build_connections(inst)
    if args.problem == "pairing":
        status, objective, chosen = oracles.crew_pairing_brute_force(inst, conns)
        _emit({
            "problem": "pairing", "status": status,
            "objective": objective if status == "optimal" else None,
            "pairings": [list(p.legs) for p in chosen or []],
        }, args.output)
        return _EXIT_BY_STATUS[status]
    if args.problem == "routing":
        res = oracles.routing_brute_force(inst)
        status = "optimal" if res.feasible else "infeasible"
        _emit({
            "problem": "routing", "status": status,
            "min_aircraft": res.min_aircraft,
            "routes": [list(r) for r in res.routes or []],
        }, args.output)
        return _EXIT_BY_STATUS[status]
    status, objective = oracles.integrated_brute_force(inst, conns)
    _emit({
        "problem": "integrated", "status": status,
        "objective": objective if status == "optimal" else None,
    }, args.output)
    return _EXIT_BY_STATUS[status]


def _cmd_report(args) -> int:
    inst = _load(args.instance)
    conns = build_connections(inst)
    kinds = {kind.value: 0 for kind in ConnectionKind}
    for c in conns:
        kinds[c.kind.value] += 1
    _emit({
        "name": inst.name,
        "airports": len(inst.airports),
        "bases": sorted(a.code for a in inst.bases),
        "legs": len(inst.legs),
        "fleet": inst.rules.n_a,
        "maintenance_interval_days": inst.rules.T,
        "connections": kinds,
        "total_flying_minutes": sum(l.flying_minutes for l in inst.legs),
    }, args.output)
    return 0


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    handlers = {
        "generate": _cmd_generate,
        "route": _cmd_route,
        "pair": _cmd_pair,
        "integrated": _cmd_integrated,
        "oracle": _cmd_oracle,
        "report": _cmd_report,
    }
    try:
        return handlers[args.command](args)
    except oracles.OracleLimitError as exc:
        print(f"crewroute: error: {exc}", file=sys.stderr)
        return 3
    except (OSError, ValueError) as exc:
        # ValueError covers InstanceError, JSON decode errors and bad
        # solver arguments such as forcing a connection that is not there
        print(f"crewroute: error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
