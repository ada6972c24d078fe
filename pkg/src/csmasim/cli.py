"""Command-line front end.

    csmasim run scenario.json [--out DIR] [--parallel N]
    csmasim reproduce all|NAME [NAME ...] [--out DIR] [--parallel N]
    csmasim oracle scenario.json | --topology NAME
    csmasim list-scenarios

Exit codes: 0 success, 1 runtime failure, 2 bad usage or config.
"""

import argparse
import json
import os
import sys

from .config import ConfigError, scenario_from_file, scenario_from_dict
from .harness import (BUILTIN_SCENARIOS, SCENARIO_ORDER, builtin_scenario,
                      reproduce, run_scenario, write_csv, write_json)
from .pf_oracle import solve_pf
from .topology import GENERATORS


def _write_outputs(reports, out_dir, stem):
    os.makedirs(out_dir, exist_ok=True)
    csv_path = os.path.join(out_dir, stem + ".csv")
    json_path = os.path.join(out_dir, stem + ".json")
    write_csv(reports, csv_path)
    write_json(reports, json_path)
    return csv_path, json_path


def _print_aggregates(report):
    print(f"scenario {report['scenario']} "
          f"(duration {report['duration_s']} s, seeds {report['seeds']}, "
          f"draws {report['draws']}, drain_gain={report['queue_drain_gain']})")
    for proto, agg in report["aggregates"].items():
        line = (f"  {proto:9s} total={agg['mean_total_kbps']:8.1f} kb/s "
                f"jain={agg['mean_jain']:.3f} sumlog={agg['mean_sum_log']:8.2f} "
                f"min_ratio={agg['mean_min_ratio']:.3f}")
        print(line)


def cmd_run(args):
    try:
        scenario = scenario_from_file(args.config)
    except (OSError, ConfigError) as e:
        print(f"config error: {e}", file=sys.stderr)
        return 2
    reports = [run_scenario(scenario, parallel=args.parallel)]
    for rep in reports:
        _print_aggregates(rep)
    if args.out:
        paths = _write_outputs(reports, args.out, scenario.name)
        print("wrote", *paths)
    return 0


def cmd_reproduce(args):
    names = args.names
    try:
        if names != ["all"]:
            for n in names:
                builtin_scenario(n)   # validate before running anything
    except ValueError as e:
        print(f"error: {e}", file=sys.stderr)
        return 2
    reports = reproduce(names if names != ["all"] else "all",
                        parallel=args.parallel)
    for rep in reports:
        _print_aggregates(rep)
    if args.out:
        stem = "reproduce" if len(reports) > 1 else reports[0]["scenario"]
        paths = _write_outputs(reports, args.out, stem)
        print("wrote", *paths)
    return 0


def cmd_oracle(args):
    if args.topology:
        if args.topology not in GENERATORS:
            print(f"error: unknown topology {args.topology!r}; "
                  f"choose from {sorted(GENERATORS)}", file=sys.stderr)
            return 2
        topo = GENERATORS[args.topology]()
        rts = None
    else:
        try:
            scenario = scenario_from_file(args.config)
        except (OSError, ConfigError) as e:
            print(f"config error: {e}", file=sys.stderr)
            return 2
        topo, rts = scenario.topology, scenario.rts
    sol = solve_pf(topo, rts=rts)
    print(f"topology {topo.name}: {topo.n_links} links, "
          f"{len(sol.sets)} maximal independent sets")
    print(sol.summary())
    return 0


def cmd_list(args):
    for name in SCENARIO_ORDER:
        spec = BUILTIN_SCENARIOS[name]
        scenario = scenario_from_dict(spec)
        print(f"{name:14s} links={scenario.topology.n_links:2d} "
              f"protocols={','.join(scenario.protocols)} "
              f"duration={scenario.duration_s:g}s seeds={len(scenario.seeds)} "
              f"draws={scenario.draws}")
    return 0


def build_parser():
    p = argparse.ArgumentParser(prog="csmasim",
                                description="CSMA conflict-graph simulator")
    sub = p.add_subparsers(dest="command", required=True)

    r = sub.add_parser("run", help="run a JSON scenario file")
    r.add_argument("config")
    r.add_argument("--out", help="directory for CSV/JSON outputs")
    r.add_argument("--parallel", type=int, default=0, metavar="N",
                   help="worker processes (default: in-process)")
    r.set_defaults(func=cmd_run)

    rp = sub.add_parser("reproduce", help="run built-in scenarios")
    rp.add_argument("names", nargs="+", metavar="NAME",
                    help="scenario names, or 'all'")
    rp.add_argument("--out", help="directory for CSV/JSON outputs")
    rp.add_argument("--parallel", type=int, default=0, metavar="N")
    rp.set_defaults(func=cmd_reproduce)

    o = sub.add_parser("oracle", help="print the fairness benchmark")
    g = o.add_mutually_exclusive_group(required=True)
    g.add_argument("config", nargs="?", help="JSON scenario file")
    g.add_argument("--topology", help="built-in topology generator name")
    o.set_defaults(func=cmd_oracle)

    ls = sub.add_parser("list-scenarios", help="list built-in scenarios")
    ls.set_defaults(func=cmd_list)
    return p


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except KeyboardInterrupt:
        return 1
    except Exception as e:   # surface a clean failure instead of a traceback
        print(f"error: {type(e).__name__}: {e}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
