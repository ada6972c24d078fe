"""Batch runner: resolved scenarios -> simulation rows, aggregates, files.

One row per (draw, protocol, seed) run. Aggregates average over seeds and
draws per protocol. Output is deterministic for a given scenario: rows are
emitted in plan order, floats are rounded once here, and JSON keys are
sorted, so reruns produce byte-identical files.
"""

import csv
import json
import multiprocessing
from dataclasses import asdict

from .config import Scenario, scenario_from_dict
from .engine import Engine
from .macs import make_macs
from .pf_oracle import (jain_index, ratios_to_optimal, short_term_fairness,
                        solve_pf, sum_log_utility)

# Queue constant per scenario family: the dequeue-rate numerator trades
# aggressiveness against queue headroom, and the sweet spot depends on how
# many links share each collision domain. Values picked by sweeps; the
# acceptance suite records them alongside its thresholds.
BUILTIN_SCENARIOS = {
    "fc3": {
        "name": "fc3",
        "topology": {"generator": "fc", "args": {"n": 3}},
        "protocols": ["dcf", "diffq", "ocsma_cw", "ocsma_mu", "odcf"],
        "duration_s": 100.0, "seeds": {"base": 1, "count": 3},
    },
    "fc6": {
        "name": "fc6",
        "topology": {"generator": "fc", "args": {"n": 6}},
        "protocols": ["dcf", "diffq", "ocsma_cw", "ocsma_mu", "odcf"],
        "duration_s": 100.0, "seeds": {"base": 1, "count": 3},
    },
    "fc9": {
        "name": "fc9",
        "topology": {"generator": "fc", "args": {"n": 9}},
        "protocols": ["dcf", "diffq", "ocsma_cw", "ocsma_mu", "odcf"],
        "duration_s": 100.0, "seeds": {"base": 1, "count": 3},
    },
    "fc12": {
        "name": "fc12",
        "topology": {"generator": "fc", "args": {"n": 12}},
        "protocols": ["dcf", "diffq", "ocsma_cw", "ocsma_mu", "odcf"],
        "duration_s": 100.0, "seeds": {"base": 1, "count": 3},
    },
    "fim2": {
        "name": "fim2",
        "topology": {"generator": "fim", "args": {"n_outer": 2}},
        "protocols": ["odcf", "dcf", "ocsma_mu"],
        "duration_s": 100.0, "seeds": {"base": 1, "count": 3},
        "queue": {"drain_gain": 1200},
    },
    "fim3": {
        "name": "fim3",
        "topology": {"generator": "fim", "args": {"n_outer": 3}},
        "protocols": ["odcf", "ocsma_mu"],
        "duration_s": 100.0, "seeds": {"base": 1, "count": 3},
        "queue": {"drain_gain": 1200},
    },
    "fim4": {
        "name": "fim4",
        "topology": {"generator": "fim", "args": {"n_outer": 4}},
        "protocols": ["odcf", "ocsma_mu"],
        "duration_s": 100.0, "seeds": {"base": 1, "count": 3},
        "queue": {"drain_gain": 1200},
    },
    "ht": {
        "name": "ht",
        "topology": {"generator": "ht"},
        "protocols": ["odcf", "dcf", "ocsma_mu"],
        "duration_s": 60.0, "seeds": {"base": 1, "count": 5},
        "queue": {"drain_gain": 1200},
    },
    "ia": {
        "name": "ia",
        "topology": {"generator": "ia"},
        "protocols": ["odcf", "dcf", "ocsma_mu"],
        "duration_s": 100.0, "seeds": {"base": 1, "count": 5},
    },
    "ht_capture": {
        "name": "ht_capture",
        "topology": {"generator": "ht_capture"},
        "protocols": ["odcf", "dcf"],
        "duration_s": 60.0, "seeds": {"base": 1, "count": 5},
        "queue": {"drain_gain": 600},
    },
    "hetero_static": {
        "name": "hetero_static",
        "topology": {"generator": "fc", "args": {"n": 3}},
        "capacity_mbps": [6.0, 18.0, 48.0],
        "protocols": ["dcf", "diffq", "ocsma_cw", "ocsma_mu", "odcf"],
        "duration_s": 100.0, "seeds": {"base": 1, "count": 3},
    },
    "hetero_mobile": {
        "name": "hetero_mobile",
        "topology": {"generator": "fc", "args": {"n": 3}},
        "capacity_mbps": [6.0, 18.0, 48.0],
        "capacity_trace": {"2": [[33.0, 6.0], [66.0, 48.0]]},
        "protocols": ["odcf", "dcf"],
        "duration_s": 100.0, "seeds": {"base": 1, "count": 3},
    },
    "mixed_a": {
        "name": "mixed_a",
        "topology": {"generator": "mixed_fim_fc"},
        "protocols": ["odcf", "dcf", "ocsma_mu"],
        "duration_s": 100.0, "seeds": {"base": 1, "count": 3},
        "queue": {"drain_gain": 450},
    },
    "mixed_b": {
        "name": "mixed_b",
        "topology": {"generator": "fc_in_fim"},
        "protocols": ["odcf", "dcf", "ocsma_mu"],
        "duration_s": 100.0, "seeds": {"base": 1, "count": 3},
    },
    "grid": {
        "name": "grid",
        "topology": {"generator": "grid", "args": {"seed": 0}},
        "protocols": ["odcf", "dcf", "diffq"],
        "duration_s": 100.0, "seeds": {"base": 1, "count": 1}, "draws": 10,
    },
    "random": {
        "name": "random",
        "topology": {"generator": "random", "args": {"seed": 0}},
        "protocols": ["odcf", "dcf", "diffq"],
        "duration_s": 100.0, "seeds": {"base": 1, "count": 1}, "draws": 10,
    },
}

SCENARIO_ORDER = list(BUILTIN_SCENARIOS)


def builtin_scenario(name):
    try:
        return scenario_from_dict(BUILTIN_SCENARIOS[name])
    except KeyError:
        raise ValueError(f"unknown scenario {name!r}; "
                         f"choose from {SCENARIO_ORDER}") from None


def _run_task(task):
    """Worker: one simulation run plus its metric row. Must stay picklable."""
    scenario, draw, protocol, seed = task
    topo = scenario.redraw_topology(draw)
    macs = make_macs(protocol, topo, scenario.timing, scenario.queue)
    engine = Engine(topo, macs, timing=scenario.timing, seed=seed,
                    duration_s=scenario.duration_s, rts=scenario.rts,
                    capacity_traces=scenario.capacity_trace,
                    collect_events=scenario.collect_events,
                    protocol=protocol)
    result = engine.run()
    pf = solve_pf(topo, scenario.timing, rts=result.rts_used)
    ratios = ratios_to_optimal(result.goodput_bps, pf.discounted_bps)
    total_frames = sum(result.frames)
    row = {
        "scenario": scenario.name,
        "draw": draw,
        "protocol": protocol,
        "seed": seed,
        "rts": result.rts_used,
        "total_kbps": round(sum(result.goodput_bps) / 1e3, 1),
        "jain": round(jain_index(result.goodput_bps), 4),
        "sum_log": round(sum_log_utility(result.goodput_bps), 3),
        "min_ratio": round(min(ratios), 4),
        "max_ratio": round(max(ratios), 4),
        "short_term_fairness": round(short_term_fairness(result), 4),
        "collision_fraction": round(
            sum(result.failed_frames) / total_frames, 4) if total_frames else 0.0,
        "drops": sum(result.drops),
        "goodput_kbps": [round(g / 1e3, 1) for g in result.goodput_bps],
        "ratio_to_pf": [round(r, 4) for r in ratios],
        "airtime_share": [round(s, 4) for s in result.airtime_share()],
        "avg_cw": [round(c, 1) for c in result.avg_cw],
        "max_gap_s": [round(g, 3) for g in result.max_gap_s],
    }
    return row


def plan_runs(scenario):
    return [(scenario, draw, protocol, seed)
            for draw in range(scenario.draws)
            for protocol in scenario.protocols
            for seed in scenario.seeds]


def run_scenario(scenario, parallel=0):
    """All runs of one scenario; returns a report dict."""
    tasks = plan_runs(scenario)
    if parallel and parallel > 1 and len(tasks) > 1:
        with multiprocessing.Pool(parallel) as pool:
            rows = pool.map(_run_task, tasks)
    else:
        rows = [_run_task(t) for t in tasks]

    aggregates = {}
    for protocol in scenario.protocols:
        sub = [r for r in rows if r["protocol"] == protocol]
        agg = {
            "runs": len(sub),
            "mean_total_kbps": round(_mean(r["total_kbps"] for r in sub), 1),
            "mean_jain": round(_mean(r["jain"] for r in sub), 4),
            "mean_sum_log": round(_mean(r["sum_log"] for r in sub), 3),
            "mean_min_ratio": round(_mean(r["min_ratio"] for r in sub), 4),
            "mean_short_term_fairness": round(
                _mean(r["short_term_fairness"] for r in sub), 4),
        }
        if scenario.draws == 1:
            n = scenario.topology.n_links
            for key in ("goodput_kbps", "ratio_to_pf", "airtime_share", "avg_cw"):
                agg["mean_" + key] = [
                    round(_mean(r[key][l] for r in sub), 4) for l in range(n)]
        aggregates[protocol] = agg

    report = {
        "scenario": scenario.name,
        "duration_s": scenario.duration_s,
        "seeds": scenario.seeds,
        "draws": scenario.draws,
        "protocols": list(scenario.protocols),
        "queue_drain_gain": scenario.queue.drain_gain,
        "rows": rows,
        "aggregates": aggregates,
    }
    if scenario.draws == 1:
        pf = solve_pf(scenario.topology, scenario.timing, rts=scenario.rts)
        report["pf"] = {
            "shares": [round(s, 4) for s in pf.shares],
            "discounted_kbps": [round(d / 1e3, 1) for d in pf.discounted_bps],
            "raw_kbps": [round(r0 / 1e3, 1) for r0 in pf.rate_bps],
            "certificate_gap": pf.certificate_gap,
        }
    return report


def _mean(it):
    vals = list(it)
    return sum(vals) / len(vals) if vals else 0.0


def reproduce(names, parallel=0):
    """Run built-in scenarios by name ('all' for the full set)."""
    if names == "all" or names == ["all"]:
        names = SCENARIO_ORDER
    elif isinstance(names, str):
        names = [names]
    return [run_scenario(builtin_scenario(n), parallel=parallel) for n in names]


# -- output files ----------------------------------------------------------

_CSV_SCALARS = ["scenario", "draw", "protocol", "seed", "rts", "total_kbps",
                "jain", "sum_log", "min_ratio", "max_ratio",
                "short_term_fairness", "collision_fraction", "drops"]
_CSV_LISTS = ["goodput_kbps", "ratio_to_pf", "airtime_share", "avg_cw",
              "max_gap_s"]


def write_csv(reports, path):
    """One CSV row per run; per-link lists are |-joined."""
    with open(path, "w", newline="") as f:
        w = csv.writer(f)
        w.writerow(_CSV_SCALARS + _CSV_LISTS)
        for rep in reports:
            for row in rep["rows"]:
                flat = [row[k] for k in _CSV_SCALARS]
                flat += ["|".join(str(x) for x in row[k]) for k in _CSV_LISTS]
                w.writerow(flat)


def write_json(reports, path):
    with open(path, "w") as f:
        json.dump(reports, f, indent=2, sort_keys=True)
        f.write("\n")


def scenario_to_dict(scenario):
    """Round-trippable view of a resolved scenario (for logging)."""
    d = asdict(scenario)
    d["topology"] = {"name": scenario.topology.name,
                     "n_links": scenario.topology.n_links}
    d.pop("topology_spec", None)
    return d
