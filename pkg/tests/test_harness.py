"""Run orchestration: row shape, aggregation, outputs, reproducibility."""

import copy

from csmasim.config import scenario_from_dict
from csmasim.harness import (SCENARIO_ORDER, builtin_scenario, plan_runs,
                             run_scenario, write_csv, write_json)

TINY = {"name": "tiny_fc2", "topology": {"generator": "fc", "args": {"n": 2}},
        "protocols": ["odcf", "dcf"], "duration_s": 5.0, "seeds": [1]}


def _tiny():
    return scenario_from_dict(copy.deepcopy(TINY))


def test_plan_covers_draws_protocols_seeds():
    sc = scenario_from_dict({
        "name": "p", "topology": {"generator": "grid", "args": {}},
        "protocols": ["odcf", "dcf"], "seeds": [1, 2], "draws": 3,
        "duration_s": 1.0})
    combos = {(d, p, s) for _, d, p, s in plan_runs(sc)}
    assert len(combos) == 3 * 2 * 2


def test_report_rows_and_aggregates():
    report = run_scenario(_tiny())
    assert report["scenario"] == "tiny_fc2"
    assert len(report["rows"]) == 2
    for row in report["rows"]:
        assert row["protocol"] in ("odcf", "dcf")
        assert row["seed"] == 1 and row["draw"] == 0
        assert row["rts"] is False          # full conflict: no hidden pairs
        assert len(row["goodput_kbps"]) == 2
        assert 0.0 <= row["jain"] <= 1.0
        assert row["total_kbps"] > 1000
    agg = report["aggregates"]
    for proto in ("odcf", "dcf"):
        row = next(r for r in report["rows"] if r["protocol"] == proto)
        assert agg[proto]["runs"] == 1
        assert agg[proto]["mean_total_kbps"] == round(row["total_kbps"], 1)
    assert report["pf"]["shares"] == [0.5, 0.5]


def test_parallel_matches_sequential():
    seq = run_scenario(_tiny(), parallel=0)
    par = run_scenario(_tiny(), parallel=2)
    assert seq["rows"] == par["rows"]


def test_output_files_are_deterministic(tmp_path):
    rep1 = run_scenario(_tiny())
    rep2 = run_scenario(_tiny())
    for tag, rep in (("a", rep1), ("b", rep2)):
        write_csv([rep], tmp_path / f"{tag}.csv")
        write_json([rep], tmp_path / f"{tag}.json")
    assert (tmp_path / "a.csv").read_bytes() == (tmp_path / "b.csv").read_bytes()
    assert (tmp_path / "a.json").read_bytes() == (tmp_path / "b.json").read_bytes()
    header = (tmp_path / "a.csv").read_text().splitlines()[0]
    assert header.startswith("scenario,draw,protocol,seed")


def test_builtin_scenarios_resolve():
    assert len(SCENARIO_ORDER) >= 14
    for name in SCENARIO_ORDER:
        sc = builtin_scenario(name)
        assert sc.name == name
        assert sc.protocols and sc.seeds
    multi = builtin_scenario("grid")
    assert multi.draws == 10
