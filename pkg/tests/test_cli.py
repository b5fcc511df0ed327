from __future__ import annotations

from tiercut.cli import EXIT_INFEASIBLE, EXIT_INPUT, EXIT_OK, main


def _path(scenario_paths, name: str) -> str:
    return str(scenario_paths[name])


def test_partition_feasible_exit_zero(scenario_paths, capsys):
    code = main(["partition", _path(scenario_paths, "toy_chain")])
    out = capsys.readouterr().out
    assert code == EXIT_OK
    assert "S -> edge" in out and "B -> cloud" in out
    assert "cost:" in out


def test_partition_hybrid_split_on_monitoring(scenario_paths, capsys):
    code = main(["partition", _path(scenario_paths, "monitoring_location1")])
    out = capsys.readouterr().out
    assert code == EXIT_OK
    assert "VS -> wavelength" in out
    assert "FD -> wavelength" in out
    assert "FE -> availability" in out
    assert "FM -> availability" in out
    assert "AM -> availability" in out
    assert "AM-E -> wavelength" in out


def test_partition_infeasible_exit_three(scenario_paths, capsys):
    code = main(["partition", _path(scenario_paths, "toy_chain"), "--constraint", "0.06"])
    captured = capsys.readouterr()
    assert code == EXIT_INFEASIBLE
    assert "developer notification" in captured.err


def test_partition_missing_file_exit_two(capsys):
    code = main(["partition", "/no/such/scenario.json"])
    assert code == EXIT_INPUT
    assert "error:" in capsys.readouterr().err


def test_invalid_scenario_exit_two(tmp_path, capsys):
    bad = tmp_path / "bad.json"
    bad.write_text('{"surprise": true}')
    code = main(["partition", str(bad)])
    assert code == EXIT_INPUT
    assert "unknown key" in capsys.readouterr().err


def test_simulate_writes_csvs(scenario_paths, tmp_path, capsys):
    code = main([
        "simulate", _path(scenario_paths, "toy_chain"),
        "--duration", "5", "--out", str(tmp_path),
    ])
    out = capsys.readouterr().out
    assert code == EXIT_OK
    for name in ("latency.csv", "links.csv", "events.csv"):
        assert (tmp_path / name).exists()
    assert "pipeline=chain" in out
    lat = (tmp_path / "latency.csv").read_text()
    assert lat.splitlines()[0] == "t_s,unit_id,pipeline,latency_ms,placement_tag"
    assert len(lat.splitlines()) == 4  # three completed units


def test_simulate_golden_csvs_on_toy_fixture(scenario_paths, tmp_path):
    code = main([
        "simulate", _path(scenario_paths, "toy_chain"),
        "--duration", "5", "--seed", "0", "--out", str(tmp_path),
    ])
    assert code == EXIT_OK
    assert (tmp_path / "latency.csv").read_text() == (
        "t_s,unit_id,pipeline,latency_ms,placement_tag\n"
        "0.070000,1,chain,70.000000,S:edge|A:edge|B:cloud\n"
        "1.070000,2,chain,70.000000,S:edge|A:edge|B:cloud\n"
        "2.070000,3,chain,70.000000,S:edge|A:edge|B:cloud\n"
    )
    assert (tmp_path / "links.csv").read_text() == (
        "t_s,link,direction,mbit_transferred\n"
        "0.055000,A->B,up,0.350000\n"
        "1.055000,A->B,up,0.350000\n"
        "2.055000,A->B,up,0.350000\n"
    )
    assert (tmp_path / "events.csv").read_text() == (
        "time_s,app,event_type,detail\n"
        "0.000000,toy-chain,scheduled,placement=A:edge|B:cloud|S:edge;cost=0.105\n"
    )


def test_simulate_metrics_flag_writes_metrics_csv(scenario_paths, tmp_path):
    code = main([
        "simulate", _path(scenario_paths, "toy_chain"),
        "--duration", "3", "--out", str(tmp_path), "--metrics",
    ])
    assert code == EXIT_OK
    lines = (tmp_path / "metrics.csv").read_text().splitlines()
    assert lines[0] == "time_s,metric,key,value"
    assert any("bandwidth_mbps" in line and "edge->cloud:up" in line for line in lines[1:])


def test_simulate_duration_zero_gives_empty_csvs(scenario_paths, tmp_path):
    code = main([
        "simulate", _path(scenario_paths, "toy_chain"),
        "--duration", "0", "--out", str(tmp_path),
    ])
    assert code == EXIT_OK
    for name in ("latency.csv", "links.csv", "events.csv"):
        body = (tmp_path / name).read_text().splitlines()
        assert len(body) == 1  # header only


def test_simulate_seed_range_fans_out(scenario_paths, tmp_path, capsys):
    code = main([
        "simulate", _path(scenario_paths, "toy_chain"),
        "--duration", "3", "--seed-range", "0:2", "--out", str(tmp_path),
    ])
    assert code == EXIT_OK
    assert (tmp_path / "seed-0" / "latency.csv").exists()
    assert (tmp_path / "seed-1" / "latency.csv").exists()


def test_simulate_out_dir_from_environment(scenario_paths, tmp_path, monkeypatch):
    monkeypatch.setenv("TIERCUT_OUT", str(tmp_path / "from-env"))
    code = main(["simulate", _path(scenario_paths, "toy_chain"), "--duration", "2"])
    assert code == EXIT_OK
    assert (tmp_path / "from-env" / "latency.csv").exists()


def test_cost_prints_table_and_csv(scenario_paths, capsys):
    code = main(["cost", _path(scenario_paths, "cost_plans")])
    out = capsys.readouterr().out
    assert code == EXIT_OK
    assert "availability-zone" in out
    assert "9842.70" in out
    assert "plan,price_per_hour" in out


def test_replay_before_and_during_a_drop(scenario_paths, capsys):
    code = main(["replay", _path(scenario_paths, "monitoring_dynamic"), "--at", "100"])
    out = capsys.readouterr().out
    assert code == EXIT_OK
    assert "FE -> availability" in out
    code = main(["replay", _path(scenario_paths, "monitoring_dynamic"), "--at", "14500"])
    out = capsys.readouterr().out
    assert code == EXIT_OK
    assert "FE -> wavelength" in out and "FM -> wavelength" in out


def test_replay_beyond_last_breakpoint_uses_final_value(scenario_paths, capsys):
    code = main(["replay", _path(scenario_paths, "monitoring_dynamic"), "--at", "999999"])
    out = capsys.readouterr().out
    assert code == EXIT_OK
    assert "35.47 Mbit/s" in out


def test_replay_at_zero_matches_partition(scenario_paths, capsys):
    main(["replay", _path(scenario_paths, "toy_chain"), "--at", "0"])
    replay_out = capsys.readouterr().out
    main(["partition", _path(scenario_paths, "toy_chain")])
    partition_out = capsys.readouterr().out
    replay_tail = [l for l in replay_out.splitlines() if " -> " in l or l.startswith("cost")]
    partition_tail = [l for l in partition_out.splitlines() if " -> " in l or l.startswith("cost")]
    assert replay_tail == partition_tail


def test_scenarios_lists_bundled_fixtures(capsys):
    code = main(["scenarios"])
    out = capsys.readouterr().out
    assert code == EXIT_OK
    for name in ("monitoring_location1", "monitoring_dynamic", "forensics_wavelength",
                 "cost_plans", "toy_chain"):
        assert name in out
