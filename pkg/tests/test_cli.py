import json
import os
from dataclasses import replace

import pytest
import yaml

from dogfight import plots
from dogfight.arena import preset_case, run_mc_study
from dogfight.cli import (
    CSV_HEADER,
    DEFAULTS,
    EXIT_BAD_CONFIG,
    EXIT_BAD_TRAJECTORY,
    EXIT_UNKNOWN_CASE,
    EXIT_UNWRITABLE,
    build_case,
    main,
    read_trials,
    resolve_config,
    write_trials,
)
from dogfight.smcts import Playout, Thompson


def run(tmp_path, *args, name="out"):
    out = tmp_path / name
    code = main(["run", *args, "--out", str(out)])
    return code, out


@pytest.fixture(scope="module")
def short_records():
    case = replace(preset_case("I"), horizon=12)
    return run_mc_study(case, 6, seed=5)[1]


def test_defaults_match_reference_values():
    cfg = resolve_config()
    assert (cfg["dt"], cfg["n_s"], cfg["t_game"], cfg["t_sim"]) == (0.05, 20, 70, 10)
    assert (cfg["c"], cfg["w"], cfg["gamma"], cfg["trials"], cfg["m_tree"]) == (0.2, 0.5, 0.8, 100, 9)
    case = build_case(cfg)
    assert case.model.p1.zeta_dot == pytest.approx(0.785398, abs=1e-6)
    assert case.model.eng.d_max == 3.0


def test_case_presets_resolve():
    three = build_case(resolve_config(overrides={"case": "III"}))
    assert three.tactic1.name == "SMCTS-M" and three.tactic2.name == "MG"
    assert three.model.p2.zeta_dot == three.model.p1.zeta_dot / 2
    four = build_case(resolve_config(overrides={"case": "IV"}))
    assert four.model.p1.zeta_dot == four.model.p2.zeta_dot / 2


def test_precedence_file_then_flags():
    cfg = resolve_config({"case": "II", "m_tree": 20, "seed": 3}, {"seed": 9, "extra_iterations": 4})
    assert (cfg["m_tree"], cfg["seed"], cfg["extra_iterations"], cfg["tactic1"]) == (20, 9, 4, "smcts")
    assert resolve_config({"case": "II"}, {"case": "I"})["tactic1"] == "mg"


def test_explicit_config_without_case():
    cfg = resolve_config({"tactic1": "smcts", "tactic2": "smcts", "selection": "thompson", "playout": "greedy"})
    case = build_case(cfg)
    assert case.tactic1.config.playout is Playout.GREEDY
    assert isinstance(case.tactic2.config.selection, Thompson)
    assert case.name == "SMCTS-G vs SMCTS-G"


@pytest.mark.parametrize("values", [
    {"nonsense": 1},
    {"m_tree": "nine"},
    {"m_tree": 0},
    {"w": True},
    {"selection": "softmax"},
    {"trials": 7},
    {"capture": "sometimes"},
    {"zeta_max1_deg": 95.0},
])
def test_malformed_values(values, tmp_path):
    path = tmp_path / "bad.yaml"
    path.write_text(yaml.safe_dump(values))
    assert main(["run", "--config", str(path), "--out", str(tmp_path / "o")]) == EXIT_BAD_CONFIG


def test_malformed_yaml(tmp_path):
    for text in ("m_tree: [1, 2\n", "- just\n- a list\n"):
        path = tmp_path / "bad.yaml"
        path.write_text(text)
        assert main(["run", "--config", str(path)]) == EXIT_BAD_CONFIG
    assert main(["run", "--config", str(tmp_path / "missing.yaml")]) == EXIT_BAD_CONFIG


def test_unknown_case(tmp_path, capsys):
    code, _ = run(tmp_path, "--case", "V")
    assert code == EXIT_UNKNOWN_CASE
    assert "unknown case" in capsys.readouterr().err


@pytest.mark.skipif(os.geteuid() == 0, reason="root ignores directory permissions")
def test_unwritable_output_permissions(tmp_path):
    locked = tmp_path / "locked"
    locked.mkdir()
    locked.chmod(0o500)
    assert main(["run", "--case", "I", "--trials", "2", "--out", str(locked / "x")]) == EXIT_UNWRITABLE


def test_unwritable_output_file_in_the_way(tmp_path):
    blocker = tmp_path / "file"
    blocker.write_text("")
    assert main(["run", "--case", "I", "--trials", "2", "--out", str(blocker / "sub")]) == EXIT_UNWRITABLE


def test_exit_codes_distinct():
    assert len({EXIT_UNKNOWN_CASE, EXIT_BAD_CONFIG, EXIT_UNWRITABLE, EXIT_BAD_TRAJECTORY, 0, 2}) == 6


def test_run_writes_artifacts(tmp_path, capsys):
    code, out = run(tmp_path, "--case", "I", "--seed", "42", "--trials", "10")
    assert code == 0
    summary = json.loads((out / "summary.json").read_text())
    assert list(summary) == ["case", "seed", "m_s", "m_w1", "m_w2", "m_d", "p_w1", "p_w2", "p_d", "config_echo"]
    assert summary["m_w1"] + summary["m_w2"] + summary["m_d"] == summary["m_s"] == 10
    assert summary["p_w1"] + summary["p_w2"] + summary["p_d"] == pytest.approx(1.0)
    assert (out / "bars.svg").exists() and list(out.glob("track_*.svg"))
    header = (out / "trials.csv").read_text().splitlines()[0]
    assert header == ",".join(CSV_HEADER)
    assert "win1" in capsys.readouterr().out


def test_echoed_config_reproduces(tmp_path):
    code, out = run(tmp_path, "--case", "I", "--seed", "7", "--trials", "4", "--no-plot")
    assert code == 0 and not list(out.glob("*.svg"))
    echoed = yaml.safe_load((out / "resolved_config.yaml").read_text())
    assert echoed["seed"] == 7 and echoed["trials"] == 4
    code = main(["run", "--config", str(out / "resolved_config.yaml"), "--out", str(tmp_path / "again"), "--no-plot"])
    assert code == 0
    for name in ("summary.json", "trials.csv"):
        assert (out / name).read_bytes() == (tmp_path / "again" / name).read_bytes()


def test_csv_round_trip(tmp_path, short_records):
    path = tmp_path / "t.csv"
    write_trials(short_records, path)
    back = read_trials(path)
    assert [(r.trial, r.states, r.moves, r.outcome, r.times) for r in back] == \
        [(r.trial, r.states, r.moves, r.outcome, r.times) for r in short_records]


def test_csv_round_trip_custom_speeds(tmp_path, short_records):
    rec = short_records[0]
    fast = replace(rec, states=[s._replace(ac1=s.ac1._replace(v=3.25)) for s in rec.states])
    write_trials([fast], tmp_path / "t.csv")
    assert read_trials(tmp_path / "t.csv", v1=3.25)[0].states == fast.states


@pytest.mark.parametrize("mutate, needle", [
    (lambda lines: lines[:1], "empty"),
    (lambda lines: [], "header"),
    (lambda lines: lines[:2] + ["0,1,1.0,x,0,0,0,0,0,0,0,L,S,draw"], "row 3"),
    (lambda lines: lines[:2] + ["0,5,1.0,0,0,0,0,0,0,0,0,L,S,draw"], "row 3"),
    (lambda lines: lines[:2] + ["0,1,1.0,0,0,0,0,0,0,0,0,Q,S,draw"], "row 3"),
    (lambda lines: lines[:2] + ["0,1,1.0,0,0,0,0,0,0,0,0,L,S"], "row 3"),
    (lambda lines: lines[:2] + ["0,1,1.0,0,0,0,0,0,0,0,0,L,S,lost"], "row 3"),
])
def test_schema_violations(tmp_path, short_records, mutate, needle, capsys):
    path = tmp_path / "t.csv"
    write_trials(short_records[:1], path)
    path.write_text("\n".join(mutate(path.read_text().splitlines())) + "\n")
    assert main(["replay", str(path)]) == EXIT_BAD_TRAJECTORY
    assert needle in capsys.readouterr().err


def test_replay_deterministic(tmp_path, short_records):
    path = tmp_path / "t.csv"
    write_trials(short_records, path)
    trial = short_records[1].trial
    assert main(["replay", str(path), "--trial", str(trial), "--out", str(tmp_path / "a.svg")]) == 0
    assert main(["replay", str(path), "--trial", str(trial), "--out", str(tmp_path / "b.svg")]) == 0
    a = (tmp_path / "a.svg").read_bytes()
    assert a == (tmp_path / "b.svg").read_bytes()
    assert b"<dc:date>" not in a
    assert main(["replay", str(path), "--trial", "99"]) == EXIT_BAD_TRAJECTORY


def test_replay_win_has_cone(tmp_path):
    from conftest import ac
    from oracles import forcing_states
    from dogfight.arena import TrialRecord, play_game
    from dogfight.airframe import MANEUVERS, Maneuver
    from dogfight.engagement import GameModel, Outcome
    import numpy as np

    class Fixed:
        name = "fixed"

        def __init__(self, m):
            self.m = m

        def choose(self, *args):
            return self.m

    state, win = forcing_states(1, seed=3)[0]
    rec = play_game(state, Fixed(MANEUVERS[win]), Fixed(Maneuver.STRAIGHT), 5, GameModel(),
                    np.random.default_rng(0), np.random.default_rng(1))
    assert rec.outcome is Outcome.WIN1
    write_trials([rec], tmp_path / "w.csv")
    assert main(["replay", str(tmp_path / "w.csv"), "--out", str(tmp_path / "w.svg")]) == 0
    draw = replace(rec, outcome=Outcome.DRAW)
    plots.track_plot(draw, tmp_path / "d.svg")
    # The win cone is the only translucent patch.
    assert b"opacity: 0.15" in (tmp_path / "w.svg").read_bytes()
    assert b"opacity: 0.15" not in (tmp_path / "d.svg").read_bytes()


def test_bars_command(tmp_path):
    for seed in (1, 2):
        assert run(tmp_path, "--case", "I", "--seed", str(seed), "--trials", "2", "--no-plot",
                   name=f"s{seed}")[0] == 0
    out = tmp_path / "bars.svg"
    assert main(["bars", str(tmp_path / "s1/summary.json"), str(tmp_path / "s2/summary.json"),
                 "--out", str(out)]) == 0
    assert out.read_bytes().startswith(b"<?xml")
    (tmp_path / "junk.json").write_text("{}")
    assert main(["bars", str(tmp_path / "junk.json")]) == EXIT_BAD_CONFIG


def test_empty_record_plot_rejected(tmp_path, short_records):
    with pytest.raises(ValueError):
        plots.track_plot(replace(short_records[0], states=[], moves=[]), tmp_path / "x.svg")


def test_defaults_table_is_flat():
    assert all(not isinstance(v, (dict, list)) for v in DEFAULTS.values())
