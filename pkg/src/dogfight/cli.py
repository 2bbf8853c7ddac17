"""Command-line front end: run case studies, write results, replay tracks.

    dogfight run --case III --seed 42 --out results/III
    dogfight replay results/III/trials.csv --trial 0
    dogfight bars results/*/summary.json --out bars.svg

Run settings are resolved in order: built-in defaults, case preset, config
file, command-line flags. The config file is a flat YAML mapping whose keys
are those of ``DEFAULTS``; angles are given in degrees.
"""
from __future__ import annotations

import argparse
import csv
import json
import math
import sys
from pathlib import Path
from typing import Optional, Sequence

import yaml

from dogfight.airframe import AircraftParams, AircraftState, Maneuver
from dogfight.arena import CaseSpec, MCSummary, MGTactic, SMCTSTactic, TrialRecord, run_mc_study
from dogfight.engagement import EngagementParams, GameModel, GameState, JointManeuver, Outcome
from dogfight.smcts import Playout, SearchConfig, Thompson, UCB1

EXIT_UNKNOWN_CASE = 3
EXIT_BAD_CONFIG = 4
EXIT_UNWRITABLE = 5
EXIT_BAD_TRAJECTORY = 6

CASES = ("I", "II", "III", "IV")

DEFAULTS: dict = {
    "case": None,
    "tactic1": "mg",
    "tactic2": "mg",
    "seed": 0,
    "trials": 100,
    "parallel": 1,
    "t_game": 70,
    "half_width": 6.0,
    "capture": "substep",
    # aircraft
    "v1": 2.5, "zeta_dot1_deg": 45.0, "zeta_max1_deg": 23.0,
    "v2": 2.5, "zeta_dot2_deg": 45.0, "zeta_max2_deg": 23.0,
    "dt": 0.05,
    "n_s": 20,
    "g": 9.81,
    # engagement and reward
    "d_min": 0.1, "d_max": 3.0, "d_nom": 2.0, "r_d": 18.0,
    "bearing_max_deg": 30.0, "aspect_max_deg": 60.0,
    "w": 0.5, "gamma": 0.8,
    # search
    "m_tree": 9,
    "t_sim": 10,
    "selection": "ucb1",
    "c": 0.2, "c1": 1.0, "c2": 1.0,
    "playout": "matrix_game",
    "epsilon": 0.1,
    "extra_iterations": 30,
    "shuffle_expansion": False,
    "terminal_return": "absorbing",
}

PRESETS = {
    "I": {"tactic1": "mg", "tactic2": "mg"},
    "II": {"tactic1": "smcts", "tactic2": "mg"},
    "III": {"tactic1": "smcts", "tactic2": "mg", "zeta_dot2_deg": 22.5},
    "IV": {"tactic1": "smcts", "tactic2": "mg", "zeta_dot1_deg": 22.5},
}

CSV_HEADER = ["trial", "step", "time_s", "x1", "y1", "theta1", "zeta1",
              "x2", "y2", "theta2", "zeta2", "m1", "m2", "outcome"]

OUTCOME_LABELS = {Outcome.WIN1: "win1", Outcome.WIN2: "win2", Outcome.DRAW: "draw"}


class CLIError(Exception):
    def __init__(self, message: str, code: int):
        super().__init__(message)
        self.code = code


# configuration


def load_config_file(path) -> dict:
    try:
        with open(path) as fh:
            data = yaml.safe_load(fh)
    except OSError as exc:
        raise CLIError(f"cannot read config {path}: {exc.strerror}", EXIT_BAD_CONFIG) from exc
    except yaml.YAMLError as exc:
        raise CLIError(f"config {path} is not valid YAML: {exc}", EXIT_BAD_CONFIG) from exc
    if data is None:
        return {}
    if not isinstance(data, dict):
        raise CLIError(f"config {path} must be a flat key: value mapping", EXIT_BAD_CONFIG)
    return data


def _coerce(key: str, value):
    default = DEFAULTS[key]
    if key == "case":
        return None if value is None else str(value)
    if isinstance(default, bool):
        if not isinstance(value, bool):
            raise CLIError(f"{key} must be true or false, got {value!r}", EXIT_BAD_CONFIG)
        return value
    if isinstance(default, int):
        if isinstance(value, bool) or not isinstance(value, int):
            raise CLIError(f"{key} must be an integer, got {value!r}", EXIT_BAD_CONFIG)
        return value
    if isinstance(default, float):
        if isinstance(value, bool) or not isinstance(value, (int, float)):
            raise CLIError(f"{key} must be a number, got {value!r}", EXIT_BAD_CONFIG)
        return float(value)
    if not isinstance(value, str):
        raise CLIError(f"{key} must be a string, got {value!r}", EXIT_BAD_CONFIG)
    return value


def resolve_config(file_values: Optional[dict] = None, overrides: Optional[dict] = None) -> dict:
    """Merge defaults, case preset, file values and overrides into one flat dict."""
    file_values = dict(file_values or {})
    overrides = {k: v for k, v in (overrides or {}).items() if v is not None}
    unknown = sorted(set(file_values) - set(DEFAULTS))
    if unknown:
        raise CLIError(f"unknown config keys: {', '.join(unknown)}", EXIT_BAD_CONFIG)
    case = overrides.get("case", file_values.get("case"))
    if case is not None:
        case = str(case)
        if case not in PRESETS:
            raise CLIError(f"unknown case {case!r}; expected one of {', '.join(CASES)}", EXIT_UNKNOWN_CASE)
    resolved = dict(DEFAULTS)
    if case is not None:
        resolved.update(PRESETS[case])
    for source in (file_values, overrides):
        for key, value in source.items():
            resolved[key] = _coerce(key, value)
    resolved["case"] = case
    build_case(resolved)  # validate everything up front
    return resolved


def build_case(cfg: dict) -> CaseSpec:
    """Turn a resolved flat config into a runnable case."""
    try:
        aircraft = [
            AircraftParams(v=cfg[f"v{i}"], zeta_dot=math.radians(cfg[f"zeta_dot{i}_deg"]),
                           zeta_max=math.radians(cfg[f"zeta_max{i}_deg"]), dt=cfg["dt"],
                           n_s=cfg["n_s"], g=cfg["g"])
            for i in (1, 2)
        ]
        eng = EngagementParams(d_min=cfg["d_min"], d_max=cfg["d_max"], d_nom=cfg["d_nom"], r_d=cfg["r_d"],
                               bearing_max=math.radians(cfg["bearing_max_deg"]),
                               aspect_max=math.radians(cfg["aspect_max_deg"]), w=cfg["w"], gamma=cfg["gamma"])
        model = GameModel(eng, aircraft[0], aircraft[1], capture=cfg["capture"])
        if cfg["selection"] == "ucb1":
            selection = UCB1(cfg["c"])
        elif cfg["selection"] == "thompson":
            selection = Thompson(cfg["c1"], cfg["c2"])
        else:
            raise ValueError(f"selection must be 'ucb1' or 'thompson', got {cfg['selection']!r}")
        search = SearchConfig(m_tree=cfg["m_tree"], t_sim=cfg["t_sim"], selection=selection,
                              playout=Playout(cfg["playout"]), epsilon=cfg["epsilon"],
                              extra_iterations=cfg["extra_iterations"],
                              shuffle_expansion=cfg["shuffle_expansion"],
                              terminal_return=cfg["terminal_return"])
        tactics = []
        for key in ("tactic1", "tactic2"):
            if cfg[key] == "mg":
                tactics.append(MGTactic())
            elif cfg[key] == "smcts":
                tactics.append(SMCTSTactic(search))
            else:
                raise ValueError(f"{key} must be 'mg' or 'smcts', got {cfg[key]!r}")
        if cfg["t_game"] < 0 or cfg["half_width"] <= 0:
            raise ValueError("t_game must be >= 0 and half_width > 0")
        if cfg["trials"] < 2 or cfg["trials"] % 2:
            raise ValueError(f"trials must be a positive even number, got {cfg['trials']}")
        if cfg["parallel"] < 1 or cfg["seed"] < 0:
            raise ValueError("parallel must be >= 1 and seed >= 0")
    except ValueError as exc:
        raise CLIError(f"invalid configuration: {exc}", EXIT_BAD_CONFIG) from exc
    name = cfg["case"] or f"{tactics[0].name} vs {tactics[1].name}"
    return CaseSpec(name, tactics[0], tactics[1], model, cfg["t_game"], cfg["half_width"])


# results


def summary_dict(cfg: dict, summary: MCSummary) -> dict:
    return {
        "case": cfg["case"],
        "seed": cfg["seed"],
        "m_s": summary.m_s,
        "m_w1": summary.m_w1,
        "m_w2": summary.m_w2,
        "m_d": summary.m_d,
        "p_w1": summary.p_w1,
        "p_w2": summary.p_w2,
        "p_d": summary.p_d,
        # Parallelism never changes results, so it stays out of the echo.
        "config_echo": {k: v for k, v in cfg.items() if k != "parallel"},
    }


def write_trials(records: Sequence[TrialRecord], path) -> None:
    """One row per decision step; the last row of a trial has empty moves."""
    with open(path, "w", newline="") as fh:
        out = csv.writer(fh, lineterminator="\n")
        out.writerow(CSV_HEADER)
        for rec in records:
            label = OUTCOME_LABELS[rec.outcome]
            for step, (state, t) in enumerate(zip(rec.states, rec.times)):
                move = rec.moves[step] if step < len(rec.moves) else None
                a, b = state.ac1, state.ac2
                out.writerow([rec.trial, step, repr(t),
                              repr(a.x), repr(a.y), repr(a.theta), repr(a.zeta),
                              repr(b.x), repr(b.y), repr(b.theta), repr(b.zeta),
                              move.m1.letter if move else "", move.m2.letter if move else "", label])


def read_trials(path, v1: float = 2.5, v2: float = 2.5, maneuver_duration: float = 1.0) -> list[TrialRecord]:
    """Parse a trajectory CSV back into records.

    Speeds are not part of the file and must be supplied.
    """
    labels = {v: k for k, v in OUTCOME_LABELS.items()}
    rows: dict[int, list] = {}
    try:
        with open(path, newline="") as fh:
            reader = csv.reader(fh)
            header = next(reader, None)
            if header != CSV_HEADER:
                raise ValueError(f"row 1: expected header {','.join(CSV_HEADER)}")
            for lineno, row in enumerate(reader, start=2):
                try:
                    if len(row) != len(CSV_HEADER):
                        raise ValueError(f"expected {len(CSV_HEADER)} fields, got {len(row)}")
                    trial, step = int(row[0]), int(row[1])
                    nums = [float(x) for x in row[3:11]]
                    moves = (Maneuver.from_letter(row[11]), Maneuver.from_letter(row[12])) if row[11] or row[12] else None
                    outcome = labels[row[13]]
                except (ValueError, KeyError) as exc:
                    raise ValueError(f"row {lineno}: {exc}") from exc
                steps = rows.setdefault(trial, [])
                if step != len(steps):
                    raise ValueError(f"row {lineno}: trial {trial} step {step} out of sequence")
                steps.append((nums, moves, outcome, lineno))
    except OSError as exc:
        raise CLIError(f"cannot read {path}: {exc.strerror}", EXIT_BAD_TRAJECTORY) from exc
    except ValueError as exc:
        raise CLIError(f"{path}: {exc}", EXIT_BAD_TRAJECTORY) from exc
    if not rows:
        raise CLIError(f"{path}: trajectory is empty", EXIT_BAD_TRAJECTORY)

    records = []
    for trial, steps in rows.items():
        states, moves = [], []
        for k, (nums, move, _, lineno) in enumerate(steps):
            x1, y1, th1, z1, x2, y2, th2, z2 = nums
            states.append(GameState(AircraftState(x1, y1, v1, th1, z1), AircraftState(x2, y2, v2, th2, z2), k))
            last = k == len(steps) - 1
            if (move is None) != last:
                raise CLIError(f"{path}: row {lineno}: moves must be present on every row but the last",
                               EXIT_BAD_TRAJECTORY)
            if move:
                moves.append(JointManeuver(*move))
        outcomes = {s[2] for s in steps}
        if len(outcomes) != 1:
            raise CLIError(f"{path}: trial {trial} has inconsistent outcomes", EXIT_BAD_TRAJECTORY)
        records.append(TrialRecord(trial, states, moves, outcomes.pop(), maneuver_duration))
    return records


def _ensure_writable(out: Path) -> None:
    try:
        out.mkdir(parents=True, exist_ok=True)
        probe = out / ".write_probe"
        probe.write_text("")
        probe.unlink()
    except OSError as exc:
        raise CLIError(f"output directory {out} is not writable: {exc.strerror}", EXIT_UNWRITABLE) from exc


def _print_summary(name: str, summary: MCSummary) -> None:
    print(f"{'case':<10}{'trials':>8}{'win1':>8}{'win2':>8}{'draw':>8}")
    print(f"{name:<10}{summary.m_s:>8}{summary.p_w1:>8.2f}{summary.p_w2:>8.2f}{summary.p_d:>8.2f}")


def run_case(cfg: dict, out: Path, plot: bool = True) -> MCSummary:
    case = build_case(cfg)
    _ensure_writable(out)
    summary, records = run_mc_study(case, cfg["trials"], cfg["seed"], cfg["parallel"])
    (out / "summary.json").write_text(json.dumps(summary_dict(cfg, summary), indent=2) + "\n")
    (out / "resolved_config.yaml").write_text(yaml.safe_dump(cfg, sort_keys=False))
    write_trials(records, out / "trials.csv")
    if plot:
        from dogfight import plots

        plots.bar_chart([(case.name, summary)], out / "bars.svg")
        for rec in plots.representative_trials(records):
            plots.track_plot(rec, out / f"track_{rec.trial}.svg", case.model.eng, case.model)
    _print_summary(case.name, summary)
    return summary


# entry point


def _parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="dogfight", description="Simulated 1-v-1 air combat studies.")
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="run a Monte Carlo study")
    run.add_argument("--case", help="preset case: I, II, III or IV")
    run.add_argument("--config", type=Path, help="flat YAML config file")
    run.add_argument("--seed", type=int)
    run.add_argument("--trials", type=int)
    run.add_argument("--out", type=Path, help="output directory (default results/<case>-<seed>)")
    run.add_argument("--parallel", type=int)
    run.add_argument("--plot", action=argparse.BooleanOptionalAction, default=True)
    run.add_argument("--extra-iterations", type=int, dest="extra_iterations")

    replay = sub.add_parser("replay", help="draw a track plot from a trajectory CSV")
    replay.add_argument("csv", type=Path)
    replay.add_argument("--trial", type=int, help="trial to draw (default: first in file)")
    replay.add_argument("--out", type=Path, help="SVG path (default track_<trial>.svg next to the CSV)")
    replay.add_argument("--config", type=Path, help="config used for the run, for speeds and win cones")

    bars = sub.add_parser("bars", help="grouped outcome bars for several summary.json files")
    bars.add_argument("summaries", type=Path, nargs="+")
    bars.add_argument("--out", type=Path, default=Path("bars.svg"))
    return parser


def _cmd_run(args) -> int:
    file_values = load_config_file(args.config) if args.config else {}
    cfg = resolve_config(file_values, {"case": args.case, "seed": args.seed, "trials": args.trials,
                                       "parallel": args.parallel, "extra_iterations": args.extra_iterations})
    out = args.out or Path("results") / f"{cfg['case'] or 'custom'}-{cfg['seed']}"
    run_case(cfg, out, plot=args.plot)
    return 0


def _cmd_replay(args) -> int:
    from dogfight import plots

    cfg = resolve_config(load_config_file(args.config)) if args.config else dict(DEFAULTS)
    case = build_case(cfg)
    records = read_trials(args.csv, cfg["v1"], cfg["v2"], case.model.p1.maneuver_duration)
    if args.trial is None:
        rec = records[0]
    else:
        matches = [r for r in records if r.trial == args.trial]
        if not matches:
            raise CLIError(f"trial {args.trial} not found in {args.csv}", EXIT_BAD_TRAJECTORY)
        rec = matches[0]
    out = args.out or args.csv.parent / f"track_{rec.trial}.svg"
    _ensure_writable(out.parent)
    plots.track_plot(rec, out, case.model.eng, case.model)
    print(out)
    return 0


def _cmd_bars(args) -> int:
    from dogfight import plots

    groups = []
    for path in args.summaries:
        try:
            data = json.loads(path.read_text())
            summary = MCSummary(data["m_s"], data["m_w1"], data["m_w2"], data["m_d"])
        except (OSError, ValueError, KeyError, TypeError) as exc:
            raise CLIError(f"{path}: not a summary file ({exc})", EXIT_BAD_CONFIG) from exc
        groups.append((data.get("case") or path.parent.name, summary))
    _ensure_writable(args.out.parent)
    plots.bar_chart(groups, args.out)
    return 0


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = _parser().parse_args(argv)
    handler = {"run": _cmd_run, "replay": _cmd_replay, "bars": _cmd_bars}[args.command]
    try:
        return handler(args)
    except CLIError as exc:
        print(f"dogfight: error: {exc}", file=sys.stderr)
        return exc.code


if __name__ == "__main__":
    sys.exit(main())
