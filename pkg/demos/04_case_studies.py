"""Cases I-IV side by side at a reduced trial count, with the outcome bar chart.

    python3 demos/04_case_studies.py [trials] [outdir]
"""
import sys
import time
from pathlib import Path

from dogfight import plots
from dogfight.arena import run_mc_study
from dogfight.cli import build_case, resolve_config

trials = int(sys.argv[1]) if len(sys.argv) > 1 else 20
out = Path(sys.argv[2] if len(sys.argv) > 2 else "demo_output")
out.mkdir(parents=True, exist_ok=True)

groups = []
for name in ("I", "II", "III", "IV"):
    cfg = resolve_config(overrides={"case": name, "seed": 42, "trials": trials})
    case = build_case(cfg)
    t0 = time.perf_counter()
    summary, records = run_mc_study(case, trials, cfg["seed"])
    print(f"Case {name:>3}  {case.tactic1.name:>7} vs {case.tactic2.name:<3}"
          f"  win1 {summary.p_w1:.2f}  win2 {summary.p_w2:.2f}  draw {summary.p_d:.2f}"
          f"  ({time.perf_counter() - t0:.0f} s)")
    groups.append((name, summary))
    first = plots.representative_trials(records)[0]
    plots.track_plot(first, out / f"case_{name}_track_{first.trial}.svg", case.model.eng, case.model)

plots.bar_chart(groups, out / "cases.svg")
print("figures written to", out)
