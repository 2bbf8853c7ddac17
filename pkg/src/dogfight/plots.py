"""SVG figures: grouped outcome bars and annotated ground tracks.

Figures are built on ``matplotlib.figure.Figure`` directly so no GUI backend
is touched, and saved with a fixed hash salt and no date stamp so the bytes
depend only on the data.
"""
from __future__ import annotations

import math
from typing import Sequence

import matplotlib
import numpy as np
from matplotlib.figure import Figure
from matplotlib.patches import Wedge

from dogfight.airframe import maneuver_path
from dogfight.arena import MCSummary, TrialRecord
from dogfight.engagement import EngagementParams, GameModel, Outcome

BLUE, RED, GREY = "tab:blue", "tab:red", "tab:gray"
_SVG_RC = {"svg.hashsalt": "dogfight", "svg.fonttype": "path"}


def _save(fig: Figure, path) -> None:
    with matplotlib.rc_context(_SVG_RC):
        fig.savefig(path, format="svg", metadata={"Date": None, "Creator": None})


def bar_chart(groups: Sequence[tuple[str, MCSummary]], path) -> None:
    """One group of win1/win2/draw bars per (label, summary)."""
    fig = Figure(figsize=(1.6 + 1.4 * len(groups), 3.6))
    ax = fig.add_subplot()
    idx = np.arange(len(groups))
    width = 0.26
    series = [("Aircraft 1 wins", BLUE, "p_w1"), ("Aircraft 2 wins", RED, "p_w2"), ("Draw", GREY, "p_d")]
    for j, (label, color, attr) in enumerate(series):
        heights = [getattr(s, attr) for _, s in groups]
        ax.bar(idx + (j - 1) * width, heights, width, label=label, color=color)
    ax.set_xticks(idx, [f"Case {name}" if name in ("I", "II", "III", "IV") else name for name, _ in groups])
    ax.set_ylim(0, 1)
    ax.set_ylabel("Probability")
    ax.legend(fontsize="small", frameon=False)
    fig.tight_layout()
    _save(fig, path)


def representative_trials(records: Sequence[TrialRecord]) -> list[TrialRecord]:
    """First trial of each outcome, in outcome order."""
    picked = {}
    for rec in records:
        picked.setdefault(rec.outcome, rec)
    return [picked[o] for o in (Outcome.WIN1, Outcome.WIN2, Outcome.DRAW) if o in picked]


def _win_cone(ax, aircraft, eng: EngagementParams, color) -> None:
    heading = math.degrees(aircraft.theta)
    half = math.degrees(eng.bearing_max)
    ax.add_patch(Wedge((aircraft.x, aircraft.y), eng.d_max, heading - half, heading + half,
                       width=eng.d_max - eng.d_min, color=color, alpha=0.15, lw=0))


def _flown_path(rec: TrialRecord, player: int, model: GameModel) -> np.ndarray:
    """Integration sub-steps between decisions, cut where a capture stopped the game."""
    params = model.p1 if player == 1 else model.p2
    pts = [rec.states[0].aircraft(player)]
    for joint, nxt in zip(rec.moves, rec.states[1:]):
        target = nxt.aircraft(player)
        for sub in maneuver_path(pts[-1], joint[player - 1], params):
            pts.append(sub)
            if sub == target:
                break
        pts[-1] = target
    return np.array([(a.x, a.y) for a in pts])


def track_plot(rec: TrialRecord, path, eng: EngagementParams = EngagementParams(),
               model: GameModel | None = None) -> None:
    """Both ground tracks with a time label every maneuver and start/end markers.

    With ``model`` the flown path between decisions is drawn; otherwise the
    decision points are joined by straight segments.
    """
    if not rec.states:
        raise ValueError("cannot plot an empty trajectory")
    fig = Figure(figsize=(6, 6))
    ax = fig.add_subplot()
    times = rec.times
    for player, color in ((1, BLUE), (2, RED)):
        pts = np.array([(s.aircraft(player).x, s.aircraft(player).y) for s in rec.states])
        line = _flown_path(rec, player, model) if model is not None else pts
        ax.plot(line[:, 0], line[:, 1], "-", color=color, lw=1.2, label=f"Aircraft {player}")
        ax.plot(pts[:, 0], pts[:, 1], ".", color=color, ms=3)
        ax.plot(*pts[0], "o", color=color, ms=6)
        ax.plot(*pts[-1], "s", color=color, ms=6)
        for t, (x, y) in zip(times, pts):
            ax.annotate(f"{t:g}", (x, y), fontsize=6, color=color, xytext=(2, 2), textcoords="offset points")
    final = rec.states[-1]
    if rec.outcome is Outcome.WIN1:
        _win_cone(ax, final.ac1, eng, BLUE)
    elif rec.outcome is Outcome.WIN2:
        _win_cone(ax, final.ac2, eng, RED)
    ax.set_aspect("equal", adjustable="datalim")
    ax.set_xlabel("x [m]")
    ax.set_ylabel("y [m]")
    ax.set_title(f"Trial {rec.trial}: {rec.outcome.value}")
    ax.legend(fontsize="small", frameon=False)
    fig.tight_layout()
    _save(fig, path)
