"""One-step zero-sum matrix games and their max-min mixed strategies.

The LP is solved with a small dense tableau simplex (Bland's rule), which is
fast enough for the 3x3 games evaluated inside every playout step.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from dogfight.airframe import MANEUVERS, AircraftParams, Maneuver, maneuver_path, step_maneuver
from dogfight.engagement import EngagementParams, GameModel, GameState, evaluate, first_capture

_EPS = 1e-12


@dataclass(frozen=True)
class PayoffMatrix:
    """Payoffs to the perspective player; rows are its actions, columns the opponent's."""

    entries: np.ndarray
    row_actions: tuple = MANEUVERS
    col_actions: tuple = MANEUVERS

    def __post_init__(self):
        entries = np.array(self.entries, dtype=float)
        if entries.ndim != 2 or entries.shape[0] < 1 or entries.shape[1] < 1:
            raise ValueError(f"payoff matrix must be a non-empty 2D array, got shape {entries.shape}")
        if not np.all(np.isfinite(entries)):
            raise ValueError("payoff matrix has non-finite entries")
        if entries.shape != (len(self.row_actions), len(self.col_actions)):
            raise ValueError("action lists do not match the matrix shape")
        entries.setflags(write=False)
        object.__setattr__(self, "entries", entries)


@dataclass(frozen=True)
class MixedStrategy:
    probs: tuple[float, ...]
    value: float
    actions: tuple = field(default=MANEUVERS, compare=False)

    def guarantee(self, entries) -> float:
        """Worst-case expected payoff over the opponent's pure strategies."""
        return float(np.min(np.asarray(self.probs) @ np.asarray(entries, dtype=float)))


def _simplex_maxmin(rows: list[list[float]]) -> tuple[list[float], float]:
    """Max-min strategy of the row player for a finite payoff table.

    Shifts the payoffs to be >= 1 and solves ``max sum(u) s.t. A u <= 1, u >= 0``
    (the column player's normalized LP). The row player's strategy is read off
    the optimal dual prices of the slack rows.
    """
    m = len(rows)
    n = len(rows[0])
    lo = min(min(r) for r in rows)
    hi = max(max(r) for r in rows)
    if hi - lo <= _EPS * max(1.0, abs(hi)):
        return [1.0 / m] * m, hi
    shift = 1.0 - lo
    width = n + m + 1
    tab = []
    for i, r in enumerate(rows):
        row = [a + shift for a in r] + [0.0] * m + [1.0]
        row[n + i] = 1.0
        tab.append(row)
    obj = [1.0] * n + [0.0] * (m + 1)
    basis = [n + i for i in range(m)]

    while True:
        enter = -1
        for j in range(n + m):
            if obj[j] > _EPS:
                enter = j
                break
        if enter < 0:
            break
        leave = -1
        best = math.inf
        for i in range(m):
            a = tab[i][enter]
            if a > _EPS:
                ratio = tab[i][-1] / a
                if ratio < best - _EPS or (ratio <= best + _EPS and leave >= 0 and basis[i] < basis[leave]):
                    best = ratio
                    leave = i
        # A > 0 keeps the LP bounded, so a leaving row always exists.
        prow = tab[leave]
        piv = prow[enter]
        prow = [a / piv for a in prow]
        tab[leave] = prow
        for i in range(m):
            if i != leave:
                f = tab[i][enter]
                if f != 0.0:
                    ti = tab[i]
                    tab[i] = [ti[c] - f * prow[c] for c in range(width)]
        f = obj[enter]
        obj = [obj[c] - f * prow[c] for c in range(width)]
        basis[leave] = enter

    y = [max(-obj[n + i], 0.0) for i in range(m)]
    total = sum(y)
    probs = [yi / total for yi in y] if total > 0 else [1.0 / m] * m
    value = min(sum(probs[i] * rows[i][k] for i in range(m)) for k in range(n))
    return probs, value


def solve_maxmin(m) -> MixedStrategy:
    """Row player's max-min mixed strategy and the value it guarantees."""
    if not isinstance(m, PayoffMatrix):
        arr = np.asarray(m, dtype=float)
        acts = tuple(range(arr.shape[0])) if arr.ndim == 2 else ()
        cols = tuple(range(arr.shape[1])) if arr.ndim == 2 else ()
        m = PayoffMatrix(arr, acts, cols)
    probs, value = _simplex_maxmin(m.entries.tolist())
    return MixedStrategy(tuple(probs), value, m.row_actions)


def _sample(probs: Sequence[float], u: float) -> int:
    acc = 0.0
    last = 0
    for j, p in enumerate(probs):
        if p > 0.0:
            acc += p
            last = j
            if u < acc:
                return j
    return last


def sample_strategy(s: MixedStrategy, rng: np.random.Generator) -> int:
    """Draw an action index from ``s`` using exactly one uniform variate."""
    return _sample(s.probs, rng.random())


def successor_grid(state: GameState, model: GameModel) -> list[list[GameState]]:
    """Successor of every joint maneuver, indexed ``[m1][m2]``.

    Each aircraft has only three distinct maneuver paths, so the nine joint
    successors are assembled from six integrations.
    """
    k = state.k + 1
    if model.capture == "substep":
        paths1 = [maneuver_path(state.ac1, m, model.p1) for m in MANEUVERS]
        paths2 = [maneuver_path(state.ac2, m, model.p2) for m in MANEUVERS]
        return [[first_capture(a, b, k, model.eng) for b in paths2] for a in paths1]
    s1 = [step_maneuver(state.ac1, m, model.p1) for m in MANEUVERS]
    s2 = [step_maneuver(state.ac2, m, model.p2) for m in MANEUVERS]
    return [[GameState(a, b, k) for b in s2] for a in s1]


def payoff_tables(state: GameState, model: GameModel):
    """Both players' one-step payoff tables as nested lists (rows = own maneuvers)."""
    grid = successor_grid(state, model)
    eng = model.eng
    t1 = [[0.0] * 3 for _ in range(3)]
    t2 = [[0.0] * 3 for _ in range(3)]
    for j in range(3):
        for l in range(3):
            _, r1, r2 = evaluate(grid[j][l], eng)
            t1[j][l] = r1
            t2[l][j] = r2
    return t1, t2


def build_payoff(state: GameState, player: int, eng: EngagementParams,
                 p1: AircraftParams, p2: AircraftParams, capture: str = "substep") -> PayoffMatrix:
    """Shaped-reward payoff of ``player`` at each joint successor of ``state``."""
    t1, t2 = payoff_tables(state, GameModel(eng, p1, p2, capture))
    return PayoffMatrix(np.array(t1 if player == 1 else t2))


def mg_tactic(state: GameState, player: int, model: GameModel, rng: np.random.Generator) -> Maneuver:
    """One-step matrix-game maneuver: solve the max-min LP and sample it."""
    table = payoff_tables(state, model)[player - 1]
    probs, _ = _simplex_maxmin(table)
    return MANEUVERS[_sample(probs, rng.random())]
