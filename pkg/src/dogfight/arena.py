"""Full games between two tactics and Monte Carlo win-rate studies."""
from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from functools import lru_cache
from typing import Optional, Protocol

import numpy as np

from dogfight.airframe import AircraftParams, Maneuver
from dogfight.engagement import EngagementParams, GameModel, GameState, JointManeuver, Outcome, check_terminal
from dogfight.matrix_game import mg_tactic
from dogfight.smcts import SMCTS, Playout, SearchConfig


class Tactic(Protocol):
    name: str

    def choose(self, state: GameState, player: int, model: GameModel, rng: np.random.Generator) -> Maneuver:
        ...


@lru_cache(maxsize=16)
def _fast_model(model: GameModel):
    try:
        from dogfight.fast import FastModel
    except ImportError:
        return None
    return FastModel(model)


@dataclass(frozen=True)
class MGTactic:
    """Sample the max-min strategy of the one-step payoff matrix; no tree search."""

    name: str = "MG"
    backend: str = "auto"

    def choose(self, state, player, model, rng):
        fast = _fast_model(model) if self.backend != "python" else None
        if fast is None:
            return mg_tactic(state, player, model, rng)
        return fast.mg_move(state, player, rng.random())


@dataclass(frozen=True)
class SMCTSTactic:
    config: SearchConfig = field(default_factory=SearchConfig)

    @property
    def name(self) -> str:
        suffix = {Playout.MATRIX_GAME: "M", Playout.GREEDY: "G",
                  Playout.RANDOM: "R", Playout.EPSILON_GREEDY: "E"}[self.config.playout]
        return f"SMCTS-{suffix}"

    def choose(self, state, player, model, rng):
        return SMCTS(self.config, model, rng).search(state, player)


@dataclass
class TrialRecord:
    trial: int
    states: list[GameState]
    moves: list[JointManeuver]
    outcome: Outcome
    maneuver_duration: float = 1.0

    @property
    def initial(self) -> GameState:
        return self.states[0]

    @property
    def steps(self) -> int:
        return len(self.moves)

    @property
    def times(self) -> list[float]:
        return [k * self.maneuver_duration for k in range(len(self.states))]


@dataclass(frozen=True)
class MCSummary:
    m_s: int
    m_w1: int
    m_w2: int
    m_d: int

    def __post_init__(self):
        if self.m_w1 + self.m_w2 + self.m_d != self.m_s:
            raise ValueError("outcome counts do not partition the trials")

    @classmethod
    def from_outcomes(cls, outcomes) -> "MCSummary":
        outcomes = list(outcomes)
        w1 = sum(o is Outcome.WIN1 for o in outcomes)
        w2 = sum(o is Outcome.WIN2 for o in outcomes)
        return cls(len(outcomes), w1, w2, len(outcomes) - w1 - w2)

    @property
    def p_w1(self) -> float:
        return self.m_w1 / self.m_s

    @property
    def p_w2(self) -> float:
        return self.m_w2 / self.m_s

    @property
    def p_d(self) -> float:
        return self.m_d / self.m_s


def play_game(x0: GameState, t1: Tactic, t2: Tactic, horizon: int, model: GameModel,
              rng1: np.random.Generator, rng2: np.random.Generator, trial: int = 0) -> TrialRecord:
    """Play until a win cone is entered or ``horizon`` decisions have elapsed (draw).

    Both tactics decide from the same pre-move state, each with its own rng.
    """
    if check_terminal(x0, model.eng, strict=False) is not Outcome.ONGOING:
        raise ValueError("game cannot start from a terminal state")
    state = x0
    states = [state]
    moves: list[JointManeuver] = []
    outcome = Outcome.DRAW
    for _ in range(horizon):
        joint = JointManeuver(t1.choose(state, 1, model, rng1), t2.choose(state, 2, model, rng2))
        state = model.transition(state, joint)
        moves.append(joint)
        states.append(state)
        result = check_terminal(state, model.eng, strict=False)
        if result is not Outcome.ONGOING:
            outcome = result
            break
    return TrialRecord(trial, states, moves, outcome, model.p1.maneuver_duration)


def sample_initial_state(rng: np.random.Generator, model: GameModel, half_width: float = 6.0,
                         max_attempts: int = 1000) -> GameState:
    """Uniform positions in a square, uniform headings, wings level.

    Rejects draws that are terminal or closer than ``d_max``.
    """
    for _ in range(max_attempts):
        x1, y1, x2, y2 = rng.uniform(-half_width, half_width, size=4)
        th1, th2 = rng.uniform(0.0, 2.0 * math.pi, size=2)
        state = GameState(model.p1.initial_state(x1, y1, th1), model.p2.initial_state(x2, y2, th2), 0)
        if math.hypot(x2 - x1, y2 - y1) <= model.eng.d_max:
            continue
        if check_terminal(state, model.eng, strict=False) is Outcome.ONGOING:
            return state
    raise RuntimeError(f"no admissible initial state after {max_attempts} attempts")


def symmetrize(x0: GameState) -> GameState:
    """Swap the aircraft starting states; the step counter restarts at zero.

    Speeds travel with the swapped states, so callers with unequal airframe
    speeds should rebuild them from their own parameters.
    """
    return GameState(x0.ac2, x0.ac1, 0)


@dataclass(frozen=True)
class CaseSpec:
    name: str
    tactic1: Tactic
    tactic2: Tactic
    model: GameModel = field(default_factory=GameModel)
    horizon: int = 70
    half_width: float = 6.0


DEG = math.pi / 180.0


def preset_case(case: str, search: Optional[SearchConfig] = None, eng: Optional[EngagementParams] = None,
                aircraft: Optional[AircraftParams] = None, horizon: int = 70) -> CaseSpec:
    """Cases I-IV: MG vs MG, then SMCTS-M vs MG at equal and unequal bank rates."""
    search = search or SearchConfig()
    eng = eng or EngagementParams()
    base = aircraft or AircraftParams()
    slow = replace(base, zeta_dot=base.zeta_dot / 2.0)
    table = {
        "I": (MGTactic(), base, base),
        "II": (SMCTSTactic(search), base, base),
        "III": (SMCTSTactic(search), base, slow),
        "IV": (SMCTSTactic(search), slow, base),
    }
    if case not in table:
        raise KeyError(f"unknown case {case!r}; expected one of {sorted(table)}")
    t1, p1, p2 = table[case]
    return CaseSpec(case, t1, MGTactic(), GameModel(eng, p1, p2), horizon)


def _trial_rngs(seed: int, trial: int):
    return (np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(1, trial, 1))),
            np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(1, trial, 2))))


def initial_pair(case: CaseSpec, seed: int, pair: int) -> tuple[GameState, GameState]:
    rng = np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(0, pair)))
    x0 = sample_initial_state(rng, case.model, case.half_width)
    twin = symmetrize(x0)
    # Keep each airframe's own speed when the aircraft differ.
    twin = GameState(twin.ac1._replace(v=case.model.p1.v), twin.ac2._replace(v=case.model.p2.v), 0)
    return x0, twin


def run_trial(case: CaseSpec, seed: int, trial: int) -> TrialRecord:
    """Trial ``2p`` starts from pair ``p``'s base state, trial ``2p + 1`` from its twin."""
    x0 = initial_pair(case, seed, trial // 2)[trial % 2]
    rng1, rng2 = _trial_rngs(seed, trial)
    return play_game(x0, case.tactic1, case.tactic2, case.horizon, case.model, rng1, rng2, trial)


def _run_trial_args(args):
    return run_trial(*args)


def run_mc_study(case: CaseSpec, m_s: int = 100, seed: int = 0, parallel: int = 1):
    """Play ``m_s`` games in symmetrized pairs; returns (summary, records).

    Every trial owns rng streams derived from ``seed`` and its index, so the
    result does not depend on ``parallel``.
    """
    if m_s < 2 or m_s % 2:
        raise ValueError(f"m_s must be a positive even number, got {m_s}")
    jobs = [(case, seed, t) for t in range(m_s)]
    if parallel > 1:
        with ProcessPoolExecutor(max_workers=parallel) as pool:
            records = list(pool.map(_run_trial_args, jobs, chunksize=1))
    else:
        records = [run_trial(*job) for job in jobs]
    return MCSummary.from_outcomes(r.outcome for r in records), records
