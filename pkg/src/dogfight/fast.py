"""Adapters between the game-model objects and the compiled kernels."""
from __future__ import annotations

import numpy as np

from dogfight import _kernels as K
from dogfight.airframe import MANEUVERS, AircraftParams, AircraftState, Maneuver
from dogfight.engagement import EngagementParams, GameModel, GameState

_PLAYOUT_CODES = {"random": K.RANDOM, "greedy": K.GREEDY, "epsilon_greedy": K.EPSILON_GREEDY,
                  "matrix_game": K.MATRIX_GAME}


def pack_state(state: GameState) -> np.ndarray:
    return np.array((*state.ac1, *state.ac2), dtype=float)


def unpack_state(arr, k: int) -> GameState:
    a = [float(v) for v in arr]
    return GameState(AircraftState(*a[:5]), AircraftState(*a[5:]), k)


def pack_aircraft(p: AircraftParams) -> np.ndarray:
    return np.array((p.zeta_dot, p.zeta_max, p.dt, p.n_s, p.g), dtype=float)


def pack_engagement(e: EngagementParams) -> np.ndarray:
    return np.array((e.d_min, e.d_max, e.d_nom, e.r_d, e.bearing_max, e.aspect_max, e.w, e.gamma), dtype=float)


class FastModel:
    """Compiled playouts and matrix-game moves for one game model."""

    def __init__(self, model: GameModel, playout="matrix_game", t_sim: int = 10, epsilon: float = 0.1,
                 absorbing: bool = True):
        self.model = model
        self.ac1 = pack_aircraft(model.p1)
        self.ac2 = pack_aircraft(model.p2)
        self.eng = pack_engagement(model.eng)
        self.substep = model.capture == "substep"
        self.kind = _PLAYOUT_CODES[getattr(playout, "value", playout)]
        self.t_sim = t_sim
        self.epsilon = epsilon
        self.absorbing = absorbing

    def simulate(self, state: GameState, u: np.ndarray) -> tuple[float, float]:
        return K.simulate(pack_state(state), self.kind, self.t_sim, self.epsilon, u,
                          self.ac1, self.ac2, self.eng, self.substep, self.absorbing)

    def simulate_many(self, states: np.ndarray, u: np.ndarray) -> np.ndarray:
        """Returns for a batch of packed states; ``u`` has shape (n, t_sim, 4)."""
        out = np.empty((len(states), 2))
        K.simulate_many(np.ascontiguousarray(states, dtype=np.float64), self.kind, self.t_sim, self.epsilon,
                        np.ascontiguousarray(u, dtype=np.float64), self.ac1, self.ac2, self.eng,
                        self.substep, self.absorbing, out)
        return out

    def payoff_tables(self, state: GameState) -> tuple[np.ndarray, np.ndarray]:
        n_s = self.model.p1.n_s
        t1, t2 = np.empty((3, 3)), np.empty((3, 3))
        K.payoff_tables(pack_state(state), self.ac1, self.ac2, self.eng, self.substep, t1, t2,
                        np.empty((3, 3, 10)), np.empty((3, n_s, 5)), np.empty((3, n_s, 5)))
        return t1, t2

    def mg_move(self, state: GameState, player: int, u: float) -> Maneuver:
        table = self.payoff_tables(state)[player - 1]
        probs = np.empty(3)
        K.maxmin(table, probs)
        return MANEUVERS[K.sample(probs, u)]
