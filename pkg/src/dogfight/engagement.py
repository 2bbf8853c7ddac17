"""Two-aircraft zero-sum engagement: relative geometry, win cones, rewards.

Player ids are the integers 1 and 2. For player 1 the line of sight runs from
aircraft 1 to aircraft 2; bearing is measured against the player's own
velocity and aspect against the opponent's velocity, both in [0, pi].
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from enum import Enum
from typing import NamedTuple

from dogfight.airframe import AircraftParams, AircraftState, Maneuver, maneuver_path, step_maneuver

DEGENERATE_DISTANCE = 1e-9


class DegenerateGeometryError(ValueError):
    """Raised when the two aircraft occupy the same position."""


class Outcome(Enum):
    WIN1 = "WIN1"
    WIN2 = "WIN2"
    DRAW = "DRAW"
    ONGOING = "ONGOING"

    @property
    def is_terminal(self) -> bool:
        return self is Outcome.WIN1 or self is Outcome.WIN2


class GameState(NamedTuple):
    ac1: AircraftState
    ac2: AircraftState
    k: int = 0

    def aircraft(self, player: int) -> AircraftState:
        return self.ac1 if player == 1 else self.ac2

    def swapped(self) -> "GameState":
        return GameState(self.ac2, self.ac1, self.k)


class JointManeuver(NamedTuple):
    m1: Maneuver
    m2: Maneuver


class RelativeGeometry(NamedTuple):
    bearing: float
    aspect: float
    distance: float


@dataclass(frozen=True)
class EngagementParams:
    d_min: float = 0.1
    d_max: float = 3.0
    d_nom: float = 2.0
    r_d: float = 18.0
    bearing_max: float = math.radians(30.0)
    aspect_max: float = math.radians(60.0)
    w: float = 0.5
    gamma: float = 0.8

    def __post_init__(self):
        if not 0 < self.d_min < self.d_max:
            raise ValueError("need 0 < d_min < d_max")
        if not self.r_d > 0:
            raise ValueError("r_d must be positive")
        for name in ("bearing_max", "aspect_max"):
            if not 0 < getattr(self, name) < math.pi:
                raise ValueError(f"{name} must lie in (0, pi)")
        if not 0 < self.w < 1:
            raise ValueError("w must lie in (0, 1)")
        if not 0 < self.gamma <= 1:
            raise ValueError("gamma must lie in (0, 1]")
        if self.bearing_max + self.aspect_max >= math.pi:
            warnings.warn(
                "bearing_max + aspect_max >= pi: both win cones can hold at once; "
                "such states are scored as draws",
                stacklevel=3,
            )


def _acos(c: float) -> float:
    return math.acos(1.0 if c > 1.0 else (-1.0 if c < -1.0 else c))


def _geometry_pair(state: GameState):
    """Return (bearing1, aspect1, bearing2, aspect2, distance), or None if degenerate."""
    a, b = state.ac1, state.ac2
    dx = b.x - a.x
    dy = b.y - a.y
    d = math.hypot(dx, dy)
    if d < DEGENERATE_DISTANCE:
        return None
    ux, uy = dx / d, dy / d
    c1 = math.cos(a.theta) * ux + math.sin(a.theta) * uy
    c2 = math.cos(b.theta) * ux + math.sin(b.theta) * uy
    # Player 2's line of sight is the reverse vector, so its cosines flip sign.
    return _acos(c1), _acos(c2), _acos(-c2), _acos(-c1), d


def relative_geometry(state: GameState, player: int) -> RelativeGeometry:
    """Bearing, aspect and range of ``player`` with respect to its opponent."""
    own, other = (state.ac1, state.ac2) if player == 1 else (state.ac2, state.ac1)
    dx = other.x - own.x
    dy = other.y - own.y
    d = math.hypot(dx, dy)
    if d < DEGENERATE_DISTANCE:
        raise DegenerateGeometryError("degenerate geometry: aircraft positions coincide")
    # |velocity| = v, so normalizing by v reduces the velocity to its unit heading vector.
    v_own = (own.v * math.cos(own.theta), own.v * math.sin(own.theta))
    v_other = (other.v * math.cos(other.theta), other.v * math.sin(other.theta))
    bearing = _acos((dx * v_own[0] + dy * v_own[1]) / (d * own.v))
    aspect = _acos((dx * v_other[0] + dy * v_other[1]) / (d * other.v))
    return RelativeGeometry(bearing, aspect, d)


def _in_cone(bearing: float, aspect: float, d: float, p: EngagementParams) -> bool:
    return p.d_min < d < p.d_max and bearing < p.bearing_max and aspect < p.aspect_max


def _outcome_from(geo, p: EngagementParams) -> Outcome:
    if geo is None:
        return Outcome.ONGOING
    b1, a1, b2, a2, d = geo
    win1 = _in_cone(b1, a1, d, p)
    win2 = _in_cone(b2, a2, d, p)
    if win1 and win2:
        return Outcome.DRAW
    if win1:
        return Outcome.WIN1
    if win2:
        return Outcome.WIN2
    return Outcome.ONGOING


def check_terminal(state: GameState, params: EngagementParams, strict: bool = True) -> Outcome:
    """Classify ``state`` as WIN1, WIN2 or ONGOING.

    A state inside both win cones (only possible when bearing_max + aspect_max
    >= pi) is reported as DRAW. With ``strict=False`` coincident positions are
    treated as ONGOING instead of raising.
    """
    geo = _geometry_pair(state)
    if geo is None and strict:
        raise DegenerateGeometryError("degenerate geometry: aircraft positions coincide")
    return _outcome_from(geo, params)


_TERMINAL_REWARD = {
    Outcome.WIN1: (1.0, -1.0),
    Outcome.WIN2: (-1.0, 1.0),
    Outcome.DRAW: (0.0, 0.0),
    Outcome.ONGOING: (0.0, 0.0),
}


def terminal_reward(outcome: Outcome) -> tuple[float, float]:
    return _TERMINAL_REWARD[outcome]


def _shaping(bearing: float, aspect: float, d: float, p: EngagementParams) -> float:
    # Bracket as printed; it reduces to aspect/pi + bearing/pi - 1.
    bracket = 1.0 - (1.0 - aspect / math.pi) - (1.0 - bearing / math.pi)
    return 0.5 - 0.5 * bracket * math.exp(-abs(d - p.d_nom) / p.r_d)


def shaping_term(state: GameState, player: int, params: EngagementParams, strict: bool = True) -> float:
    """Dense positional-advantage score in [0, 1]; 1 is dead astern at nominal range."""
    geo = _geometry_pair(state)
    if geo is None:
        if strict:
            raise DegenerateGeometryError("degenerate geometry: aircraft positions coincide")
        return 0.5
    b1, a1, b2, a2, d = geo
    if player == 1:
        return _shaping(b1, a1, d, params)
    return _shaping(b2, a2, d, params)


def evaluate(state: GameState, params: EngagementParams) -> tuple[Outcome, float, float]:
    """Outcome and both players' shaped rewards from a single geometry pass.

    Used in the search hot loops; coincident positions score as a neutral
    ongoing state.
    """
    geo = _geometry_pair(state)
    if geo is None:
        half = (1.0 - params.w) * 0.5
        return Outcome.ONGOING, half, half
    outcome = _outcome_from(geo, params)
    r1, r2 = _TERMINAL_REWARD[outcome]
    b1, a1, b2, a2, d = geo
    w = params.w
    s1 = w * r1 + (1.0 - w) * _shaping(b1, a1, d, params)
    s2 = w * r2 + (1.0 - w) * _shaping(b2, a2, d, params)
    return outcome, s1, s2


def shaped_reward(state: GameState, player: int, params: EngagementParams, strict: bool = True) -> float:
    """Blend of terminal reward and shaping term, in [-w, 1]."""
    if strict:
        outcome = check_terminal(state, params)
        shape = shaping_term(state, player, params)
        return params.w * terminal_reward(outcome)[player - 1] + (1.0 - params.w) * shape
    _, s1, s2 = evaluate(state, params)
    return s1 if player == 1 else s2


def transition(state: GameState, joint, p1: AircraftParams, p2: AircraftParams) -> GameState:
    m1, m2 = joint
    return GameState(step_maneuver(state.ac1, m1, p1), step_maneuver(state.ac2, m2, p2), state.k + 1)


def first_capture(path1, path2, k: int, params: EngagementParams) -> GameState:
    """Walk two lockstep inner-step paths and stop at the first terminal state."""
    lo2, hi2 = params.d_min**2, params.d_max**2
    for a, b in zip(path1, path2):
        dx, dy = b.x - a.x, b.y - a.y
        d2 = dx * dx + dy * dy
        if lo2 < d2 < hi2:
            state = GameState(a, b, k)
            if _outcome_from(_geometry_pair(state), params) is not Outcome.ONGOING:
                return state
    return GameState(path1[-1], path2[-1], k)


def capture_transition(state: GameState, joint, p1: AircraftParams, p2: AircraftParams,
                       params: EngagementParams) -> GameState:
    """Joint transition that ends early if a win cone is entered mid-maneuver."""
    m1, m2 = joint
    return first_capture(maneuver_path(state.ac1, m1, p1), maneuver_path(state.ac2, m2, p2), state.k + 1, params)


@dataclass(frozen=True)
class GameModel:
    """Both airframes, the engagement rules, and when captures are detected.

    With ``capture="maneuver"`` the win cones are tested only at decision
    boundaries. ``capture="substep"`` tests after every inner integration step
    and freezes the game at the first capture.
    """

    eng: EngagementParams = EngagementParams()
    p1: AircraftParams = AircraftParams()
    p2: AircraftParams = AircraftParams()
    capture: str = "substep"

    def __post_init__(self):
        if self.capture not in ("maneuver", "substep"):
            raise ValueError(f"capture must be 'maneuver' or 'substep', got {self.capture!r}")
        if self.capture == "substep" and (self.p1.n_s != self.p2.n_s or self.p1.dt != self.p2.dt):
            raise ValueError("substep capture needs both aircraft on the same integration grid")

    def transition(self, state: GameState, joint) -> GameState:
        if self.capture == "substep":
            return capture_transition(state, joint, self.p1, self.p2, self.eng)
        return transition(state, joint, self.p1, self.p2)

    def evaluate(self, state: GameState) -> tuple[Outcome, float, float]:
        return evaluate(state, self.eng)

    def swapped(self) -> "GameModel":
        return GameModel(self.eng, self.p2, self.p1, self.capture)
