"""Planar point-mass aircraft kinematics driven by three basic maneuvers.

Each maneuver holds a bank-rate command for ``n_s`` Euler steps of length
``dt``. Within one inner step the bank angle is updated first, then the
heading from the new bank, then the position from the new heading.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from enum import IntEnum
from typing import NamedTuple

G = 9.81


class Maneuver(IntEnum):
    LEFT = 0
    STRAIGHT = 1
    RIGHT = 2

    @property
    def letter(self) -> str:
        return "LSR"[self]

    @classmethod
    def from_letter(cls, letter: str) -> "Maneuver":
        try:
            return cls("LSR".index(letter))
        except ValueError:
            raise ValueError(f"unknown maneuver letter {letter!r}") from None

    def mirrored(self) -> "Maneuver":
        return Maneuver(2 - self)


MANEUVERS = (Maneuver.LEFT, Maneuver.STRAIGHT, Maneuver.RIGHT)


class AircraftState(NamedTuple):
    x: float
    y: float
    v: float
    theta: float
    zeta: float


@dataclass(frozen=True)
class AircraftParams:
    """Maneuverability and integration settings for one aircraft.

    Angles are in radians. ``v`` is the commanded (constant) speed.
    """

    v: float = 2.5
    zeta_dot: float = math.radians(45.0)
    zeta_max: float = math.radians(23.0)
    dt: float = 0.05
    n_s: int = 20
    g: float = G

    def __post_init__(self):
        for name in ("v", "zeta_dot", "zeta_max", "dt", "g"):
            value = getattr(self, name)
            if not (math.isfinite(value) and value > 0):
                raise ValueError(f"AircraftParams.{name} must be positive, got {value!r}")
        if not self.zeta_max < math.pi / 2:
            raise ValueError("zeta_max must be below 90 degrees")
        if int(self.n_s) != self.n_s or self.n_s < 1:
            raise ValueError(f"n_s must be a positive integer, got {self.n_s!r}")

    @property
    def maneuver_duration(self) -> float:
        return self.n_s * self.dt

    def initial_state(self, x: float, y: float, theta: float, zeta: float = 0.0) -> AircraftState:
        return AircraftState(float(x), float(y), self.v, float(theta), float(zeta))


def turn_rate(state: AircraftState, params: AircraftParams) -> float:
    """Heading rate (rad/s) of a coordinated turn at the current bank."""
    return params.g / state.v * math.tan(state.zeta)


def step_maneuver(state: AircraftState, maneuver: Maneuver, params: AircraftParams) -> AircraftState:
    x, y, v, theta, zeta = state
    dt = params.dt
    dzeta = params.zeta_dot * dt
    zmax = params.zeta_max
    k_turn = params.g / v * dt
    vdt = v * dt
    cos, sin, tan = math.cos, math.sin, math.tan
    if maneuver == Maneuver.LEFT:
        for _ in range(params.n_s):
            zeta = max(zeta - dzeta, -zmax)
            theta += k_turn * tan(zeta)
            x += vdt * cos(theta)
            y += vdt * sin(theta)
    elif maneuver == Maneuver.RIGHT:
        for _ in range(params.n_s):
            zeta = min(zeta + dzeta, zmax)
            theta += k_turn * tan(zeta)
            x += vdt * cos(theta)
            y += vdt * sin(theta)
    else:
        dtheta = k_turn * tan(zeta)
        for _ in range(params.n_s):
            theta += dtheta
            x += vdt * cos(theta)
            y += vdt * sin(theta)
    return AircraftState(x, y, v, theta, zeta)


def maneuver_path(state: AircraftState, maneuver: Maneuver, params: AircraftParams) -> list[AircraftState]:
    """States after each inner step of one maneuver; the last entry equals ``step_maneuver``."""
    one = _single_step(params)
    path = []
    for _ in range(params.n_s):
        state = step_maneuver(state, maneuver, one)
        path.append(state)
    return path


def _single_step(params: AircraftParams) -> AircraftParams:
    return AircraftParams(params.v, params.zeta_dot, params.zeta_max, params.dt, 1, params.g)


def wrap_angle(angle: float) -> float:
    """Wrap to (-pi, pi]."""
    wrapped = math.remainder(angle, 2.0 * math.pi)
    return math.pi if wrapped == -math.pi else wrapped
