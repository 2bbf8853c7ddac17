"""Fly two aircraft for a few seconds and watch the relative geometry change."""
import math

from dogfight.airframe import AircraftParams, Maneuver, step_maneuver, turn_rate
from dogfight.engagement import EngagementParams, GameState, check_terminal, relative_geometry, shaped_reward

params = AircraftParams()
eng = EngagementParams()

print("Each maneuver lasts", params.maneuver_duration, "s of", params.n_s, "Euler steps.")
banked = params.initial_state(0, 0, 0, params.zeta_max)
print(f"At full bank the heading changes at {math.degrees(turn_rate(banked, params)):.1f} deg/s.\n")

# Blue starts south-west heading east, red north-east heading south.
state = GameState(params.initial_state(-3, -2, 0.0), params.initial_state(3, 2, -math.pi / 2))
plan = [(Maneuver.STRAIGHT, Maneuver.STRAIGHT), (Maneuver.LEFT, Maneuver.RIGHT),
        (Maneuver.LEFT, Maneuver.RIGHT), (Maneuver.STRAIGHT, Maneuver.LEFT)]

print(" t   move   dist  bearing1 aspect1  reward1  reward2  outcome")
for t, moves in enumerate([None] + plan):
    if moves:
        m1, m2 = moves
        state = GameState(step_maneuver(state.ac1, m1, params), step_maneuver(state.ac2, m2, params), t)
    g = relative_geometry(state, 1)
    move = f"{m1.letter}/{m2.letter}" if moves else "   "
    print(f"{t:2d}   {move}  {g.distance:5.2f}  {math.degrees(g.bearing):7.1f} {math.degrees(g.aspect):7.1f}"
          f"  {shaped_reward(state, 1, eng):7.3f}  {shaped_reward(state, 2, eng):7.3f}  "
          f"{check_terminal(state, eng).value}")

print("\nBearing is measured from blue's nose; aspect from red's tail.")
print("The two shaped rewards always sum to 1 - w =", 1 - eng.w)
