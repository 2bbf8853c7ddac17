"""The MG tactic: a 3x3 payoff table one maneuver ahead, solved as a max-min LP."""
import math

import numpy as np

from dogfight.airframe import MANEUVERS
from dogfight.engagement import GameModel, GameState
from dogfight.matrix_game import mg_tactic, payoff_tables, solve_maxmin

model = GameModel()
p = model.p1
state = GameState(p.initial_state(0, 0, 0.3), p.initial_state(4, 1, 2.6))

t1, t2 = payoff_tables(state, model)
names = [m.name.title() for m in MANEUVERS]
print("Blue's payoff after one maneuver (rows: blue, columns: red)")
print("          " + "".join(f"{n:>10}" for n in names))
for name, row in zip(names, t1):
    print(f"{name:>10}" + "".join(f"{v:10.4f}" for v in row))

blue = solve_maxmin(t1)
red = solve_maxmin(t2)
print("\nblue strategy", np.round(blue.probs, 4) + 0.0, "guarantees", round(blue.value, 4))
print("red strategy ", np.round(red.probs, 4) + 0.0, "guarantees", round(red.value, 4))

# Shaped rewards sum to a constant, so the table is effectively zero-sum and
# the two guarantees meet at the same cell.
print("sum of guarantees:", round(blue.value + red.value, 12), "= 1 - w =", 1 - model.eng.w)

# A textbook mixed game to show the solver is not only picking saddle points.
rps = solve_maxmin([[0, -1, 1], [1, 0, -1], [-1, 1, 0]])
print("\nrock-paper-scissors:", np.round(rps.probs, 4), "value", round(rps.value, 12) + 0.0)

rng = np.random.default_rng(1)
picks = [mg_tactic(state, 1, model, rng).name for _ in range(5)]
print("\nfive MG decisions for blue:", picks)
print("heading gap to red:", round(math.degrees(state.ac2.theta - state.ac1.theta), 1), "deg")
