"""Inside one SMCTS decision: the root's marginal statistics per player."""
import numpy as np

from dogfight.airframe import MANEUVERS
from dogfight.engagement import GameModel, GameState
from dogfight.smcts import SMCTS, Playout, SearchConfig, Thompson, marginal_stats

model = GameModel()
p = model.p1
state = GameState(p.initial_state(-3, 0, 0.2), p.initial_state(2, 2, 2.8))


def show(label, config, seed=0):
    engine = SMCTS(config, model, np.random.default_rng(seed))
    root = engine.run(state)
    print(f"{label}: {engine.size} nodes, {root.N} playouts")
    lo, hi = engine.scale
    for player in (1, 2):
        arms = marginal_stats(root, player).arms
        cells = "  ".join(f"{a.action.letter}: n={a.n:3d} q={engine.scale.normalize(a.q):.3f}"
                          if a.n else f"{a.action.letter}: n=  0" for a in arms)
        print(f"   player {player}  {cells}  -> {engine.choose(root, player).name}")
    print()


show("budget only (m_tree=9)", SearchConfig(extra_iterations=0))
show("budget + 30 passes", SearchConfig(extra_iterations=30))
show("budget + 300 passes", SearchConfig(extra_iterations=300))
show("Thompson selection", SearchConfig(selection=Thompson(), extra_iterations=30))
show("greedy playouts", SearchConfig(playout=Playout.GREEDY, extra_iterations=30))

print("q is the mean playout return rescaled to [0, 1] for the bandit index.")
print("With 8 growth iterations one of the", len(MANEUVERS) ** 2,
      "joint actions stays unexpanded, which is why the extra passes matter.")
