"""Simultaneous-move Monte Carlo Tree Search with decoupled bandit selection.

Tree edges carry joint maneuvers. At a fully expanded node each player picks
its own maneuver from statistics marginalized over the opponent's choices,
and the pair indexes the child to descend into. Playouts are truncated at
``t_sim`` decision steps and score the discounted sum of shaped rewards.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum
from itertools import product
from typing import NamedTuple, Optional, Union

import numpy as np

from dogfight.airframe import MANEUVERS, Maneuver, maneuver_path
from dogfight.engagement import GameModel, GameState, JointManeuver, Outcome, first_capture
from dogfight.matrix_game import _sample, _simplex_maxmin, payoff_tables

JOINT_ACTIONS = tuple(JointManeuver(a, b) for a, b in product(MANEUVERS, MANEUVERS))


@dataclass(frozen=True)
class UCB1:
    c: float = 0.2

    def __post_init__(self):
        if not self.c >= 0:
            raise ValueError("UCB1 exploration constant must be >= 0")


@dataclass(frozen=True)
class Thompson:
    c1: float = 1.0
    c2: float = 1.0

    def __post_init__(self):
        if not (self.c1 > 0 and self.c2 > 0):
            raise ValueError("Thompson prior parameters must be positive")


class Playout(Enum):
    RANDOM = "random"
    GREEDY = "greedy"
    EPSILON_GREEDY = "epsilon_greedy"
    MATRIX_GAME = "matrix_game"


@dataclass(frozen=True)
class SearchConfig:
    m_tree: int = 9
    t_sim: int = 10
    selection: Union[UCB1, Thompson] = field(default_factory=UCB1)
    playout: Playout = Playout.MATRIX_GAME
    epsilon: float = 0.1
    extra_iterations: int = 0
    shuffle_expansion: bool = False
    terminal_return: str = "absorbing"

    def __post_init__(self):
        if self.m_tree < 1:
            raise ValueError("m_tree must be >= 1")
        if self.t_sim < 1:
            raise ValueError("t_sim must be >= 1")
        if not 0.0 <= self.epsilon <= 1.0:
            raise ValueError("epsilon must lie in [0, 1]")
        if self.extra_iterations < 0:
            raise ValueError("extra_iterations must be >= 0")
        if self.terminal_return not in ("absorbing", "truncated"):
            raise ValueError("terminal_return must be 'absorbing' or 'truncated'")
        if not isinstance(self.selection, (UCB1, Thompson)):
            raise TypeError(f"unknown selection policy {self.selection!r}")
        object.__setattr__(self, "playout", Playout(self.playout))


class RewardScale(NamedTuple):
    """Analytic range of a truncated discounted playout return."""

    lo: float
    hi: float

    @classmethod
    def for_horizon(cls, w: float, gamma: float, t_sim: int) -> "RewardScale":
        total = float(t_sim) if gamma == 1.0 else (1.0 - gamma**t_sim) / (1.0 - gamma)
        return cls(-w * total, total)

    def normalize(self, r: float) -> float:
        return (r - self.lo) / (self.hi - self.lo)


class TreeNode:
    __slots__ = ("state", "parent", "joint", "children", "untried", "N", "q1", "q2", "outcome", "rewards")

    def __init__(self, state: GameState, parent: Optional["TreeNode"], joint: Optional[JointManeuver],
                 outcome: Outcome, rewards: tuple[float, float], untried: list):
        self.state = state
        self.parent = parent
        self.joint = joint
        self.children: dict[JointManeuver, TreeNode] = {}
        self.outcome = outcome
        self.rewards = rewards
        self.untried = [] if self.is_terminal else untried
        self.N = 0
        self.q1 = 0.0
        self.q2 = 0.0

    @property
    def is_terminal(self) -> bool:
        return self.outcome is not Outcome.ONGOING

    @property
    def fully_expanded(self) -> bool:
        return not self.untried

    def __repr__(self):
        return f"TreeNode(joint={self.joint}, N={self.N}, q1={self.q1:.3f}, q2={self.q2:.3f})"


class ActionStats(NamedTuple):
    action: Maneuver
    q: float
    n: int


class NodeStats(NamedTuple):
    player: int
    arms: tuple[ActionStats, ...]

    @property
    def total(self) -> int:
        return sum(a.n for a in self.arms)


def marginal_stats(node: TreeNode, player: int) -> NodeStats:
    """Per-maneuver (mean accumulated reward, visits) of ``player`` summed over the opponent's moves.

    Missing or unvisited children contribute zero visits. An arm with no
    visits reports ``q = nan``.
    """
    n = [0, 0, 0]
    q = [0.0, 0.0, 0.0]
    idx = 0 if player == 1 else 1
    for joint, child in node.children.items():
        a = joint[idx]
        n[a] += child.N
        q[a] += child.q1 if player == 1 else child.q2
    arms = tuple(
        ActionStats(m, q[m] / n[m] if n[m] else math.nan, n[m]) for m in MANEUVERS
    )
    return NodeStats(player, arms)


def ucb1_index(q: float, n_ij: int, n_i: int, c: float) -> float:
    if n_ij == 0:
        return math.inf
    return q + c * math.sqrt(math.log(n_i) / n_ij)


def thompson_index(q: float, n_ij: int, c1: float, c2: float, rng: np.random.Generator) -> float:
    # Visit count scales both shapes so the posterior stays a proper beta.
    if n_ij == 0:
        return float(rng.beta(c1, c2))
    return float(rng.beta(c1 + q * n_ij, c2 + (1.0 - q) * n_ij))


def _argmax(scores, allowed=None) -> int:
    best = -1
    best_score = -math.inf
    for j, s in enumerate(scores):
        if allowed is not None and j not in allowed:
            continue
        if best < 0 or s > best_score:
            best, best_score = j, s
    return best


def _fast_playout(config: SearchConfig, model: GameModel, backend: str):
    if backend == "python":
        return None
    try:
        from dogfight.fast import FastModel
    except ImportError:
        if backend == "numba":
            raise
        return None
    return FastModel(model, config.playout, config.t_sim, config.epsilon, config.terminal_return == "absorbing")


class SMCTS:
    """One search engine bound to a game model, a configuration and an rng stream."""

    def __init__(self, config: SearchConfig, model: GameModel, rng: np.random.Generator,
                 backend: str = "auto"):
        self.config = config
        self.model = model
        self.rng = rng
        self._fast = _fast_playout(config, model, backend)
        self.scale = RewardScale.for_horizon(model.eng.w, model.eng.gamma, config.t_sim)
        self.size = 0
        self.root: Optional[TreeNode] = None

    # tree construction

    def _make_node(self, state: GameState, parent=None, joint=None) -> TreeNode:
        outcome, r1, r2 = self.model.evaluate(state)
        untried = list(JOINT_ACTIONS)
        if self.config.shuffle_expansion:
            order = self.rng.permutation(len(untried))
            untried = [untried[i] for i in order]
        node = TreeNode(state, parent, joint, outcome, (r1, r2), untried)
        self.size += 1
        return node

    def expand(self, node: TreeNode) -> TreeNode:
        if not node.untried:
            raise ValueError("expand called on a node without untried joint maneuvers")
        joint = node.untried.pop(0)
        child = self._make_node(self.model.transition(node.state, joint), node, joint)
        node.children[joint] = child
        return child

    # selection

    def _scores(self, stats: NodeStats) -> list[float]:
        policy = self.config.selection
        n_i = stats.total
        scores = []
        for arm in stats.arms:
            qn = self.scale.normalize(arm.q) if arm.n else 0.0
            if isinstance(policy, UCB1):
                scores.append(ucb1_index(qn, arm.n, n_i, policy.c))
            else:
                scores.append(thompson_index(qn, arm.n, policy.c1, policy.c2, self.rng))
        return scores

    def best_child(self, node: TreeNode) -> TreeNode:
        """Decoupled bandit choice: each player maximizes its own marginal index.

        On a partially expanded node (possible only once the tree budget is
        spent) each choice is restricted to maneuvers with an existing child.
        """
        s1 = self._scores(marginal_stats(node, 1))
        s2 = self._scores(marginal_stats(node, 2))
        if node.fully_expanded:
            return node.children[JointManeuver(MANEUVERS[_argmax(s1)], MANEUVERS[_argmax(s2)])]
        a1 = _argmax(s1, {j.m1 for j in node.children})
        a2 = _argmax(s2, {j.m2 for j in node.children if j.m1 == a1})
        return node.children[JointManeuver(MANEUVERS[a1], MANEUVERS[a2])]

    def selection(self, node: TreeNode, allow_expand: bool = True) -> TreeNode:
        while not node.is_terminal:
            if not node.fully_expanded:
                if allow_expand:
                    return self.expand(node)
                if not node.children:
                    return node
            node = self.best_child(node)
        return node

    # playout

    def _greedy(self, state: GameState, player: int) -> Maneuver:
        model = self.model
        k = state.k + 1
        best, best_r = 0, -math.inf
        for m in MANEUVERS:
            if player == 1:
                mover = maneuver_path(state.ac1, m, model.p1)
                nxt = self._frozen_successor(mover, [state.ac2] * len(mover), k)
            else:
                mover = maneuver_path(state.ac2, m, model.p2)
                nxt = self._frozen_successor([state.ac1] * len(mover), mover, k)
            r = model.evaluate(nxt)[player]
            if r > best_r:
                best, best_r = m, r
        return MANEUVERS[best]

    def _frozen_successor(self, path1, path2, k: int) -> GameState:
        if self.model.capture == "substep":
            return first_capture(path1, path2, k, self.model.eng)
        return GameState(path1[-1], path2[-1], k)

    def _move_from_uniforms(self, state: GameState, player: int, u_move: float, u_coin: float) -> Maneuver:
        kind = self.config.playout
        if kind is Playout.RANDOM or (kind is Playout.EPSILON_GREEDY and u_coin < self.config.epsilon):
            return MANEUVERS[min(int(3.0 * u_move), 2)]
        if kind is Playout.MATRIX_GAME:
            probs, _ = _simplex_maxmin(payoff_tables(state, self.model)[player - 1])
            return MANEUVERS[_sample(probs, u_move)]
        return self._greedy(state, player)

    def playout_move(self, state: GameState, player: int) -> Maneuver:
        """One player's playout maneuver under the configured policy."""
        u_move, u_coin = self.rng.random(2)
        return self._move_from_uniforms(state, player, u_move, u_coin)

    def playout_moves(self, state: GameState, u) -> JointManeuver:
        """Both players' playout maneuvers from the uniforms ``u = (move1, move2, coin1, coin2)``."""
        if self.config.playout is Playout.MATRIX_GAME:
            t1, t2 = payoff_tables(state, self.model)
            probs1, _ = _simplex_maxmin(t1)
            probs2, _ = _simplex_maxmin(t2)
            return JointManeuver(MANEUVERS[_sample(probs1, u[0])], MANEUVERS[_sample(probs2, u[1])])
        return JointManeuver(self._move_from_uniforms(state, 1, u[0], u[2]),
                             self._move_from_uniforms(state, 2, u[1], u[3]))

    def simulate(self, state: GameState) -> tuple[float, float]:
        """Discounted shaped return of a playout of at most ``t_sim`` states.

        The starting state is the k=0 summand. A terminal state ends the
        playout; with ``terminal_return="absorbing"`` its reward is repeated
        for the remaining horizon, with ``"truncated"`` it counts once. All
        randomness is drawn up front as a ``(t_sim, 4)`` block so both
        backends consume it alike.
        """
        u = self.rng.random((self.config.t_sim, 4))
        if self._fast is not None:
            return self._fast.simulate(state, u)
        gamma = self.model.eng.gamma
        t_sim = self.config.t_sim
        R1 = R2 = 0.0
        disc = 1.0
        for k in range(t_sim):
            outcome, r1, r2 = self.model.evaluate(state)
            R1 += disc * r1
            R2 += disc * r2
            if outcome is not Outcome.ONGOING:
                if self.config.terminal_return == "absorbing":
                    for _ in range(k + 1, t_sim):
                        disc *= gamma
                        R1 += disc * r1
                        R2 += disc * r2
                break
            if k == t_sim - 1:
                break
            state = self.model.transition(state, self.playout_moves(state, u[k]))
            disc *= gamma
        return R1, R2

    @staticmethod
    def backup(node: Optional[TreeNode], d1: float, d2: float) -> None:
        while node is not None:
            node.N += 1
            node.q1 += d1
            node.q2 += d2
            node = node.parent

    # driver

    def run(self, root_state: GameState) -> TreeNode:
        """Build the search tree for ``root_state`` and return its root."""
        self.size = 0
        root = self._make_node(root_state)
        if root.is_terminal:
            raise ValueError("search on terminal state")
        self.root = root
        # Each growth pass adds one node unless it ends on a terminal node.
        for _ in range(self.config.m_tree - 1):
            leaf = self.selection(root)
            self.backup(leaf, *self.playout(leaf))
        for _ in range(self.config.extra_iterations):
            leaf = self.selection(root, allow_expand=False)
            self.backup(leaf, *self.playout(leaf))
        return root

    def playout(self, leaf: TreeNode) -> tuple[float, float]:
        """Return estimate for a selected leaf; override to stub the playout."""
        return self.simulate(leaf.state)

    def choose(self, root: TreeNode, player: int) -> Maneuver:
        """Robust child over the player's marginal visit counts."""
        stats = marginal_stats(root, player)
        if stats.total == 0:
            return MANEUVERS[int(self.rng.integers(3))]
        # Count ties are common at small budgets; prefer the better marginal mean.
        top = max(arm.n for arm in stats.arms)
        tied = [i for i, arm in enumerate(stats.arms) if arm.n == top]
        return MANEUVERS[max(tied, key=lambda i: (stats.arms[i].q, -i))]

    def search(self, root_state: GameState, player: int) -> Maneuver:
        return self.choose(self.run(root_state), player)


def search(root_state: GameState, player: int, config: SearchConfig, model: GameModel,
           rng: np.random.Generator, backend: str = "auto") -> Maneuver:
    """Run one SMCTS decision for ``player`` from ``root_state``."""
    return SMCTS(config, model, rng, backend).search(root_state, player)
