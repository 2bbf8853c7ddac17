import numpy as np
import pytest

pytest.importorskip("numba")

from conftest import random_game_states
from dogfight.airframe import AircraftParams
from dogfight.arena import MGTactic
from dogfight.engagement import GameModel
from dogfight.fast import FastModel, pack_state, unpack_state
from dogfight.matrix_game import payoff_tables
from dogfight.smcts import SMCTS, Playout, SearchConfig

MODELS = [
    GameModel(),
    GameModel(capture="maneuver"),
    GameModel(p2=AircraftParams(zeta_dot=AircraftParams().zeta_dot / 2)),
]


def test_pack_round_trip():
    state = random_game_states(np.random.default_rng(0), 1, 5.0)[0]._replace(k=7)
    assert unpack_state(pack_state(state), 7) == state


@pytest.mark.parametrize("model", MODELS)
def test_payoff_tables_match(model):
    fast = FastModel(model)
    for state in random_game_states(np.random.default_rng(1), 50, 5.0):
        t1, t2 = payoff_tables(state, model)
        f1, f2 = fast.payoff_tables(state)
        np.testing.assert_allclose(f1, t1, rtol=0, atol=1e-12)
        np.testing.assert_allclose(f2, t2, rtol=0, atol=1e-12)


@pytest.mark.parametrize("model", MODELS)
@pytest.mark.parametrize("kind", list(Playout))
@pytest.mark.parametrize("mode", ["absorbing", "truncated"])
def test_simulate_matches_reference(model, kind, mode):
    cfg = SearchConfig(playout=kind, epsilon=0.4, terminal_return=mode)
    for i, state in enumerate(random_game_states(np.random.default_rng(2), 15, 4.0)):
        ref = SMCTS(cfg, model, np.random.default_rng(i), "python").simulate(state)
        fast = SMCTS(cfg, model, np.random.default_rng(i), "numba").simulate(state)
        assert fast == pytest.approx(ref, abs=1e-12)


def test_mg_tactic_backends_agree():
    model = MODELS[0]
    for state in random_game_states(np.random.default_rng(3), 40, 5.0):
        for player in (1, 2):
            a = MGTactic(backend="python").choose(state, player, model, np.random.default_rng(9))
            b = MGTactic().choose(state, player, model, np.random.default_rng(9))
            assert a is b


def test_search_backends_agree():
    model = MODELS[0]
    cfg = SearchConfig(m_tree=12, extra_iterations=10)
    for i, state in enumerate(random_game_states(np.random.default_rng(4), 10, 5.0)):
        a = SMCTS(cfg, model, np.random.default_rng(i), "python").search(state, 1)
        b = SMCTS(cfg, model, np.random.default_rng(i), "numba").search(state, 1)
        assert a is b
