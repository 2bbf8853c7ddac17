import math
import warnings

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import ac, random_game_states
from dogfight.airframe import AircraftParams, Maneuver
from dogfight.engagement import (
    DegenerateGeometryError,
    EngagementParams,
    GameState,
    JointManeuver,
    Outcome,
    check_terminal,
    evaluate,
    relative_geometry,
    shaped_reward,
    shaping_term,
    terminal_reward,
    transition,
)

PI = math.pi


def place(bearing_deg, aspect_deg, d):
    """Player-1 view with LOS along +x: own heading sets bearing, opponent heading sets aspect."""
    return GameState(ac(0, 0, math.radians(bearing_deg)), ac(d, 0, math.radians(aspect_deg)), 0)


@pytest.mark.parametrize(
    "state, expected",
    [
        (GameState(ac(0, 0, 0), ac(2, 0, PI)), (0.0, PI, 2.0)),
        (GameState(ac(0, 0, 0), ac(2, 0, 0)), (0.0, 0.0, 2.0)),
        (GameState(ac(0, 0, PI / 2), ac(3, 0, PI / 2)), (PI / 2, PI / 2, 3.0)),
    ],
    ids=["head-on", "tail-chase", "perpendicular"],
)
def test_relative_geometry_examples(state, expected):
    assert tuple(relative_geometry(state, 1)) == pytest.approx(expected, abs=1e-12)


def test_player_two_view_uses_reversed_line_of_sight():
    state = GameState(ac(0, 0, 0), ac(2, 0, 0))
    assert tuple(relative_geometry(state, 2)) == pytest.approx((PI, PI, 2.0), abs=1e-12)


def test_degenerate_geometry_strict_and_lenient(eng):
    state = GameState(ac(1, 1, 0), ac(1, 1, 2))
    with pytest.raises(DegenerateGeometryError):
        relative_geometry(state, 1)
    with pytest.raises(DegenerateGeometryError):
        check_terminal(state, eng)
    assert check_terminal(state, eng, strict=False) is Outcome.ONGOING
    assert shaping_term(state, 1, eng, strict=False) == 0.5
    assert evaluate(state, eng) == (Outcome.ONGOING, 0.25, 0.25)


def test_terminal_examples(eng):
    assert check_terminal(place(5, 10, 1.0), eng) is Outcome.WIN1
    assert check_terminal(place(0, 0, 5.0), eng) is Outcome.ONGOING
    # Player 2's aspect is pi minus player 1's bearing, far outside its cone.
    g2 = relative_geometry(place(5, 10, 1.0), 2)
    assert g2.aspect == pytest.approx(math.radians(175), abs=1e-12)


def test_win2_mirror(eng):
    assert check_terminal(place(5, 10, 1.0).swapped(), eng) is Outcome.WIN2


@pytest.mark.parametrize("d", [0.1, 3.0])
def test_range_bounds_are_open(eng, d):
    assert check_terminal(place(0, 0, d), eng) is Outcome.ONGOING


def test_terminal_reward_table():
    assert terminal_reward(Outcome.WIN1) == (1.0, -1.0)
    assert terminal_reward(Outcome.WIN2) == (-1.0, 1.0)
    assert terminal_reward(Outcome.ONGOING) == (0.0, 0.0)
    assert terminal_reward(Outcome.DRAW) == (0.0, 0.0)


@pytest.mark.parametrize(
    "bearing, aspect, expected",
    [(0, 0, 1.0), (180, 180, 0.0), (90, 90, 0.5)],
)
def test_shaping_examples(eng, bearing, aspect, expected):
    # d = d_nom makes the range factor exactly 1.
    assert shaping_term(place(bearing, aspect, eng.d_nom), 1, eng) == pytest.approx(expected, abs=1e-12)


def test_shaping_neutral_geometry_any_range(eng):
    for d in (0.5, 4.0, 30.0):
        assert shaping_term(place(90, 90, d), 1, eng) == pytest.approx(0.5, abs=1e-12)


def test_shaped_reward_examples(eng):
    win = place(0, 0, eng.d_nom)
    assert shaped_reward(win, 1, eng) == pytest.approx(1.0, abs=1e-12)
    assert shaped_reward(place(90, 90, 5.0), 1, eng) == pytest.approx(0.25, abs=1e-12)
    # Player 1 sits dead ahead of player 2 at nominal range: shaping 0, terminal -1.
    lose = win.swapped()
    assert shaping_term(lose, 1, eng) == pytest.approx(0.0, abs=1e-12)
    assert shaped_reward(lose, 1, eng) == pytest.approx(-0.5, abs=1e-12)


def test_evaluate_matches_strict_functions(eng):
    for state in random_game_states(np.random.default_rng(3), 300):
        outcome, r1, r2 = evaluate(state, eng)
        assert outcome is check_terminal(state, eng)
        assert r1 == pytest.approx(shaped_reward(state, 1, eng), abs=1e-12)
        assert r2 == pytest.approx(shaped_reward(state, 2, eng), abs=1e-12)


def test_angular_identity_and_exclusivity(eng):
    for state in random_game_states(np.random.default_rng(11), 5000, half_width=3.0):
        g1, g2 = relative_geometry(state, 1), relative_geometry(state, 2)
        assert g1.bearing + g2.aspect == pytest.approx(PI, abs=1e-9)
        assert g2.bearing + g1.aspect == pytest.approx(PI, abs=1e-9)
        assert check_terminal(state, eng) is not Outcome.DRAW


def test_shaping_and_shaped_bounds(eng):
    for state in random_game_states(np.random.default_rng(5), 5000, half_width=4.0):
        for player in (1, 2):
            s = shaping_term(state, player, eng)
            assert 0.0 <= s <= 1.0
            assert -eng.w <= shaped_reward(state, player, eng) <= 1.0


def test_shaping_sums_to_one_across_players(eng):
    # The angular identity makes the two shaping terms complementary.
    for state in random_game_states(np.random.default_rng(8), 500):
        assert shaping_term(state, 1, eng) + shaping_term(state, 2, eng) == pytest.approx(1.0, abs=1e-12)


@settings(max_examples=200, deadline=None)
@given(st.floats(0, 180), st.floats(0, 180))
def test_shaping_peak_at_zero_angles(bearing, aspect):
    eng = EngagementParams()
    assert shaping_term(place(bearing, aspect, eng.d_nom), 1, eng) <= shaping_term(place(0, 0, eng.d_nom), 1, eng)


def test_overlapping_cones_warn_and_draw():
    with pytest.warns(UserWarning):
        wide = EngagementParams(bearing_max=math.radians(100), aspect_max=math.radians(100))
    # Side by side, both heading +y: each sees the other abeam at 90/90.
    state = GameState(ac(0, 0, PI / 2), ac(1, 0, PI / 2))
    assert check_terminal(state, wide) is Outcome.DRAW


@pytest.mark.parametrize(
    "kwargs",
    [dict(d_min=0.0), dict(d_min=3.0, d_max=3.0), dict(r_d=0.0), dict(bearing_max=0.0),
     dict(aspect_max=PI), dict(w=1.0), dict(gamma=0.0), dict(gamma=1.1)],
)
def test_engagement_params_validation(kwargs):
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        with pytest.raises(ValueError):
            EngagementParams(**kwargs)


def test_transition_head_on_closure(params):
    state = GameState(ac(0, 0, 0), ac(7, 0, PI), 0)
    nxt = transition(state, JointManeuver(Maneuver.STRAIGHT, Maneuver.STRAIGHT), params, params)
    assert relative_geometry(nxt, 1).distance == pytest.approx(2.0, abs=1e-12)
    assert nxt.k == 1
    assert state == GameState(ac(0, 0, 0), ac(7, 0, PI), 0)


def test_transition_commutes_with_player_swap(params):
    slow = AircraftParams(zeta_dot=math.radians(22.5))
    for state in random_game_states(np.random.default_rng(2), 50):
        for m1 in Maneuver:
            for m2 in Maneuver:
                a = transition(state, (m1, m2), params, slow).swapped()
                b = transition(state.swapped(), (m2, m1), slow, params)
                assert a == b
