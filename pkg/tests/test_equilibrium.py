import math

import numpy as np
import pytest
import sympy as sp
from hypothesis import given, settings
from hypothesis import strategies as st

from qgamble.equilibrium import (
    best_response_alpha,
    best_response_beta,
    delta_of,
    gamma_for,
    nash_point,
    stationarity_check,
    surface,
    verify_saddle,
)
from qgamble.errors import DomainError
from qgamble.payoff import GameConfig, gain_grid, printed_gain_grid

A, B = sp.symbols("alpha beta", positive=True)


def symbolic_gain(gamma, r):
    g, r = sp.Rational(gamma), sp.Rational(r)
    p3 = (sp.sqrt((1 - A) * (1 - g)) + B * sp.sqrt(g * A)) ** 2 / (1 - g + B * g)
    return r - (1 + r) * p3


@pytest.mark.parametrize("gamma,r", [("8/9", "1"), ("3/4", "2"), ("1/2", "1/3"), ("5/9", "5")])
def test_nash_point_is_symbolic_critical_point(gamma, r):
    cfg = GameConfig(float(sp.Rational(gamma)), float(sp.Rational(r)))
    nash = nash_point(cfg)
    G = symbolic_gain(gamma, r)
    s = sp.sqrt(1 - sp.Rational(gamma))
    a_star, b_star = (1 - s) / 2, s / (1 + s)
    for var in (A, B):
        grad = sp.diff(G, var).subs({A: a_star, B: b_star})
        assert abs(float(sp.N(grad, 30))) < 1e-25
    assert nash.alpha_star == pytest.approx(float(a_star), abs=1e-14)
    assert nash.beta_star == pytest.approx(float(b_star), abs=1e-14)
    assert nash.delta == pytest.approx(float(sp.N(G.subs({A: a_star, B: b_star}), 30)), abs=1e-14)


def test_fair_anchor():
    n = nash_point(GameConfig(8 / 9, 1.0))
    assert (n.alpha_star, n.beta_star, n.delta) == pytest.approx((1 / 3, 0.25, 0.0), abs=1e-12)
    assert not n.degenerate
    assert '"alpha_star"' in n.to_json(GameConfig(8 / 9, 1.0))


def test_limits():
    top = nash_point(GameConfig(1.0, 2.0))
    assert top.degenerate and (top.alpha_star, top.beta_star, top.delta) == (0.5, 0.0, 2.0)
    low = nash_point(GameConfig(1e-12, 1.0))
    assert low.alpha_star == pytest.approx(0.0, abs=1e-11)
    assert low.beta_star == pytest.approx(0.5, abs=1e-11)
    assert low.delta == pytest.approx(-1.0, abs=1e-11)


def test_gamma_for_anchor_and_domain():
    assert gamma_for(0.0, 1.0) == pytest.approx(8 / 9, abs=1e-12)
    assert gamma_for(2.0, 2.0) == 1.0
    for bad in ((-1.0, 1.0), (math.nan, 1.0), (0.0, 0.0), (0.0, -1.0), (1.0, 0.5)):
        with pytest.raises(DomainError):
            gamma_for(*bad)


@given(st.floats(0.001, 1.0), st.floats(0.05, 20))
def test_gamma_delta_roundtrip(gamma, r):
    cfg = GameConfig(gamma, r)
    assert gamma_for(delta_of(cfg), r) == pytest.approx(gamma, abs=1e-10)


@given(st.floats(-0.99, 5.0), st.floats(0.05, 10))
def test_delta_gamma_roundtrip(delta, r):
    if delta > r:
        with pytest.raises(DomainError):
            gamma_for(delta, r)
        return
    g = gamma_for(delta, r)
    assert delta_of(GameConfig(g, r)) == pytest.approx(delta, abs=1e-9)


@settings(max_examples=30, deadline=None)
@given(st.floats(0.05, 0.95), st.floats(0.0, 1.0), st.floats(0.25, 5))
def test_best_responses_beat_dense_grid(gamma, x, r):
    cfg = GameConfig(gamma, r)
    fine = np.linspace(0.0, 1.0, 20001)
    _, gb = best_response_beta(x, cfg)
    assert gb >= np.nanmax(gain_grid(x, fine, gamma, r)) - 1e-12
    _, ga = best_response_alpha(x, cfg)
    assert ga <= np.nanmin(gain_grid(fine, x, gamma, r)) + 1e-12


def test_best_responses_at_anchor():
    cfg = GameConfig(8 / 9, 1.0)
    beta, gb = best_response_beta(1 / 3, cfg)
    assert beta == pytest.approx(0.25, abs=1e-6) and gb == pytest.approx(0.0, abs=1e-12)
    alpha, ga = best_response_alpha(0.25, cfg)
    assert alpha == pytest.approx(1 / 3, abs=1e-6) and ga == pytest.approx(0.0, abs=1e-12)


@pytest.mark.parametrize("gamma,r", [(8 / 9, 1.0), (0.1, 0.25), (0.95, 5.0), (0.3, 2.0)])
def test_verify_saddle_passes(gamma, r):
    rep = verify_saddle(GameConfig(gamma, r))
    assert rep.passed
    assert max(rep.worst_alpha_violation, rep.worst_beta_violation) <= 1e-9
    assert max(rep.cells_off()) <= 1.0 + 1e-9


def test_verify_saddle_rejects_printed_model():
    rep = verify_saddle(GameConfig(8 / 9, 1.0), gain=printed_gain_grid)
    assert not rep.passed


def test_verify_saddle_grid_domain():
    with pytest.raises(DomainError):
        verify_saddle(GameConfig(0.5), grid_n=5)


def test_stationarity():
    d = stationarity_check(GameConfig(0.6, 1.5), 1e-5)
    assert max(map(abs, d)) < 1e-4
    assert stationarity_check(GameConfig(1.0, 1.0)) is None
    with pytest.raises(DomainError):
        stationarity_check(GameConfig(0.5), 1.0)


def test_surface_shape_order_and_validation():
    cfg = GameConfig(8 / 9, 1.0)
    t = surface(cfg, [0.0, 0.5, 1.0], [0.0, 1.0])
    assert len(t) == 6 and t.gb.shape == (3, 2)
    rows = list(t.rows())
    assert [r[:2] for r in rows[:2]] == [(0.0, 0.0), (0.0, 1.0)]
    for bad in ([], [0.5, 0.2], [-0.1, 0.5], [0.2, 1.5]):
        with pytest.raises(DomainError):
            surface(cfg, bad, [0.5])


def test_second_rational_nash_point():
    n = nash_point(GameConfig(0.75, 2.0))
    assert (n.alpha_star, n.beta_star, n.delta) == pytest.approx((0.25, 1 / 3, 0.0), abs=1e-12)
    assert verify_saddle(GameConfig(0.75, 2.0)).passed


def test_best_reply_to_alpha_star_earns_delta():
    from qgamble.verify import random_configs

    for cfg in random_configs(20, 3):
        n = nash_point(cfg)
        assert best_response_beta(n.alpha_star, cfg)[1] == pytest.approx(n.delta, abs=1e-8)
        assert best_response_alpha(n.beta_star, cfg)[1] == pytest.approx(n.delta, abs=1e-8)


def test_designed_bias_on_fine_grid():
    cfg = GameConfig(gamma_for(0.1, 1.5), 1.5)
    rep = verify_saddle(cfg, grid_n=201)
    assert rep.passed and rep.delta == pytest.approx(0.1, abs=1e-9)


def test_singleton_surface_at_anchor():
    t = surface(GameConfig(8 / 9, 1.0), [1 / 3], [0.25])
    (row,) = list(t.rows())
    assert row[2] == pytest.approx(0.0, abs=1e-12)
