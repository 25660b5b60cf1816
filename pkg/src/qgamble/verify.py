"""Invariant suites behind ``qgamble verify``.

Each suite returns a :class:`SuiteResult` with the worst violation it saw and
the parameter tuple where that happened. The gain model is injectable so the
suite can prove it rejects the sign-flipped closed form.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .equilibrium import delta_of, gamma_for, stationarity_check, verify_saddle
from .errors import DomainError
from .payoff import GameConfig, OutcomeProbs, Strategy, gain_grid, outcome_probs, printed_gain_grid
from .qstate import collapse_b, overlap, prepare_alice, prob_in_b, reduced_committed, split_b
from .rng import RandomStream

GainModel = Callable[..., np.ndarray]
GAIN_MODELS: dict[str, GainModel] = {"probability": gain_grid, "printed": printed_gain_grid}

ANCHOR = (1.0 / 3.0, 0.25, 8.0 / 9.0, 1.0)


def pipeline_probs(strategy: Strategy, config: GameConfig) -> OutcomeProbs:
    """Outcome probabilities from the state-vector engine alone (no closed forms)."""
    split = split_b(prepare_alice(strategy.alpha), strategy.beta)
    p1 = prob_in_b(split)
    p_empty = 1.0 - p1
    if p_empty == 0.0:
        return OutcomeProbs(p1, 0.0, 0.0)
    post = collapse_b(split, found=False)
    target = reduced_committed(config.gamma, strategy.beta)
    p3 = min(p_empty, p_empty * abs(overlap(target, post)) ** 2)
    return OutcomeProbs(p1, p_empty - p3, p3)


@dataclass
class SuiteResult:
    name: str
    checked: int
    worst: float
    tol: float
    where: tuple = ()

    @property
    def passed(self) -> bool:
        return self.worst <= self.tol

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        at = "" if self.passed or not self.where else " at " + ", ".join(f"{k}={v!r}" for k, v in self.where)
        return f"[{status}] {self.name}: {self.checked} checks, worst {self.worst:.3e} (tol {self.tol:.0e}){at}"


def random_configs(k: int, seed: int) -> list[GameConfig]:
    rng = RandomStream(seed)
    return [GameConfig(0.1 + 0.85 * rng.random(), 0.25 + 4.75 * rng.random()) for _ in range(k)]


def anchor_suite(gain: GainModel) -> SuiteResult:
    """The fair anchor must give exactly zero, and must not agree with the as-printed value."""
    a, b, g, r = ANCHOR
    value = float(gain(a, b, g, r))
    printed = float(printed_gain_grid(a, b, g, r))
    worst = abs(value)
    if math.isclose(value, printed, abs_tol=1e-9):
        worst = max(worst, abs(printed))
    return SuiteResult("fair anchor G(1/3, 1/4; 8/9, 1) = 0", 1, worst, 1e-12, (("alpha", a), ("beta", b), ("gamma", g), ("r", r)))


def simplex_suite(configs, rng: RandomStream, per_config: int = 200) -> SuiteResult:
    res = SuiteResult("probability simplex", 0, 0.0, 1e-12)
    for cfg in configs:
        for _ in range(per_config):
            s = Strategy(rng.random(), rng.random())
            try:
                p = outcome_probs(s, cfg)
                err = abs(math.fsum((p.p1, p.p2, p.p3)) - 1.0)
            except (DomainError, ArithmeticError):
                err = math.inf
            res.checked += 1
            if err > res.worst:
                res.worst, res.where = err, (("gamma", cfg.gamma), ("r", cfg.r_gain), ("alpha", s.alpha), ("beta", s.beta))
    return res


def oracle_suite(configs, rng: RandomStream, per_config: int = 100) -> SuiteResult:
    res = SuiteResult("closed form vs state-vector pipeline", 0, 0.0, 1e-10)
    for cfg in configs:
        for _ in range(per_config):
            s = Strategy(rng.random(), rng.random())
            a, b = outcome_probs(s, cfg), pipeline_probs(s, cfg)
            err = max(abs(a.p1 - b.p1), abs(a.p2 - b.p2), abs(a.p3 - b.p3))
            res.checked += 1
            if err > res.worst:
                res.worst, res.where = err, (("gamma", cfg.gamma), ("r", cfg.r_gain), ("alpha", s.alpha), ("beta", s.beta))
    return res


def saddle_suite(configs, grid_n: int, gain: GainModel, tol: float = 1e-9) -> SuiteResult:
    res = SuiteResult(f"saddle certificate ({grid_n}x{grid_n} grid)", 0, 0.0, tol)
    for cfg in configs:
        rep = verify_saddle(cfg, grid_n, tol, gain=gain)
        err = max(rep.worst_alpha_violation, rep.worst_beta_violation)
        if not rep.within_one_cell:
            off = max(abs(x - y) for x, y in zip(rep.grid_saddle, rep.analytic_saddle))
            err = max(err, off)
        res.checked += 1
        if err > res.worst:
            res.worst = err
            res.where = (("gamma", cfg.gamma), ("r", cfg.r_gain), ("alpha", rep.analytic_saddle[0]), ("beta", rep.analytic_saddle[1]))
    return res


def roundtrip_suite(configs) -> SuiteResult:
    res = SuiteResult("gamma_for(delta_of(gamma, R), R) = gamma", 0, 0.0, 1e-10)
    for cfg in configs:
        err = abs(gamma_for(delta_of(cfg), cfg.r_gain) - cfg.gamma)
        res.checked += 1
        if err > res.worst:
            res.worst, res.where = err, (("gamma", cfg.gamma), ("r", cfg.r_gain))
    return res


def stationarity_suite(configs, h: float = 1e-5) -> SuiteResult:
    res = SuiteResult("finite-difference stationarity at the Nash point", 0, 0.0, 10 * h)
    for cfg in configs:
        d = stationarity_check(cfg, h)
        if d is None:
            continue
        err = max(abs(d[0]), abs(d[1]))
        res.checked += 1
        if err > res.worst:
            res.worst, res.where = err, (("gamma", cfg.gamma), ("r", cfg.r_gain))
    return res


def run_all(k: int, grid_n: int, seed: int, gain_model: str = "probability") -> list[SuiteResult]:
    if k < 1:
        raise DomainError(f"need at least one config, got {k}")
    gain = GAIN_MODELS[gain_model]
    configs = random_configs(k, seed)
    rng = RandomStream(seed).derive(1)
    return [
        anchor_suite(gain),
        simplex_suite(configs, rng),
        oracle_suite(configs, rng),
        saddle_suite(configs, grid_n, gain),
        roundtrip_suite(configs),
        stationarity_suite(configs),
    ]
