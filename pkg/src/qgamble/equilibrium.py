"""Nash point of the gambling game and numerical checks around it.

Bob maximizes his expected gain G(alpha, beta) over beta, Alice minimizes it
over alpha. The analytic saddle depends only on gamma; the guaranteed value
delta also depends on R. Everything else in this module is independent
numerics (grids, best-response searches, finite differences) used to certify
that point.
"""

from __future__ import annotations

import functools
import json
import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError
from .payoff import GameConfig, Strategy, gain_grid, gb_surface_value

BEST_RESPONSE_GRID = 1001
BRACKET_TOL = 1e-9
_INVPHI = (math.sqrt(5.0) - 1.0) / 2.0


@dataclass(frozen=True)
class NashPoint:
    alpha_star: float
    beta_star: float
    delta: float
    degenerate: bool = False

    def to_json(self, config: GameConfig) -> str:
        return json.dumps(
            {
                "gamma": config.gamma,
                "r": config.r_gain,
                "alpha_star": self.alpha_star,
                "beta_star": self.beta_star,
                "delta": self.delta,
            }
        )


@functools.lru_cache(maxsize=256)
def nash_point(config: GameConfig) -> NashPoint:
    """Closed-form saddle point.

    With s = sqrt(1 - gamma):
        alpha* = (1 - s) / 2
        beta*  = (gamma - 1 + s) / gamma = s / (1 + s)
        delta  = (2 + 2R - gamma(2 + R) - 2(1 + R)s) / gamma = (R - s(2 + R)) / (1 + s)
    The right-hand forms are algebraically identical and avoid cancellation
    as gamma -> 0. gamma == 1 is the flagged degenerate limit s = 0.
    """
    g, r = config.gamma, config.r_gain
    s = math.sqrt(1.0 - g)
    return NashPoint(
        alpha_star=(1.0 - s) / 2.0,
        beta_star=s / (1.0 + s),
        delta=(r - s * (2.0 + r)) / (1.0 + s),
        degenerate=g == 1.0,
    )


def gamma_for(delta: float, r_gain: float) -> float:
    """Committed-state weight that makes Bob's guaranteed gain equal ``delta``."""
    delta, r = float(delta), float(r_gain)
    if not delta > -1.0 or not math.isfinite(delta):
        raise DomainError(f"delta must exceed -1, got {delta!r}")
    if not (r > 0.0 and math.isfinite(r)):
        raise DomainError(f"r must be positive, got {r!r}")
    # G_b = R - (1 + R) p3 never exceeds R, so delta > R has no gamma. The
    # closed form is symmetric in (delta, R) and would return the mirror root.
    if delta > r:
        raise DomainError(f"delta {delta!r} exceeds r {r!r}; the largest attainable delta is r (gamma = 1)")
    if delta == r:
        return 1.0
    return min(1.0, 4.0 * (1.0 + delta) * (1.0 + r) / (2.0 + delta + r) ** 2)


def delta_of(config: GameConfig) -> float:
    return nash_point(config).delta


def _golden(f, lo: float, hi: float, tol: float = BRACKET_TOL) -> float:
    """Maximize f on [lo, hi] by golden-section search."""
    c = hi - _INVPHI * (hi - lo)
    d = lo + _INVPHI * (hi - lo)
    fc, fd = f(c), f(d)
    while hi - lo > tol:
        if fc >= fd:
            hi, d, fd = d, c, fc
            c = hi - _INVPHI * (hi - lo)
            fc = f(c)
        else:
            lo, c, fc = c, d, fd
            d = lo + _INVPHI * (hi - lo)
            fd = f(d)
    return (lo + hi) / 2.0


def _best_on_line(f_grid, f_point, sign: float) -> tuple[float, float]:
    """Search [0, 1] for the maximizer of sign * f.

    Exhaustive coarse grid first so a multimodal slice cannot trap the
    refinement in a local optimum, then golden section inside the cell pair
    around the best grid point. Ties go to the smaller coordinate.
    """
    xs = np.linspace(0.0, 1.0, BEST_RESPONSE_GRID)
    vals = sign * f_grid(xs)
    vals = np.where(np.isnan(vals), -np.inf, vals)
    i = int(np.argmax(vals))
    lo, hi = xs[max(i - 1, 0)], xs[min(i + 1, len(xs) - 1)]
    x_ref = _golden(lambda x: sign * f_point(x), float(lo), float(hi))

    best_x, best_v = float(xs[i]), float(vals[i])
    v_ref = sign * f_point(x_ref)
    if v_ref > best_v or (v_ref == best_v and x_ref < best_x):
        best_x, best_v = x_ref, v_ref
    return best_x, sign * best_v


def _gain_at(alpha: float, beta: float, g: float, r: float) -> float:
    # Scalar twin of gain_grid for the refinement loop; NaN where undefined.
    denom = 1.0 - g + beta * g
    if denom == 0.0:
        return r if alpha == 1.0 else math.nan
    p3 = min(1.0, (math.sqrt((1.0 - alpha) * (1.0 - g)) + beta * math.sqrt(g * alpha)) ** 2 / denom)
    return r - (1.0 + r) * p3


def best_response_beta(alpha: float, config: GameConfig) -> tuple[float, float]:
    """Bob's split ratio maximizing his gain against a fixed alpha."""
    Strategy(alpha, 0.0)
    g, r = config.gamma, config.r_gain

    def at(beta: float) -> float:
        v = _gain_at(alpha, beta, g, r)
        return -math.inf if math.isnan(v) else v

    return _best_on_line(lambda xs: gain_grid(alpha, xs, g, r), at, +1.0)


def best_response_alpha(beta: float, config: GameConfig) -> tuple[float, float]:
    """Alice's preparation weight minimizing Bob's gain against a fixed beta."""
    Strategy(0.0, beta)
    g, r = config.gamma, config.r_gain

    def at(alpha: float) -> float:
        v = _gain_at(alpha, beta, g, r)
        return math.inf if math.isnan(v) else v

    return _best_on_line(lambda xs: gain_grid(xs, beta, g, r), at, -1.0)


@dataclass(frozen=True)
class SaddleReport:
    grid_resolution: int
    worst_alpha_violation: float
    worst_beta_violation: float
    grid_saddle: tuple[float, float]
    analytic_saddle: tuple[float, float]
    delta: float
    tol: float
    table_saddle: tuple[float, float] = (math.nan, math.nan)

    @property
    def cell(self) -> float:
        return 1.0 / (self.grid_resolution - 1)

    def cells_off(self, point=None) -> tuple[float, float]:
        point = self.grid_saddle if point is None else point
        return tuple(abs(g - a) / self.cell for g, a in zip(point, self.analytic_saddle))

    @property
    def within_one_cell(self) -> bool:
        # A grid point exactly one cell away still counts despite rounding.
        return max(self.cells_off()) <= 1.0 + 1e-9

    @property
    def passed(self) -> bool:
        return (
            self.worst_alpha_violation <= self.tol
            and self.worst_beta_violation <= self.tol
            and self.within_one_cell
        )


def _responses(xs, config: GameConfig, gain, bob: bool) -> np.ndarray:
    g, r = config.gamma, config.r_gain
    out = np.empty(len(xs))
    for i, x in enumerate(map(float, xs)):
        if gain is gain_grid:
            out[i] = (best_response_beta(x, config) if bob else best_response_alpha(x, config))[1]
        else:
            fine = np.linspace(0.0, 1.0, BEST_RESPONSE_GRID)
            vals = gain(x, fine, g, r) if bob else gain(fine, x, g, r)
            out[i] = np.nanmax(vals) if bob else np.nanmin(vals)
    return out


def verify_saddle(config: GameConfig, grid_n: int = 101, tol: float = 1e-9, gain=gain_grid) -> SaddleReport:
    """Certify the analytic Nash point against a uniform grid.

    Bob's guarantee: holding beta*, no grid alpha pushes his gain below delta.
    Alice's guarantee: holding alpha*, no grid beta lifts it above delta.

    ``grid_saddle`` takes the outer coordinate on the grid and the inner
    response from the refined best-response search:
    (argmin_alpha max_beta G, argmax_beta min_alpha G). ``table_saddle`` does
    the same with both optimizations restricted to the grid table. It is
    reported but not judged: when G is flat along beta (small gamma), the
    inner grid's sampling error can move the table's argmax by a few cells.
    """
    if grid_n < 11:
        raise DomainError(f"grid_n must be at least 11, got {grid_n}")
    nash = nash_point(config)
    g, r = config.gamma, config.r_gain
    xs = np.linspace(0.0, 1.0, grid_n)

    along_alpha = gain(xs, nash.beta_star, g, r)
    along_beta = gain(nash.alpha_star, xs, g, r)
    alpha_violation = max(0.0, nash.delta - float(np.nanmin(along_alpha)))
    beta_violation = max(0.0, float(np.nanmax(along_beta)) - nash.delta)

    table = gain(xs[:, None], xs[None, :], g, r)
    table_saddle = (
        float(xs[int(np.argmin(np.nanmax(table, axis=1)))]),
        float(xs[int(np.argmax(np.nanmin(table, axis=0)))]),
    )
    upper = _responses(xs, config, gain, bob=True)
    lower = _responses(xs, config, gain, bob=False)
    grid_saddle = (float(xs[int(np.argmin(upper))]), float(xs[int(np.argmax(lower))]))

    return SaddleReport(
        grid_resolution=grid_n,
        worst_alpha_violation=alpha_violation,
        worst_beta_violation=beta_violation,
        grid_saddle=grid_saddle,
        analytic_saddle=(nash.alpha_star, nash.beta_star),
        delta=nash.delta,
        tol=tol,
        table_saddle=table_saddle,
    )


def stationarity_check(config: GameConfig, h: float = 1e-5) -> tuple[float, float] | None:
    """Central differences of G at the Nash point; None if the point is on the boundary."""
    if not 1e-7 <= h <= 1e-3:
        raise DomainError(f"step h must lie in [1e-7, 1e-3], got {h!r}")
    nash = nash_point(config)
    a, b = nash.alpha_star, nash.beta_star
    if not (h < a < 1.0 - h and h < b < 1.0 - h):
        return None

    def G(alpha, beta):
        return gb_surface_value(Strategy(alpha, beta), config)

    d_alpha = (G(a + h, b) - G(a - h, b)) / (2.0 * h)
    d_beta = (G(a, b + h) - G(a, b - h)) / (2.0 * h)
    return d_alpha, d_beta


@dataclass(frozen=True)
class SurfaceTable:
    config: GameConfig
    alpha: np.ndarray
    beta: np.ndarray
    gb: np.ndarray  # shape (len(alpha), len(beta))

    def __len__(self) -> int:
        return self.gb.size

    def rows(self):
        """(alpha, beta, gb) in row-major order, alpha outermost."""
        for i, a in enumerate(self.alpha):
            for j, b in enumerate(self.beta):
                yield float(a), float(b), float(self.gb[i, j])


def _check_grid(name: str, grid) -> np.ndarray:
    arr = np.asarray(grid, dtype=float).ravel()
    if arr.size == 0:
        raise DomainError(f"{name} grid is empty")
    if np.any(np.isnan(arr)) or arr.min() < 0.0 or arr.max() > 1.0:
        raise DomainError(f"{name} grid must lie within [0, 1]")
    if np.any(np.diff(arr) < 0):
        raise DomainError(f"{name} grid must be sorted")
    return arr


def surface(config: GameConfig, alpha_grid, beta_grid) -> SurfaceTable:
    alpha = _check_grid("alpha", alpha_grid)
    beta = _check_grid("beta", beta_grid)
    gb = gain_grid(alpha[:, None], beta[None, :], config.gamma, config.r_gain)
    return SurfaceTable(config, alpha, beta, gb)
