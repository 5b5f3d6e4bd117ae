"""Performance metrics over portfolio value series.

Conventions, applied uniformly:

* A value series of n points yields T = n - 1 simple returns
  r_t = (v_t - v_{t-1}) / v_{t-1}.
* Nothing is annualized; the Sharpe ratio is per rebalancing step and
  its risk-free rate must be quoted per step as well.
* Volatility is the sample standard deviation (denominator T - 1).
* Zero volatility makes the Sharpe ratio undefined; it is reported as
  None, never coerced to 0 or infinity.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .domain import Holdings, PriceVector
from .errors import (
    EmptySeries,
    LagTooLarge,
    MisalignedHistories,
    NonPositiveStart,
    SeriesTooShort,
    ZeroValuePortfolio,
)

__all__ = [
    "ReturnSeries",
    "cumulative_return",
    "max_drawdown",
    "win_rate",
    "volatility",
    "sharpe_ratio",
    "MetricsReport",
    "rolling_k_delta",
]


@dataclass(frozen=True)
class ReturnSeries:
    """Per-step simple returns plus the per-step risk-free rate."""

    returns: tuple[float, ...]
    risk_free_rate: float = 0.0

    @classmethod
    def from_values(cls, values: Sequence[float], risk_free_rate: float = 0.0) -> "ReturnSeries":
        if len(values) < 2:
            raise SeriesTooShort(f"need at least 2 values, got {len(values)}")
        for i, v in enumerate(values):
            if not v > 0:
                raise ValueError(f"portfolio values must be positive, got {v} at index {i}")
        rets = tuple(
            (values[t] - values[t - 1]) / values[t - 1] for t in range(1, len(values))
        )
        return cls(rets, risk_free_rate)

    @property
    def mean(self) -> float:
        if not self.returns:
            raise EmptySeries("no returns")
        return float(np.mean(self.returns))


def cumulative_return(values: Sequence[float]) -> float:
    """Total growth over the series: (v_T - v_0) / v_0."""
    if len(values) < 2:
        raise SeriesTooShort(f"need at least 2 values, got {len(values)}")
    if not values[0] > 0:
        raise NonPositiveStart(f"series starts at {values[0]}")
    return (values[-1] - values[0]) / values[0]


def max_drawdown(values: Sequence[float]) -> float:
    """Largest peak-to-trough loss as a fraction of the running peak."""
    if len(values) == 0:
        raise EmptySeries("no values")
    arr = np.asarray(values, dtype=float)
    if not (arr > 0).all():
        raise ValueError("portfolio values must be positive")
    peaks = np.maximum.accumulate(arr)
    return float(((peaks - arr) / peaks).max())


def win_rate(series: ReturnSeries) -> float:
    """Fraction of steps with strictly positive return."""
    if not series.returns:
        raise EmptySeries("no returns")
    wins = sum(1 for r in series.returns if r > 0)
    return wins / len(series.returns)


def volatility(series: ReturnSeries) -> float:
    """Sample standard deviation of per-step returns (ddof = 1)."""
    if len(series.returns) < 2:
        raise SeriesTooShort(f"need at least 2 returns, got {len(series.returns)}")
    return float(np.std(series.returns, ddof=1))


def sharpe_ratio(series: ReturnSeries) -> float | None:
    """Per-step excess return over volatility; None when volatility is 0."""
    sigma = volatility(series)
    if sigma == 0.0:
        return None
    return (series.mean - series.risk_free_rate) / sigma


@dataclass(frozen=True)
class MetricsReport:
    """The five headline metrics for one session.

    All fields are dimensionless ratios; ``sharpe`` is None when the
    return series has zero volatility.
    """

    cumulative_return: float
    sharpe: float | None
    max_drawdown: float
    win_rate: float
    volatility: float

    @classmethod
    def from_values(cls, values: Sequence[float], risk_free_rate: float = 0.0) -> "MetricsReport":
        series = ReturnSeries.from_values(values, risk_free_rate)
        return cls(
            cumulative_return=cumulative_return(values),
            sharpe=sharpe_ratio(series),
            max_drawdown=max_drawdown(values),
            win_rate=win_rate(series),
            volatility=volatility(series),
        )


def _history_matrices(
    holdings_history: Sequence[Holdings],
    prices_history: Sequence[PriceVector],
) -> tuple[list[str], np.ndarray, np.ndarray]:
    if len(holdings_history) != len(prices_history):
        raise MisalignedHistories(
            f"{len(holdings_history)} holdings vs {len(prices_history)} price vectors"
        )
    if len(holdings_history) == 0:
        raise MisalignedHistories("empty histories")
    assets = list(prices_history[0].prices)
    key_set = set(assets)
    for h, p in zip(holdings_history, prices_history):
        if set(h.units) != key_set or set(p.prices) != key_set:
            raise MisalignedHistories("asset keys differ across the histories")
    q = np.array([[h.units[a] for a in assets] for h in holdings_history])
    p = np.array([[pv.prices[a] for a in assets] for pv in prices_history])
    return assets, q, p


def rolling_k_delta(
    holdings_history: Sequence[Holdings],
    prices_history: Sequence[PriceVector],
    k: int,
) -> float:
    """Compounded cost (or gain) of acting k steps late.

    Replays the session with every position lagged by k steps: the
    return earned over step t -> t+1 becomes the one the portfolio held
    at t-k would have earned. Both the lagged and the unlagged variants
    are compounded over the same window t in [k, T-k-1] (T = number of
    steps), and the delta is lagged minus unlagged. k = 0 is identically
    zero; a window that would be empty raises ``LagTooLarge``.
    """
    if k < 0:
        raise ValueError(f"lag must be non-negative, got {k}")
    _, q, p = _history_matrices(holdings_history, prices_history)
    steps = len(q) - 1
    if 2 * k + 1 > steps:
        raise LagTooLarge(f"lag {k} leaves no window in {steps} steps")

    def compounded(lag: int) -> float:
        growth = 1.0
        for t in range(k, steps - k):
            held = q[t - lag]
            base = float(held @ p[t])
            if base == 0.0:
                raise ZeroValuePortfolio(f"zero-value position at step {t}")
            step_return = float(held @ (p[t + 1] - p[t])) / base
            growth *= 1.0 + step_return
        return growth - 1.0

    return compounded(k) - compounded(0)
