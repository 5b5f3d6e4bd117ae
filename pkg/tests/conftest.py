"""Shared fixtures and the golden-file helper."""

from __future__ import annotations

import datetime as dt
import os
from pathlib import Path

import pytest

from tradefolio.domain import Holdings, MarketSpec, NewsItem, Observation, PricePoint, PriceVector

REPO = Path(__file__).resolve().parent.parent
FIXTURES = REPO / "fixtures"
GOLDENS = Path(__file__).resolve().parent / "goldens"


def assert_golden(name: str, text: str) -> None:
    """Compare against a committed golden file, byte for byte.

    Set UPDATE_GOLDENS=1 to rewrite the files after an intentional
    rendering change.
    """
    path = GOLDENS / name
    if os.environ.get("UPDATE_GOLDENS") == "1":
        GOLDENS.mkdir(exist_ok=True)
        path.write_text(text, encoding="utf-8")
    assert path.exists(), f"missing golden {path}; run with UPDATE_GOLDENS=1 once"
    expected = path.read_text(encoding="utf-8")
    assert text == expected, (
        f"output no longer matches goldens/{name}; "
        "if the change is intentional, regenerate with UPDATE_GOLDENS=1"
    )


@pytest.fixture
def stock_spec() -> MarketSpec:
    return MarketSpec.stock(("AAPL", "MSFT", "NVDA"))


@pytest.fixture
def prediction_spec() -> MarketSpec:
    return MarketSpec.prediction((
        "Will the launch happen this quarter?",
        "Will turnout exceed sixty percent?",
    ))


def make_observation(
    spec: MarketSpec,
    date: dt.date,
    prices: dict[str, float],
    history: dict[str, list[tuple[str, float]]] | None = None,
    news: tuple[NewsItem, ...] = (),
    holdings: Holdings | None = None,
    step: int = 0,
) -> Observation:
    """Observation builder for prompt and feature tests."""
    if holdings is None:
        holdings = Holdings({a: (1000.0 if a == spec.cash else 0.0) for a in spec.assets})
    full_prices = dict(prices)
    full_prices.setdefault(spec.cash, 1.0)
    price_history = {
        asset: tuple(PricePoint(dt.date.fromisoformat(d), p) for d, p in points)
        for asset, points in (history or {}).items()
    }
    value = sum(holdings.units[a] * full_prices[a] for a in holdings.units)
    return Observation(
        step=step,
        date=date,
        positions=holdings,
        prices=PriceVector(date, full_prices),
        news=news,
        price_history=price_history,
        portfolio_value=value,
        stale=frozenset(),
    )
