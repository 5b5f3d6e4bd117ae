"""Quantitative features derived from one observation.

The prompt builders render exactly what this module computes, so a test
that pins a change line here also pins the prompt text.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Mapping

from ..domain import MarketKind, MarketSpec, NewsItem, Observation

__all__ = [
    "PriceChange",
    "AssetSummary",
    "FeatureBundle",
    "extract_features",
    "format_change",
]


@dataclass(frozen=True)
class PriceChange:
    """Day-over-day move: absolute difference and percent of the prior close."""

    absolute: float
    percent: float


@dataclass(frozen=True)
class AssetSummary:
    """Mean and sample deviation of daily returns over the lookback window."""

    mean_return: float | None
    return_volatility: float | None


@dataclass(frozen=True)
class FeatureBundle:
    changes: Mapping[str, PriceChange | None]
    summaries: Mapping[str, AssetSummary]
    news_by_tag: Mapping[str, tuple[NewsItem, ...]]

    def __post_init__(self) -> None:
        object.__setattr__(self, "changes", dict(self.changes))
        object.__setattr__(self, "summaries", dict(self.summaries))
        object.__setattr__(
            self, "news_by_tag",
            {t: tuple(items) for t, items in dict(self.news_by_tag).items()},
        )


def _change(current: float, previous: float) -> PriceChange:
    diff = current - previous
    return PriceChange(absolute=diff, percent=diff / previous * 100.0)


def _summary(closes: list[float]) -> AssetSummary:
    if len(closes) < 2:
        return AssetSummary(None, None)
    rets = [(closes[i] - closes[i - 1]) / closes[i - 1] for i in range(1, len(closes))]
    mean = sum(rets) / len(rets)
    if len(rets) < 2:
        return AssetSummary(mean, None)
    var = sum((r - mean) ** 2 for r in rets) / (len(rets) - 1)
    return AssetSummary(mean, math.sqrt(var))


def extract_features(spec: MarketSpec, obs: Observation) -> FeatureBundle:
    """Per-asset changes and return summaries, news grouped by tag.

    The change for an asset compares today's price with the most recent
    stored close before today; with no history the change is None and
    renders as "N/A". News tags are tickers on stock markets and question
    ids on prediction markets, in universe order; tags without items are
    dropped.
    """
    changes: dict[str, PriceChange | None] = {}
    summaries: dict[str, AssetSummary] = {}
    for asset in spec.assets:
        if asset == spec.cash:
            continue
        history = obs.price_history.get(asset, ())
        current = obs.prices[asset]
        if history:
            changes[asset] = _change(current, history[-1].price)
        else:
            changes[asset] = None
        summaries[asset] = _summary([pt.price for pt in history] + [current])

    if spec.kind is MarketKind.PREDICTION:
        tags = list(spec.questions)
    else:
        tags = [a for a in spec.assets if a != spec.cash]
    grouped: dict[str, tuple[NewsItem, ...]] = {}
    for tag in tags:
        items = tuple(item for item in obs.news if item.tagged_asset == tag)
        if items:
            grouped[tag] = items
    return FeatureBundle(changes=changes, summaries=summaries, news_by_tag=grouped)


def format_change(change: PriceChange | None, decimals: int = 2) -> str:
    """Render a day-over-day move the way prompts show it, e.g. "+3.94 (+1.52%)"."""
    if change is None:
        return "N/A"
    return f"{change.absolute:+.{decimals}f} ({change.percent:+.2f}%)"
