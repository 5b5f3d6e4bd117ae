"""Core market and portfolio value types.

All types are plain immutable values: construction validates, after that
they are safe to share. Asset-keyed mappings are stored as ordinary dicts
built at construction time; the insertion order is the market's canonical
asset order and is relied on by rendering and serialization.
"""

from __future__ import annotations

import datetime as dt
from dataclasses import dataclass, field
from enum import Enum
from typing import Mapping

from .errors import WrongMarketKind

__all__ = [
    "CASH",
    "MarketKind",
    "PredictionPair",
    "MarketSpec",
    "PricePoint",
    "PriceVector",
    "Holdings",
    "AllocationVector",
    "TradeDelta",
    "NewsItem",
    "Observation",
]

CASH = "CASH"

# Default equity universe used when a run config does not name one.
DEFAULT_STOCK_TICKERS = (
    "AAPL", "MSFT", "NVDA", "JPM", "V", "JNJ", "UNH", "PG",
    "KO", "XOM", "CAT", "WMT", "META", "TSLA", "AMZN",
)

ALLOCATION_SUM_TOL = 1e-9


class MarketKind(Enum):
    STOCK = "stock"
    PREDICTION = "prediction"


@dataclass(frozen=True)
class PredictionPair:
    """One binary question and its two outcome asset ids."""

    question: str
    yes: str
    no: str


@dataclass(frozen=True)
class MarketSpec:
    """Tradable universe for one session.

    Cash is a first-class asset: it appears in ``assets``, carries price
    1.0 forever, and absorbs unallocated weight. For prediction markets
    every non-cash asset belongs to exactly one yes/no pair and the
    per-step risk-free rate is zero by construction.
    """

    kind: MarketKind
    assets: tuple[str, ...]
    cash: str = CASH
    pairs: tuple[PredictionPair, ...] = ()
    risk_free_rate: float = 0.0

    def __post_init__(self) -> None:
        if not self.assets:
            raise ValueError("market needs at least one asset")
        if any(not a for a in self.assets):
            raise ValueError("asset ids must be non-empty")
        if len(set(self.assets)) != len(self.assets):
            raise ValueError("asset ids must be unique")
        if self.cash not in self.assets:
            raise ValueError(f"cash asset {self.cash!r} missing from universe")
        if self.kind is MarketKind.PREDICTION:
            if self.risk_free_rate != 0.0:
                raise ValueError("prediction markets have zero risk-free rate")
            outcomes = [a for a in self.assets if a != self.cash]
            paired = [a for p in self.pairs for a in (p.yes, p.no)]
            if sorted(outcomes) != sorted(paired):
                raise ValueError("every non-cash asset must belong to exactly one pair")
            if len(self.assets) != 2 * len(self.pairs) + 1:
                raise ValueError("prediction universe must be 2 assets per question plus cash")
        elif self.pairs:
            raise ValueError("stock markets have no outcome pairs")

    @classmethod
    def stock(
        cls,
        tickers: tuple[str, ...] | list[str] = DEFAULT_STOCK_TICKERS,
        cash: str = CASH,
        risk_free_rate: float = 0.0,
    ) -> "MarketSpec":
        return cls(MarketKind.STOCK, tuple(tickers) + (cash,), cash=cash,
                   risk_free_rate=risk_free_rate)

    @classmethod
    def prediction(cls, questions: tuple[str, ...] | list[str], cash: str = CASH) -> "MarketSpec":
        pairs = tuple(
            PredictionPair(q, f"{q}_Yes", f"{q}_No") for q in questions
        )
        assets = tuple(a for p in pairs for a in (p.yes, p.no)) + (cash,)
        return cls(MarketKind.PREDICTION, assets, cash=cash, pairs=pairs)

    @property
    def questions(self) -> tuple[str, ...]:
        return tuple(p.question for p in self.pairs)

    def pair_for(self, question: str) -> PredictionPair:
        if self.kind is not MarketKind.PREDICTION:
            raise WrongMarketKind("outcome pairs only exist on prediction markets")
        for p in self.pairs:
            if p.question == question:
                return p
        raise KeyError(question)


@dataclass(frozen=True)
class PricePoint:
    """One stored close for one asset."""

    date: dt.date
    price: float
    volume: float | None = None

    def __post_init__(self) -> None:
        if not self.price > 0:
            raise ValueError(f"price must be positive, got {self.price}")


@dataclass(frozen=True)
class PriceVector:
    """Prices for every asset in the universe on one calendar date."""

    date: dt.date
    prices: Mapping[str, float]
    timezone: str = "UTC"

    def __post_init__(self) -> None:
        object.__setattr__(self, "prices", dict(self.prices))
        for asset, price in self.prices.items():
            if not price > 0:
                raise ValueError(f"non-positive price for {asset}: {price}")

    def __getitem__(self, asset: str) -> float:
        return self.prices[asset]


@dataclass(frozen=True)
class Holdings:
    """Units held per asset. Long-only: every entry is non-negative."""

    units: Mapping[str, float]

    def __post_init__(self) -> None:
        object.__setattr__(self, "units", dict(self.units))
        for asset, n in self.units.items():
            if n < 0:
                raise ValueError(f"negative holding for {asset}: {n}")

    def __getitem__(self, asset: str) -> float:
        return self.units[asset]


@dataclass(frozen=True)
class AllocationVector:
    """Target portfolio weights on the probability simplex.

    Direct construction requires weights that already sum to one within
    ``ALLOCATION_SUM_TOL``; arbitrary model output goes through the
    accounting engine's ``validate_allocation`` instead, which imputes,
    renormalizes, and enforces the market's pairing rules.
    """

    weights: Mapping[str, float]

    def __post_init__(self) -> None:
        object.__setattr__(self, "weights", dict(self.weights))
        total = 0.0
        for asset, w in self.weights.items():
            if w < 0:
                raise ValueError(f"negative weight for {asset}: {w}")
            total += w
        if abs(total - 1.0) > ALLOCATION_SUM_TOL:
            raise ValueError(f"weights sum to {total!r}, not 1 within {ALLOCATION_SUM_TOL}")

    def __getitem__(self, asset: str) -> float:
        return self.weights[asset]


@dataclass(frozen=True)
class TradeDelta:
    """Signed unit changes implied by one rebalance: q_next - q_prev."""

    deltas: Mapping[str, float]

    def __post_init__(self) -> None:
        object.__setattr__(self, "deltas", dict(self.deltas))

    def __getitem__(self, asset: str) -> float:
        return self.deltas[asset]

    def side(self, asset: str) -> str:
        d = self.deltas[asset]
        if d > 0:
            return "BUY"
        if d < 0:
            return "SELL"
        return "HOLD"


@dataclass(frozen=True)
class NewsItem:
    """One normalized news result tagged to a ticker or question."""

    title: str
    snippet: str
    source: str
    url: str
    published_at: int  # UNIX seconds, always valid: undated items are dropped upstream
    tagged_asset: str


@dataclass(frozen=True)
class Observation:
    """Everything an agent may see when deciding at one date.

    ``price_history`` maps asset id to the stored closes inside the
    lookback window that ends the day before ``date``; the current price
    itself lives in ``prices``. ``stale`` lists assets whose price was
    carried forward from an earlier date.
    """

    step: int
    date: dt.date
    positions: Holdings
    prices: PriceVector
    news: tuple[NewsItem, ...]
    price_history: Mapping[str, tuple[PricePoint, ...]]
    portfolio_value: float
    stale: frozenset[str] = field(default_factory=frozenset)

    def __post_init__(self) -> None:
        object.__setattr__(
            self, "price_history",
            {a: tuple(pts) for a, pts in dict(self.price_history).items()},
        )
