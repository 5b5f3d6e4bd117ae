import datetime as dt

import pytest

from tradefolio.domain import (
    CASH,
    DEFAULT_STOCK_TICKERS,
    AllocationVector,
    Holdings,
    MarketKind,
    MarketSpec,
    PricePoint,
    PriceVector,
    TradeDelta,
)
from tradefolio.errors import WrongMarketKind


class TestMarketSpec:
    def test_default_stock_universe_order(self):
        spec = MarketSpec.stock()
        assert spec.assets == (
            "AAPL", "MSFT", "NVDA", "JPM", "V", "JNJ", "UNH", "PG",
            "KO", "XOM", "CAT", "WMT", "META", "TSLA", "AMZN", "CASH",
        )
        assert spec.assets[:-1] == DEFAULT_STOCK_TICKERS
        assert spec.cash == CASH
        assert spec.kind is MarketKind.STOCK

    def test_stock_spec_has_no_pairs(self):
        spec = MarketSpec.stock(("AAPL",))
        assert spec.pairs == ()
        with pytest.raises(WrongMarketKind):
            spec.pair_for("AAPL")

    def test_prediction_universe_shape(self):
        spec = MarketSpec.prediction(("Will it rain?", "Will it snow?"))
        assert spec.assets == (
            "Will it rain?_Yes", "Will it rain?_No",
            "Will it snow?_Yes", "Will it snow?_No",
            "CASH",
        )
        assert len(spec.assets) == 2 * 2 + 1
        assert spec.questions == ("Will it rain?", "Will it snow?")
        assert spec.risk_free_rate == 0.0
        pair = spec.pair_for("Will it snow?")
        assert (pair.yes, pair.no) == ("Will it snow?_Yes", "Will it snow?_No")
        with pytest.raises(KeyError):
            spec.pair_for("Will it hail?")

    def test_duplicate_assets_rejected(self):
        with pytest.raises(ValueError, match="unique"):
            MarketSpec(MarketKind.STOCK, ("AAPL", "AAPL", "CASH"))

    def test_cash_must_be_in_universe(self):
        with pytest.raises(ValueError, match="cash"):
            MarketSpec(MarketKind.STOCK, ("AAPL", "MSFT"))

    def test_prediction_rejects_nonzero_risk_free_rate(self):
        base = MarketSpec.prediction(("Q?",))
        with pytest.raises(ValueError, match="risk-free"):
            MarketSpec(MarketKind.PREDICTION, base.assets, pairs=base.pairs,
                       risk_free_rate=0.01)

    def test_prediction_rejects_unpaired_assets(self):
        with pytest.raises(ValueError, match="pair"):
            MarketSpec(MarketKind.PREDICTION, ("Q?_Yes", "CASH"), pairs=())


class TestValueTypes:
    def test_price_point_requires_positive_price(self):
        with pytest.raises(ValueError):
            PricePoint(dt.date(2025, 1, 2), 0.0)
        with pytest.raises(ValueError):
            PricePoint(dt.date(2025, 1, 2), -3.0)

    def test_price_vector_rejects_non_positive(self):
        with pytest.raises(ValueError, match="AAPL"):
            PriceVector(dt.date(2025, 1, 2), {"AAPL": 0.0, "CASH": 1.0})

    def test_price_vector_copies_input(self):
        raw = {"AAPL": 10.0}
        vec = PriceVector(dt.date(2025, 1, 2), raw)
        raw["AAPL"] = 99.0
        assert vec["AAPL"] == 10.0

    def test_holdings_are_long_only(self):
        with pytest.raises(ValueError, match="negative"):
            Holdings({"AAPL": -1.0})
        assert Holdings({"AAPL": 0.0})["AAPL"] == 0.0

    def test_allocation_vector_sum_tolerance(self):
        AllocationVector({"AAPL": 0.5, "CASH": 0.5})
        with pytest.raises(ValueError, match="sum"):
            AllocationVector({"AAPL": 0.5, "CASH": 0.499})
        with pytest.raises(ValueError, match="negative"):
            AllocationVector({"AAPL": -0.5, "CASH": 1.5})

    def test_trade_delta_sides(self):
        delta = TradeDelta({"A": 2.0, "B": -1.0, "C": 0.0})
        assert delta.side("A") == "BUY"
        assert delta.side("B") == "SELL"
        assert delta.side("C") == "HOLD"
