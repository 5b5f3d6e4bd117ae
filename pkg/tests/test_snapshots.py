"""Snapshot store: idempotent upserts, ordering, and file integrity."""

import datetime as dt
import json

import pytest

from tradefolio.errors import ConflictingValue, IngestionError
from tradefolio.domain import NewsItem
from tradefolio.ingestion.snapshots import (
    FetchBatch,
    MarketCatalogEntry,
    NewsRow,
    PriceRow,
    SnapshotStore,
    _filename,
    record_snapshot,
)

D = dt.date


def test_price_round_trip(tmp_path):
    store = SnapshotStore(tmp_path)
    assert store.upsert_price("stock", "AAPL", D(2025, 3, 3), 241.5, 1000.0)
    assert store.upsert_price("stock", "AAPL", D(2025, 3, 4), 243.25)

    fresh = SnapshotStore(tmp_path)
    series = fresh.price_series("stock", "AAPL")
    assert [(p.date, p.price, p.volume) for p in series] == [
        (D(2025, 3, 3), 241.5, 1000.0),
        (D(2025, 3, 4), 243.25, None),
    ]


def test_upsert_same_value_is_noop(tmp_path):
    store = SnapshotStore(tmp_path)
    assert store.upsert_price("stock", "AAPL", D(2025, 3, 3), 241.5) is True
    before = (tmp_path / "prices" / "stock" / "AAPL.jsonl").read_bytes()
    assert store.upsert_price("stock", "AAPL", D(2025, 3, 3), 241.5) is False
    assert (tmp_path / "prices" / "stock" / "AAPL.jsonl").read_bytes() == before


def test_upsert_conflicting_value_refused(tmp_path):
    store = SnapshotStore(tmp_path)
    store.upsert_price("stock", "AAPL", D(2025, 3, 3), 241.5)
    with pytest.raises(ConflictingValue):
        store.upsert_price("stock", "AAPL", D(2025, 3, 3), 241.51)


def test_out_of_order_upserts_flushed_sorted(tmp_path):
    store = SnapshotStore(tmp_path)
    store.upsert_price("stock", "MSFT", D(2025, 3, 5), 401.0)
    store.upsert_price("stock", "MSFT", D(2025, 3, 3), 399.0)

    lines = (tmp_path / "prices" / "stock" / "MSFT.jsonl").read_text().splitlines()
    header = json.loads(lines[0])
    assert header == {
        "format": "tradefolio-series",
        "version": 1,
        "series": "stock-price",
        "key": "MSFT",
    }
    dates = [json.loads(line)["date"] for line in lines[1:]]
    assert dates == ["2025-03-03", "2025-03-05"]

    # and the reload accepts its own output
    assert len(SnapshotStore(tmp_path).price_series("stock", "MSFT")) == 2


def test_load_rejects_non_increasing_dates(tmp_path):
    path = tmp_path / "prices" / "stock" / "NVDA.jsonl"
    path.parent.mkdir(parents=True)
    rows = [
        {"format": "tradefolio-series", "version": 1, "series": "stock-price", "key": "NVDA"},
        {"date": "2025-03-04", "price": 110.0, "volume": None},
        {"date": "2025-03-04", "price": 110.0, "volume": None},
    ]
    path.write_text("\n".join(json.dumps(r) for r in rows) + "\n")
    with pytest.raises(IngestionError, match="strictly increasing"):
        SnapshotStore(tmp_path).price_series("stock", "NVDA")


def test_load_rejects_wrong_header(tmp_path):
    path = tmp_path / "prices" / "stock" / "NVDA.jsonl"
    path.parent.mkdir(parents=True)
    header = {"format": "tradefolio-series", "version": 1, "series": "stock-price", "key": "AAPL"}
    path.write_text(json.dumps(header) + "\n")
    with pytest.raises(IngestionError, match="header"):
        SnapshotStore(tmp_path).price_series("stock", "NVDA")


def test_load_rejects_garbage_header(tmp_path):
    path = tmp_path / "prices" / "stock" / "NVDA.jsonl"
    path.parent.mkdir(parents=True)
    path.write_text("not json\n")
    with pytest.raises(IngestionError, match="header"):
        SnapshotStore(tmp_path).price_series("stock", "NVDA")


def test_nonpositive_price_rejected(tmp_path):
    store = SnapshotStore(tmp_path)
    with pytest.raises(IngestionError):
        store.upsert_price("stock", "AAPL", D(2025, 3, 3), 0.0)
    with pytest.raises(IngestionError):
        store.upsert_price("bonds", "AAPL", D(2025, 3, 3), 1.0)


def test_latest_price_and_window(tmp_path):
    store = SnapshotStore(tmp_path)
    for day, price in [(3, 100.0), (4, 101.0), (6, 103.0)]:
        store.upsert_price("stock", "AAPL", D(2025, 3, day), price)

    assert store.latest_price("stock", "AAPL", D(2025, 3, 5)).price == 101.0
    assert store.latest_price("stock", "AAPL", D(2025, 3, 6)).price == 103.0
    assert store.latest_price("stock", "AAPL", D(2025, 3, 2)) is None

    window = store.price_window("stock", "AAPL", D(2025, 3, 4), D(2025, 3, 6))
    assert [p.price for p in window] == [101.0, 103.0]


def test_price_keys_lists_headers(tmp_path):
    store = SnapshotStore(tmp_path)
    store.upsert_price("stock", "MSFT", D(2025, 3, 3), 400.0)
    store.upsert_price("stock", "AAPL", D(2025, 3, 3), 240.0)
    store.upsert_price("prediction", "tok-1", D(2025, 3, 3), 0.5)
    assert store.price_keys("stock") == ("AAPL", "MSFT")
    assert store.price_keys("prediction") == ("tok-1",)


def _item(n: int, tag: str) -> NewsItem:
    return NewsItem(
        title=f"headline {n}",
        snippet=f"snippet {n}",
        source="Example Wire",
        url=f"https://example.com/{n}",
        published_at=1_740_000_000 + n,
        tagged_asset=tag,
    )


def test_news_round_trip_and_window(tmp_path):
    store = SnapshotStore(tmp_path)
    assert store.upsert_news("AAPL", D(2025, 3, 3), [_item(1, "AAPL"), _item(2, "AAPL")])
    assert store.upsert_news("AAPL", D(2025, 3, 4), [])
    assert store.upsert_news("AAPL", D(2025, 3, 5), [_item(3, "AAPL")])

    fresh = SnapshotStore(tmp_path)
    assert fresh.has_news("AAPL", D(2025, 3, 4))
    assert not fresh.has_news("AAPL", D(2025, 3, 6))

    window = fresh.news_window("AAPL", D(2025, 3, 3), D(2025, 3, 4))
    assert [i.title for i in window] == ["headline 1", "headline 2"]
    assert window[0] == _item(1, "AAPL")

    # idempotent rewrite of the same day
    assert fresh.upsert_news("AAPL", D(2025, 3, 3), [_item(1, "AAPL"), _item(2, "AAPL")]) is False
    with pytest.raises(ConflictingValue):
        fresh.upsert_news("AAPL", D(2025, 3, 3), [_item(1, "AAPL")])


def test_news_tagged_asset_comes_from_series_tag(tmp_path):
    # the stored rows carry no tag; the reader tags items with the series key
    store = SnapshotStore(tmp_path)
    store.upsert_news("NVDA", D(2025, 3, 3), [_item(9, "whatever")])
    got = SnapshotStore(tmp_path).news_window("NVDA", D(2025, 3, 3), D(2025, 3, 3))
    assert got[0].tagged_asset == "NVDA"


def _entry(slug: str) -> MarketCatalogEntry:
    return MarketCatalogEntry(
        slug=slug,
        question=f"Will {slug} resolve yes?",
        yes_token=f"{slug}-yes",
        no_token=f"{slug}-no",
        url=f"https://example.com/event/{slug}",
    )


def test_market_catalog_sorted_and_guarded(tmp_path):
    store = SnapshotStore(tmp_path)
    assert store.upsert_market(_entry("zeta"))
    assert store.upsert_market(_entry("alpha"))
    assert store.upsert_market(_entry("zeta")) is False
    with pytest.raises(ConflictingValue):
        store.upsert_market(
            MarketCatalogEntry("zeta", "different?", "y", "n", "https://example.com"),
        )

    fresh = SnapshotStore(tmp_path)
    assert [e.slug for e in fresh.markets()] == ["alpha", "zeta"]
    assert fresh.markets()[0] == _entry("alpha")


def test_filename_slugs_unsafe_keys():
    assert _filename("AAPL") == "AAPL.jsonl"
    assert _filename("tok_1.series-A") == "tok_1.series-A.jsonl"

    unsafe = _filename("слug with spaces/and?junk")
    assert unsafe.endswith(".jsonl")
    assert "/" not in unsafe and "?" not in unsafe and " " not in unsafe
    # distinct unsafe keys must never collide on the same file
    assert unsafe != _filename("слug with spaces and junk")
    # long keys stay bounded: 48-char slug + 10-hex digest + extension
    assert len(_filename("x" * 500 + "!")) == 48 + 1 + 10 + len(".jsonl")


def test_record_snapshot_counts_new_rows(tmp_path):
    store = SnapshotStore(tmp_path)
    batch = FetchBatch(
        prices=(
            PriceRow("stock", "AAPL", D(2025, 3, 3), 240.0),
            PriceRow("stock", "AAPL", D(2025, 3, 4), 241.0),
        ),
        news=(NewsRow("AAPL", D(2025, 3, 3), (_item(1, "AAPL"),)),),
        markets=(_entry("alpha"),),
    )
    assert record_snapshot(store, batch) == 4
    assert record_snapshot(store, batch) == 0
