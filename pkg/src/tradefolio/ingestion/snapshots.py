"""File-backed snapshot store: the append-only source of truth.

Each (series kind, key) pair owns one JSONL file: a header line naming
the format version and key, then one row per date in strictly
increasing order. Upserts are idempotent; changing an already-recorded
value is refused, never silently applied. Files are rewritten
atomically so a crash can't leave a half-written series.
"""

from __future__ import annotations

import datetime as dt
import hashlib
import json
import os
import re
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Sequence

from ..domain import NewsItem, PricePoint
from ..errors import ConflictingValue, IngestionError

__all__ = [
    "SERIES_FORMAT",
    "SERIES_VERSION",
    "MarketCatalogEntry",
    "PriceRow",
    "NewsRow",
    "FetchBatch",
    "SnapshotStore",
    "record_snapshot",
]

SERIES_FORMAT = "tradefolio-series"
SERIES_VERSION = 1

_PRICE_SERIES = {"stock": "stock-price", "prediction": "prediction-price"}
_SAFE_KEY = re.compile(r"[A-Za-z0-9._-]{1,64}")


@dataclass(frozen=True)
class MarketCatalogEntry:
    """One discovered prediction market."""

    slug: str
    question: str
    yes_token: str
    no_token: str
    url: str


@dataclass(frozen=True)
class PriceRow:
    market: str  # "stock" | "prediction"
    key: str
    date: dt.date
    price: float
    volume: float | None = None


@dataclass(frozen=True)
class NewsRow:
    tag: str
    date: dt.date
    items: tuple[NewsItem, ...]


@dataclass(frozen=True)
class FetchBatch:
    """Everything one fetch pass wants persisted."""

    prices: tuple[PriceRow, ...] = ()
    news: tuple[NewsRow, ...] = ()
    markets: tuple[MarketCatalogEntry, ...] = ()


def _filename(key: str) -> str:
    if _SAFE_KEY.fullmatch(key):
        return f"{key}.jsonl"
    slug = re.sub(r"[^A-Za-z0-9]+", "-", key).strip("-").lower()[:48] or "series"
    digest = hashlib.blake2s(key.encode(), digest_size=5).hexdigest()
    return f"{slug}-{digest}.jsonl"


def _atomic_write(path: Path, lines: Iterable[str]) -> None:
    tmp = path.with_suffix(".tmp")
    with open(tmp, "w", encoding="utf-8") as fh:
        for line in lines:
            fh.write(line + "\n")
    os.replace(tmp, path)


@dataclass
class _Series:
    kind: str
    key: str
    path: Path
    rows: dict[str, dict] = field(default_factory=dict)  # iso date -> row, sorted


class SnapshotStore:
    def __init__(self, root: str | Path) -> None:
        self.root = Path(root)
        for sub in ("prices/stock", "prices/prediction", "news"):
            (self.root / sub).mkdir(parents=True, exist_ok=True)
        self._series: dict[tuple[str, str], _Series] = {}
        self._markets: dict[str, MarketCatalogEntry] | None = None

    # -- series plumbing -------------------------------------------------

    def _dir_for(self, kind: str) -> Path:
        if kind in _PRICE_SERIES.values():
            market = next(m for m, s in _PRICE_SERIES.items() if s == kind)
            return self.root / "prices" / market
        if kind == "news":
            return self.root / "news"
        raise IngestionError(f"unknown series kind {kind!r}")

    def _load(self, kind: str, key: str) -> _Series:
        cached = self._series.get((kind, key))
        if cached is not None:
            return cached
        path = self._dir_for(kind) / _filename(key)
        series = _Series(kind, key, path)
        if path.exists():
            with open(path, encoding="utf-8") as fh:
                header_line = fh.readline()
                try:
                    header = json.loads(header_line)
                except json.JSONDecodeError as exc:
                    raise IngestionError(f"{path}: unreadable header") from exc
                if (
                    header.get("format") != SERIES_FORMAT
                    or header.get("version") != SERIES_VERSION
                    or header.get("series") != kind
                    or header.get("key") != key
                ):
                    raise IngestionError(f"{path}: header does not match series ({kind}, {key!r})")
                previous = None
                for n, line in enumerate(fh, start=2):
                    if not line.strip():
                        continue
                    try:
                        row = json.loads(line)
                    except json.JSONDecodeError as exc:
                        raise IngestionError(f"{path}:{n}: unreadable row") from exc
                    date = row.get("date")
                    if previous is not None and date <= previous:
                        raise IngestionError(f"{path}:{n}: dates must be strictly increasing")
                    previous = date
                    series.rows[date] = row
        self._series[(kind, key)] = series
        return series

    def _flush(self, series: _Series) -> None:
        header = json.dumps(
            {"format": SERIES_FORMAT, "version": SERIES_VERSION,
             "series": series.kind, "key": series.key},
            ensure_ascii=False,
        )
        body = (
            json.dumps(series.rows[d], ensure_ascii=False)
            for d in sorted(series.rows)
        )
        _atomic_write(series.path, [header, *body])

    def _upsert(self, kind: str, key: str, date: dt.date, row: dict) -> bool:
        series = self._load(kind, key)
        iso = date.isoformat()
        existing = series.rows.get(iso)
        if existing is not None:
            if existing == row:
                return False
            raise ConflictingValue(
                f"({kind}, {key!r}, {iso}) already recorded with a different value"
            )
        series.rows[iso] = row
        self._flush(series)
        return True

    # -- prices ------------------------------------------------------------

    def upsert_price(self, market: str, key: str, date: dt.date,
                     price: float, volume: float | None = None) -> bool:
        if market not in _PRICE_SERIES:
            raise IngestionError(f"unknown market {market!r}")
        if not price > 0:
            raise IngestionError(f"price must be positive, got {price}")
        row = {"date": date.isoformat(), "price": float(price),
               "volume": None if volume is None else float(volume)}
        return self._upsert(_PRICE_SERIES[market], key, date, row)

    def price_series(self, market: str, key: str) -> tuple[PricePoint, ...]:
        series = self._load(_PRICE_SERIES[market], key)
        return tuple(
            PricePoint(dt.date.fromisoformat(d), series.rows[d]["price"], series.rows[d]["volume"])
            for d in sorted(series.rows)
        )

    def latest_price(self, market: str, key: str, on_or_before: dt.date) -> PricePoint | None:
        best = None
        for point in self.price_series(market, key):
            if point.date <= on_or_before:
                best = point
        return best

    def price_window(self, market: str, key: str,
                     start: dt.date, end: dt.date) -> tuple[PricePoint, ...]:
        return tuple(
            p for p in self.price_series(market, key) if start <= p.date <= end
        )

    def price_keys(self, market: str) -> tuple[str, ...]:
        keys = []
        for path in sorted((self.root / "prices" / market).glob("*.jsonl")):
            with open(path, encoding="utf-8") as fh:
                header = json.loads(fh.readline())
            keys.append(header["key"])
        return tuple(keys)

    # -- news ----------------------------------------------------------------

    def upsert_news(self, tag: str, date: dt.date, items: Sequence[NewsItem]) -> bool:
        row = {
            "date": date.isoformat(),
            "items": [
                {"title": i.title, "snippet": i.snippet, "source": i.source,
                 "url": i.url, "published_at": i.published_at}
                for i in items
            ],
        }
        return self._upsert("news", tag, date, row)

    def has_news(self, tag: str, date: dt.date) -> bool:
        return date.isoformat() in self._load("news", tag).rows

    def news_window(self, tag: str, start: dt.date, end: dt.date) -> tuple[NewsItem, ...]:
        series = self._load("news", tag)
        items = []
        for iso in sorted(series.rows):
            date = dt.date.fromisoformat(iso)
            if start <= date <= end:
                for raw in series.rows[iso]["items"]:
                    items.append(NewsItem(tagged_asset=tag, **raw))
        return tuple(items)

    # -- market catalog ---------------------------------------------------

    def _load_markets(self) -> dict[str, MarketCatalogEntry]:
        if self._markets is not None:
            return self._markets
        self._markets = {}
        path = self.root / "markets.jsonl"
        if path.exists():
            with open(path, encoding="utf-8") as fh:
                for line in fh:
                    if line.strip():
                        row = json.loads(line)
                        self._markets[row["slug"]] = MarketCatalogEntry(**row)
        return self._markets

    def upsert_market(self, entry: MarketCatalogEntry) -> bool:
        markets = self._load_markets()
        existing = markets.get(entry.slug)
        if existing is not None:
            if existing == entry:
                return False
            raise ConflictingValue(f"market {entry.slug!r} already catalogued differently")
        markets[entry.slug] = entry
        _atomic_write(
            self.root / "markets.jsonl",
            [
                json.dumps(vars(markets[slug]), ensure_ascii=False)
                for slug in sorted(markets)
            ],
        )
        return True

    def markets(self) -> tuple[MarketCatalogEntry, ...]:
        markets = self._load_markets()
        return tuple(markets[slug] for slug in sorted(markets))


def record_snapshot(store: SnapshotStore, batch: FetchBatch) -> int:
    """Persist one fetch pass; returns how many rows were new.

    Re-recording identical data is a no-op; a changed value for an
    already-stored key raises ``ConflictingValue`` before anything else
    from the batch is half-applied for that series.
    """
    changed = 0
    for price in batch.prices:
        if store.upsert_price(price.market, price.key, price.date, price.price, price.volume):
            changed += 1
    for news in batch.news:
        if store.upsert_news(news.tag, news.date, news.items):
            changed += 1
    for market in batch.markets:
        if store.upsert_market(market):
            changed += 1
    return changed
