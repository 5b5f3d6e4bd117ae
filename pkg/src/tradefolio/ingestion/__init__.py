"""Market data acquisition, normalization, and file-backed snapshots."""

from .feeds import Feed, LiveFeed, ReplayFeed
from .normalize import clean_link, normalize_prediction_quote, parse_news_timestamp
from .policy import FetchPolicy, backoff_delay, fetch_with_policy
from .snapshots import FetchBatch, MarketCatalogEntry, PriceRow, SnapshotStore, record_snapshot

__all__ = [
    "Feed",
    "FetchBatch",
    "FetchPolicy",
    "LiveFeed",
    "MarketCatalogEntry",
    "PriceRow",
    "ReplayFeed",
    "SnapshotStore",
    "backoff_delay",
    "clean_link",
    "fetch_with_policy",
    "normalize_prediction_quote",
    "parse_news_timestamp",
    "record_snapshot",
]
