"""Prediction-market discovery and outcome price histories.

Markets come from a catalog endpoint (one entry per event after
deduplication), prices from a token-level history endpoint quoted
either as probabilities or cents; everything lands in (0, 1] via
``normalize_prediction_quote``. Near-flat series carry no signal and
are dropped at discovery time.
"""

from __future__ import annotations

import datetime as dt
import json
import random
from dataclasses import dataclass
from typing import Any, Callable

import requests

from ..domain import PricePoint
from ..errors import ProviderError
from .normalize import normalize_prediction_quote
from .policy import FetchPolicy, fetch_with_policy
from .snapshots import MarketCatalogEntry

__all__ = [
    "MARKETS_URL",
    "HISTORY_URL",
    "EVENT_URL_TEMPLATE",
    "FLAT_SERIES_THRESHOLD",
    "DiscoveredMarket",
    "is_flat_series",
    "parse_market_listing",
    "parse_price_history",
    "fetch_prediction_history",
    "discover_markets",
]

MARKETS_URL = "https://gamma-api.polymarket.com/markets"
HISTORY_URL = "https://clob.polymarket.com/prices-history"
EVENT_URL_TEMPLATE = "https://polymarket.com/event/{slug}"

# Series whose total range is below this carry no tradable signal.
FLAT_SERIES_THRESHOLD = 0.01

HttpGet = Callable[[str, dict[str, Any], dict[str, str], float], Any]


def _requests_get(url: str, params: dict[str, Any],
                  headers: dict[str, str], timeout: float) -> Any:
    response = requests.get(url, params=params, headers=headers, timeout=timeout)
    response.raise_for_status()
    return response.json()


@dataclass(frozen=True)
class DiscoveredMarket:
    """Catalog entry plus the histories that justified keeping it."""

    entry: MarketCatalogEntry
    yes_history: tuple[PricePoint, ...]
    no_history: tuple[PricePoint, ...]


def is_flat_series(points: list[PricePoint] | tuple[PricePoint, ...],
                   threshold: float = FLAT_SERIES_THRESHOLD) -> bool:
    if not points:
        return True
    prices = [p.price for p in points]
    return max(prices) - min(prices) < threshold


def _token_ids(raw: Any) -> tuple[str, str] | None:
    # Token ids arrive either as a JSON-encoded string or a real list.
    if isinstance(raw, str):
        try:
            raw = json.loads(raw)
        except json.JSONDecodeError:
            return None
    if isinstance(raw, list) and len(raw) == 2 and all(isinstance(t, str) for t in raw):
        return raw[0], raw[1]
    return None


def parse_market_listing(payload: Any) -> list[MarketCatalogEntry]:
    """Catalog entries from one listing page, deduplicated by event slug.

    Rows without a question or a yes/no token pair are skipped; rows
    without a url get one constructed from the slug.
    """
    if not isinstance(payload, list):
        raise ProviderError("market listing payload must be a list")
    seen: set[str] = set()
    entries = []
    for row in payload:
        if not isinstance(row, dict):
            continue
        question = row.get("question")
        slug = row.get("slug") or row.get("eventSlug")
        tokens = _token_ids(row.get("clobTokenIds"))
        if not question or not slug or tokens is None:
            continue
        if slug in seen:
            continue
        seen.add(slug)
        url = row.get("url") or EVENT_URL_TEMPLATE.format(slug=slug)
        entries.append(MarketCatalogEntry(slug=slug, question=question,
                                          yes_token=tokens[0], no_token=tokens[1], url=url))
    return entries


def parse_price_history(payload: Any) -> list[PricePoint]:
    """Normalized daily closes from one token's history payload.

    Multiple samples on one UTC day collapse to the last one.
    """
    try:
        history = payload["history"]
    except (TypeError, KeyError) as exc:
        raise ProviderError("history payload missing 'history'") from exc
    if not isinstance(history, list):
        raise ProviderError("'history' must be a list")
    by_date: dict[dt.date, float] = {}
    for sample in history:
        if not isinstance(sample, dict) or "t" not in sample or "p" not in sample:
            raise ProviderError(f"malformed history sample: {sample!r}")
        date = dt.datetime.fromtimestamp(int(sample["t"]), dt.timezone.utc).date()
        by_date[date] = normalize_prediction_quote(sample["p"])
    return [PricePoint(d, by_date[d]) for d in sorted(by_date)]


def fetch_prediction_history(
    token_id: str,
    start: dt.date,
    end: dt.date,
    policy: FetchPolicy,
    http: HttpGet = _requests_get,
    rng: random.Random | None = None,
    sleep: Callable[[float], None] | None = None,
) -> list[PricePoint]:
    """Daily closes for one outcome token, dates in [start, end]."""
    start_ts = int(dt.datetime.combine(start, dt.time(), tzinfo=dt.timezone.utc).timestamp())
    end_ts = int(
        dt.datetime.combine(end + dt.timedelta(days=1), dt.time(), tzinfo=dt.timezone.utc).timestamp()
    )
    params = {"market": token_id, "startTs": start_ts, "endTs": end_ts, "fidelity": 1440}
    headers = {"User-Agent": policy.user_agent}

    def request() -> list[PricePoint]:
        return parse_price_history(http(HISTORY_URL, params, headers, policy.timeout))

    kwargs: dict[str, Any] = {}
    if rng is not None:
        kwargs["rng"] = rng
    if sleep is not None:
        kwargs["sleep"] = sleep
    points = fetch_with_policy(policy, request, **kwargs)
    return [p for p in points if start <= p.date <= end]


def discover_markets(
    policy: FetchPolicy,
    history_start: dt.date,
    history_end: dt.date,
    limit: int = 20,
    flat_threshold: float = FLAT_SERIES_THRESHOLD,
    http: HttpGet = _requests_get,
    rng: random.Random | None = None,
    sleep: Callable[[float], None] | None = None,
) -> list[DiscoveredMarket]:
    """Active markets worth trading, with their price histories.

    Listing order is preserved. Markets whose yes-side history is empty
    or near-flat over the window are dropped.
    """
    params = {
        "active": "true",
        "closed": "false",
        "order": "volumeNum",
        "ascending": "false",
        "limit": max(limit * 3, limit),
    }
    headers = {"User-Agent": policy.user_agent}

    def request() -> list[MarketCatalogEntry]:
        return parse_market_listing(http(MARKETS_URL, params, headers, policy.timeout))

    kwargs: dict[str, Any] = {}
    if rng is not None:
        kwargs["rng"] = rng
    if sleep is not None:
        kwargs["sleep"] = sleep
    candidates = fetch_with_policy(policy, request, **kwargs)

    kept: list[DiscoveredMarket] = []
    for entry in candidates:
        if len(kept) >= limit:
            break
        yes = fetch_prediction_history(entry.yes_token, history_start, history_end,
                                       policy, http, rng, sleep)
        if is_flat_series(yes, flat_threshold):
            continue
        no = fetch_prediction_history(entry.no_token, history_start, history_end,
                                      policy, http, rng, sleep)
        kept.append(DiscoveredMarket(entry, tuple(yes), tuple(no)))
    return kept
