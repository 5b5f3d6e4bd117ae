"""Daily equity bars and latest quotes.

The chart endpoint takes a half-open epoch window [period1, period2),
so a request for bars through day D passes midnight of D+1. Parsing is
split out so payload handling is testable without a network.
"""

from __future__ import annotations

import datetime as dt
import random
from typing import Any, Callable
from zoneinfo import ZoneInfo

import requests

from ..domain import PricePoint
from ..errors import ProviderError
from .policy import FetchPolicy, fetch_with_policy

__all__ = [
    "CHART_URL",
    "parse_chart_payload",
    "parse_quote_payload",
    "fetch_equity_history",
    "fetch_equity_quote",
]

CHART_URL = "https://query1.finance.yahoo.com/v8/finance/chart/{symbol}"

_DEFAULT_TZ = ZoneInfo("America/New_York")

# http(url, params, headers, timeout) -> parsed JSON body
HttpGet = Callable[[str, dict[str, Any], dict[str, str], float], Any]


def _requests_get(url: str, params: dict[str, Any],
                  headers: dict[str, str], timeout: float) -> Any:
    response = requests.get(url, params=params, headers=headers, timeout=timeout)
    response.raise_for_status()
    return response.json()


def _chart_result(payload: Any) -> dict:
    try:
        chart = payload["chart"]
    except (TypeError, KeyError) as exc:
        raise ProviderError("chart payload missing 'chart'") from exc
    if chart.get("error"):
        raise ProviderError(f"provider error: {chart['error']}")
    results = chart.get("result") or []
    if not results:
        raise ProviderError("chart payload has no result")
    return results[0]


def parse_chart_payload(payload: Any, tz: ZoneInfo = _DEFAULT_TZ) -> list[PricePoint]:
    """Bars from one chart response, oldest first.

    Prefers adjusted closes, falls back to raw closes, and drops bars
    where both are null. Bar timestamps become exchange-local dates.
    """
    result = _chart_result(payload)
    timestamps = result.get("timestamp") or []
    indicators = result.get("indicators") or {}
    quote = (indicators.get("quote") or [{}])[0]
    closes = quote.get("close") or [None] * len(timestamps)
    volumes = quote.get("volume") or [None] * len(timestamps)
    adjusted = (indicators.get("adjclose") or [{}])[0].get("adjclose")
    if adjusted is None:
        adjusted = [None] * len(timestamps)

    points = []
    for ts, close, adj, volume in zip(timestamps, closes, adjusted, volumes):
        price = adj if adj is not None else close
        if price is None or not price > 0:
            continue
        date = dt.datetime.fromtimestamp(ts, tz).date()
        points.append(PricePoint(date, float(price), None if volume is None else float(volume)))
    points.sort(key=lambda p: p.date)
    return points


def parse_quote_payload(payload: Any, tz: ZoneInfo = _DEFAULT_TZ) -> PricePoint:
    """Latest trade from chart metadata: the best available price today."""
    result = _chart_result(payload)
    meta = result.get("meta") or {}
    price = meta.get("regularMarketPrice")
    moment = meta.get("regularMarketTime")
    if price is None or moment is None or not price > 0:
        raise ProviderError("quote payload lacks a usable market price")
    return PricePoint(dt.datetime.fromtimestamp(moment, tz).date(), float(price), None)


def fetch_equity_history(
    ticker: str,
    start: dt.date,
    end: dt.date,
    policy: FetchPolicy,
    http: HttpGet = _requests_get,
    rng: random.Random | None = None,
    sleep: Callable[[float], None] | None = None,
) -> list[PricePoint]:
    """Daily bars with dates in [start, end], inclusive."""
    period1 = int(dt.datetime.combine(start, dt.time(), tzinfo=dt.timezone.utc).timestamp())
    period2 = int(
        dt.datetime.combine(end + dt.timedelta(days=1), dt.time(), tzinfo=dt.timezone.utc).timestamp()
    )
    params = {"period1": period1, "period2": period2, "interval": "1d", "events": "div,splits"}
    headers = {"User-Agent": policy.user_agent}

    def request() -> list[PricePoint]:
        payload = http(CHART_URL.format(symbol=ticker), params, headers, policy.timeout)
        return parse_chart_payload(payload)

    kwargs: dict[str, Any] = {}
    if rng is not None:
        kwargs["rng"] = rng
    if sleep is not None:
        kwargs["sleep"] = sleep
    points = fetch_with_policy(policy, request, **kwargs)
    return [p for p in points if start <= p.date <= end]


def fetch_equity_quote(
    ticker: str,
    policy: FetchPolicy,
    http: HttpGet = _requests_get,
    rng: random.Random | None = None,
    sleep: Callable[[float], None] | None = None,
) -> PricePoint:
    """Latest available trade for the ticker."""
    params = {"interval": "1d", "range": "1d"}
    headers = {"User-Agent": policy.user_agent}

    def request() -> PricePoint:
        payload = http(CHART_URL.format(symbol=ticker), params, headers, policy.timeout)
        return parse_quote_payload(payload)

    kwargs: dict[str, Any] = {}
    if rng is not None:
        kwargs["rng"] = rng
    if sleep is not None:
        kwargs["sleep"] = sleep
    return fetch_with_policy(policy, request, **kwargs)
