"""News search: query building, RSS parsing, windowing, ranking."""

from __future__ import annotations

import datetime as dt
import html
import random
import re
import xml.etree.ElementTree as ET
from typing import Any, Callable, Iterable, Mapping, Sequence

import requests

from ..domain import MarketKind, NewsItem
from ..errors import ProviderError
from .normalize import clean_link, parse_news_timestamp
from .policy import FetchPolicy, fetch_with_policy

__all__ = [
    "RSS_URL",
    "COMPANY_NAMES",
    "NEWS_WINDOW_DAYS",
    "build_news_query",
    "parse_news_rss",
    "filter_news_window",
    "rank_news",
    "fetch_news",
]

RSS_URL = "https://news.google.com/rss/search"

# Query window [t - 3, t - 1]: strictly before the decision date.
NEWS_WINDOW_DAYS = 3

COMPANY_NAMES: dict[str, str] = {
    "AAPL": "Apple",
    "MSFT": "Microsoft",
    "NVDA": "NVIDIA",
    "JPM": "JPMorgan Chase",
    "V": "Visa",
    "JNJ": "Johnson & Johnson",
    "UNH": "UnitedHealth Group",
    "PG": "Procter & Gamble",
    "KO": "Coca-Cola",
    "XOM": "Exxon Mobil",
    "CAT": "Caterpillar",
    "WMT": "Walmart",
    "META": "Meta Platforms",
    "TSLA": "Tesla",
    "AMZN": "Amazon",
}

# http(url, params, headers, timeout) -> response text
HttpGetText = Callable[[str, dict[str, Any], dict[str, str], float], str]


def _requests_get_text(url: str, params: dict[str, Any],
                       headers: dict[str, str], timeout: float) -> str:
    response = requests.get(url, params=params, headers=headers, timeout=timeout)
    response.raise_for_status()
    return response.text


def build_news_query(tag: str, kind: MarketKind,
                     company_names: Mapping[str, str] | None = None) -> str:
    """Search text for one tag.

    Stock tags pair the ticker with the company name; prediction tags
    are the question text itself.
    """
    if kind is MarketKind.PREDICTION:
        return tag
    names = COMPANY_NAMES if company_names is None else company_names
    company = names.get(tag)
    if company:
        return f"{tag} stock news OR {company}"
    return f"{tag} stock news"


_TAG_STRIP = re.compile(r"<[^>]+>")


def _plain_text(fragment: str | None) -> str:
    if not fragment:
        return ""
    return html.unescape(_TAG_STRIP.sub(" ", fragment)).strip()


def parse_news_rss(xml_text: str, tag: str, reference: dt.datetime) -> list[NewsItem]:
    """Items from one RSS result page.

    Published times are normalized to UNIX seconds against
    ``reference``; items whose time cannot be parsed are dropped, and
    links are unwrapped from redirectors.
    """
    try:
        root = ET.fromstring(xml_text)
    except ET.ParseError as exc:
        raise ProviderError(f"unparseable RSS feed: {exc}") from exc
    items = []
    for node in root.iter("item"):
        title = _plain_text(node.findtext("title"))
        if not title:
            continue
        published_at = parse_news_timestamp(node.findtext("pubDate") or "", reference)
        if published_at is None:
            continue
        source = _plain_text(node.findtext("source")) or "unknown"
        items.append(
            NewsItem(
                title=title,
                snippet=_plain_text(node.findtext("description")),
                source=source,
                url=clean_link((node.findtext("link") or "").strip()),
                published_at=published_at,
                tagged_asset=tag,
            )
        )
    return items


def _published_date(item: NewsItem) -> dt.date:
    return dt.datetime.fromtimestamp(item.published_at, dt.timezone.utc).date()


def filter_news_window(items: Iterable[NewsItem], start: dt.date, end: dt.date) -> list[NewsItem]:
    """Keep items whose UTC publication date lies in [start, end]."""
    return [i for i in items if start <= _published_date(i) <= end]


def rank_news(items: Sequence[NewsItem], target: dt.date | None = None) -> list[NewsItem]:
    """Closest to the target date first; without a target, newest first."""
    if target is None:
        return sorted(items, key=lambda i: -i.published_at)
    anchor = dt.datetime.combine(target, dt.time(), tzinfo=dt.timezone.utc).timestamp()
    return sorted(items, key=lambda i: (abs(i.published_at - anchor), -i.published_at))


def fetch_news(
    tag: str,
    kind: MarketKind,
    start: dt.date,
    end: dt.date,
    policy: FetchPolicy,
    reference: dt.datetime | None = None,
    target: dt.date | None = None,
    company_names: Mapping[str, str] | None = None,
    http: HttpGetText = _requests_get_text,
    rng: random.Random | None = None,
    sleep: Callable[[float], None] | None = None,
) -> list[NewsItem]:
    """Ranked items for one tag, publication dates within [start, end]."""
    reference = reference or dt.datetime.now(dt.timezone.utc)
    query = build_news_query(tag, kind, company_names)
    # Provider-side date operators are exclusive on both edges.
    q = (
        f"{query} after:{(start - dt.timedelta(days=1)).isoformat()}"
        f" before:{(end + dt.timedelta(days=1)).isoformat()}"
    )
    params = {"q": q, "hl": "en-US", "gl": "US", "ceid": "US:en"}
    headers = {"User-Agent": policy.user_agent}

    def request() -> list[NewsItem]:
        return parse_news_rss(http(RSS_URL, params, headers, policy.timeout), tag, reference)

    kwargs: dict[str, Any] = {}
    if rng is not None:
        kwargs["rng"] = rng
    if sleep is not None:
        kwargs["sleep"] = sleep
    items = fetch_with_policy(policy, request, **kwargs)
    return rank_news(filter_news_window(items, start, end), target)
