import datetime as dt

import pytest

from tradefolio.errors import NormalizationError
from tradefolio.ingestion.normalize import (
    clean_link,
    normalize_prediction_quote,
    parse_news_timestamp,
)

REF = dt.datetime(2025, 10, 24, 15, 0, tzinfo=dt.timezone.utc)


class TestQuoteNormalization:
    def test_probability_passes_through(self):
        assert normalize_prediction_quote(0.93) == 0.93
        assert normalize_prediction_quote(1.0) == 1.0
        assert normalize_prediction_quote(0.0001) == 0.0001

    def test_cents_divide_by_100(self):
        assert normalize_prediction_quote(93) == 0.93
        assert normalize_prediction_quote(93.0) == pytest.approx(0.93)
        assert normalize_prediction_quote(100) == 1.0
        assert normalize_prediction_quote(1.5) == 0.015

    def test_idempotent(self):
        once = normalize_prediction_quote(93)
        assert normalize_prediction_quote(once) == once

    @pytest.mark.parametrize("bad", [0, 0.0, -0.5, 101, 250.0, float("nan"), True, "93", None])
    def test_unrecognized_quotes_rejected(self, bad):
        with pytest.raises(NormalizationError):
            normalize_prediction_quote(bad)


class TestTimestampParsing:
    def test_rfc822(self):
        ts = parse_news_timestamp("Fri, 24 Oct 2025 12:00:00 GMT", REF)
        assert ts == int(dt.datetime(2025, 10, 24, 12, tzinfo=dt.timezone.utc).timestamp())

    def test_rfc822_with_offset(self):
        ts = parse_news_timestamp("Fri, 24 Oct 2025 08:00:00 -0400", REF)
        assert ts == int(dt.datetime(2025, 10, 24, 12, tzinfo=dt.timezone.utc).timestamp())

    def test_iso_with_and_without_zone(self):
        aware = parse_news_timestamp("2025-10-24T12:00:00+00:00", REF)
        naive = parse_news_timestamp("2025-10-24T12:00:00", REF)
        assert aware == naive  # naive means UTC

    def test_relative_phrases(self):
        assert parse_news_timestamp("3 hours ago", REF) == int(REF.timestamp()) - 3 * 3600
        assert parse_news_timestamp("1 hour ago", REF) == int(REF.timestamp()) - 3600
        assert parse_news_timestamp("45 mins ago", REF) == int(REF.timestamp()) - 45 * 60
        assert parse_news_timestamp("2 days ago", REF) == int(REF.timestamp()) - 2 * 86400
        assert parse_news_timestamp("1 week ago", REF) == int(REF.timestamp()) - 604800
        assert parse_news_timestamp("yesterday", REF) == int(REF.timestamp()) - 86400

    def test_absolute_word_formats(self):
        expected = int(dt.datetime(2025, 10, 3, tzinfo=dt.timezone.utc).timestamp())
        assert parse_news_timestamp("Oct 03, 2025", REF) == expected
        assert parse_news_timestamp("October 03, 2025", REF) == expected
        assert parse_news_timestamp("03 Oct 2025", REF) == expected
        assert parse_news_timestamp("10/03/2025", REF) == expected

    @pytest.mark.parametrize("bad", ["", "   ", "soon", "last Tuesday", "2025-13-45", "n/a"])
    def test_unparseable_returns_none(self, bad):
        assert parse_news_timestamp(bad, REF) is None


class TestLinkCleaning:
    def test_unwraps_google_redirect(self):
        wrapped = "https://news.google.com/rss/articles/x?url=https%3A%2F%2Fexample.com%2Fstory&oc=5"
        assert clean_link(wrapped) == "https://example.com/story"

    def test_unwraps_q_parameter(self):
        wrapped = "https://www.google.com/url?q=https://example.com/a&ved=xyz"
        assert clean_link(wrapped) == "https://example.com/a"

    def test_ignores_non_url_redirect_values(self):
        wrapped = "https://news.google.com/rss/articles/CBMiabc?oc=5"
        # No unwrappable parameter: tracking params still stripped.
        assert clean_link(wrapped) == "https://news.google.com/rss/articles/CBMiabc"

    def test_strips_tracking_params_elsewhere(self):
        url = "https://example.com/story?id=7&utm_source=rss&utm_medium=feed&fbclid=123"
        assert clean_link(url) == "https://example.com/story?id=7"

    def test_plain_urls_untouched(self):
        assert clean_link("https://example.com/a/b") == "https://example.com/a/b"
        assert clean_link("") == ""
