"""Typed error hierarchy.

Every failure mode that callers are expected to branch on gets its own
class; nothing in the package raises bare ValueError for a condition a
caller might want to catch.
"""

from __future__ import annotations

__all__ = [
    "TradefolioError",
    "KeyMismatch",
    "ZeroValuePortfolio",
    "AllocationError",
    "UnknownAsset",
    "NegativeWeight",
    "SumOutOfBand",
    "BothSidesSet",
    "WrongMarketKind",
    "ParseError",
    "NoObjectFound",
    "SchemaMismatch",
    "MetricsError",
    "SeriesTooShort",
    "NonPositiveStart",
    "EmptySeries",
    "LagTooLarge",
    "MisalignedHistories",
    "IngestionError",
    "NormalizationError",
    "ConflictingValue",
    "ProviderError",
    "FeedError",
    "FeedUnavailable",
    "NoPriceEverSeen",
    "SessionEnded",
    "ClientError",
    "ClientTimeout",
    "ClientRejected",
    "ConfigError",
    "CorruptLog",
]


class TradefolioError(Exception):
    """Base class for all package errors."""


# -- accounting ---------------------------------------------------------

class KeyMismatch(TradefolioError):
    """Two asset-keyed mappings do not share the same key set."""


class ZeroValuePortfolio(TradefolioError):
    """A rebalance asked for risky exposure with no capital to allocate."""


class AllocationError(TradefolioError):
    """A proposed allocation failed validation."""


class UnknownAsset(AllocationError):
    """Allocation names an asset outside the market universe."""


class NegativeWeight(AllocationError):
    """Allocation contains a negative weight."""


class SumOutOfBand(AllocationError):
    """Allocation weights do not sum close enough to one to repair."""


class BothSidesSet(AllocationError):
    """Both outcome sides of one prediction question carry weight."""


class WrongMarketKind(TradefolioError):
    """Operation only defined for the other market kind."""


# -- response protocol --------------------------------------------------

class ParseError(TradefolioError):
    """Model response could not be turned into an allocation."""


class NoObjectFound(ParseError):
    """Response text contains no parseable JSON object."""


class SchemaMismatch(ParseError):
    """A JSON object was found but does not match the response schema."""


# -- metrics ------------------------------------------------------------

class MetricsError(TradefolioError):
    """A metric could not be computed from the given series."""


class SeriesTooShort(MetricsError):
    """Series has too few points for the requested statistic."""


class NonPositiveStart(MetricsError):
    """Value series starts at or below zero."""


class EmptySeries(MetricsError):
    """Series is empty."""


class LagTooLarge(MetricsError):
    """Requested lag leaves no evaluation window in the series."""


class MisalignedHistories(MetricsError):
    """Holdings and price histories disagree in length or key sets."""


# -- ingestion ----------------------------------------------------------

class IngestionError(TradefolioError):
    """Raw market data could not be normalized or stored."""


class NormalizationError(IngestionError):
    """A quoted price is outside every recognised quoting convention."""


class ConflictingValue(IngestionError):
    """An upsert would silently overwrite a different stored value."""


class ProviderError(IngestionError):
    """A data provider returned an unusable payload."""


# -- environment / feeds ------------------------------------------------

class FeedError(TradefolioError):
    """Price or news lookup failed."""


class FeedUnavailable(FeedError):
    """Live data source unreachable after retries; session must halt."""


class NoPriceEverSeen(FeedError):
    """Asset has no price at or before the requested date."""


class SessionEnded(TradefolioError):
    """Action applied to a session that is no longer running."""


# -- model clients ------------------------------------------------------

class ClientError(TradefolioError):
    """Chat completion request failed."""


class ClientTimeout(ClientError):
    """Provider did not answer within the configured timeout."""


class ClientRejected(ClientError):
    """Provider rejected the request (auth, quota, bad model id)."""


# -- configuration / persistence ----------------------------------------

class ConfigError(TradefolioError):
    """Run configuration is missing or inconsistent."""


class CorruptLog(TradefolioError):
    """Session log failed structural validation."""
