"""Bounded decision memory carried across a session."""

from __future__ import annotations

import datetime as dt
import hashlib
import json
from collections import deque
from dataclasses import dataclass
from typing import Iterable, Mapping

from ..domain import AllocationVector

__all__ = ["MemoryEntry", "MemoryWindow", "observation_digest"]

DEFAULT_MEMORY_HORIZON = 10


def observation_digest(
    prices: Mapping[str, float],
    holdings: Mapping[str, float],
    news_count: int,
) -> str:
    """Short stable fingerprint of what the agent saw."""
    payload = json.dumps(
        {"prices": dict(prices), "holdings": dict(holdings), "news": news_count},
        sort_keys=True,
    )
    return hashlib.sha256(payload.encode()).hexdigest()[:16]


@dataclass(frozen=True)
class MemoryEntry:
    date: dt.date
    allocation: AllocationVector
    cumulative_return: float
    digest: str


class MemoryWindow:
    """Sliding window over the most recent decisions, oldest first.

    Capacity is the horizon; remembering past it silently drops the
    oldest entry.
    """

    def __init__(self, horizon: int = DEFAULT_MEMORY_HORIZON,
                 entries: Iterable[MemoryEntry] = ()) -> None:
        if horizon < 1:
            raise ValueError(f"horizon must be at least 1, got {horizon}")
        self.horizon = horizon
        self._entries: deque[MemoryEntry] = deque(entries, maxlen=horizon)

    def remember(self, entry: MemoryEntry) -> None:
        self._entries.append(entry)

    @property
    def entries(self) -> tuple[MemoryEntry, ...]:
        return tuple(self._entries)

    def __len__(self) -> int:
        return len(self._entries)
