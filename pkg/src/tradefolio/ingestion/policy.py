"""Retry discipline for outbound data requests."""

from __future__ import annotations

import random
import time
from dataclasses import dataclass
from typing import Callable, TypeVar

from ..errors import ProviderError

__all__ = ["FetchPolicy", "backoff_delay", "fetch_with_policy"]

T = TypeVar("T")


@dataclass(frozen=True)
class FetchPolicy:
    """How hard to try against a flaky provider.

    ``max_retries`` counts retries after the initial attempt. Retry n
    sleeps ``backoff_base * 2**(n-1)`` seconds plus a uniform draw from
    ``jitter_range`` before firing.
    """

    max_retries: int = 3
    backoff_base: float = 1.0
    jitter_range: tuple[float, float] = (0.1, 0.5)
    timeout: float = 10.0
    user_agent: str = "tradefolio/0.1 (market data collector)"

    def __post_init__(self) -> None:
        if self.max_retries < 1:
            raise ValueError(f"max_retries must be at least 1, got {self.max_retries}")
        if self.backoff_base < 0:
            raise ValueError("backoff_base must be non-negative")
        lo, hi = self.jitter_range
        if not (0 <= lo <= hi):
            raise ValueError(f"jitter_range must satisfy 0 <= lo <= hi, got {self.jitter_range}")
        if not self.timeout > 0:
            raise ValueError("timeout must be positive")


def backoff_delay(policy: FetchPolicy, retry: int, rng: random.Random) -> float:
    """Sleep before retry number ``retry`` (1-based)."""
    if retry < 1:
        raise ValueError(f"retry index is 1-based, got {retry}")
    lo, hi = policy.jitter_range
    return policy.backoff_base * 2 ** (retry - 1) + rng.uniform(lo, hi)


def fetch_with_policy(
    policy: FetchPolicy,
    request: Callable[[], T],
    sleep: Callable[[float], None] = time.sleep,
    rng: random.Random | None = None,
    retriable: tuple[type[Exception], ...] = (Exception,),
) -> T:
    """Run ``request`` under the policy's retry schedule.

    The final failure is wrapped in ``ProviderError`` with the attempt
    count; earlier failures only cost a backoff sleep.
    """
    rng = rng or random.Random()
    attempts = policy.max_retries + 1
    for attempt in range(1, attempts + 1):
        try:
            return request()
        except retriable as exc:
            if attempt == attempts:
                raise ProviderError(
                    f"request failed after {attempts} attempts: {exc}"
                ) from exc
            sleep(backoff_delay(policy, attempt, rng))
    raise AssertionError("unreachable")
