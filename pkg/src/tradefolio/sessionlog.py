"""Session logs: append-only JSONL, one file per (market, model) run.

Line 1 is a header naming the format version, market, model, universe,
and starting capital; every following line is one executed step in
wire order. Nothing in a log depends on wall-clock time, so identical
runs produce identical bytes and a resumed run extends the file
without rewriting a single earlier byte.
"""

from __future__ import annotations

import datetime as dt
import json
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Iterable

from .agents.baselines import all_cash_allocation
from .agents.memory import MemoryEntry, MemoryWindow, observation_digest
from .domain import AllocationVector, Holdings, MarketKind, MarketSpec, PriceVector
from .environment import ResumePoint, SessionRecord, SessionState, SessionStatus
from .errors import ConfigError, CorruptLog

__all__ = [
    "LOG_FORMAT",
    "LOG_VERSION",
    "SessionLogHeader",
    "SessionLogWriter",
    "read_session_log",
    "value_series",
    "cash_ratio_series",
    "effective_allocations",
    "position_histories",
    "resume_point",
]

LOG_FORMAT = "tradefolio-session-log"
LOG_VERSION = 1


def _dumps(obj: Any) -> str:
    return json.dumps(obj, ensure_ascii=False, separators=(",", ":"))


@dataclass(frozen=True)
class SessionLogHeader:
    market: MarketKind
    model: str
    initial_capital: float
    assets: tuple[str, ...]
    cash: str

    @classmethod
    def for_run(cls, spec: MarketSpec, model: str, initial_capital: float) -> "SessionLogHeader":
        return cls(spec.kind, model, float(initial_capital), spec.assets, spec.cash)

    def to_json_dict(self) -> dict[str, Any]:
        return {
            "format": LOG_FORMAT,
            "version": LOG_VERSION,
            "market": self.market.value,
            "model": self.model,
            "initial_capital": self.initial_capital,
            "assets": list(self.assets),
            "cash": self.cash,
        }

    @classmethod
    def from_json_dict(cls, row: dict[str, Any]) -> "SessionLogHeader":
        if row.get("format") != LOG_FORMAT:
            raise CorruptLog(f"not a session log (format {row.get('format')!r})")
        if row.get("version") != LOG_VERSION:
            raise CorruptLog(f"unsupported log version {row.get('version')!r}")
        return cls(
            market=MarketKind(row["market"]),
            model=row["model"],
            initial_capital=float(row["initial_capital"]),
            assets=tuple(row["assets"]),
            cash=row["cash"],
        )


class SessionLogWriter:
    """Appends records as they happen; never rewrites prior lines."""

    def __init__(self, path: str | Path, header: SessionLogHeader) -> None:
        self.path = Path(path)
        self.header = header
        if self.path.exists() and self.path.stat().st_size > 0:
            existing, _ = read_session_log(self.path)
            if existing != header:
                raise ConfigError(
                    f"{self.path} belongs to a different run "
                    f"({existing.model!r} on {existing.market.value})"
                )
        else:
            self.path.parent.mkdir(parents=True, exist_ok=True)
            with open(self.path, "w", encoding="utf-8") as fh:
                fh.write(_dumps(header.to_json_dict()) + "\n")

    def append(self, record: SessionRecord) -> None:
        with open(self.path, "a", encoding="utf-8") as fh:
            fh.write(_dumps(record.to_json_dict()) + "\n")


def read_session_log(path: str | Path) -> tuple[SessionLogHeader, list[SessionRecord]]:
    path = Path(path)
    with open(path, encoding="utf-8") as fh:
        lines = [line for line in fh.read().splitlines() if line.strip()]
    if not lines:
        raise CorruptLog(f"{path}: empty file")
    try:
        header = SessionLogHeader.from_json_dict(json.loads(lines[0]))
    except (json.JSONDecodeError, KeyError, ValueError) as exc:
        raise CorruptLog(f"{path}:1: bad header: {exc}") from exc
    records = []
    previous: dt.date | None = None
    for n, line in enumerate(lines[1:], start=2):
        try:
            record = SessionRecord.from_json_dict(json.loads(line))
        except (json.JSONDecodeError, KeyError, ValueError, TypeError) as exc:
            raise CorruptLog(f"{path}:{n}: bad record: {exc}") from exc
        if previous is not None and record.date <= previous:
            raise CorruptLog(f"{path}:{n}: dates must be strictly increasing")
        previous = record.date
        records.append(record)
    return header, records


def value_series(header: SessionLogHeader, records: Iterable[SessionRecord]) -> list[float]:
    """Portfolio values including the starting capital."""
    return [header.initial_capital] + [r.value for r in records]


def cash_ratio_series(header: SessionLogHeader,
                      records: Iterable[SessionRecord]) -> list[float]:
    """Fraction of value parked in cash after each step (cash price is 1)."""
    out = [1.0]
    for r in records:
        out.append(r.holdings_after[header.cash] / r.value)
    return out


def effective_allocations(header: SessionLogHeader,
                          records: Iterable[SessionRecord]) -> list[AllocationVector]:
    """The allocation actually executed each step.

    Steps whose response never validated fell back to the previous
    validated allocation, all cash before any existed; that walk is
    deterministic, so it can be replayed from the records alone.
    """
    spec_like_assets = header.assets
    fallback = AllocationVector(
        {a: (1.0 if a == header.cash else 0.0) for a in spec_like_assets}
    )
    out: list[AllocationVector] = []
    last = fallback
    for r in records:
        if r.allocation is not None:
            last = AllocationVector({a: r.allocation.get(a, 0.0) for a in spec_like_assets})
        out.append(last)
    return out


def position_histories(
    header: SessionLogHeader, records: list[SessionRecord]
) -> tuple[list[Holdings], list[PriceVector]]:
    """Aligned holdings and price vectors for lag analysis.

    Element i holds the book and prices at the i-th session date: the
    starting all-cash book at the first decision date's prices, then
    each executed step at its execution prices.
    """
    if not records:
        raise CorruptLog("log has no records")
    initial = Holdings(
        {a: (header.initial_capital if a == header.cash else 0.0) for a in header.assets}
    )
    holdings = [initial] + [Holdings(r.holdings_after) for r in records]
    prices = [PriceVector(records[0].date, records[0].prices)]
    for r in records:
        exec_date = r.date + dt.timedelta(days=1)
        prices.append(PriceVector(exec_date, r.prices_after))
    return holdings, prices


def resume_point(
    header: SessionLogHeader,
    records: list[SessionRecord],
    spec: MarketSpec,
    memory_horizon: int,
) -> ResumePoint:
    """Rebuild mid-session state exactly as the interrupted run left it."""
    if tuple(header.assets) != spec.assets or header.cash != spec.cash:
        raise ConfigError("log universe does not match the configured market")
    state = SessionState.initial(spec, header.initial_capital)
    effective = effective_allocations(header, records)
    values = value_series(header, records)
    alloc_history = tuple(
        (r.date, effective[i], (r.value - header.initial_capital) / header.initial_capital)
        for i, r in enumerate(records)
    )
    if records:
        holdings = Holdings(records[-1].holdings_after)
    else:
        holdings = state.holdings
    state = SessionState(
        spec=spec,
        step=len(records),
        holdings=holdings,
        value_series=tuple(values),
        allocation_history=alloc_history,
        status=SessionStatus.RUNNING,
        records=tuple(records),
    )
    memory = MemoryWindow(memory_horizon)
    for i, r in enumerate(records):
        memory.remember(MemoryEntry(
            date=r.date,
            allocation=effective[i],
            cumulative_return=(r.value - header.initial_capital) / header.initial_capital,
            digest=observation_digest(r.prices, r.holdings_before, r.news_count),
        ))
    last_validated = None
    for r in records:
        if r.allocation is not None:
            last_validated = AllocationVector(
                {a: r.allocation.get(a, 0.0) for a in header.assets}
            )
    return ResumePoint(state=state, memory=memory, last_validated=last_validated)
