"""The trading session: observe, decide, rebalance, record.

One session is single-threaded and owns its state exclusively. The
decision made from the observation at date t executes at the next
date's prices: the book is marked to those prices first, then redivided
in the target proportions. Every step appends one record carrying the
full audit trail, and a session driven twice over the same frozen data
produces byte-identical records.
"""

from __future__ import annotations

import datetime as dt
import hashlib
from dataclasses import dataclass, replace
from enum import Enum
from typing import Any, Callable, Sequence

from .accounting import RENORMALIZE_BAND, portfolio_value, rebalance, validate_allocation
from .agents.baselines import all_cash_allocation
from .agents.harness import Agent, AgentDecision, ExecutionPricedAgent
from .agents.memory import DEFAULT_MEMORY_HORIZON, MemoryEntry, MemoryWindow, observation_digest
from .agents.parsing import parse_allocation_response, render_allocation_response
from .domain import (
    AllocationVector,
    Holdings,
    MarketKind,
    MarketSpec,
    NewsItem,
    Observation,
    PriceVector,
)
from .errors import (
    AllocationError,
    ClientError,
    FeedUnavailable,
    NoPriceEverSeen,
    ParseError,
    SessionEnded,
)
from .ingestion.feeds import Feed

__all__ = [
    "DEFAULT_RETRIES",
    "HISTORY_LOOKBACK_DAYS",
    "NEWS_WINDOW_DAYS",
    "SessionStatus",
    "DecisionTrace",
    "SessionRecord",
    "SessionState",
    "ResumePoint",
    "resolve_prices",
    "build_observation",
    "apply_action",
    "run_episode",
]

DEFAULT_RETRIES = 2
HISTORY_LOOKBACK_DAYS = 10
NEWS_WINDOW_DAYS = 3

_SESSION_TZ_NAME = {
    MarketKind.STOCK: "America/New_York",
    MarketKind.PREDICTION: "UTC",
}


class SessionStatus(Enum):
    RUNNING = "running"
    ENDED = "ended"
    HALTED = "halted"


@dataclass(frozen=True)
class DecisionTrace:
    """What happened while obtaining one allocation."""

    prompt: str | None
    raw_response: str
    parse_error: str | None
    allocation: AllocationVector | None
    attempts: int

    @property
    def prompt_sha256(self) -> str | None:
        if self.prompt is None:
            return None
        return hashlib.sha256(self.prompt.encode("utf-8")).hexdigest()


@dataclass(frozen=True)
class SessionRecord:
    """One executed step: the observation digest, the raw model
    exchange, and the accounting outcome. Field order is the log's wire
    order and must stay stable."""

    date: dt.date
    prices: dict[str, float]
    holdings_before: dict[str, float]
    news_count: int
    stale: tuple[str, ...]
    prompt_sha256: str | None
    raw_response: str
    parse_error: str | None
    attempts: int
    allocation: dict[str, float] | None
    holdings_after: dict[str, float]
    prices_after: dict[str, float]
    value: float
    step_return: float

    def to_json_dict(self) -> dict[str, Any]:
        return {
            "date": self.date.isoformat(),
            "prices": dict(self.prices),
            "holdings_before": dict(self.holdings_before),
            "news_count": self.news_count,
            "stale": list(self.stale),
            "prompt_sha256": self.prompt_sha256,
            "raw_response": self.raw_response,
            "parse_error": self.parse_error,
            "attempts": self.attempts,
            "allocation": None if self.allocation is None else dict(self.allocation),
            "holdings_after": dict(self.holdings_after),
            "prices_after": dict(self.prices_after),
            "value": self.value,
            "step_return": self.step_return,
        }

    @classmethod
    def from_json_dict(cls, row: dict[str, Any]) -> "SessionRecord":
        return cls(
            date=dt.date.fromisoformat(row["date"]),
            prices=dict(row["prices"]),
            holdings_before=dict(row["holdings_before"]),
            news_count=int(row["news_count"]),
            stale=tuple(row["stale"]),
            prompt_sha256=row["prompt_sha256"],
            raw_response=row["raw_response"],
            parse_error=row["parse_error"],
            attempts=int(row["attempts"]),
            allocation=None if row["allocation"] is None else dict(row["allocation"]),
            holdings_after=dict(row["holdings_after"]),
            prices_after=dict(row["prices_after"]),
            value=float(row["value"]),
            step_return=float(row["step_return"]),
        )


@dataclass(frozen=True)
class SessionState:
    """Complete session state after some number of executed steps."""

    spec: MarketSpec
    step: int
    holdings: Holdings
    value_series: tuple[float, ...]
    allocation_history: tuple[tuple[dt.date, AllocationVector, float], ...]
    status: SessionStatus
    records: tuple[SessionRecord, ...] = ()
    halt_reason: str | None = None

    @classmethod
    def initial(cls, spec: MarketSpec, initial_capital: float) -> "SessionState":
        if not initial_capital > 0:
            raise ValueError(f"initial capital must be positive, got {initial_capital}")
        units = {a: (initial_capital if a == spec.cash else 0.0) for a in spec.assets}
        return cls(
            spec=spec,
            step=0,
            holdings=Holdings(units),
            value_series=(float(initial_capital),),
            allocation_history=(),
            status=SessionStatus.RUNNING,
        )

    @property
    def value(self) -> float:
        return self.value_series[-1]

    @property
    def initial_capital(self) -> float:
        return self.value_series[0]


@dataclass(frozen=True)
class ResumePoint:
    """Mid-session state reconstructed from a log, ready to continue."""

    state: SessionState
    memory: MemoryWindow
    last_validated: AllocationVector | None


def resolve_prices(feed: Feed, spec: MarketSpec, date: dt.date) -> tuple[PriceVector, frozenset[str]]:
    """Price every asset at a date, carrying stale closes forward.

    Cash is always 1.0. An asset with no price at or before the date at
    all raises ``NoPriceEverSeen``; one whose latest close predates the
    date is flagged stale rather than guessed at.
    """
    prices: dict[str, float] = {}
    stale: set[str] = set()
    for asset in spec.assets:
        if asset == spec.cash:
            prices[asset] = 1.0
            continue
        point = feed.latest_price(asset, date)
        if point is None:
            raise NoPriceEverSeen(f"no price at or before {date} for {asset!r}")
        prices[asset] = point.price
        if point.date < date:
            stale.add(asset)
    vector = PriceVector(date, prices, timezone=_SESSION_TZ_NAME[spec.kind])
    return vector, frozenset(stale)


def build_observation(
    state: SessionState,
    feed: Feed,
    date: dt.date,
    lookback_days: int = HISTORY_LOOKBACK_DAYS,
    news_window_days: int = NEWS_WINDOW_DAYS,
) -> Observation:
    """Assemble what the agent is allowed to see at one date.

    Price history spans the lookback window that ends the day before;
    news spans the trailing window ending the day before as well, so
    the decision date itself never leaks through side channels.
    """
    spec = state.spec
    prices, stale = resolve_prices(feed, spec, date)
    history = {
        a: tuple(feed.price_window(a, date - dt.timedelta(days=lookback_days),
                                   date - dt.timedelta(days=1)))
        for a in spec.assets
        if a != spec.cash
    }
    if spec.kind is MarketKind.PREDICTION:
        tags = list(spec.questions)
    else:
        tags = [a for a in spec.assets if a != spec.cash]
    news: list[NewsItem] = []
    for tag in tags:
        news.extend(
            feed.news_window(tag, date - dt.timedelta(days=news_window_days),
                             date - dt.timedelta(days=1), target=date)
        )
    value = portfolio_value(state.holdings, prices.prices)
    return Observation(
        step=state.step,
        date=date,
        positions=state.holdings,
        prices=prices,
        news=tuple(news),
        price_history=history,
        portfolio_value=value,
        stale=stale,
    )


def apply_action(
    state: SessionState,
    action: AllocationVector,
    next_prices: PriceVector,
    date: dt.date | None = None,
    observation: Observation | None = None,
    trace: DecisionTrace | None = None,
) -> SessionState:
    """Execute one step: mark to the new prices, redivide, record.

    ``date`` is the decision date for the record (defaults to the
    execution date); ``observation`` and ``trace`` fill the audit
    fields when the caller has them.
    """
    if state.status is not SessionStatus.RUNNING:
        raise SessionEnded(f"session is {state.status.value}")
    result = rebalance(state.holdings, next_prices.prices, action, cash=state.spec.cash)
    value_prev = state.value_series[-1]
    value_next = result.pre_trade_value
    step_return = (value_next - value_prev) / value_prev
    cumulative = (value_next - state.initial_capital) / state.initial_capital
    decision_date = date or next_prices.date

    if observation is not None:
        obs_prices = dict(observation.prices.prices)
        holdings_before = dict(observation.positions.units)
        news_count = len(observation.news)
        stale = tuple(sorted(observation.stale))
    else:
        obs_prices = {}
        holdings_before = dict(state.holdings.units)
        news_count = 0
        stale = ()
    trace = trace or DecisionTrace(
        prompt=None,
        raw_response=render_allocation_response("direct action", action),
        parse_error=None,
        allocation=action,
        attempts=1,
    )
    record = SessionRecord(
        date=decision_date,
        prices=obs_prices,
        holdings_before=holdings_before,
        news_count=news_count,
        stale=stale,
        prompt_sha256=trace.prompt_sha256,
        raw_response=trace.raw_response,
        parse_error=trace.parse_error,
        attempts=trace.attempts,
        allocation=None if trace.allocation is None else dict(trace.allocation.weights),
        holdings_after=dict(result.new_holdings.units),
        prices_after=dict(next_prices.prices),
        value=value_next,
        step_return=step_return,
    )
    return replace(
        state,
        step=state.step + 1,
        holdings=result.new_holdings,
        value_series=state.value_series + (value_next,),
        allocation_history=state.allocation_history + ((decision_date, action, cumulative),),
        records=state.records + (record,),
    )


def _obtain_decision(
    agent: Agent | ExecutionPricedAgent,
    spec: MarketSpec,
    obs: Observation,
    memory: MemoryWindow,
    exec_prices: PriceVector,
    max_retries: int,
    band: float,
) -> DecisionTrace:
    """Ask until the response validates or retries run out.

    Every attempt is a fresh agent call; the trace keeps the last raw
    response either way.
    """
    attempts = 0
    prompt: str | None = None
    raw = ""
    error: str | None = None
    while attempts <= max_retries:
        attempts += 1
        if isinstance(agent, ExecutionPricedAgent) and hasattr(agent, "allocation_at"):
            reasoning, proposed = agent.allocation_at(spec, obs, memory, exec_prices)
            raw = render_allocation_response(reasoning, proposed)
            prompt = None
        else:
            decision: AgentDecision = agent.decide(spec, obs, memory)
            raw = decision.raw_response
            prompt = decision.prompt
        try:
            _, allocation = parse_allocation_response(raw, spec, band=band)
        except (ParseError, AllocationError) as exc:
            error = f"{type(exc).__name__}: {exc}"
            continue
        return DecisionTrace(prompt, raw, None, allocation, attempts)
    return DecisionTrace(prompt, raw, error, None, attempts)


def run_episode(
    spec: MarketSpec,
    agent: Agent | ExecutionPricedAgent,
    feed: Feed,
    dates: Sequence[dt.date],
    initial_capital: float,
    max_retries: int = DEFAULT_RETRIES,
    memory_horizon: int = DEFAULT_MEMORY_HORIZON,
    lookback_days: int = HISTORY_LOOKBACK_DAYS,
    news_window_days: int = NEWS_WINDOW_DAYS,
    band: float = RENORMALIZE_BAND,
    resume: ResumePoint | None = None,
    on_record: Callable[[SessionRecord], None] | None = None,
) -> tuple[SessionState, list[SessionRecord]]:
    """Drive one session across consecutive dates.

    A decision is made at every date except the last, and executes at
    the following date's prices; the final date only revalues the book.
    Unusable responses are retried ``max_retries`` times, then the
    last validated allocation (initially all cash) is re-applied. The
    session halts, never crashes, when live data or a model provider
    gives out.
    """
    dates = list(dates)
    if not dates:
        raise ValueError("need at least one date")
    for a, b in zip(dates, dates[1:]):
        if b <= a:
            raise ValueError(f"dates must be strictly increasing, got {a} then {b}")

    if resume is not None:
        state = resume.state
        memory = resume.memory
        last_validated = resume.last_validated
    else:
        state = SessionState.initial(spec, initial_capital)
        memory = MemoryWindow(memory_horizon)
        last_validated = None

    try:
        for i in range(len(dates) - 1):
            date, exec_date = dates[i], dates[i + 1]
            obs = build_observation(state, feed, date,
                                    lookback_days=lookback_days,
                                    news_window_days=news_window_days)
            exec_prices, _ = resolve_prices(feed, spec, exec_date)
            trace = _obtain_decision(agent, spec, obs, memory, exec_prices,
                                     max_retries, band)
            if trace.allocation is not None:
                action = trace.allocation
                last_validated = action
            elif last_validated is not None:
                action = last_validated
            else:
                action = all_cash_allocation(spec)
            state = apply_action(state, action, exec_prices,
                                 date=date, observation=obs, trace=trace)
            memory.remember(MemoryEntry(
                date=date,
                allocation=action,
                cumulative_return=(state.value - state.initial_capital) / state.initial_capital,
                digest=observation_digest(obs.prices.prices, obs.positions.units, len(obs.news)),
            ))
            if on_record is not None:
                on_record(state.records[-1])
    except (FeedUnavailable, ClientError) as exc:
        state = replace(state, status=SessionStatus.HALTED,
                        halt_reason=f"{type(exc).__name__}: {exc}")
        return state, list(state.records)
    state = replace(state, status=SessionStatus.ENDED)
    return state, list(state.records)
