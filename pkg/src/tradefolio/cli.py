"""Command-line entry points.

Four subcommands cover the whole workflow: ``fetch`` snapshots market
data into the store, ``run`` drives trading sessions over it, and
``report`` / ``delta`` turn the session logs into tables.
"""

from __future__ import annotations

import datetime as dt
import re
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path

import click

from .agents.baselines import AllCashAgent, BuyAndHoldAgent, EqualWeightAgent, hold_allocation
from .agents.clients import HttpChatClient, ModelClientConfig
from .agents.harness import Agent, AgentDecision, ExecutionPricedAgent, LLMAgent
from .agents.memory import MemoryWindow
from .agents.parsing import parse_allocation_response
from .config import ModelEntry, RunConfig, load_config
from .domain import AllocationVector, MarketKind, MarketSpec, NewsItem, Observation, PriceVector
from .environment import SessionStatus, run_episode
from .errors import ConfigError, LagTooLarge, TradefolioError
from .ingestion.equities import fetch_equity_history
from .ingestion.feeds import LiveFeed, ReplayFeed
from .ingestion.news import COMPANY_NAMES, fetch_news
from .ingestion.predictions import discover_markets, fetch_prediction_history
from .ingestion.snapshots import SnapshotStore
from .reporting import (
    build_delta_table,
    build_report_rows,
    render_delta_table,
    render_report_table,
    write_delta_report,
    write_report,
)
from .sessionlog import SessionLogHeader, SessionLogWriter, read_session_log, resume_point

_BASELINES = {
    "equal-weight": EqualWeightAgent,
    "all-cash": AllCashAgent,
    "buy-and-hold": BuyAndHoldAgent,
}


def _slug(name: str) -> str:
    out = re.sub(r"[^A-Za-z0-9._-]+", "-", name).strip("-.")
    return out or "model"


class IntervalGatedAgent:
    """Lets the wrapped agent decide only every ``interval``-th step and
    holds the current positions in between."""

    def __init__(self, inner: Agent | ExecutionPricedAgent, interval: int, band: float) -> None:
        if interval < 1:
            raise ValueError(f"interval must be >= 1, got {interval}")
        self.inner = inner
        self.interval = interval
        self.band = band
        self.name = inner.name

    def allocation_at(
        self,
        spec: MarketSpec,
        obs: Observation,
        memory: MemoryWindow,
        exec_prices: PriceVector,
    ) -> tuple[str, AllocationVector]:
        if obs.step % self.interval != 0:
            return "hold until next rebalance date", hold_allocation(spec, obs.positions, exec_prices)
        if isinstance(self.inner, ExecutionPricedAgent) and hasattr(self.inner, "allocation_at"):
            return self.inner.allocation_at(spec, obs, memory, exec_prices)
        decision: AgentDecision = self.inner.decide(spec, obs, memory)
        return parse_allocation_response(decision.raw_response, spec, band=self.band)


def _make_agent(entry: ModelEntry, cfg: RunConfig) -> Agent | ExecutionPricedAgent:
    if entry.is_baseline:
        kind = entry.model.split(":", 1)[1]
        factory = _BASELINES.get(kind)
        if factory is None:
            known = ", ".join(sorted(_BASELINES))
            raise ConfigError(f"unknown baseline {kind!r}; known: {known}")
        agent: Agent | ExecutionPricedAgent = factory()
    else:
        client_config = ModelClientConfig(
            model=entry.model,
            temperature=entry.temperature,
            max_tokens=entry.max_tokens,
            style=entry.style,
        )
        agent = LLMAgent(HttpChatClient(), client_config)
    if cfg.rebalance_interval > 1:
        return IntervalGatedAgent(agent, cfg.rebalance_interval, cfg.renormalize_band)
    return agent


def _prediction_questions(cfg: RunConfig, store: SnapshotStore) -> tuple[str, ...]:
    if cfg.questions:
        return cfg.questions
    questions = tuple(e.question for e in store.markets())[: cfg.discovery_limit]
    if not questions:
        raise ConfigError(
            "no questions configured and the store catalog is empty; run 'tradefolio fetch' first"
        )
    return questions


def _build_spec(cfg: RunConfig, store: SnapshotStore) -> MarketSpec:
    if cfg.market is MarketKind.STOCK:
        return cfg.spec()
    return MarketSpec.prediction(_prediction_questions(cfg, store))


def _asset_keys(spec: MarketSpec, store: SnapshotStore) -> dict[str, str]:
    """Map prediction assets to the store keys their prices live under.

    Questions with no catalog entry fall back to the asset name itself,
    which is how synthetic fixtures are keyed.
    """
    if spec.kind is not MarketKind.PREDICTION:
        return {}
    by_question = {e.question: e for e in store.markets()}
    keys: dict[str, str] = {}
    for question in spec.questions:
        entry = by_question.get(question)
        if entry is not None:
            keys[f"{question}_Yes"] = entry.yes_token
            keys[f"{question}_No"] = entry.no_token
    return keys


def _bucket_news(items: list[NewsItem], start: dt.date, end: dt.date) -> dict[dt.date, list[NewsItem]]:
    """One bucket per day in [start, end]; empty days stay present so
    the store records that the day was covered."""
    days = (end - start).days + 1
    buckets: dict[dt.date, list[NewsItem]] = {
        start + dt.timedelta(days=i): [] for i in range(days)
    }
    for item in items:
        day = dt.datetime.fromtimestamp(item.published_at, dt.timezone.utc).date()
        if day in buckets:
            buckets[day].append(item)
    return buckets


@dataclass
class RunOutcome:
    model: str
    log_path: Path
    status: str
    new_steps: int
    final_value: float | None
    error: str | None = None


def _run_one(entry: ModelEntry, cfg: RunConfig, spec: MarketSpec,
             store: SnapshotStore, dates: list[dt.date],
             asset_keys: dict[str, str]) -> RunOutcome:
    log_path = cfg.out_dir / f"{cfg.market.value}-{_slug(entry.model)}.jsonl"
    header = SessionLogHeader.for_run(spec, entry.model, cfg.initial_capital)

    resume = None
    remaining = dates
    if log_path.exists():
        existing, records = read_session_log(log_path)
        if existing.model != entry.model:
            raise ConfigError(f"{log_path} belongs to model {existing.model!r}")
        point = resume_point(existing, records, spec, cfg.memory_horizon)
        done = point.state.step
        logged = [r.date for r in records]
        if logged != dates[:done]:
            raise ConfigError(
                f"{log_path} was recorded over different dates than the config lists"
            )
        if done >= len(dates) - 1:
            return RunOutcome(entry.model, log_path, "complete", 0, point.state.value)
        remaining = dates[done:]
        resume = point

    writer = SessionLogWriter(log_path, header)
    feed = ReplayFeed(store, cfg.market, asset_keys)
    agent = _make_agent(entry, cfg)
    state, _ = run_episode(
        spec,
        agent,
        feed,
        remaining,
        cfg.initial_capital,
        max_retries=cfg.retries,
        memory_horizon=cfg.memory_horizon,
        lookback_days=cfg.lookback_days,
        news_window_days=cfg.news_window_days,
        band=cfg.renormalize_band,
        resume=resume,
        on_record=writer.append,
    )
    new_steps = state.step - (resume.state.step if resume else 0)
    status = state.status.value
    if state.status is SessionStatus.HALTED:
        status = f"halted ({state.halt_reason})"
    return RunOutcome(entry.model, log_path, status, new_steps, state.value)


@click.group()
def main() -> None:
    """Multi-market portfolio sessions for language-model agents."""


@main.command()
@click.option("--config", "config_path", required=True,
              type=click.Path(exists=True, dir_okay=False), help="Run configuration YAML.")
def fetch(config_path: str) -> None:
    """Snapshot price history, market listings, and news into the store."""
    try:
        cfg = load_config(config_path)
        store = SnapshotStore(cfg.store)
        start, end = cfg.dates[0], cfg.dates[-1]
        price_start = start - dt.timedelta(days=cfg.lookback_days)
        news_start = start - dt.timedelta(days=cfg.news_window_days)
        policy = cfg.fetch_policy

        if cfg.market is MarketKind.STOCK:
            for ticker in cfg.universe:
                points = fetch_equity_history(ticker, price_start, end, policy)
                for p in points:
                    store.upsert_price("stock", ticker, p.date, p.price, p.volume)
                click.echo(f"{ticker}: {len(points)} bars")
            for ticker in cfg.universe:
                items = fetch_news(ticker, MarketKind.STOCK, news_start, end, policy,
                                   company_names=COMPANY_NAMES)
                for day, day_items in _bucket_news(items, news_start, end).items():
                    store.upsert_news(ticker, day, day_items)
                click.echo(f"{ticker}: {len(items)} news items")
            return

        discovered = discover_markets(policy, price_start, end,
                                      limit=cfg.discovery_limit,
                                      flat_threshold=cfg.flat_market_threshold)
        fetched = set()
        for market in discovered:
            store.upsert_market(market.entry)
            for token, history in ((market.entry.yes_token, market.yes_history),
                                   (market.entry.no_token, market.no_history)):
                for p in history:
                    store.upsert_price("prediction", token, p.date, p.price, p.volume)
            fetched.add(market.entry.question)
            click.echo(f"{market.entry.slug}: {len(market.yes_history)} bars")
        catalog = {e.question: e for e in store.markets()}
        questions = cfg.questions or tuple(m.entry.question for m in discovered)
        for question in questions:
            entry = catalog.get(question)
            if entry is None:
                raise ConfigError(f"question not in the market catalog: {question!r}")
            if question not in fetched:
                for token in (entry.yes_token, entry.no_token):
                    for p in fetch_prediction_history(token, price_start, end, policy):
                        store.upsert_price("prediction", token, p.date, p.price, p.volume)
            items = fetch_news(question, MarketKind.PREDICTION, news_start, end, policy)
            for day, day_items in _bucket_news(items, news_start, end).items():
                store.upsert_news(question, day, day_items)
            click.echo(f"{question}: {len(items)} news items")
    except TradefolioError as exc:
        raise click.ClickException(str(exc)) from exc


@main.command()
@click.option("--config", "config_path", required=True,
              type=click.Path(exists=True, dir_okay=False), help="Run configuration YAML.")
def run(config_path: str) -> None:
    """Run one session per configured model over the configured dates.

    An existing log resumes where it stopped; replaying a finished log
    is a no-op. In live mode the dates that have already happened are
    fetched first, so a daily invocation extends each log by one step.
    """
    try:
        cfg = load_config(config_path)
        store = SnapshotStore(cfg.store)
        spec = _build_spec(cfg, store)
        asset_keys = _asset_keys(spec, store)
        dates = list(cfg.dates)

        if cfg.mode == "live":
            today = dt.date.today()
            dates = [d for d in dates if d <= today]
            if len(dates) < 2:
                click.echo("fewer than two configured dates have happened; nothing to run yet")
                return
            live = LiveFeed(store, spec, cfg.fetch_policy, asset_keys,
                            company_names=COMPANY_NAMES if cfg.market is MarketKind.STOCK else None,
                            lookback_days=cfg.lookback_days,
                            news_window_days=cfg.news_window_days)
            for date in dates:
                live.ensure_date(date)

        cfg.out_dir.mkdir(parents=True, exist_ok=True)
        outcomes: list[RunOutcome] = []
        workers = cfg.concurrency or min(4, len(cfg.models))

        def job(entry: ModelEntry) -> RunOutcome:
            try:
                return _run_one(entry, cfg, spec, store, dates, asset_keys)
            except TradefolioError as exc:
                log_path = cfg.out_dir / f"{cfg.market.value}-{_slug(entry.model)}.jsonl"
                return RunOutcome(entry.model, log_path, "failed", 0, None, error=str(exc))

        if workers <= 1 or len(cfg.models) == 1:
            outcomes = [job(entry) for entry in cfg.models]
        else:
            with ThreadPoolExecutor(max_workers=workers) as pool:
                outcomes = list(pool.map(job, cfg.models))

        failed = False
        for outcome in outcomes:
            if outcome.error is not None:
                failed = True
                click.echo(f"{outcome.model}: failed: {outcome.error}")
                continue
            value = f", value {outcome.final_value:.4f}" if outcome.final_value is not None else ""
            click.echo(
                f"{outcome.model}: {outcome.status}, +{outcome.new_steps} steps{value}"
                f" -> {outcome.log_path}"
            )
        if failed:
            raise click.ClickException("one or more sessions failed")
    except TradefolioError as exc:
        raise click.ClickException(str(exc)) from exc


def _resolve_logs(logs: tuple[str, ...], cfg: RunConfig | None) -> list[Path]:
    if logs:
        return [Path(p) for p in logs]
    if cfg is not None:
        found = sorted(cfg.out_dir.glob("*.jsonl"))
        if found:
            return found
    raise click.UsageError("pass session logs or a --config whose out_dir contains some")


@main.command()
@click.argument("logs", nargs=-1, type=click.Path(exists=True, dir_okay=False))
@click.option("--config", "config_path", type=click.Path(exists=True, dir_okay=False),
              default=None, help="Supplies default logs, rate, and output directory.")
@click.option("--rate", type=float, default=None,
              help="Per-step risk-free rate for the reward-to-variability ratio.")
@click.option("--out", "out_dir", type=click.Path(file_okay=False), default=None,
              help="Also write report.txt and report.json here.")
def report(logs: tuple[str, ...], config_path: str | None, rate: float | None,
           out_dir: str | None) -> None:
    """Tabulate session metrics from one or more logs."""
    try:
        cfg = load_config(config_path) if config_path else None
        paths = _resolve_logs(logs, cfg)
        if rate is None:
            rate = cfg.risk_free_rate if cfg else 0.0
        rows = build_report_rows(paths, rate)
        click.echo(render_report_table(rows), nl=False)
        if out_dir is None and cfg is not None:
            out_dir = str(cfg.out_dir)
        if out_dir is not None:
            table_path, json_path = write_report(rows, out_dir)
            click.echo(f"wrote {table_path} and {json_path}")
    except TradefolioError as exc:
        raise click.ClickException(str(exc)) from exc


@main.command()
@click.argument("logs", nargs=-1, type=click.Path(exists=True, dir_okay=False))
@click.option("--config", "config_path", type=click.Path(exists=True, dir_okay=False),
              default=None, help="Supplies default logs and output directory.")
@click.option("--lags", default="1,2,3", show_default=True,
              help="Comma-separated execution lags to compare against lag zero.")
@click.option("--out", "out_dir", type=click.Path(file_okay=False), default=None,
              help="Also write delta.txt and delta.json here.")
def delta(logs: tuple[str, ...], config_path: str | None, lags: str, out_dir: str | None) -> None:
    """Show how much delayed execution would have changed each return."""
    try:
        lag_values = [int(part) for part in lags.split(",") if part.strip()]
    except ValueError:
        raise click.UsageError(f"--lags must be comma-separated integers, got {lags!r}")
    if not lag_values or any(k < 0 for k in lag_values):
        raise click.UsageError("--lags needs at least one non-negative integer")
    try:
        cfg = load_config(config_path) if config_path else None
        paths = _resolve_logs(logs, cfg)
        table = build_delta_table(paths, lag_values)
        click.echo(render_delta_table(table), nl=False)
        if out_dir is None and cfg is not None:
            out_dir = str(cfg.out_dir)
        if out_dir is not None:
            text_path, json_path = write_delta_report(table, out_dir)
            click.echo(f"wrote {text_path} and {json_path}")
    except LagTooLarge as exc:
        raise click.ClickException(str(exc)) from exc
    except TradefolioError as exc:
        raise click.ClickException(str(exc)) from exc


if __name__ == "__main__":
    main()
