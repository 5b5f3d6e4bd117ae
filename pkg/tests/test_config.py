"""YAML run configuration parsing and cross-checks."""

import datetime as dt
import textwrap

import pytest

from tradefolio.config import (
    DEFAULT_PREDICTION_CAPITAL,
    DEFAULT_STOCK_CAPITAL,
    TRADING_DAYS_PER_YEAR,
    load_config,
)
from tradefolio.domain import DEFAULT_STOCK_TICKERS, MarketKind
from tradefolio.errors import ConfigError

D = dt.date


def _write(tmp_path, text, name="run.yaml"):
    path = tmp_path / name
    path.write_text(textwrap.dedent(text), encoding="utf-8")
    return path


MINIMAL_STOCK = """
    market: stock
    store: data
    dates:
      - 2025-03-03
      - 2025-03-04
    models:
      - baseline:all-cash
"""


def test_minimal_stock_defaults(tmp_path):
    cfg = load_config(_write(tmp_path, MINIMAL_STOCK))
    assert cfg.market is MarketKind.STOCK
    assert cfg.mode == "replay"
    assert cfg.universe == DEFAULT_STOCK_TICKERS
    assert cfg.questions == ()
    assert cfg.initial_capital == DEFAULT_STOCK_CAPITAL
    assert cfg.risk_free_rate == pytest.approx(0.04 / TRADING_DAYS_PER_YEAR)
    assert cfg.memory_horizon == 10
    assert cfg.retries == 2
    assert cfg.rebalance_interval == 1
    assert cfg.dates == (D(2025, 3, 3), D(2025, 3, 4))
    assert cfg.models[0].model == "baseline:all-cash"
    assert cfg.models[0].is_baseline
    # relative paths resolve against the config's directory
    assert cfg.store == tmp_path / "data"
    assert cfg.out_dir == tmp_path / "runs"

    spec = cfg.spec()
    assert spec.assets[-1] == "CASH"
    assert len(spec.assets) == 16


def test_date_range_form_with_weekday_filter(tmp_path):
    cfg = load_config(_write(tmp_path, """
        market: stock
        store: data
        dates:
          start: 2025-03-06
          end: 2025-03-11
          weekdays_only: true
        models: [baseline:all-cash]
    """))
    # the 8th and 9th are a weekend
    assert cfg.dates == (D(2025, 3, 6), D(2025, 3, 7), D(2025, 3, 10), D(2025, 3, 11))

    cfg = load_config(_write(tmp_path, """
        market: stock
        store: data
        dates: {start: 2025-03-07, end: 2025-03-09}
        models: [baseline:all-cash]
    """, name="range.yaml"))
    assert len(cfg.dates) == 3  # weekend kept without the filter


def test_model_entry_forms(tmp_path):
    cfg = load_config(_write(tmp_path, """
        market: stock
        store: data
        dates: [2025-03-03, 2025-03-04]
        models:
          - baseline:equal-weight
          - openai/gpt-5
          - model: anthropic/claude-sonnet-4.5
            temperature: 0.7
            max_tokens: 9000
          - model: deepseek/deepseek-chat-v3.1
            style: structured-reasoning
    """))
    assert [m.model for m in cfg.models] == [
        "baseline:equal-weight",
        "openai/gpt-5",
        "anthropic/claude-sonnet-4.5",
        "deepseek/deepseek-chat-v3.1",
    ]
    assert cfg.models[1].temperature == 0.3
    assert cfg.models[2].temperature == 0.7
    assert cfg.models[2].max_tokens == 9000
    assert cfg.models[3].style == "structured-reasoning"
    assert not cfg.models[1].is_baseline


def test_prediction_defaults_and_zero_rate(tmp_path):
    cfg = load_config(_write(tmp_path, """
        market: prediction
        store: data
        dates: [2025-03-03, 2025-03-04, 2025-03-05]
        models: [baseline:all-cash]
        questions:
          - Will it rain tomorrow?
    """))
    assert cfg.market is MarketKind.PREDICTION
    assert cfg.initial_capital == DEFAULT_PREDICTION_CAPITAL
    assert cfg.risk_free_rate == 0.0
    assert cfg.universe == ()
    spec = cfg.spec()
    assert spec.assets == ("Will it rain tomorrow?_Yes", "Will it rain tomorrow?_No", "CASH")


def test_prediction_rejects_nonzero_rate(tmp_path):
    for line in ("risk_free_rate_annual: 0.04", "risk_free_rate: 0.001"):
        with pytest.raises(ConfigError, match="zero risk-free rate"):
            load_config(_write(tmp_path, f"""
                market: prediction
                store: data
                dates: [2025-03-03, 2025-03-04]
                models: [baseline:all-cash]
                {line}
            """))


def test_stock_rate_overrides(tmp_path):
    cfg = load_config(_write(tmp_path, MINIMAL_STOCK + "    risk_free_rate_annual: 0.0504\n"))
    assert cfg.risk_free_rate == pytest.approx(0.0504 / 252)
    cfg = load_config(
        _write(tmp_path, MINIMAL_STOCK + "    risk_free_rate: 0.0002\n", name="b.yaml"))
    assert cfg.risk_free_rate == 0.0002


def test_fetch_policy_block(tmp_path):
    cfg = load_config(_write(tmp_path, MINIMAL_STOCK + """
    fetch:
      max_retries: 5
      backoff_base: 0.5
      jitter: [0.0, 0.1]
      timeout: 30
    """))
    assert cfg.fetch_policy.max_retries == 5
    assert cfg.fetch_policy.backoff_base == 0.5
    assert cfg.fetch_policy.jitter_range == (0.0, 0.1)
    assert cfg.fetch_policy.timeout == 30.0

    with pytest.raises(ConfigError, match="unknown fetch keys"):
        load_config(_write(tmp_path, MINIMAL_STOCK + "    fetch:\n      retries: 5\n",
                           name="bad.yaml"))
    with pytest.raises(ConfigError, match="fetch policy"):
        load_config(_write(tmp_path, MINIMAL_STOCK + "    fetch:\n      max_retries: 0\n",
                           name="bad2.yaml"))


@pytest.mark.parametrize(
    "mutation, message",
    [
        ("market: bonds", "market must be"),
        ("mode: paper", "mode must be"),
        ("surprise_key: 1", "unknown config keys"),
        ("dates: [2025-03-03]", "at least two dates"),
        ("dates: [2025-03-04, 2025-03-03]", "strictly increasing"),
        ("dates: [2025-03-03, not-a-date]", "expected a YYYY-MM-DD date"),
        ("dates: {start: 2025-03-05, end: 2025-03-03}", "before dates.start"),
        ("models: []", "non-empty list"),
        ("models: [{temperature: 0.5}]", "'model' key"),
        ("models: [{model: m, top_p: 1}]", "unknown model entry keys"),
        ("models: [a/b, a/b]", "duplicate model entries"),
        ("initial_capital: 0", "must be positive"),
        ("memory_horizon: 0", "at least 1"),
        ("retries: -1", "non-negative"),
        ("rebalance_interval: 0", "at least 1"),
        ("universe: []", "universe must not be empty"),
    ],
)
def test_validation_errors(tmp_path, mutation, message):
    base = {
        "market": "market: stock",
        "store": "store: data",
        "dates": "dates: [2025-03-03, 2025-03-04]",
        "models": "models: [baseline:all-cash]",
    }
    key = mutation.split(":")[0]
    if key in base:
        base[key] = mutation
        text = "\n".join(base.values())
    else:
        text = "\n".join(base.values()) + "\n" + mutation
    with pytest.raises(ConfigError, match=message):
        load_config(_write(tmp_path, text))


def test_missing_pieces(tmp_path):
    with pytest.raises(ConfigError, match="no such config file"):
        load_config(tmp_path / "absent.yaml")
    with pytest.raises(ConfigError, match="'store' path"):
        load_config(_write(tmp_path, """
            market: stock
            dates: [2025-03-03, 2025-03-04]
            models: [baseline:all-cash]
        """))
    with pytest.raises(ConfigError, match="must be a mapping"):
        load_config(_write(tmp_path, "- just\n- a\n- list\n"))
    with pytest.raises(ConfigError, match="invalid YAML"):
        load_config(_write(tmp_path, "market: [unclosed\n"))


def test_absolute_paths_kept(tmp_path):
    cfg = load_config(_write(tmp_path, f"""
        market: stock
        store: {tmp_path}/elsewhere/data
        out_dir: {tmp_path}/elsewhere/runs
        dates: [2025-03-03, 2025-03-04]
        models: [baseline:all-cash]
    """))
    assert cfg.store == tmp_path / "elsewhere" / "data"
    assert cfg.out_dir == tmp_path / "elsewhere" / "runs"
