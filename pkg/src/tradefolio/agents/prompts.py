"""Prompt construction for allocation decisions.

These strings are the wire protocol between the environment and a
model: byte-identical input yields byte-identical prompts, and golden
tests pin the exact rendering. Change anything here and the goldens
must be regenerated on purpose.
"""

from __future__ import annotations

import datetime as dt
from zoneinfo import ZoneInfo

from ..domain import MarketKind, MarketSpec, Observation
from .features import extract_features, format_change
from .memory import MemoryWindow

__all__ = [
    "SNIPPET_MAX_CHARS",
    "build_context_prompt",
    "build_decision_prompt",
]

SNIPPET_MAX_CHARS = 500

_SESSION_TZ = {
    MarketKind.STOCK: ("US Eastern Time", ZoneInfo("America/New_York")),
    MarketKind.PREDICTION: ("UTC", ZoneInfo("UTC")),
}

_STOCK_ROLE_LINE = (
    "You are a professional portfolio manager. "
    "Analyze the market data and generate a complete portfolio allocation."
)

_PREDICTION_ROLE_LINE = (
    "You are a professional prediction-market portfolio manager. "
    "Analyze the market data and generate a complete portfolio allocation."
)

_STOCK_GUIDANCE = """PORTFOLIO MANAGEMENT OBJECTIVE:
- Improve total returns by selecting allocations with higher expected return per unit of risk.
- Aim to outperform a reasonable baseline (e.g., equal-weight of AVAILABLE ASSETS) over the next 1–3 months.
- Use CASH tactically for capital protection in unfavorable markets.
EVALUATION CRITERIA:
- Prefer allocations that increase expected excess return and improve risk-adjusted return.
- Maintain sector and factor diversification.
- Be mindful of turnover and liquidity.
PORTFOLIO PRINCIPLES:
- Diversify across sectors and market caps.
- Consider market momentum and fundamentals.
- Balance growth and value opportunities.
- Maintain appropriate position sizes.
- Total allocation must equal 1.0.
- CASH is a valid asset."""

_PREDICTION_GUIDANCE = """PORTFOLIO MANAGEMENT OBJECTIVE:
- For each market, YES and NO are two assets. Allocate to only one at a time. CASH is also valid.
- YES and NO prices represent public-implied probabilities.
DECISION LOGIC:
- Derive market probability p_mkt from price.
- Go LONG {question}_YES if p > p_mkt + costs.
- Go LONG {question}_NO if p < p_mkt - costs.
- Otherwise keep the capital in CASH.

PORTFOLIO PRINCIPLES:
- Diversify across markets.
- No simultaneous YES and NO allocations.
- Total allocation must equal 1.0."""

_STOCK_RULES = """RULES:
1. Return ONLY the JSON object.
2. Allocations must sum to 1.0.
3. CASH allocation should reflect market conditions.
4. Use double quotes for strings.
5. No trailing commas.
6. No extra text outside the JSON.
Your objective is to maximize return while considering previous allocations and performance history."""

_PREDICTION_RULES = """RULES:
1. Return ONLY the JSON object.
2. Allocations must sum to 1.0.
3. Only one side (YES or NO) per question may be non-zero.
4. Use double quotes; no trailing commas.
Your objective is to maximize portfolio return using past allocations and performance history."""

_STOCK_REASONING_HINT = "Brief explanation about why this allocation improves return rate"
_PREDICTION_REASONING_HINT = "Brief explanation of the allocation"


def _collapse_whitespace(text: str) -> str:
    return " ".join(text.split())


def _render_snippet(snippet: str) -> str:
    text = _collapse_whitespace(snippet)
    if len(text) > SNIPPET_MAX_CHARS:
        text = text[:SNIPPET_MAX_CHARS]
    return text + "..."


def _history_lines(dates_prices: list[tuple[dt.date, float]],
                   price_format: str, prefix: str) -> list[str]:
    """Newest first; each change is measured against the line below it."""
    lines = []
    for i in range(len(dates_prices) - 1, -1, -1):
        date, price = dates_prices[i]
        if i == 0:
            change = "N/A"
        else:
            prev = dates_prices[i - 1][1]
            diff = price - prev
            change = f"{diff:+.2f} ({diff / prev * 100.0:+.2f}%)"
        lines.append(f"{prefix}- {date.isoformat()}: {price_format.format(price)} (Change: {change})")
    return lines


def _stock_market_lines(spec: MarketSpec, obs: Observation) -> list[str]:
    lines = []
    for asset in spec.assets:
        if asset == spec.cash:
            continue
        current = obs.prices[asset]
        series = [(pt.date, pt.price) for pt in obs.price_history.get(asset, ())]
        series.append((obs.date, current))
        lines.append(f"{asset}: Current price is ${current:.2f}")
        lines.extend(_history_lines(series, "close price ${:.2f}", "  "))
    return lines


def _prediction_market_lines(spec: MarketSpec, obs: Observation) -> list[str]:
    lines = []
    for pair in spec.pairs:
        lines.append(f"Question: {pair.question}")
        lines.append(f"  - Betting YES current price: {obs.prices[pair.yes]:.3f}")
        lines.append(f"  - Betting NO current price: {obs.prices[pair.no]:.3f}")
        for label, asset in (("YES", pair.yes), ("NO", pair.no)):
            lines.append(f"  - Betting {label} History:")
            series = [(pt.date, pt.price) for pt in obs.price_history.get(asset, ())]
            series.append((obs.date, obs.prices[asset]))
            lines.extend(_history_lines(series, "{:.4f}", "  "))
    return lines


def _news_lines(spec: MarketSpec, obs: Observation, tz: ZoneInfo) -> list[str]:
    features = extract_features(spec, obs)
    lines = []
    if spec.kind is MarketKind.PREDICTION:
        tags = list(spec.questions)
    else:
        tags = [a for a in spec.assets if a != spec.cash]
    for tag in tags:
        items = features.news_by_tag.get(tag, ())
        if not items:
            continue
        lines.append(f"• {tag}:")
        for item in items:
            day = dt.datetime.fromtimestamp(item.published_at, tz).date()
            lines.append(f"  - {_collapse_whitespace(item.title)} ({day.isoformat()})")
            lines.append(f"    {_render_snippet(item.snippet)}")
    return lines


def _allocation_literal(spec: MarketSpec, weights: dict[str, float]) -> str:
    """Dict-literal rendering with two-decimal quoted weights.

    Zero positions are omitted; cash always shows.
    """
    shown = [
        (a, w) for a, w in weights.items()
        if w > 0 or a == spec.cash
    ]
    body = ", ".join(f"'{a}': '{w:.2f}'" for a, w in shown)
    return "{" + body + "}"


def _account_lines(spec: MarketSpec, memory: MemoryWindow) -> list[str]:
    indent = "  " if spec.kind is MarketKind.STOCK else ""
    lines = [f"{indent}Recent Historical Allocations under this account:"]
    for entry in memory.entries:
        alloc = _allocation_literal(spec, dict(entry.allocation.weights))
        rate = entry.cumulative_return * 100.0
        lines.append(
            f"    - Asset Allocation at {entry.date.isoformat()}: {alloc} "
            f"(Accumulated return rate: {rate:.1f}%)"
        )
    return lines


def build_context_prompt(spec: MarketSpec, obs: Observation, memory: MemoryWindow) -> str:
    """Market analysis, recent news, and account history as one block."""
    _, tz = _SESSION_TZ[spec.kind]
    if spec.kind is MarketKind.STOCK:
        market = _stock_market_lines(spec, obs)
    else:
        market = _prediction_market_lines(spec, obs)
    sections = [
        "MARKET ANALYSIS:\n" + "\n".join(market),
        "RECENT NEWS:\n" + "\n".join(_news_lines(spec, obs, tz)),
        "ACCOUNT INFO:\n" + "\n".join(_account_lines(spec, memory)),
    ]
    # The news header sits two blank lines under the market block, the
    # account header one blank line under the news block.
    return sections[0] + "\n\n\n" + sections[1] + "\n\n" + sections[2]


def _json_format_block(spec: MarketSpec) -> str:
    if spec.kind is MarketKind.STOCK:
        hint = _STOCK_REASONING_HINT
        risky = [a for a in spec.assets if a != spec.cash][:3]
        weights = ["0.25", "0.20", "0.15"][: len(risky)]
        entries = list(zip(risky, weights))
    else:
        hint = _PREDICTION_REASONING_HINT
        entries = []
        questions = spec.questions
        if len(questions) >= 1:
            entries.append((f"{questions[0]}_Yes", "0.25"))
        if len(questions) >= 2:
            entries.append((f"{questions[1]}_No", "0.15"))
    cash_weight = 1.0 - sum(float(w) for _, w in entries)
    entries.append((spec.cash, f"{cash_weight:.2f}"))
    lines = ["{", f' "reasoning": "{hint}",', ' "allocations": {']
    for i, (asset, weight) in enumerate(entries):
        comma = "," if i < len(entries) - 1 else ""
        lines.append(f'   "{asset}": {weight}{comma}')
    lines.extend([" }", "}"])
    return "\n".join(lines)


def build_decision_prompt(context: str, spec: MarketSpec, date: dt.date) -> str:
    """Full model input for one decision date.

    The context block produced by ``build_context_prompt`` is embedded
    verbatim between the role line and the management guidance.
    """
    tz_label, _ = _SESSION_TZ[spec.kind]
    assets_line = "AVAILABLE ASSETS: " + ", ".join(spec.assets)
    if spec.kind is MarketKind.STOCK:
        parts = [
            f"Today is {date.isoformat()} ({tz_label}).",
            _STOCK_ROLE_LINE,
            context,
            _STOCK_GUIDANCE,
            "",
            assets_line,
            "",
            "CRITICAL: Return ONLY valid JSON. No extra text.",
            "REQUIRED JSON FORMAT:",
            _json_format_block(spec),
            _STOCK_RULES,
        ]
    else:
        parts = [
            f"Today is {date.isoformat()} ({tz_label}).",
            _PREDICTION_ROLE_LINE,
            context,
            "",
            _PREDICTION_GUIDANCE,
            "",
            assets_line,
            "",
            "CRITICAL: Return ONLY valid JSON. No extra text.",
            "REQUIRED JSON FORMAT:",
            _json_format_block(spec),
            "",
            _PREDICTION_RULES,
        ]
    return "\n".join(parts)
