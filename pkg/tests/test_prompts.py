import datetime as dt

from conftest import assert_golden, make_observation

from tradefolio.agents.memory import MemoryEntry, MemoryWindow
from tradefolio.agents.prompts import (
    SNIPPET_MAX_CHARS,
    build_context_prompt,
    build_decision_prompt,
)
from tradefolio.domain import AllocationVector, MarketSpec, NewsItem

STOCK = MarketSpec.stock(("AAPL", "MSFT", "NVDA"))
PREDICTION = MarketSpec.prediction((
    "Will the launch happen this quarter?",
    "Will turnout exceed sixty percent?",
))

LONG_SNIPPET = (
    "The company reported quarterly figures that came in ahead of the midpoint "
    "of its own guidance range, and management used the call to describe demand "
    "as broad across regions and product lines. " * 3
)


def _stock_inputs():
    date = dt.date(2025, 10, 24)
    history = {
        "AAPL": [("2025-10-17", 247.77), ("2025-10-20", 255.46), ("2025-10-21", 258.06),
                 ("2025-10-22", 258.44), ("2025-10-23", 259.58)],
        "MSFT": [("2025-10-17", 513.58), ("2025-10-20", 516.79), ("2025-10-21", 523.98),
                 ("2025-10-22", 521.14), ("2025-10-23", 517.66)],
        "NVDA": [("2025-10-17", 183.22), ("2025-10-20", 182.64), ("2025-10-21", 181.16),
                 ("2025-10-22", 186.52), ("2025-10-23", 182.55)],
    }
    news = (
        NewsItem(
            title="Apple  suppliers point to a strong\nholiday quarter",
            snippet="Shares rose as  analysts\n  lifted price targets across the supply chain.",
            source="wire-a", url="https://example.com/a1",
            published_at=1761229800,  # 2025-10-23 UTC and Eastern
            tagged_asset="AAPL",
        ),
        NewsItem(
            title="iPhone lead times stretch into November",
            snippet=LONG_SNIPPET,
            source="wire-b", url="https://example.com/a2",
            published_at=1761163500,  # 2025-10-22
            tagged_asset="AAPL",
        ),
        NewsItem(
            title="Chipmaker unveils a new accelerator line",
            snippet="The announcement landed mid-keynote.",
            source="wire-c", url="https://example.com/n1",
            published_at=1761051600,  # 2025-10-21
            tagged_asset="NVDA",
        ),
    )
    obs = make_observation(
        STOCK, date,
        prices={"AAPL": 262.24, "MSFT": 523.61, "NVDA": 186.26},
        history=history, news=news,
    )
    memory = MemoryWindow(10)
    memory.remember(MemoryEntry(
        date=dt.date(2025, 10, 22),
        allocation=AllocationVector({"AAPL": 0.30, "MSFT": 0.20, "NVDA": 0.0, "CASH": 0.50}),
        cumulative_return=0.012,
        digest="d1",
    ))
    memory.remember(MemoryEntry(
        date=dt.date(2025, 10, 23),
        allocation=AllocationVector({"AAPL": 0.25, "MSFT": 0.25, "NVDA": 0.14, "CASH": 0.36}),
        cumulative_return=0.036,
        digest="d2",
    ))
    return date, obs, memory


def _prediction_inputs():
    date = dt.date(2025, 10, 21)
    q1, q2 = PREDICTION.questions
    history = {
        f"{q1}_Yes": [("2025-10-18", 0.41), ("2025-10-19", 0.4450), ("2025-10-20", 0.4275)],
        f"{q1}_No": [("2025-10-18", 0.59), ("2025-10-19", 0.5575), ("2025-10-20", 0.5750)],
        f"{q2}_Yes": [("2025-10-18", 0.12), ("2025-10-19", 0.135), ("2025-10-20", 0.1125)],
        f"{q2}_No": [("2025-10-18", 0.88), ("2025-10-19", 0.8675), ("2025-10-20", 0.89)],
    }
    news = (
        NewsItem(
            title="Regulator schedules the final review session",
            snippet="A decision could follow within days,   people familiar said.",
            source="wire-p", url="https://example.com/p1",
            published_at=1760950800,  # 2025-10-20 UTC
            tagged_asset=q1,
        ),
    )
    obs = make_observation(
        PREDICTION, date,
        prices={f"{q1}_Yes": 0.455, f"{q1}_No": 0.545,
                f"{q2}_Yes": 0.105, f"{q2}_No": 0.895},
        history=history, news=news,
    )
    memory = MemoryWindow(10)
    memory.remember(MemoryEntry(
        date=dt.date(2025, 10, 20),
        allocation=AllocationVector({
            f"{q1}_Yes": 0.40, f"{q1}_No": 0.0,
            f"{q2}_Yes": 0.0, f"{q2}_No": 0.0, "CASH": 0.60,
        }),
        cumulative_return=-0.025,
        digest="d3",
    ))
    return date, obs, memory


class TestStockPrompt:
    def test_context_golden(self):
        _, obs, memory = _stock_inputs()
        assert_golden("stock_context.txt", build_context_prompt(STOCK, obs, memory))

    def test_decision_golden(self):
        date, obs, memory = _stock_inputs()
        context = build_context_prompt(STOCK, obs, memory)
        assert_golden("stock_decision.txt", build_decision_prompt(context, STOCK, date))

    def test_header_names_eastern_time(self):
        date, obs, memory = _stock_inputs()
        context = build_context_prompt(STOCK, obs, memory)
        prompt = build_decision_prompt(context, STOCK, date)
        assert prompt.startswith("Today is 2025-10-24 (US Eastern Time).\n")

    def test_market_block_layout(self):
        _, obs, memory = _stock_inputs()
        context = build_context_prompt(STOCK, obs, memory)
        assert context.startswith("MARKET ANALYSIS:\n")
        assert "AAPL: Current price is $262.24" in context
        # Newest history line: change versus the close below it.
        assert "  - 2025-10-23: close price $259.58 (Change: +1.14 (+0.44%))" in context
        # The oldest line in each series has nothing to diff against.
        assert "  - 2025-10-17: close price $247.77 (Change: N/A)" in context
        # A negative change renders with its sign.
        assert "  - 2025-10-22: close price $521.14 (Change: -2.84 (-0.54%))" in context
        # Two blank lines before RECENT NEWS, one before ACCOUNT INFO.
        assert "\n\n\nRECENT NEWS:\n" in context
        assert "\n\nACCOUNT INFO:\n" in context

    def test_news_formatting(self):
        _, obs, memory = _stock_inputs()
        context = build_context_prompt(STOCK, obs, memory)
        # Tag bullets only for tags that have items; MSFT has none.
        assert "• AAPL:" in context
        assert "• NVDA:" in context
        assert "• MSFT:" not in context
        # Titles collapse internal whitespace; dates are session-local.
        assert "  - Apple suppliers point to a strong holiday quarter (2025-10-23)" in context
        assert "    Shares rose as analysts lifted price targets across the supply chain." in context
        # Long snippets truncate at the cap, then the ellipsis is appended.
        for line in context.splitlines():
            stripped = line.strip()
            if stripped.startswith("The company reported"):
                assert stripped.endswith("...")
                assert len(stripped) == SNIPPET_MAX_CHARS + 3
                break
        else:
            raise AssertionError("long snippet not found")

    def test_account_section(self):
        _, obs, memory = _stock_inputs()
        context = build_context_prompt(STOCK, obs, memory)
        assert "  Recent Historical Allocations under this account:" in context
        # Zero positions are dropped from the literal; cash always shows.
        assert ("    - Asset Allocation at 2025-10-22: "
                "{'AAPL': '0.30', 'MSFT': '0.20', 'CASH': '0.50'} "
                "(Accumulated return rate: 1.2%)") in context
        assert "(Accumulated return rate: 3.6%)" in context

    def test_decision_prompt_structure(self):
        date, obs, memory = _stock_inputs()
        prompt = build_decision_prompt(build_context_prompt(STOCK, obs, memory), STOCK, date)
        assert "AVAILABLE ASSETS: AAPL, MSFT, NVDA, CASH" in prompt
        assert "CRITICAL: Return ONLY valid JSON. No extra text." in prompt
        assert "REQUIRED JSON FORMAT:" in prompt
        # One-space and three-space indents in the format example.
        assert '\n "reasoning": "' in prompt
        assert '\n   "AAPL": 0.25,' in prompt
        assert '\n   "CASH": 0.40\n' in prompt
        assert "RULES:\n1. Return ONLY the JSON object." in prompt
        assert "- Total allocation must equal 1.0." in prompt
        assert "- CASH is a valid asset." in prompt


class TestPredictionPrompt:
    def test_context_golden(self):
        _, obs, memory = _prediction_inputs()
        assert_golden("prediction_context.txt", build_context_prompt(PREDICTION, obs, memory))

    def test_decision_golden(self):
        date, obs, memory = _prediction_inputs()
        context = build_context_prompt(PREDICTION, obs, memory)
        assert_golden("prediction_decision.txt",
                      build_decision_prompt(context, PREDICTION, date))

    def test_header_names_utc(self):
        date, obs, memory = _prediction_inputs()
        prompt = build_decision_prompt(
            build_context_prompt(PREDICTION, obs, memory), PREDICTION, date)
        assert prompt.startswith("Today is 2025-10-21 (UTC).\n")

    def test_price_decimals(self):
        _, obs, memory = _prediction_inputs()
        context = build_context_prompt(PREDICTION, obs, memory)
        # Current prices use three decimals, history lines four.
        assert "  - Betting YES current price: 0.455" in context
        assert "  - Betting NO current price: 0.545" in context
        assert "  - 2025-10-20: 0.4275 (Change: -0.02 (-3.93%))" in context
        assert "  - 2025-10-18: 0.4100 (Change: N/A)" in context

    def test_account_header_not_indented(self):
        _, obs, memory = _prediction_inputs()
        context = build_context_prompt(PREDICTION, obs, memory)
        assert "\nRecent Historical Allocations under this account:" in context
        assert "(Accumulated return rate: -2.5%)" in context

    def test_decision_logic_keeps_placeholder_braces(self):
        date, obs, memory = _prediction_inputs()
        prompt = build_decision_prompt(
            build_context_prompt(PREDICTION, obs, memory), PREDICTION, date)
        assert "- Go LONG {question}_YES if p > p_mkt + costs." in prompt
        assert "- Go LONG {question}_NO if p < p_mkt - costs." in prompt
        assert "- Otherwise keep the capital in CASH." in prompt
        assert "- No simultaneous YES and NO allocations." in prompt

    def test_json_format_example_uses_real_questions(self):
        date, obs, memory = _prediction_inputs()
        prompt = build_decision_prompt(
            build_context_prompt(PREDICTION, obs, memory), PREDICTION, date)
        q1, q2 = PREDICTION.questions
        assert f'   "{q1}_Yes": 0.25,' in prompt
        assert f'   "{q2}_No": 0.15,' in prompt
        assert '   "CASH": 0.60' in prompt


class TestDeterminism:
    def test_same_inputs_same_bytes(self):
        date, obs, memory = _stock_inputs()
        a = build_decision_prompt(build_context_prompt(STOCK, obs, memory), STOCK, date)
        date2, obs2, memory2 = _stock_inputs()
        b = build_decision_prompt(build_context_prompt(STOCK, obs2, memory2), STOCK, date2)
        assert a == b
