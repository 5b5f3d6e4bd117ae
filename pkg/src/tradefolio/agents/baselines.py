"""Rule-based reference agents.

These exist as measuring sticks and test oracles. They speak the same
response protocol as the models so every decision, scripted or not,
passes through the identical parse-and-validate path.
"""

from __future__ import annotations

from typing import Iterable

from ..domain import AllocationVector, Holdings, MarketKind, MarketSpec, Observation, PriceVector
from .harness import AgentDecision
from .memory import MemoryWindow
from .parsing import render_allocation_response

__all__ = [
    "equal_weight_allocation",
    "all_cash_allocation",
    "hold_allocation",
    "EqualWeightAgent",
    "AllCashAgent",
    "BuyAndHoldAgent",
    "ScriptedAgent",
]


def equal_weight_allocation(spec: MarketSpec) -> AllocationVector:
    """1/N across the whole universe, cash included.

    Prediction markets forbid holding both sides of a question, so
    there the weight spreads over the yes sides plus cash only.
    """
    if spec.kind is MarketKind.PREDICTION:
        held = [f"{q}_Yes" for q in spec.questions] + [spec.cash]
        return AllocationVector(
            {a: (1.0 / len(held) if a in held else 0.0) for a in spec.assets}
        )
    n = len(spec.assets)
    return AllocationVector({a: 1.0 / n for a in spec.assets})


def all_cash_allocation(spec: MarketSpec) -> AllocationVector:
    return AllocationVector({a: 1.0 if a == spec.cash else 0.0 for a in spec.assets})


def hold_allocation(spec: MarketSpec, holdings: Holdings, prices: PriceVector) -> AllocationVector:
    """Current book expressed as weights at the given prices.

    A zero-value book has no weights; it degrades to all cash.
    """
    value = sum(holdings.units[a] * prices[a] for a in holdings.units)
    if value == 0.0:
        return all_cash_allocation(spec)
    return AllocationVector(
        {a: holdings.units[a] * prices[a] / value for a in spec.assets}
    )


class EqualWeightAgent:
    name = "baseline:equal-weight"

    def decide(self, spec: MarketSpec, obs: Observation, memory: MemoryWindow) -> AgentDecision:
        raw = render_allocation_response("equal weight across all assets",
                                         equal_weight_allocation(spec))
        return AgentDecision(prompt=None, raw_response=raw)


class AllCashAgent:
    name = "baseline:all-cash"

    def decide(self, spec: MarketSpec, obs: Observation, memory: MemoryWindow) -> AgentDecision:
        raw = render_allocation_response("stay in cash", all_cash_allocation(spec))
        return AgentDecision(prompt=None, raw_response=raw)


class BuyAndHoldAgent:
    """Freezes the current book: weights are taken at execution prices,
    so the implied trades are exactly zero every step."""

    name = "baseline:buy-and-hold"

    def allocation_at(
        self,
        spec: MarketSpec,
        obs: Observation,
        memory: MemoryWindow,
        exec_prices: PriceVector,
    ) -> tuple[str, AllocationVector]:
        return "hold current positions", hold_allocation(spec, obs.positions, exec_prices)


class ScriptedAgent:
    """Plays back canned response texts; repeats the last one when the
    script runs out. For exercising the parse-retry-fallback path."""

    name = "scripted"

    def __init__(self, responses: Iterable[str], name: str = "scripted") -> None:
        self.responses = list(responses)
        if not self.responses:
            raise ValueError("scripted agent needs at least one response")
        self.name = name
        self._cursor = 0

    def decide(self, spec: MarketSpec, obs: Observation, memory: MemoryWindow) -> AgentDecision:
        index = min(self._cursor, len(self.responses) - 1)
        self._cursor += 1
        return AgentDecision(prompt=None, raw_response=self.responses[index])
