"""Report rendering: metric tables, plot series, lag analysis.

Output is deterministic: the same logs in the same order yield the
same bytes, so reports can be diffed and committed as goldens.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

import numpy as np

from .metrics import MetricsReport, rolling_k_delta
from .sessionlog import (
    SessionLogHeader,
    cash_ratio_series,
    position_histories,
    read_session_log,
    value_series,
)

__all__ = [
    "ReportRow",
    "build_report_rows",
    "render_report_table",
    "report_payload",
    "write_report",
    "DeltaTable",
    "build_delta_table",
    "render_delta_table",
    "write_delta_report",
]


@dataclass(frozen=True)
class ReportRow:
    market: str
    model: str
    steps: int
    metrics: MetricsReport
    values: list[float]
    cash_ratio: list[float]
    dates: list[str]


def _row_from_log(path: Path, risk_free_rate: float) -> ReportRow:
    header, records = read_session_log(path)
    values = value_series(header, records)
    rate = risk_free_rate if header.market.value == "stock" else 0.0
    dates = [records[0].date.isoformat()] + [r.date.isoformat() for r in records]
    return ReportRow(
        market=header.market.value,
        model=header.model,
        steps=len(records),
        metrics=MetricsReport.from_values(values, rate),
        values=values,
        cash_ratio=cash_ratio_series(header, records),
        dates=dates,
    )


def build_report_rows(paths: Sequence[str | Path], risk_free_rate: float) -> list[ReportRow]:
    return [_row_from_log(Path(p), risk_free_rate) for p in paths]


def _pct(x: float) -> str:
    return f"{x * 100.0:.2f}"


def _sharpe_text(sharpe: float | None) -> str:
    return "undefined" if sharpe is None else f"{sharpe:.4f}"


def render_report_table(rows: Sequence[ReportRow]) -> str:
    """Human-readable table: CR/MDD/WR as percentages, SR and the
    per-step volatility as raw ratios."""
    headers = ["market", "model", "steps", "CR%", "SR", "MDD%", "WR%", "vol"]
    cells = [
        [
            row.market,
            row.model,
            str(row.steps),
            _pct(row.metrics.cumulative_return),
            _sharpe_text(row.metrics.sharpe),
            _pct(row.metrics.max_drawdown),
            _pct(row.metrics.win_rate),
            f"{row.metrics.volatility:.6f}",
        ]
        for row in rows
    ]
    widths = [
        max(len(headers[i]), *(len(r[i]) for r in cells)) if cells else len(headers[i])
        for i in range(len(headers))
    ]
    def fmt(parts: list[str]) -> str:
        return "  ".join(p.ljust(w) for p, w in zip(parts, widths)).rstrip()
    lines = [fmt(headers), fmt(["-" * w for w in widths])]
    lines.extend(fmt(r) for r in cells)
    return "\n".join(lines) + "\n"


def report_payload(rows: Sequence[ReportRow]) -> dict:
    """Machine-readable report with plot-ready series."""
    return {
        "format": "tradefolio-report",
        "version": 1,
        "sessions": [
            {
                "market": row.market,
                "model": row.model,
                "steps": row.steps,
                "metrics": {
                    "cumulative_return": row.metrics.cumulative_return,
                    "sharpe": row.metrics.sharpe,
                    "max_drawdown": row.metrics.max_drawdown,
                    "win_rate": row.metrics.win_rate,
                    "volatility": row.metrics.volatility,
                },
                "series": {
                    "dates": row.dates,
                    "value": row.values,
                    "cash_ratio": row.cash_ratio,
                },
            }
            for row in rows
        ],
    }


def write_report(rows: Sequence[ReportRow], out_dir: str | Path) -> tuple[Path, Path]:
    """Write report.txt and report.json; returns their paths."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    table_path = out / "report.txt"
    json_path = out / "report.json"
    table_path.write_text(render_report_table(rows), encoding="utf-8")
    json_path.write_text(
        json.dumps(report_payload(rows), indent=2, ensure_ascii=False) + "\n",
        encoding="utf-8",
    )
    return table_path, json_path


@dataclass(frozen=True)
class DeltaTable:
    lags: tuple[int, ...]
    models: tuple[str, ...]
    cells: dict[str, dict[int, float]]  # model -> lag -> delta
    mean: dict[int, float]
    band_low: dict[int, float]  # 25th percentile across models
    band_high: dict[int, float]  # 75th percentile


def build_delta_table(paths: Sequence[str | Path], lags: Sequence[int]) -> DeltaTable:
    """Lagged-execution deltas per session log plus the cross-model
    spread per lag."""
    lags = tuple(lags)
    cells: dict[str, dict[int, float]] = {}
    models = []
    for path in paths:
        header, records = read_session_log(Path(path))
        holdings, prices = position_histories(header, records)
        row = {k: rolling_k_delta(holdings, prices, k) for k in lags}
        model = header.model
        suffix = 2
        while model in cells:
            model = f"{header.model}#{suffix}"
            suffix += 1
        cells[model] = row
        models.append(model)
    mean: dict[int, float] = {}
    low: dict[int, float] = {}
    high: dict[int, float] = {}
    for k in lags:
        column = np.array([cells[m][k] for m in models])
        mean[k] = float(column.mean())
        low[k] = float(np.percentile(column, 25))
        high[k] = float(np.percentile(column, 75))
    return DeltaTable(lags, tuple(models), cells, mean, low, high)


def render_delta_table(table: DeltaTable) -> str:
    headers = ["model"] + [f"k={k}" for k in table.lags]
    rows = [
        [m] + [f"{table.cells[m][k] * 100.0:+.4f}" for k in table.lags]
        for m in table.models
    ]
    rows.append(["mean"] + [f"{table.mean[k] * 100.0:+.4f}" for k in table.lags])
    rows.append(["p25"] + [f"{table.band_low[k] * 100.0:+.4f}" for k in table.lags])
    rows.append(["p75"] + [f"{table.band_high[k] * 100.0:+.4f}" for k in table.lags])
    widths = [max(len(headers[i]), *(len(r[i]) for r in rows)) for i in range(len(headers))]
    def fmt(parts: list[str]) -> str:
        return "  ".join(p.ljust(w) for p, w in zip(parts, widths)).rstrip()
    lines = [fmt(headers), fmt(["-" * w for w in widths])]
    lines.extend(fmt(r) for r in rows)
    return "\n".join(lines) + "\n"


def write_delta_report(table: DeltaTable, out_dir: str | Path) -> tuple[Path, Path]:
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    text_path = out / "delta.txt"
    json_path = out / "delta.json"
    text_path.write_text(render_delta_table(table), encoding="utf-8")
    payload = {
        "format": "tradefolio-delta",
        "version": 1,
        "lags": list(table.lags),
        "models": {
            m: {str(k): table.cells[m][k] for k in table.lags} for m in table.models
        },
        "mean": {str(k): table.mean[k] for k in table.lags},
        "p25": {str(k): table.band_low[k] for k in table.lags},
        "p75": {str(k): table.band_high[k] for k in table.lags},
    }
    json_path.write_text(json.dumps(payload, indent=2) + "\n", encoding="utf-8")
    return text_path, json_path
