"""report.py - evaluation and audit reports as key: value text and rich tables."""

from __future__ import annotations
from dataclasses import dataclass, field

import numpy as np
import numpy.typing as npt
from rich.table import Table

from emphi.common.labels import INTENT_NAMES
from emphi.evalsuite.intents import AuditResult
from emphi.evalsuite.metrics import SMOOTHING, harmonic_mean

KL_DIRECTION = "KL(model||human)"


def _fmt(value: float | None) -> str:
    return "n/a" if value is None else f"{value:.6f}"


def histogram_rows(
    columns: dict[str, npt.NDArray[np.float64]],
) -> list[tuple[str, ...]]:
    "One row per intent: name, then one formatted probability per column."
    return [
        (name, *(f"{float(hist[idx]):.4f}" for hist in columns.values()))
        for idx, name in enumerate(INTENT_NAMES)
    ]


def histogram_table(title: str, columns: dict[str, npt.NDArray[np.float64]]) -> Table:
    table = Table(title=title)
    table.add_column("intent")
    for name in columns:
        table.add_column(name, justify="right")
    for row in histogram_rows(columns):
        table.add_row(*row)
    return table


def _histogram_text(columns: dict[str, npt.NDArray[np.float64]]) -> list[str]:
    header = "intent".ljust(14) + "".join(name.rjust(10) for name in columns)
    lines = [header]
    for name, *values in histogram_rows(columns):
        lines.append(name.ljust(14) + "".join(value.rjust(10) for value in values))
    return lines


@dataclass
class EvalReport:
    bleu_precision: float
    bleu_recall: float
    distinct_1: float
    distinct_2: float
    intent_histogram: npt.NDArray[np.float64]
    human_histogram: npt.NDArray[np.float64]
    kl_vs_human: float
    intent_acc: float
    emotion_acc: float | None = None
    cases: int = 0
    samples: int = 5
    extra: dict[str, str] = field(default_factory=dict)

    @property
    def bleu_f1(self) -> float:
        return harmonic_mean(self.bleu_precision, self.bleu_recall)

    def to_text(self) -> str:
        lines = [
            f"# bleu_smoothing: {SMOOTHING}",
            f"# kl_direction: {KL_DIRECTION}",
            f"cases: {self.cases}",
            f"samples: {self.samples}",
            f"bleu_precision: {_fmt(self.bleu_precision)}",
            f"bleu_recall: {_fmt(self.bleu_recall)}",
            f"bleu_f1: {_fmt(self.bleu_f1)}",
            f"distinct_1: {_fmt(self.distinct_1)}",
            f"distinct_2: {_fmt(self.distinct_2)}",
            f"kl_vs_human: {_fmt(self.kl_vs_human)}",
            f"intent_acc: {_fmt(self.intent_acc)}",
            f"emotion_acc: {_fmt(self.emotion_acc)}",
        ]
        lines.extend(f"{key}: {value}" for key, value in sorted(self.extra.items()))
        lines.append("")
        lines.extend(_histogram_text({"model": self.intent_histogram, "human": self.human_histogram}))
        return "\n".join(lines) + "\n"

    def rich_table(self) -> Table:
        table = Table(title="Evaluation")
        table.add_column("metric")
        table.add_column("value", justify="right")
        for line in self.to_text().splitlines():
            key, sep, value = line.partition(": ")
            if sep and not key.startswith("#"):
                table.add_row(key, value)
        return table


def audit_text(result: AuditResult) -> str:
    lines = [
        f"# kl_direction: {KL_DIRECTION}",
        f"cases: {result.cases}",
        f"KL = {result.kl:.6f}",
        "",
        *_histogram_text({"model": result.model_histogram, "human": result.human_histogram}),
    ]
    return "\n".join(lines) + "\n"
