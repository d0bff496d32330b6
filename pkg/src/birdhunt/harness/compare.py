"""Run comparison: convergence steps, final metrics, tabular reports."""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass

from ..metrics import MetricsSeries

NO_CONVERGENCE = "No Convergence"


def convergence_step(series: MetricsSeries, threshold: float, k: int) -> int | None:
    """Step of the first window opening a run of k windows with reward >= threshold."""
    if k < 1:
        raise ValueError("k must be >= 1")
    rewards = series.rewards()
    steps = series.steps()
    run = 0
    for i in range(len(rewards)):
        run = run + 1 if rewards[i] >= threshold else 0
        if run >= k:
            return int(steps[i - k + 1])
    return None


@dataclass
class RunComparison:
    name: str
    convergence_step: int | None
    final_reward: float
    final_entropy: float

    def step_label(self) -> str:
        if self.convergence_step is None:
            return NO_CONVERGENCE
        return _step_text(self.convergence_step)

    def sort_step(self) -> float:
        return float("inf") if self.convergence_step is None else self.convergence_step


@dataclass
class ComparisonReport:
    threshold: float
    k: int
    runs: list[RunComparison]

    def run(self, name: str) -> RunComparison:
        for r in self.runs:
            if r.name == name:
                return r
        raise KeyError(name)

    def to_text(self) -> str:
        names = [r.name for r in self.runs]
        rows = [
            ["Metric"] + names,
            ["Step Count"] + [r.step_label() for r in self.runs],
            ["Cumulative Reward"]
            + [
                _fmt_metric(r.final_reward) if r.convergence_step is not None else r.step_label()
                for r in self.runs
            ],
            ["Entropy"]
            + [
                _fmt_metric(r.final_entropy) if r.convergence_step is not None else r.step_label()
                for r in self.runs
            ],
        ]
        widths = [max(len(row[c]) for row in rows) for c in range(len(rows[0]))]
        lines = []
        for i, row in enumerate(rows):
            lines.append("  ".join(cell.ljust(w) for cell, w in zip(row, widths)).rstrip())
            if i == 0:
                lines.append("-" * (sum(widths) + 2 * (len(widths) - 1)))
        footer = f"(threshold={self.threshold:g}, sustained windows k={self.k})"
        return "\n".join(lines) + "\n" + footer + "\n"

    def to_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["run", "convergence_step", "final_reward", "final_entropy"])
        for r in self.runs:
            writer.writerow(
                [
                    r.name,
                    r.convergence_step if r.convergence_step is not None else NO_CONVERGENCE,
                    repr(float(r.final_reward)),
                    repr(float(r.final_entropy)),
                ]
            )
        return buf.getvalue()


def compare(
    series_map: dict[str, MetricsSeries], threshold: float, k: int = 3
) -> ComparisonReport:
    if not series_map:
        raise ValueError("need at least one series to compare")
    runs = []
    for name, series in series_map.items():
        if len(series) == 0:
            raise ValueError(f"series {name!r} is empty")
        runs.append(
            RunComparison(
                name=name,
                convergence_step=convergence_step(series, threshold, k),
                final_reward=float(series.points[-1].reward),
                final_entropy=float(series.points[-1].entropy),
            )
        )
    return ComparisonReport(threshold=threshold, k=k, runs=runs)


def _step_text(step: int) -> str:
    if step % 1_000_000 == 0 and step >= 1_000_000:
        return f"{step // 1_000_000}M"
    if step % 1_000 == 0 and step >= 1_000:
        return f"{step // 1_000}k"
    return str(step)


def _fmt_metric(x: float) -> str:
    return f"{x:.2f}"
