"""Training metrics: per-window aggregation and CSV round-trip.

A window covers `window_size` environment steps. Each point records the mean
episodic (environment) reward over episodes completed in the window, the mean
episode length, and the mean per-step policy entropy, plus trainer-specific
extras. CSV formatting is deterministic so identical runs produce identical
bytes.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

CORE_COLUMNS = ("step", "reward", "episode_length", "entropy")


@dataclass
class MetricsPoint:
    step: int
    reward: float
    episode_length: float
    entropy: float
    extras: dict[str, float] = field(default_factory=dict)


@dataclass
class MetricsSeries:
    points: list[MetricsPoint] = field(default_factory=list)

    def __len__(self) -> int:
        return len(self.points)

    def rewards(self) -> np.ndarray:
        return np.array([p.reward for p in self.points])

    def steps(self) -> np.ndarray:
        return np.array([p.step for p in self.points])

    def extra_columns(self) -> list[str]:
        cols: list[str] = []
        for p in self.points:
            for k in p.extras:
                if k not in cols:
                    cols.append(k)
        return cols

    def to_csv(self) -> str:
        buf = io.StringIO()
        extra = self.extra_columns()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(list(CORE_COLUMNS) + extra)
        for p in self.points:
            row = [
                str(p.step),
                _fmt(p.reward),
                _fmt(p.episode_length),
                _fmt(p.entropy),
            ]
            row += [_fmt(p.extras[k]) if k in p.extras else "" for k in extra]
            writer.writerow(row)
        return buf.getvalue()

    def save_csv(self, path: str) -> None:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            fh.write(self.to_csv())

    @classmethod
    def from_csv(cls, text: str) -> "MetricsSeries":
        reader = csv.reader(io.StringIO(text))
        header = next(reader)
        if header[: len(CORE_COLUMNS)] != list(CORE_COLUMNS):
            raise ValueError(f"unexpected metrics header {header!r}")
        extra_cols = header[len(CORE_COLUMNS) :]
        series = cls()
        for row in reader:
            if not row:
                continue
            extras = {
                k: float(v)
                for k, v in zip(extra_cols, row[len(CORE_COLUMNS) :])
                if v != ""
            }
            series.points.append(
                MetricsPoint(
                    step=int(row[0]),
                    reward=float(row[1]),
                    episode_length=float(row[2]),
                    entropy=float(row[3]),
                    extras=extras,
                )
            )
        return series

    @classmethod
    def load_csv(cls, path: str) -> "MetricsSeries":
        with open(path, "r", encoding="utf-8") as fh:
            return cls.from_csv(fh.read())


def _fmt(x: float) -> str:
    return repr(float(x))


class WindowAggregator:
    """Accumulates per-step and per-episode data, emitting one point per window.

    Windows with no completed episode reuse the running episodic means so the
    series stays numeric; entropy always averages the window's own steps.
    """

    def __init__(
        self,
        window_size: int,
        total_steps: int,
        emit: Callable[[MetricsPoint], None],
    ):
        if window_size < 1:
            raise ValueError("window_size must be >= 1")
        if total_steps < window_size:
            raise ValueError("budget must cover at least one summary window")
        self.window_size = window_size
        self.total_steps = total_steps
        self.emit = emit
        self.step = 0
        self._entropies: list[float] = []
        self._episode_returns: list[float] = []
        self._episode_lengths: list[float] = []
        self._running_return = 0.0
        self._running_length = 0.0
        self._running_count = 0
        self._extras: dict[str, float] = {}

    def add_step(
        self, entropy: float, episode: tuple[float, int] | None = None
    ) -> None:
        """One environment step; pass (return, length) when it completed an episode."""
        if episode is not None:
            ep_return, ep_len = episode
            self._episode_returns.append(ep_return)
            self._episode_lengths.append(float(ep_len))
            self._running_return += ep_return
            self._running_length += ep_len
            self._running_count += 1
        self.step += 1
        self._entropies.append(entropy)
        if self.step % self.window_size == 0 and self.step <= self.total_steps:
            self._flush()

    def set_extras(self, **extras: float) -> None:
        self._extras.update(extras)

    def _flush(self) -> None:
        if self._episode_returns:
            reward = float(np.mean(self._episode_returns))
            length = float(np.mean(self._episode_lengths))
        elif self._running_count:
            reward = self._running_return / self._running_count
            length = self._running_length / self._running_count
        else:
            reward, length = 0.0, 0.0
        entropy = float(np.mean(self._entropies)) if self._entropies else 0.0
        self.emit(
            MetricsPoint(
                step=self.step,
                reward=reward,
                episode_length=length,
                entropy=entropy,
                extras=dict(self._extras),
            )
        )
        self._entropies.clear()
        self._episode_returns.clear()
        self._episode_lengths.clear()
