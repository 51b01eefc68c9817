"""Warden strategies: none, regular, dynamic, random-dynamic.

A regular warden freezes one uniformly sampled ruleset for the whole run.
A dynamic warden resamples a fixed-size ruleset every ``reload_interval``
seconds, each draw independent of the last. The random-dynamic variants
additionally redraw the interval length and the ruleset size per reload
from configured ranges.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Union

import numpy as np

from .packets import Packet
from .rules import (
    RULE_COUNT,
    Disposition,
    DispositionCounters,
    apply_ruleset,
)


class ClockRegression(RuntimeError):
    """The warden observed time moving backwards."""


def round_half_up(x: float) -> int:
    # 1e-9 absorbs float error in fraction*RULE_COUNT products (0.95*50
    # evaluates just below 47.5); exact halves still round up.
    return int(math.floor(x + 0.5 + 1e-9))


@dataclass(frozen=True)
class NoWarden:
    kind: str = "none"


@dataclass(frozen=True)
class RegularWarden:
    """Static warden keeping ``active_fraction`` of all rules loaded."""

    active_fraction: float = 0.95
    kind: str = "regular"

    @property
    def rule_count(self) -> int:
        return round_half_up(self.active_fraction * RULE_COUNT)


@dataclass(frozen=True)
class DynamicWarden:
    """Periodic warden: ``active_fraction`` of rules, redrawn every interval."""

    active_fraction: float
    reload_interval: float
    kind: str = "dynamic"

    @property
    def rule_count(self) -> int:
        return round_half_up(self.active_fraction * RULE_COUNT)


@dataclass(frozen=True)
class RandomDynamicWarden:
    """Dynamic warden whose interval and ruleset size are themselves random.

    Intervals are drawn uniformly (continuous) from ``interval_range``; the
    ruleset size is an integer drawn uniformly from the rule-count range
    implied by ``fraction_range``. Both are redrawn at every reload.
    """

    interval_range: tuple[float, float]
    fraction_range: tuple[float, float]
    kind: str = "random_dynamic"

    @property
    def rule_count_range(self) -> tuple[int, int]:
        lo = round_half_up(self.fraction_range[0] * RULE_COUNT)
        hi = round_half_up(self.fraction_range[1] * RULE_COUNT)
        return lo, hi


WardenConfig = Union[NoWarden, RegularWarden, DynamicWarden, RandomDynamicWarden]


def variant_warden(name: str) -> RandomDynamicWarden:
    """The four canonical random-dynamic configurations V1..V4."""
    table = {
        "V1": RandomDynamicWarden((1.0, 35.0), (0.02, 1.0)),
        "V2": RandomDynamicWarden((1.0, 35.0), (0.20, 0.40)),
        "V3": RandomDynamicWarden((1.0, 10.0), (0.20, 1.0)),
        "V4": RandomDynamicWarden((1.0, 10.0), (0.20, 0.40)),
    }
    try:
        return table[name.upper()]
    except KeyError:
        raise ValueError(f"unknown random-dynamic variant: {name!r}") from None


class Warden:
    """Mutable warden state owned by a single simulation event loop."""

    def __init__(self, config: WardenConfig, rng: np.random.Generator):
        self.config = config
        self.rng = rng
        self.counters = DispositionCounters()
        self.reload_count = 0
        self.reload_log: list[tuple[float, tuple[int, ...]]] = []
        self._last_now = 0.0
        self._interval: Optional[float] = None

        if isinstance(config, NoWarden):
            self.active: tuple[int, ...] = ()
            self.next_reload = math.inf
        elif isinstance(config, RegularWarden):
            self.active = self._draw_subset(config.rule_count)
            self.next_reload = math.inf
        elif isinstance(config, DynamicWarden):
            self.active = self._draw_subset(config.rule_count)
            self._interval = config.reload_interval
            self.next_reload = config.reload_interval
        elif isinstance(config, RandomDynamicWarden):
            lo, hi = config.rule_count_range
            self.active = self._draw_subset(int(self.rng.integers(lo, hi + 1)))
            self._interval = self._draw_interval()
            self.next_reload = self._interval
        else:
            raise TypeError(f"unknown warden config: {config!r}")
        self.reload_log.append((0.0, self.active))

    def _draw_subset(self, size: int) -> tuple[int, ...]:
        ids = self.rng.choice(RULE_COUNT, size=size, replace=False)
        return tuple(sorted(int(i) for i in ids))

    def _draw_interval(self) -> float:
        lo, hi = self.config.interval_range
        return float(self.rng.uniform(lo, hi))

    @property
    def has_reloads(self) -> bool:
        return math.isfinite(self.next_reload)

    def maybe_reload(self, now: float) -> None:
        """Redraw the active set if a reload boundary has been reached.

        Catches up one boundary at a time, so a late first event after
        several boundaries still counts every reload. New draws are fully
        independent of previous ones (repeats allowed).
        """
        if now < self._last_now:
            raise ClockRegression(f"clock moved from {self._last_now} to {now}")
        self._last_now = now
        while now >= self.next_reload:
            config = self.config
            if isinstance(config, DynamicWarden):
                self.active = self._draw_subset(config.rule_count)
            else:
                lo, hi = config.rule_count_range
                self.active = self._draw_subset(int(self.rng.integers(lo, hi + 1)))
                self._interval = self._draw_interval()
            boundary = self.next_reload
            self.next_reload = boundary + self._interval
            self.reload_count += 1
            self.reload_log.append((boundary, self.active))

    def process(self, packet: Packet, now: float) -> tuple[Packet, Disposition]:
        self.maybe_reload(now)
        return apply_ruleset(self.active, packet, self.counters)


def reload_log_csv_lines(warden: Warden) -> list[str]:
    """Reload history as CSV: activation time and the rule ids loaded."""
    lines = ["time,active_rules"]
    for time, active in warden.reload_log:
        lines.append(f"{time!r},{';'.join(str(i) for i in active)}")
    return lines
