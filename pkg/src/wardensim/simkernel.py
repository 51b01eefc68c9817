"""Deterministic discrete-event kernel: clock, queue, links, trial driver.

Events dequeue in (time, priority, insertion order); at equal timestamps
side-link deliveries precede warden-link deliveries, which precede timers
and reload checks. One root seed fans out into independent warden, sender
and link streams, so a trial is a pure function of (scenario, seed).
"""

from __future__ import annotations

import heapq
from dataclasses import dataclass
from typing import TYPE_CHECKING, Callable, Optional

import numpy as np

from .endpoints import (
    Announce,
    CovertReceiver,
    CovertSender,
    Result,
    SenderStrategy,
)
from .packets import Packet
from .warden import Warden

if TYPE_CHECKING:
    from .experiments import ScenarioConfig

# Tie-break priorities at equal event times.
PRIO_NEL_LINK = 0
PRIO_WARDEN_LINK = 1
PRIO_TIMER = 2
PRIO_RELOAD_CHECK = 3


class SchedulingInPast(RuntimeError):
    """An event was scheduled before the current virtual time."""


class TrialTimeout(RuntimeError):
    """The receiver did not reach its packet target within the time cap."""

    def __init__(self, elapsed: float, cap: float):
        super().__init__(f"target not reached by t={elapsed:g}s (cap {cap:g}s)")
        self.elapsed = elapsed
        self.cap = cap


@dataclass(frozen=True)
class LinkConfig:
    latency: float = 0.010
    loss_prob: float = 0.0


@dataclass(frozen=True)
class TrialResult:
    """Per-trial metrics; warden-link counters cover probes and payload."""

    completion_time: float
    normalized: int
    forwarded: int
    total_packets: int
    rule_evaluations: int
    reload_count: int
    received: int
    com_packets_sent: int
    probe_packets_sent: int
    start_time: float
    stop_time: float


class EventQueue:
    def __init__(self):
        self._heap: list[tuple[float, int, int, Callable[[float], None]]] = []
        self._seq = 0
        self.clock = 0.0

    def __len__(self) -> int:
        return len(self._heap)

    def schedule(self, time: float, priority: int, fn: Callable[[float], None]) -> None:
        if time < self.clock:
            raise SchedulingInPast(f"event at t={time} scheduled at clock={self.clock}")
        self._seq += 1
        heapq.heappush(self._heap, (time, priority, self._seq, fn))

    def peek_time(self) -> float:
        return self._heap[0][0]

    def pop(self) -> tuple[float, Callable[[float], None]]:
        time, _, _, fn = heapq.heappop(self._heap)
        self.clock = time
        return time, fn


class Simulation:
    """One trial: warden in the middle, sender and receiver at the ends."""

    def __init__(self, scenario: "ScenarioConfig", seed: int,
                 collect_trace: bool = False):
        self.scenario = scenario
        self.seed = seed
        warden_ss, sender_ss, link_ss = np.random.SeedSequence(seed).spawn(3)
        self.warden = Warden(scenario.warden, np.random.default_rng(warden_ss))
        self._link_rng = np.random.default_rng(link_ss)
        self.queue = EventQueue()
        self.receiver = CovertReceiver(self, scenario.target, scenario.timing)
        self.sender = CovertSender(
            self, np.random.default_rng(sender_ss), scenario.timing,
            scenario.strategy,
        )
        self.warden_link_sent = 0
        self.warden_link_dropped = 0
        self.nel_sent = 0
        self.nel_dropped = 0
        self._done = False
        self.trace_rows: Optional[list[tuple[float, str, str, str]]] = (
            [] if collect_trace else None
        )

    # --- kernel interface used by the endpoints ---

    @property
    def now(self) -> float:
        return self.queue.clock

    def at(self, time: float, fn: Callable[[float], None]) -> None:
        self.queue.schedule(time, PRIO_TIMER, fn)

    def send_nel(self, message) -> None:
        self.nel_sent += 1
        if self._lossy(self.scenario.nel_link):
            self.nel_dropped += 1
            return
        arrival = self.now + self.scenario.nel_link.latency
        self.queue.schedule(arrival, PRIO_NEL_LINK,
                            lambda t, m=message: self._deliver_nel(m, t))

    def send_covert(self, packet: Packet) -> None:
        self.warden_link_sent += 1
        if self._lossy(self.scenario.warden_link):
            self.warden_link_dropped += 1
            return
        arrival = self.now + self.scenario.warden_link.latency
        self.queue.schedule(arrival, PRIO_WARDEN_LINK,
                            lambda t, p=packet: self._deliver_covert(p, t))

    def reached_target(self, now: float) -> None:
        self._done = True

    def trace(self, actor: str, event: str, detail: str) -> None:
        if self.trace_rows is not None:
            self.trace_rows.append((self.now, actor, event, detail))

    # --- internals ---

    def _lossy(self, link: LinkConfig) -> bool:
        if link.loss_prob <= 0.0:
            return False
        return bool(self._link_rng.random() < link.loss_prob)

    def _deliver_nel(self, message, now: float) -> None:
        # Side-link messages bypass the warden entirely.
        if isinstance(message, Announce):
            self.receiver.on_announce(message, now)
        elif isinstance(message, Result):
            self.sender.on_result(message, now)
        else:
            raise TypeError(f"unknown side-link message: {message!r}")

    def _deliver_covert(self, packet: Packet, now: float) -> None:
        processed, _ = self.warden.process(packet, now)
        self.receiver.on_covert_packet(processed, now)

    def _reload_chain(self, now: float) -> None:
        self.warden.maybe_reload(now)
        self.trace("warden", "reload", f"active={len(self.warden.active)}")
        if self.warden.has_reloads:
            self.queue.schedule(self.warden.next_reload, PRIO_RELOAD_CHECK,
                                self._reload_chain)

    def time_cap(self) -> float:
        s = self.scenario
        return s.timeout_factor * baseline_duration(s.target, s.timing.com_pacing)

    def run(self) -> TrialResult:
        self.at(0.0, self.sender.nel_tick)
        if self.scenario.strategy is SenderStrategy.FIXED_SINGLE_CHANNEL:
            self.at(0.0, self.sender.com_tick)
        if self.warden.has_reloads:
            self.queue.schedule(self.warden.next_reload, PRIO_RELOAD_CHECK,
                                self._reload_chain)
        cap = self.time_cap()
        while not self._done:
            if not self.queue:
                raise TrialTimeout(self.queue.clock, cap)
            if self.queue.peek_time() > cap:
                raise TrialTimeout(self.queue.peek_time(), cap)
            time, fn = self.queue.pop()
            fn(time)
        start = self.receiver.start_time if self.receiver.start_time is not None else 0.0
        stop = self.receiver.stop_time
        assert stop is not None
        counters = self.warden.counters
        return TrialResult(
            completion_time=stop - start,
            normalized=counters.normalized,
            forwarded=counters.forwarded,
            total_packets=counters.total,
            rule_evaluations=counters.rule_evaluations,
            reload_count=self.warden.reload_count,
            received=self.receiver.received,
            com_packets_sent=self.sender.com_sent,
            probe_packets_sent=self.sender.probes_sent,
            start_time=start,
            stop_time=stop,
        )


def run_trial(scenario: "ScenarioConfig", seed: int) -> TrialResult:
    """Run one seeded trial to completion; raises TrialTimeout past the cap."""
    return Simulation(scenario, seed).run()


def baseline_duration(target: int, com_pacing: float) -> float:
    """Idealized no-warden transfer duration used for the timeout cap."""
    return (target - 1) * com_pacing + 1.0


def trace_csv_lines(rows: list[tuple[float, str, str, str]]) -> list[str]:
    lines = ["time,actor,event,detail"]
    for time, actor, event, detail in rows:
        lines.append(f"{time!r},{actor},{event},{detail}")
    return lines
