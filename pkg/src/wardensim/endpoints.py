"""Covert sender and receiver state machines.

The sender runs two loops in parallel:

* A probing loop that announces one candidate channel over the side link,
  fires five identical probe packets through the warden, and moves on one
  second after the burst regardless of the verdict. Verdicts arrive
  asynchronously: the receiver confirms a channel the moment a surviving
  probe decodes, and reports it blocked once a 5 s window expires.
* A transfer loop that, once at least one channel is known to be usable,
  streams covert payload packets in bursts of five per channel, hopping to
  a fresh usable channel after each burst.

Channels reported blocked return to the probe pool so the usable set keeps
tracking a moving ruleset; when every channel is either usable or awaiting
a verdict, the sender re-verifies usable channels, which is what eventually
evicts entries the warden has started blocking again.

All state here is driven by the simulation kernel's event callbacks; there
is no internal concurrency.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, replace
from typing import Optional, Protocol

import numpy as np

from . import channels
from .packets import Packet, PacketKind, default_packet


@dataclass(frozen=True)
class EndpointTiming:
    """Protocol timing constants (virtual seconds)."""

    probe_repeats: int = 5       # copies per probe announcement, back to back
    probe_spacing: float = 0.0   # optional gap between probe copies
    probe_timeout: float = 5.0   # receiver verdict window per announcement
    nel_pause: float = 1.0       # sender pause after each probe burst
    com_burst: int = 5           # payload packets per channel hop
    com_pacing: float = 1.0      # gap between payload packets


class SenderStrategy(enum.Enum):
    ADAPTIVE_SWITCHING = "adaptive"
    FIXED_SINGLE_CHANNEL = "fixed"


@dataclass(frozen=True)
class Announce:
    announce_id: int
    channel: int


@dataclass(frozen=True)
class Result:
    channel: int
    blocked: bool


class Kernel(Protocol):
    """The slice of the simulation kernel the endpoints drive."""

    now: float

    def at(self, time: float, fn) -> None: ...
    def send_nel(self, message) -> None: ...
    def send_covert(self, packet: Packet) -> None: ...
    def reached_target(self, now: float) -> None: ...
    def trace(self, actor: str, event: str, detail: str) -> None: ...


class CovertSender:
    def __init__(
        self,
        kernel: Kernel,
        rng: np.random.Generator,
        timing: EndpointTiming,
        strategy: SenderStrategy = SenderStrategy.ADAPTIVE_SWITCHING,
    ):
        self.kernel = kernel
        self.rng = rng
        self.timing = timing
        self.strategy = strategy

        self.untested: set[int] = set(range(channels.CHANNEL_COUNT))
        self.retest_backlog: set[int] = set()
        self.pending: set[int] = set()
        self.non_blocked: set[int] = set()

        self._announce_count = 0
        self._packet_seq = 0
        self.probes_sent = 0
        self.com_sent = 0

        self._com_started = False
        self._com_waiting = False
        self._burst_channel: Optional[int] = None
        self._burst_left = 0
        self._last_com_time = float("-inf")
        if strategy is SenderStrategy.FIXED_SINGLE_CHANNEL:
            self._burst_channel = self._uniform_pick(
                sorted(range(channels.CHANNEL_COUNT))
            )

    def _uniform_pick(self, pool: list[int]) -> int:
        return pool[int(self.rng.integers(len(pool)))]

    def _next_seq(self) -> int:
        self._packet_seq += 1
        return self._packet_seq

    # --- probing loop ---

    def _pick_probe_channel(self) -> Optional[int]:
        # Draw uniformly from channels awaiting a (re)test, in rounds: each
        # candidate is probed once before any blocked channel is retested.
        if not self.untested and self.retest_backlog:
            self.untested = self.retest_backlog
            self.retest_backlog = set()
        if self.untested:
            pick = self._uniform_pick(sorted(self.untested))
            self.untested.discard(pick)
            return pick
        members = sorted(self.non_blocked - self.pending)
        if members:
            # Everything is either usable or in flight: re-verify a usable
            # channel so stale entries can still be caught and evicted.
            return self._uniform_pick(members)
        return None

    def nel_tick(self, now: float) -> None:
        chan = self._pick_probe_channel()
        if chan is None:
            self.kernel.at(now + self.timing.nel_pause, self.nel_tick)
            return
        self.pending.add(chan)
        self._announce_count += 1
        self.kernel.send_nel(Announce(self._announce_count, chan))
        self.kernel.trace("cs", "announce", f"channel={chan}")
        for i in range(self.timing.probe_repeats):
            self.kernel.at(now + i * self.timing.probe_spacing,
                           lambda t, c=chan: self._send_probe(c, t))
        burst_end = now + (self.timing.probe_repeats - 1) * self.timing.probe_spacing
        self.kernel.at(burst_end + self.timing.nel_pause, self.nel_tick)

    def _send_probe(self, chan: int, now: float) -> None:
        packet = channels.encode(
            channels.channel(chan), default_packet(PacketKind.PROBE, self._next_seq()), 1
        )
        self.probes_sent += 1
        self.kernel.send_covert(replace(packet, send_time=now, channel_hint=chan))

    def on_result(self, result: Result, now: float) -> None:
        self.pending.discard(result.channel)
        if result.blocked:
            self.non_blocked.discard(result.channel)
            self.retest_backlog.add(result.channel)
            self.kernel.trace("cs", "verdict", f"channel={result.channel} blocked")
        else:
            self.non_blocked.add(result.channel)
            self.kernel.trace("cs", "verdict", f"channel={result.channel} usable")
            if self.strategy is SenderStrategy.ADAPTIVE_SWITCHING:
                if not self._com_started:
                    self._com_started = True
                    self.kernel.at(now, self.com_tick)
                elif self._com_waiting:
                    self._com_waiting = False
                    resume = max(now, self._last_com_time + self.timing.com_pacing)
                    self.kernel.at(resume, self.com_tick)

    # --- transfer loop ---

    def _pick_burst_channel(self) -> Optional[int]:
        if self.strategy is SenderStrategy.FIXED_SINGLE_CHANNEL:
            return self._burst_channel
        others = sorted(self.non_blocked - {self._burst_channel})
        if others:
            return self._uniform_pick(others)
        if self._burst_channel in self.non_blocked:
            return self._burst_channel  # only one usable channel: reuse it
        return None

    def com_tick(self, now: float) -> None:
        if self._burst_left == 0:
            chan = self._pick_burst_channel()
            if chan is None:
                # Usable set is empty between bursts: suspend until the
                # probing loop reports a fresh channel.
                self._com_waiting = True
                return
            self._burst_channel = chan
            self._burst_left = self.timing.com_burst
            self.kernel.trace("cs", "burst", f"channel={chan}")
        chan = self._burst_channel
        packet = channels.encode(
            channels.channel(chan), default_packet(PacketKind.COM, self._next_seq()), 1
        )
        self._burst_left -= 1
        self.com_sent += 1
        self._last_com_time = now
        self.kernel.send_covert(replace(packet, send_time=now, channel_hint=chan))
        self.kernel.at(now + self.timing.com_pacing, self.com_tick)


@dataclass
class _Window:
    channel: int


class CovertReceiver:
    """Tracks probe verdict windows and counts delivered payload packets."""

    def __init__(self, kernel: Kernel, target: int, timing: EndpointTiming):
        self.kernel = kernel
        self.target = target
        self.timing = timing
        self.windows: dict[int, _Window] = {}
        self.received = 0
        self.start_time: Optional[float] = None
        self.stop_time: Optional[float] = None
        self._catalog = channels.catalog()

    def on_announce(self, announce: Announce, now: float) -> None:
        if self.start_time is None:
            self.start_time = now
        self.windows[announce.announce_id] = _Window(announce.channel)
        deadline = now + self.timing.probe_timeout
        self.kernel.at(deadline,
                       lambda t, a=announce.announce_id: self._window_expired(a, t))

    def _window_expired(self, announce_id: int, now: float) -> None:
        window = self.windows.pop(announce_id, None)
        if window is not None:
            self.kernel.send_nel(Result(window.channel, blocked=True))
            self.kernel.trace("cr", "verdict", f"channel={window.channel} blocked")

    def on_covert_packet(self, packet: Packet, now: float) -> None:
        if packet.kind is PacketKind.PROBE:
            hit = next(
                (aid for aid, w in self.windows.items()
                 if channels.decode(self._catalog[w.channel], packet) == 1),
                None,
            )
            if hit is not None:
                window = self.windows.pop(hit)
                self.kernel.send_nel(Result(window.channel, blocked=False))
                self.kernel.trace("cr", "verdict", f"channel={window.channel} usable")
        elif packet.kind is PacketKind.COM:
            if any(channels.decode(spec, packet) == 1 for spec in self._catalog):
                self.received += 1
                if self.received >= self.target:
                    self.stop_time = now
                    self.kernel.trace("cr", "target", f"received={self.received}")
                    self.kernel.reached_target(now)
