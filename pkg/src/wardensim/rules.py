"""Normalization rules, 1-on-1 with the channel catalog.

Rule ``i`` detects exactly channel ``i``: its matcher fires when the packet
carries that channel's bit-1 signal, and its action resets the channel's
field to the schema default, destroying the covert bit while forwarding the
packet. Ruleset application evaluates every active rule (no short-circuit)
so rule evaluations are an exact per-packet CPU-cost proxy.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Iterable

from . import channels
from .channels import CHANNEL_COUNT, ChannelSpec
from .packets import Packet, field_default, set_field

RULE_COUNT = CHANNEL_COUNT


class Disposition(enum.Enum):
    NORMALIZED = "normalized"
    FORWARDED = "forwarded"


@dataclass(frozen=True)
class NormalizationRule:
    id: int
    channel: ChannelSpec

    def matches(self, packet: Packet) -> bool:
        """True when the packet carries the paired channel's signal."""
        return channels.decode(self.channel, packet) == 1

    def apply(self, packet: Packet) -> Packet:
        """Reset the paired channel's field to its schema default."""
        return set_field(packet, self.channel.field, field_default(self.channel.field))


_RULES: tuple[NormalizationRule, ...] = tuple(
    NormalizationRule(id=spec.id, channel=spec) for spec in channels.catalog()
)

ALL_RULE_IDS: frozenset[int] = frozenset(range(RULE_COUNT))


def all_rules() -> tuple[NormalizationRule, ...]:
    return _RULES


def rule(rule_id: int) -> NormalizationRule:
    return _RULES[rule_id]


def rule_for_channel(channel_id: int) -> int:
    """Bijection between channel ids and rule ids."""
    if not 0 <= channel_id < CHANNEL_COUNT:
        raise ValueError(f"channel id out of range: {channel_id}")
    return channel_id


@dataclass
class DispositionCounters:
    normalized: int = 0
    forwarded: int = 0
    rule_evaluations: int = 0

    @property
    def total(self) -> int:
        return self.normalized + self.forwarded


def apply_ruleset(
    active: Iterable[int],
    packet: Packet,
    counters: DispositionCounters | None = None,
) -> tuple[Packet, Disposition]:
    """Run ``packet`` through every active rule.

    All active matchers are evaluated even after a hit, keeping the
    rule-evaluation counter at exactly ``packets * |active|``. Matching
    rules' actions are applied in ascending rule-id order.
    """
    matched = []
    evaluated = 0
    for rule_id in sorted(active):
        evaluated += 1
        if _RULES[rule_id].matches(packet):
            matched.append(rule_id)
    for rule_id in matched:
        packet = _RULES[rule_id].apply(packet)
    disposition = Disposition.NORMALIZED if matched else Disposition.FORWARDED
    if counters is not None:
        counters.rule_evaluations += evaluated
        if matched:
            counters.normalized += 1
        else:
            counters.forwarded += 1
    return packet, disposition
