"""Synthetic packet header model.

Packets carry a fixed 25-field header schema. Field values are plain
unsigned integers checked against the declared bit width; packets are
immutable, so every mutation returns a fresh packet.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, replace
from typing import Optional


class WidthOverflow(ValueError):
    """Value does not fit the field's declared bit width."""


class PacketKind(enum.Enum):
    PROBE = "probe"
    COM = "com"
    LEGIT = "legit"


class FieldId(enum.IntEnum):
    """Header fields usable by covert channels and normalization rules."""

    V4_RESERVED_FLAG = 0
    V4_IDENTIFICATION = 1
    V4_DF_FLAG = 2
    V4_MF_FLAG = 3
    V4_TOS = 4
    V4_ECN = 5
    V4_TTL = 6
    V4_FRAG_OFFSET = 7
    V4_OPTION_PAD = 8
    V4_STREAM_ID = 9
    T_SEQ_LSB = 10
    T_ACK_SKEW = 11
    T_RESERVED = 12
    T_NS_FLAG = 13
    T_WINDOW = 14
    T_WINDOW_SCALE = 15
    T_URGENT_PTR = 16
    T_MSS_ECHO = 17
    T_TS_ECHO_LSB = 18
    U_CHECKSUM_PRESENT = 19
    U_LENGTH_SKEW = 20
    U_SRC_PORT_LSB = 21
    U_DST_PORT_LSB = 22
    V6_FLOW_LABEL = 23
    V6_TRAFFIC_CLASS = 24


# Bit width per field, indexed by FieldId value.
FIELD_WIDTHS: tuple[int, ...] = (
    1,   # V4_RESERVED_FLAG
    16,  # V4_IDENTIFICATION
    1,   # V4_DF_FLAG
    1,   # V4_MF_FLAG
    8,   # V4_TOS
    2,   # V4_ECN
    8,   # V4_TTL
    13,  # V4_FRAG_OFFSET
    8,   # V4_OPTION_PAD
    16,  # V4_STREAM_ID
    8,   # T_SEQ_LSB
    8,   # T_ACK_SKEW
    4,   # T_RESERVED
    1,   # T_NS_FLAG
    16,  # T_WINDOW
    4,   # T_WINDOW_SCALE
    16,  # T_URGENT_PTR
    16,  # T_MSS_ECHO
    8,   # T_TS_ECHO_LSB
    1,   # U_CHECKSUM_PRESENT
    8,   # U_LENGTH_SKEW
    8,   # U_SRC_PORT_LSB
    8,   # U_DST_PORT_LSB
    20,  # V6_FLOW_LABEL
    8,   # V6_TRAFFIC_CLASS
)

# Normalized ("no covert signal") value per field. A scrubbed packet is a
# packet whose covert-capable fields all sit at these values.
FIELD_DEFAULTS: tuple[int, ...] = tuple(
    64 if f == FieldId.V4_TTL else 0 for f in FieldId
)

SCHEMA_SIZE = len(FieldId)

assert len(FIELD_WIDTHS) == SCHEMA_SIZE
assert all(1 <= w <= 32 for w in FIELD_WIDTHS)
assert all(0 <= d < (1 << w) for d, w in zip(FIELD_DEFAULTS, FIELD_WIDTHS))


def field_width(field: FieldId) -> int:
    return FIELD_WIDTHS[field]


def field_default(field: FieldId) -> int:
    return FIELD_DEFAULTS[field]


@dataclass(frozen=True)
class Packet:
    """Immutable packet: fixed header vector plus bookkeeping tags.

    ``channel_hint`` is trace/debug metadata only; warden and receiver code
    paths operate on ``header`` alone and never accept the hint.
    """

    seq: int
    kind: PacketKind
    header: tuple[int, ...]
    send_time: float = 0.0
    channel_hint: Optional[int] = None


def default_packet(kind: PacketKind, seq: int) -> Packet:
    """Packet with every field at its schema default."""
    return Packet(seq=seq, kind=kind, header=FIELD_DEFAULTS)


def set_field(packet: Packet, field: FieldId, value: int) -> Packet:
    """Return a copy of ``packet`` with ``field`` set to ``value``."""
    if not 0 <= value < (1 << FIELD_WIDTHS[field]):
        raise WidthOverflow(
            f"{field.name}={value} exceeds {FIELD_WIDTHS[field]}-bit width"
        )
    header = packet.header[:field] + (value,) + packet.header[field + 1:]
    return replace(packet, header=header)


def get_field(packet: Packet, field: FieldId) -> int:
    return packet.header[field]


def trace_line(packet: Packet) -> str:
    """Line-oriented debug rendering: ``seq,kind,send_time,field=value,...``"""
    fields = ",".join(f"{f.name}={packet.header[f]}" for f in FieldId)
    return f"{packet.seq},{packet.kind.value},{packet.send_time!r},{fields}"
