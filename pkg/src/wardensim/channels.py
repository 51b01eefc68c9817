"""Catalog of 50 covert storage channels.

Each channel hides one secret bit per packet inside a single header field.
Four encoding modes exist:

* ``SET_BIT``      -- a one-bit flag; flag raised means bit 1.
* ``VALUE_MATCH``  -- the field equals a per-channel magic constant.
* ``LSB_MODULATE`` -- the field's least significant bit carries the secret.
* ``RANGE_SELECT`` -- the field lands inside a reserved value range.

The catalog is enumerated literally so that the pairing between channels
and normalization rules stays auditable. Constants were chosen so that no
channel's bit-1 encoding triggers any other channel's decoder, and so that
an all-default header decodes to 0 on every channel; both facts are
enforced by tests.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

from .packets import (
    FieldId,
    Packet,
    field_default,
    set_field,
)

CHANNEL_COUNT = 50


class Mode(enum.Enum):
    SET_BIT = "set_bit"
    VALUE_MATCH = "value_match"
    LSB_MODULATE = "lsb_modulate"
    RANGE_SELECT = "range_select"


@dataclass(frozen=True)
class ChannelSpec:
    """One covert channel: identity, target field, mode and constants."""

    id: int
    name: str
    field: FieldId
    mode: Mode
    params: tuple[int, ...] = ()

    @property
    def match_value(self) -> int:
        return self.params[0]

    @property
    def range_lo(self) -> int:
        return self.params[0]

    @property
    def range_hi(self) -> int:
        return self.params[1]


F = FieldId

# (name, field, mode, params) in catalog order. Index 0 is the reserved-flag
# channel, index 1 the identification magic-value channel.
_CATALOG_ROWS: tuple[tuple[str, FieldId, Mode, tuple[int, ...]], ...] = (
    ("v4-reserved-flag", F.V4_RESERVED_FLAG, Mode.SET_BIT, ()),
    ("v4-ident-magic", F.V4_IDENTIFICATION, Mode.VALUE_MATCH, (0xCAFE,)),
    ("v4-ident-lsb", F.V4_IDENTIFICATION, Mode.LSB_MODULATE, ()),
    ("v4-ident-range", F.V4_IDENTIFICATION, Mode.RANGE_SELECT, (0x4000, 0x4FFF)),
    ("v4-df-flag", F.V4_DF_FLAG, Mode.SET_BIT, ()),
    ("v4-mf-flag", F.V4_MF_FLAG, Mode.SET_BIT, ()),
    ("v4-tos-magic", F.V4_TOS, Mode.VALUE_MATCH, (0xA0,)),
    ("v4-tos-lsb", F.V4_TOS, Mode.LSB_MODULATE, ()),
    ("v4-ecn-magic", F.V4_ECN, Mode.VALUE_MATCH, (0x2,)),
    ("v4-ecn-lsb", F.V4_ECN, Mode.LSB_MODULATE, ()),
    ("v4-ttl-magic", F.V4_TTL, Mode.VALUE_MATCH, (0xC8,)),
    ("v4-ttl-lsb", F.V4_TTL, Mode.LSB_MODULATE, ()),
    ("v4-frag-magic", F.V4_FRAG_OFFSET, Mode.VALUE_MATCH, (0x0CAE,)),
    ("v4-frag-lsb", F.V4_FRAG_OFFSET, Mode.LSB_MODULATE, ()),
    ("v4-frag-range", F.V4_FRAG_OFFSET, Mode.RANGE_SELECT, (0x1000, 0x17FF)),
    ("v4-optpad-magic", F.V4_OPTION_PAD, Mode.VALUE_MATCH, (0xAA,)),
    ("v4-optpad-lsb", F.V4_OPTION_PAD, Mode.LSB_MODULATE, ()),
    ("v4-stream-magic", F.V4_STREAM_ID, Mode.VALUE_MATCH, (0xFACE,)),
    ("v4-stream-lsb", F.V4_STREAM_ID, Mode.LSB_MODULATE, ()),
    ("t-seq-magic", F.T_SEQ_LSB, Mode.VALUE_MATCH, (0x68,)),
    ("t-seq-lsb", F.T_SEQ_LSB, Mode.LSB_MODULATE, ()),
    ("t-seq-range", F.T_SEQ_LSB, Mode.RANGE_SELECT, (0x10, 0x1F)),
    ("t-ack-magic", F.T_ACK_SKEW, Mode.VALUE_MATCH, (0x66,)),
    ("t-ack-lsb", F.T_ACK_SKEW, Mode.LSB_MODULATE, ()),
    ("t-reserved-magic", F.T_RESERVED, Mode.VALUE_MATCH, (0xA,)),
    ("t-reserved-lsb", F.T_RESERVED, Mode.LSB_MODULATE, ()),
    ("t-ns-flag", F.T_NS_FLAG, Mode.SET_BIT, ()),
    ("t-window-magic", F.T_WINDOW, Mode.VALUE_MATCH, (0xBEEE,)),
    ("t-window-lsb", F.T_WINDOW, Mode.LSB_MODULATE, ()),
    ("t-window-range", F.T_WINDOW, Mode.RANGE_SELECT, (0x4000, 0x4FFF)),
    ("t-wscale-magic", F.T_WINDOW_SCALE, Mode.VALUE_MATCH, (0xC,)),
    ("t-wscale-lsb", F.T_WINDOW_SCALE, Mode.LSB_MODULATE, ()),
    ("t-urgptr-magic", F.T_URGENT_PTR, Mode.VALUE_MATCH, (0xDEAC,)),
    ("t-urgptr-lsb", F.T_URGENT_PTR, Mode.LSB_MODULATE, ()),
    ("t-urgptr-range", F.T_URGENT_PTR, Mode.RANGE_SELECT, (0x4000, 0x4FFF)),
    ("t-mss-magic", F.T_MSS_ECHO, Mode.VALUE_MATCH, (0x05B4,)),
    ("t-mss-lsb", F.T_MSS_ECHO, Mode.LSB_MODULATE, ()),
    ("t-tsecho-magic", F.T_TS_ECHO_LSB, Mode.VALUE_MATCH, (0x7E,)),
    ("t-tsecho-lsb", F.T_TS_ECHO_LSB, Mode.LSB_MODULATE, ()),
    ("u-checksum-flag", F.U_CHECKSUM_PRESENT, Mode.SET_BIT, ()),
    ("u-length-magic", F.U_LENGTH_SKEW, Mode.VALUE_MATCH, (0x44,)),
    ("u-length-lsb", F.U_LENGTH_SKEW, Mode.LSB_MODULATE, ()),
    ("u-sport-magic", F.U_SRC_PORT_LSB, Mode.VALUE_MATCH, (0xD2,)),
    ("u-sport-lsb", F.U_SRC_PORT_LSB, Mode.LSB_MODULATE, ()),
    ("u-dport-magic", F.U_DST_PORT_LSB, Mode.VALUE_MATCH, (0x7A,)),
    ("u-dport-lsb", F.U_DST_PORT_LSB, Mode.LSB_MODULATE, ()),
    ("v6-flow-magic", F.V6_FLOW_LABEL, Mode.VALUE_MATCH, (0xBEBC8,)),
    ("v6-flow-lsb", F.V6_FLOW_LABEL, Mode.LSB_MODULATE, ()),
    ("v6-class-magic", F.V6_TRAFFIC_CLASS, Mode.VALUE_MATCH, (0xB8,)),
    ("v6-class-lsb", F.V6_TRAFFIC_CLASS, Mode.LSB_MODULATE, ()),
)

_CATALOG: tuple[ChannelSpec, ...] = tuple(
    ChannelSpec(id=i, name=name, field=field, mode=mode, params=params)
    for i, (name, field, mode, params) in enumerate(_CATALOG_ROWS)
)

assert len(_CATALOG) == CHANNEL_COUNT


def catalog() -> tuple[ChannelSpec, ...]:
    """The 50 channel specs, in a fixed order, identical on every call."""
    return _CATALOG


def channel(channel_id: int) -> ChannelSpec:
    return _CATALOG[channel_id]


def encode(spec: ChannelSpec, packet: Packet, bit: int) -> Packet:
    """Embed ``bit`` into ``packet`` using ``spec``'s field and mode.

    Only the channel's own field is touched; the previous field content is
    overwritten, so decode(encode(p, b)) == b holds for any input packet.
    """
    if bit not in (0, 1):
        raise ValueError(f"covert bit must be 0 or 1, got {bit!r}")
    default = field_default(spec.field)
    if bit == 0:
        return set_field(packet, spec.field, default)
    if spec.mode is Mode.SET_BIT:
        value = 1
    elif spec.mode is Mode.VALUE_MATCH:
        value = spec.match_value
    elif spec.mode is Mode.LSB_MODULATE:
        value = default | 1
    else:  # RANGE_SELECT: the canonical in-range value is the lower bound
        value = spec.range_lo
    return set_field(packet, spec.field, value)


def decode(spec: ChannelSpec, packet: Packet) -> int:
    """Recover the covert bit carried by ``packet`` on this channel.

    Pure function of the header; never looks at packet metadata.
    """
    value = packet.header[spec.field]
    if spec.mode is Mode.SET_BIT:
        return 1 if value != 0 else 0
    if spec.mode is Mode.VALUE_MATCH:
        return 1 if value == spec.match_value else 0
    if spec.mode is Mode.LSB_MODULATE:
        return value & 1
    return 1 if spec.range_lo <= value <= spec.range_hi else 0


def params_text(spec: ChannelSpec) -> str:
    if spec.mode is Mode.VALUE_MATCH:
        return f"k=0x{spec.match_value:X}"
    if spec.mode is Mode.RANGE_SELECT:
        return f"lo=0x{spec.range_lo:X};hi=0x{spec.range_hi:X}"
    return ""


def catalog_csv_lines() -> list[str]:
    """Catalog rendered as CSV rows: ``id,name,field,mode,params``."""
    lines = ["id,name,field,mode,params"]
    for spec in _CATALOG:
        lines.append(
            f"{spec.id},{spec.name},{spec.field.name},"
            f"{spec.mode.value},{params_text(spec)}"
        )
    return lines
