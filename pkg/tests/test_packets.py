import pytest
from hypothesis import given, strategies as st

from wardensim.packets import (
    FIELD_WIDTHS,
    FieldId,
    PacketKind,
    WidthOverflow,
    default_packet,
    field_default,
    field_width,
    get_field,
    set_field,
    trace_line,
)


def test_schema_is_closed_25_fields():
    assert len(FieldId) == 25
    assert len(FIELD_WIDTHS) == 25
    assert all(1 <= w <= 32 for w in FIELD_WIDTHS)


def test_default_packet_no_signal_values():
    p = default_packet(PacketKind.COM, 0)
    assert get_field(p, FieldId.V4_RESERVED_FLAG) == 0
    assert get_field(p, FieldId.V4_TTL) == 64
    for f in FieldId:
        assert 0 <= get_field(p, f) < (1 << field_width(f))


def test_default_packet_carries_inputs():
    p = default_packet(PacketKind.PROBE, 7)
    assert p.seq == 7
    assert p.kind is PacketKind.PROBE
    assert p.channel_hint is None


def test_default_packet_deterministic():
    assert default_packet(PacketKind.COM, 3) == default_packet(PacketKind.COM, 3)


def test_set_field_returns_new_packet():
    p = default_packet(PacketKind.COM, 0)
    q = set_field(p, FieldId.V4_RESERVED_FLAG, 1)
    assert get_field(q, FieldId.V4_RESERVED_FLAG) == 1
    assert get_field(p, FieldId.V4_RESERVED_FLAG) == 0


def test_set_field_identification():
    p = set_field(default_packet(PacketKind.COM, 0), FieldId.V4_IDENTIFICATION, 0xCAFE)
    assert get_field(p, FieldId.V4_IDENTIFICATION) == 0xCAFE


@pytest.mark.parametrize("field", list(FieldId))
def test_width_overflow(field):
    p = default_packet(PacketKind.COM, 0)
    with pytest.raises(WidthOverflow):
        set_field(p, field, 1 << field_width(field))
    with pytest.raises(WidthOverflow):
        set_field(p, field, -1)


@given(
    field=st.sampled_from(list(FieldId)),
    data=st.data(),
)
def test_set_get_roundtrip_and_locality(field, data):
    value = data.draw(st.integers(0, (1 << field_width(field)) - 1))
    p = default_packet(PacketKind.COM, 0)
    q = set_field(p, field, value)
    assert get_field(q, field) == value
    for other in FieldId:
        if other != field:
            assert get_field(q, other) == field_default(other)


def test_get_field_pure():
    p = set_field(default_packet(PacketKind.COM, 0), FieldId.T_WINDOW, 123)
    assert get_field(p, FieldId.T_WINDOW) == get_field(p, FieldId.T_WINDOW)


def test_trace_line_format():
    p = default_packet(PacketKind.PROBE, 9)
    line = trace_line(p)
    assert line.startswith("9,probe,0.0,")
    assert "V4_TTL=64" in line
    assert line.count("=") == len(FieldId)
