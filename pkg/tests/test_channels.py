import pytest

from wardensim.channels import (
    CHANNEL_COUNT,
    Mode,
    catalog,
    catalog_csv_lines,
    decode,
    encode,
)
from wardensim.packets import (
    FieldId,
    PacketKind,
    default_packet,
    field_default,
    field_width,
    get_field,
    set_field,
)


def test_catalog_has_exactly_50():
    assert len(catalog()) == CHANNEL_COUNT == 50


def test_catalog_referentially_transparent():
    first = catalog()
    again = catalog()
    assert first == again
    assert [c.id for c in first] == list(range(50))


def test_first_channel_is_reserved_flag():
    spec = catalog()[0]
    assert spec.field is FieldId.V4_RESERVED_FLAG
    assert spec.mode is Mode.SET_BIT


def test_second_channel_is_identification_magic():
    spec = catalog()[1]
    assert spec.field is FieldId.V4_IDENTIFICATION
    assert spec.mode is Mode.VALUE_MATCH
    assert spec.match_value == 0xCAFE


def test_specs_pairwise_distinct():
    keys = {(c.field, c.mode, c.params) for c in catalog()}
    assert len(keys) == 50


def test_magic_values_globally_distinct():
    magics = [c.match_value for c in catalog() if c.mode is Mode.VALUE_MATCH]
    assert len(magics) == len(set(magics))


def test_params_fit_field_width():
    for spec in catalog():
        limit = 1 << field_width(spec.field)
        assert all(0 <= p < limit for p in spec.params)


@pytest.mark.parametrize("bit", [0, 1])
def test_roundtrip_all_channels(bit):
    base = default_packet(PacketKind.COM, 0)
    for spec in catalog():
        assert decode(spec, encode(spec, base, bit)) == bit


def test_roundtrip_overwrites_previous_signal():
    # encode(.., 0) must clear a pre-existing bit-1 signal
    base = default_packet(PacketKind.COM, 0)
    for spec in catalog():
        loaded = encode(spec, base, 1)
        assert decode(spec, encode(spec, loaded, 0)) == 0


def test_encode_touches_only_own_field():
    base = default_packet(PacketKind.COM, 0)
    for spec in catalog():
        signal = encode(spec, base, 1)
        for f in FieldId:
            if f != spec.field:
                assert get_field(signal, f) == field_default(f)


def test_reserved_flag_encoding_sets_bit():
    spec = catalog()[0]
    p = encode(spec, default_packet(PacketKind.COM, 0), 1)
    assert get_field(p, FieldId.V4_RESERVED_FLAG) == 1


def test_identification_encoding_sets_magic():
    spec = catalog()[1]
    p = encode(spec, default_packet(PacketKind.COM, 0), 1)
    assert get_field(p, FieldId.V4_IDENTIFICATION) == 0xCAFE


def test_default_packet_decodes_zero_on_every_channel():
    base = default_packet(PacketKind.COM, 0)
    assert all(decode(spec, base) == 0 for spec in catalog())


def test_identification_decode_brute_force_16bit():
    # exactly one of the 2^16 identification values decodes as the magic bit
    spec = catalog()[1]
    base = default_packet(PacketKind.COM, 0)
    hits = []
    for value in range(1 << 16):
        p = set_field(base, FieldId.V4_IDENTIFICATION, value)
        if decode(spec, p) == 1:
            hits.append(value)
    assert hits == [0xCAFE]


def test_decode_ignores_bookkeeping_tags():
    spec = catalog()[4]
    signal = encode(spec, default_packet(PacketKind.COM, 0), 1)
    retagged = signal.__class__(
        seq=99, kind=PacketKind.LEGIT, header=signal.header,
        send_time=123.0, channel_hint=7,
    )
    assert decode(spec, retagged) == 1


def test_encode_rejects_non_bits():
    with pytest.raises(ValueError):
        encode(catalog()[0], default_packet(PacketKind.COM, 0), 2)


def test_catalog_csv_shape():
    lines = catalog_csv_lines()
    assert lines[0] == "id,name,field,mode,params"
    assert len(lines) == 51
    assert lines[1].startswith("0,v4-reserved-flag,V4_RESERVED_FLAG,set_bit,")
    assert "1,v4-ident-magic,V4_IDENTIFICATION,value_match,k=0xCAFE" in lines
