import math

import numpy as np
import pytest

from wardensim.channels import catalog, encode
from wardensim.packets import PacketKind, default_packet
from wardensim.rules import Disposition, RULE_COUNT
from wardensim.warden import (
    ClockRegression,
    DynamicWarden,
    NoWarden,
    RandomDynamicWarden,
    RegularWarden,
    Warden,
    round_half_up,
    variant_warden,
)


def _warden(config, seed=1):
    return Warden(config, np.random.default_rng(seed))


def test_round_half_up_on_rule_fractions():
    assert round_half_up(0.95 * RULE_COUNT) == 48
    assert round_half_up(0.40 * RULE_COUNT) == 20
    assert round_half_up(0.30 * RULE_COUNT) == 15
    assert round_half_up(0.20 * RULE_COUNT) == 10
    assert round_half_up(0.02 * RULE_COUNT) == 1
    assert round_half_up(47.49) == 47


def test_none_warden_forwards_everything():
    w = _warden(NoWarden())
    assert w.active == ()
    assert not w.has_reloads
    packet = encode(catalog()[3], default_packet(PacketKind.COM, 0), 1)
    out, disposition = w.process(packet, 1.0)
    assert disposition is Disposition.FORWARDED
    assert out.header == packet.header
    assert w.counters.normalized == 0


def test_regular_warden_is_time_invariant():
    w = _warden(RegularWarden(0.95))
    assert len(w.active) == 48
    frozen = w.active
    for t in range(0, 1000, 7):
        w.maybe_reload(float(t))
    assert w.active == frozen
    assert w.reload_count == 0
    assert math.isinf(w.next_reload)


def test_regular_blocks_exactly_48_of_50_channels():
    w = _warden(RegularWarden(0.95), seed=11)
    blocked = 0
    for cid in range(RULE_COUNT):
        packet = encode(catalog()[cid], default_packet(PacketKind.COM, 0), 1)
        _, disposition = w.process(packet, 0.0)
        if disposition is Disposition.NORMALIZED:
            blocked += 1
    assert blocked == 48


@pytest.mark.parametrize("fraction,size", [(0.4, 20), (0.3, 15), (0.2, 10)])
def test_dynamic_cardinality_exact_at_all_times(fraction, size):
    w = _warden(DynamicWarden(fraction, 2.0), seed=5)
    assert len(w.active) == size
    for step in range(1, 100):
        w.maybe_reload(step * 2.0)
        assert len(w.active) == size


def test_dynamic_reload_schedule_anchored_at_start():
    w = _warden(DynamicWarden(0.4, 2.0), seed=9)
    for t in [0.5, 1.9, 2.0, 2.1, 3.9, 4.0, 6.05, 8.0]:
        w.maybe_reload(t)
    boundaries = [t for t, _ in w.reload_log]
    assert boundaries == [0.0, 2.0, 4.0, 6.0, 8.0]
    assert w.reload_count == 4


def test_active_set_constant_within_interval():
    w = _warden(DynamicWarden(0.4, 2.0), seed=7)
    t = 0.0
    last = (0, w.active)
    while t < 60.0:
        w.maybe_reload(t)
        interval = int(t // 2.0)
        if interval == last[0]:
            assert w.active == last[1]
        last = (interval, w.active)
        t += 0.31


def test_lazy_catch_up_counts_every_boundary():
    w = _warden(DynamicWarden(0.4, 2.0), seed=2)
    w.maybe_reload(11.0)  # five boundaries passed silently
    assert w.reload_count == 5
    assert w.next_reload == 12.0


def test_clock_regression_rejected():
    w = _warden(DynamicWarden(0.4, 2.0))
    w.maybe_reload(5.0)
    with pytest.raises(ClockRegression):
        w.maybe_reload(4.0)


def test_rule_inclusion_uniform_over_many_reloads():
    w = _warden(DynamicWarden(0.4, 1.0), seed=3)
    counts = np.zeros(RULE_COUNT, dtype=int)
    reloads = 10_000
    for step in range(1, reloads + 1):
        w.maybe_reload(float(step))
        counts[list(w.active)] += 1
    freq = counts / reloads
    assert np.all(np.abs(freq - 0.4) <= 0.02)


def test_dynamic_normalizes_covert_packet_at_subset_rate():
    # one fixed channel observed across 10^4 independent subsets
    w = _warden(DynamicWarden(0.4, 1.0), seed=13)
    packet = encode(catalog()[17], default_packet(PacketKind.COM, 0), 1)
    normalized = 0
    trials = 10_000
    for step in range(trials):
        _, disposition = w.process(packet, float(step))
        if disposition is Disposition.NORMALIZED:
            normalized += 1
    assert abs(normalized / trials - 0.4) <= 0.01


def test_consecutive_subsets_may_repeat():
    # independence means repeats are allowed; with 49 of 50 rules they
    # occur about every 50th reload
    w = _warden(DynamicWarden(0.98, 1.0), seed=21)
    repeats = 0
    previous = w.active
    for step in range(1, 2000):
        w.maybe_reload(float(step))
        if w.active == previous:
            repeats += 1
        previous = w.active
    assert repeats > 0


def test_random_dynamic_ranges_respected():
    w = _warden(variant_warden("V2"), seed=4)
    sizes = {len(w.active)}
    intervals = []
    for _ in range(400):
        before = w.next_reload
        w.maybe_reload(w.next_reload)
        sizes.add(len(w.active))
        intervals.append(w.next_reload - before)
    assert min(sizes) >= 10 and max(sizes) <= 20
    assert min(intervals) >= 1.0 and max(intervals) <= 35.0
    # equidistribution should reach both halves of each range
    assert any(s <= 12 for s in sizes) and any(s >= 18 for s in sizes)
    assert any(i < 10 for i in intervals) and any(i > 25 for i in intervals)


def test_variant_table():
    assert variant_warden("V1").rule_count_range == (1, 50)
    assert variant_warden("V2").rule_count_range == (10, 20)
    assert variant_warden("V3").rule_count_range == (10, 50)
    assert variant_warden("V4").rule_count_range == (10, 20)
    assert variant_warden("V1").interval_range == (1.0, 35.0)
    assert variant_warden("V3").interval_range == (1.0, 10.0)
    with pytest.raises(ValueError):
        variant_warden("V5")


def test_regular_subset_is_seed_dependent_sample():
    actives = {(_warden(RegularWarden(0.95), seed=s).active) for s in range(6)}
    assert len(actives) > 1


def test_rejects_unknown_config():
    class Odd:
        pass

    with pytest.raises(TypeError):
        _warden(Odd())


def test_random_dynamic_direct_config():
    cfg = RandomDynamicWarden((1.0, 5.0), (0.5, 0.5))
    w = _warden(cfg, seed=8)
    assert len(w.active) == 25
    w.maybe_reload(w.next_reload)
    assert len(w.active) == 25
