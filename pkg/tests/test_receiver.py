import math
import random

import pytest
from hypothesis import given, strategies as st

from diskchannel import (
    AmbiguousPhase,
    ConstantSignal,
    DecodeError,
    DecoderConfig,
    DiskModel,
    InterfererProfile,
    NoStartMarker,
    SenderConfig,
    SyncNotFound,
    build_access_schedule,
    decode_message,
    decode_message_with_diagnostics,
    decode_with_gab,
    detect_bit_start,
    encapsulate,
    encode_tcv,
    find_transmission_onset,
    frame_sync,
    per_bit_averages,
    random_bits,
    simulate,
    symbol_sync,
)
from oracles import bit_start_vote_loop, gab_fixed_point_loop

CONFIG = DecoderConfig(bit_time_ms=1000, probe_interval_ms=200)


def square_wave(bits, spb, high=30.0, low=10.0, offset=0, jitter=0.0, seed=0):
    """Synthetic trace: one plateau of spb samples per bit, shifted right."""
    rng = random.Random(seed)
    samples = [low] * offset
    for b in bits:
        level = high if b else low
        samples.extend(level + rng.gauss(0.0, jitter) for _ in range(spb))
    return samples


def transmit(payload, bit_time=1000, pri=200, n=5, th=0.9, lead_in=None,
             disk=None, seed=0):
    frame = encapsulate(payload)
    schedule = build_access_schedule(
        encode_tcv(frame, bit_time), SenderConfig(bit_time, n, th)
    )
    lead_in = 2 * bit_time if lead_in is None else lead_in
    span = lead_in + schedule.total_duration_ms + bit_time
    run = math.ceil(span / pri) * pri
    return simulate(
        schedule, disk or DiskModel(), InterfererProfile.none(), pri, run,
        lead_in, seed=seed,
    )


# --- phase 1: bit start detection ---


@pytest.mark.parametrize("offset", [0, 1, 2, 3, 4])
def test_detect_bit_start_square_wave(offset):
    bits = (1, 0, 1, 1, 0, 1, 0, 0, 1, 0)
    values = square_wave(bits, spb=5, offset=offset)
    config = DecoderConfig(bit_time_ms=50, probe_interval_ms=10)
    assert detect_bit_start(values, config) == offset


def test_detect_bit_start_agrees_with_vote_oracle_under_jitter():
    rng = random.Random(3)
    config = DecoderConfig(bit_time_ms=50, probe_interval_ms=10)
    for trial in range(25):
        bits = [rng.randint(0, 1) for _ in range(12)]
        offset = rng.randrange(5)
        values = square_wave(bits, spb=5, offset=offset, jitter=1.0, seed=trial)
        assert detect_bit_start(values, config) == bit_start_vote_loop(values, 5)


def test_detect_bit_start_rejects_flat_trace():
    config = DecoderConfig(bit_time_ms=50, probe_interval_ms=10)
    with pytest.raises(AmbiguousPhase):
        detect_bit_start([10.0] * 40, config)


def test_detect_bit_start_needs_three_bit_times():
    config = DecoderConfig(bit_time_ms=50, probe_interval_ms=10)
    with pytest.raises(ValueError):
        detect_bit_start([10.0, 30.0] * 7, config)


def test_decoder_config_validation():
    with pytest.raises(ValueError):
        DecoderConfig(bit_time_ms=100, probe_interval_ms=30)
    with pytest.raises(ValueError):
        DecoderConfig(bit_time_ms=0, probe_interval_ms=10)
    assert DecoderConfig(bit_time_ms=100, probe_interval_ms=100).samples_per_bit == 1


# --- phase 2: averaging and threshold decoding ---


def test_per_bit_averages_groups_and_drops_tail():
    values = [1.0, 3.0, 2.0, 4.0, 9.0]
    config = DecoderConfig(bit_time_ms=20, probe_interval_ms=10)
    assert per_bit_averages(values, 0, config) == (2.0, 3.0)
    assert per_bit_averages(values, 1, config) == (2.5, 6.5)


def test_per_bit_averages_offset_range():
    config = DecoderConfig(bit_time_ms=20, probe_interval_ms=10)
    with pytest.raises(ValueError):
        per_bit_averages([1.0] * 6, 2, config)


def test_gab_correction_single_step():
    estimates = decode_with_gab([10.0, 10.0, 10.0, 2.0], CONFIG)
    assert estimates.decoded == (1, 1, 1, 0)
    assert estimates.gab_history[0] == pytest.approx(8.0)
    assert estimates.gab_final == pytest.approx(6.0)


def test_gab_balanced_classes_need_no_correction():
    estimates = decode_with_gab([10.0, 2.0, 10.0, 2.0], CONFIG)
    assert estimates.decoded == (1, 0, 1, 0)
    assert len(estimates.gab_history) == 1


def test_gab_rejects_constant_input():
    with pytest.raises(ConstantSignal):
        decode_with_gab([5.0, 5.0, 5.0], CONFIG)


@given(
    st.lists(st.integers(min_value=0, max_value=1), min_size=4, max_size=96).filter(
        lambda bits: 0.25 <= sum(bits) / len(bits) <= 0.75
    ),
    st.floats(min_value=1.0, max_value=30.0),
    st.randoms(use_true_random=False),
)
def test_gab_decodes_separated_classes(bits, gap, rng):
    """Separated class levels decode exactly for roughly balanced mixes.

    Heavily skewed mixes can seed the threshold inside the majority
    cluster, which is out of the decoder's documented envelope, so the
    strategy keeps the 1-fraction within [1/4, 3/4].
    """
    averages = [
        10.0 + gap + rng.uniform(0, gap / 8) if b else 10.0 + rng.uniform(0, gap / 8)
        for b in bits
    ]
    estimates = decode_with_gab(averages, CONFIG)
    assert estimates.decoded == tuple(bits)
    oracle_bits, oracle_gab = gab_fixed_point_loop(averages)
    assert estimates.decoded == tuple(oracle_bits)
    assert estimates.gab_final == pytest.approx(oracle_gab)


# --- phases 3 and 4: sync markers ---


def test_symbol_sync_finds_preamble_end():
    frame = encapsulate((1, 1, 0, 0, 1))
    assert symbol_sync(frame) == 16


def test_symbol_sync_skips_short_alternations():
    bits = (1, 0, 1, 0, 1, 1) + encapsulate((0, 1, 0, 1))
    # the run must be at least eight long, so the leading wiggle is passed over
    assert symbol_sync(bits) == 6 + 16


def test_symbol_sync_missing():
    with pytest.raises(SyncNotFound):
        symbol_sync((1, 1, 0, 0) * 10)


def test_frame_sync_returns_payload_span():
    payload = (1, 0, 0, 1, 1)
    frame = encapsulate(payload)
    start, end = frame_sync(frame, symbol_sync(frame))
    assert frame[start:end] == payload


def test_frame_sync_rejects_corrupt_start_marker():
    frame = list(encapsulate((1, 0, 1)))
    frame[18] = 1 - frame[18]
    with pytest.raises(NoStartMarker):
        frame_sync(tuple(frame), 16)


# --- onset detection ---


def test_onset_detection_trims_idle_lead():
    values = [10.0, 10.1, 9.9, 10.0, 10.05, 30.0, 30.0, 10.0]
    assert find_transmission_onset(values) == 5


def test_onset_detection_defaults_to_zero():
    assert find_transmission_onset([10.0, 10.0, 10.0]) == 0
    assert find_transmission_onset([30.0] * 12) == 0


# --- the assembled pipeline ---


def test_decode_message_clean_channel():
    payload = random_bits(96, 5)
    trace = transmit(payload)
    assert decode_message(trace, CONFIG) == payload


def test_decode_message_reports_failing_phase():
    # a valid preamble followed by garbage instead of the start marker
    message = (1, 0) * 8 + (1, 1, 0, 0) * 6
    schedule = build_access_schedule(
        encode_tcv(message, 1000), SenderConfig(1000, 5, 0.9)
    )
    trace = simulate(
        schedule, DiskModel(), InterfererProfile.none(), 200, 44_000, 2000, seed=0
    )
    with pytest.raises(DecodeError) as err:
        decode_message(trace, CONFIG)
    assert err.value.phase == "frame sync"
    assert isinstance(err.value.cause, NoStartMarker)


def test_decode_message_saturated_channel_fails_in_phase_one():
    # background load beyond disk capacity pins the trace flat, so no
    # sampling offset looks better than any other
    schedule = build_access_schedule(
        encode_tcv((1,), 1000), SenderConfig(1000, 5, 1.0)
    )
    flood = InterfererProfile(kind="stress", load=14)
    trace = simulate(schedule, DiskModel(), flood, 200, 6000, 0, seed=0)
    with pytest.raises(DecodeError) as err:
        decode_message(trace, CONFIG)
    assert err.value.phase == "bit-start detection"
    assert isinstance(err.value.cause, AmbiguousPhase)


def test_diagnostics_capture_pipeline_state():
    payload = random_bits(48, 11)
    trace = transmit(payload)
    decoded, diag = decode_message_with_diagnostics(trace, CONFIG)
    assert decoded == payload
    assert diag.payload_span is not None
    assert diag.sync_end is not None
    assert len(diag.per_bit_avg) >= len(payload) + 32
    assert diag.gab_history


def test_decode_with_moderate_noise_and_late_start():
    payload = random_bits(64, 21)
    trace = transmit(payload, lead_in=7400, disk=DiskModel.preset("moderate"), seed=3)
    assert decode_message(trace, CONFIG) == payload
