from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from atnsim.capacity import (
    AMR_12_2, H264_384, LAP_802_11G, CodecSpec, PlatformCapacity, fits_on_platform,
    ip_packet_rate, normalized_session_load,
)
from atnsim.errors import UnsupportedOperation, ValidationError


def test_amr_ip_rate():
    # 244 payload bits + 320 header bits every 20 ms
    assert ip_packet_rate(AMR_12_2) == pytest.approx(564 / 20)
    assert ip_packet_rate(AMR_12_2) == pytest.approx(28.2)


def test_amr_ip_rate_40ms():
    codec = CodecSpec("AMR", "voice", 12.2, sample_period=40, header_overhead=40)
    assert ip_packet_rate(codec) == pytest.approx((488 + 320) / 40)
    assert ip_packet_rate(codec) == pytest.approx(20.2)


@given(st.floats(0.1, 1000), st.floats(1, 200))
def test_ip_rate_without_headers_is_codec_rate(rate, period):
    codec = CodecSpec("x", "voice", rate, sample_period=period, header_overhead=0)
    assert ip_packet_rate(codec) == pytest.approx(rate)


@given(st.floats(0.1, 100), st.integers(1, 100), st.floats(1, 100), st.floats(1, 100))
def test_ip_rate_decreases_with_period(rate, header, p1, p2):
    if p1 == p2:
        return
    lo, hi = sorted((p1, p2))
    a = ip_packet_rate(CodecSpec("x", "voice", rate, sample_period=lo, header_overhead=header))
    b = ip_packet_rate(CodecSpec("x", "voice", rate, sample_period=hi, header_overhead=header))
    assert b < a


def test_ip_rate_rejects_video():
    with pytest.raises(UnsupportedOperation):
        ip_packet_rate(H264_384)


def test_codec_validation():
    with pytest.raises(ValidationError):
        CodecSpec("bad", "voice", 12.2, sample_period=0)
    with pytest.raises(ValidationError):
        CodecSpec("bad", "video", 0)
    assert AMR_12_2.mos == 3.8


def test_normalized_load():
    assert normalized_session_load("voice", LAP_802_11G) == pytest.approx(1 / 78)
    assert normalized_session_load("video", LAP_802_11G) == pytest.approx(1 / 18)
    assert normalized_session_load("voice", PlatformCapacity(54, 1, 18)) == 1.0
    with pytest.raises(ValidationError):
        PlatformCapacity(54, 0, 18)


def test_pure_type_limits():
    assert fits_on_platform(78, 0, LAP_802_11G)
    assert not fits_on_platform(79, 0, LAP_802_11G)
    assert fits_on_platform(0, 18, LAP_802_11G)
    assert not fits_on_platform(0, 19, LAP_802_11G)


def test_half_and_half_fills_exactly():
    assert Fraction(39, 78) + Fraction(9, 18) == 1
    assert fits_on_platform(39, 9, LAP_802_11G)
    assert not fits_on_platform(40, 9, LAP_802_11G)


caps = st.builds(PlatformCapacity, st.just(54.0), st.integers(1, 200), st.integers(1, 60))


@given(caps)
def test_limits_are_tight(cap):
    assert fits_on_platform(cap.voice_sessions_max, 0, cap)
    assert fits_on_platform(0, cap.video_sessions_max, cap)
    assert not fits_on_platform(cap.voice_sessions_max + 1, 0, cap)
    assert not fits_on_platform(0, cap.video_sessions_max + 1, cap)


@given(caps, st.integers(0, 250), st.integers(0, 70))
def test_admission_monotone(cap, v, w):
    if fits_on_platform(v, w, cap):
        if v:
            assert fits_on_platform(v - 1, w, cap)
        if w:
            assert fits_on_platform(v, w - 1, cap)


@given(caps, st.integers(0, 250), st.integers(0, 70))
def test_admission_agrees_with_exact_rationals(cap, v, w):
    exact = Fraction(v, cap.voice_sessions_max) + Fraction(w, cap.video_sessions_max) <= 1
    assert fits_on_platform(v, w, cap) == exact
