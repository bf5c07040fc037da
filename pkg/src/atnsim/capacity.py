"""Codec accounting and per-platform session limits.

The per-LAP voice and video limits are calibrated constants (78 AMR calls,
18 H.264 sessions on a 54 Mb/s 802.11g LAP); they are not re-derived from
the link rate. Mixed loads are admitted with a linear normalized-load rule.
"""
from __future__ import annotations

from dataclasses import dataclass

from .errors import UnsupportedOperation, ValidationError

VOICE = "voice"
VIDEO = "video"
MEDIA = (VOICE, VIDEO)

ADMISSION_SLACK = 1e-12


@dataclass(frozen=True)
class CodecSpec:
    name: str
    media: str
    bit_rate: float  # kb/s
    sample_period: float = 0.0  # ms, voice only
    header_overhead: int = 0  # bytes per packet, voice only
    mos: float | None = None  # carried for reporting, never computed

    def __post_init__(self):
        problems = []
        if self.media not in MEDIA:
            problems.append(f"codec.media: must be one of {MEDIA}, got {self.media!r}")
        if not self.bit_rate > 0:
            problems.append(f"codec.bit_rate: must be > 0, got {self.bit_rate}")
        if self.media == VOICE and not self.sample_period > 0:
            problems.append(f"codec.sample_period: voice codecs need > 0 ms, got {self.sample_period}")
        if self.header_overhead < 0:
            problems.append(f"codec.header_overhead: must be >= 0, got {self.header_overhead}")
        if problems:
            raise ValidationError(problems)


AMR_12_2 = CodecSpec("AMR", VOICE, 12.2, sample_period=20.0, header_overhead=40, mos=3.8)
H264_384 = CodecSpec("H.264", VIDEO, 384.0)


@dataclass(frozen=True)
class PlatformCapacity:
    achievable_throughput: float  # Mb/s
    voice_sessions_max: int
    video_sessions_max: int

    def __post_init__(self):
        problems = []
        if not self.achievable_throughput > 0:
            problems.append(
                f"capacity.achievable_throughput: must be > 0, got {self.achievable_throughput}"
            )
        for field in ("voice_sessions_max", "video_sessions_max"):
            value = getattr(self, field)
            if int(value) != value or value < 1:
                problems.append(f"capacity.{field}: must be a positive integer, got {value}")
        if problems:
            raise ValidationError(problems)

    def sessions_max(self, media: str) -> int:
        if media == VOICE:
            return self.voice_sessions_max
        if media == VIDEO:
            return self.video_sessions_max
        raise ValidationError(f"media: must be one of {MEDIA}, got {media!r}")


LAP_802_11G = PlatformCapacity(54.0, 78, 18)


def ip_packet_rate(codec: CodecSpec) -> float:
    """Per-direction network-layer bit rate (kb/s) including per-packet headers."""
    if codec.media != VOICE:
        raise UnsupportedOperation(f"ip_packet_rate applies to voice codecs, not {codec.media!r}")
    payload_bits = codec.bit_rate * codec.sample_period  # kb/s * ms = bits
    return (payload_bits + 8 * codec.header_overhead) / codec.sample_period


def normalized_session_load(media: str, cap: PlatformCapacity) -> float:
    return 1.0 / cap.sessions_max(media)


def platform_load(voice_n: int, video_n: int, cap: PlatformCapacity) -> float:
    return voice_n / cap.voice_sessions_max + video_n / cap.video_sessions_max


def fits_on_platform(voice_n: int, video_n: int, cap: PlatformCapacity) -> bool:
    return platform_load(voice_n, video_n, cap) <= 1.0 + ADMISSION_SLACK
