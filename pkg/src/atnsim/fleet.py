"""Minimum LAP fleet sizing, per traffic type and with mixed (shared) loads."""
from __future__ import annotations

import csv
import io
import math
from dataclasses import astuple, dataclass, fields

from .capacity import PlatformCapacity, fits_on_platform, platform_load
from .errors import ValidationError


def laps_for_type(sessions: int, sessions_max: int) -> int:
    if sessions_max < 1:
        raise ValidationError(f"sessions_max: must be >= 1, got {sessions_max}")
    if sessions < 0:
        raise ValidationError(f"sessions: must be >= 0, got {sessions}")
    return -(-sessions // sessions_max)


def pack_sessions(voice_n: int, video_n: int, cap: PlatformCapacity) -> list[tuple[int, int]]:
    """First-fit-decreasing packing; returns (voice, video) counts per LAP.

    Videos are packed before voice calls whenever their normalized load is
    larger. Each session goes to the lowest-index LAP with room for it.
    Bins are tracked as integer session counts so repeated float additions
    never drift past the admission rule.
    """
    if voice_n < 0 or video_n < 0:
        raise ValidationError("session counts must be >= 0")
    order = [("video", video_n), ("voice", voice_n)]
    if cap.voice_sessions_max < cap.video_sessions_max:
        order.reverse()
    bins: list[list[int]] = []
    for media, count in order:
        for _ in range(count):
            for b in bins:
                trial = (b[0] + 1, b[1]) if media == "voice" else (b[0], b[1] + 1)
                if fits_on_platform(*trial, cap):
                    b[0], b[1] = trial
                    break
            else:
                bins.append([1, 0] if media == "voice" else [0, 1])
    return [tuple(b) for b in bins]


def shared_fleet_size(voice_n: int, video_n: int, cap: PlatformCapacity) -> int:
    return len(pack_sessions(voice_n, video_n, cap))


def load_lower_bound(voice_n: int, video_n: int, cap: PlatformCapacity) -> int:
    return max(0, math.ceil(platform_load(voice_n, video_n, cap) - 1e-12))


@dataclass(frozen=True)
class DayPlan:
    day: int
    voice_sessions: int
    video_sessions: int
    laps_voice: int
    laps_video: int
    laps_dedicated_total: int
    laps_shared_total: int


CSV_COLUMNS = tuple(f.name for f in fields(DayPlan))


@dataclass(frozen=True)
class FleetPlan:
    days: tuple[DayPlan, ...]

    def series(self, column: str) -> list[int]:
        return [getattr(d, column) for d in self.days]

    def peak(self, column: str) -> tuple[int, list[int]]:
        """Maximum of a column and the ascending list of days attaining it."""
        if not self.days:
            raise ValidationError("fleet plan is empty")
        values = self.series(column)
        top = max(values)
        return top, [d.day for d in self.days if getattr(d, column) == top]

    def to_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(CSV_COLUMNS)
        for d in self.days:
            writer.writerow(astuple(d))
        return buf.getvalue()


def plan_day(day: int, voice_n: int, video_n: int, cap: PlatformCapacity) -> DayPlan:
    lv = laps_for_type(voice_n, cap.voice_sessions_max)
    lw = laps_for_type(video_n, cap.video_sessions_max)
    return DayPlan(day, voice_n, video_n, lv, lw, lv + lw, shared_fleet_size(voice_n, video_n, cap))


def build_fleet_plan(scenario) -> FleetPlan:
    cap = scenario.platform_capacity
    video = scenario.video_demand()
    return FleetPlan(tuple(
        plan_day(day, v, w, cap)
        for day, (v, w) in enumerate(zip(scenario.voice_timeline.sessions_per_day, video), start=1)
    ))
