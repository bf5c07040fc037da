"""Daily-step simulation over a scenario's horizon.

Each day takes one busy-hour snapshot: derive voice and video demand, put
LAPs in the air, apply the day's scripted link troubles, dispatch relays,
and record what was served and blocked.

Two modes:

IDEAL
    Traffic is pooled across all LAPs regardless of location; the fleet is
    the shared-allocation plan and nothing is ever blocked.
GEOMETRIC
    Demand sits at seeded pseudo-random sites. LAPs are centred greedily
    on the site with the most unserved load, and a session is served only
    by a LAP whose footprint covers its site and has room for it.

Relay timing is in hours from the start of day 1. Relays are dispatched at
the start of a day and the snapshot is taken at its end, so a relay counts
as arrived on day d exactly when ceil(arrival / 24) <= d.
"""
from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import astuple, dataclass, fields

from .capacity import PlatformCapacity, fits_on_platform, platform_load
from .errors import ValidationError
from .fleet import FleetPlan, build_fleet_plan
from .geometry import GeoPoint, coverage_ratio, distance
from .mobility import FAILURE, apply_placement, assign_relays, detect_troubles, relieve

IDEAL = "ideal"
GEOMETRIC = "geometric"
MODES = (IDEAL, GEOMETRIC)

HOURS_PER_DAY = 24.0


class Lcg64:
    """64-bit linear congruential generator (Knuth MMIX constants).

    state' = (6364136223846793005 * state + 1442695040888963407) mod 2**64;
    uniform() returns the top 53 bits of the new state divided by 2**53.
    Day streams start from (seed + day * 0x9E3779B97F4A7C15) mod 2**64.
    """

    MULTIPLIER = 6364136223846793005
    INCREMENT = 1442695040888963407
    MASK = (1 << 64) - 1
    DAY_STRIDE = 0x9E3779B97F4A7C15

    def __init__(self, state: int):
        self.state = state & self.MASK

    @classmethod
    def for_day(cls, seed: int, day: int) -> Lcg64:
        return cls(seed + day * cls.DAY_STRIDE)

    def next(self) -> int:
        self.state = (self.MULTIPLIER * self.state + self.INCREMENT) & self.MASK
        return self.state

    def uniform(self) -> float:
        return (self.next() >> 11) / float(1 << 53)


@dataclass(frozen=True)
class DemandSite:
    position: GeoPoint
    voice: int
    video: int


def apportion(total: int, weights: list[float]) -> list[int]:
    """Largest-remainder split of `total` by `weights` (ties to the lowest index)."""
    wsum = sum(weights)
    quotas = [total * w / wsum for w in weights]
    shares = [math.floor(q) for q in quotas]
    order = sorted(range(len(weights)), key=lambda i: (-(quotas[i] - shares[i]), i))
    for i in order[: total - sum(shares)]:
        shares[i] += 1
    return shares


def demand_sites(seed: int, day: int, count: int, half_side: float,
                 voice: int, video: int) -> list[DemandSite]:
    """Sites drawn in a square centred on the origin, sharing the day's sessions.

    Per site the generator yields x, y and a weight in [0.05, 1.05), in
    that order.
    """
    rng = Lcg64.for_day(seed, day)
    points, weights = [], []
    for _ in range(count):
        x = (2.0 * rng.uniform() - 1.0) * half_side
        y = (2.0 * rng.uniform() - 1.0) * half_side
        points.append(GeoPoint(x, y))
        weights.append(0.05 + rng.uniform())
    vs, ws = apportion(voice, weights), apportion(video, weights)
    return [DemandSite(p, v, w) for p, v, w in zip(points, vs, ws)]


@dataclass(frozen=True)
class LapDeployment:
    center: GeoPoint
    voice: int
    video: int


def place_laps(sites: list[DemandSite], radius: float, cap: PlatformCapacity,
               budget: int | None = None) -> list[LapDeployment]:
    """Greedy densest-unserved-site-first LAP placement with per-LAP admission.

    A new LAP is centred on the site with the largest unserved normalized
    load (lowest index on ties). It admits sessions from covered sites,
    nearest first, taking the heavier media type before the lighter one,
    for as long as fits_on_platform allows. This is a baseline, not an
    optimal coverage algorithm.
    """
    pending = [[s.voice, s.video] for s in sites]
    heavy_first = (1, 0) if cap.video_sessions_max <= cap.voice_sessions_max else (0, 1)
    laps = []
    while any(v or w for v, w in pending) and (budget is None or len(laps) < budget):
        k = min(range(len(sites)), key=lambda i: (-platform_load(*pending[i], cap), i))
        center = sites[k].position
        covered = sorted((i for i, s in enumerate(sites) if distance(center, s.position) <= radius),
                         key=lambda i: (distance(center, sites[i].position), i))
        load = [0, 0]
        for m in heavy_first:
            for i in covered:
                while pending[i][m] > 0:
                    load[m] += 1
                    if not fits_on_platform(load[0], load[1], cap):
                        load[m] -= 1
                        break
                    pending[i][m] -= 1
        laps.append(LapDeployment(center, load[0], load[1]))
    return laps


@dataclass(frozen=True)
class DayRecord:
    day: int
    voice_demand: int
    video_demand: int
    active_dmats: int
    laps_deployed: int
    laps_relaying: int
    sessions_served_voice: int
    sessions_served_video: int
    sessions_blocked_voice: int
    sessions_blocked_video: int
    sessions_blocked: int
    coverage_ratio: float
    unserved_troubles: int


CSV_COLUMNS = tuple(f.name for f in fields(DayRecord))


@dataclass(frozen=True)
class SimReport:
    scenario: str
    mode: str
    seed: int
    days: tuple[DayRecord, ...]

    def series(self, column: str) -> list:
        return [getattr(d, column) for d in self.days]

    def to_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(CSV_COLUMNS)
        for d in self.days:
            row = list(astuple(d))
            row[CSV_COLUMNS.index("coverage_ratio")] = f"{d.coverage_ratio:.10f}"
            writer.writerow(row)
        return buf.getvalue()


def _troubled_graph(base, scenario, day):
    load = dict(base.load)
    down = []
    for t in scenario.troubles:
        if t.active_on(day):
            load[t.link] = t.load
            if t.kind == FAILURE:
                down.append(t.link)
    return base.with_load(load).with_down(down)


def run(scenario, mode: str = IDEAL, seed: int | None = None) -> SimReport:
    if mode not in MODES:
        raise ValidationError(f"mode: must be one of {MODES}, got {mode!r}")
    seed = scenario.seed if seed is None else seed
    cap = scenario.platform_capacity
    fleet = build_fleet_plan(scenario)
    base = scenario.base_graph()
    pool = scenario.relay_pool()
    area = scenario.lap_footprint_area
    radius = scenario.lap_footprint(GeoPoint(0.0, 0.0)).radius
    half = scenario.geometric.spread or math.sqrt(scenario.disaster_area) / 2.0

    records = []
    for plan in fleet.days:
        day, voice, video = plan.day, plan.voice_sessions, plan.video_sessions
        if mode == IDEAL:
            laps = plan.laps_shared_total
            served_v, served_w = voice, video
            ratio = coverage_ratio(laps, area, scenario.disaster_area)
        else:
            sites = demand_sites(seed, day, scenario.geometric.sites, half, voice, video)
            deployed = place_laps(sites, radius, cap, scenario.geometric.lap_budget)
            laps = len(deployed)
            served_v = sum(l.voice for l in deployed)
            served_w = sum(l.video for l in deployed)
            # co-located LAPs share one disk
            distinct = len({(l.center.x, l.center.y) for l in deployed})
            ratio = coverage_ratio(distinct, area, scenario.disaster_area)

        graph = _troubled_graph(base, scenario, day)
        dispatch = assign_relays(detect_troubles(graph), pool, graph,
                                 now=(day - 1) * HOURS_PER_DAY)
        pool = dispatch.pool
        placed = relieve(apply_placement(graph, pool, now=day * HOURS_PER_DAY), pool)
        residual = detect_troubles(placed)

        records.append(DayRecord(
            day=day, voice_demand=voice, video_demand=video,
            active_dmats=scenario.dmat_schedule.active_per_day[day - 1],
            laps_deployed=laps, laps_relaying=len(pool.assigned_ids),
            sessions_served_voice=served_v, sessions_served_video=served_w,
            sessions_blocked_voice=voice - served_v, sessions_blocked_video=video - served_w,
            sessions_blocked=(voice - served_v) + (video - served_w),
            coverage_ratio=min(1.0, ratio), unserved_troubles=len(residual),
        ))
    return SimReport(scenario.name, mode, seed, tuple(records))


def _peak(values: list, days: list[int]):
    top = max(values)
    return top, [d for d, v in zip(days, values) if v == top]


def summarize(report: SimReport) -> dict:
    if not report.days:
        raise ValidationError("report: cannot summarize an empty report")
    days = report.series("day")
    out = {"scenario": report.scenario, "mode": report.mode, "seed": report.seed}
    for key, column in (("laps", "laps_deployed"), ("voice_demand", "voice_demand"),
                        ("video_demand", "video_demand"), ("relays", "laps_relaying")):
        top, at = _peak(report.series(column), days)
        out[f"max_{key}"] = top
        out[f"max_{key}_days"] = at
    out["total_blocked"] = sum(report.series("sessions_blocked"))
    out["days_with_unserved_troubles"] = [d.day for d in report.days if d.unserved_troubles]
    return out


def plot_data(report: SimReport, fleet: FleetPlan) -> dict:
    """Named series for the voice and video evolution charts."""
    days = report.series("day")
    return {
        "scenario": report.scenario,
        "mode": report.mode,
        "voice": {
            "day": days,
            "voice traffic": report.series("voice_demand"),
            "required LAPs": fleet.series("laps_voice"),
        },
        "video": {
            "day": days,
            "active DMATs": report.series("active_dmats"),
            "required LAPs": fleet.series("laps_video"),
        },
        "aggregate": {
            "day": days,
            "dedicated LAPs": fleet.series("laps_dedicated_total"),
            "shared LAPs": fleet.series("laps_shared_total"),
            "deployed LAPs": report.series("laps_deployed"),
        },
    }


def plot_json(report: SimReport, fleet: FleetPlan) -> str:
    return json.dumps(plot_data(report, fleet), indent=2, sort_keys=False) + "\n"
