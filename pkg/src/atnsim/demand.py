"""Emergency traffic timelines and scenario loading.

A scenario file is a YAML document. Every block except ``name``,
``horizon`` and ``demand.voice`` is optional and falls back to the
Hurricane Katrina defaults below. See ``scenarios/katrina-synthetic.yaml``
for a fully populated example and README.md for the schema.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from importlib import resources
from pathlib import Path
from typing import Any, Mapping

import yaml

from .capacity import AMR_12_2, H264_384, LAP_802_11G, VIDEO, VOICE, CodecSpec, PlatformCapacity
from .errors import PartitionError, ValidationError
from .geometry import (
    Footprint, GeoPoint, calibrated_min_elevation, footprint_radius,
)
from .mobility import CONGESTION, FAILURE, Relay, RelayPool
from .topology import (
    GROUND, HAP, LAP, LEVELS, MISSION_PATTERN, MOBILITY, QUASI_STATIONARY, AtnGraph,
    LinkRule, Platform, RangeRules, link_key, make_graph,
)

KATRINA_AREA = 233000.0  # km²
LAP_ALTITUDE = 440.0  # m
LAP_FOOTPRINT_AREA = 47.39  # km²
HAP_ALTITUDE = 20000.0  # m
DMATS_DAY_ONE = 9
DMATS_TOTAL = 45
DMAT_FULL_DAY = 15
STREAMS_PER_DMAT = 2


@dataclass(frozen=True)
class VoiceDemandTimeline:
    sessions_per_day: tuple[int, ...]


@dataclass(frozen=True)
class DmatSchedule:
    active_per_day: tuple[int, ...]
    streams_per_dmat: int = STREAMS_PER_DMAT

    def video_sessions(self) -> list[int]:
        return [video_sessions(n, self.streams_per_dmat) for n in self.active_per_day]


def video_sessions(active_dmats: int, streams_per_dmat: int) -> int:
    return active_dmats * streams_per_dmat


def _round_half_up(x: Fraction) -> int:
    return math.floor(x + Fraction(1, 2))


def default_dmat_ramp(horizon: int, streams_per_dmat: int = STREAMS_PER_DMAT) -> DmatSchedule:
    """Linear activation from 9 teams on day 1 to all 45 by day 15, then flat."""
    if horizon < DMAT_FULL_DAY:
        raise ValidationError(
            f"demand.dmat: the default ramp needs horizon >= {DMAT_FULL_DAY}, got {horizon}")
    span = DMATS_TOTAL - DMATS_DAY_ONE
    active = [
        _round_half_up(DMATS_DAY_ONE + Fraction(span * (d - 1), DMAT_FULL_DAY - 1))
        if d <= DMAT_FULL_DAY else DMATS_TOTAL
        for d in range(1, horizon + 1)
    ]
    return DmatSchedule(tuple(active), streams_per_dmat)


@dataclass(frozen=True)
class ScriptedTrouble:
    link: tuple[str, str]
    kind: str
    load: float  # Mb/s offered on the link while active
    start: int  # first day, inclusive
    end: int  # last day, inclusive

    def active_on(self, day: int) -> bool:
        return self.start <= day <= self.end


@dataclass(frozen=True)
class GeometricSpec:
    sites: int = 8
    spread: float | None = None  # km half-side of the demand square; None = whole area
    lap_budget: int | None = None


@dataclass(frozen=True)
class Scenario:
    name: str
    horizon: int
    voice_timeline: VoiceDemandTimeline
    dmat_schedule: DmatSchedule
    seed: int = 0
    disaster_area: float = KATRINA_AREA
    lap_altitude: float = LAP_ALTITUDE
    lap_footprint_area: float = LAP_FOOTPRINT_AREA
    platform_capacity: PlatformCapacity = LAP_802_11G
    voice_codec: CodecSpec = AMR_12_2
    video_codec: CodecSpec = H264_384
    platforms: tuple[Platform, ...] = ()
    range_rules: RangeRules = field(default_factory=RangeRules)
    base_load: tuple[tuple[tuple[str, str], float], ...] = ()
    relays: tuple[Relay, ...] = ()
    troubles: tuple[ScriptedTrouble, ...] = ()
    geometric: GeometricSpec = field(default_factory=GeometricSpec)

    def video_demand(self) -> list[int]:
        return self.dmat_schedule.video_sessions()

    def base_graph(self) -> AtnGraph:
        return make_graph(self.platforms, self.range_rules, load=dict(self.base_load))

    def relay_pool(self) -> RelayPool:
        return RelayPool.at_home(self.relays)

    def lap_footprint(self, center: GeoPoint) -> Footprint:
        return Footprint.from_area(center, self.lap_footprint_area)


class _Reader:
    """Collects every problem with its field path instead of stopping at the first."""

    def __init__(self):
        self.problems: list[str] = []

    def fail(self, path: str, msg: str):
        self.problems.append(f"{path}: {msg}")

    def section(self, raw: Mapping, key: str, path: str) -> Mapping:
        value = raw.get(key)
        if value is None:
            return {}
        if not isinstance(value, Mapping):
            self.fail(f"{path}{key}", "expected a mapping")
            return {}
        return value

    def number(self, raw: Mapping, key: str, path: str, default=None, *, integer=False,
               positive=False, nonneg=False, required=False):
        if key not in raw or raw[key] is None:
            if required:
                self.fail(f"{path}{key}", "missing mandatory field")
            return default
        value = raw[key]
        if isinstance(value, bool) or not isinstance(value, (int, float)):
            self.fail(f"{path}{key}", f"expected a number, got {value!r}")
            return default
        if integer and int(value) != value:
            self.fail(f"{path}{key}", f"expected an integer, got {value!r}")
            return default
        if not math.isfinite(value):
            self.fail(f"{path}{key}", "must be finite")
            return default
        if positive and not value > 0:
            self.fail(f"{path}{key}", f"must be > 0, got {value}")
            return default
        if nonneg and value < 0:
            self.fail(f"{path}{key}", f"must be >= 0, got {value}")
            return default
        return int(value) if integer else float(value)

    def counts(self, raw: Mapping, key: str, path: str, required=False) -> tuple[int, ...] | None:
        if key not in raw or raw[key] is None:
            if required:
                self.fail(f"{path}{key}", "missing mandatory field")
            return None
        value = raw[key]
        if not isinstance(value, list):
            self.fail(f"{path}{key}", "expected a list of non-negative integers")
            return None
        out = []
        for i, v in enumerate(value):
            if isinstance(v, bool) or not isinstance(v, (int, float)) or int(v) != v or v < 0:
                self.fail(f"{path}{key}[{i}]", f"expected a non-negative integer, got {v!r}")
                return None
            out.append(int(v))
        return tuple(out)


def _point(r: _Reader, raw: Mapping, path: str) -> GeoPoint | None:
    x = r.number(raw, "x", path, required=True)
    y = r.number(raw, "y", path, required=True)
    return None if x is None or y is None else GeoPoint(x, y)


def _link_rules(r: _Reader, raw: Mapping) -> RangeRules:
    block = r.section(raw, "links", "topology.")
    defaults = RangeRules()
    kwargs = {}
    for name in ("backhaul", "ipl_inter", "ipl_intra_lap", "ipl_intra_hap"):
        sub = r.section(block, name, "topology.links.")
        base = getattr(defaults, name)
        path = f"topology.links.{name}."
        rng = r.number(sub, "max_range", path, base.max_range, positive=True)
        cap = r.number(sub, "capacity", path, base.capacity, positive=True)
        kwargs[name] = LinkRule(rng, cap)
    return RangeRules(**kwargs)


def _platforms(r: _Reader, raw: Mapping, lap_altitude: float, lap_area: float,
               cap: PlatformCapacity) -> tuple[Platform, ...]:
    entries = raw.get("platforms") or []
    if not isinstance(entries, list):
        r.fail("topology.platforms", "expected a list")
        return ()
    try:
        hap_elevation = calibrated_min_elevation(lap_altitude, lap_area)
    except ValidationError:
        hap_elevation = None
    out = []
    for i, p in enumerate(entries):
        path = f"topology.platforms[{i}]."
        if not isinstance(p, Mapping):
            r.fail(path[:-1], "expected a mapping")
            continue
        pid, level = p.get("id"), p.get("level")
        if not isinstance(pid, str) or not pid:
            r.fail(path + "id", "missing mandatory field")
            continue
        if level not in LEVELS:
            r.fail(path + "level", f"must be one of {LEVELS}, got {level!r}")
            continue
        pos = _point(r, p, path)
        default_alt = {LAP: lap_altitude, HAP: HAP_ALTITUDE, GROUND: 0.0}[level]
        alt = r.number(p, "altitude", path, default_alt, nonneg=True)
        mobility = p.get("mobility", QUASI_STATIONARY if level != LAP else MISSION_PATTERN)
        if mobility not in MOBILITY:
            r.fail(path + "mobility", f"must be one of {MOBILITY}, got {mobility!r}")
            continue
        backhaul = r.number(p, "backhaul_throughput", path, positive=True)
        if pos is None or alt is None:
            continue
        footprint = None
        if level == LAP:
            footprint = Footprint.from_area(pos, lap_area)
        elif level == HAP:
            radius = r.number(p, "footprint_radius", path, positive=True)
            if radius is None and hap_elevation is not None and alt > 0:
                radius = footprint_radius(alt, hap_elevation)
            footprint = Footprint(pos, radius) if radius else None
        out.append(Platform(
            pid, level, pos, altitude=alt, footprint=footprint,
            capacity=cap if level == LAP else None,
            backhaul_throughput=backhaul, mobility=mobility,
            gateway=bool(p.get("gateway", False)) and level == GROUND,
        ))
    return tuple(out)


def _link_pair(r: _Reader, value, path: str) -> tuple[str, str] | None:
    if (not isinstance(value, list) or len(value) != 2
            or not all(isinstance(v, str) for v in value) or value[0] == value[1]):
        r.fail(path, f"expected two distinct platform ids, got {value!r}")
        return None
    return link_key(*value)


def _relays(r: _Reader, raw: Mapping, lap_altitude: float) -> tuple[Relay, ...]:
    count = r.number(raw, "count", "relays.", 0, integer=True, nonneg=True)
    if not count:
        return ()
    speed = r.number(raw, "speed", "relays.", 60.0, positive=True)
    rng = r.number(raw, "ipl_range", "relays.", 8.0, positive=True)
    cap = r.number(raw, "link_capacity", "relays.", 54.0, positive=True)
    home = raw.get("home", {"x": 0.0, "y": 0.0})
    homes = home if isinstance(home, list) else [home] * count
    if len(homes) != count:
        r.fail("relays.home", f"expected one point or {count} points, got {len(homes)}")
        return ()
    out = []
    for i, h in enumerate(homes):
        if not isinstance(h, Mapping):
            r.fail(f"relays.home[{i}]", "expected a mapping with x and y")
            continue
        pos = _point(r, h, f"relays.home[{i}].")
        if pos is not None and None not in (speed, rng, cap):
            out.append(Relay(f"R{i + 1:02d}", pos, speed, rng, cap, lap_altitude))
    return tuple(out)


def _troubles(r: _Reader, raw, horizon: int) -> tuple[ScriptedTrouble, ...]:
    if raw is None:
        return ()
    if not isinstance(raw, list):
        r.fail("troubles", "expected a list")
        return ()
    out = []
    for i, t in enumerate(raw):
        path = f"troubles[{i}]."
        if not isinstance(t, Mapping):
            r.fail(path[:-1], "expected a mapping")
            continue
        link = _link_pair(r, t.get("link"), path + "link")
        kind = str(t.get("kind", "")).upper()
        if kind not in (CONGESTION, FAILURE):
            r.fail(path + "kind", f"must be congestion or failure, got {t.get('kind')!r}")
        load = r.number(t, "load", path, required=True, nonneg=True)
        start = r.number(t, "start", path, 1, integer=True, positive=True)
        end = r.number(t, "end", path, horizon, integer=True, positive=True)
        if start is not None and end is not None and not start <= end:
            r.fail(path + "end", f"must be >= start ({start}), got {end}")
        if link and kind in (CONGESTION, FAILURE) and None not in (load, start, end):
            out.append(ScriptedTrouble(link, kind, load, start, end))
    return tuple(out)


def _codec(r: _Reader, raw: Mapping, media: str, default: CodecSpec) -> CodecSpec:
    if not raw:
        return default
    path = f"codecs.{media}."
    try:
        return CodecSpec(
            str(raw.get("name", default.name)), media,
            r.number(raw, "bit_rate", path, default.bit_rate, positive=True),
            r.number(raw, "sample_period", path, default.sample_period, nonneg=True),
            r.number(raw, "header_overhead", path, default.header_overhead, integer=True, nonneg=True),
            r.number(raw, "mos", path, default.mos),
        )
    except ValidationError as e:
        r.problems.extend(e.problems)
        return default


def validate_scenario(raw) -> Scenario:
    """Check a parsed scenario document and build a Scenario.

    Every violation is collected and raised together as a ValidationError
    whose ``problems`` list carries field paths. Passing a Scenario
    re-validates its serialized form, so the call is idempotent.
    """
    if isinstance(raw, Scenario):
        return validate_scenario(scenario_to_dict(raw))
    if not isinstance(raw, Mapping):
        raise ValidationError("scenario: expected a mapping at top level")
    r = _Reader()

    name = raw.get("name")
    if not isinstance(name, str) or not name:
        r.fail("name", "missing mandatory field")
    horizon = r.number(raw, "horizon", "", integer=True, required=True)
    if horizon is not None and horizon < 1:
        r.fail("horizon", f"must be >= 1, got {horizon}")
        horizon = None
    seed = r.number(raw, "seed", "", 0, integer=True, nonneg=True)
    area = r.number(raw, "disaster_area", "", KATRINA_AREA, positive=True)

    lap = r.section(raw, "lap", "")
    lap_alt = r.number(lap, "altitude", "lap.", LAP_ALTITUDE, positive=True)
    lap_area = r.number(lap, "footprint_area", "lap.", LAP_FOOTPRINT_AREA, positive=True)

    capb = r.section(raw, "capacity", "")
    cap = LAP_802_11G
    if capb:
        values = (
            r.number(capb, "achievable_throughput", "capacity.", LAP_802_11G.achievable_throughput,
                     positive=True),
            r.number(capb, "voice_sessions_max", "capacity.", LAP_802_11G.voice_sessions_max,
                     integer=True, positive=True),
            r.number(capb, "video_sessions_max", "capacity.", LAP_802_11G.video_sessions_max,
                     integer=True, positive=True),
        )
        if None not in values:
            cap = PlatformCapacity(*values)

    codecs = r.section(raw, "codecs", "")
    voice_codec = _codec(r, r.section(codecs, VOICE, "codecs."), VOICE, AMR_12_2)
    video_codec = _codec(r, r.section(codecs, VIDEO, "codecs."), VIDEO, H264_384)

    demand = r.section(raw, "demand", "")
    if not demand:
        r.fail("demand.voice", "missing mandatory field")
    voice = r.counts(demand, "voice", "demand.", required=bool(demand))
    if voice is not None and horizon is not None and len(voice) != horizon:
        r.fail("demand.voice", f"length {len(voice)} does not match horizon {horizon}")

    dmat = r.section(demand, "dmat", "demand.")
    streams = r.number(dmat, "streams_per_dmat", "demand.dmat.", STREAMS_PER_DMAT,
                       integer=True, nonneg=True)
    schedule = None
    active = r.counts(dmat, "active_per_day", "demand.dmat.")
    if active is not None:
        if horizon is not None and len(active) != horizon:
            r.fail("demand.dmat.active_per_day",
                   f"length {len(active)} does not match horizon {horizon}")
        for i, (x, y) in enumerate(zip(active, active[1:])):
            if y < x:
                r.fail(f"demand.dmat.active_per_day[{i + 1}]",
                       f"DMAT count must be non-decreasing ({x} then {y})")
                break
        schedule = DmatSchedule(active, streams or 0)
    elif horizon is not None:
        try:
            schedule = default_dmat_ramp(horizon, streams or 0)
        except ValidationError as e:
            r.problems.extend(e.problems)

    geo = r.section(raw, "geometric", "")
    geometric = GeometricSpec(
        r.number(geo, "sites", "geometric.", 8, integer=True, positive=True) or 8,
        r.number(geo, "spread", "geometric.", None, positive=True),
        r.number(geo, "lap_budget", "geometric.", None, integer=True, nonneg=True),
    )

    topo = r.section(raw, "topology", "")
    rules = _link_rules(r, topo)
    platforms = _platforms(r, topo, lap_alt or LAP_ALTITUDE, lap_area or LAP_FOOTPRINT_AREA, cap)
    base_load = []
    for i, entry in enumerate(topo.get("base_load") or []):
        path = f"topology.base_load[{i}]"
        if not isinstance(entry, Mapping):
            r.fail(path, "expected a mapping with link and load")
            continue
        pair = _link_pair(r, entry.get("link"), path + ".link")
        load = r.number(entry, "load", path + ".", required=True, nonneg=True)
        if pair and load is not None:
            base_load.append((pair, load))

    relays = _relays(r, r.section(raw, "relays", ""), lap_alt or LAP_ALTITUDE)
    troubles = _troubles(r, raw.get("troubles"), horizon or 1)
    if horizon is not None:
        for i, t in enumerate(troubles):
            if t.end > horizon:
                r.fail(f"troubles[{i}].end", f"day {t.end} is past the horizon {horizon}")

    graph = None
    try:
        graph = make_graph(platforms, rules)
    except PartitionError as e:
        r.fail("topology.platforms", str(e))
    except ValidationError as e:
        r.problems.extend(f"topology.platforms: {p}" for p in e.problems)
    if graph is not None:
        for i, (pair, _) in enumerate(base_load):
            if graph.link(*pair) is None:
                r.fail(f"topology.base_load[{i}].link", f"no link between {pair[0]} and {pair[1]}")
        for i, t in enumerate(troubles):
            if graph.link(*t.link) is None:
                r.fail(f"troubles[{i}].link", f"no link between {t.link[0]} and {t.link[1]}")
    relay_ids = {x.id for x in relays}
    for p in platforms:
        if p.id in relay_ids:
            r.fail("topology.platforms", f"id {p.id!r} collides with a relay id")

    if r.problems:
        raise ValidationError(r.problems)
    return Scenario(
        name=name, horizon=horizon, seed=seed, disaster_area=area,
        lap_altitude=lap_alt, lap_footprint_area=lap_area, platform_capacity=cap,
        voice_codec=voice_codec, video_codec=video_codec,
        voice_timeline=VoiceDemandTimeline(voice), dmat_schedule=schedule,
        platforms=platforms, range_rules=rules, base_load=tuple(base_load),
        relays=relays, troubles=troubles, geometric=geometric,
    )


def scenario_to_dict(s: Scenario) -> dict[str, Any]:
    """Serialize a Scenario back into the document shape validate_scenario reads."""
    def codec(c: CodecSpec):
        return {"name": c.name, "bit_rate": c.bit_rate, "sample_period": c.sample_period,
                "header_overhead": c.header_overhead, "mos": c.mos}

    def platform(p: Platform):
        d = {"id": p.id, "level": p.level, "x": p.position.x, "y": p.position.y,
             "altitude": p.altitude, "mobility": p.mobility}
        if p.gateway:
            d["gateway"] = True
        if p.backhaul_throughput is not None:
            d["backhaul_throughput"] = p.backhaul_throughput
        if p.level == HAP and p.footprint is not None:
            d["footprint_radius"] = p.footprint.radius
        return d

    rules = s.range_rules
    doc: dict[str, Any] = {
        "name": s.name, "horizon": s.horizon, "seed": s.seed, "disaster_area": s.disaster_area,
        "lap": {"altitude": s.lap_altitude, "footprint_area": s.lap_footprint_area},
        "capacity": {
            "achievable_throughput": s.platform_capacity.achievable_throughput,
            "voice_sessions_max": s.platform_capacity.voice_sessions_max,
            "video_sessions_max": s.platform_capacity.video_sessions_max,
        },
        "codecs": {VOICE: codec(s.voice_codec), VIDEO: codec(s.video_codec)},
        "demand": {
            "voice": list(s.voice_timeline.sessions_per_day),
            "dmat": {"streams_per_dmat": s.dmat_schedule.streams_per_dmat,
                     "active_per_day": list(s.dmat_schedule.active_per_day)},
        },
        "geometric": {"sites": s.geometric.sites, "spread": s.geometric.spread,
                      "lap_budget": s.geometric.lap_budget},
        "topology": {
            "links": {name: {"max_range": getattr(rules, name).max_range,
                             "capacity": getattr(rules, name).capacity}
                      for name in ("backhaul", "ipl_inter", "ipl_intra_lap", "ipl_intra_hap")},
            "platforms": [platform(p) for p in s.platforms],
            "base_load": [{"link": list(k), "load": v} for k, v in s.base_load],
        },
        "troubles": [{"link": list(t.link), "kind": t.kind.lower(), "load": t.load,
                      "start": t.start, "end": t.end} for t in s.troubles],
    }
    if s.relays:
        first = s.relays[0]
        doc["relays"] = {
            "count": len(s.relays), "speed": first.speed, "ipl_range": first.ipl_range,
            "link_capacity": first.link_capacity,
            "home": [{"x": x.home.x, "y": x.home.y} for x in s.relays],
        }
    return doc


BUNDLED = ("katrina-synthetic",)


def bundled_path(name: str) -> Path:
    return Path(str(resources.files("atnsim") / "scenarios" / f"{name}.yaml"))


def load_scenario(path) -> Scenario:
    """Read and validate a scenario file; bundled names resolve to packaged files.

    Raises OSError when the file cannot be read and ValidationError when
    it parses but breaks an invariant (YAML syntax errors included).
    """
    p = Path(path)
    if not p.exists() and str(path) in BUNDLED:
        p = bundled_path(str(path))
    text = p.read_text(encoding="utf-8")
    try:
        raw = yaml.safe_load(text)
    except yaml.YAMLError as e:
        raise ValidationError(f"{p}: not a valid YAML document ({e})") from None
    return validate_scenario(raw)
