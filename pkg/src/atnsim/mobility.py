"""Controlled mobility: repair troubled links with chains of pooled relay LAPs.

A troubled link (congested or down) gets a parallel multi-hop route made of
relays evenly spaced on the straight segment between its endpoints. Relays
come from a shared pool, fly straight at constant speed, and go back to
idle when the trouble they serve is resolved, ready to be re-tasked.

The engine is functional: every operation takes a pool state and returns
a new one.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Iterable, Mapping

from .errors import ValidationError
from .geometry import GeoPoint, distance
from .topology import (
    GROUND, HAP, LAP, RELAY_POOL, AtnGraph, Platform, build_links,
    cluster_partition, link_key,
)

CONGESTION = "CONGESTION"
FAILURE = "FAILURE"


@dataclass(frozen=True)
class LinkTrouble:
    endpoints: tuple[str, str]
    kind: str
    unmet_demand: float  # Mb/s

    @property
    def key(self) -> tuple[str, str]:
        return link_key(*self.endpoints)


def detect_troubles(graph: AtnGraph, load: Mapping | None = None) -> list[LinkTrouble]:
    """Congested and failed links, worst first (ties by endpoint ids)."""
    offered = graph.load if load is None else {link_key(*k): v for k, v in load.items()}
    troubles = []
    for l in graph.links:
        demand = offered.get(l.key, 0.0)
        if l.key in graph.down:
            if demand > 0:
                troubles.append(LinkTrouble(l.key, FAILURE, demand))
        elif demand > l.capacity:
            troubles.append(LinkTrouble(l.key, CONGESTION, demand - l.capacity))
    troubles.sort(key=lambda t: (-t.unmet_demand, t.key))
    return troubles


def plan_relay_chain(a: GeoPoint, b: GeoPoint, ipl_range: float) -> list[GeoPoint]:
    """Fewest evenly spaced relay positions keeping every hop within range."""
    if not ipl_range > 0:
        raise ValidationError(f"ipl_range: must be > 0 km, got {ipl_range}")
    n = max(0, math.ceil(distance(a, b) / ipl_range) - 1)
    return [a.lerp(b, (i + 1) / (n + 1)) for i in range(n)]


@dataclass(frozen=True)
class Relay:
    id: str
    home: GeoPoint
    speed: float  # km/h
    ipl_range: float  # km
    link_capacity: float  # Mb/s
    altitude: float = 440.0  # m

    def __post_init__(self):
        if not self.speed > 0 or not self.ipl_range > 0 or not self.link_capacity > 0:
            raise ValidationError(f"relay {self.id}: speed, ipl_range and link_capacity must be > 0")


@dataclass(frozen=True)
class RelayLeg:
    relay_id: str
    origin: GeoPoint
    target: GeoPoint
    depart: float  # h
    arrival: float  # h

    def position_at(self, now: float) -> GeoPoint:
        if now >= self.arrival:
            return self.target
        if now <= self.depart:
            return self.origin
        return self.origin.lerp(self.target, (now - self.depart) / (self.arrival - self.depart))


@dataclass(frozen=True)
class RelayAssignment:
    trouble: LinkTrouble
    anchor: str
    legs: tuple[RelayLeg, ...]

    @property
    def relay_ids(self) -> tuple[str, ...]:
        return tuple(l.relay_id for l in self.legs)

    @property
    def targets(self) -> tuple[GeoPoint, ...]:
        return tuple(l.target for l in self.legs)

    @property
    def arrivals(self) -> tuple[float, ...]:
        return tuple(l.arrival for l in self.legs)

    def chain(self) -> list[str]:
        a, b = self.trouble.endpoints
        return [a, *self.relay_ids, b]


@dataclass(frozen=True)
class RelayPool:
    relays: tuple[Relay, ...]
    positions: Mapping[str, GeoPoint] = field(default_factory=dict)  # idle relays
    assignments: tuple[RelayAssignment, ...] = ()

    @classmethod
    def at_home(cls, relays: Iterable[Relay]) -> RelayPool:
        relays = tuple(sorted(relays, key=lambda r: r.id))
        if len({r.id for r in relays}) != len(relays):
            raise ValidationError("relay ids must be unique")
        return cls(relays, {r.id: r.home for r in relays})

    def relay(self, relay_id: str) -> Relay:
        for r in self.relays:
            if r.id == relay_id:
                return r
        raise KeyError(relay_id)

    @property
    def assigned_ids(self) -> list[str]:
        return sorted(i for a in self.assignments for i in a.relay_ids)

    @property
    def idle_ids(self) -> list[str]:
        busy = set(self.assigned_ids)
        return [r.id for r in self.relays if r.id not in busy]


@dataclass(frozen=True)
class Dispatch:
    pool: RelayPool
    new: tuple[RelayAssignment, ...]
    unserved: tuple[LinkTrouble, ...]

    @property
    def assignments(self) -> tuple[RelayAssignment, ...]:
        return self.pool.assignments


def _anchor(graph: AtnGraph, trouble: LinkTrouble) -> str:
    a, b = trouble.endpoints
    return a if graph.platforms[a].level != GROUND else b


def chain_range(graph: AtnGraph, trouble: LinkTrouble, relay_range: float) -> float:
    """Usable hop length: the relay radio range, capped by the link rules it must satisfy."""
    rules = graph.rules
    limit = min(relay_range, rules.ipl_intra_lap.max_range)
    for end in trouble.endpoints:
        level = graph.platforms[end].level
        if level == HAP:
            limit = min(limit, rules.ipl_inter.max_range)
        elif level == GROUND:
            limit = min(limit, rules.backhaul.max_range)
    return limit


def assign_relays(troubles: Iterable[LinkTrouble], pool: RelayPool, graph: AtnGraph,
                  now: float = 0.0) -> Dispatch:
    """Greedy relay dispatch by trouble priority.

    Assignments whose trouble is no longer listed are released first; their
    relays become idle where they are at `now`. Troubles that already hold
    a chain keep it. Every other trouble, in list order, gets a chain with at
    least one relay (a parallel route needs a node); each slot takes the
    nearest idle relay, lowest id on ties. A trouble that cannot be fully
    staffed consumes no relays and is reported unserved.
    """
    troubles = list(troubles)
    active = {t.key for t in troubles}
    positions = dict(pool.positions)
    kept = []
    for asg in pool.assignments:
        if asg.trouble.key in active:
            kept.append(asg)
        else:
            for leg in asg.legs:
                positions[leg.relay_id] = leg.position_at(now)
    held = {a.trouble.key for a in kept}
    idle = [r for r in pool.relays if r.id in positions and r.id not in
            {i for a in kept for i in a.relay_ids}]

    new, unserved = [], []
    for t in troubles:
        if t.key in held:
            continue
        a, b = (graph.platforms[e].position for e in t.endpoints)
        hop = chain_range(graph, t, min((r.ipl_range for r in idle), default=1.0))
        slots = plan_relay_chain(a, b, hop) or [a.lerp(b, 0.5)]
        if len(slots) > len(idle):
            unserved.append(t)
            continue
        legs = []
        for target in slots:
            r = min(idle, key=lambda r: (distance(positions[r.id], target), r.id))
            idle.remove(r)
            origin = positions.pop(r.id)
            legs.append(RelayLeg(r.id, origin, target, now,
                                 now + distance(origin, target) / r.speed))
        asg = RelayAssignment(t, _anchor(graph, t), tuple(legs))
        new.append(asg)
        held.add(t.key)
    # idle relays keep their positions; assigned ones are tracked by their legs
    next_pool = replace(pool, positions=positions, assignments=tuple(kept) + tuple(new))
    return Dispatch(next_pool, tuple(new), tuple(unserved))


def relay_platforms(pool: RelayPool, now: float) -> list[tuple[Platform, bool]]:
    """(platform, arrived) for every relay on duty at time `now`."""
    out = []
    for asg in pool.assignments:
        for leg in asg.legs:
            r = pool.relay(leg.relay_id)
            p = Platform(r.id, LAP, leg.position_at(now), altitude=r.altitude,
                         mobility=RELAY_POOL, link_capacity=r.link_capacity, anchor=asg.anchor)
            out.append((p, leg.arrival <= now))
    return out


def apply_placement(graph: AtnGraph, pool: RelayPool, now: float) -> AtnGraph:
    """Graph snapshot with on-duty relays at their positions at `now`.

    Arrived relays get links from the usual range rules. Relays still in
    flight appear at their interpolated positions with no links at all.
    """
    placed = relay_platforms(pool, now)
    duty_ids = {p.id for p, _ in placed}
    base = [p for p in graph.platforms.values() if p.id not in duty_ids]
    platforms = base + [p for p, _ in placed]
    in_flight = {p.id for p, arrived in placed if not arrived}
    links = tuple(l for l in build_links(platforms, graph.rules)
                  if not in_flight.intersection(l.endpoints))
    clusters = cluster_partition(platforms, graph.rules) if graph.clusters else ()
    return replace(graph, platforms={p.id: p for p in sorted(platforms, key=lambda p: p.id)},
                   links=links, clusters=clusters)


def chain_route(graph: AtnGraph, asg: RelayAssignment) -> list[str] | None:
    """The chain as a node path if every hop is a live link, else None."""
    path = asg.chain()
    if any(n not in graph.platforms for n in path):
        return None
    for u, v in zip(path, path[1:]):
        if graph.link(u, v) is None or link_key(u, v) in graph.down:
            return None
    return path


def relieve(graph: AtnGraph, pool: RelayPool) -> AtnGraph:
    """Shift unmet demand from troubled links onto their completed relay chains.

    Each chain carries at most its residual bottleneck capacity; anything
    beyond that stays on the troubled link and is still reported by
    detect_troubles.
    """
    load = dict(graph.load)
    for asg in pool.assignments:
        path = chain_route(graph, asg)
        if path is None:
            continue
        key = asg.trouble.key
        trouble_link = graph.link(*key)
        demand = load.get(key, 0.0)
        unmet = demand if key in graph.down else max(0.0, demand - trouble_link.capacity)
        hops = [link_key(u, v) for u, v in zip(path, path[1:])]
        room = min(graph.link(*h).capacity - load.get(h, 0.0) for h in hops)
        moved = max(0.0, min(unmet, room))
        if moved <= 0:
            continue
        load[key] = demand - moved
        for h in hops:
            load[h] = load.get(h, 0.0) + moved
    return replace(graph, load=load)
