"""Multi-level aerial network graph: platforms, typed links, clusters, routing.

Link kinds follow the endpoint levels:

* BACKHAUL joins a GROUND node to an aerial platform. The abstract
  satellite gateway reaches every HAP regardless of distance and no LAP;
  ordinary ground stations reach any aerial node within range.
* IPL_INTRA joins two aerial platforms of the same level.
* IPL_INTER joins a HAP and a LAP.

Clusters are headed by HAPs. Routing is strictly hierarchical: a route
between different clusters climbs to the source head, crosses the
backbone (HAPs, ground nodes and LAPs on relay duty) and descends.
"""
from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field, replace
from typing import Iterable, Mapping

from .capacity import PlatformCapacity
from .errors import PartitionError, UnknownNodeError, ValidationError
from .geometry import Footprint, GeoPoint, distance

HAP = "HAP"
LAP = "LAP"
GROUND = "GROUND"
LEVELS = (HAP, LAP, GROUND)

BACKHAUL = "BACKHAUL"
IPL_INTRA = "IPL_INTRA"
IPL_INTER = "IPL_INTER"

QUASI_STATIONARY = "quasi_stationary"
MISSION_PATTERN = "mission_pattern"
RELAY_POOL = "relay_pool"
MOBILITY = (QUASI_STATIONARY, MISSION_PATTERN, RELAY_POOL)


@dataclass(frozen=True)
class Platform:
    id: str
    level: str
    position: GeoPoint
    altitude: float = 0.0  # m
    footprint: Footprint | None = None
    capacity: PlatformCapacity | None = None
    backhaul_throughput: float | None = None  # Mb/s, HAP/GROUND
    mobility: str = QUASI_STATIONARY
    gateway: bool = False
    link_capacity: float | None = None  # caps every link touching this node
    anchor: str | None = None  # relay duty: join the cluster of this node

    def __post_init__(self):
        if self.level not in LEVELS:
            raise ValidationError(f"platform {self.id}: level must be one of {LEVELS}")
        if self.mobility not in MOBILITY:
            raise ValidationError(f"platform {self.id}: mobility must be one of {MOBILITY}")
        if self.gateway and self.level != GROUND:
            raise ValidationError(f"platform {self.id}: only GROUND nodes can be gateways")

    @property
    def aerial(self) -> bool:
        return self.level != GROUND

    def moved_to(self, position: GeoPoint) -> Platform:
        fp = replace(self.footprint, center=position) if self.footprint else None
        return replace(self, position=position, footprint=fp)


@dataclass(frozen=True)
class LinkRule:
    max_range: float  # km
    capacity: float  # Mb/s

    def __post_init__(self):
        if not self.max_range > 0 or not self.capacity > 0:
            raise ValidationError(f"link rule: range and capacity must be > 0 ({self})")


# Defaults are artifact choices; nothing in the source material fixes them.
@dataclass(frozen=True)
class RangeRules:
    backhaul: LinkRule = LinkRule(250.0, 155.0)
    ipl_inter: LinkRule = LinkRule(60.0, 54.0)
    ipl_intra_lap: LinkRule = LinkRule(10.0, 54.0)
    ipl_intra_hap: LinkRule = LinkRule(400.0, 1000.0)

    def rule_for(self, a: Platform, b: Platform) -> tuple[str, LinkRule] | None:
        levels = {a.level, b.level}
        if GROUND in levels:
            if levels == {GROUND}:
                return None
            return BACKHAUL, self.backhaul
        if levels == {HAP, LAP}:
            return IPL_INTER, self.ipl_inter
        if levels == {LAP}:
            return IPL_INTRA, self.ipl_intra_lap
        return IPL_INTRA, self.ipl_intra_hap


def link_key(a: str, b: str) -> tuple[str, str]:
    return (a, b) if a <= b else (b, a)


@dataclass(frozen=True)
class AtnLink:
    endpoints: tuple[str, str]
    kind: str
    capacity: float
    max_range: float

    @property
    def key(self) -> tuple[str, str]:
        return link_key(*self.endpoints)


@dataclass(frozen=True)
class Cluster:
    head: str
    members: frozenset[str]


def build_links(platforms: Iterable[Platform], rules: RangeRules) -> tuple[AtnLink, ...]:
    """All kind-compatible pairs within range, in sorted endpoint order."""
    nodes = sorted(platforms, key=lambda p: p.id)
    links = []
    for i, a in enumerate(nodes):
        for b in nodes[i + 1:]:
            found = rules.rule_for(a, b)
            if found is None:
                continue
            kind, rule = found
            if a.gateway or b.gateway:
                if HAP not in (a.level, b.level):
                    continue
            elif distance(a.position, b.position) > rule.max_range:
                continue
            cap = rule.capacity
            for p in (a, b):
                if p.link_capacity is not None:
                    cap = min(cap, p.link_capacity)
            links.append(AtnLink((a.id, b.id), kind, cap, rule.max_range))
    return tuple(links)


def cluster_partition(platforms: Iterable[Platform], rules: RangeRules) -> tuple[Cluster, ...]:
    """Assign each LAP to its nearest HAP within inter-level range.

    Ties go to the lowest HAP id (plain string order). LAPs on relay duty
    follow their anchor: a HAP anchor is taken directly, a LAP anchor
    contributes its own cluster.
    """
    nodes = {p.id: p for p in platforms}
    haps = sorted((p for p in nodes.values() if p.level == HAP), key=lambda p: p.id)
    laps = sorted((p for p in nodes.values() if p.level == LAP), key=lambda p: p.id)
    if not haps:
        if laps:
            raise PartitionError(laps[0].id)
        return ()

    head_of: dict[str, str] = {}
    for lap in laps:
        if lap.anchor is not None:
            continue
        best = None
        for hap in haps:
            d = distance(lap.position, hap.position)
            if d <= rules.ipl_inter.max_range and (best is None or d < best[0]):
                best = (d, hap.id)
        if best is None:
            raise PartitionError(lap.id)
        head_of[lap.id] = best[1]
    for lap in laps:
        if lap.anchor is None:
            continue
        anchor = nodes.get(lap.anchor)
        if anchor is None:
            raise UnknownNodeError(lap.anchor)
        if anchor.level == HAP:
            head_of[lap.id] = anchor.id
        elif anchor.id in head_of:
            head_of[lap.id] = head_of[anchor.id]
        else:
            raise PartitionError(lap.id)

    members: dict[str, set[str]] = {h.id: set() for h in haps}
    for lap_id, head in head_of.items():
        members[head].add(lap_id)
    return tuple(Cluster(h, frozenset(m)) for h, m in members.items())


@dataclass(frozen=True)
class AtnGraph:
    platforms: Mapping[str, Platform]
    links: tuple[AtnLink, ...]
    clusters: tuple[Cluster, ...]
    rules: RangeRules = field(default_factory=RangeRules)
    load: Mapping[tuple[str, str], float] = field(default_factory=dict)
    down: frozenset[tuple[str, str]] = frozenset()

    def link(self, a: str, b: str) -> AtnLink | None:
        return self._by_key().get(link_key(a, b))

    def _by_key(self) -> dict[tuple[str, str], AtnLink]:
        return {l.key: l for l in self.links}

    def offered_load(self, key: tuple[str, str]) -> float:
        return self.load.get(key, 0.0)

    def head_of(self, node_id: str) -> str | None:
        for c in self.clusters:
            if node_id == c.head or node_id in c.members:
                return c.head
        return None

    def with_load(self, load: Mapping[tuple[str, str], float]) -> AtnGraph:
        return replace(self, load={link_key(*k): float(v) for k, v in load.items()})

    def with_down(self, down: Iterable[tuple[str, str]]) -> AtnGraph:
        return replace(self, down=frozenset(link_key(*k) for k in down))

    def adjacency(self, avoid: Iterable[tuple[str, str]] = ()) -> dict[str, list[str]]:
        skip = set(self.down) | {link_key(*k) for k in avoid}
        adj: dict[str, list[str]] = {n: [] for n in self.platforms}
        for l in self.links:
            if l.key in skip:
                continue
            a, b = l.endpoints
            adj[a].append(b)
            adj[b].append(a)
        for n in adj:
            adj[n].sort()
        return adj


def make_graph(platforms: Iterable[Platform], rules: RangeRules | None = None,
               load=None, down=()) -> AtnGraph:
    rules = rules or RangeRules()
    platforms = list(platforms)
    ids = [p.id for p in platforms]
    if len(set(ids)) != len(ids):
        raise ValidationError("platform ids must be unique")
    haps = [p.altitude for p in platforms if p.level == HAP]
    laps = [p.altitude for p in platforms if p.level == LAP]
    if haps and laps and min(haps) <= max(laps):
        raise ValidationError("every HAP must fly higher than every LAP")
    clusters = cluster_partition(platforms, rules) if any(p.level == HAP for p in platforms) else ()
    g = AtnGraph({p.id: p for p in sorted(platforms, key=lambda p: p.id)},
                 build_links(platforms, rules), clusters, rules)
    if load:
        g = g.with_load(load)
    if down:
        g = g.with_down(down)
    return g


def bfs_path(adj: Mapping[str, list[str]], src: str, dst: str,
             allowed: set[str] | None = None) -> list[str] | None:
    """Min-hop path; neighbours are expanded in ascending id order."""
    if src == dst:
        return [src]
    parent = {src: None}
    queue = deque([src])
    while queue:
        u = queue.popleft()
        for v in adj[u]:
            if v in parent or (allowed is not None and v not in allowed):
                continue
            parent[v] = u
            if v == dst:
                path = [v]
                while parent[path[-1]] is not None:
                    path.append(parent[path[-1]])
                return path[::-1]
            queue.append(v)
    return None


def _drop_loops(path: list[str]) -> list[str]:
    out: list[str] = []
    for n in path:
        if n in out:
            del out[out.index(n) + 1:]
        else:
            out.append(n)
    return out


def route(graph: AtnGraph, src: str, dst: str,
          avoid: Iterable[tuple[str, str]] = ()) -> list[str] | None:
    """Hierarchical min-hop route, or None when no path exists.

    Down links and any link in `avoid` are never used. Graphs without
    clusters are routed flat.
    """
    for n in (src, dst):
        if n not in graph.platforms:
            raise UnknownNodeError(n)
    adj = graph.adjacency(avoid)
    if not graph.clusters:
        return bfs_path(adj, src, dst)

    zones = {c.head: {c.head} | set(c.members) for c in graph.clusters}
    backbone = {n for n, p in graph.platforms.items()
                if p.level != LAP or p.mobility == RELAY_POOL}
    hs, hd = graph.head_of(src), graph.head_of(dst)
    if hs is not None and hs == hd:
        return bfs_path(adj, src, dst, zones[hs])

    # GROUND nodes sit on the backbone and act as their own head.
    up = bfs_path(adj, src, hs, zones[hs]) if hs is not None else [src]
    down = bfs_path(adj, hd, dst, zones[hd]) if hd is not None else [dst]
    if up is None or down is None:
        return None
    across = bfs_path(adj, up[-1], down[0], backbone)
    if across is None:
        return None
    return _drop_loops(up + across[1:] + down[1:])
