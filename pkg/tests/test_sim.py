import dataclasses

import pytest
from hypothesis import given, settings, strategies as st

from atnsim.capacity import LAP_802_11G, fits_on_platform
from atnsim.demand import validate_scenario
from atnsim.errors import ValidationError
from atnsim.fleet import build_fleet_plan
from atnsim.geometry import Footprint, GeoPoint
from atnsim.sim import (
    CSV_COLUMNS, GEOMETRIC, IDEAL, Lcg64, SimReport, apportion, demand_sites, place_laps,
    plot_data, run, summarize,
)


def scenario(voice, dmats, **extra):
    doc = {"name": "t", "horizon": len(voice),
           "demand": {"voice": list(voice), "dmat": {"active_per_day": list(dmats)}}}
    doc.update(extra)
    return validate_scenario(doc)


def test_lcg_documented_recurrence():
    a, c, m = 6364136223846793005, 1442695040888963407, 2 ** 64
    state = (7 + 3 * 0x9E3779B97F4A7C15) % m
    expected = []
    for _ in range(4):
        state = (a * state + c) % m
        expected.append((state >> 11) / 2 ** 53)
    rng = Lcg64.for_day(7, 3)
    assert [rng.uniform() for _ in range(4)] == expected


def test_lcg_first_value_frozen():
    rng = Lcg64(0)
    assert rng.next() == 1442695040888963407
    assert rng.next() == (6364136223846793005 * 1442695040888963407 + 1442695040888963407) % 2 ** 64


def test_apportion_largest_remainder():
    assert apportion(10, [1, 1, 1]) == [4, 3, 3]
    assert apportion(0, [0.3, 0.7]) == [0, 0]
    assert apportion(475, [1.0]) == [475]


@given(st.integers(0, 2000), st.lists(st.floats(0.05, 1.05), min_size=1, max_size=12))
def test_apportion_conserves(total, weights):
    shares = apportion(total, weights)
    assert sum(shares) == total and min(shares) >= 0


def test_ideal_katrina_peak_day(katrina):
    report = run(katrina, IDEAL)
    d15 = report.days[14]
    assert (d15.voice_demand, d15.video_demand, d15.laps_deployed, d15.sessions_blocked) == (475, 90, 12, 0)
    assert d15.coverage_ratio == pytest.approx(568.68 / 233000)


def test_ideal_matches_shared_plan(katrina):
    report = run(katrina, IDEAL)
    assert report.series("laps_deployed") == build_fleet_plan(katrina).series("laps_shared_total")


@settings(max_examples=40, deadline=None)
@given(st.lists(st.integers(0, 900), min_size=1, max_size=6), st.data())
def test_ideal_series_and_geometric_floor(voice, data):
    dmats = sorted(data.draw(st.lists(st.integers(0, 60), min_size=len(voice), max_size=len(voice))))
    spread = data.draw(st.sampled_from([0.5, 5.0, 40.0]))
    s = scenario(voice, dmats, seed=data.draw(st.integers(0, 2 ** 32)),
                 geometric={"sites": data.draw(st.integers(1, 10)), "spread": spread})
    ideal, geo = run(s, IDEAL), run(s, GEOMETRIC)
    assert ideal.series("laps_deployed") == build_fleet_plan(s).series("laps_shared_total")
    for i, g in zip(ideal.days, geo.days):
        assert g.laps_deployed >= i.laps_deployed
        assert g.sessions_blocked == 0
    for rep in (ideal, geo):
        for d in rep.days:
            assert d.sessions_served_voice + d.sessions_blocked_voice == d.voice_demand
            assert d.sessions_served_video + d.sessions_blocked_video == d.video_demand
            assert 0.0 <= d.coverage_ratio <= 1.0


@pytest.mark.parametrize("mode", [IDEAL, GEOMETRIC])
def test_empty_demand_report_is_zero(mode):
    report = run(scenario([0, 0, 0], [0, 0, 0]), mode)
    for d in report.days:
        assert (d.laps_deployed, d.sessions_served_voice, d.sessions_served_video,
                d.sessions_blocked, d.coverage_ratio, d.laps_relaying) == (0, 0, 0, 0, 0.0, 0)


def test_geometric_colocated_single_lap():
    s = scenario([30], [4], geometric={"sites": 6, "spread": 1e-3})
    sites = demand_sites(s.seed, 1, 6, 1e-3, 30, 8)
    fp = Footprint.from_area(sites[0].position, 47.39)
    assert all(fp.covers(x.position) for x in sites)
    assert fits_on_platform(30, 8, LAP_802_11G)
    (d,) = run(s, GEOMETRIC).days
    assert (d.laps_deployed, d.sessions_blocked) == (1, 0)


def test_geometric_budget_blocks():
    s = scenario([475], [45], geometric={"sites": 8, "spread": 30.0, "lap_budget": 3})
    (d,) = run(s, GEOMETRIC).days
    assert d.laps_deployed == 3
    assert d.sessions_blocked > 0
    assert d.sessions_served_voice + d.sessions_blocked_voice == 475
    assert d.sessions_served_video + d.sessions_blocked_video == 90


def test_place_laps_respects_capacity_and_coverage():
    sites = demand_sites(11, 2, 5, 8.0, 300, 40)
    radius = Footprint.from_area(GeoPoint(0, 0), 47.39).radius
    laps = place_laps(sites, radius, LAP_802_11G)
    assert sum(l.voice for l in laps) == 300 and sum(l.video for l in laps) == 40
    assert all(fits_on_platform(l.voice, l.video, LAP_802_11G) for l in laps)
    assert all(any(s.position == l.center for s in sites) for l in laps)


def test_determinism_and_seed_scope(katrina):
    assert run(katrina, GEOMETRIC).to_csv() == run(katrina, GEOMETRIC).to_csv()
    assert run(katrina, IDEAL, seed=1) .days == run(katrina, IDEAL, seed=99).days
    assert run(katrina, GEOMETRIC, seed=1).days != run(katrina, GEOMETRIC, seed=99).days


def test_katrina_relays_follow_troubles(katrina):
    report = run(katrina, IDEAL)
    relaying = report.series("laps_relaying")
    assert relaying[3:7] == [2, 2, 2, 2]  # L01-L02, 10 km with 4 km hops
    assert relaying[8:12] == [1, 1, 1, 1]  # L04-L05, 8 km
    assert relaying[7] == 0 and relaying[12:] == [0] * 8
    assert sum(report.series("unserved_troubles")) == 0


def test_slow_relays_leave_troubles_unserved(katrina):
    slow = dataclasses.replace(katrina, relays=tuple(
        dataclasses.replace(r, speed=0.05) for r in katrina.relays))
    report = run(slow, IDEAL)
    assert report.series("unserved_troubles")[3] == 1


def test_unknown_mode_rejected(katrina):
    with pytest.raises(ValidationError):
        run(katrina, "fancy")


def test_summarize_katrina(katrina):
    s = summarize(run(katrina, IDEAL))
    assert (s["max_laps"], s["max_laps_days"]) == (12, [15, 16, 18])
    assert (s["max_voice_demand"], s["max_voice_demand_days"]) == (475, [15])


def test_summarize_edges():
    single = run(scenario([100], [3]), IDEAL)
    assert summarize(single)["max_laps_days"] == [1]
    twin = run(scenario([100, 10, 100], [3, 3, 3]), IDEAL)
    assert summarize(twin)["max_laps_days"] == [1, 3]
    with pytest.raises(ValidationError):
        summarize(SimReport("x", IDEAL, 0, ()))


def test_csv_and_plot_layout(katrina):
    report = run(katrina, IDEAL)
    lines = report.to_csv().split("\n")
    assert lines[0] == ",".join(CSV_COLUMNS)
    assert lines[15].startswith("15,475,90,45,12,0,475,90,0,0,0,0.0024406867,")
    plot = plot_data(report, build_fleet_plan(katrina))
    assert set(plot["voice"]) == {"day", "voice traffic", "required LAPs"}
    assert set(plot["video"]) == {"day", "active DMATs", "required LAPs"}
    assert plot["voice"]["required LAPs"][14] == 7
    assert plot["video"]["active DMATs"][0] == 9 and plot["video"]["required LAPs"][14] == 5
