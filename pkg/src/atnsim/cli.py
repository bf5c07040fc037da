"""Command-line entry point.

    atnsim validate  SCENARIO
    atnsim plan      SCENARIO [--outdir DIR]
    atnsim simulate  SCENARIO [--mode ideal|geometric] [--seed N] [--outdir DIR]
    atnsim reproduce SCENARIO

SCENARIO is a path or the name of a bundled scenario (katrina-synthetic).
The output directory defaults to $ATNSIM_OUTDIR, else ./atnsim-out.
Exit codes: 0 success, 1 validation or check failure, 2 I/O failure.
"""
from __future__ import annotations

import argparse
import math
import os
import sys
from pathlib import Path

from .demand import load_scenario
from .errors import ValidationError
from .fleet import build_fleet_plan, laps_for_type
from .geometry import coverage_ratio
from .sim import IDEAL, MODES, plot_json, run, summarize

EXIT_OK = 0
EXIT_FAIL = 1
EXIT_IO = 2

OUTDIR_ENV = "ATNSIM_OUTDIR"
DEFAULT_OUTDIR = "atnsim-out"

PEAK_VOICE, PEAK_VOICE_DAY, VOICE_LAPS = 475, 15, 7
DMATS_FIRST, DMATS_FULL, DMAT_FULL_DAY, VIDEO_LAPS = 9, 45, 15, 5
AGGREGATE_LAPS, AGGREGATE_DAYS = 12, [15, 16, 18]
COVERED_AREA = 568.68  # km²
RATIO_CEILING = 0.0025
AREA_TOL = 1e-9


class CommandError(Exception):
    def __init__(self, code: int, message: str):
        self.code = code
        super().__init__(message)


def _load(path):
    try:
        return load_scenario(path)
    except OSError as e:
        raise CommandError(EXIT_IO, f"cannot read scenario {path}: {e.strerror or e}") from None
    except ValidationError as e:
        lines = "\n".join(f"  {p}" for p in e.problems)
        raise CommandError(EXIT_FAIL, f"invalid scenario {path}:\n{lines}") from None


def _write(outdir: Path, name: str, text: str) -> Path:
    try:
        outdir.mkdir(parents=True, exist_ok=True)
        target = outdir / name
        with open(target, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    except OSError as e:
        raise CommandError(EXIT_IO, f"cannot write {outdir / name}: {e.strerror or e}") from None
    return target


def _days(days) -> str:
    return ", ".join(str(d) for d in days)


def cmd_validate(args) -> int:
    s = _load(args.scenario)
    print(f"{args.scenario}: valid ({s.name}, {s.horizon} days, "
          f"{len(s.platforms)} platforms, {len(s.relays)} relays, {len(s.troubles)} troubles)")
    return EXIT_OK


def cmd_plan(args) -> int:
    s = _load(args.scenario)
    plan = build_fleet_plan(s)
    target = _write(Path(args.outdir), "fleet_plan.csv", plan.to_csv())
    for label, column in (("dedicated", "laps_dedicated_total"), ("shared", "laps_shared_total")):
        top, days = plan.peak(column)
        print(f"max {label} LAPs: {top} (days {_days(days)})")
    print(f"wrote {target}")
    return EXIT_OK


def cmd_simulate(args) -> int:
    s = _load(args.scenario)
    report = run(s, args.mode, args.seed)
    outdir = Path(args.outdir)
    csv_path = _write(outdir, f"sim_{args.mode}.csv", report.to_csv())
    plot_path = _write(outdir, f"plot_{args.mode}.json", plot_json(report, build_fleet_plan(s)))
    summary = summarize(report)
    print(f"{s.name} [{args.mode}, seed {report.seed}]")
    print(f"max LAPs deployed: {summary['max_laps']} (days {_days(summary['max_laps_days'])})")
    print(f"peak voice sessions: {summary['max_voice_demand']} "
          f"(days {_days(summary['max_voice_demand_days'])})")
    print(f"peak video sessions: {summary['max_video_demand']} "
          f"(days {_days(summary['max_video_demand_days'])})")
    print(f"sessions blocked: {summary['total_blocked']}")
    print(f"max relays on duty: {summary['max_relays']}")
    if summary["days_with_unserved_troubles"]:
        print(f"unserved troubles on days {_days(summary['days_with_unserved_troubles'])}")
    print(f"wrote {csv_path}\nwrote {plot_path}")
    return EXIT_OK


def reproduction_checks(s) -> list[tuple[str, bool, str]]:
    """(name, passed, detail) for the four headline capacity figures."""
    plan = build_fleet_plan(s)
    cap = s.platform_capacity
    checks = []

    peak, peak_days = plan.peak("voice_sessions")
    laps = laps_for_type(peak, cap.voice_sessions_max)
    checks.append((
        "voice LAPs at peak",
        peak == PEAK_VOICE and peak_days == [PEAK_VOICE_DAY] and laps == VOICE_LAPS,
        f"peak {peak} sessions on days {_days(peak_days)} -> {laps} LAPs "
        f"(expected {PEAK_VOICE} on day {PEAK_VOICE_DAY} -> {VOICE_LAPS})",
    ))

    dmats = s.dmat_schedule.active_per_day
    full = dmats[DMAT_FULL_DAY - 1] if len(dmats) >= DMAT_FULL_DAY else None
    monotone = all(a <= b for a, b in zip(dmats, dmats[1:]))
    video_laps = laps_for_type(max(s.video_demand()), cap.video_sessions_max)
    ded, ded_days = plan.peak("laps_dedicated_total")
    shr, shr_days = plan.peak("laps_shared_total")
    checks.append((
        "aggregate LAPs",
        dmats[0] == DMATS_FIRST and full == DMATS_FULL and monotone and video_laps == VIDEO_LAPS
        and ded == shr == AGGREGATE_LAPS and ded_days == shr_days == AGGREGATE_DAYS,
        f"DMATs {dmats[0]} on day 1 -> {full} on day {DMAT_FULL_DAY}, {video_laps} video LAPs; "
        f"dedicated {ded} (days {_days(ded_days)}), shared {shr} (days {_days(shr_days)}); "
        f"expected {AGGREGATE_LAPS} on days {_days(AGGREGATE_DAYS)}",
    ))

    covered = shr * s.lap_footprint_area
    checks.append((
        "covered LAP area",
        math.isclose(covered, COVERED_AREA, rel_tol=0.0, abs_tol=AREA_TOL),
        f"{shr} x {s.lap_footprint_area} km² = {covered:.2f} km² (expected {COVERED_AREA:.2f})",
    ))

    ratio = coverage_ratio(shr, s.lap_footprint_area, s.disaster_area)
    checks.append((
        "coverage ratio",
        ratio < RATIO_CEILING,
        f"{covered:.2f} / {s.disaster_area:.0f} km² = {ratio:.4%} (must be < {RATIO_CEILING:.2%})",
    ))
    return checks


def cmd_reproduce(args) -> int:
    s = _load(args.scenario)
    checks = reproduction_checks(s)
    for name, ok, detail in checks:
        print(f"{'PASS' if ok else 'FAIL'}  {name}: {detail}")
    passed = sum(ok for _, ok, _ in checks)
    print(f"{passed}/{len(checks)} PASS")
    return EXIT_OK if passed == len(checks) else EXIT_FAIL


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="atnsim", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    outdir = os.environ.get(OUTDIR_ENV) or DEFAULT_OUTDIR

    p = sub.add_parser("validate", help="check a scenario file")
    p.add_argument("scenario")
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("plan", help="write the per-day fleet plan CSV")
    p.add_argument("scenario")
    p.add_argument("--outdir", default=outdir)
    p.set_defaults(func=cmd_plan)

    p = sub.add_parser("simulate", help="run the daily simulation")
    p.add_argument("scenario")
    p.add_argument("--mode", choices=MODES, default=IDEAL)
    p.add_argument("--seed", type=int, default=None, help="override the scenario seed")
    p.add_argument("--outdir", default=outdir)
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("reproduce", help="check the headline capacity figures")
    p.add_argument("scenario")
    p.set_defaults(func=cmd_reproduce)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except CommandError as e:
        print(str(e), file=sys.stderr)
        return e.code


if __name__ == "__main__":
    sys.exit(main())
