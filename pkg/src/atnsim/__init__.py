"""Capacity planning and simulation for two-level aerial emergency networks."""

from .capacity import CodecSpec, PlatformCapacity, fits_on_platform
from .demand import Scenario, load_scenario, validate_scenario
from .fleet import FleetPlan, build_fleet_plan, laps_for_type, shared_fleet_size
from .sim import SimReport, run, summarize

__version__ = "0.1.0"

__all__ = [
    "CodecSpec", "PlatformCapacity", "fits_on_platform",
    "Scenario", "load_scenario", "validate_scenario",
    "FleetPlan", "build_fleet_plan", "laps_for_type", "shared_fleet_size",
    "SimReport", "run", "summarize",
]
