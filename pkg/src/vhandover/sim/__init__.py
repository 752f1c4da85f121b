"""Hexagonal-cell mobility and dwell-timer handover simulation."""

from .engine import (
    HandoverEvent,
    HandoverPolicy,
    RadioNetwork,
    SimState,
    Simulation,
    TraceRecord,
    band_occupancy,
    ping_pong_count,
)
from .geometry import HexCell, MobilePath, position_at
from .scenario import Report, Scenario, load_scenario, scenario_from_dict

__all__ = [
    "HandoverEvent",
    "HandoverPolicy",
    "HexCell",
    "MobilePath",
    "RadioNetwork",
    "Report",
    "Scenario",
    "SimState",
    "Simulation",
    "TraceRecord",
    "band_occupancy",
    "load_scenario",
    "ping_pong_count",
    "position_at",
    "scenario_from_dict",
]
