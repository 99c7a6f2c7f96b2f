"""High-school timetabling: block detection, greedy construction and tabu
search with frequency-based diversification."""

from .model import (
    Calendar,
    Instance,
    InstanceError,
    Lesson,
    ScheduleState,
    UNSCHEDULED,
    Weights,
    apply_assignment,
    feasible_periods,
    parse_instance,
    period_day,
    period_slot,
    serialize_instance,
)
from .evaluator import (
    CostBreakdown,
    HardViolationReport,
    audit_hard,
    delta_cost,
    total_cost,
)
from .blocks import detect_blocks
from .construct import build_initial
from .tabu import SolverConfig, improve
from .generator import GenSpec, generate_instance

__all__ = [
    "Calendar",
    "Instance",
    "InstanceError",
    "Lesson",
    "ScheduleState",
    "UNSCHEDULED",
    "Weights",
    "apply_assignment",
    "feasible_periods",
    "parse_instance",
    "period_day",
    "period_slot",
    "serialize_instance",
    "CostBreakdown",
    "HardViolationReport",
    "audit_hard",
    "delta_cost",
    "total_cost",
    "detect_blocks",
    "build_initial",
    "SolverConfig",
    "improve",
    "GenSpec",
    "generate_instance",
]
