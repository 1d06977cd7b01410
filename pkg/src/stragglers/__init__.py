"""Redundancy planning for master-worker systems with stragglers.

Computes exact completion-time statistics for balanced replication of
non-overlapping data batches, optimizes the replication level across the
diversity-parallelism spectrum, and validates everything with a seeded,
reproducible Monte Carlo simulator that also covers unbalanced and
overlapping plans.
"""

from .closed_form import (
    CompletionStats,
    OptimizationResult,
    SweepPoint,
    SystemConfig,
    completion_stats_balanced,
    feasible_batch_counts,
    optimize_redundancy,
)
from .distributions import (
    Exponential,
    ServiceDistribution,
    ShiftedExponential,
    harmonic,
    uniform_open_closed,
)
from .plans import (
    AssignmentPlan,
    BatchingPlan,
    DivisibilityError,
    IncompleteAssignmentError,
    balanced_assignment,
    explicit_assignment,
    make_nonoverlapping_batches,
    make_shingled_batches,
    plan_from_dict,
    plan_to_dict,
    replication_profile,
)
from .simulate import (
    PairwiseDifference,
    PolicyComparison,
    SimulationSpec,
    SimulationSummary,
    compare_policies,
    completion_time_samples,
    simulate_completion,
)

__version__ = "0.1.0"

__all__ = [
    "CompletionStats",
    "OptimizationResult",
    "SweepPoint",
    "SystemConfig",
    "completion_stats_balanced",
    "feasible_batch_counts",
    "optimize_redundancy",
    "Exponential",
    "ServiceDistribution",
    "ShiftedExponential",
    "harmonic",
    "uniform_open_closed",
    "AssignmentPlan",
    "BatchingPlan",
    "DivisibilityError",
    "IncompleteAssignmentError",
    "balanced_assignment",
    "explicit_assignment",
    "make_nonoverlapping_batches",
    "make_shingled_batches",
    "plan_from_dict",
    "plan_to_dict",
    "replication_profile",
    "PairwiseDifference",
    "PolicyComparison",
    "SimulationSpec",
    "SimulationSummary",
    "compare_policies",
    "completion_time_samples",
    "simulate_completion",
]
