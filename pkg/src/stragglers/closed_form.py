"""Exact completion-time statistics and the redundancy optimizer.

Covers balanced assignments of non-overlapping batches only: D samples in
B equal batches, each hosted by W/B of the W workers.  The completion
time is then the maximum over B batches of the minimum finish time among
each batch's hosts, and both moments have closed forms in harmonic
numbers.  Overlapping or unbalanced plans have no closed form here; use
the simulator for those.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .distributions import ServiceDistribution
from .plans import DivisibilityError

__all__ = [
    "SystemConfig",
    "CompletionStats",
    "SweepPoint",
    "OptimizationResult",
    "feasible_batch_counts",
    "completion_stats_balanced",
    "optimize_redundancy",
]

OBJECTIVES = ("mean", "variance")


@dataclass(frozen=True)
class SystemConfig:
    """A balanced non-overlapping configuration of the master-worker system."""

    num_samples: int
    num_workers: int
    per_sample: ServiceDistribution
    num_batches: int

    def __post_init__(self):
        if min(self.num_samples, self.num_workers, self.num_batches) < 1:
            raise ValueError("num_samples, num_workers and num_batches must be positive")
        if self.num_samples % self.num_batches != 0:
            raise DivisibilityError(
                f"num_batches={self.num_batches} does not divide "
                f"num_samples={self.num_samples}"
            )
        if self.num_workers % self.num_batches != 0:
            raise DivisibilityError(
                f"num_batches={self.num_batches} does not divide "
                f"num_workers={self.num_workers}"
            )


@dataclass(frozen=True)
class CompletionStats:
    """Exact mean and variance of the job completion time."""

    mean: float
    variance: float

    def __post_init__(self):
        if not self.mean > 0 or self.variance < 0:
            raise ValueError(
                f"completion stats need mean > 0 and variance >= 0, "
                f"got ({self.mean}, {self.variance})"
            )


@dataclass(frozen=True)
class SweepPoint:
    """Completion stats at one feasible batch count."""

    num_batches: int
    stats: CompletionStats


@dataclass(frozen=True)
class OptimizationResult:
    best_num_batches: int
    best_value: float
    sweep: tuple[SweepPoint, ...]


def feasible_batch_counts(num_samples: int, num_workers: int) -> list[int]:
    """Batch counts B with B | num_samples and B | num_workers, ascending.

    These are exactly the divisors of gcd(num_samples, num_workers); B = 1
    (full diversity) is always present.
    """
    if num_samples < 1 or num_workers < 1:
        raise ValueError("num_samples and num_workers must be positive")
    g = math.gcd(num_samples, num_workers)
    divisors = set()
    for d in range(1, math.isqrt(g) + 1):
        if g % d == 0:
            divisors.add(d)
            divisors.add(g // d)
    return sorted(divisors)


def completion_stats_balanced(config: SystemConfig) -> CompletionStats:
    """Exact completion-time moments for a balanced non-overlapping plan.

    Composes the distribution closures: the per-batch law scales the
    per-sample law to batches of D/B samples, the fastest of the W/B hosts
    of a batch is the min-closure of that law, and the job completes at
    the maximum over the B batch winners.
    """
    batch_law = config.per_sample.for_batch(config.num_samples // config.num_batches)
    winner = batch_law.min_of(config.num_workers // config.num_batches)
    mean, variance = winner.max_moments(config.num_batches)
    return CompletionStats(mean, variance)


def optimize_redundancy(
    num_samples: int,
    num_workers: int,
    per_sample: ServiceDistribution,
    objective: str = "mean",
) -> OptimizationResult:
    """Minimize completion-time mean or variance over all feasible B.

    Exhaustive evaluation over the (small) feasible set; ties break toward
    smaller B, i.e. toward more diversity, which is also the variance-
    optimal direction.
    """
    if objective not in OBJECTIVES:
        raise ValueError(f"objective must be one of {OBJECTIVES}, got {objective!r}")
    sweep = []
    best_b = None
    best_value = math.inf
    for b in feasible_batch_counts(num_samples, num_workers):
        stats = completion_stats_balanced(
            SystemConfig(num_samples, num_workers, per_sample, b)
        )
        sweep.append(SweepPoint(b, stats))
        value = stats.mean if objective == "mean" else stats.variance
        if value < best_value:
            best_b = b
            best_value = value
    return OptimizationResult(best_b, best_value, tuple(sweep))
