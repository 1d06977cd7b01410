"""Seeded Monte Carlo simulation of job completion time.

Works for any batching/assignment plan, balanced or not, overlapping or
not; it is the only evaluator for plans outside the closed-form family.

Reproducibility contract: trials are generated in fixed-size blocks, and
block b draws its per-(trial, worker) uniforms from a Philox generator
keyed by (seed, b).  The uniform a given worker sees in a given trial is
therefore a pure function of (seed, trial, worker count) and never of the
plan, which yields two properties at once:

- bit-identical results for the same spec regardless of how many threads
  execute the blocks, and
- common random numbers across policies that share seed, trials and
  worker count, which sharpens mean-difference comparisons.

Per trial, worker j draws one service time from the batch-size-scaled law
of the batch it hosts; all workers start at time 0.  A sample is covered
at the earliest finish among workers whose batch contains it, and the
trial completes when every sample is covered.  For non-overlapping plans
this reduces to the max over batches of each batch's fastest host.
"""

from __future__ import annotations

import dataclasses
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from statistics import NormalDist

import numpy as np
from numpy.random import Generator, Philox, SeedSequence

from .distributions import ServiceDistribution, uniform_open_closed
from .plans import AssignmentPlan, BatchingPlan

__all__ = [
    "SimulationSpec",
    "SimulationSummary",
    "PairwiseDifference",
    "PolicyComparison",
    "completion_time_samples",
    "simulate_completion",
    "compare_policies",
]

# Fixed block granularity: part of the reproducibility contract, do not
# derive from thread count.
_TRIALS_PER_BLOCK = 8192

_Z_99 = NormalDist().inv_cdf(0.995)


@dataclass(frozen=True)
class SimulationSpec:
    """One simulation experiment: plan, per-sample law, trials and seed."""

    batching: BatchingPlan
    assignment: AssignmentPlan
    per_sample: ServiceDistribution
    trials: int
    seed: int

    def __post_init__(self):
        if self.trials < 1:
            raise ValueError(f"trials must be positive, got {self.trials}")
        if self.assignment.num_batches != self.batching.num_batches:
            raise ValueError(
                f"assignment refers to {self.assignment.num_batches} batches "
                f"but the batching has {self.batching.num_batches}"
            )

    @property
    def num_workers(self) -> int:
        return self.assignment.num_workers


@dataclass(frozen=True)
class SimulationSummary:
    """Empirical completion-time statistics with seed provenance."""

    mean: float
    variance: float
    std_error: float
    trials: int
    seed: int


@dataclass(frozen=True)
class PairwiseDifference:
    """mean(policy a) - mean(policy b) with a 99% normal-approximation CI."""

    index_a: int
    index_b: int
    mean_difference: float
    ci_low: float
    ci_high: float


@dataclass(frozen=True)
class PolicyComparison:
    summaries: tuple[SimulationSummary, ...]
    differences: tuple[PairwiseDifference, ...]
    best_index: int


def _worker_service_params(spec: SimulationSpec) -> tuple[np.ndarray, np.ndarray]:
    """Per-worker (rate, shift) of the law for the batch each worker hosts."""
    laws = [
        spec.per_sample.for_batch(len(spec.batching.batches[b]))
        for b in spec.assignment.worker_to_batch
    ]
    rates = np.array([law.rate for law in laws], dtype=np.float64)
    shifts = np.array([law.shift for law in laws], dtype=np.float64)
    return rates, shifts


def _coverage_groups(
    batching: BatchingPlan, assignment: AssignmentPlan
) -> list[np.ndarray]:
    """Distinct host sets over samples: one worker-index array per set.

    A trial's completion time is the max over these groups of the min
    finish time within the group.
    """
    hosts: dict[int, set[int]] = {d: set() for d in range(batching.num_samples)}
    for worker, batch in enumerate(assignment.worker_to_batch):
        for sample in batching.batches[batch]:
            hosts[sample].add(worker)
    unique = sorted({tuple(sorted(group)) for group in hosts.values()})
    return [np.array(group, dtype=np.intp) for group in unique]


def _batch_groups(assignment: AssignmentPlan) -> list[np.ndarray]:
    """Workers hosting each batch; the max-of-batch-minima reduction."""
    groups = [[] for _ in range(assignment.num_batches)]
    for worker, batch in enumerate(assignment.worker_to_batch):
        groups[batch].append(worker)
    return [np.array(group, dtype=np.intp) for group in groups]


def _reduce_completion(finish: np.ndarray, groups: list[np.ndarray]) -> np.ndarray:
    """Per-trial completion: max over groups of the min finish in the group."""
    out = finish[:, groups[0]].min(axis=1)
    for group in groups[1:]:
        np.maximum(out, finish[:, group].min(axis=1), out=out)
    return out


def _block_times(
    seed: int,
    block_index: int,
    count: int,
    rates: np.ndarray,
    shifts: np.ndarray,
    groups: list[np.ndarray],
) -> np.ndarray:
    rng = Generator(Philox(SeedSequence((seed % 2**64, block_index))))
    u = uniform_open_closed(rng, size=(count, rates.size))
    finish = shifts + (-np.log(u)) / rates
    return _reduce_completion(finish, groups)


def completion_time_samples(spec: SimulationSpec, n_jobs: int = 1) -> np.ndarray:
    """All per-trial completion times, in trial order.

    n_jobs > 1 runs blocks on a thread pool; the result is bit-identical
    either way.
    """
    rates, shifts = _worker_service_params(spec)
    groups = _coverage_groups(spec.batching, spec.assignment)
    counts = [
        min(_TRIALS_PER_BLOCK, spec.trials - start)
        for start in range(0, spec.trials, _TRIALS_PER_BLOCK)
    ]

    def run_block(block_index: int) -> np.ndarray:
        return _block_times(
            spec.seed, block_index, counts[block_index], rates, shifts, groups
        )

    if n_jobs > 1 and len(counts) > 1:
        with ThreadPoolExecutor(max_workers=n_jobs) as pool:
            parts = list(pool.map(run_block, range(len(counts))))
    else:
        parts = [run_block(i) for i in range(len(counts))]
    return np.concatenate(parts) if len(parts) > 1 else parts[0]


def _summarize(times: np.ndarray, trials: int, seed: int) -> SimulationSummary:
    mean = float(np.mean(times))
    variance = float(np.var(times, ddof=1)) if trials > 1 else 0.0
    return SimulationSummary(mean, variance, math.sqrt(variance / trials), trials, seed)


def simulate_completion(spec: SimulationSpec, n_jobs: int = 1) -> SimulationSummary:
    """Estimate completion-time mean/variance; deterministic in (spec, seed)."""
    return _summarize(completion_time_samples(spec, n_jobs=n_jobs), spec.trials, spec.seed)


def compare_policies(
    specs, common_seed: int, n_jobs: int = 1
) -> PolicyComparison:
    """Simulate several policies under common random numbers and compare.

    All specs must share the per-sample law and trial count; each is run
    with `common_seed` so policies with equal worker counts consume the
    same underlying uniforms.  Returns per-policy summaries, the mean
    difference of every pair with a 99% confidence interval, and the index
    of the empirically best (lowest-mean) policy.
    """
    specs = list(specs)
    if len(specs) < 2:
        raise ValueError(f"need at least 2 policies to compare, got {len(specs)}")
    trials = specs[0].trials
    per_sample = specs[0].per_sample
    for spec in specs[1:]:
        if spec.trials != trials:
            raise ValueError("policies under comparison must share the trial count")
        if spec.per_sample != per_sample:
            raise ValueError("policies under comparison must share the per-sample law")

    times = [
        completion_time_samples(dataclasses.replace(spec, seed=common_seed), n_jobs=n_jobs)
        for spec in specs
    ]
    summaries = tuple(_summarize(t, trials, common_seed) for t in times)

    differences = []
    for i in range(len(specs)):
        for j in range(i + 1, len(specs)):
            delta = times[i] - times[j]
            mean_diff = float(np.mean(delta))
            spread = float(np.std(delta, ddof=1)) if trials > 1 else 0.0
            half = _Z_99 * spread / math.sqrt(trials)
            differences.append(
                PairwiseDifference(i, j, mean_diff, mean_diff - half, mean_diff + half)
            )

    means = [s.mean for s in summaries]
    best_index = min(range(len(means)), key=lambda k: means[k])
    return PolicyComparison(summaries, tuple(differences), best_index)
