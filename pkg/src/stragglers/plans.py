"""Batching of dataset samples and batch-to-worker assignment plans.

A job over D samples is split into B equal-size batches (a partition for
the non-overlapping case, cyclic shingles for the overlapping case); each
worker hosts exactly one batch.  Plans are immutable after construction
and validate their own coverage invariants, so any constructed plan is
safe to hand to the analytic engine or the simulator.

Plans serialize to a plain JSON-compatible dict (see `plan_to_dict`)
with three keys: num_samples, batches, worker_to_batch.
"""

from __future__ import annotations

from dataclasses import dataclass

__all__ = [
    "DivisibilityError",
    "IncompleteAssignmentError",
    "BatchingPlan",
    "AssignmentPlan",
    "make_nonoverlapping_batches",
    "make_shingled_batches",
    "balanced_assignment",
    "explicit_assignment",
    "replication_profile",
    "plan_to_dict",
    "plan_from_dict",
]

NON_OVERLAPPING = "non-overlapping"
OVERLAPPING = "overlapping"


class DivisibilityError(ValueError):
    """A count that must divide another does not."""


class IncompleteAssignmentError(ValueError):
    """An assignment leaves at least one batch with no worker."""


@dataclass(frozen=True)
class BatchingPlan:
    """An equal-size batching of samples {0, ..., num_samples-1}.

    kind is "non-overlapping" (batches form a partition) or "overlapping"
    (at least one pair of batches intersects partially).
    """

    num_samples: int
    batches: tuple[tuple[int, ...], ...]
    kind: str

    def __post_init__(self):
        if self.num_samples < 1:
            raise ValueError(f"num_samples must be positive, got {self.num_samples}")
        canonical = tuple(tuple(sorted(batch)) for batch in self.batches)
        object.__setattr__(self, "batches", canonical)
        if not canonical:
            raise ValueError("a batching plan needs at least one batch")

        sizes = {len(batch) for batch in canonical}
        if len(sizes) != 1 or 0 in sizes:
            raise ValueError(f"batches must share one non-zero size, got sizes {sorted(sizes)}")
        for batch in canonical:
            if len(set(batch)) != len(batch):
                raise ValueError(f"batch {batch} contains duplicate sample indices")
            if batch[0] < 0 or batch[-1] >= self.num_samples:
                raise ValueError(f"batch {batch} has indices outside [0, {self.num_samples})")

        covered = set().union(*map(set, canonical))
        if covered != set(range(self.num_samples)):
            missing = sorted(set(range(self.num_samples)) - covered)
            raise ValueError(f"batches do not cover samples {missing}")

        if self.kind == NON_OVERLAPPING:
            if sum(len(batch) for batch in canonical) != self.num_samples:
                raise ValueError("non-overlapping batches must be pairwise disjoint")
        elif self.kind == OVERLAPPING:
            if not self._has_partial_overlap(canonical):
                raise ValueError(
                    "overlapping plan has no pair of partially overlapping batches"
                )
        else:
            raise ValueError(f"unknown batching kind {self.kind!r}")

    @staticmethod
    def _has_partial_overlap(batches) -> bool:
        size = len(batches[0])
        sets = [set(batch) for batch in batches]
        return any(
            0 < len(sets[i] & sets[j]) < size
            for i in range(len(sets))
            for j in range(i + 1, len(sets))
        )

    @property
    def num_batches(self) -> int:
        return len(self.batches)

    @property
    def batch_size(self) -> int:
        return len(self.batches[0])


@dataclass(frozen=True)
class AssignmentPlan:
    """Maps each worker to the single batch it hosts.

    Validates that every batch has at least one worker; without that the
    job could never complete under non-overlapping batching.
    """

    num_batches: int
    worker_to_batch: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "worker_to_batch", tuple(int(b) for b in self.worker_to_batch))
        if self.num_batches < 1:
            raise ValueError(f"num_batches must be positive, got {self.num_batches}")
        if not self.worker_to_batch:
            raise ValueError("an assignment plan needs at least one worker")
        bad = [b for b in self.worker_to_batch if b < 0 or b >= self.num_batches]
        if bad:
            raise ValueError(
                f"batch indices {sorted(set(bad))} out of range [0, {self.num_batches})"
            )
        missing = sorted(set(range(self.num_batches)) - set(self.worker_to_batch))
        if missing:
            raise IncompleteAssignmentError(f"batches {missing} are assigned to no worker")

    @property
    def num_workers(self) -> int:
        return len(self.worker_to_batch)


def make_nonoverlapping_batches(num_samples: int, num_batches: int) -> BatchingPlan:
    """Partition samples into contiguous equal batches [i*D/B, (i+1)*D/B)."""
    if num_samples < 1 or num_batches < 1:
        raise ValueError("num_samples and num_batches must be positive")
    if num_samples % num_batches != 0:
        raise DivisibilityError(
            f"num_batches={num_batches} does not divide num_samples={num_samples}"
        )
    size = num_samples // num_batches
    batches = tuple(
        tuple(range(i * size, (i + 1) * size)) for i in range(num_batches)
    )
    return BatchingPlan(num_samples, batches, NON_OVERLAPPING)


def make_shingled_batches(
    num_samples: int, num_batches: int, batch_size: int
) -> BatchingPlan:
    """Cyclic overlapping batches: batch i covers batch_size indices from
    i*stride onward (mod num_samples), with stride = ceil(D / num_batches).

    batch_size must exceed the stride (otherwise nothing overlaps) and be
    smaller than the dataset (otherwise every batch is the full set).
    """
    if num_samples < 1 or num_batches < 1:
        raise ValueError("num_samples and num_batches must be positive")
    if batch_size > num_samples:
        raise ValueError(
            f"batch_size={batch_size} exceeds num_samples={num_samples}"
        )
    stride = -(-num_samples // num_batches)
    if batch_size <= stride:
        raise ValueError(
            f"batch_size={batch_size} must exceed stride={stride} "
            "for batches to overlap"
        )
    batches = tuple(
        tuple(sorted((i * stride + m) % num_samples for m in range(batch_size)))
        for i in range(num_batches)
    )
    return BatchingPlan(num_samples, batches, OVERLAPPING)


def balanced_assignment(batching: BatchingPlan, num_workers: int) -> AssignmentPlan:
    """Host every batch on exactly num_workers / num_batches workers."""
    if num_workers < 1:
        raise ValueError(f"num_workers must be positive, got {num_workers}")
    B = batching.num_batches
    if num_workers % B != 0:
        raise DivisibilityError(
            f"num_batches={B} does not divide num_workers={num_workers}"
        )
    per_batch = num_workers // B
    return AssignmentPlan(B, tuple(j // per_batch for j in range(num_workers)))


def explicit_assignment(batching: BatchingPlan, worker_to_batch) -> AssignmentPlan:
    """Arbitrary (possibly unbalanced) assignment, validated against `batching`."""
    return AssignmentPlan(batching.num_batches, tuple(worker_to_batch))


def replication_profile(plan: AssignmentPlan) -> list[int]:
    """Number of workers hosting each batch; entries sum to num_workers."""
    counts = [0] * plan.num_batches
    for batch in plan.worker_to_batch:
        counts[batch] += 1
    return counts


def plan_to_dict(batching: BatchingPlan, assignment: AssignmentPlan) -> dict:
    """JSON-compatible form: num_samples, batches, worker_to_batch."""
    if assignment.num_batches != batching.num_batches:
        raise ValueError(
            f"assignment refers to {assignment.num_batches} batches but the "
            f"batching has {batching.num_batches}"
        )
    return {
        "num_samples": batching.num_samples,
        "batches": [list(batch) for batch in batching.batches],
        "worker_to_batch": list(assignment.worker_to_batch),
    }


def plan_from_dict(payload: dict) -> tuple[BatchingPlan, AssignmentPlan]:
    """Rebuild plans from the `plan_to_dict` schema, validating everything.

    The batching kind is derived: disjoint batches load as non-overlapping,
    anything else as overlapping.
    """
    if not isinstance(payload, dict):
        raise ValueError(f"plan must be a JSON object, got {type(payload).__name__}")
    for key in ("num_samples", "batches", "worker_to_batch"):
        if key not in payload:
            raise ValueError(f"plan is missing required key {key!r}")
    try:
        num_samples = int(payload["num_samples"])
        batches = tuple(tuple(int(i) for i in batch) for batch in payload["batches"])
        worker_to_batch = tuple(int(b) for b in payload["worker_to_batch"])
    except (TypeError, ValueError) as exc:
        raise ValueError(f"malformed plan: {exc}") from exc

    if not batches:
        raise ValueError("plan has no batches")
    total = sum(len(batch) for batch in batches)
    distinct = len(set().union(*map(set, batches)))
    kind = NON_OVERLAPPING if total == distinct else OVERLAPPING
    batching = BatchingPlan(num_samples, batches, kind)
    assignment = AssignmentPlan(batching.num_batches, worker_to_batch)
    return batching, assignment
