"""Service-time laws and their order-statistic closure rules.

Two families are supported: Exponential(rate) and ShiftedExponential(rate,
shift).  Both are closed under the operations needed for replication
planning:

- scaling a per-sample law to a batch of s samples (rate/s, shift*s),
- taking the minimum of k i.i.d. copies (rate*k, shift unchanged),
- exact mean/variance of the maximum of b i.i.d. copies (harmonic sums).

Sampling is inverse-transform over uniforms on (0, 1], so identical
generator state always yields identical values.  Generators are plain
``numpy.random.Generator`` objects owned by the caller; spawn child
``SeedSequence``s when trials must run in parallel.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

__all__ = [
    "Exponential",
    "ShiftedExponential",
    "ServiceDistribution",
    "harmonic",
    "uniform_open_closed",
]


def harmonic(n: int, order: int = 1) -> float:
    """Partial sum 1 + 1/2**order + ... + 1/n**order, by direct summation.

    Only orders 1 and 2 are supported: they are the mean and variance
    kernels of the maximum of n i.i.d. exponentials.
    """
    if order not in (1, 2):
        raise ValueError(f"order must be 1 or 2, got {order}")
    if n < 1:
        raise ValueError(f"n must be a positive integer, got {n}")
    return _harmonic_sum(int(n), order)


@lru_cache(maxsize=None)
def _harmonic_sum(n: int, order: int) -> float:
    # Accumulate from the smallest term (i = n) upward to limit rounding.
    total = 0.0
    for i in range(n, 0, -1):
        total += 1.0 / i**order
    return total


def uniform_open_closed(rng: np.random.Generator, size=None):
    """Uniform draws on (0, 1]: a raw 64-bit word u maps to (u + 1) / 2**64.

    The open lower endpoint keeps log(U) finite; U = 1 is allowed and maps
    to the distribution's minimum under inverse-transform sampling.
    """
    words = rng.integers(0, 2**64, size=size, dtype=np.uint64)
    if size is None:
        return (float(words) + 1.0) * 2.0**-64
    return (words.astype(np.float64) + 1.0) * 2.0**-64


@dataclass(frozen=True)
class _ExponentialFamily:
    """Shared survival/sampling/moment machinery; subclasses fix `shift`."""

    rate: float

    def __post_init__(self):
        if not self.rate > 0:
            raise ValueError(f"rate must be positive, got {self.rate}")

    def survival(self, t):
        """P(T > t).  Equals 1 below the shift, exp(-rate*(t-shift)) above.

        Accepts scalars or arrays; monotone non-increasing in t.
        """
        t = np.asarray(t, dtype=np.float64)
        decay = np.exp(-self.rate * np.maximum(t - self.shift, 0.0))
        out = np.where(t < self.shift, 1.0, decay)
        return float(out) if out.ndim == 0 else out

    def inverse_survival(self, u):
        """Time at which the survival probability equals u, for u in (0, 1].

        This is the inverse-transform sampling map: shift + (-ln u)/rate.
        u = 1 returns the minimum possible service time (the shift).
        """
        u = np.asarray(u, dtype=np.float64)
        out = self.shift + (-np.log(u)) / self.rate
        return float(out) if out.ndim == 0 else out

    def sample(self, rng: np.random.Generator, size=None):
        """Draw service times; scalar when size is None, else an array."""
        return self.inverse_survival(uniform_open_closed(rng, size=size))

    def max_moments(self, count: int) -> tuple[float, float]:
        """Exact (mean, variance) of the maximum of `count` i.i.d. copies.

        The max of b i.i.d. Exp(rate) variables is a sum of independent
        exponentials with rates rate*b, ..., rate*1, hence mean H_b/rate
        and variance H_b^(2)/rate**2; a shift moves the mean only.
        """
        if count < 1:
            raise ValueError(f"count must be a positive integer, got {count}")
        mean = self.shift + harmonic(count, 1) / self.rate
        variance = harmonic(count, 2) / self.rate**2
        return mean, variance


@dataclass(frozen=True)
class Exponential(_ExponentialFamily):
    """Memoryless service-time law with survival exp(-rate*t) for t >= 0."""

    @property
    def shift(self) -> float:
        return 0.0

    def for_batch(self, batch_size: int) -> "Exponential":
        """Service law of a batch of `batch_size` samples (rate scales 1/s)."""
        if batch_size < 1:
            raise ValueError(f"batch_size must be a positive integer, got {batch_size}")
        if batch_size == 1:
            return self
        return Exponential(self.rate / batch_size)

    def min_of(self, count: int) -> "Exponential":
        """Law of the minimum of `count` i.i.d. copies: Exp(count * rate)."""
        if count < 1:
            raise ValueError(f"count must be a positive integer, got {count}")
        if count == 1:
            return self
        return Exponential(count * self.rate)


@dataclass(frozen=True)
class ShiftedExponential(_ExponentialFamily):
    """Exponential law translated by a deterministic minimum service time.

    With shift = 0 this behaves exactly like Exponential(rate) in survival,
    sampling, and moments.
    """

    shift: float = 0.0

    def __post_init__(self):
        super().__post_init__()
        if self.shift < 0:
            raise ValueError(f"shift must be non-negative, got {self.shift}")

    def for_batch(self, batch_size: int) -> "ShiftedExponential":
        """Batch of s samples: rate scales to rate/s, shift grows to shift*s."""
        if batch_size < 1:
            raise ValueError(f"batch_size must be a positive integer, got {batch_size}")
        if batch_size == 1:
            return self
        return ShiftedExponential(self.rate / batch_size, self.shift * batch_size)

    def min_of(self, count: int) -> "ShiftedExponential":
        """Minimum of `count` i.i.d. copies: rate scales by count, shift stays."""
        if count < 1:
            raise ValueError(f"count must be a positive integer, got {count}")
        if count == 1:
            return self
        return ShiftedExponential(count * self.rate, self.shift)


ServiceDistribution = Exponential | ShiftedExponential
