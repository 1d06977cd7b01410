import math

import pytest

from stragglers import (
    CompletionStats,
    DivisibilityError,
    Exponential,
    ShiftedExponential,
    SystemConfig,
    completion_stats_balanced,
    feasible_batch_counts,
    optimize_redundancy,
)


def _harmonic_oracle(n, order=1):
    # independent of the package: plain fsum of the defining series
    return math.fsum(1.0 / i**order for i in range(1, n + 1))


# ---------------------------------------------------------------------------
# feasible batch counts
# ---------------------------------------------------------------------------

@pytest.mark.parametrize("num_samples, num_workers, expected", [
    (12, 12, [1, 2, 3, 4, 6, 12]),
    (6, 4, [1, 2]),
    (1, 7, [1]),
    (60, 24, [1, 2, 3, 4, 6, 12]),
])
def test_feasible_batch_counts(num_samples, num_workers, expected):
    assert feasible_batch_counts(num_samples, num_workers) == expected


def test_feasible_counts_divide_both():
    for d, w in [(8, 20), (36, 48), (17, 17)]:
        counts = feasible_batch_counts(d, w)
        assert counts[0] == 1
        assert counts == sorted(counts)
        assert all(d % b == 0 and w % b == 0 for b in counts)


# ---------------------------------------------------------------------------
# closed-form completion stats
# ---------------------------------------------------------------------------

@pytest.mark.parametrize("config, mean, variance", [
    (SystemConfig(4, 4, Exponential(1.0), 1), 1.0, 1.0),
    (SystemConfig(4, 4, ShiftedExponential(1.0, 1.0), 2), 3.5, 1.25),
    (SystemConfig(12, 12, Exponential(1.0), 3), 1.8333333333333333, 1.3611111111111112),
])
def test_completion_stats_examples(config, mean, variance):
    stats = completion_stats_balanced(config)
    assert math.isclose(stats.mean, mean, rel_tol=1e-14)
    assert math.isclose(stats.variance, variance, rel_tol=1e-14)


def test_system_config_rejects_infeasible_batches():
    with pytest.raises(DivisibilityError):
        SystemConfig(12, 12, Exponential(1.0), 5)
    with pytest.raises(DivisibilityError):
        SystemConfig(6, 4, Exponential(1.0), 3)


def test_completion_stats_closed_forms_general_sizes():
    # decoupled D and W: mean = D*shift/B + (D/(W*mu))*H_B, var = (D/(W*mu))^2*H_B2
    d, w, b, mu, shift = 24, 8, 4, 2.0, 0.5
    stats = completion_stats_balanced(SystemConfig(d, w, ShiftedExponential(mu, shift), b))
    scale = d / (w * mu)
    assert math.isclose(stats.mean, d * shift / b + scale * _harmonic_oracle(b), rel_tol=1e-14)
    assert math.isclose(stats.variance, scale**2 * _harmonic_oracle(b, 2), rel_tol=1e-14)


@pytest.mark.parametrize("n", [4, 6, 12, 24, 60, 128, 1024])
def test_mean_matches_reference_objective(n):
    # with D = W = N the mean must equal N*delta/B + H_B/mu
    for mu in (0.5, 1.0, 4.0):
        for delta in (0.0, 0.1, 1.0, 10.0):
            for b in feasible_batch_counts(n, n):
                stats = completion_stats_balanced(
                    SystemConfig(n, n, ShiftedExponential(mu, delta), b)
                )
                reference = n * delta / b + _harmonic_oracle(b) / mu
                assert abs(stats.mean - reference) <= 1e-12


# ---------------------------------------------------------------------------
# optimizer
# ---------------------------------------------------------------------------

def test_optimizer_exponential_prefers_full_diversity():
    result = optimize_redundancy(12, 12, Exponential(1.0), objective="mean")
    assert result.best_num_batches == 1
    result = optimize_redundancy(12, 12, Exponential(1.0), objective="variance")
    assert result.best_num_batches == 1


def test_optimizer_large_shift_prefers_full_parallelism():
    # exhaustive evaluation of 120/B + H_B over {1,2,3,4,6,12}
    result = optimize_redundancy(12, 12, ShiftedExponential(1.0, 10.0))
    assert result.best_num_batches == 12
    assert math.isclose(result.best_value, 13.103210678210678, rel_tol=1e-13)


def test_optimizer_interior_optimum():
    # exhaustive evaluation of 2.4/B + H_B: f(2)=2.7, f(3)=2.6333, f(4)=2.6833
    result = optimize_redundancy(12, 12, ShiftedExponential(1.0, 0.2))
    assert result.best_num_batches == 3
    assert math.isclose(result.best_value, 2.6333333333333333, rel_tol=1e-13)


def test_optimizer_tiny_shift_prefers_full_diversity():
    result = optimize_redundancy(12, 12, ShiftedExponential(1.0, 0.001))
    assert result.best_num_batches == 1


def test_optimizer_variance_objective_always_full_diversity():
    result = optimize_redundancy(12, 12, ShiftedExponential(1.0, 10.0), objective="variance")
    assert result.best_num_batches == 1


def test_optimizer_rejects_unknown_objective():
    with pytest.raises(ValueError):
        optimize_redundancy(4, 4, Exponential(1.0), objective="median")


def test_optimizer_sweep_is_consistent():
    result = optimize_redundancy(24, 12, ShiftedExponential(2.0, 0.3))
    values = {p.num_batches: p.stats.mean for p in result.sweep}
    assert sorted(values) == feasible_batch_counts(24, 12)
    assert result.best_value == min(values.values())
    assert values[result.best_num_batches] == result.best_value


# ---------------------------------------------------------------------------
# structural invariants
# ---------------------------------------------------------------------------

@pytest.mark.parametrize("mu", [0.5, 1.0, 4.0])
@pytest.mark.parametrize("n", [4, 6, 12, 24, 60])
def test_exponential_moments_strictly_increase_with_batches(n, mu):
    sweep = optimize_redundancy(n, n, Exponential(mu)).sweep
    means = [p.stats.mean for p in sweep]
    variances = [p.stats.variance for p in sweep]
    assert all(b > a for a, b in zip(means, means[1:]))
    assert all(b > a for a, b in zip(variances, variances[1:]))


def test_variance_is_shift_invariant():
    for b in feasible_batch_counts(12, 12):
        reference = completion_stats_balanced(
            SystemConfig(12, 12, ShiftedExponential(1.0, 0.0), b)
        ).variance
        for delta in (0.1, 1.0, 10.0, 123.456):
            stats = completion_stats_balanced(
                SystemConfig(12, 12, ShiftedExponential(1.0, delta), b)
            )
            assert stats.variance == reference  # exact: shift never enters


def test_variance_strictly_increases_for_both_families():
    for dist in (Exponential(2.0), ShiftedExponential(2.0, 3.0)):
        sweep = optimize_redundancy(12, 12, dist, objective="variance").sweep
        variances = [p.stats.variance for p in sweep]
        assert all(b > a for a, b in zip(variances, variances[1:]))


def test_rate_scaling_covariance():
    # doubling mu halves the mean and the standard deviation; exact for
    # powers of two, which only rescale the float exponent
    base = completion_stats_balanced(SystemConfig(12, 12, Exponential(1.0), 3))
    scaled = completion_stats_balanced(SystemConfig(12, 12, Exponential(2.0), 3))
    assert scaled.mean == base.mean / 2
    assert scaled.variance == base.variance / 4
    general = completion_stats_balanced(SystemConfig(12, 12, Exponential(3.0), 3))
    assert math.isclose(general.mean, base.mean / 3, rel_tol=1e-14)
    assert math.isclose(general.variance, base.variance / 9, rel_tol=1e-14)


def test_shift_increment_moves_mean_by_scaled_amount():
    d, w, b = 12, 12, 4
    low = completion_stats_balanced(SystemConfig(d, w, ShiftedExponential(1.0, 1.0), b))
    high = completion_stats_balanced(SystemConfig(d, w, ShiftedExponential(1.0, 1.5), b))
    assert high.mean - low.mean == d * 0.5 / b  # dyadic values keep this exact
    assert high.variance == low.variance


def test_completion_stats_validation():
    with pytest.raises(ValueError):
        CompletionStats(0.0, 1.0)
    with pytest.raises(ValueError):
        CompletionStats(1.0, -0.5)
