"""Benchmark metrics: pass@k, build rate, speedup, temperature sweeps.

pass@k uses the unbiased estimator 1 - C(N-c, k)/C(N, k) evaluated in
exact rational arithmetic, so pass@1 is bitwise equal to c/N and nothing
overflows for any N the harness will ever see.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Mapping, Sequence


@dataclass(frozen=True)
class MetricSample:
    """Per-prompt tally: N_p samples generated, c_p functionally correct."""

    n_samples: int
    n_correct: int

    def __post_init__(self) -> None:
        if not (0 <= self.n_correct <= self.n_samples):
            raise ValueError(
                f"need 0 <= correct <= samples, got {self.n_correct}/{self.n_samples}"
            )


def pass_at_k(n: int, c: int, k: int) -> float:
    """Probability that at least one of k drawn samples is correct.

    1 - C(n-c, k)/C(n, k) via the telescoped product of (i-k)/i, kept as
    an exact Fraction until the final float conversion.
    """
    if not (0 <= c <= n):
        raise ValueError(f"need 0 <= c <= n, got c={c}, n={n}")
    if not (1 <= k <= n):
        raise ValueError(f"need 1 <= k <= n, got k={k}, n={n}")
    if c == 0:
        return 0.0
    if n - c < k:
        return 1.0
    miss = Fraction(1)
    for i in range(n - c + 1, n + 1):
        miss *= Fraction(i - k, i)
    return float(1 - miss)


def average_pass_at_k(samples: Sequence[MetricSample], k: int) -> float:
    """Mean of per-prompt pass@k over all prompts."""
    if not samples:
        raise ValueError("no per-prompt samples to average")
    low = min(s.n_samples for s in samples)
    if k > low:
        raise ValueError(f"k={k} exceeds smallest per-prompt sample count {low}")
    return sum(pass_at_k(s.n_samples, s.n_correct, k) for s in samples) / len(samples)


def build_rate(built_flags: Iterable[bool]) -> float:
    """Fraction of samples that compiled."""
    flags = list(built_flags)
    if not flags:
        raise ValueError("no samples")
    return sum(1 for b in flags if b) / len(flags)


def speedup(baseline_seconds: float | None, candidate_seconds: float | None) -> float | None:
    """baseline / candidate, or None when either side is missing or zero."""
    if not baseline_seconds or not candidate_seconds:
        return None
    if baseline_seconds <= 0 or candidate_seconds <= 0:
        return None
    return baseline_seconds / candidate_seconds


DEFAULT_TEMPERATURE_SWEEP = (0.1, 0.2, 0.4, 0.6, 0.8)


def sweep_and_select(
    per_temperature: Mapping[float, Sequence[MetricSample]],
    k: int,
    temperatures: Sequence[float] = DEFAULT_TEMPERATURE_SWEEP,
) -> tuple[float, float]:
    """Pick the temperature maximizing average pass@k.

    Every temperature in the sweep must have a result set.  Ties go to the
    lower temperature, hence the ascending scan with a strict comparison.
    """
    best_temp: float | None = None
    best_metric = float("-inf")
    for temp in sorted(temperatures):
        if temp not in per_temperature:
            raise ValueError(f"missing result set for temperature {temp}")
        metric = average_pass_at_k(per_temperature[temp], k)
        if metric > best_metric:
            best_temp = temp
            best_metric = metric
    if best_temp is None:
        raise ValueError("empty temperature sweep")
    return best_temp, best_metric
