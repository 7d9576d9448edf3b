"""Decoding math over explicit probability vectors.

Everything here operates on plain numpy arrays wrapped in small frozen
dataclasses: temperature softmax, top-k and nucleus truncation,
categorical sampling, and perplexity.  No model, no tokenizer — just the
arithmetic, so each piece can be tested against closed forms.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

_SUM_TOL = 1e-9

DEFAULT_TOP_P = 0.93
DEFAULT_TOP_K = 50

# Nudge applied to the nucleus cutoff so cumulative sums that equal p only
# through rounding noise still stop the prefix there (nucleus(d, 1) == d).
_CDF_EPS = 1e-12


@dataclass(frozen=True)
class LogitVector:
    values: np.ndarray

    def __post_init__(self) -> None:
        arr = np.asarray(self.values, dtype=np.float64)
        if arr.ndim != 1 or arr.size < 1:
            raise ValueError("logits must be a non-empty 1-D vector")
        if not np.all(np.isfinite(arr)):
            raise ValueError("logits must be finite")
        object.__setattr__(self, "values", arr)

    def __len__(self) -> int:
        return int(self.values.size)


@dataclass(frozen=True)
class TokenDistribution:
    probs: np.ndarray

    def __post_init__(self) -> None:
        arr = np.asarray(self.probs, dtype=np.float64)
        if arr.ndim != 1 or arr.size < 1:
            raise ValueError("probs must be a non-empty 1-D vector")
        if np.any(arr < 0):
            raise ValueError("probabilities must be nonnegative")
        if abs(float(arr.sum()) - 1.0) > _SUM_TOL:
            raise ValueError(f"probabilities sum to {arr.sum()}, not 1")
        object.__setattr__(self, "probs", arr)

    @property
    def support(self) -> np.ndarray:
        """Indices with nonzero probability."""
        return np.flatnonzero(self.probs)

    def __len__(self) -> int:
        return int(self.probs.size)


@dataclass(frozen=True)
class SequenceLikelihood:
    token_log_probs: tuple[float, ...]

    def __post_init__(self) -> None:
        lp = tuple(float(x) for x in self.token_log_probs)
        if any(x > 0 for x in lp):
            raise ValueError("log-probabilities must be ≤ 0")
        object.__setattr__(self, "token_log_probs", lp)

    @classmethod
    def from_probs(cls, probs: "list[float] | tuple[float, ...]") -> "SequenceLikelihood":
        return cls(token_log_probs=tuple(float(np.log(p)) for p in probs))

    @property
    def N(self) -> int:
        return len(self.token_log_probs)


def softmax_with_temperature(logits: LogitVector, temp: float) -> TokenDistribution:
    """softmax(values / temp), max-subtracted before exponentiation."""
    if not (temp > 0):
        raise ValueError(f"temperature must be positive, got {temp}")
    scaled = logits.values / temp
    scaled = scaled - scaled.max()
    exp = np.exp(scaled)
    return TokenDistribution(probs=exp / exp.sum())


def _descending_order(probs: np.ndarray) -> np.ndarray:
    # stable sort on negated probs: ties resolve to the lower index
    return np.argsort(-probs, kind="stable")


def top_k_truncate(dist: TokenDistribution, k: int) -> TokenDistribution:
    """Keep the k most probable tokens and renormalize.

    k past the vocab size is the identity.  Ties at the cut keep the
    lower-indexed token.
    """
    if k < 1:
        raise ValueError(f"k must be ≥ 1, got {k}")
    probs = dist.probs
    if k >= probs.size:
        return dist
    order = _descending_order(probs)
    kept = order[:k]
    out = np.zeros_like(probs)
    out[kept] = probs[kept]
    total = out.sum()
    if total <= 0:
        raise ValueError("truncation left no probability mass")
    return TokenDistribution(probs=out / total)


def nucleus_truncate(dist: TokenDistribution, p: float) -> TokenDistribution:
    """Keep the smallest high-probability prefix with cumulative mass ≥ p.

    The token whose addition crosses p is included, so support is never
    empty.  p = 1 is the identity.
    """
    if not (0 < p <= 1):
        raise ValueError(f"p must be in (0, 1], got {p}")
    if p == 1.0:
        return dist
    probs = dist.probs
    order = _descending_order(probs)
    cumulative = np.cumsum(probs[order])
    cut = int(np.searchsorted(cumulative, p - _CDF_EPS, side="left"))
    kept = order[: cut + 1]
    out = np.zeros_like(probs)
    out[kept] = probs[kept]
    total = out.sum()
    if total <= 0:
        raise ValueError("truncation left no probability mass")
    return TokenDistribution(probs=out / total)


def sample(dist: TokenDistribution, rng: np.random.Generator) -> int:
    """Draw one token index; the caller owns and seeds the generator."""
    probs = dist.probs
    total = probs.sum()
    if total <= 0:
        raise ValueError("cannot sample from an all-zero distribution")
    cdf = np.cumsum(probs)
    cdf[-1] = total  # guard against rounding drift at the top
    u = rng.random() * total
    return int(np.searchsorted(cdf, u, side="right"))


def perplexity(seq: SequenceLikelihood) -> float:
    """exp of the mean negative log-likelihood, accumulated in log domain."""
    if seq.N == 0:
        raise ValueError("perplexity of an empty sequence is undefined")
    mean_lp = sum(seq.token_log_probs) / seq.N
    return float(np.exp(-mean_lp))


def decode_step(
    logits: LogitVector,
    rng: np.random.Generator,
    temperature: float = 1.0,
    top_p: float = DEFAULT_TOP_P,
    top_k: int | None = None,
) -> int:
    """One full decoding step: softmax, optional top-k, nucleus, sample."""
    dist = softmax_with_temperature(logits, temperature)
    if top_k is not None:
        dist = top_k_truncate(dist, top_k)
    dist = nucleus_truncate(dist, top_p)
    return sample(dist, rng)
