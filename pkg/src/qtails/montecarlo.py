"""Seeded Monte Carlo estimation of Prob(mean of n draws >= x).

This is the ground truth the analytic bounds are tested against, so it is
kept deliberately plain: no importance sampling, no variance reduction.
Work is split into fixed-size chunks whose seeds derive from the base seed
and the chunk index, which makes results bit-identical for any worker
count and lets a whole threshold grid share one set of sample batches.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .distributions import Distribution, derive_seed
from .errors import DomainError

__all__ = ["MCEstimate", "estimate_tail_of_mean", "estimate_curve"]

#: Draws held in memory per chunk (chunk sample count is this divided by n).
_CHUNK_TARGET_DRAWS = 2_000_000


@dataclass(frozen=True)
class MCEstimate:
    """Estimated tail probability of the sample mean, with binomial stderr."""

    p_hat: float
    stderr: float
    samples: int
    seed: int
    n: int
    x: float

    @property
    def rule_of_three_ceiling(self) -> float:
        """One-sided 95% ceiling 3/samples, the honest bound when p_hat == 0."""
        return 3.0 / self.samples


def _chunk_counts(samples: int, n: int) -> list[int]:
    size = max(1, _CHUNK_TARGET_DRAWS // n)
    full, rest = divmod(samples, size)
    return [size] * full + ([rest] if rest else [])


def _chunk_hits(model: Distribution, n: int, xs: np.ndarray, count: int,
                seed: int) -> np.ndarray:
    rng = np.random.Generator(np.random.PCG64(seed))
    means = model._draw(rng, count * n).reshape(count, n).mean(axis=1)
    means.sort()
    # Hits at threshold x: samples with mean >= x.
    return count - np.searchsorted(means, xs, side="left")


def estimate_curve(model: Distribution, n: int, x_grid, samples: int, seed: int,
                   workers: int = 1) -> list[MCEstimate]:
    """One estimate per grid point from a single shared set of sample batches.

    Sharing batches forces the empirical curve to be monotone non-increasing
    and costs one pass regardless of the grid size.  The x grid must be
    strictly increasing.
    """
    xs = np.asarray([float(x) for x in x_grid])
    if xs.ndim != 1 or len(xs) == 0:
        raise DomainError("x_grid must be a non-empty 1-d sequence")
    if np.any(np.diff(xs) <= 0.0):
        raise DomainError("x_grid must be strictly increasing")
    if not (isinstance(n, (int, np.integer)) and n >= 1):
        raise DomainError(f"n must be an integer >= 1, got {n!r}")
    if samples < 1000:
        raise DomainError(f"samples must be >= 1000, got {samples!r}")

    counts = _chunk_counts(samples, n)
    tasks = [(c, derive_seed(seed, i)) for i, c in enumerate(counts)]
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            partials = list(pool.map(
                lambda t: _chunk_hits(model, n, xs, t[0], t[1]), tasks))
    else:
        partials = [_chunk_hits(model, n, xs, c, s) for c, s in tasks]
    hits = np.sum(partials, axis=0)

    out = []
    for x, h in zip(xs, hits):
        p = h / samples
        out.append(MCEstimate(
            p_hat=float(p),
            stderr=math.sqrt(p * (1.0 - p) / samples),
            samples=samples, seed=seed, n=int(n), x=float(x),
        ))
    return out


def estimate_tail_of_mean(model: Distribution, n: int, x: float, samples: int,
                          seed: int, workers: int = 1) -> MCEstimate:
    """Estimate Prob(mean of n draws >= x); a one-point curve."""
    return estimate_curve(model, n, [x], samples, seed, workers=workers)[0]
