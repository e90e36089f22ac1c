"""Seeded, splittable random streams and the distribution draws built on them.

Every random decision in the pipeline is drawn from an RngStream keyed by
(root_seed, sample_index). Streams for different sample indices come from a
keyed split of the counter-based Philox generator, never from sequential
consumption of a shared generator, so the draw sequence for one sample is a
pure function of its lineage. That is what makes outputs invariant to worker
count and scheduling order.

Distribution draws (normal, gamma, beta) are derived here from the stream's
uniforms rather than delegated to library samplers, so the exact consumption
order is owned by this module and stays stable.
"""

from __future__ import annotations

import math

import numpy as np

from .errors import ParameterError

_U64_MAX = 2**64 - 1


class RngStream:
    """One deterministic draw stream; owned by a single worker at a time."""

    __slots__ = ("root_seed", "sample_index", "_gen")

    def __init__(self, root_seed: int, sample_index: int):
        if not 0 <= root_seed <= _U64_MAX:
            raise ParameterError(f"root_seed must be a 64-bit unsigned int, got {root_seed}")
        if not 0 <= sample_index <= _U64_MAX:
            raise ParameterError(f"sample_index must be a 64-bit unsigned int, got {sample_index}")
        self.root_seed = root_seed
        self.sample_index = sample_index
        key = np.array([root_seed, sample_index], dtype=np.uint64)
        self._gen = np.random.Generator(np.random.Philox(key=key))

    def uniform(self) -> float:
        """Next uniform draw in [0, 1)."""
        return float(self._gen.random())

    def uniform_range(self, lo: float, hi: float) -> float:
        """Uniform draw in [lo, hi); always consumes exactly one underlying draw.

        A degenerate interval (lo == hi) returns lo, so stream consumption
        never depends on parameter values.
        """
        if lo > hi:
            raise ParameterError(f"uniform_range: lo {lo} > hi {hi}")
        u = self.uniform()
        if lo == hi:
            return lo
        value = lo + (hi - lo) * u
        if value >= hi:
            # guard against the product rounding up to the open endpoint
            value = math.nextafter(hi, lo)
        return value

    def randint_below(self, n: int) -> int:
        """Uniform integer in [0, n)."""
        if n < 1:
            raise ParameterError(f"randint_below: n must be >= 1, got {n}")
        return min(int(self.uniform() * n), n - 1)

    def normal(self) -> float:
        """Standard normal via Box-Muller; consumes exactly two uniforms."""
        u1 = 1.0 - self.uniform()  # (0, 1], keeps log finite
        u2 = self.uniform()
        return math.sqrt(-2.0 * math.log(u1)) * math.cos(2.0 * math.pi * u2)

    def gamma(self, shape: float) -> float:
        """Gamma(shape, 1) draw, valid for any shape > 0.

        Shape >= 1 uses Marsaglia-Tsang squeeze rejection; shape < 1 uses the
        boost Gamma(shape) = Gamma(shape + 1) * U^(1/shape), which stays
        correct for shapes far below 1.
        """
        if shape <= 0.0:
            raise ParameterError(f"gamma: shape must be > 0, got {shape}")
        if shape < 1.0:
            boost = self.gamma(shape + 1.0)
            u = self.uniform()
            return boost * (u ** (1.0 / shape))
        d = shape - 1.0 / 3.0
        c = 1.0 / (3.0 * math.sqrt(d))
        while True:
            x = self.normal()
            v = 1.0 + c * x
            if v <= 0.0:
                continue
            v = v * v * v
            u = self.uniform()
            if u < 1.0 - 0.0331 * x * x * x * x:
                return d * v
            if math.log(u) < 0.5 * x * x + d * (1.0 - v + math.log(v)):
                return d * v

    def beta(self, alpha: float) -> float:
        """Symmetric Beta(alpha, alpha) draw in [0, 1] via two gamma draws."""
        if alpha <= 0.0:
            raise ParameterError(f"beta: alpha must be > 0, got {alpha}")
        g1 = self.gamma(alpha)
        g2 = self.gamma(alpha)
        total = g1 + g2
        if total == 0.0:
            # both gammas underflowed (probability ~1e-50 even at alpha=0.08)
            return 0.5
        return g1 / total

    def shuffled_indices(self, n: int) -> list[int]:
        """Uniformly random permutation of range(n) by Fisher-Yates."""
        if n < 1:
            raise ParameterError(f"shuffled_indices: n must be >= 1, got {n}")
        order = list(range(n))
        for i in range(n - 1, 0, -1):
            j = self.randint_below(i + 1)
            order[i], order[j] = order[j], order[i]
        return order


def split(root_seed: int, sample_index: int) -> RngStream:
    """Derive the stream for one sample index from the root seed."""
    return RngStream(root_seed, sample_index)


def sample_beta(stream: RngStream, alpha: float) -> float:
    return stream.beta(alpha)


def sample_uniform_range(stream: RngStream, lo: float, hi: float) -> float:
    return stream.uniform_range(lo, hi)


def beta_variance(alpha: float) -> float:
    """Closed-form variance of Beta(alpha, alpha): 1 / (4 * (2*alpha + 1))."""
    return 1.0 / (4.0 * (2.0 * alpha + 1.0))
