"""Counter-based random streams and exact base points.

A base point of the expanding circle map ``theta -> d theta mod 1`` is
carried as its base-``d`` digit string.  Iterating the map shifts the
string, so an orbit of length ``n`` stays exact as long as ``n + L`` digits
are available, where ``L`` digits fill one double.  Floating-point
iteration would instead collapse to 0 after about 52 / log2(d) steps.

Every sample ``index`` under a ``seed`` owns an independent Philox stream,
so results never depend on how samples are split between workers.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

# stream purposes; each gets its own counter block
PURPOSE = {
    "census": 1,
    "escape-near": 2,
    "escape-mid": 3,
    "long-range": 4,
    "situations": 5,
    "b2": 6,
    "b1": 7,
    "curves": 8,
    "intervals": 9,
    "elements": 10,
}

SEED_MAX = 2 ** 64


def check_seed(seed) -> int:
    seed = int(seed)
    if not 0 <= seed < SEED_MAX:
        raise ValueError(f"seed must be a 64-bit unsigned integer, got {seed}")
    return seed


def stream(seed: int, index: int, purpose: str = "census") -> np.random.Generator:
    """Generator keyed by (seed, index) and positioned by purpose."""
    key = np.array([check_seed(seed), int(index)], dtype=np.uint64)
    counter = np.array([PURPOSE[purpose], 0, 0, 0], dtype=np.uint64)
    return np.random.Generator(np.random.Philox(key=key, counter=counter))


def window_digits(d: int) -> int:
    """Digits per double: largest L with d**L <= 2**53."""
    return int(math.floor(53 / math.log2(d) + 1e-12))


@dataclass(frozen=True)
class BasePoint:
    """theta = sum digits[i] * d**-(i+1)."""

    d: int
    digits: np.ndarray

    @property
    def theta(self) -> float:
        L = min(window_digits(self.d), len(self.digits))
        w = 0
        for k in range(L):
            w = w * self.d + int(self.digits[k])
        return w / self.d ** L

    def horizon(self) -> int:
        """Number of exact iterates available."""
        return max(0, len(self.digits) - window_digits(self.d))

    @classmethod
    def random(cls, rng: np.random.Generator, d: int, steps: int) -> "BasePoint":
        n = steps + window_digits(d) + 1
        return cls(d, rng.integers(0, d, size=n, dtype=np.int64))

    @classmethod
    def from_float(cls, theta: float, d: int, steps: int, rng: np.random.Generator = None) -> "BasePoint":
        """Digits of a float.

        Without ``rng`` the expansion is exact (padded with zeros).  With it,
        only the digits the float resolves are kept and the tail is random.
        """
        n = steps + window_digits(d) + 1
        f = Fraction(float(theta)) % 1
        lead = n if rng is None else window_digits(d)
        digits = np.zeros(n, dtype=np.int64)
        for i in range(min(lead, n)):
            f *= d
            q = int(f)
            digits[i] = q
            f -= q
            if f == 0:
                break
        if rng is not None and n > lead:
            digits[lead:] = rng.integers(0, d, size=n - lead, dtype=np.int64)
        return cls(d, digits)


def base_point(theta, d: int, steps: int) -> BasePoint:
    """Coerce a float or BasePoint to a BasePoint long enough for ``steps``."""
    if isinstance(theta, BasePoint):
        if theta.d != d:
            raise ValueError(f"base point has digit base {theta.d}, map has {d}")
        if theta.horizon() < steps:
            raise ValueError(f"base point supports {theta.horizon()} iterates, {steps} requested")
        return theta
    return BasePoint.from_float(theta, d, steps)

