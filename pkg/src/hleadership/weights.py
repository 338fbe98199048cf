"""Authorship-position leadership weight.

The weight is a complementary Gaussian of unit peak height, lifted onto a
floor::

    d = min(x, n - x + 1)
    w = floor + amplitude * (1 - exp(-(d - mu)**2 / (2 * sigma**2)))   if d <= mu
    w = floor                                                          otherwise

With ``mu=50, sigma=15, floor=0.3`` position 5 gets 0.99222 and every
position at distance 50 or more from both ends gets exactly 0.3. Only ``d``
enters the formula, so two papers with different author counts give the same
weight to the same effective position.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import PositionOutOfRange

DEFAULT_MU = 50.0
DEFAULT_SIGMA = 15.0
DEFAULT_FLOOR = 0.3


@dataclass(frozen=True)
class WeightParams:
    mu: float = DEFAULT_MU
    sigma: float = DEFAULT_SIGMA
    floor: float = DEFAULT_FLOOR

    def __post_init__(self):
        if self.mu <= 0:
            raise ValueError("mu must be positive")
        if self.sigma <= 0:
            raise ValueError("sigma must be positive")
        if not 0.0 < self.floor < 1.0:
            raise ValueError("floor must lie in (0, 1)")

    @property
    def amplitude(self) -> float:
        return 1.0 - self.floor


DEFAULT_PARAMS = WeightParams()


def effective_position(x: int, n: int) -> int:
    """Distance of 1-indexed slot ``x`` to the nearer end of an ``n``-author list."""
    if n < 1 or x < 1 or x > n:
        raise PositionOutOfRange(f"position {x} outside 1..{n}")
    return min(x, n - x + 1)


def leadership_weight(x: int, n: int, params: WeightParams = DEFAULT_PARAMS) -> float:
    d = effective_position(x, n)
    if d > params.mu:
        return params.floor
    gauss = math.exp(-((d - params.mu) ** 2) / (2.0 * params.sigma * params.sigma))
    return params.floor + params.amplitude * (1.0 - gauss)
