"""One-step solvable variant with closed-form group-size densities.

Start from i.i.d. Bernoulli(p) one-element groups on an even torus. The
content of every even cell hops to a uniformly random odd neighbor
(left or right, probability 1/2 each) and merges there; after this
single step no group has occupied neighbors, so the system is steady.
An odd cell then holds the sum of one, two, or three of the original
Bernoulli variables with probabilities 1/4, 1/2, 1/4, which gives the
closed forms

    Q_1(p) = (8p - 10p^2 + 3p^3) / 8
    Q_2(p) = (5p^2 - 3p^3) / 8
    Q_3(p) = p^3 / 8

normalized per cell over the whole torus. Q_1 + 2 Q_2 + 3 Q_3 = p holds
identically (mass conservation in expectation).
"""

from __future__ import annotations

from dataclasses import dataclass
from math import comb, isclose

import numpy as np

from .lattice import LatticeState, TorusShape
from .montecarlo import GroupHistogram, measure


@dataclass(frozen=True)
class ReceiveProbabilities:
    """Chance that an odd cell ends up holding 1, 2, or 3 of the variables.

    The cell always keeps its own variable; each of the two even
    neighbors arrives independently with probability 1/2.
    """

    s1: float = 0.25
    s2: float = 0.5
    s3: float = 0.25

    def __post_init__(self):
        if not isclose(self.s1 + self.s2 + self.s3, 1.0, abs_tol=1e-12):
            raise ValueError("receive probabilities must sum to 1")

    def group_density(self, r: int, p: float) -> float:
        """Density of r-element groups via the binomial mixture (no closed form).

        Half the cells are odd; an odd cell holding n variables contains an
        r-group with binomial probability C(n, r) p^r (1-p)^(n-r).
        """
        weights = (self.s1, self.s2, self.s3)
        total = 0.0
        for n, s in zip((1, 2, 3), weights):
            if r <= n:
                total += s * comb(n, r) * p**r * (1.0 - p) ** (n - r)
        return total / 2.0


RECEIVE_PROBABILITIES = ReceiveProbabilities()


@dataclass(frozen=True)
class PrimitiveDensities:
    """The three closed-form densities evaluated at one p."""

    p: float
    q1: float
    q2: float
    q3: float

    def as_tuple(self) -> tuple[float, float, float]:
        return (self.q1, self.q2, self.q3)

    def expected_mass_density(self) -> float:
        """q1 + 2 q2 + 3 q3; identically equal to p."""
        return self.q1 + 2.0 * self.q2 + 3.0 * self.q3


def analytic_densities(p: float) -> PrimitiveDensities:
    """Evaluate the closed-form densities; p must lie in [0, 1]."""
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"p must be in [0, 1], got {p}")
    q1 = p * (8.0 + p * (-10.0 + 3.0 * p)) / 8.0
    q2 = p * p * (5.0 - 3.0 * p) / 8.0
    q3 = p**3 / 8.0
    return PrimitiveDensities(p=p, q1=q1, q2=q2, q3=q3)


def simulate_primitive(m: int, p: float, seed: int) -> GroupHistogram:
    """One stochastic realization of the one-step model on an even torus.

    Draws the Bernoulli field, hops every even cell's content to a random
    odd neighbor, merges, and histograms the resulting group sizes over
    all m cells. Even cells always end empty and no group exceeds size 3.
    """
    if m % 2 != 0 or m < 4:
        raise ValueError(f"torus size must be even and >= 4, got {m}")
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"p must be in [0, 1], got {p}")
    rng = np.random.default_rng(seed)
    occupancy = (rng.random(m) < p).astype(np.int64)
    # one direction per even cell, -1 or +1 with probability 1/2 each;
    # empty even cells hop vacuously
    hops = rng.integers(0, 2, size=m // 2) * 2 - 1
    final = np.zeros(m, dtype=np.int64)
    final[1::2] = occupancy[1::2]
    targets = (np.arange(0, m, 2) + hops) % m
    np.add.at(final, targets, occupancy[0::2])
    return measure(LatticeState(TorusShape((m,)), final))
