"""Dimension bookkeeping for the two-layer space R^{d1} x R^{d2}."""

from __future__ import annotations

from dataclasses import dataclass


@dataclass(frozen=True)
class Dims:
    """The layer dimensions (d1, d2) and the derived dimensional constants.

    * ``total_dim``       -- d1 + d2, the topological dimension.
    * ``homogeneous_dim`` -- d1 + 2*d2, governs ball-volume doubling.
    * ``volume_dim``      -- max(d1 + d2, 2*d2), the larger volume branch.
    * ``threshold_dim``   -- min(volume_dim, d1 + d2 + 1), enters the
      smoothness thresholds in the non-Banach regions.
    """

    d1: int
    d2: int

    def __post_init__(self):
        if int(self.d1) != self.d1 or int(self.d2) != self.d2:
            raise ValueError("d1, d2 must be integers")
        if self.d1 < 1 or self.d2 < 1:
            raise ValueError(f"d1, d2 must be >= 1, got ({self.d1}, {self.d2})")

    @property
    def total_dim(self) -> int:
        return self.d1 + self.d2

    @property
    def homogeneous_dim(self) -> int:
        return self.d1 + 2 * self.d2

    @property
    def volume_dim(self) -> int:
        return max(self.d1 + self.d2, 2 * self.d2)

    @property
    def threshold_dim(self) -> int:
        return min(self.volume_dim, self.d1 + self.d2 + 1)
