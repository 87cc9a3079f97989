"""Two-state anticrossing model H = -(eps tau_z + g tau_x) / 2."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class TwoLevelModel:
    g: float
    E: float = 1.0
    s_star: float = 0.5

    def __post_init__(self):
        if not (self.g > 0 and self.E > 0):
            raise ValueError("TwoLevelModel needs g > 0 and E > 0")

    def eps(self, s):
        """eps = 2 E (s - s_star)."""
        return 2.0 * self.E * (np.asarray(s) - self.s_star)

    def gap_at(self, s):
        return np.hypot(self.eps(s), self.g)


def tl_matrix(m: TwoLevelModel, eps: float) -> np.ndarray:
    return -0.5 * np.array([[eps, m.g], [m.g, -eps]])


def tl_spectrum(m: TwoLevelModel, eps: float) -> tuple[float, np.ndarray]:
    """Gap sqrt(eps**2 + g**2) and the ground state (first component >= 0).

    The ground state is (cos(phi/2), sin(phi/2)) with phi = atan2(g, eps),
    so it moves from (0, 1) at eps -> -inf to (1, 0) at eps -> +inf.
    """
    phi = math.atan2(m.g, eps)
    ground = np.array([math.cos(phi / 2), math.sin(phi / 2)])
    return math.hypot(eps, m.g), ground


def tl_overlap_estimate(m: TwoLevelModel, eps0: float) -> float:
    """eps0 * |<psi(+eps0)|psi(-eps0)>|, which tends to g as eps0/g grows."""
    if eps0 <= 0:
        raise ValueError("eps0 must be positive")
    _, plus = tl_spectrum(m, eps0)
    _, minus = tl_spectrum(m, -eps0)
    return eps0 * abs(float(plus @ minus))
