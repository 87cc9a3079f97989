"""Support sets S+/S- around the anticrossing and the gap estimates built on them.

S+ is read off the ground state just after the anticrossing and S- just
before it, as the configurations with amplitude above ``delta``. Their
perturbative predictions are a union of Hamming balls around the solutions
(S+) and a low-energy cut of the problem spectrum (S-).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .ising import (MAX_ENUM_QUBITS, InstanceError, ProblemInstance, ground_configs,
                    hamming_to_set, zeta)
from .spectrum import GapProfile, ground_state

AMPLITUDE = "amplitude-threshold"
HAMMING = "hamming-ball"
ENERGY = "energy-cut"

# Energy-cut constant: output of calibrate_energy_constant(reference_family())
# on the default grid. Only instances with zeta- < 1 inform the fit; tests
# re-run it.
DEFAULT_C_E = 31.622777
CONTAINMENT = 0.8


class RegimeError(ValueError):
    """Inputs fall outside the first-order, separated-anticrossing regime."""


@dataclass
class SupportSet:
    members: np.ndarray  # sorted configuration indices
    provenance: str
    params: dict = field(default_factory=dict)

    def __len__(self) -> int:
        return len(self.members)

    def __contains__(self, z) -> bool:
        i = np.searchsorted(self.members, z)
        return bool(i < len(self.members) and self.members[i] == z)

    @property
    def empty(self) -> bool:
        return len(self.members) == 0

    def intersection(self, other: "SupportSet") -> np.ndarray:
        return np.intersect1d(self.members, other.members, assume_unique=True)


def default_delta(n: int) -> float:
    """1 / (2 sqrt(N)): below the amplitude of any member of a flat superposition."""
    return 0.5 / math.sqrt(1 << n)


def support_from_state(v: np.ndarray, delta: float, s: float | None = None) -> SupportSet:
    """S = {z : |a_z| > delta}."""
    if not 0 < delta < 1:
        raise ValueError("delta must lie in (0, 1)")
    members = np.flatnonzero(np.abs(v) > delta).astype(np.int64)
    return SupportSet(members, AMPLITUDE, {"delta": delta, "s": s})


def _need_enum(inst: ProblemInstance) -> None:
    if inst.n > MAX_ENUM_QUBITS:
        raise InstanceError(f"enumeration refused for n={inst.n} > {MAX_ENUM_QUBITS}")


def s_plus_hamming(inst: ProblemInstance, m_c: int) -> SupportSet:
    """Configurations strictly closer than ``m_c`` flips to some global minimum."""
    if m_c < 1:
        raise ValueError("m_c must be >= 1")
    _need_enum(inst)
    sols = ground_configs(inst)
    dist = hamming_to_set(np.arange(inst.dim), sols)
    return SupportSet(np.flatnonzero(dist < m_c).astype(np.int64), HAMMING,
                      {"m_c": int(m_c), "solutions": [int(f) for f in sols]})


def s_minus_energy(inst: ProblemInstance, E_c: float) -> SupportSet:
    """Configurations less than ``E_c`` above the ground energy."""
    _need_enum(inst)
    e = inst.energies
    members = np.flatnonzero(e - e.min() < E_c).astype(np.int64)
    return SupportSet(members, ENERGY, {"E_c": float(E_c)})


def cutoffs_from_zeta(zeta_plus: float, zeta_minus: float, delta: float,
                      energy_scale: float = 1.0, c_E: float = DEFAULT_C_E):
    """(m_c, w_c, E_c) from the values of zeta on either side of the crossing.

    m_c = ceil(log(1/delta) / log zeta+), w_c = ceil(2 log(1/delta) / log(1/zeta-)),
    E_c = c_E * energy_scale * log(1/zeta-) / log(1/delta).
    """
    if not zeta_plus > 1:
        raise RegimeError(f"zeta+ = {zeta_plus:.4g} must exceed 1")
    if not 0 < zeta_minus < 1:
        raise RegimeError(f"zeta- = {zeta_minus:.4g} must lie in (0, 1)")
    L = math.log(1 / delta)
    # shave rounding noise so exact ratios do not ceil up
    m_c = max(1, math.ceil(L / math.log(zeta_plus) - 1e-9))
    w_c = max(1, math.ceil(2 * L / math.log(1 / zeta_minus) - 1e-9))
    E_c = c_E * energy_scale * math.log(1 / zeta_minus) / L
    return m_c, w_c, E_c


def thresholds(inst: ProblemInstance, s_star: float, eps0: float, delta: float,
               E_fit: float, c_E: float = DEFAULT_C_E):
    """Cutoffs evaluated at s = s_star +/- eps0 / (2 E_fit)."""
    ds = eps0 / (2 * E_fit)
    hi, lo = s_star + ds, s_star - ds
    z_plus = zeta(hi, inst) if hi < 1 else math.inf
    z_minus = zeta(lo, inst) if lo >= 0 else -1.0
    return cutoffs_from_zeta(z_plus, z_minus, delta, inst.energy_scale, c_E)


def choose_eps0(g_m: float, E12: float, policy="geom") -> float:
    """Offset eps0 between the minimum gap and the next level spacing.

    ``"geom"``: sqrt(g_m * E12) clamped to [3 g_m, E12 / 3], the lower bound
    winning when the window is narrow; 10 g_m when no third level exists.
    A number (or ``"fixed:<v>"``) is used as is.
    """
    if isinstance(policy, str) and policy.startswith("fixed:"):
        policy = float(policy.split(":", 1)[1])
    if not isinstance(policy, str):
        eps0 = float(policy)
        if eps0 <= 0:
            raise ValueError("fixed eps0 must be positive")
        return eps0
    if policy != "geom":
        raise ValueError(f"unknown eps0 policy {policy!r}")
    if math.isinf(E12):
        return 10.0 * g_m
    eps0 = min(math.sqrt(g_m * E12), E12 / 3)
    return max(eps0, 3.0 * g_m)


@dataclass
class GapEstimate:
    s_star: float
    exact_gm: float
    eps0: float
    overlap: float
    overlap_estimate: float
    s_plus: SupportSet
    s_minus: SupportSet
    intersection: int
    intersection_ratio: float
    bound_ratio: float
    m_c: int | None = None
    w_c: int | None = None
    E_c: float | None = None
    separated: bool = True
    extrapolated: bool = False
    regime_note: str = ""

    @property
    def size_plus(self) -> int:
        return len(self.s_plus)

    @property
    def size_minus(self) -> int:
        return len(self.s_minus)


def set_ratios(s_plus: SupportSet, s_minus: SupportSet) -> tuple[int, float, float]:
    """(|S+ & S-|, |S+ & S-| / sqrt(|S+||S-|), sqrt(|S+|/|S-|))."""
    a, b = len(s_plus), len(s_minus)
    inter = len(s_plus.intersection(s_minus))
    if a == 0 or b == 0:
        return inter, math.nan, math.nan
    return inter, inter / math.sqrt(a * b), math.sqrt(a / b)


def estimate_gap(inst: ProblemInstance, profile: GapProfile, delta: float | None = None,
                 eps0_policy="geom", c_E: float = DEFAULT_C_E) -> GapEstimate:
    """Overlap and set-cardinality estimates of the minimum gap.

    Ground states are taken at s_star +/- eps0 / (2 E_fit). When those points
    leave [0, 1] (wide anticrossings on very small systems) the linear pencil
    H(s) is evaluated outside the physical range and ``extrapolated`` is set.
    """
    g_m, E12 = profile.g_min, profile.E12_star
    if not g_m < E12:
        raise RegimeError(
            f"minimum gap {g_m:.4g} is not below E12 = {E12:.4g}: not a two-level anticrossing")
    if g_m <= 0:
        raise RegimeError("minimum gap vanishes; the ground state is degenerate")
    if delta is None:
        delta = default_delta(inst.n)
    eps0 = choose_eps0(g_m, E12, eps0_policy)
    ds = eps0 / (2 * profile.E_fit)
    s_hi, s_lo = profile.s_star + ds, profile.s_star - ds
    psi_plus = ground_state(inst, s_hi).amplitudes
    psi_minus = ground_state(inst, s_lo).amplitudes
    overlap = abs(np.vdot(psi_plus, psi_minus))
    sp = support_from_state(psi_plus, delta, s_hi)
    sm = support_from_state(psi_minus, delta, s_lo)
    inter, ratio, bound = set_ratios(sp, sm)

    est = GapEstimate(
        s_star=profile.s_star, exact_gm=g_m, eps0=eps0, overlap=float(overlap),
        overlap_estimate=float(eps0 * overlap), s_plus=sp, s_minus=sm, intersection=inter,
        intersection_ratio=ratio, bound_ratio=bound, separated=g_m < E12 / 4,
        extrapolated=not (0.0 <= s_lo and s_hi <= 1.0),
    )
    try:
        est.m_c, est.w_c, est.E_c = thresholds(inst, profile.s_star, eps0, delta,
                                               profile.E_fit, c_E)
    except RegimeError as exc:
        est.regime_note = str(exc)
    return est


# -- empirical checks of the two set characterizations ------------------------

def containment(inner: SupportSet, outer: SupportSet) -> float:
    """Fraction of ``inner`` that lies in ``outer`` (1.0 for empty ``inner``)."""
    if inner.empty:
        return 1.0
    return len(inner.intersection(outer)) / len(inner)


def jaccard(a: SupportSet, b: SupportSet) -> float:
    union = len(np.union1d(a.members, b.members))
    return len(a.intersection(b)) / union if union else 1.0


def smallest_hamming_cover(inst: ProblemInstance, s: SupportSet,
                           fraction: float = CONTAINMENT) -> tuple[int, SupportSet]:
    """Smallest m_c whose Hamming-ball union holds ``fraction`` of ``s``."""
    for m in range(1, inst.n + 2):
        ball = s_plus_hamming(inst, m)
        if containment(s, ball) >= fraction:
            return m, ball
    raise AssertionError("the radius n + 1 ball covers everything")


def smallest_energy_cover(inst: ProblemInstance, s: SupportSet,
                          fraction: float = CONTAINMENT) -> tuple[float, SupportSet]:
    """Smallest energy cut holding ``fraction`` of ``s``."""
    e = inst.energies
    rel = np.sort(e[s.members] - e.min())
    if len(rel) == 0:
        return 0.0, s_minus_energy(inst, 0.0)
    k = max(1, math.ceil(fraction * len(rel) - 1e-12))
    E_c = float(np.nextafter(rel[k - 1], np.inf))
    return E_c, s_minus_energy(inst, E_c)


def reference_family(count: int = 20, n: int = 8):
    """Random spin glasses used to calibrate the energy-cut constant."""
    from .generators import gen_spin_glass
    return [gen_spin_glass(n, "grid", "uniform", 0.1, seed=1000 + i) for i in range(count)]


def calibration_grid() -> np.ndarray:
    """241 log-spaced values from 1e-2 to 1e4, rounded to 6 decimals."""
    return np.round(np.logspace(-2, 4, 241), 6)


def calibrate_energy_constant(instances, c_grid=None, delta: float | None = None,
                              profiles=None) -> tuple[float, dict]:
    """Pick c_E maximizing mean Jaccard overlap of S- with its energy cut.

    Ties go to the smallest constant.

    Instances whose crossing is not bracketed by zeta- < 1 contribute
    nothing. Returns (c_E, diagnostics).
    """
    from .spectrum import min_gap_search

    if c_grid is None:
        c_grid = calibration_grid()
    rows = []
    for k, inst in enumerate(instances):
        prof = profiles[k] if profiles is not None else min_gap_search(inst)
        d = default_delta(inst.n) if delta is None else delta
        try:
            est = estimate_gap(inst, prof, d)
        except RegimeError:
            continue
        ds = est.eps0 / (2 * prof.E_fit)
        lo = prof.s_star - ds
        if not 0 < lo or zeta(lo, inst) >= 1:
            continue
        base = math.log(1 / zeta(lo, inst)) / math.log(1 / d) * inst.energy_scale
        rows.append([jaccard(est.s_minus, s_minus_energy(inst, c * base)) for c in c_grid])
    if not rows:
        raise RegimeError("no reference instance has zeta- < 1")
    mean = np.mean(rows, axis=0)
    best = int(np.argmax(mean))
    return float(c_grid[best]), {"used": len(rows), "mean_jaccard": float(mean[best]),
                                 "curve": dict(zip(map(float, c_grid), map(float, mean)))}
