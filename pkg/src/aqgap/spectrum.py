"""Low-lying spectrum of H(s), gaps, and the minimum-gap search."""

from __future__ import annotations

import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np
from scipy.optimize import least_squares

from .ising import ProblemInstance, apply_hamiltonian, norm_estimate
from .lanczos import DEFAULT_SEED, LanczosError, lanczos_lowest

MAX_LEVELS = 16
RESIDUAL_TOL = 1e-10
DEGENERACY_TOL = 1e-9  # in units of the problem energy scale
INV_PHI = (math.sqrt(5) - 1) / 2

__all__ = [
    "EigenResult", "GapProfile", "GroundState", "LanczosError",
    "lowest_eigs", "gap", "min_gap_search", "ground_state", "scan",
]


@dataclass
class EigenResult:
    s: float
    values: np.ndarray
    vectors: np.ndarray  # shape (2**n, k), columns are eigenvectors
    residuals: np.ndarray


class GroundState(NamedTuple):
    amplitudes: np.ndarray
    energy: float
    degeneracy: int


@dataclass
class GapProfile:
    """Sampled gap along the interpolation plus the located anticrossing.

    ``samples`` has columns (s, gap, E12) sorted by s. ``E_fit`` is the slope
    scale in eps = 2 E (s - s_star), fitted to the two-level hyperbola near
    the minimum. ``candidates`` lists every refined local minimum as
    (s, gap); more than one means ``multimodal``.
    """

    samples: np.ndarray
    s_star: float
    g_min: float
    E12_star: float
    E_fit: float
    ground_degeneracy_at_1: int
    candidates: list[tuple[float, float]] = field(default_factory=list)
    multimodal: bool = False
    spin_flip_symmetric: bool = False

    @property
    def s(self) -> np.ndarray:
        return self.samples[:, 0]

    @property
    def gaps(self) -> np.ndarray:
        return self.samples[:, 1]


def _check_k(inst: ProblemInstance, k: int) -> None:
    if not 1 <= k <= min(inst.dim, MAX_LEVELS):
        raise ValueError(f"k={k} must be in [1, {min(inst.dim, MAX_LEVELS)}]")


def lowest_eigs(inst: ProblemInstance, s: float, k: int, seed: int = DEFAULT_SEED) -> EigenResult:
    """The ``k`` lowest eigenpairs of H(s) by Lanczos.

    At s == 1 the Hamiltonian is diagonal and the result is read off the
    sorted classical energies (ties broken by configuration index).
    """
    _check_k(inst, k)
    if s == 1.0:
        order = np.argsort(inst.energies, kind="stable")[:k]
        vecs = np.zeros((inst.dim, k))
        vecs[order, np.arange(k)] = 1.0
        return EigenResult(s, inst.energies[order].copy(), vecs, np.zeros(k))
    scale = max(1.0, norm_estimate(inst, s))
    res = lanczos_lowest(lambda v: apply_hamiltonian(inst, s, v), inst.dim, k,
                         tol=RESIDUAL_TOL * scale, seed=seed)
    return EigenResult(s, res.values, res.vectors, res.residuals)


def _degeneracy(values: np.ndarray, tol: float) -> int:
    return int(np.sum(values - values[0] <= tol))


def levels(inst: ProblemInstance, s: float) -> tuple[np.ndarray, int]:
    """Enough low levels to resolve the ground multiplet plus two more.

    Returns (values, d) with d the ground degeneracy. May return fewer than
    d + 2 values when the Hilbert space is too small.
    """
    tol = DEGENERACY_TOL * inst.energy_scale
    limit = min(inst.dim, MAX_LEVELS)
    k = min(3, limit)
    while True:
        vals = lowest_eigs(inst, s, k).values
        d = _degeneracy(vals, tol)
        if d + 2 <= k or k == limit:
            return vals, d
        k = min(limit, d + 2)


def _gap_from_levels(vals: np.ndarray, d: int) -> tuple[float, float]:
    if d >= len(vals):
        return 0.0, math.inf
    g = float(vals[d] - vals[0])
    e12 = float(vals[d + 1] - vals[d]) if d + 1 < len(vals) else math.inf
    return max(g, 0.0), max(e12, 0.0)


def gap(inst: ProblemInstance, s: float) -> tuple[float, float]:
    """(g, E12): distance from the ground multiplet to the next level, and
    from that level to the one above it (inf when it does not exist)."""
    vals, d = levels(inst, s)
    return _gap_from_levels(vals, d)


def ground_state(inst: ProblemInstance, s: float) -> GroundState:
    """Lowest eigenvector with its largest-magnitude amplitude real positive."""
    tol = DEGENERACY_TOL * inst.energy_scale
    k = min(2, inst.dim)
    res = lowest_eigs(inst, s, k)
    d = _degeneracy(res.values, tol)
    if d == k and k < inst.dim:
        vals, d = levels(inst, s)
    v = res.vectors[:, 0].astype(np.complex128)
    j = int(np.argmax(np.abs(v)))
    v *= np.conj(v[j]) / abs(v[j])
    v /= np.linalg.norm(v)
    return GroundState(v, float(res.values[0]), d)


def _gap_task(args):
    inst, s = args
    return gap(inst, s)


def _workers() -> int:
    try:
        return max(1, int(os.environ.get("AQGAP_WORKERS", "1")))
    except ValueError:
        return 1


def scan(inst: ProblemInstance, s_values, workers: int | None = None) -> np.ndarray:
    """Gap and E12 at each s; rows (s, g, E12) in input order."""
    s_values = [float(x) for x in s_values]
    workers = _workers() if workers is None else workers
    if workers > 1 and len(s_values) > 1:
        with ProcessPoolExecutor(workers) as pool:
            results = list(pool.map(_gap_task, [(inst, s) for s in s_values]))
    else:
        results = [gap(inst, s) for s in s_values]
    return np.array([(s, g, e) for s, (g, e) in zip(s_values, results)], dtype=float)


def golden_section(f, a: float, b: float, tol: float, cache: dict):
    """Minimize unimodal ``f`` on [a, b] to bracket width ``tol``.

    Every evaluation is stored in ``cache`` (s -> value)."""

    def ev(x):
        if x not in cache:
            cache[x] = f(x)
        return cache[x]

    c = b - INV_PHI * (b - a)
    d = a + INV_PHI * (b - a)
    fc, fd = ev(c), ev(d)
    while b - a > tol:
        if fc <= fd:
            b, d, fd = d, c, fc
            c = b - INV_PHI * (b - a)
            fc = ev(c)
        else:
            a, c, fc = c, d, fd
            d = a + INV_PHI * (b - a)
            fd = ev(d)
    # endpoints are candidates too: the minimum may sit on the boundary of [0, 1]
    pts = {x: ev(x) for x in (a, b)}
    pts[c], pts[d] = fc, fd
    x = min(pts, key=lambda t: (pts[t], t))
    return x, pts[x]


def _fit_slope(s_star: float, g_min: float, s: np.ndarray, g: np.ndarray,
               guess: float) -> float:
    """Least-squares E in g(s) ~ sqrt((2 E (s - s*))**2 + g_min**2)."""
    ds = s - s_star
    mask = ds != 0
    if not np.any(mask):
        return guess

    def resid(p):
        return np.sqrt((2 * p[0] * ds[mask]) ** 2 + g_min ** 2) - g[mask]

    sol = least_squares(resid, x0=[max(guess, 1e-12)], bounds=([0.0], [np.inf]))
    return float(sol.x[0])


def _slope_guess(s_star: float, g_min: float, s: np.ndarray, g: np.ndarray) -> float:
    ds = np.abs(s - s_star)
    ok = (ds > 0) & (g > g_min)
    if not np.any(ok):
        return 1.0
    j = np.flatnonzero(ok)[np.argmin(ds[ok])]
    return float(np.sqrt(g[j] ** 2 - g_min ** 2) / (2 * ds[j]))


def min_gap_search(inst: ProblemInstance, grid_points: int = 64, s_tol: float = 1e-6,
                   workers: int | None = None) -> GapProfile:
    """Coarse scan of g(s) on [0, 1] followed by golden-section refinement.

    Every coarse local minimum within a factor two of the smallest sample is
    refined; the global one becomes ``s_star``. After refinement the
    anticrossing is sampled at offsets proportional to its estimated width
    and E is fitted on the ten samples nearest ``s_star``.
    """
    if grid_points < 16:
        raise ValueError("grid_points must be at least 16")
    grid = np.linspace(0.0, 1.0, grid_points)
    coarse = scan(inst, grid, workers)
    cache = {float(s): (g, e) for s, g, e in coarse}
    g = coarse[:, 1]
    gmin_coarse = g.min()

    idx = [i for i in range(grid_points)
           if (i == 0 or g[i] <= g[i - 1]) and (i == grid_points - 1 or g[i] <= g[i + 1])]
    idx = [i for i in idx if g[i] <= 2 * gmin_coarse]
    # a plateau produces adjacent indices; keep the first of each run
    idx = [i for k, i in enumerate(idx) if k == 0 or i != idx[k - 1] + 1]

    def f(x):
        if x not in cache:
            cache[x] = gap(inst, x)
        return cache[x][0]

    fcache: dict[float, float] = {}
    candidates = []
    for i in idx:
        a, b = grid[max(i - 1, 0)], grid[min(i + 1, grid_points - 1)]
        x, gx = golden_section(f, float(a), float(b), s_tol, fcache)
        candidates.append((float(x), float(gx)))
    candidates.sort(key=lambda c: (c[1], c[0]))
    s_star, g_min = candidates[0]

    # golden-section points hug s_star and carry no slope information
    E_guess = _slope_guess(s_star, g_min, grid, g)
    width = g_min / (2 * E_guess) if E_guess > 0 else s_tol
    width = max(width, 10 * s_tol)
    probe = []
    for mult in (0.5, 1.0, 2.0, 4.0, 8.0):
        for sign in (-1.0, 1.0):
            x = float(s_star + sign * mult * width)
            if 0.0 <= x <= 1.0 and x != s_star:
                f(x)
                probe.append(x)
    if len(probe) < 10:
        rest = sorted((x for x in grid if float(x) not in probe and x != s_star),
                      key=lambda x: abs(x - s_star))
        probe += [float(x) for x in rest[:10 - len(probe)]]
    fit_s = np.array(probe)
    fit_g = np.array([cache[x][0] for x in probe])
    E_fit = _fit_slope(s_star, g_min, fit_s, fit_g, E_guess)
    samples = np.array(sorted((s, v[0], v[1]) for s, v in cache.items()))
    E12_star = cache[s_star][1]

    final = levels(inst, 1.0)
    return GapProfile(
        samples=samples, s_star=s_star, g_min=g_min, E12_star=E12_star, E_fit=E_fit,
        ground_degeneracy_at_1=final[1], candidates=candidates,
        multimodal=len(candidates) > 1, spin_flip_symmetric=inst.spin_flip_symmetric,
    )
