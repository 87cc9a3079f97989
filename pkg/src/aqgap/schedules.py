"""Annealing schedules and statevector time evolution under H(s(t))."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sparse
from scipy.integrate import cumulative_trapezoid
from scipy.interpolate import PchipInterpolator

from .ising import ProblemInstance, apply_driver, ground_configs
from .spectrum import GapProfile

GLOBAL = "global"
LOCAL = "local"
MAX_EVOLVE_QUBITS = 14
NORM_DRIFT_LIMIT = 1e-6


class ScheduleError(ValueError):
    pass


@dataclass
class Schedule:
    """Piecewise-linear s(t) through ``knots`` (rows of (t, s))."""

    kind: str
    knots: np.ndarray
    t_f: float

    def s_at(self, t):
        return np.interp(t, self.knots[:, 0], self.knots[:, 1])


@dataclass
class EvolutionResult:
    t_f: float
    fidelity: float
    norm_drift: float
    steps: int
    dt: float
    trace: np.ndarray | None = field(default=None, repr=False)  # rows (t, s)
    states: list | None = field(default=None, repr=False)


def make_global(t_f: float) -> Schedule:
    """Linear ramp s = t / t_f."""
    if not t_f > 0:
        raise ScheduleError("t_f must be positive")
    return Schedule(GLOBAL, np.array([[0.0, 0.0], [t_f, 1.0]]), float(t_f))


def gap_interpolant(profile: GapProfile):
    s, g = profile.s, profile.gaps
    keep = np.concatenate(([True], np.diff(s) > 0))
    return PchipInterpolator(s[keep], g[keep])


def _fine_grid(profile: GapProfile, points: int) -> np.ndarray:
    """Uniform grid merged with points clustered around every sample and s_star."""
    base = np.linspace(0.0, 1.0, points)
    w = max(profile.g_min / (2 * max(profile.E_fit, 1e-12)), 1e-9)
    local = profile.s_star + w * np.sinh(np.linspace(-8, 8, 801))
    grid = np.concatenate((base, profile.s, local))
    grid = grid[(grid >= 0) & (grid <= 1)]
    return np.unique(grid)


def make_local(profile: GapProfile, t_f: float, points: int = 4001) -> Schedule:
    """Gap-adapted schedule with ds/dt = c g(s)**2, c fixed by the total time.

    Time spent in [s0, s1] is t_f * int_{s0}^{s1} g**-2 ds / int_0^1 g**-2 ds,
    with g interpolated monotonically between the profile samples.
    """
    if not t_f > 0:
        raise ScheduleError("t_f must be positive")
    if len(profile.samples) < 64:
        raise ScheduleError("local schedule needs a profile with at least 64 samples")
    if profile.s[0] > 0 or profile.s[-1] < 1:
        raise ScheduleError("profile must cover [0, 1]")
    if np.min(profile.gaps) < 1e-12:
        raise ScheduleError("gap profile vanishes numerically; local schedule undefined")
    s = _fine_grid(profile, points)
    g = gap_interpolant(profile)(s)
    g = np.maximum(g, profile.g_min)
    tau = cumulative_trapezoid(1.0 / g ** 2, s, initial=0.0)
    t = t_f * tau / tau[-1]
    t[-1] = t_f
    keep = np.concatenate(([True], np.diff(t) > 0))
    return Schedule(LOCAL, np.column_stack((t[keep], s[keep])), float(t_f))


def runtime_estimates(g_m: float) -> tuple[float, float]:
    """Scaling indicators (g_m**-2, g_m**-1) for global and local schedules."""
    if not g_m > 0:
        raise ValueError("g_m must be positive")
    return g_m ** -2, g_m ** -1


def driver_matrix(n: int) -> sparse.csr_matrix:
    """sum_i X_i as a sparse matrix (n * 2**n nonzeros)."""
    idx = np.arange(1 << n)
    cols = (idx[:, None] ^ (1 << np.arange(n))[None, :]).ravel()
    rows = np.repeat(idx, n)
    return sparse.csr_matrix((np.ones(rows.size), (rows, cols)), shape=(1 << n, 1 << n))


def default_dt(inst: ProblemInstance, t_f: float) -> float:
    norm = max(inst.n * 0.5 * inst.driver_scale, float(np.max(np.abs(inst.energies))))
    return min(1e-2 / norm, t_f / 1e4)


def evolve(inst: ProblemInstance, sched: Schedule, dt: float | None = None,
           record: int = 0) -> EvolutionResult:
    """Integrate i d psi/dt = H(s(t)) psi from the uniform superposition.

    Classical fourth-order Runge-Kutta with a fixed step (``dt`` defaults
    to min(0.01 / ||H||, t_f / 1e4)). Fidelity is the weight of the final
    state on the ground multiplet of H_P. ``record`` > 0 stores that many
    (t, s, psi) snapshots for diagnostics.
    """
    if inst.n > MAX_EVOLVE_QUBITS:
        raise ScheduleError(f"evolution limited to n <= {MAX_EVOLVE_QUBITS}")
    t_f = sched.t_f
    if dt is None:
        dt = default_dt(inst, t_f)
    steps = max(1, math.ceil(t_f / dt - 1e-9))
    h = t_f / steps
    n = inst.n
    # -i H(s) = (1 - s) * (i Delta / 2) X  +  s * (-i diag)
    if n <= 12:
        # sparse product beats the reshape loop below ~12 qubits
        Xc = (driver_matrix(n) * (0.5j * inst.driver_scale)).tocsr()
        drive = Xc.dot
    else:
        def drive(v):
            return (0.5j * inst.driver_scale) * apply_driver(v, n)
    diag_c = -1j * inst.energies

    def deriv(s: float, psi: np.ndarray) -> np.ndarray:
        out = drive(psi)
        out *= 1.0 - s
        out += (s * diag_c) * psi
        return out

    psi = np.full(inst.dim, 1 / math.sqrt(inst.dim), dtype=np.complex128)
    times = h * np.arange(steps + 1)
    s_nodes = sched.s_at(np.concatenate((times, times[:-1] + 0.5 * h)))
    s_full, s_half = s_nodes[: steps + 1], s_nodes[steps + 1:]
    snap_at = set(np.linspace(0, steps, record).round().astype(int)) if record else set()
    states = []
    tmp = np.empty_like(psi)
    for k in range(steps):
        if k in snap_at:
            states.append((times[k], s_full[k], psi.copy()))
        k1 = deriv(s_full[k], psi)
        np.multiply(k1, 0.5 * h, out=tmp)
        tmp += psi
        k2 = deriv(s_half[k], tmp)
        np.multiply(k2, 0.5 * h, out=tmp)
        tmp += psi
        k3 = deriv(s_half[k], tmp)
        np.multiply(k3, h, out=tmp)
        tmp += psi
        k4 = deriv(s_full[k + 1], tmp)
        # psi += h/6 (k1 + 2 k2 + 2 k3 + k4)
        k2 += k3
        k2 *= 2.0
        k1 += k4
        k1 += k2
        k1 *= h / 6.0
        psi += k1
    if steps in snap_at:
        states.append((times[-1], s_full[-1], psi.copy()))
    norm = float(np.vdot(psi, psi).real)
    drift = abs(math.sqrt(norm) - 1.0)
    if drift > NORM_DRIFT_LIMIT:
        raise ScheduleError(f"norm drift {drift:.3e} exceeds {NORM_DRIFT_LIMIT}; reduce dt")
    sols = ground_configs(inst)
    fidelity = float(np.sum(np.abs(psi[sols]) ** 2))
    trace = np.column_stack((times, s_full)) if record else None
    return EvolutionResult(t_f, fidelity, drift, steps, h, trace, states or None)


def minimal_time(inst: ProblemInstance, make_schedule, target: float = 0.5,
                 t_lo: float = 0.1, rel_tol: float = 0.01, dt: float | None = None,
                 t_max: float = 1e6) -> tuple[float, int]:
    """Smallest t_f with fidelity >= ``target``, by doubling then bisection in log t.

    ``make_schedule(t_f)`` builds the schedule. Assumes fidelity crosses the
    target once; returns (t_f, number of evolutions).
    """
    calls = 0

    def fid(t):
        nonlocal calls
        calls += 1
        return evolve(inst, make_schedule(t), dt).fidelity

    lo, hi = t_lo, t_lo
    while fid(hi) < target:
        lo, hi = hi, hi * 2
        if hi > t_max:
            raise ScheduleError(f"fidelity {target} not reached below t_f = {t_max}")
    if hi == t_lo:
        return hi, calls
    while hi / lo > 1 + rel_tol:
        mid = math.sqrt(lo * hi)
        if fid(mid) >= target:
            hi = mid
        else:
            lo = mid
    return hi, calls
