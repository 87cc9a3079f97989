"""Problem instances and the interpolated Hamiltonian.

H(s) = (1 - s) H_B + s H_P with

    H_B = -(Delta / 2) sum_i X_i
    H_P = -(E / 2) [sum_i h_i Z_i + sum_{i<j} J_ij Z_i Z_j]     (Ising kind)
    H_P = E * diag(energy)                                     (Diagonal kind)

Basis states are indexed by an integer bit mask ``z``. Bit ``i`` set means
qubit ``i`` has Z eigenvalue -1 (spin down); bit clear means spin +1.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from typing import Callable, Mapping

import numpy as np

ISING = "ising"
DIAGONAL = "diagonal"

MAX_DENSE_QUBITS = 12
MAX_ENUM_QUBITS = 24

# StateVector: 1-D numpy array of 2**n amplitudes indexed by bit mask.
StateVector = np.ndarray


class InstanceError(ValueError):
    """Malformed problem instance or out-of-range input."""


def _normalize_couplings(J: Mapping | None, n: int) -> dict[tuple[int, int], float]:
    out: dict[tuple[int, int], float] = {}
    for key, value in (J or {}).items():
        i, j = (int(k) for k in key)
        if i == j:
            raise InstanceError(f"diagonal coupling ({i},{j}) is not allowed")
        if not (0 <= i < n and 0 <= j < n):
            raise InstanceError(f"coupling ({i},{j}) out of range for n={n}")
        pair = (i, j) if i < j else (j, i)
        if pair in out:
            raise InstanceError(f"coupling {pair} given twice")
        value = float(value)
        if value != 0.0:
            out[pair] = value
    return dict(sorted(out.items()))


@dataclass(frozen=True, eq=False)
class ProblemInstance:
    """Final Hamiltonian plus driver scale.

    Use :meth:`ising` or :meth:`diagonal` to construct. Instances are
    immutable; derived arrays (the classical energy vector) are cached on
    first use.
    """

    n: int
    kind: str
    h: tuple[float, ...] = ()
    J: dict[tuple[int, int], float] = field(default_factory=dict)
    diag: np.ndarray | None = None
    energy_scale: float = 1.0
    driver_scale: float = 1.0
    source: dict | None = None

    def __post_init__(self):
        if int(self.n) != self.n or self.n < 1:
            raise InstanceError(f"n must be a positive integer, got {self.n!r}")
        if self.kind not in (ISING, DIAGONAL):
            raise InstanceError(f"unknown kind {self.kind!r}")
        if not (self.energy_scale > 0 and np.isfinite(self.energy_scale)):
            raise InstanceError("energy_scale must be positive")
        if not (self.driver_scale > 0 and np.isfinite(self.driver_scale)):
            raise InstanceError("driver_scale must be positive")
        if self.kind == ISING:
            if len(self.h) != self.n:
                raise InstanceError(f"h has length {len(self.h)}, expected {self.n}")
        else:
            if self.diag is None or self.diag.shape != (1 << self.n,):
                raise InstanceError(f"diagonal energies must have length 2**{self.n}")
            if not np.all(np.isfinite(self.diag)):
                raise InstanceError("diagonal energies must be finite")

    @classmethod
    def ising(cls, h, J: Mapping | None = None, energy_scale: float = 1.0,
              driver_scale: float = 1.0) -> "ProblemInstance":
        h = tuple(float(x) for x in h)
        return cls(n=len(h), kind=ISING, h=h, J=_normalize_couplings(J, len(h)),
                   energy_scale=float(energy_scale), driver_scale=float(driver_scale))

    @classmethod
    def diagonal(cls, n: int, energy: np.ndarray | Callable[[np.ndarray], np.ndarray],
                 energy_scale: float = 1.0, driver_scale: float = 1.0,
                 source: dict | None = None) -> "ProblemInstance":
        """Diagonal problem Hamiltonian ``E * energy(z)``.

        ``energy`` is either an explicit length-``2**n`` vector or a
        vectorized callable evaluated once on ``arange(2**n)``.
        """
        if n > MAX_ENUM_QUBITS:
            raise InstanceError(f"diagonal instances are limited to n <= {MAX_ENUM_QUBITS}")
        if callable(energy):
            energy = energy(np.arange(1 << n, dtype=np.int64))
        diag = np.array(energy, dtype=np.float64).reshape(-1)
        diag.setflags(write=False)
        return cls(n=int(n), kind=DIAGONAL, diag=diag, energy_scale=float(energy_scale),
                   driver_scale=float(driver_scale), source=source)

    @property
    def dim(self) -> int:
        return 1 << self.n

    @property
    def spin_flip_symmetric(self) -> bool:
        """True for Ising instances with all h_i = 0."""
        return self.kind == ISING and not any(self.h)

    @cached_property
    def energies(self) -> np.ndarray:
        """Classical energies <z|H_P|z> for every z, in energy units."""
        if self.n > MAX_ENUM_QUBITS:
            raise InstanceError(f"energy enumeration refused for n={self.n} > {MAX_ENUM_QUBITS}")
        if self.kind == DIAGONAL:
            out = self.energy_scale * self.diag
        else:
            z = np.arange(self.dim, dtype=np.int64)
            spins = [1.0 - 2.0 * ((z >> i) & 1) for i in range(self.n)]
            acc = np.zeros(self.dim)
            for i, hi in enumerate(self.h):
                if hi:
                    acc += hi * spins[i]
            for (i, j), v in self.J.items():
                acc += v * (spins[i] * spins[j])
            out = -0.5 * self.energy_scale * acc
        out = np.asarray(out, dtype=np.float64)
        out.setflags(write=False)
        return out

    def to_diagonal(self) -> "ProblemInstance":
        """Same final Hamiltonian expressed as an explicit energy vector."""
        return ProblemInstance.diagonal(self.n, self.energies / self.energy_scale,
                                        self.energy_scale, self.driver_scale)

    def with_scales(self, energy_scale: float | None = None,
                    driver_scale: float | None = None) -> "ProblemInstance":
        from dataclasses import replace
        return replace(self,
                       energy_scale=self.energy_scale if energy_scale is None else float(energy_scale),
                       driver_scale=self.driver_scale if driver_scale is None else float(driver_scale))

    def __eq__(self, other):
        if not isinstance(other, ProblemInstance):
            return NotImplemented
        if (self.n, self.kind, self.energy_scale, self.driver_scale) != (
                other.n, other.kind, other.energy_scale, other.driver_scale):
            return False
        if self.kind == ISING:
            return self.h == other.h and self.J == other.J
        return np.array_equal(self.diag, other.diag)

    __hash__ = None


def check_config(inst: ProblemInstance, z) -> int:
    zi = int(z)
    if zi != z or not 0 <= zi < inst.dim:
        raise InstanceError(f"configuration {z!r} out of range for n={inst.n}")
    return zi


def spins_of(z: int, n: int) -> np.ndarray:
    """Spin values (+1/-1) of configuration ``z``."""
    return 1 - 2 * ((int(z) >> np.arange(n)) & 1)


def classical_energy(inst: ProblemInstance, z) -> float:
    z = check_config(inst, z)
    if inst.kind == DIAGONAL:
        return float(inst.energy_scale * inst.diag[z])
    s = spins_of(z, inst.n)
    acc = float(np.dot(inst.h, s))
    for (i, j), v in inst.J.items():
        acc += v * s[i] * s[j]
    return -0.5 * inst.energy_scale * acc


def zeta(s: float, inst: ProblemInstance) -> float:
    """Ratio s E / ((1 - s) Delta); +inf at s = 1."""
    if s >= 1.0:
        return float("inf")
    return s * inst.energy_scale / ((1.0 - s) * inst.driver_scale)


def apply_driver(v: np.ndarray, n: int) -> np.ndarray:
    """sum_i X_i v, by flipping each bit of the index."""
    out = np.zeros_like(v)
    for i in range(n):
        view = v.reshape(-1, 2, 1 << i)
        out.reshape(-1, 2, 1 << i)[...] += view[:, ::-1, :]
    return out


def apply_hamiltonian(inst: ProblemInstance, s: float, v: np.ndarray) -> np.ndarray:
    """Matrix-free product H(s) v.

    ``s`` is normally in [0, 1]; the linear pencil is defined for any real
    ``s`` and callers that extrapolate (the overlap estimator) rely on it.
    """
    v = np.asarray(v)
    if v.shape != (inst.dim,):
        raise InstanceError(f"vector has shape {v.shape}, expected ({inst.dim},)")
    out = (-(1.0 - s) * 0.5 * inst.driver_scale) * apply_driver(v, inst.n)
    if s != 0.0:
        out += s * (inst.energies * v)
    return out


def build_dense(inst: ProblemInstance, s: float) -> np.ndarray:
    """Dense H(s) for testing; refused above 12 qubits."""
    if inst.n > MAX_DENSE_QUBITS:
        raise InstanceError(
            f"dense matrix refused for n={inst.n}; limit is {MAX_DENSE_QUBITS} qubits")
    dim = inst.dim
    H = np.zeros((dim, dim))
    idx = np.arange(dim)
    for i in range(inst.n):
        H[idx, idx ^ (1 << i)] = -(1.0 - s) * 0.5 * inst.driver_scale
    H[idx, idx] = s * inst.energies
    return H


def norm_estimate(inst: ProblemInstance, s: float) -> float:
    """Upper bound on ||H(s)||_2 from the triangle inequality."""
    e = inst.energies
    return abs(1.0 - s) * 0.5 * inst.driver_scale * inst.n + abs(s) * float(np.max(np.abs(e)))


def ground_configs(inst: ProblemInstance, tol: float | None = None) -> np.ndarray:
    """Global minima of H_P (configs within ``tol`` of the minimum energy)."""
    e = inst.energies
    if tol is None:
        tol = 1e-9 * inst.energy_scale
    return np.flatnonzero(e <= e.min() + tol)


def hamming_to_set(configs: np.ndarray, targets: np.ndarray) -> np.ndarray:
    """Minimum Hamming distance from each of ``configs`` to ``targets``."""
    configs = np.asarray(configs, dtype=np.int64)
    best = np.full(configs.shape, 64, dtype=np.int64)
    for f in np.asarray(targets, dtype=np.int64):
        np.minimum(best, np.bitwise_count(configs ^ f).astype(np.int64), out=best)
    return best
