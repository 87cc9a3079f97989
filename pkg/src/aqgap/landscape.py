"""Exhaustive census of classical local minima."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .ising import (MAX_ENUM_QUBITS, InstanceError, ProblemInstance, check_config,
                    classical_energy, ground_configs, hamming_to_set)

TIE_TOL = 1e-9  # relative to the energy scale


@dataclass
class LandscapeReport:
    """Local minima of H_P with their energies and distances to the solutions.

    A local minimum has no single-flip neighbour with strictly lower energy;
    ``plateau`` marks minima that have a neighbour of equal energy.
    ``energies`` are absolute; ``counts``/``bin_edges`` histogram them
    relative to ``global_energy``.
    """

    n: int
    global_minima: np.ndarray
    global_energy: float
    configs: np.ndarray
    energies: np.ndarray
    distances: np.ndarray
    plateau: np.ndarray
    counts: np.ndarray
    bin_edges: np.ndarray
    E_band: float
    d_band: int
    low_far_count: int

    @property
    def local_minima(self) -> list[tuple[int, float, int]]:
        return [(int(z), float(e), int(d))
                for z, e, d in zip(self.configs, self.energies, self.distances)]

    @property
    def n_local(self) -> int:
        return len(self.configs)


def _neighbour_min(e: np.ndarray, n: int) -> np.ndarray:
    """Lowest single-flip neighbour energy of every configuration."""
    z = np.arange(e.size, dtype=np.int64)
    low = np.full(e.size, np.inf)
    for i in range(n):
        np.minimum(low, e[z ^ (1 << i)], out=low)
    return low


def local_minimum_mask(inst: ProblemInstance, tol: float | None = None):
    """Boolean masks (is_local_min, on_plateau) over all configurations."""
    if tol is None:
        tol = TIE_TOL * inst.energy_scale
    e = inst.energies
    low = _neighbour_min(e, inst.n)
    is_min = e <= low + tol
    plateau = is_min & (np.abs(low - e) <= tol)
    return is_min, plateau


def default_bands(inst: ProblemInstance) -> tuple[float, int]:
    e = inst.energies
    return 0.1 * float(e.max() - e.min()), inst.n // 4


def census(inst: ProblemInstance, E_band: float | None = None, d_band: int | None = None,
           bins: int = 10) -> LandscapeReport:
    """Enumerate every local minimum of the problem Hamiltonian.

    ``low_far_count`` counts local minima lying less than ``E_band`` above
    the ground energy and more than ``d_band`` flips from every solution.
    Defaults: 10% of the spectral width and n // 4.
    """
    if inst.n > MAX_ENUM_QUBITS:
        raise InstanceError(f"census refused for n={inst.n} > {MAX_ENUM_QUBITS}")
    dE, dd = default_bands(inst)
    E_band = dE if E_band is None else float(E_band)
    d_band = dd if d_band is None else int(d_band)
    tol = TIE_TOL * inst.energy_scale

    e = inst.energies
    is_min, plateau = local_minimum_mask(inst, tol)
    configs = np.flatnonzero(is_min)
    energies = e[configs]
    order = np.lexsort((configs, energies))
    configs, energies = configs[order], energies[order]
    sols = ground_configs(inst, tol)
    e0 = float(e.min())
    dist = hamming_to_set(configs, sols)

    rel = energies - e0
    top = max(float(rel.max()), tol)
    counts, edges = np.histogram(rel, bins=bins, range=(0.0, top))
    low_far = int(np.sum((rel < E_band) & (dist > d_band)))
    return LandscapeReport(
        n=inst.n, global_minima=sols, global_energy=e0, configs=configs,
        energies=energies, distances=dist, plateau=plateau[configs], counts=counts,
        bin_edges=edges, E_band=E_band, d_band=d_band, low_far_count=low_far,
    )


def local_minima_by_sweep(inst: ProblemInstance, tol: float | None = None) -> np.ndarray:
    """Local minima found by sweeping configurations in ascending energy.

    A configuration is a local minimum unless some neighbour visited
    strictly earlier has strictly lower energy. Kept independent of
    :func:`census` so the two can check each other.
    """
    if tol is None:
        tol = TIE_TOL * inst.energy_scale
    e = inst.energies
    order = np.argsort(e, kind="stable")
    seen = np.zeros(e.size, dtype=bool)
    minima = []
    for z in order:
        z = int(z)
        lower = False
        for i in range(inst.n):
            y = z ^ (1 << i)
            if seen[y] and e[y] < e[z] - tol:
                lower = True
                break
        if not lower:
            minima.append(z)
        seen[z] = True
    return np.array(sorted(minima), dtype=np.int64)


def flip_cost(inst: ProblemInstance, subset, z) -> float:
    """Energy change from flipping every qubit in ``subset`` starting at ``z``."""
    subset = list(subset)
    if not subset:
        raise ValueError("subset must be non-empty")
    z = check_config(inst, z)
    mask = 0
    for i in subset:
        if not 0 <= i < inst.n:
            raise InstanceError(f"qubit {i} out of range")
        mask |= 1 << int(i)
    return classical_energy(inst, z ^ mask) - classical_energy(inst, z)
