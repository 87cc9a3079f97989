"""Exact spectral gaps and perturbative gap estimates for adiabatic optimization."""

from __future__ import annotations

__version__ = "0.1.0"

from .ising import InstanceError, ProblemInstance, apply_hamiltonian, build_dense, zeta
from .spectrum import GapProfile, gap, ground_state, lowest_eigs, min_gap_search
from .two_level import TwoLevelModel, tl_overlap_estimate, tl_spectrum
from .perturbative import GapEstimate, RegimeError, SupportSet, estimate_gap
from .landscape import LandscapeReport, census
from .generators import GeneratorSpec, gen_3sat, gen_marked, gen_spin_glass, gen_weak_strong
from .schedules import evolve, make_global, make_local, minimal_time
from .io import read_instance, write_instance

__all__ = [
    "InstanceError", "ProblemInstance", "apply_hamiltonian", "build_dense", "zeta",
    "GapProfile", "gap", "ground_state", "lowest_eigs", "min_gap_search",
    "TwoLevelModel", "tl_overlap_estimate", "tl_spectrum",
    "GapEstimate", "RegimeError", "SupportSet", "estimate_gap",
    "LandscapeReport", "census",
    "GeneratorSpec", "gen_3sat", "gen_marked", "gen_spin_glass", "gen_weak_strong",
    "evolve", "make_global", "make_local", "minimal_time",
    "read_instance", "write_instance",
]
