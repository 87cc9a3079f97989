"""Seeded instance families: spin glasses, weak-strong domains, 3-SAT, marked state."""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field

import numpy as np

from . import sat
from .ising import InstanceError, ProblemInstance, ground_configs
from .landscape import flip_cost, local_minimum_mask

FAMILIES = ("spin-glass", "weak-strong", "3sat", "marked")


class GeneratorWarning(UserWarning):
    pass


# -- graphs -----------------------------------------------------------------

def ring_graph(n: int) -> list[tuple[int, int]]:
    if n < 2:
        return []
    if n == 2:
        return [(0, 1)]
    return sorted(tuple(sorted((i, (i + 1) % n))) for i in range(n))


def grid_graph(n: int) -> list[tuple[int, int]]:
    """Open-boundary rows x cols grid with rows the largest divisor <= sqrt(n)."""
    rows = max(r for r in range(1, int(np.sqrt(n)) + 1) if n % r == 0)
    cols = n // rows
    edges = []
    for r in range(rows):
        for c in range(cols):
            q = r * cols + c
            if c + 1 < cols:
                edges.append((q, q + 1))
            if r + 1 < rows:
                edges.append((q, q + cols))
    return sorted(edges)


def complete_graph(n: int) -> list[tuple[int, int]]:
    return [(i, j) for i in range(n) for j in range(i + 1, n)]


GRAPHS = {"ring": ring_graph, "grid": grid_graph, "complete": complete_graph}


def _rng(seed: int) -> np.random.Generator:
    return np.random.default_rng(np.uint64(seed % (1 << 64)))


def _gauge(h: list[float], J: dict, rng: np.random.Generator):
    """Random spin relabelling s_i -> t_i s_i; leaves the spectrum unchanged."""
    t = rng.choice([-1.0, 1.0], size=len(h))
    h = [float(t[i] * hi) for i, hi in enumerate(h)]
    J = {(i, j): float(t[i] * t[j] * v) for (i, j), v in J.items()}
    return h, J


# -- families ---------------------------------------------------------------

def gen_spin_glass(n: int, graph=None, J_dist: str = "uniform", h_scale: float = 0.1,
                   seed: int = 0, energy_scale: float = 1.0,
                   driver_scale: float = 1.0) -> ProblemInstance:
    """Random couplings on the edges of ``graph`` and fields in [-h_scale, h_scale].

    ``graph`` is an edge list or one of ``"ring"``, ``"grid"``, ``"complete"``
    (default ``"grid"``). ``J_dist`` is ``"pm1"`` for +/-1 couplings or
    ``"uniform"`` for couplings uniform in [-1, 1].
    """
    if graph is None or isinstance(graph, str):
        graph = GRAPHS[graph or "grid"](n)
    edges = [tuple(sorted((int(i), int(j)))) for i, j in graph]
    if len(set(edges)) != len(edges) or any(i == j for i, j in edges):
        raise InstanceError("graph must be simple")
    rng = _rng(seed)
    if J_dist in ("pm1", "±1"):
        vals = rng.choice([-1.0, 1.0], size=len(edges))
    elif J_dist == "uniform":
        vals = rng.uniform(-1.0, 1.0, size=len(edges))
    else:
        raise ValueError(f"unknown J_dist {J_dist!r}")
    h = rng.uniform(-h_scale, h_scale, size=n) if h_scale > 0 else np.zeros(n)
    return ProblemInstance.ising(h, dict(zip(edges, vals)), energy_scale, driver_scale)


def weak_strong_layout(n_domains: int, domain_size: int, partners: bool):
    """Qubit indices of each domain and of each domain's partner qubits."""
    domains = [list(range(d * domain_size, (d + 1) * domain_size)) for d in range(n_domains)]
    base = n_domains * domain_size
    partner_sets = ([[base + q for q in dom] for dom in domains] if partners
                    else [[] for _ in domains])
    return domains, partner_sets


def gen_weak_strong(n_domains: int, domain_size: int, J_intra: float = 2.0,
                    J_inter: float = 0.2, h_bias: float = 0.1, seed: int = 0,
                    partner_coupling: float = 0.0, n_total: int | None = None,
                    gauge: bool = True, energy_scale: float = 1.0,
                    driver_scale: float = 1.0) -> ProblemInstance:
    """Strongly coupled ferromagnetic domains with weak couplings between them.

    Each domain is a ferromagnetic ring (a single bond for two qubits) of
    strength ``J_intra``; every qubit carries bias ``h_bias``; qubit ``q`` of
    domain ``d`` couples to qubit ``q`` of domain ``d + 1`` with ``J_inter``.

    With ``partner_coupling = w > 0`` every domain qubit gets a weak partner
    qubit with field ``w`` and coupling ``-w`` to it. The partner feels zero
    net field while its domain is aligned with ``h_bias`` and field ``2w``
    otherwise, so for ``w > h_bias`` the global minimum has the domains
    opposed to the bias, and the bias-aligned domain states become
    ``2**domain_size``-fold degenerate low-energy local minima at Hamming
    distance >= ``domain_size``.

    ``n_total`` pads with uncoupled spectator qubits of unit field (their gap
    never drops below 1/sqrt(2) for unit scales). The ``seed`` selects a
    random spin relabelling when ``gauge`` is set.
    """
    partners = partner_coupling > 0
    n_core = n_domains * domain_size * (2 if partners else 1)
    n = n_core if n_total is None else int(n_total)
    if n_domains < 1 or domain_size < 1:
        raise InstanceError("need at least one domain of size >= 1")
    if n < n_core:
        raise InstanceError(f"n_total={n} smaller than the {n_core} domain qubits")
    if n > 24:
        raise InstanceError("weak-strong instances are limited to 24 qubits")
    domains, partner_sets = weak_strong_layout(n_domains, domain_size, partners)

    h = [0.0] * n
    J: dict[tuple[int, int], float] = {}
    for dom in domains:
        for q in dom:
            h[q] = h_bias
        for a, b in ring_graph(domain_size):
            J[(dom[a], dom[b])] = J_intra
    for d in range(n_domains - 1):
        for q0, q1 in zip(domains[d], domains[d + 1]):
            if J_inter:
                J[(q0, q1)] = J_inter
    for dom, ps in zip(domains, partner_sets):
        for q, p in zip(dom, ps):
            h[p] = partner_coupling
            J[(q, p)] = -partner_coupling
    for q in range(n_core, n):
        h[q] = 1.0
    if gauge:
        h, J = _gauge(h, J, _rng(seed))
    inst = ProblemInstance.ising(h, J, energy_scale, driver_scale)
    _check_domain_minima(inst, domains)
    return inst


def _check_domain_minima(inst: ProblemInstance, domains) -> None:
    if inst.n > 20 or len(domains[0]) < 2:
        return
    is_min, _ = local_minimum_mask(inst)
    f = int(ground_configs(inst)[0])
    for dom in domains:
        mask = sum(1 << q for q in dom)
        if not is_min[f ^ mask]:
            warnings.warn(
                f"flipping domain {dom} from the ground state does not give a local "
                f"minimum (flip cost {flip_cost(inst, dom, f):.4g})", GeneratorWarning,
                stacklevel=3)


def gen_3sat(n_vars: int, alpha: float, seed: int = 0, energy_scale: float = 1.0,
             driver_scale: float = 1.0) -> tuple[ProblemInstance, list[sat.Clause]]:
    """Random 3-SAT with round(alpha * n_vars) clauses; energy = violated clauses."""
    if n_vars > 24:
        raise InstanceError("3-SAT instances are limited to 24 variables")
    clauses = random_3sat_clauses(n_vars, alpha, seed)
    return sat_instance(n_vars, clauses, energy_scale, driver_scale), clauses


def random_3sat_clauses(n_vars: int, alpha: float, seed: int = 0) -> list[sat.Clause]:
    """Clause list only; usable beyond the 24-variable enumeration limit."""
    m = int(round(alpha * n_vars))
    return sat.random_3sat(n_vars, m, _rng(seed))


def sat_instance(n_vars: int, clauses, energy_scale: float = 1.0,
                 driver_scale: float = 1.0) -> ProblemInstance:
    clauses = [tuple(int(l) for l in c) for c in clauses]
    energy = sat.violated_counts(clauses, n_vars).astype(float)
    return ProblemInstance.diagonal(
        n_vars, energy, energy_scale, driver_scale,
        source={"generator": "3sat", "clauses": [list(c) for c in clauses]})


def gen_marked(n: int, seed: int = 0, marked: int | None = None, energy_scale: float = 1.0,
               driver_scale: float = 1.0) -> ProblemInstance:
    """Energy 0 on one marked configuration and 1 everywhere else."""
    if marked is None:
        marked = int(_rng(seed).integers(0, 1 << n))
    return marked_instance(n, marked, energy_scale, driver_scale)


def marked_instance(n: int, marked: int, energy_scale: float = 1.0,
                    driver_scale: float = 1.0) -> ProblemInstance:
    if not 0 <= marked < (1 << n):
        raise InstanceError(f"marked configuration {marked} out of range")
    energy = np.ones(1 << n)
    energy[marked] = 0.0
    return ProblemInstance.diagonal(n, energy, energy_scale, driver_scale,
                                    source={"generator": "marked", "marked": int(marked)})


@dataclass(frozen=True)
class GeneratorSpec:
    """Family name, family parameters and seed; ``build`` is deterministic."""

    family: str
    params: dict = field(default_factory=dict)
    seed: int = 0

    def build(self) -> ProblemInstance:
        p = dict(self.params)
        if self.family == "spin-glass":
            return gen_spin_glass(seed=self.seed, **p)
        if self.family == "weak-strong":
            return gen_weak_strong(seed=self.seed, **p)
        if self.family == "3sat":
            return gen_3sat(seed=self.seed, **p)[0]
        if self.family == "marked":
            return gen_marked(seed=self.seed, **p)
        raise ValueError(f"unknown family {self.family!r}; expected one of {FAMILIES}")
