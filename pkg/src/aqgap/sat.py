"""Random 3-SAT clauses, violated-clause energies, and a DPLL checker.

Clauses use DIMACS literals: ``+v`` is variable ``v - 1`` true, ``-v`` its
negation. Variable ``i`` is true in assignment ``z`` when bit ``i`` is set.
"""

from __future__ import annotations

import time

import numpy as np

Clause = tuple[int, ...]


class SatTimeout(RuntimeError):
    pass


def violated_counts(clauses, n_vars: int, z: np.ndarray | None = None) -> np.ndarray:
    """Number of clauses violated by each assignment in ``z`` (default: all)."""
    if z is None:
        z = np.arange(1 << n_vars, dtype=np.int64)
    z = np.asarray(z, dtype=np.int64)
    count = np.zeros(z.shape, dtype=np.int64)
    for clause in clauses:
        sat = np.zeros(z.shape, dtype=bool)
        for lit in clause:
            bit = (z >> (abs(lit) - 1)) & 1
            sat |= (bit == 1) if lit > 0 else (bit == 0)
        count += ~sat
    return count


def random_3sat(n_vars: int, n_clauses: int, rng: np.random.Generator) -> list[Clause]:
    """Clauses drawn independently; three distinct variables, random signs."""
    if n_vars < 3:
        raise ValueError("3-SAT needs at least 3 variables")
    clauses = []
    for _ in range(n_clauses):
        vars_ = rng.choice(n_vars, size=3, replace=False) + 1
        signs = rng.integers(0, 2, size=3) * 2 - 1
        clauses.append(tuple(int(v * s) for v, s in zip(vars_, signs)))
    return clauses


def brute_force_sat(clauses, n_vars: int) -> bool:
    if not clauses:
        return True
    return bool(np.any(violated_counts(clauses, n_vars) == 0))


def sat_check(clauses, timeout: float | None = None) -> bool | None:
    """DPLL with unit propagation and pure-literal elimination.

    Returns True/False, or None when ``timeout`` seconds elapse first.
    """
    clauses = [frozenset(c) for c in clauses]
    if any(len(c) == 0 for c in clauses):
        return False
    deadline = None if timeout is None else time.monotonic() + timeout
    try:
        return _dpll(clauses, deadline)
    except SatTimeout:
        return None


def _simplify(clauses, lit):
    out = []
    for c in clauses:
        if lit in c:
            continue
        if -lit in c:
            c = c - {-lit}
            if not c:
                return None
        out.append(c)
    return out


def _dpll(clauses, deadline) -> bool:
    if deadline is not None and time.monotonic() > deadline:
        raise SatTimeout
    while True:
        unit = next((c for c in clauses if len(c) == 1), None)
        if unit is None:
            break
        clauses = _simplify(clauses, next(iter(unit)))
        if clauses is None:
            return False
    if not clauses:
        return True
    lits = set().union(*clauses)
    pure = [l for l in lits if -l not in lits]
    for l in pure:
        clauses = _simplify(clauses, l)
    if not clauses:
        return True
    # branch on the most frequent variable in the shortest clauses
    shortest = min(len(c) for c in clauses)
    counts: dict[int, int] = {}
    for c in clauses:
        if len(c) == shortest:
            for l in c:
                counts[l] = counts.get(l, 0) + 1
    lit = max(counts, key=lambda l: (counts[l], -abs(l), l))
    for choice in (lit, -lit):
        reduced = _simplify(clauses, choice)
        if reduced is not None and _dpll(reduced, deadline):
            return True
    return False


def to_dimacs(clauses, n_vars: int) -> str:
    lines = [f"p cnf {n_vars} {len(clauses)}"]
    lines += [" ".join(str(l) for l in c) + " 0" for c in clauses]
    return "\n".join(lines) + "\n"


def from_dimacs(text: str) -> tuple[int, list[Clause]]:
    n_vars, clauses, current = 0, [], []
    for line in text.splitlines():
        line = line.strip()
        if not line or line.startswith("c"):
            continue
        if line.startswith("p"):
            n_vars = int(line.split()[2])
            continue
        for tok in line.split():
            v = int(tok)
            if v == 0:
                clauses.append(tuple(current))
                current = []
            else:
                current.append(v)
    return n_vars, clauses
