"""Seeded instance ensembles with per-instance analyses and rank correlations."""

from __future__ import annotations

import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np
from scipy.stats import spearmanr

from .generators import GeneratorSpec, random_3sat_clauses
from .ising import InstanceError
from .landscape import census
from .lanczos import LanczosError
from .perturbative import RegimeError, estimate_gap
from .sat import sat_check
from .spectrum import min_gap_search

ANALYSES = ("gap", "estimate", "landscape", "sat")
DEFAULT_ANALYSES = ("gap", "estimate", "landscape")
COLUMNS = ["seed", "n", "status", "g_m", "s_star", "E12", "|S+|", "|S-|", "intersection",
           "intersection_ratio", "bound_ratio", "bound_holds", "low_far_count", "n_local",
           "satisfiable", "note"]
CORRELATIONS = [("low_far_count", "g_m"), ("n_local", "g_m"),
                ("intersection_ratio", "g_m"), ("bound_ratio", "g_m")]
WORKERS_ENV = "AQGAP_WORKERS"


def parse_n_range(text) -> list[int]:
    """``"8"`` -> [8]; ``"8-10"`` -> [8, 9, 10]; ``"6,8"`` -> [6, 8]."""
    if isinstance(text, int):
        return [text]
    out = []
    for part in str(text).split(","):
        lo, sep, hi = part.strip().partition("-")
        if sep:
            a, b = int(lo), int(hi)
            if b < a:
                raise ValueError(f"empty range {part!r}")
            out.extend(range(a, b + 1))
        else:
            out.append(int(lo))
    if not out or min(out) < 1:
        raise ValueError(f"bad qubit count {text!r}")
    return out


def env_workers(default: int = 1) -> int:
    raw = os.environ.get(WORKERS_ENV)
    if not raw:
        return default
    try:
        return max(1, int(raw))
    except ValueError:
        return default


_SIZE_KEY = {"spin-glass": "n", "marked": "n", "3sat": "n_vars", "weak-strong": "n_total"}


@dataclass(frozen=True)
class EnsembleSpec:
    family: str
    count: int
    n: tuple[int, ...]
    params: dict = field(default_factory=dict)
    seed: int = 0
    analyses: tuple[str, ...] = DEFAULT_ANALYSES
    delta: float | None = None
    eps0: str = "geom"

    def members(self) -> list[tuple[int, int]]:
        """(seed, n) per instance; sizes cycle through ``n``."""
        return [(self.seed + i, self.n[i % len(self.n)]) for i in range(self.count)]


def _analyse(spec: EnsembleSpec, seed: int, n: int) -> dict:
    row = {"seed": seed, "n": n, "status": "ok"}
    params = dict(spec.params)
    params[_SIZE_KEY[spec.family]] = n
    notes = []
    try:
        if "sat" in spec.analyses:
            if spec.family != "3sat":
                raise ValueError("the sat analysis needs the 3sat family")
            clauses = random_3sat_clauses(n, params["alpha"], seed)
            res = sat_check(clauses)
            row["satisfiable"] = res
            if not ({"gap", "estimate", "landscape"} & set(spec.analyses)):
                return row
        inst = GeneratorSpec(spec.family, params, seed).build()
        if "landscape" in spec.analyses:
            rep = census(inst)
            row["low_far_count"] = rep.low_far_count
            row["n_local"] = rep.n_local
        if "gap" in spec.analyses or "estimate" in spec.analyses:
            prof = min_gap_search(inst, workers=1)
            row.update(g_m=prof.g_min, s_star=prof.s_star, E12=prof.E12_star)
            if prof.multimodal:
                notes.append("multimodal")
            if "estimate" in spec.analyses:
                try:
                    est = estimate_gap(inst, prof, spec.delta, spec.eps0)
                except RegimeError as exc:
                    row["status"] = "refused"
                    notes.append(str(exc))
                else:
                    row.update({"|S+|": est.size_plus, "|S-|": est.size_minus,
                                "intersection": est.intersection,
                                "intersection_ratio": est.intersection_ratio,
                                "bound_ratio": est.bound_ratio,
                                "bound_holds": est.intersection_ratio <= est.bound_ratio + 1e-12})
                    if est.regime_note:
                        notes.append(est.regime_note)
    except LanczosError as exc:
        row["status"] = "solver-failure"
        notes.append(str(exc))
    except (InstanceError, RegimeError, ValueError) as exc:
        row["status"] = "error"
        notes.append(f"{type(exc).__name__}: {exc}")
    row["note"] = "; ".join(notes)
    return row


def _analyse_packed(args):
    return _analyse(*args)


def spearman(x, y) -> float:
    """Spearman rank correlation (average ranks for ties); nan when undefined."""
    x, y = np.asarray(x, float), np.asarray(y, float)
    if len(x) < 2 or np.all(x == x[0]) or np.all(y == y[0]):
        return math.nan
    return float(spearmanr(x, y).statistic)


def correlations(rows: list[dict]) -> dict:
    out = {}
    for a, b in CORRELATIONS:
        pairs = [(r[a], r[b]) for r in rows
                 if r.get(a) is not None and r.get(b) is not None
                 and not (isinstance(r[a], float) and math.isnan(r[a]))]
        key = f"spearman({a},{b})"
        rho = spearman(*zip(*pairs)) if len(pairs) >= 2 else math.nan
        out[key] = "undefined" if math.isnan(rho) else rho
        out[f"pairs({a},{b})"] = len(pairs)
    return out


def run_ensemble(spec: EnsembleSpec, workers: int | None = None) -> tuple[list[dict], dict]:
    """Analyse every member; returns (rows sorted by seed, correlation footer).

    Failures become rows with a non-``ok`` status. ``workers`` defaults to
    the ``AQGAP_WORKERS`` environment variable (1 if unset).
    """
    if spec.family not in _SIZE_KEY:
        raise ValueError(f"unknown family {spec.family!r}")
    bad = set(spec.analyses) - set(ANALYSES)
    if bad:
        raise ValueError(f"unknown analyses {sorted(bad)}")
    workers = env_workers() if workers is None else workers
    jobs = [(spec, seed, n) for seed, n in spec.members()]
    if workers > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            rows = list(pool.map(_analyse_packed, jobs))
    else:
        rows = [_analyse(*job) for job in jobs]
    rows.sort(key=lambda r: r["seed"])
    footer = {"count": len(rows), "ok": sum(r["status"] == "ok" for r in rows)}
    footer.update(correlations([r for r in rows if r["status"] in ("ok", "refused")]))
    return rows, footer
