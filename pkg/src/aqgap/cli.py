"""Command-line entry point: ``aqgap <subcommand> [flags]``.

Exit codes: 0 success, 2 usage error, 3 malformed instance file, 4 refused
regime or size limit, 5 eigensolver failure, 1 anything else.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .ensemble import ANALYSES, COLUMNS, DEFAULT_ANALYSES, EnsembleSpec, env_workers, \
    parse_n_range, run_ensemble
from .generators import FAMILIES, GRAPHS, gen_3sat, gen_marked, gen_spin_glass, gen_weak_strong
from .io import InstanceFormatError, RunManifest, instance_hash, read_instance, write_csv, \
    write_instance
from .ising import InstanceError, ground_configs
from .landscape import census
from .lanczos import LanczosError
from .perturbative import RegimeError, estimate_gap
from .sat import to_dimacs
from .schedules import GLOBAL, LOCAL, ScheduleError, evolve, make_global, make_local, \
    minimal_time
from .spectrum import ground_state, lowest_eigs, min_gap_search

EXIT_OK = 0
EXIT_INTERNAL = 1
EXIT_USAGE = 2
EXIT_INSTANCE = 3
EXIT_REGIME = 4
EXIT_SOLVER = 5


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


# -- flag groups --------------------------------------------------------------

def _add_family_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--family", required=True, choices=FAMILIES)
    g = p.add_argument_group("spin-glass")
    g.add_argument("--graph", default="grid", choices=sorted(GRAPHS))
    g.add_argument("--jdist", default="uniform", choices=["uniform", "pm1"])
    g.add_argument("--hscale", type=float, default=0.1)
    g = p.add_argument_group("weak-strong")
    g.add_argument("--domains", type=int, default=2)
    g.add_argument("--domain-size", type=int, default=3)
    g.add_argument("--j-intra", type=float, default=2.0)
    g.add_argument("--j-inter", type=float, default=0.2)
    g.add_argument("--h-bias", type=float, default=0.1)
    g.add_argument("--partner", type=float, default=0.0,
                   help="partner-qubit coupling w (0 disables partners)")
    g = p.add_argument_group("3sat")
    g.add_argument("--alpha", type=float, default=4.2)
    g = p.add_argument_group("marked")
    g.add_argument("--marked", type=int, default=None)
    p.add_argument("--energy-scale", type=float, default=1.0)
    p.add_argument("--driver-scale", type=float, default=1.0)


def _family_params(a) -> dict:
    scales = {"energy_scale": a.energy_scale, "driver_scale": a.driver_scale}
    if a.family == "spin-glass":
        return {"graph": a.graph, "J_dist": a.jdist, "h_scale": a.hscale, **scales}
    if a.family == "weak-strong":
        return {"n_domains": a.domains, "domain_size": a.domain_size, "J_intra": a.j_intra,
                "J_inter": a.j_inter, "h_bias": a.h_bias, "partner_coupling": a.partner,
                **scales}
    if a.family == "3sat":
        return {"alpha": a.alpha, **scales}
    return {"marked": a.marked, **scales}


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="aqgap", description="Spectral gaps of adiabatic optimization Hamiltonians.")
    p.add_argument("--version", action="version", version=f"aqgap {__version__}")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    g = sub.add_parser("generate", help="write a seeded random instance file")
    _add_family_flags(g)
    g.add_argument("--n", type=int, default=None,
                   help="qubits (variables for 3sat; total qubits for weak-strong)")
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--out", required=True)

    g = sub.add_parser("gap-scan", help="lowest levels and gap along s")
    g.add_argument("--instance", required=True)
    g.add_argument("--grid", type=int, default=64)
    g.add_argument("--stol", type=float, default=1e-6)
    g.add_argument("--levels", type=int, default=3)
    g.add_argument("--out", required=True)

    g = sub.add_parser("estimate", help="perturbative gap estimate at the anticrossing")
    g.add_argument("--instance", required=True)
    g.add_argument("--delta", type=float, default=None)
    g.add_argument("--eps0", default="geom", help="geom or fixed:<value>")
    g.add_argument("--grid", type=int, default=64)
    g.add_argument("--stol", type=float, default=1e-6)
    g.add_argument("--out", required=True)

    g = sub.add_parser("landscape", help="census of classical local minima")
    g.add_argument("--instance", required=True)
    g.add_argument("--eband", type=float, default=None)
    g.add_argument("--dband", type=int, default=None)
    g.add_argument("--out", required=True,
                   help="*.csv for a table of minima; 'report' or '-' prints a summary, "
                        "any other path receives the summary")

    g = sub.add_parser("schedule", help="evolve under a global or gap-adapted schedule")
    g.add_argument("--instance", required=True)
    g.add_argument("--kind", choices=[GLOBAL, LOCAL], default=GLOBAL)
    t = g.add_mutually_exclusive_group(required=True)
    t.add_argument("--tf", type=float)
    t.add_argument("--target-fidelity", type=float)
    g.add_argument("--points", type=int, default=101, help="rows in the output trace")
    g.add_argument("--dt", type=float, default=None)
    g.add_argument("--out", required=True)

    g = sub.add_parser("ensemble", help="analyse a seeded family of instances")
    _add_family_flags(g)
    g.add_argument("--count", type=int, required=True)
    g.add_argument("--n", required=True, help="qubit count, range '8-10' or list '6,8'")
    g.add_argument("--seed", type=int, default=0, help="seed of the first instance")
    g.add_argument("--analyses", default=",".join(DEFAULT_ANALYSES),
                   help=f"comma list from {','.join(ANALYSES)}")
    g.add_argument("--delta", type=float, default=None)
    g.add_argument("--eps0", default="geom")
    g.add_argument("--workers", type=int, default=None,
                   help="process count (default: AQGAP_WORKERS or 1)")
    g.add_argument("--out", required=True)
    return p


# -- subcommands ---------------------------------------------------------------

def _manifest(argv, insts=(), seeds=(), **extra) -> RunManifest:
    return RunManifest(command=["aqgap", *argv], seeds=list(seeds),
                       instance_hashes=[instance_hash(i) for i in insts], extra=extra)


def cmd_generate(a, argv) -> int:
    params = _family_params(a)
    if a.family == "spin-glass":
        inst = gen_spin_glass(_need_n(a), seed=a.seed, **params)
    elif a.family == "weak-strong":
        inst = gen_weak_strong(seed=a.seed, n_total=a.n, **params)
    elif a.family == "3sat":
        inst, clauses = gen_3sat(_need_n(a), seed=a.seed, **params)
        Path(a.out).with_suffix(".cnf").write_text(to_dimacs(clauses, inst.n), encoding="utf-8")
    else:
        inst = gen_marked(_need_n(a), seed=a.seed, **params)
    write_instance(inst, a.out)
    return EXIT_OK


def _need_n(a) -> int:
    if a.n is None:
        raise UsageError(f"--n is required for family {a.family}")
    if a.n < 1:
        raise UsageError("--n must be positive")
    return a.n


def cmd_gap_scan(a, argv) -> int:
    inst = read_instance(a.instance)
    if a.levels < 2:
        raise UsageError("--levels must be at least 2")
    prof = min_gap_search(inst, a.grid, a.stol)
    k = min(a.levels, inst.dim)
    cols = ["s", *[f"lambda{i}" for i in range(k)], "gap", "E12"]
    rows = []
    for s, g, e12 in prof.samples:
        vals = lowest_eigs(inst, float(s), k).values
        rows.append([float(s), *vals.tolist(), float(g), float(e12)])
    footer = {"s_star": prof.s_star, "g_min": prof.g_min, "E12_star": prof.E12_star,
              "E_fit": prof.E_fit, "multimodal": prof.multimodal,
              "candidates": " ".join(f"{s!r}:{g!r}" for s, g in prof.candidates)}
    write_csv(a.out, cols, rows, _manifest(argv, [inst]), footer)
    return EXIT_OK


def cmd_estimate(a, argv) -> int:
    inst = read_instance(a.instance)
    prof = min_gap_search(inst, a.grid, a.stol)
    try:
        est = estimate_gap(inst, prof, a.delta, a.eps0)
    except ValueError as exc:
        if isinstance(exc, RegimeError):
            raise
        raise UsageError(str(exc)) from None
    cols = ["s_star", "g_exact", "g_overlap_est", "ratio_bound", "intersection_ratio",
            "|S+|", "|S-|", "m_c", "E_c"]
    row = [est.s_star, est.exact_gm, est.overlap_estimate, est.bound_ratio,
           est.intersection_ratio, est.size_plus, est.size_minus, est.m_c, est.E_c]
    footer = {"eps0": est.eps0, "overlap": est.overlap, "w_c": est.w_c,
              "separated": est.separated, "extrapolated": est.extrapolated}
    if est.regime_note:
        footer["regime_note"] = est.regime_note
    write_csv(a.out, cols, [row], _manifest(argv, [inst]), footer)
    return EXIT_OK


def _landscape_report(inst, rep) -> str:
    lines = [
        f"n = {rep.n}",
        f"global minima: {', '.join(str(int(z)) for z in rep.global_minima)}"
        f" at energy {rep.global_energy!r}",
        f"local minima: {rep.n_local} ({int(rep.plateau.sum())} on plateaus)",
        f"low-far count: {rep.low_far_count} (E < {rep.E_band!r} above ground,"
        f" distance > {rep.d_band})",
        "histogram of energies above ground:",
    ]
    for c, lo, hi in zip(rep.counts, rep.bin_edges[:-1], rep.bin_edges[1:]):
        lines.append(f"  [{lo:.6g}, {hi:.6g}): {int(c)}")
    return "\n".join(lines) + "\n"


def cmd_landscape(a, argv) -> int:
    inst = read_instance(a.instance)
    rep = census(inst, a.eband, a.dband)
    if a.out in ("report", "-"):
        sys.stdout.write(_landscape_report(inst, rep))
    elif a.out.endswith(".csv"):
        cols = ["config", "bits", "energy", "rel_energy", "distance", "plateau"]
        rows = [[int(z), format(int(z), f"0{inst.n}b"), float(e), float(e - rep.global_energy),
                 int(d), bool(p)]
                for z, e, d, p in zip(rep.configs, rep.energies, rep.distances, rep.plateau)]
        footer = {"n_local": rep.n_local, "low_far_count": rep.low_far_count,
                  "E_band": rep.E_band, "d_band": rep.d_band,
                  "global_minima": " ".join(str(int(z)) for z in rep.global_minima)}
        write_csv(a.out, cols, rows, _manifest(argv, [inst]), footer)
    else:
        Path(a.out).write_text(_landscape_report(inst, rep), encoding="utf-8")
    return EXIT_OK


def _instantaneous_fidelity(inst, s: float, psi: np.ndarray) -> float:
    if s >= 1.0:
        return float(np.sum(np.abs(psi[ground_configs(inst)]) ** 2))
    v = ground_state(inst, s).amplitudes
    return float(abs(np.vdot(v, psi)) ** 2)


def cmd_schedule(a, argv) -> int:
    inst = read_instance(a.instance)
    if a.points < 2:
        raise UsageError("--points must be at least 2")
    if a.kind == LOCAL:
        prof = min_gap_search(inst)

        def make(t):
            return make_local(prof, t)
    else:
        make = make_global
    extra = {}
    if a.tf is not None:
        if not a.tf > 0:
            raise UsageError("--tf must be positive")
        t_f = a.tf
    else:
        if not 0 < a.target_fidelity < 1:
            raise UsageError("--target-fidelity must lie in (0, 1)")
        t_f, calls = minimal_time(inst, make, a.target_fidelity, dt=a.dt)
        extra = {"minimal_t_f": t_f, "evolutions": calls}
    res = evolve(inst, make(t_f), a.dt, record=a.points)
    rows = [[float(t), float(s), _instantaneous_fidelity(inst, float(s), psi)]
            for t, s, psi in res.states]
    footer = {"kind": a.kind, "t_f": t_f, "final_fidelity": res.fidelity,
              "steps": res.steps, "dt": res.dt, "norm_drift": res.norm_drift, **extra}
    write_csv(a.out, ["t", "s", "fidelity"], rows, _manifest(argv, [inst]), footer)
    return EXIT_OK


def cmd_ensemble(a, argv) -> int:
    try:
        ns = parse_n_range(a.n)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    if a.count < 1:
        raise UsageError("--count must be positive")
    analyses = tuple(x.strip() for x in a.analyses.split(",") if x.strip())
    if not analyses or set(analyses) - set(ANALYSES):
        raise UsageError(f"--analyses must be a comma list from {','.join(ANALYSES)}")
    spec = EnsembleSpec(a.family, a.count, tuple(ns), _family_params(a), a.seed, analyses,
                        a.delta, a.eps0)
    workers = a.workers if a.workers is not None else env_workers()
    rows, footer = run_ensemble(spec, workers)
    manifest = _manifest(argv, seeds=[r["seed"] for r in rows])
    write_csv(a.out, COLUMNS, rows, manifest, footer)
    return EXIT_OK


COMMANDS = {"generate": cmd_generate, "gap-scan": cmd_gap_scan, "estimate": cmd_estimate,
            "landscape": cmd_landscape, "schedule": cmd_schedule, "ensemble": cmd_ensemble}


def _fail(code: int, kind: str, exc: BaseException) -> int:
    sys.stderr.write(json.dumps({"error": kind, "exit": code, "message": str(exc)}) + "\n")
    return code


def run(argv=None) -> int:
    """Run one subcommand; returns the process exit status."""
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except UsageError as exc:
        parser.print_usage(sys.stderr)
        return _fail(EXIT_USAGE, "usage", exc)
    except SystemExit as exc:  # --help / --version
        return int(exc.code or 0)
    try:
        return COMMANDS[args.command](args, argv)
    except UsageError as exc:
        return _fail(EXIT_USAGE, "usage", exc)
    except InstanceFormatError as exc:
        return _fail(EXIT_INSTANCE, "malformed-instance", exc)
    except (RegimeError, ScheduleError, InstanceError) as exc:
        return _fail(EXIT_REGIME, "refused", exc)
    except LanczosError as exc:
        return _fail(EXIT_SOLVER, "solver-failure", exc)
    except OSError as exc:
        return _fail(EXIT_INTERNAL, "io", exc)


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":  # pragma: no cover
    main()
