"""Instance files and CSV output with a manifest header.

Instance files are JSON documents::

    {
      "format": "aqgap-instance", "version": 1,
      "n": 3, "kind": "ising",
      "h": [0.1, -0.2, 0.0],
      "J": [[0, 1, 1.0], [1, 2, -0.5]],
      "energy_scale": 1.0, "driver_scale": 1.0
    }

Diagonal instances replace ``h``/``J`` with ``diag``: either an explicit list
of 2**n dimensionless energies or a generator reference,
``{"generator": "3sat", "clauses": [[1, -2, 3], ...]}`` or
``{"generator": "marked", "marked": 5}``.

CSV files open with ``# key: value`` manifest lines. The manifest never
holds wall-clock data, so identical inputs give byte-identical files; the
timestamp goes to a ``<csv>.manifest.json`` sidecar.
"""

from __future__ import annotations

import csv
import datetime as _dt
import hashlib
import io as _io
import json
import math
from dataclasses import dataclass, field
from importlib import metadata
from pathlib import Path

import numpy as np

from .ising import DIAGONAL, ISING, InstanceError, ProblemInstance

FORMAT = "aqgap-instance"
VERSION = 1


class InstanceFormatError(InstanceError):
    """The instance document does not follow the schema."""


def tool_version() -> str:
    try:
        return metadata.version("artifact")
    except metadata.PackageNotFoundError:  # pragma: no cover
        return "0+unknown"


def instance_to_dict(inst: ProblemInstance) -> dict:
    doc = {"format": FORMAT, "version": VERSION, "n": inst.n, "kind": inst.kind}
    if inst.kind == ISING:
        doc["h"] = [float(x) for x in inst.h]
        doc["J"] = [[i, j, float(v)] for (i, j), v in inst.J.items()]
    elif inst.source is not None:
        doc["diag"] = inst.source
    else:
        doc["diag"] = [float(x) for x in inst.diag]
    doc["energy_scale"] = inst.energy_scale
    doc["driver_scale"] = inst.driver_scale
    return doc


def _diag_from_reference(n: int, ref: dict, scales: dict) -> ProblemInstance:
    from .generators import marked_instance, sat_instance
    gen = ref.get("generator")
    if gen == "3sat":
        clauses = ref.get("clauses")
        if not isinstance(clauses, list):
            raise InstanceFormatError("3sat reference needs a 'clauses' list")
        for c in clauses:
            if not c or any(not isinstance(l, int) or l == 0 or abs(l) > n for l in c):
                raise InstanceFormatError(f"bad clause {c!r}")
        return sat_instance(n, clauses, **scales)
    if gen == "marked":
        return marked_instance(n, int(ref["marked"]), **scales)
    raise InstanceFormatError(f"unknown diag generator {gen!r}")


def instance_from_dict(doc: dict) -> ProblemInstance:
    if not isinstance(doc, dict):
        raise InstanceFormatError("instance document must be a JSON object")
    if doc.get("format", FORMAT) != FORMAT:
        raise InstanceFormatError(f"unexpected format tag {doc.get('format')!r}")
    try:
        n = doc["n"]
        kind = doc["kind"]
        scales = {"energy_scale": float(doc.get("energy_scale", 1.0)),
                  "driver_scale": float(doc.get("driver_scale", 1.0))}
    except (KeyError, TypeError, ValueError) as exc:
        raise InstanceFormatError(f"missing or invalid field: {exc}") from None
    if not isinstance(n, int) or isinstance(n, bool):
        raise InstanceFormatError("'n' must be an integer")
    if kind == ISING:
        h = doc.get("h")
        if not isinstance(h, list) or len(h) != n:
            raise InstanceFormatError(f"'h' must be a list of {n} numbers")
        J = {}
        for entry in doc.get("J", []):
            if not (isinstance(entry, list) and len(entry) == 3):
                raise InstanceFormatError(f"bad coupling entry {entry!r}")
            i, j, v = entry
            if not (isinstance(i, int) and isinstance(j, int)):
                raise InstanceFormatError(f"coupling indices must be integers: {entry!r}")
            key = (min(i, j), max(i, j))
            if key in J:
                raise InstanceFormatError(f"coupling {key} listed twice")
            J[key] = v
        try:
            return ProblemInstance.ising(h, J, **scales)
        except (TypeError, ValueError) as exc:
            raise InstanceFormatError(str(exc)) from None
    if kind == DIAGONAL:
        diag = doc.get("diag")
        if isinstance(diag, dict):
            return _diag_from_reference(n, diag, scales)
        if not isinstance(diag, list) or len(diag) != (1 << n):
            raise InstanceFormatError(f"'diag' must list 2**{n} energies or be a reference")
        try:
            return ProblemInstance.diagonal(n, np.array(diag, dtype=float), **scales)
        except (TypeError, ValueError) as exc:
            raise InstanceFormatError(str(exc)) from None
    raise InstanceFormatError(f"unknown kind {kind!r}")


def dumps_instance(inst: ProblemInstance) -> str:
    return json.dumps(instance_to_dict(inst), indent=1) + "\n"


def loads_instance(text: str) -> ProblemInstance:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise InstanceFormatError(f"not valid JSON: {exc}") from None
    return instance_from_dict(doc)


def write_instance(inst: ProblemInstance, path) -> None:
    Path(path).write_text(dumps_instance(inst), encoding="utf-8")


def read_instance(path) -> ProblemInstance:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise InstanceFormatError(f"cannot read {path}: {exc}") from None
    return loads_instance(text)


def instance_hash(inst: ProblemInstance) -> str:
    canon = json.dumps(instance_to_dict(inst), sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(canon.encode()).hexdigest()[:16]


# -- CSV ---------------------------------------------------------------------

@dataclass
class RunManifest:
    command: list[str]
    seeds: list[int] = field(default_factory=list)
    instance_hashes: list[str] = field(default_factory=list)
    extra: dict = field(default_factory=dict)
    version: str = field(default_factory=tool_version)
    timestamp: str = field(
        default_factory=lambda: _dt.datetime.now(_dt.timezone.utc).isoformat(timespec="seconds"))

    def header_lines(self) -> list[str]:
        lines = [
            f"# tool: aqgap {self.version}",
            f"# command: {' '.join(self.command)}",
        ]
        if self.seeds:
            lines.append(f"# seeds: {_compact_seeds(self.seeds)}")
        if self.instance_hashes:
            lines.append(f"# instances: {' '.join(self.instance_hashes)}")
        lines += [f"# {k}: {fmt(v)}" for k, v in self.extra.items()]
        return lines

    def to_json(self) -> str:
        return json.dumps({"command": self.command, "seeds": self.seeds,
                           "instance_hashes": self.instance_hashes, "version": self.version,
                           "timestamp": self.timestamp,
                           "extra": {k: fmt(v) for k, v in self.extra.items()}},
                          indent=1) + "\n"


def _compact_seeds(seeds: list[int]) -> str:
    if len(seeds) > 2 and seeds == list(range(seeds[0], seeds[0] + len(seeds))):
        return f"{seeds[0]}..{seeds[-1]}"
    return " ".join(str(s) for s in seeds)


def fmt(x) -> str:
    """Deterministic text for CSV cells; floats use shortest round-trip repr."""
    if x is None:
        return ""
    if isinstance(x, (bool, np.bool_)):
        return "1" if x else "0"
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    if isinstance(x, (float, np.floating)):
        x = float(x)
        if math.isnan(x):
            return "nan"
        if math.isinf(x):
            return "inf" if x > 0 else "-inf"
        return repr(x)
    return str(x)


def render_csv(columns: list[str], rows, manifest: RunManifest | None = None,
               footer: dict | None = None) -> str:
    buf = _io.StringIO()
    if manifest is not None:
        for line in manifest.header_lines():
            buf.write(line + "\n")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(columns)
    for row in rows:
        if isinstance(row, dict):
            row = [row.get(c) for c in columns]
        w.writerow([fmt(v) for v in row])
    for k, v in (footer or {}).items():
        buf.write(f"# {k}: {fmt(v)}\n")
    return buf.getvalue()


def write_csv(path, columns, rows, manifest: RunManifest | None = None,
              footer: dict | None = None) -> None:
    text = render_csv(columns, rows, manifest, footer)
    if str(path) == "-":
        import sys
        sys.stdout.write(text)
        return
    Path(path).write_text(text, encoding="utf-8")
    if manifest is not None:
        Path(str(path) + ".manifest.json").write_text(manifest.to_json(), encoding="utf-8")


def read_csv(path) -> tuple[dict, list[dict], dict]:
    """(header manifest, rows, footer) of a CSV written by :func:`write_csv`."""
    lines = Path(path).read_text(encoding="utf-8").splitlines()
    head, body, foot = {}, [], {}
    i = 0
    while i < len(lines) and lines[i].startswith("#"):
        k, _, v = lines[i][2:].partition(": ")
        head[k] = v
        i += 1
    j = len(lines)
    while j > i and lines[j - 1].startswith("#"):
        j -= 1
    for line in lines[j:]:
        k, _, v = line[2:].partition(": ")
        foot[k] = v
    body = list(csv.DictReader(lines[i:j]))
    return head, body, foot
