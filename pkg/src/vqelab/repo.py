"""Result persistence in a fixed six-folder repository layout.

Records are JSON (schema version 1), written deterministically: same
records in, byte-identical files out.  Wall-clock timings are therefore
kept out of the canonical payload.  A CSV per (category, molecule, n_l)
accompanies the JSON for curve plotting.
"""

from __future__ import annotations

import csv
import io
import json
import os
from dataclasses import dataclass, field

import numpy as np

CATEGORIES = (
    "hardware_efficient",
    "qUCCSD",
    "trim",
    "projection_after_variation",
    "variation_after_projection",
    "scf_fci",
)

SCHEMA_VERSION = 1

CSV_COLUMNS = ("r", "n_l", "restart", "e_vqe", "e_fci",
               "delta_e", "delta_n", "delta_sz", "delta_s2")


class RepositoryError(RuntimeError):
    pass


@dataclass
class ResultRecord:
    category: str
    molecule: str
    geometry: float
    payload: dict
    name: str = ""

    def __post_init__(self):
        if self.category not in CATEGORIES:
            raise RepositoryError(f"unknown category {self.category!r}")
        if not self.name:
            self.name = f"R{self.geometry:.4f}"

    @property
    def path(self) -> str:
        return os.path.join(self.category, self.molecule, f"{self.name}.json")


def _jsonable(value):
    if isinstance(value, np.ndarray):
        return [_jsonable(v) for v in value.tolist()]
    if isinstance(value, (np.floating, np.integer)):
        return value.item()
    if isinstance(value, dict):
        return {k: _jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_jsonable(v) for v in value]
    return value


def record_from_scan(scan_record, molecule: str, category: str,
                     extra: dict | None = None) -> ResultRecord:
    """Canonical JSON payload for one VQE run (timings excluded)."""
    res = scan_record.result
    met = scan_record.metrics
    payload = {
        "schema_version": SCHEMA_VERSION,
        "molecule": molecule,
        "r": scan_record.r,
        "n_l": scan_record.n_l,
        "restart": scan_record.restart,
        "seed": scan_record.seed,
        "e_vqe": res.e_vqe,
        "e_fci": scan_record.e_fci,
        "delta_e": res.delta_e,
        "delta_n": res.delta_n,
        "delta_sz": res.delta_sz,
        "delta_s2": res.delta_s2,
        "n_vqe": res.n_vqe,
        "sz_vqe": res.sz_vqe,
        "s2_vqe": res.s2_vqe,
        "aux_stage": met.aux_stage,
        "converged": res.converged,
        "n_evaluations": res.n_evaluations,
        "restarts_used": res.restarts_used,
        "is_best": scan_record.is_best,
        "theta_opt": _jsonable(res.theta_opt),
        "trace": _jsonable(res.trace),
    }
    if extra:
        payload.update(_jsonable(extra))
    name = f"R{scan_record.r:.4f}_nl{scan_record.n_l}_x{scan_record.restart}"
    return ResultRecord(category, molecule, scan_record.r, payload, name)


def _dump(payload: dict) -> str:
    return json.dumps(payload, sort_keys=True, indent=2) + "\n"


def write_repository(records: list[ResultRecord], root: str) -> list[str]:
    """Write records under root in the fixed layout; returns written paths.

    Idempotent: re-writing the same records leaves every file byte-identical.
    """
    written = []
    try:
        for cat in CATEGORIES:
            os.makedirs(os.path.join(root, cat), exist_ok=True)
        for rec in records:
            full = os.path.join(root, rec.path)
            os.makedirs(os.path.dirname(full), exist_ok=True)
            with open(full, "w") as fh:
                fh.write(_dump(rec.payload))
            written.append(full)
        written.extend(_write_curves(records, root))
    except OSError as exc:
        raise RepositoryError(f"writing under {root!r}: {exc}") from exc
    return written


def _write_curves(records: list[ResultRecord], root: str) -> list[str]:
    groups: dict[tuple[str, str], list[ResultRecord]] = {}
    for rec in records:
        if "e_vqe" in rec.payload:
            groups.setdefault((rec.category, rec.molecule), []).append(rec)
    written = []
    for (cat, mol), recs in sorted(groups.items()):
        rows = sorted(
            (r.payload for r in recs if r.payload.get("is_best")),
            key=lambda p: (p["r"], p["n_l"]),
        )
        if not rows:
            continue
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(CSV_COLUMNS)
        for p in rows:
            writer.writerow([p.get(c) for c in CSV_COLUMNS])
        path = os.path.join(root, cat, mol, "curve.csv")
        with open(path, "w") as fh:
            fh.write(buf.getvalue())
        written.append(path)
    return written


def read_repository(root: str) -> list[ResultRecord]:
    """Round-trip reader for the JSON records."""
    records = []
    for cat in CATEGORIES:
        cat_dir = os.path.join(root, cat)
        if not os.path.isdir(cat_dir):
            raise RepositoryError(f"missing category directory {cat_dir!r}")
        for mol in sorted(os.listdir(cat_dir)):
            mol_dir = os.path.join(cat_dir, mol)
            if not os.path.isdir(mol_dir):
                continue
            for fname in sorted(os.listdir(mol_dir)):
                if not fname.endswith(".json"):
                    continue
                with open(os.path.join(mol_dir, fname)) as fh:
                    payload = json.load(fh)
                records.append(ResultRecord(
                    cat, mol, float(payload.get("r", 0.0)), payload, fname[:-5]
                ))
    return records
