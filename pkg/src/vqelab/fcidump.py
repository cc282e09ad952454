"""FCIDUMP reading and writing.

The FCIDUMP convention: a Fortran namelist header (&FCI ... &END or /)
with NORB, NELEC, MS2, ORBSYM, ISYM, followed by integral lines
``value i j k l`` with 1-based indices in chemists' notation (ij|kl).
Lines with k = l = 0 carry one-body integrals h_ij; the all-zero index
line carries the core (nuclear-repulsion plus frozen) energy.
"""

from __future__ import annotations

import re

import numpy as np

from .fermion import IntegralSet


class FcidumpError(ValueError):
    """Malformed FCIDUMP content; message carries a line number."""


def _parse_header(lines: list[str]) -> tuple[dict, int]:
    """Namelist fields and the index of the first integral line."""
    header_text = []
    end = None
    for ln_no, raw in enumerate(lines):
        header_text.append(raw)
        stripped = raw.strip().upper()
        if stripped.endswith("&END") or stripped.endswith("/"):
            end = ln_no
            break
    if end is None:
        raise FcidumpError("line 1: namelist terminator (&END or /) not found")
    blob = " ".join(header_text)
    blob = re.sub(r"&FCI|&END|/", " ", blob, flags=re.IGNORECASE)
    fields: dict[str, str] = {}
    for match in re.finditer(r"([A-Za-z][A-Za-z0-9_]*)\s*=\s*([^=]*?)(?=[A-Za-z][A-Za-z0-9_]*\s*=|$)", blob):
        fields[match.group(1).upper()] = match.group(2).strip().rstrip(",").strip()
    return fields, end + 1


def parse_fcidump(path: str) -> IntegralSet:
    with open(path) as fh:
        lines = fh.read().splitlines()
    fields, start = _parse_header(lines)
    try:
        norb = int(fields["NORB"])
        nelec = int(fields["NELEC"])
        ms2 = int(fields.get("MS2", "0"))
    except KeyError as exc:
        raise FcidumpError(f"line 1: missing header field {exc.args[0]}") from None
    except ValueError as exc:
        raise FcidumpError(f"line 1: bad header value ({exc})") from None
    if (nelec + ms2) % 2 != 0 or abs(ms2) > nelec:
        raise FcidumpError(f"line 1: inconsistent NELEC={nelec}, MS2={ms2}")
    n_alpha = (nelec + ms2) // 2
    n_beta = (nelec - ms2) // 2
    irreps = [1] * norb
    if "ORBSYM" in fields and fields["ORBSYM"]:
        toks = [t for t in re.split(r"[,\s]+", fields["ORBSYM"]) if t]
        if len(toks) != norb:
            raise FcidumpError(f"line 1: ORBSYM lists {len(toks)} labels, NORB={norb}")
        irreps = [int(t) for t in toks]

    e0 = 0.0
    h = np.zeros((norb, norb))
    eri = np.zeros((norb, norb, norb, norb))
    for ln_no in range(start, len(lines)):
        raw = lines[ln_no].strip()
        if not raw:
            continue
        parts = raw.split()
        if len(parts) != 5:
            raise FcidumpError(f"line {ln_no + 1}: expected 'value i j k l'")
        try:
            value = float(parts[0].replace("D", "E").replace("d", "e"))
            i, j, k, l = (int(p) for p in parts[1:])
        except ValueError:
            raise FcidumpError(f"line {ln_no + 1}: unparseable integral line") from None
        for idx in (i, j, k, l):
            if idx < 0 or idx > norb:
                raise FcidumpError(f"line {ln_no + 1}: orbital index {idx} out of range")
        if i == j == k == l == 0:
            e0 = value
        elif k == 0 and l == 0:
            if i == 0 or j == 0:
                raise FcidumpError(f"line {ln_no + 1}: mixed zero/nonzero one-body indices")
            h[i - 1, j - 1] = value
            h[j - 1, i - 1] = value
        elif 0 in (i, j, k, l):
            raise FcidumpError(f"line {ln_no + 1}: mixed zero/nonzero two-body indices")
        else:
            p, q, r, s = i - 1, j - 1, k - 1, l - 1
            for a, b, c, d in (
                (p, q, r, s), (q, p, r, s), (p, q, s, r), (q, p, s, r),
                (r, s, p, q), (s, r, p, q), (r, s, q, p), (s, r, q, p),
            ):
                eri[a, b, c, d] = value
    ints = IntegralSet(e0=e0, h=h, eri=eri, m=norb,
                       n_alpha=n_alpha, n_beta=n_beta, orbital_irreps=irreps)
    ints.validate()
    return ints


def write_fcidump(ints: IntegralSet, path: str, tol: float = 0.0) -> None:
    """Inverse of parse_fcidump (round-trips exactly via repr formatting)."""
    ints.validate()
    m = ints.m
    nelec = ints.n_alpha + ints.n_beta
    ms2 = ints.n_alpha - ints.n_beta
    orbsym = ",".join(str(v) for v in ints.orbital_irreps)
    lines = [
        f"&FCI NORB={m},NELEC={nelec},MS2={ms2},",
        f" ORBSYM={orbsym},",
        " ISYM=1,",
        "&END",
    ]
    seen = set()
    for p in range(m):
        for q in range(m):
            for r in range(m):
                for s in range(m):
                    key = min(
                        (p, q, r, s), (q, p, r, s), (p, q, s, r), (q, p, s, r),
                        (r, s, p, q), (s, r, p, q), (r, s, q, p), (s, r, q, p),
                    )
                    if key in seen or (p, q, r, s) != key:
                        continue
                    seen.add(key)
                    v = float(ints.eri[p, q, r, s])
                    if abs(v) > tol:
                        lines.append(f"{v!r} {p + 1} {q + 1} {r + 1} {s + 1}")
    for p in range(m):
        for q in range(p + 1):
            v = float(ints.h[p, q])
            if abs(v) > tol:
                lines.append(f"{v!r} {p + 1} {q + 1} 0 0")
    lines.append(f"{float(ints.e0)!r} 0 0 0 0")
    with open(path, "w") as fh:
        fh.write("\n".join(lines) + "\n")
