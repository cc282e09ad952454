"""Command-line entry point.

Subcommands: ``scan`` (dissociation-curve VQE), ``fci`` (exact reference
data), ``firstq`` (CSF pipeline with trimming or padding), ``cost``
(circuit cost table), ``export`` (canonical repository rewrite).

Config files are plain ``key = value`` lines; ``geometry`` is repeatable
as ``geometry = <R> <fcidump path>``.  Exit codes: 0 success, 1 validation
or usage error, 2 runtime failure.
"""

from __future__ import annotations

import argparse
import os
import sys

import numpy as np

from . import kernels
from .ansatz import (
    CASCADE, QUCCSD, RY_FULL, RY_LINEAR, AnsatzSpec, build_ansatz,
    build_quccsd, circuit_cost, reference_prep_circuit,
)
from .fci import SectorSpec, build_matrices, enumerate_determinants, fci_ground
from .fcidump import parse_fcidump
from .fermion import encode_problem
from .firstq import build_csf_basis, pad, project_hamiltonian, projected_energy, trim
from .repo import (
    CATEGORIES, ResultRecord, RepositoryError, read_repository,
    record_from_scan, write_repository,
)
from .statevector import StateVector, apply_circuit, init_reference
from .vqe import (
    GeometryPoint, ScanConfig, detect_cusps, make_projected_objective,
    minimize_objective, scan_curve,
)

FAMILIES = {"RY_LINEAR": RY_LINEAR, "RY_FULL": RY_FULL,
            "CASCADE": CASCADE, "QUCCSD": QUCCSD}


class UsageError(ValueError):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def parse_config(path: str) -> dict:
    """Minimal key=value config; repeated keys accumulate into lists."""
    if not os.path.exists(path):
        raise UsageError(f"config file not found: {path}")
    config: dict = {}
    with open(path) as fh:
        for ln_no, raw in enumerate(fh, 1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise UsageError(f"{path}:{ln_no}: expected 'key = value'")
            key, value = (s.strip() for s in line.split("=", 1))
            if key in config:
                if not isinstance(config[key], list):
                    config[key] = [config[key]]
                config[key].append(value)
            else:
                config[key] = value
    return config


def _as_list(value) -> list:
    if value is None:
        return []
    return value if isinstance(value, list) else [value]


def _as_bool(value: str) -> bool:
    if value.lower() in ("1", "true", "yes", "on"):
        return True
    if value.lower() in ("0", "false", "no", "off"):
        return False
    raise UsageError(f"not a boolean: {value!r}")


def _load_geometries(config: dict, base_dir: str) -> list[GeometryPoint]:
    geoms = []
    for entry in _as_list(config.get("geometry")):
        parts = entry.split()
        if len(parts) != 2:
            raise UsageError(f"geometry entry needs '<R> <path>': {entry!r}")
        r = float(parts[0])
        path = parts[1]
        if not os.path.isabs(path):
            path = os.path.join(base_dir, path)
        if not os.path.exists(path):
            raise FileNotFoundError(f"fixture not found: {path}")
        geoms.append(GeometryPoint(r, parse_fcidump(path), label=parts[1]))
    if not geoms:
        raise UsageError("config lists no geometries")
    return geoms


def _ansatz_spec(config: dict, n_l: int) -> AnsatzSpec:
    family = config.get("family", "RY_LINEAR").upper()
    if family not in FAMILIES:
        raise UsageError(f"unknown ansatz family {family!r}")
    return AnsatzSpec(
        FAMILIES[family], n_l,
        quccsd_flavor=config.get("flavor", "RESTRICTED").upper(),
        product_formula=config.get("product_formula", "TROTTER1").upper(),
        ordering=config.get("ordering", "SINGLES_THEN_DOUBLES").upper(),
    )


def _layers(config: dict) -> list[int]:
    return [int(v) for v in str(config.get("layers", "1")).split(",")]


def _scan_config(config: dict, base_dir: str, seed_override) -> ScanConfig:
    layers = _layers(config)
    return ScanConfig(
        geometries=_load_geometries(config, base_dir),
        ansatz=_ansatz_spec(config, layers[-1]),
        layers=layers,
        mapping=config.get("mapping", "parity"),
        two_qubit_reduce=_as_bool(config.get("two_qubit_reduce", "true")),
        taper_qubits=_as_bool(config.get("taper", "false")),
        restarts=int(config.get("restarts", "1")),
        seed=int(seed_override if seed_override is not None else config.get("seed", "0")),
        optimizer=config.get("optimizer", "LBFGS").upper(),
        warm_start=config.get("warm_start", "NONE").upper(),
        budget=int(config.get("budget", "10000")),
    )


def cmd_scan(args) -> int:
    config = parse_config(args.config)
    base = os.path.dirname(os.path.abspath(args.config))
    sc = _scan_config(config, base, args.seed)
    molecule = config.get("molecule", "molecule")
    category = "qUCCSD" if sc.ansatz.family == QUCCSD else "hardware_efficient"
    records = scan_curve(sc)
    out = [record_from_scan(r, molecule, category,
                            extra={"mapping": sc.mapping,
                                   "family": sc.ansatz.family,
                                   "optimizer": sc.optimizer,
                                   "warm_start": sc.warm_start})
           for r in records]
    write_repository(out, args.out)
    bests = [(r.r, r.result.e_vqe) for r in records
             if r.is_best and r.n_l == sc.layers[-1]]
    bests.sort()
    if len(bests) >= 5:
        rs = np.array([b[0] for b in bests])
        es = np.array([b[1] for b in bests])
        flags = detect_cusps(rs, es, float(config.get("cusp_threshold", "5.0")))
        print(f"cusps: {flags if flags else 'none'}")
    worst = max((abs(r.result.delta_e) for r in records if r.is_best), default=0.0)
    print(f"scan complete: {len(records)} runs, max |delta_E| of bests = {worst:.3e}")
    return 0


def cmd_fci(args) -> int:
    config = parse_config(args.config)
    base = os.path.dirname(os.path.abspath(args.config))
    molecule = config.get("molecule", "molecule")
    records = []
    for geom in _load_geometries(config, base):
        g = fci_ground(geom.ints)
        payload = {
            "schema_version": 1, "molecule": molecule, "r": geom.r,
            "e_fci": g.energy, "n": g.number, "sz": g.spin_z, "s2": g.spin_sq,
        }
        records.append(ResultRecord("scf_fci", molecule, geom.r, payload))
        print(f"R={geom.r:.4f}  E_FCI={g.energy:.10f}  <S^2>={g.spin_sq:.2e}")
    write_repository(records, args.out)
    return 0


def cmd_firstq(args) -> int:
    config = parse_config(args.config)
    base = os.path.dirname(os.path.abspath(args.config))
    molecule = config.get("molecule", "molecule")
    seed = int(args.seed if args.seed is not None else config.get("seed", "0"))
    restarts = int(config.get("restarts", "1"))
    layers = _layers(config)
    family = config.get("family", "CASCADE").upper()
    if family not in FAMILIES or FAMILIES[family] == QUCCSD:
        raise UsageError("firstq requires a hardware-efficient family")
    padding_energy = float(config.get("padding_energy", "1e4"))
    records = []
    for gi, geom in enumerate(_load_geometries(config, base)):
        dets = enumerate_determinants(
            geom.ints, SectorSpec(geom.ints.n_alpha, geom.ints.n_beta))
        h_mat, s2_mat = build_matrices(dets, geom.ints)
        basis = build_csf_basis(h_mat, s2_mat)
        h_tilde = project_hamiltonian(h_mat, basis)
        import scipy.linalg
        e_exact = float(scipy.linalg.eigh(h_tilde, eigvals_only=True)[0])
        if args.scheme == "trim":
            tr = trim(h_tilde)
            n_q = max(1, int(np.log2(tr.matrix.shape[0])))
            from .pauli import from_matrix
            ham = from_matrix(tr.matrix, n_q)
            ref = init_reference(n_q, "0" * n_q)
            best = None
            for n_l in layers:
                circuit = build_ansatz(FAMILIES[family], n_q, n_l)
                for restart in range(restarts):
                    theta0 = _restart(circuit.n_theta, (seed, gi, n_l, restart), restart)
                    from .vqe import minimize
                    res = minimize(circuit, ham, theta0, ref)
                    if best is None or res.e_vqe < best[0].e_vqe:
                        best = (res, n_l)
            payload = {
                "schema_version": 1, "molecule": molecule, "r": geom.r,
                "scheme": "trim", "k": basis.k, "n_q": n_q,
                "kept": tr.kept, "trim_error": tr.energy_error,
                "e_vqe": best[0].e_vqe, "n_l": best[1],
                "e_exact_projected": e_exact,
                "delta_e": best[0].e_vqe - e_exact,
                "theta_opt": [float(v) for v in best[0].theta_opt],
            }
            records.append(ResultRecord("trim", molecule, geom.r, payload))
            print(f"R={geom.r:.4f}  trim error={tr.energy_error:.3e}  "
                  f"E={best[0].e_vqe:.8f}")
        else:
            problem = pad(h_tilde, padding_energy)
            ref = init_reference(problem.n_q, "0" * problem.n_q)
            mode = args.projection.upper()
            best = None
            for n_l in layers:
                circuit = build_ansatz(FAMILIES[family], problem.n_q, n_l)
                fun, jac = make_projected_objective(circuit, problem, ref, mode)
                for restart in range(restarts):
                    theta0 = _restart(circuit.n_theta, (seed, gi, n_l, restart), restart)
                    res = minimize_objective(fun, jac, theta0)
                    state = apply_circuit(ref, circuit, res.theta_opt)
                    energy, p = projected_energy(state, problem)
                    if best is None or energy < best[0]:
                        best = (energy, p, res, n_l)
            category = ("variation_after_projection" if mode == "VAP"
                        else "projection_after_variation")
            payload = {
                "schema_version": 1, "molecule": molecule, "r": geom.r,
                "scheme": "pad", "projection": mode.lower(),
                "k": problem.k, "n_q": problem.n_q,
                "padding_energy": problem.padding_energy,
                "e_vqe": best[0], "physical_norm": best[1], "n_l": best[3],
                "e_exact_projected": e_exact, "delta_e": best[0] - e_exact,
                "theta_opt": [float(v) for v in best[2].theta_opt],
            }
            records.append(ResultRecord(category, molecule, geom.r, payload))
            print(f"R={geom.r:.4f}  E={best[0]:.8f}  P={best[1]:.3e}")
    write_repository(records, args.out)
    return 0


def _restart(n_theta: int, seed_tuple, restart: int) -> np.ndarray:
    if restart == 0:
        return np.zeros(n_theta)
    return np.random.default_rng(seed_tuple).uniform(-0.1, 0.1, n_theta)


def cmd_cost(args) -> int:
    config = parse_config(args.config)
    base = os.path.dirname(os.path.abspath(args.config))
    geoms = _load_geometries(config, base)
    ints = geoms[0].ints
    encoded = encode_problem(
        ints, config.get("mapping", "parity"),
        _as_bool(config.get("two_qubit_reduce", "true")),
        _as_bool(config.get("taper", "false")),
    )
    family = config.get("family", "RY_LINEAR").upper()
    rows = []
    for n_l in _layers(config):
        if FAMILIES[family] == QUCCSD:
            spec = _ansatz_spec(config, n_l)
            circuit = build_quccsd(ints, spec)
            prep = reference_prep_circuit(
                circuit.n_q,
                encode_problem(ints, "jordan_wigner").hf_bits,
            )
        else:
            circuit = build_ansatz(FAMILIES[family], encoded.n_q, n_l)
            prep = reference_prep_circuit(circuit.n_q, encoded.hf_bits)
        report = circuit_cost(circuit, encoded.hamiltonian, prep, n_l)
        rows.append(report)
    header = f"{'family':>10} {'n_q':>4} {'n_l':>4} {'d':>5} {'d+prep':>7} {'n_theta':>8} {'n_g1':>5} {'n_g2':>5} {'n_p':>5}"
    lines = [header]
    for rep in rows:
        lines.append(f"{family:>10} {rep.n_q:>4} {rep.n_l:>4} {rep.d:>5} "
                     f"{rep.d_with_prep:>7} {rep.n_theta:>8} {rep.n_g1:>5} "
                     f"{rep.n_g2:>5} {rep.n_p:>5}")
    table = "\n".join(lines)
    print(table)
    if args.out:
        os.makedirs(args.out, exist_ok=True)
        with open(os.path.join(args.out, "cost_table.txt"), "w") as fh:
            fh.write(table + "\n")
    return 0


def cmd_export(args) -> int:
    records = read_repository(args.source)
    write_repository(records, args.out)
    print(f"exported {len(records)} records to {args.out}")
    return 0


def build_parser() -> _Parser:
    parser = _Parser(prog="vqelab")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, out_default="results"):
        p.add_argument("--config", required=True)
        p.add_argument("--out", default=out_default)
        p.add_argument("--seed", type=int, default=None)
        p.add_argument("--threads", type=int, default=None)

    common(sub.add_parser("scan"))
    common(sub.add_parser("fci"))
    pq = sub.add_parser("firstq")
    common(pq)
    pq.add_argument("--scheme", choices=("trim", "pad"), default="pad")
    pq.add_argument("--projection", choices=("vap", "pav"), default="vap")
    common(sub.add_parser("cost"), out_default=None)
    pe = sub.add_parser("export")
    pe.add_argument("--source", required=True)
    pe.add_argument("--out", required=True)
    pe.add_argument("--threads", type=int, default=None)
    return parser


def run_cli(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        parser.print_usage(sys.stderr)
        return 1
    if getattr(args, "threads", None):
        if kernels.BACKEND == "numba":
            import numba
            numba.set_num_threads(args.threads)
    handlers = {"scan": cmd_scan, "fci": cmd_fci, "firstq": cmd_firstq,
                "cost": cmd_cost, "export": cmd_export}
    try:
        return handlers[args.command](args)
    except (UsageError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except (FileNotFoundError, RepositoryError, RuntimeError) as exc:
        print(f"runtime failure: {exc}", file=sys.stderr)
        return 2


def main() -> None:
    sys.exit(run_cli())
