"""FCIDUMP parsing/writing, result repository layout, CLI behavior."""

import hashlib
import os

import numpy as np
import pytest

from vqelab.cli import parse_config, run_cli
from vqelab.fcidump import FcidumpError, parse_fcidump, write_fcidump
from vqelab.repo import (
    CATEGORIES, RepositoryError, ResultRecord, read_repository,
    write_repository,
)

from conftest import fixture_geometries, load_ints

LIH = fixture_geometries("LiH")


def tree_digest(root):
    h = hashlib.sha256()
    for dirpath, _dirs, files in sorted(os.walk(root)):
        for fn in sorted(files):
            path = os.path.join(dirpath, fn)
            h.update(os.path.relpath(path, root).encode())
            h.update(open(path, "rb").read())
    return h.hexdigest()


class TestFcidump:
    def test_parse_fixture_header(self):
        ints = parse_fcidump(LIH[0]["path"])
        assert ints.m == 3
        assert (ints.n_alpha, ints.n_beta) == (1, 1)
        assert ints.orbital_irreps == [1, 1, 1]

    def test_roundtrip_exact(self, tmp_path):
        ints = load_ints("H2O", 0)
        out = tmp_path / "h2o.fcidump"
        write_fcidump(ints, str(out))
        again = parse_fcidump(str(out))
        assert np.array_equal(again.h, ints.h)
        assert np.array_equal(again.eri, ints.eri)
        assert again.e0 == ints.e0

    def test_eightfold_completion(self, tmp_path):
        # one representative line must populate all eight permutations
        path = tmp_path / "toy.fcidump"
        path.write_text(
            "&FCI NORB=2,NELEC=2,MS2=0,\n ORBSYM=1,1,\n ISYM=1,\n&END\n"
            "0.5 1 2 1 1\n"
            "1.0 1 1 0 0\n"
            "0.25 0 0 0 0\n")
        ints = parse_fcidump(str(path))
        for idx in ((0, 1, 0, 0), (1, 0, 0, 0), (0, 0, 0, 1), (0, 0, 1, 0)):
            assert ints.eri[idx] == 0.5
        assert ints.h[0, 0] == 1.0
        assert ints.e0 == 0.25

    def test_d_exponent(self, tmp_path):
        path = tmp_path / "toy.fcidump"
        path.write_text(
            "&FCI NORB=1,NELEC=2,MS2=0,\n&END\n"
            "-1.5D-01 1 1 0 0\n"
            "0.0 0 0 0 0\n")
        assert parse_fcidump(str(path)).h[0, 0] == -0.15

    @pytest.mark.parametrize("body,fragment", [
        ("0.5 1 2 1\n", "line 5"),
        ("0.5 1 0 1 1\n", "line 5"),
        ("abc 1 1 0 0\n", "line 5"),
        ("0.5 9 1 1 1\n", "line 5"),
    ])
    def test_line_numbered_errors(self, tmp_path, body, fragment):
        path = tmp_path / "bad.fcidump"
        path.write_text(
            "&FCI NORB=2,NELEC=2,MS2=0,\n ORBSYM=1,1,\n ISYM=1,\n&END\n" + body)
        with pytest.raises(FcidumpError, match=fragment):
            parse_fcidump(str(path))

    def test_inconsistent_electrons(self, tmp_path):
        path = tmp_path / "bad.fcidump"
        path.write_text("&FCI NORB=2,NELEC=3,MS2=0,\n&END\n0.0 0 0 0 0\n")
        with pytest.raises(FcidumpError, match="NELEC"):
            parse_fcidump(str(path))


class TestRepository:
    def make_records(self):
        return [
            ResultRecord("scf_fci", "LiH", 1.6,
                         {"schema_version": 1, "r": 1.6, "e_fci": -7.88}),
            ResultRecord("hardware_efficient", "LiH", 1.6,
                         {"schema_version": 1, "r": 1.6, "n_l": 2, "restart": 0,
                          "e_vqe": -7.87, "e_fci": -7.88, "delta_e": 0.01,
                          "delta_n": 0.0, "delta_sz": 0.0, "delta_s2": 0.0,
                          "is_best": True},
                         name="R1.6000_nl2_x0"),
        ]

    def test_layout(self, tmp_path):
        write_repository(self.make_records(), str(tmp_path))
        for cat in CATEGORIES:
            assert (tmp_path / cat).is_dir()
        assert (tmp_path / "scf_fci" / "LiH" / "R1.6000.json").exists()
        assert (tmp_path / "hardware_efficient" / "LiH" / "curve.csv").exists()

    def test_idempotent_rewrite(self, tmp_path):
        a, b = tmp_path / "a", tmp_path / "b"
        write_repository(self.make_records(), str(a))
        write_repository(self.make_records(), str(b))
        assert tree_digest(a) == tree_digest(b)

    def test_read_roundtrip(self, tmp_path):
        write_repository(self.make_records(), str(tmp_path))
        records = read_repository(str(tmp_path))
        payloads = {r.name: r.payload for r in records}
        assert payloads["R1.6000"]["e_fci"] == -7.88
        assert payloads["R1.6000_nl2_x0"]["is_best"] is True

    def test_unknown_category_rejected(self):
        with pytest.raises(RepositoryError):
            ResultRecord("misc", "LiH", 1.0, {})

    def test_missing_category_dir(self, tmp_path):
        with pytest.raises(RepositoryError):
            read_repository(str(tmp_path / "nope"))


def write_scan_config(tmp_path, n_geoms=5, restarts=2, family="RY_LINEAR"):
    lines = ["molecule = LiH", f"family = {family}", "layers = 2",
             f"restarts = {restarts}", "seed = 7"]
    for g in LIH[:n_geoms]:
        lines.append(f"geometry = {g['r']} {os.path.abspath(g['path'])}")
    cfg = tmp_path / "scan.cfg"
    cfg.write_text("\n".join(lines) + "\n")
    return str(cfg)


class TestCli:
    def test_parse_config(self, tmp_path):
        cfg = tmp_path / "c.cfg"
        cfg.write_text("a = 1  # comment\nb = x y\nb = z\n\n")
        parsed = parse_config(str(cfg))
        assert parsed == {"a": "1", "b": ["x y", "z"]}

    def test_scan_writes_repository(self, tmp_path, capsys):
        cfg = write_scan_config(tmp_path, n_geoms=2, restarts=1)
        out = tmp_path / "repo"
        assert run_cli(["scan", "--config", cfg, "--out", str(out)]) == 0
        records = read_repository(str(out))
        assert any(r.category == "hardware_efficient" for r in records)
        assert "scan complete" in capsys.readouterr().out

    def test_scan_deterministic_bytes(self, tmp_path):
        cfg = write_scan_config(tmp_path, n_geoms=2, restarts=2)
        a, b = tmp_path / "a", tmp_path / "b"
        assert run_cli(["scan", "--config", cfg, "--out", str(a)]) == 0
        assert run_cli(["scan", "--config", cfg, "--out", str(b)]) == 0
        assert tree_digest(a) == tree_digest(b)

    def test_fci_and_export(self, tmp_path):
        cfg = write_scan_config(tmp_path, n_geoms=2)
        src, dst = tmp_path / "src", tmp_path / "dst"
        assert run_cli(["fci", "--config", cfg, "--out", str(src)]) == 0
        assert run_cli(["export", "--source", str(src), "--out", str(dst)]) == 0
        assert tree_digest(src) == tree_digest(dst)

    def test_cost_table(self, tmp_path, capsys):
        cfg = write_scan_config(tmp_path, n_geoms=1)
        assert run_cli(["cost", "--config", cfg]) == 0
        out = capsys.readouterr().out
        assert "n_theta" in out and "RY_LINEAR" in out

    def test_firstq_pad(self, tmp_path):
        cfg = write_scan_config(tmp_path, n_geoms=1, family="CASCADE")
        out = tmp_path / "repo"
        assert run_cli(["firstq", "--config", cfg, "--out", str(out),
                        "--scheme", "pad", "--projection", "vap"]) == 0
        recs = [r for r in read_repository(str(out))
                if r.category == "variation_after_projection"]
        assert recs and recs[0].payload["scheme"] == "pad"

    def test_firstq_trim(self, tmp_path):
        cfg = write_scan_config(tmp_path, n_geoms=1, family="CASCADE")
        out = tmp_path / "repo"
        assert run_cli(["firstq", "--config", cfg, "--out", str(out),
                        "--scheme", "trim"]) == 0
        recs = [r for r in read_repository(str(out)) if r.category == "trim"]
        assert recs and recs[0].payload["trim_error"] >= 0.0

    def test_exit_codes(self, tmp_path, capsys):
        missing = tmp_path / "missing.cfg"
        assert run_cli(["scan", "--config", str(missing), "--out", "x"]) == 1
        bad = tmp_path / "bad.cfg"
        bad.write_text("geometry = 1.0 /does/not/exist.fcidump\n")
        assert run_cli(["scan", "--config", str(bad), "--out", "x"]) == 2
        assert run_cli(["scan"]) == 1  # missing required --config
        capsys.readouterr()
