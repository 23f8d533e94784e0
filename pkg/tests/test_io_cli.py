import json
import subprocess
import sys

import numpy as np
import pytest

from neargroup.cli import main, parse_group
from neargroup.config import Config, load_config
from neargroup.io import (
    Archive,
    load_bundled,
    load_solution,
    save_solution,
    solution_from_json,
    solution_to_json,
)
from neargroup.solutions import MNSolution, residual_mn


def test_roundtrip_mn(corpus_mn, tmp_path):
    for name, s in corpus_mn.items():
        path = tmp_path / f"{name}.json"
        save_solution(s, path)
        s2 = load_solution(path)
        assert s2.group.factors == s.group.factors
        assert s2.bichar.gram == s.bichar.gram  # bit-exact phases
        assert s2.form.values == s.form.values
        assert np.array_equal(s2.b, s.b)  # exact doubles via repr
        assert s2.c == s.c


def test_roundtrip_general(corpus_all, tmp_path):
    s = corpus_all["z3_m6"]
    path = tmp_path / "g.json"
    save_solution(s, path)
    s2 = load_solution(path)
    assert np.array_equal(s2.btensor, s.btensor)
    assert s2.acj.c_t == s.acj.c_t


def test_bundled_corpus_loads_and_verifies(corpus_all):
    for name in corpus_all:
        s = load_bundled(name)
        if isinstance(s, MNSolution):
            assert residual_mn(s).passed


def test_archive_roundtrip(corpus_mn, tmp_path):
    arch = Archive(tmp_path / "arch")
    for s in corpus_mn.values():
        arch.store(s)
    assert len(arch.entries()) == len(corpus_mn)
    for s in arch.load_all():
        pass  # load re-verifies internally


def test_archive_rejects_bad(tmp_path, corpus_mn):
    s = corpus_mn["z2_m2"]
    bad = MNSolution(s.group, s.bichar, s.form, s.b + 1e-2, s.c)
    with pytest.raises(ValueError):
        Archive(tmp_path / "arch2").store(bad)


def test_config_defaults_and_env(tmp_path):
    cfg = load_config()
    assert cfg.tolerance == 1e-10
    f = tmp_path / "cfg"
    f.write_text("tolerance = 1e-9\nrandom_starts = 77\n# comment\n")
    cfg = load_config(f)
    assert cfg.tolerance == 1e-9 and cfg.random_starts == 77
    cfg = load_config(f, env={"NEARGROUP_TOLERANCE": "1e-8"})
    assert cfg.tolerance == 1e-8
    with pytest.raises(ValueError):
        Config(tolerance=1.0)


def test_parse_group():
    assert parse_group("Z4").factors == (4,)
    assert parse_group("Z2xZ2xZ3").factors == (2, 6)  # canonicalized
    with pytest.raises(ValueError):
        parse_group("A5")


def test_cli_verify_pass_and_fail(tmp_path, corpus_mn, capsys):
    assert main(["verify", "bundled/z5_m5.json"]) == 0
    capsys.readouterr()
    s = corpus_mn["z2_m2"]
    bad = MNSolution(s.group, s.bichar, s.form, s.b + 1e-2, s.c)
    p = tmp_path / "bad.json"
    save_solution(bad, p)
    assert main(["verify", str(p)]) == 1
    capsys.readouterr()
    assert main(["verify", str(tmp_path / "missing.json")]) == 2


def test_cli_json_deterministic(capsys):
    assert main(["--json", "classify", "Z2", "2"]) == 0
    out1 = capsys.readouterr().out
    assert main(["--json", "classify", "Z2", "2"]) == 0
    out2 = capsys.readouterr().out
    assert out1 == out2  # byte-identical for identical inputs and seeds
    data = json.loads(out1)
    assert data["num_classes"] == 1


def test_cli_classify_z3_6_json(capsys):
    assert main(["--json", "classify", "Z3", "6"]) == 0
    data = json.loads(capsys.readouterr().out)
    assert data["num_classes"] == 2
    assert all(c["case"] is not None for c in data["classes"])
    assert all(c["max_residual"] < 1e-10 for c in data["classes"])


def test_cli_graph_and_indicators(capsys):
    assert main(["graph", "Z3", "2"]) == 0
    out = capsys.readouterr().out
    assert "graph principal" in out and "v_rho" in out
    assert main(["indicators", "bundled/z2_m2.json"]) == 0
    out = capsys.readouterr().out
    assert "nu_21" in out


def test_cli_dequiv_and_equiv(capsys):
    assert main(["dequiv", "bundled/z2z2_m4.json", "--subgroup", "1,1"]) == 0
    capsys.readouterr()
    assert main(["equiv", "bundled/z5_m5.json", "--aut", "4"]) == 0
    capsys.readouterr()
    assert main(["equiv", "bundled/z3_m6.json", "--gamma", "D8"]) == 0
    capsys.readouterr()
    # input errors
    assert main(["dequiv", "bundled/z2z2_m4.json", "--subgroup", "1,0"]) == 2
    capsys.readouterr()


def test_cli_export_tuple(tmp_path, capsys):
    out = tmp_path / "t.json"
    assert main(["export", "bundled/z2_m2.json", "--tuple",
                 "--output", str(out)]) == 0
    capsys.readouterr()
    data = json.loads(out.read_text())
    assert data["n"] == 2 and data["m"] == 2


def test_cli_resource_exit(capsys):
    assert main(["forms", "Z128"]) == 3
    capsys.readouterr()


def test_exact_c_phase_in_json(corpus_mn):
    from neargroup.io import solution_to_json

    data = solution_to_json(corpus_mn["z2_m2"])
    assert data["c_phase"] == {"num": 7, "den": 24}  # e^{7 pi i / 12}
    data5 = solution_to_json(corpus_mn["z5_m5"])
    assert data5["c_phase"] == {"num": 1, "den": 2}  # c = -1
