from __future__ import annotations

import json
from pathlib import Path

from pytest import approx, fixture, mark

from lorentz_ot.cli import INPUT_ERROR, main
from lorentz_ot.persistence import read_space


@fixture
def unit_box(tmp_path):
    path = tmp_path / "space.json"
    assert main(["lattice", "--region", "box:0,0:1,1", "--spacing", "0.5", str(path)]) == 0
    return path


def test_lattice_and_validate(tmp_path, capsys):
    path = str(tmp_path / "diamond.json")
    assert main(["lattice", "--region", "diamond:2", "--spacing", "0.5", path]) == 0
    assert "[LATTICE] 13 points" in capsys.readouterr().out
    assert read_space(path).n == 13
    assert main(["validate", path]) == 0
    assert "13 points, 0 violations" in capsys.readouterr().out


def test_sprinkling_needs_density_and_seed(tmp_path, capsys):
    path = str(tmp_path / "space.json")
    assert main(["sprinkle", path]) == INPUT_ERROR
    assert main(["sprinkle", "--density", "50", path]) == INPUT_ERROR
    assert "[ERROR] sampler.seed" in capsys.readouterr().err
    assert main(["--seed", "3", "sprinkle", "--density", "50", path]) == 0
    assert read_space(path).meta.seed == 3


def test_certify_from_the_command_line(tmp_path, unit_box):
    out = tmp_path / "out"
    argv = ["--out", str(out), "certify-tmcp", "--space", str(unit_box), "--mu", "slice:0:0", "--x1", "point:1,0.5"]
    assert main(argv + ["--K", "0", "--N", "2"]) == 0
    assert json.loads((out / "report.json").read_text())["verdict"] == "PASS"
    assert main(argv + ["--K", "0"]) == INPUT_ERROR


@mark.parametrize(
    "argv",
    [
        ["frobnicate"],
        ["solve", "--backend", "glpk"],
        ["validate", "missing.json"],
        ["run", "missing.cfg"],
    ],
)
def test_input_errors(argv, tmp_path, monkeypatch):
    monkeypatch.chdir(tmp_path)
    assert main(argv) == INPUT_ERROR


@mark.parametrize("K, extra, code", [(1.0, [], 0), (4.0, ["--tol", "1e-6"], 2)])
def test_run_exit_codes(tmp_path, K, extra, code):
    config = tmp_path / "bonnet-myers.cfg"
    config.write_text(
        f"[model]\nregion = diamond:2\n[sampler]\nspacing = 0.25\n[task]\nname = compare\ncheck = bonnet-myers\nK = {K}\nN = 2\n"
    )
    assert main(["--out", str(tmp_path / "out"), *extra, "run", str(config)]) == code


def test_vacuous_runs_exit_with_three(tmp_path, unit_box):
    argv = ["--out", str(tmp_path / "out"), "solve", "--space", str(unit_box), "--mu", "point:0,0", "--nu", "point:0,1"]
    assert main(argv) == 3


def test_hawking_reads_the_rays_of_disintegrate(tmp_path, unit_box, capsys):
    space, out = str(tmp_path / "wedge.json"), tmp_path / "out"
    region = ["--model", "milne-wedge", "--region", "cone:past:1:0.5:0.1", "--spacing", "0.05"]
    assert main(["lattice", *region, space]) == 0
    argv = ["--out", str(out), "disintegrate", "--space", space, "--V", "hyperboloid:1", "--K", "0", "--N", "2"]
    assert main(argv) == 0
    rays = str(out / "rays.json")
    assert json.loads(Path(rays).read_text())["schema"] == "rays v1"

    argv = ["--out", str(tmp_path / "hawking"), "hawking", "--space", space, "--rays", rays]
    assert main(argv + ["--H0", "-1", "--K", "0", "--N", "2"]) == 0
    report = json.loads((tmp_path / "hawking" / "report.json").read_text())
    (check,) = report["checks"]
    assert check["verdict"] == "PASS"
    assert check["rows"][0][0] == approx(0.9)

    assert main(["hawking", "--space", str(unit_box), "--rays", rays, "--H0", "-1", "--K", "0", "--N", "2"]) == INPUT_ERROR
    assert main(["hawking", "--space", space, "--H0", "-1", "--K", "0", "--N", "2"]) == INPUT_ERROR
    assert "input.V" in capsys.readouterr().err


def test_spelled_out_aliases(tmp_path, unit_box):
    out = tmp_path / "out"
    argv = ["--out", str(out), "certify-tmcp", "--space", str(unit_box), "--mu0", "slice:0:0", "--x1", "point:1,0.5"]
    assert main(argv + ["--grid", "5", "--K", "0", "--N", "2"]) == 0
    assert json.loads((out / "report.json").read_text())["verdict"] == "PASS"
