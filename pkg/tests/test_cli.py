import json

import numpy as np
import pandas as pd
import pytest

from main import EXIT_FAILURE, EXIT_OK, main, parse_axis, parse_body, parse_omega, parse_point
from src.errors import ExpressionError, PGAError
from src.pga3d import bivector_coords
from src.rigid_body import TRAJECTORY_COLUMNS, Trajectory
from tests.conftest import assert_close


def _run(tmp_path, *argv):
    return main(list(argv) + ["--out", str(tmp_path)])


def _read(path):
    with open(path) as f:
        return json.load(f)


def test_parse_axis():
    assert_close(parse_axis("x").direction, [1.0, 0.0, 0.0])
    line = parse_axis('{"point": [0, 1, 0], "direction": [2, 0, 0]}')
    assert_close(line.coords, [0.0, 0.0, -1.0, 1.0, 0.0, 0.0])
    assert_close(parse_axis("[0, 0, 0, 0, 0, 3]").coords, [0.0, 0.0, 0.0, 0.0, 0.0, 1.0])
    with pytest.raises(PGAError):
        parse_axis("[1, 2]")


def test_parse_body():
    assert len(parse_body("octahedral")) == 6
    assert parse_body("[[2, [1, 0, 0]], [1, [0, 1, 0]]]") == [(2.0, (1.0, 0.0, 0.0)), (1.0, (0.0, 1.0, 0.0))]
    with pytest.raises(PGAError):
        parse_body("[]")


def test_body_from_file(tmp_path):
    path = tmp_path / "body.json"
    path.write_text("[[1, [1, 0, 0]], [1, [-1, 0, 0]]]")
    assert len(parse_body(f"@{path}")) == 2


def test_parse_omega():
    assert_close(bivector_coords(parse_omega("[0.2, 1.0, 0.3]")), [0.0, 0.0, 0.0, -0.1, -0.5, -0.15])
    assert_close(bivector_coords(parse_omega('{"velocity": [2, 0, 0]}')), [-1.0, 0.0, 0.0, 0.0, 0.0, 0.0])
    with pytest.raises(PGAError):
        parse_omega("[1, 2]")


def test_parse_point():
    assert parse_point("x=1, y=2.5", ["x", "y"]) == {"x": 1.0, "y": 2.5}
    assert parse_point("3", ["t"]) == {"t": 3.0}
    assert parse_point('{"x": 1}', ["x"]) == {"x": 1.0}
    with pytest.raises(ExpressionError):
        parse_point("3", ["x", "y"])


def test_cayley(tmp_path, capsys):
    assert _run(tmp_path, "cayley") == EXIT_OK
    document = _read(tmp_path / "cayley_2d.json")
    assert document["labels"] == ["1", "e0", "e1", "e2", "E0", "E1", "E2", "I"]
    assert document["table"][2] == ["e1", "-E2", "1", "E0", "e2", "I", "-e0", "E1"]
    assert document["metadata"]["command"] == "cayley"
    assert "E0" in capsys.readouterr().out


def test_check_writes_results_and_report(tmp_path):
    assert _run(tmp_path, "check", "2d", "--trials", "5", "--seed", "42") == EXIT_OK
    document = _read(tmp_path / "check_2d_seed42.json")
    assert document["summary"]["all_passed"] is True
    assert document["metadata"]["parameters"]["trials"] == 5
    assert {row["row"] for row in document["rows"]} >= {"meet", "join", "reflect"}
    assert (tmp_path / "check_2d_seed42.md").read_text().startswith("# Construction table check (2d)")


def test_check_csv(tmp_path):
    assert _run(tmp_path, "check", "3", "--trials", "3", "--format", "csv") == EXIT_OK
    files = list(tmp_path.glob("check_3d_seed*.csv"))
    assert len(files) == 1
    df = pd.read_csv(files[0])
    assert df["passed"].all()


def test_reruns_are_byte_identical(tmp_path):
    first, second = tmp_path / "first", tmp_path / "second"
    for out in (first, second):
        assert main(["check", "2d", "--trials", "5", "--out", str(out)]) == EXIT_OK
        assert main(["orbit", "--k", "4", "--out", str(out)]) == EXIT_OK
    names = sorted(p.name for p in first.iterdir())
    assert names == sorted(p.name for p in second.iterdir())
    for name in names:
        assert (first / name).read_bytes() == (second / name).read_bytes()


def test_orbit(tmp_path):
    assert _run(tmp_path, "orbit", "--k", "6") == EXIT_OK
    document = _read(tmp_path / "orbit_k6.json")
    assert document["summary"]["orbit_size"] == 12
    assert len(document["rows"]) == 12


def test_orbit_with_wrong_mirrors_fails(tmp_path):
    assert _run(tmp_path, "orbit", "--k", "6", "--mirror-k", "5") == EXIT_FAILURE
    assert _read(tmp_path / "orbit_k6_mirror5.json")["summary"]["closed"] is False


def test_screw(tmp_path):
    assert _run(tmp_path, "screw", "--pitch", "0.5", "--samples", "8") == EXIT_OK
    document = _read(tmp_path / "screw_samples8.json")
    assert document["summary"]["advance_error"] < 1e-12
    assert len(document["rows"]) == 8


def test_top_json(tmp_path):
    code = _run(tmp_path, "top", "--body", "octahedral", "--omega", "[0, 0, 1]",
                "--dt", "0.01", "--steps", "50", "--record-every", "10")
    assert code == EXIT_OK
    trajectory = Trajectory.from_json((tmp_path / "top_steps50.json").read_text())
    assert len(trajectory) == 6
    assert trajectory.metadata["summary"]["max_relative_energy_drift"] < 1e-12
    assert (tmp_path / "top_steps50.md").exists()


def test_top_csv(tmp_path):
    code = _run(tmp_path, "top", "--steps", "20", "--dt", "0.01", "--record-every", "5", "--format", "csv")
    assert code == EXIT_OK
    df = pd.read_csv(tmp_path / "top_steps20.csv")
    assert list(df.columns) == TRAJECTORY_COLUMNS
    assert np.allclose(df["t"], [0.0, 0.05, 0.1, 0.15, 0.2])


def test_diff(tmp_path, capsys):
    assert _run(tmp_path, "diff", "--expr", "x^2*sin(x)", "--at", "2") == EXIT_OK
    printed = json.loads(capsys.readouterr().out.strip().splitlines()[-1])
    assert printed["value"] == pytest.approx(4.0 * np.sin(2.0))
    assert printed["derivative"] == pytest.approx(4.0 * np.sin(2.0) + 4.0 * np.cos(2.0))
    assert _read(tmp_path / "diff.json")["metadata"]["parameters"]["at"] == {"x": 2.0}


def test_diff_gradient(tmp_path, capsys):
    assert _run(tmp_path, "diff", "--expr", "x*y + y^2", "--at", "x=1,y=3") == EXIT_OK
    printed = json.loads(capsys.readouterr().out.strip().splitlines()[-1])
    assert printed["gradient"] == [3.0, 7.0]


@pytest.mark.parametrize(
    "argv",
    [
        ["orbit", "--k", "1"],
        ["orbit", "--k", "6", "--mirror-k", "1"],
        ["check", "2d", "--trials", "0"],
        ["screw", "--samples", "1"],
        ["screw", "--axis", "[1, 2, 3]"],
        ["top", "--dt", "0"],
        ["top", "--body", "not json"],
        ["top", "--body", "[[1]]"],
        ["top", "--omega", "[1, 2]"],
        ["diff", "--expr", "x +", "--at", "1"],
        ["diff", "--expr", "x*y", "--at", "1"],
        ["check", "4d"],
    ],
)
def test_usage_errors_exit_with_2(tmp_path, argv):
    with pytest.raises(SystemExit) as excinfo:
        _run(tmp_path, *argv)
    assert excinfo.value.code == 2


def test_diff_outside_domain_exits_with_1(tmp_path, capsys):
    assert _run(tmp_path, "diff", "--expr", "log(x)", "--at", "-1") == EXIT_FAILURE
    assert not (tmp_path / "diff.json").exists()
    with pytest.raises(SystemExit):
        main(["diff", "--help"])
    assert "exits with 1" in " ".join(capsys.readouterr().out.split())
