import json

import pytest

from hypersymp import cli, report
from hypersymp.algebra_core import data_to_json
from hypersymp.families import kodaira_data


def run(capsys, *argv):
    code = cli.main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def verify(capsys, *argv):
    code, out, _ = run(capsys, "verify-all", *argv)
    return code, json.loads(out)


def test_verify_threestep(capsys):
    code, rep = verify(capsys, "--example", "threestep", "--a", "0", "--b", "1", "--c", "0")
    assert code == 0
    s = rep
    assert (s["step"], s["flat"], s["ricci_zero"]) == (3, False, True)
    assert rep["internal_errors"] == []
    assert rep["curvature"]["minus_4_ad_identity"] is True


def test_verify_threestep_flat(capsys):
    code, rep = verify(capsys, "--example", "threestep", "--a", "1", "--b", "1", "--c", "1")
    assert code == 0
    assert (rep["step"], rep["flat"]) == (2, True)


def test_verify_kodaira(capsys):
    code, rep = verify(capsys, "--example", "kodaira", "--n", "1")
    assert code == 0
    s = rep
    assert (s["step"], s["flat"], s["centre_dim"]) == (2, True, 4)
    assert rep["centre"]["J_stable"] and rep["centre"]["matches_connection_kernel"]


def test_verify_abelian_file(tmp_path, capsys):
    zero = [[[0] * 4 for _ in range(4)] for _ in range(4)]
    omega = [[0, 1, 0, 0], [-1, 0, 0, 0], [0, 0, 0, 1], [0, 0, -1, 0]]
    path = tmp_path / "abelian.json"
    path.write_text(json.dumps({"dim": 4, "nabla": zero, "nabla_prime": zero, "omega": omega}))
    code, rep = verify(capsys, str(path))
    assert code == 0
    assert rep["step"] == 1 and rep["centre_dim"] == 8
    assert all(rep["abelian"].values())


def test_example_round_trips_through_validate(tmp_path, capsys):
    path = tmp_path / "k.json"
    assert run(capsys, "example", "--example", "kodaira", "-o", str(path))[0] == 0
    assert json.loads(path.read_text()) == data_to_json(kodaira_data(1))
    code, out, _ = run(capsys, "validate", str(path))
    assert code == 0 and json.loads(out)["valid"] is True


def test_validate_degenerate_omega(tmp_path, capsys):
    zero = [[[0] * 2 for _ in range(2)] for _ in range(2)]
    path = tmp_path / "d.json"
    path.write_text(json.dumps({"dim": 2, "nabla": zero, "nabla_prime": zero, "omega": [[0, 0], [0, 0]]}))
    code, _, err = run(capsys, "validate", str(path))
    assert code == 1 and "input error" in err


def test_validate_invalid_equations(tmp_path, capsys):
    obj = data_to_json(kodaira_data(1))
    obj["nabla"][0][0][1] = "1"
    path = tmp_path / "bad.json"
    path.write_text(json.dumps(obj))
    code, out, err = run(capsys, "validate", str(path))
    assert code == 1
    assert json.loads(out)["valid"] is False
    assert "eq1" in err and not err.startswith("[")
    assert run(capsys, "verify-all", str(path))[0] == 1


def test_malformed_json(tmp_path, capsys):
    path = tmp_path / "m.json"
    path.write_text("{not json")
    assert run(capsys, "validate", str(path))[0] == 1


def test_missing_or_double_source(tmp_path, capsys):
    code, _, err = run(capsys, "build")
    assert code == 1 and "no input" in err
    assert run(capsys, "build", str(tmp_path / "x.json"), "--example", "kodaira")[0] == 1


def test_usage_error_exits_1(capsys):
    with pytest.raises(SystemExit) as info:
        cli.main(["verify-all", "--example", "nonsense"])
    assert info.value.code == 1
    with pytest.raises(SystemExit) as info:
        cli.main([])
    assert info.value.code == 1


def test_bad_parameters(capsys):
    assert run(capsys, "build", "--example", "threestep", "--a", "0.5")[0] == 1
    assert run(capsys, "build", "--example", "kodaira", "--n", "0")[0] == 1
    args = ("geodesic", "--example", "kodaira", "--a0", "1,0,0,0", "--b0", "0,0,0,0")
    assert run(capsys, *args, "--step", "-1")[0] == 1
    assert run(capsys, *args, "--t-end", "x")[0] == 1
    assert run(capsys, "geodesic", "--example", "kodaira", "--a0", "1,0", "--b0", "0,0,0,0")[0] == 1


def test_build_table(capsys):
    code, out, _ = run(capsys, "build", "--example", "kodaira")
    assert code == 0
    assert isinstance(json.loads(out), dict)


def test_geodesic_csv(capsys):
    code, out, _ = run(capsys, "geodesic", "--example", "kodaira", "--a0", "1,0,0,0", "--b0", "1,0,0,0",
                       "--t-end", "1", "--step", "1/10")
    assert code == 0
    lines = out.splitlines()
    assert lines[0] == "t,a_1,a_2,a_3,a_4,b_1,b_2,b_3,b_4"
    assert len(lines) == 12
    assert [float(x) for x in lines[0 + 1].split(",")] == [0, 1, 0, 0, 0, 1, 0, 0, 0]


def test_coframe_command(capsys):
    code, out, _ = run(capsys, "coframe", "--example", "threestep", "--point", "0,0,0,0,1,0,0,0")
    assert code == 0
    obj = json.loads(out)
    assert obj["coframe"][4] == ["1", "0", "1", "0", "1", "0", "0", "0"]
    assert len(obj["metric"]) == 8


def test_curvature_command(capsys):
    code, out, _ = run(capsys, "curvature", "--example", "threestep")
    obj = json.loads(out)
    assert code == 0 and obj["zero"] is False and obj["ricci_zero"] is True
    assert obj["nonzero_operators"]
    code, out, _ = run(capsys, "curvature", "--example", "kodaira")
    assert json.loads(out)["zero"] is True


def test_report_format_is_deterministic(tmp_path, capsys):
    first, second = tmp_path / "1.json", tmp_path / "2.json"
    run(capsys, "verify-all", "--example", "threestep", "-o", str(first))
    run(capsys, "verify-all", "--example", "threestep", "-o", str(second))
    raw = first.read_bytes()
    assert raw == second.read_bytes()
    assert raw.endswith(b"}\n") and b"\r" not in raw
    assert raw.startswith(b'{\n  "dim": 4,\n  "algebra_dim": 8')


def test_internal_error_exit_2(monkeypatch, capsys):
    def broken(data):
        rep = report.verify_all(data)
        rep["internal_errors"] = ["bianchi"]
        return rep

    monkeypatch.setattr(cli, "verify_all", broken)
    code, _, err = run(capsys, "verify-all", "--example", "kodaira")
    assert code == 2 and "bianchi" in err


def test_raised_internal_error_exit_2(monkeypatch, capsys):
    from hypersymp.errors import InternalError

    def boom(data):
        raise InternalError("forced")

    monkeypatch.setattr(cli, "curvature_json", boom)
    assert run(capsys, "curvature", "--example", "kodaira")[0] == 2
