import json
import math
import subprocess
import sys

import pytest

from bajmeans.cli import main


def write(tmp_path, name, data):
    path = tmp_path / name
    path.write_text(json.dumps(data))
    return str(path)


@pytest.fixture
def files(tmp_path):
    half = [0, "inf"]
    return {
        "arith": write(tmp_path, "arith.json", {"n": 2, "domain": half, "f": "x", "p": ["1", "1"]}),
        "geo": write(tmp_path, "geo.json", {"n": 2, "domain": half, "f": "ln(x)", "p": ["1", "1"]}),
        "jump": write(tmp_path, "jump.json", {"domain": [-1, 1], "f": "piecewise(x<0: x; x>=0: x+1)"}),
        "id": write(tmp_path, "id.json", {"domain": [0, 1], "f": "x"}),
        "ln": write(tmp_path, "ln.json", {"domain": half, "f": "ln(x)"}),
        "x01": write(tmp_path, "x01.json", {"n": 2, "domain": [0, 1], "f": "x", "p": ["1", "1"]}),
        "bad": write(tmp_path, "bad.json", {"n": 2, "domain": [0, 1], "f": "x*", "p": ["1", "1"]}),
        "dir": tmp_path,
    }


def run(capsys, *argv):
    code = main([str(a) for a in argv])
    out = capsys.readouterr()
    return code, out.out, out.err


class TestScalars:
    @pytest.mark.parametrize(
        "cmd, args, want",
        [
            ("eval", ["arith", 1, 3], "2.000000000000000"),
            ("eval", ["geo", 1, 4], "2.000000000000000"),
            ("invert", ["jump", 0.5], "0.000000000000000"),
            ("invert", ["id", 0.37], "0.370000000000000"),
            ("invert", ["ln", 0], "1.000000000000000"),
        ],
    )
    def test_outputs(self, capsys, files, cmd, args, want):
        code, out, _ = run(capsys, cmd, files[args[0]], *args[1:])
        assert code == 0
        assert out.strip() == want


class TestExitCodes:
    def test_arity_is_usage_error(self, capsys, files):
        code, _, err = run(capsys, "eval", files["arith"], 5)
        assert code == 64 and "arity" in err

    def test_missing_args(self, capsys):
        with pytest.raises(SystemExit) as info:
            main(["eval"])
        assert info.value.code == 64

    def test_unknown_command(self):
        with pytest.raises(SystemExit) as info:
            main(["frobnicate"])
        assert info.value.code == 64

    def test_syntax_error_is_spec_error(self, capsys, files):
        code, _, err = run(capsys, "eval", files["bad"], 0.2, 0.3)
        assert code == 65 and "ExprSyntaxError" in err

    def test_missing_file(self, capsys, files):
        assert run(capsys, "eval", files["dir"] / "nope.json", 1, 2)[0] == 65

    def test_outside_domain(self, capsys, files):
        assert run(capsys, "eval", files["geo"], -1, 2)[0] == 65


class TestJsonCommands:
    def test_derivs_table(self, capsys, files):
        code, out, _ = run(capsys, "derivs", files["geo"], 1.0)
        rows = {r["label"]: r for r in json.loads(out)}
        assert code == 0
        assert rows["d1"]["formula"] == 0.5
        assert rows["d1d2"]["formula"] == pytest.approx(0.25)
        assert rows["d1d1d1"]["formula"] == pytest.approx(0.375)
        assert set(rows["d1"]) == {"index", "label", "formula", "fd", "rel_err"}

    def test_derivs_order(self, capsys, files):
        _, out, _ = run(capsys, "derivs", files["geo"], 1.0, "--order", 1)
        assert len(json.loads(out)) == 2

    def test_transform_reciprocal(self, capsys, files):
        code, out, _ = run(capsys, "transform", files["x01"], 0, 1, 1, 0)
        spec = json.loads(out)
        assert code == 0 and spec["f"] == "1/x" and spec["direction"] == "dec"

    def test_transform_identity_writes_file(self, capsys, files):
        target = files["dir"] / "out.json"
        code, _, _ = run(capsys, "transform", files["x01"], 1, 0, 0, 1, "--out", target)
        spec = json.loads(target.read_text())
        assert code == 0 and spec["f"] == "x" and spec["p"] == ["1", "1"]

    def test_transform_rejects_vanishing_denominator(self, capsys, files):
        assert run(capsys, "transform", files["x01"], 1, 0, 1, -0.5)[0] == 65

    def test_check_equal_not_equal(self, capsys, files):
        code, out, _ = run(capsys, "check-equal", files["arith"], files["geo"])
        v = json.loads(out)
        assert code == 1 and v["status"] == "NotEqual" and v["seed"] == 42
        assert "counterexample" in v and "residuals" in v

    def test_check_equal_equal(self, capsys, files):
        code, out, _ = run(capsys, "--seed", 7, "check-equal", files["geo"], files["geo"])
        v = json.loads(out)
        assert code == 0 and v["status"] == "Equal" and v["seed"] == 7

    def test_check_equal_inconclusive(self, capsys, files):
        _, out, _ = run(capsys, "make-exceptional", files["id"], "--P", 1, 0, 1, "--out-prefix", files["dir"] / "exc")
        assert json.loads(out)["g"] == "atan(x)"
        code, out, _ = run(capsys, "check-equal", files["dir"] / "exc_f.json", files["dir"] / "exc_g.json")
        assert code == 2 and json.loads(out)["status"] == "Inconclusive"

    def test_check_equal_deterministic(self, capsys, files):
        outs = [run(capsys, "check-equal", files["arith"], files["geo"])[1] for _ in range(2)]
        assert outs[0] == outs[1]

    def test_global_flags_after_command(self, capsys, files):
        code, out, _ = run(capsys, "check-equal", files["geo"], files["geo"], "--grid", 16, "--tol", 1e-6)
        assert code == 0

    def test_verify_smf(self, capsys, files):
        code, out, _ = run(capsys, "verify-smf", files["jump"])
        assert code == 0 and json.loads(out)["all_pass"] is True


def test_module_entry_point(files):
    proc = subprocess.run([sys.executable, "-m", "bajmeans", "eval", files["geo"], "1", "4"],
                          capture_output=True, text=True, check=False)
    assert proc.returncode == 0
    assert math.isclose(float(proc.stdout), 2.0)
