import json

import pytest

from presburger.cli import main


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr().out
    return code, out


class TestClassifyCommand:
    def test_defines_ordering_json(self, capsys):
        code, out = run(capsys, "classify", "--vars", "x,y", "--formula", "0 <= y & y <= x")
        assert code == 0
        data = json.loads(out)
        assert data["schema"] == "1"
        assert data["verdict"] == "defines_ordering"
        assert data["verification"]["ok"] is True

    def test_group_definable_text(self, capsys):
        code, out = run(capsys, "classify", "--vars", "x", "-f", "x = 0 mod 2", "--format", "text")
        assert code == 0
        assert "group_definable" in out

    def test_file_input(self, capsys, tmp_path):
        path = tmp_path / "f.pa"
        path.write_text("x = 1 mod 3\n", encoding="utf-8")
        code, out = run(capsys, "classify", "--vars", "x", "--file", str(path))
        assert code == 0
        assert json.loads(out)["verdict"] == "group_definable"

    def test_parse_error_exit_1(self, capsys):
        code, out = run(capsys, "classify", "--vars", "x", "-f", "x ==")
        assert code == 1
        assert "error" in json.loads(out)

    def test_missing_vars_exit_1(self, capsys):
        code, out = run(capsys, "classify", "-f", "x = 0")
        assert code == 1


class TestOtherCommands:
    def test_rank(self, capsys):
        code, out = run(capsys, "rank", "--vars", "x,y", "--formula", "y = 0")
        assert code == 0
        assert json.loads(out)["rank"] == 1

    def test_qe(self, capsys):
        code, out = run(capsys, "qe", "-f", "E y. x = y + y")
        assert code == 0
        assert "mod" in json.loads(out)["eliminated"]

    def test_cells(self, capsys):
        code, out = run(capsys, "cells", "--vars", "x,y", "-f", "0 <= y & y <= x")
        assert code == 0
        data = json.loads(out)
        assert data["arity"] == 2 and len(data["terms"]) >= 1

    def test_decompose(self, capsys):
        code, out = run(capsys, "decompose", "--vars", "x", "-f", "!(x = 0)")
        assert code == 0
        data = json.loads(out)
        assert data["rank"] == 1

    def test_decompose_rejects_order(self, capsys):
        code, out = run(capsys, "decompose", "--vars", "x", "-f", "0 <= x")
        assert code == 1

    def test_inradius_quadrant(self, capsys):
        code, out = run(capsys, "inradius", "--dims", "2", "--halfspaces", "0 <= x; 0 <= y")
        assert code == 0
        assert json.loads(out)["inradius"] == "infinite"

    def test_inradius_plank(self, capsys):
        code, out = run(capsys, "inradius", "--dims", "2", "--halfspaces", "0 <= x; x <= 4")
        assert code == 0
        data = json.loads(out)
        assert data["inradius"] == "finite"
        assert data["lo"] == "2"

    def test_inradius_empty(self, capsys):
        code, out = run(capsys, "inradius", "--dims", "1", "--halfspaces", "x < 0; 0 < x")
        assert code == 0
        assert json.loads(out)["inradius"] == "empty"

    def test_eval(self, capsys):
        code, out = run(capsys, "eval", "--vars", "x", "-f", "x = 0 mod 3", "--box", "4")
        assert code == 0
        assert json.loads(out)["points"] == [[-3], [0], [3]]


class TestDeterminism:
    def test_classify_byte_identical(self, capsys):
        args = ("classify", "--vars", "x,y", "--formula", "x <= y & y <= x + 6 & y = x mod 3", "--seed", "7")
        _, out1 = run(capsys, *args)
        _, out2 = run(capsys, *args)
        assert out1 == out2

    def test_selftest_deterministic(self, capsys):
        code1, out1 = run(capsys, "selftest", "--seed", "3")
        code2, out2 = run(capsys, "selftest", "--seed", "3")
        assert code1 == code2 == 0
        assert out1 == out2


if __name__ == "__main__":
    pytest.main([__file__, "-q"])
