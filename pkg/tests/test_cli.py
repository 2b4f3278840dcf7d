import json

import pytest
from click.testing import CliRunner

from nlgames.cli import main, parse_witness
from nlgames.errors import InputError


@pytest.fixture
def runner():
    return CliRunner()


@pytest.fixture
def tiny_cnf(tmp_path):
    p = tmp_path / "tiny.cnf"
    p.write_text("p cnf 3 2\n1 2 3 0\n-1 2 -3 0\n")
    return p


def report(out):
    return json.loads((out / "report.json").read_text())


class TestParseWitness:
    @pytest.mark.parametrize("text", ["110", "1 1 0", "1,1,0", "1 2 -3 0", "v 1 2 -3 0", "-3 1 2"])
    def test_forms(self, text):
        assert parse_witness(text, 3) == [1, 1, 0]

    def test_file(self, tmp_path):
        p = tmp_path / "w.txt"
        p.write_text("v -1 2 3 0\n")
        assert parse_witness(str(p), 3) == [0, 1, 1]

    @pytest.mark.parametrize("text", ["1 2", "1 2 9", "abc"])
    def test_bad(self, text):
        with pytest.raises(InputError):
            parse_witness(text, 3)


class TestEval:
    def test_brute_classical_chsh(self, runner, tmp_path):
        out = tmp_path / "o"
        res = runner.invoke(main, ["eval", "chsh", "--brute-classical", "--out", str(out)])
        assert res.exit_code == 0, res.output
        assert report(out)["value_float"] == pytest.approx(0.75)

    def test_quantum_exact(self, runner, tmp_path):
        out = tmp_path / "o"
        res = runner.invoke(main, ["eval", "chsh", "--quantum", "canned:chsh", "--exact", "--out", str(out)])
        assert res.exit_code == 0, res.output
        assert report(out)["value_float"] == pytest.approx(0.8535533905932737, abs=1e-9)

    def test_needs_one_mode(self, runner, tmp_path):
        res = runner.invoke(main, ["eval", "chsh", "--brute-classical", "--quantum", "canned:chsh", "--out", str(tmp_path)])
        assert res.exit_code == 2

    def test_missing_file(self, runner, tmp_path):
        res = runner.invoke(main, ["eval", str(tmp_path / "nope.json"), "--brute-classical", "--out", str(tmp_path)])
        assert res.exit_code == 2

    def test_jobs_do_not_change_result(self, runner, tmp_path):
        vals = []
        for jobs in (1, 2):
            out = tmp_path / f"j{jobs}"
            res = runner.invoke(
                main,
                ["eval", "chsh", "--quantum", "canned:chsh", "--rounds", "4000", "--seed", "3", "--jobs", str(jobs), "--out", str(out)],
            )
            assert res.exit_code == 0, res.output
            r = report(out)
            vals.append({k: v for k, v in r.items() if k != "jobs"})
        assert vals[0] == vals[1]


class TestCompile:
    def test_compile_and_honest_eval(self, runner, tmp_path, tiny_cnf):
        comp = tmp_path / "c"
        res = runner.invoke(main, ["compile", str(tiny_cnf), "--stage", "binary", "--samples", "16", "--out", str(comp)])
        assert res.exit_code == 0, res.output
        assert (comp / "game.json").is_file()
        out = tmp_path / "e"
        res = runner.invoke(
            main, ["eval", str(comp / "game.json"), "--honest", "--witness", "110", "--rounds", "300", "--out", str(out)]
        )
        assert res.exit_code == 0, res.output
        r = report(out)
        assert r["estimate"] == 1.0 and r["accepted"] == r["rounds"] == 300

    def test_honest_without_witness(self, runner, tmp_path, tiny_cnf):
        comp = tmp_path / "c"
        runner.invoke(main, ["compile", str(tiny_cnf), "--stage", "binary", "--samples", "8", "--out", str(comp)])
        res = runner.invoke(main, ["eval", str(comp / "game.json"), "--honest", "--out", str(tmp_path / "e")])
        assert res.exit_code == 2

    def test_bad_cnf(self, runner, tmp_path):
        p = tmp_path / "bad.cnf"
        p.write_text("p cnf x y\n")
        res = runner.invoke(main, ["compile", str(p), "--out", str(tmp_path / "o")])
        assert res.exit_code == 2


class TestReplay:
    def test_identical(self, runner, tmp_path):
        out = tmp_path / "o"
        runner.invoke(main, ["eval", "chsh", "--brute-classical", "--out", str(out)])
        res = runner.invoke(main, ["replay", str(out / "manifest.json")])
        assert res.exit_code == 0
        assert "bit-identical" in res.output

    def test_detects_tampering(self, runner, tmp_path):
        out = tmp_path / "o"
        runner.invoke(main, ["eval", "chsh", "--brute-classical", "--out", str(out)])
        mpath = out / "manifest.json"
        data = json.loads(mpath.read_text())
        data["outputs"]["report.json"] = "0" * 64
        mpath.write_text(json.dumps(data))
        res = runner.invoke(main, ["replay", str(mpath)])
        assert res.exit_code == 1
        assert "DIFFERS" in res.output

    def test_missing_manifest(self, runner, tmp_path):
        res = runner.invoke(main, ["replay", str(tmp_path / "none.json")])
        assert res.exit_code == 2
