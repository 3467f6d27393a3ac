from __future__ import annotations

import json
import subprocess
import sys

import pytest

from ilwhodge.cli import main
from ilwhodge.exactnum import rational_from_str


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr().out
    return code, out


def run_json(capsys, *argv):
    code, out = run(capsys, *argv, "--format", "json")
    return code, json.loads(out)


class TestBernoulli:
    def test_paper_values_present(self, capsys):
        code, out = run(capsys, "bernoulli", "--max", "4")
        assert code == 0
        assert "1/6" in out and "-1/30" in out

    def test_single_row(self, capsys):
        code, data = run_json(capsys, "bernoulli", "--max", "0")
        assert code == 0
        assert data["details"] == [{"kind": "B", "index": 0, "value": "1"}]

    def test_recurrence_oracle_value(self, capsys):
        code, data = run_json(capsys, "bernoulli", "--max", "12")
        values = {(r["kind"], r["index"]): r["value"] for r in data["details"]}
        assert values[("B", 12)] == "-691/2730"
        assert values[("C", 6)] == rational_to_str_roundtrip(values[("C", 6)])

    def test_envelope_schema(self, capsys):
        code, data = run_json(capsys, "bernoulli", "--max", "2")
        assert data["command"] == "bernoulli"
        assert data["status"] == "ok"
        assert set(data["config"]) == {
            "genus_order",
            "hierarchy_index",
            "output_format",
            "seed",
            "output_path",
        }


def rational_to_str_roundtrip(s):
    from ilwhodge.exactnum import rational_to_str

    return rational_to_str(rational_from_str(s))


class TestConstants:
    def test_values(self, capsys):
        code, data = run_json(capsys, "constants", "--max-genus", "3")
        assert code == 0
        rows = data["details"]
        assert rows[0] == {"g": 1, "c_g": "1/24", "dispersion": "1/12"}
        assert rows[2]["c_g"] == "1/60480"


class TestOnePoint:
    def test_genus_one(self, capsys):
        code, data = run_json(capsys, "one-point", "--max-genus", "1")
        assert code == 0
        assert [r["value"] for r in data["details"]] == ["1/24", "1/24"]

    def test_genus_two_contains_7_5760(self, capsys):
        code, data = run_json(capsys, "one-point", "--max-genus", "2")
        assert "7/5760" in [r["value"] for r in data["details"]]

    def test_zero_rejected_with_usage_error(self, capsys):
        with pytest.raises(SystemExit) as exc:
            main(["one-point", "--max-genus", "0"])
        assert exc.value.code == 2

    def test_csv(self, capsys):
        code, out = run(capsys, "one-point", "--max-genus", "1", "--format", "csv")
        assert out.splitlines()[0] == "g,j,d,value"


class TestExpressions:
    def test_h1_density(self, capsys):
        code, out = run(capsys, "hamiltonian", "--index", "1", "--genus", "0")
        assert code == 0
        assert out.strip() == "int(1/6*u^3) dx"

    def test_h2_density(self, capsys):
        code, out = run(capsys, "hamiltonian", "--index", "2", "--genus", "0")
        assert out.strip() == "int(1/24*u^4) dx"

    def test_flow_first_order(self, capsys):
        code, out = run(capsys, "flow", "--index", "1", "--genus", "1")
        assert out.strip() == "u*u_1 + 1/12*h*u_3"

    def test_flow_latex(self, capsys):
        code, out = run(capsys, "flow", "--index", "1", "--genus", "1", "--format", "latex")
        assert r"\hbar" in out

    def test_flow_csv(self, capsys):
        code, out = run(capsys, "flow", "--index", "1", "--genus", "1", "--format", "csv")
        lines = out.splitlines()
        assert lines[0] == "monomial,h_exp,e_exp,coefficient"
        assert "u_3,1,0,1/12" in lines

    def test_flow_json_round_trips(self, capsys):
        code, data = run_json(capsys, "flow", "--index", "1", "--genus", "2")
        terms = data["details"][0]["flow"]
        for term in terms:
            for entry in term["coef"]["terms"]:
                rational_from_str(entry["coef"])  # must parse


class TestVerify:
    def test_cg_ok(self, capsys):
        code, data = run_json(capsys, "verify", "cg", "--genus", "5")
        assert code == 0
        assert data["status"] == "ok"

    def test_all_ok(self, capsys):
        code, data = run_json(capsys, "verify", "all", "--genus", "2")
        assert code == 0
        names = [d["name"] for d in data["details"]]
        assert names == [
            "cg",
            "ilw-t1",
            "ilw-t2",
            "commute(2,1)",
            "commute(3,2)",
            "linear-term",
            "one-point-reverse",
        ]

    def test_perturbed_cg_fails(self, capsys):
        code, data = run_json(
            capsys, "verify", "cg", "--genus", "4", "--perturb-cg", "2:1/1000000"
        )
        assert code == 1
        assert data["status"] == "mismatch"
        assert data["details"][0]["first_mismatch"]["g"] == 2

    def test_perturbed_t1_fails(self, capsys):
        code, data = run_json(
            capsys, "verify", "ilw-t1", "--genus", "3", "--perturb-cg", "1:1/1000000"
        )
        assert code == 1
        assert data["details"][0]["first_mismatch"]["h_exp"] == 1

    def test_perturbed_linear_term_fails(self, capsys):
        code, data = run_json(
            capsys, "verify", "linear-term", "--genus", "3", "--perturb-cg", "3:1/1000000"
        )
        assert code == 1
        assert data["details"][0]["first_mismatch"]["h_exp"] == 3

    def test_pretty_format(self, capsys):
        code, out = run(capsys, "verify", "cg", "--genus", "3", "--format", "pretty")
        assert code == 0
        assert "PASS  cg" in out

    def test_bad_perturbation_spec(self, capsys):
        with pytest.raises(SystemExit) as exc:
            main(["verify", "cg", "--perturb-cg", "nonsense"])
        assert exc.value.code == 2

    def test_unknown_selector(self, capsys):
        with pytest.raises(SystemExit) as exc:
            main(["verify", "everything"])
        assert exc.value.code == 2


class TestPlumbing:
    def test_output_file(self, tmp_path, capsys):
        target = tmp_path / "out.json"
        code = main(["constants", "--max-genus", "2", "--format", "json", "--output", str(target)])
        assert code == 0
        assert capsys.readouterr().out == ""
        data = json.loads(target.read_text())
        assert data["details"][0]["c_g"] == "1/24"

    def test_env_format_override(self, capsys, monkeypatch):
        monkeypatch.setenv("ILWHODGE_FORMAT", "json")
        code, out = run(capsys, "constants", "--max-genus", "1")
        json.loads(out)

    def test_flag_beats_env(self, capsys, monkeypatch):
        monkeypatch.setenv("ILWHODGE_FORMAT", "json")
        code, out = run(capsys, "constants", "--max-genus", "1", "--format", "csv")
        assert out.splitlines()[0] == "g,c_g,dispersion"

    def test_env_genus_default(self, capsys, monkeypatch):
        monkeypatch.setenv("ILWHODGE_GENUS", "2")
        code, data = run_json(capsys, "verify", "cg")
        assert data["details"][0]["order_checked"] == 2

    def test_deterministic_output(self, capsys):
        _, a = run(capsys, "verify", "all", "--genus", "2", "--format", "json")
        _, b = run(capsys, "verify", "all", "--genus", "2", "--format", "json")
        assert a == b

    def test_module_entry_point(self):
        proc = subprocess.run(
            [sys.executable, "-m", "ilwhodge", "bernoulli", "--max", "4", "--format", "csv"],
            capture_output=True,
            text=True,
        )
        assert proc.returncode == 0
        assert "B,4,-1/30" in proc.stdout
