import json
import math

import pytest

from quasivar.cli import (ConfigError, RunConfig, json_line, main,
                          parse_config)

COUPLED_TEXT = """\
# coupled supercritical reference configuration
N = 2
p1 = 1.5
p2 = 1.5
s1 = 1
s2 = 1
q1 = 8
q2 = 8
gamma1 = 4
gamma2 = 4
theta1 = 1/8
theta2 = 1/8
c_star = 1
dimension = 2
n = 17
"""

DECOUPLED_TEXT = """\
N = 2
p1 = 2
p2 = 2
s1 = 0
s2 = 0
q1 = 4
q2 = 4
theta1 = 0.25
theta2 = 0.25
c_star = 0
dimension = 2
n = 17
"""


@pytest.fixture
def coupled_path(tmp_path):
    p = tmp_path / "coupled.txt"
    p.write_text(COUPLED_TEXT)
    return str(p)


@pytest.fixture
def decoupled_path(tmp_path):
    p = tmp_path / "decoupled.txt"
    p.write_text(DECOUPLED_TEXT)
    return str(p)


def run_cli(capsys, *argv) -> tuple[int, list[dict]]:
    code = main(list(argv))
    out = capsys.readouterr().out
    records = [json.loads(line) for line in out.strip().splitlines()]
    return code, records


class TestConfigParsing:
    def test_parses_values_and_comments(self, coupled_path):
        rc = parse_config(coupled_path)
        assert rc.p1 == 1.5 and rc.theta1 == 0.125 and rc.n == 17

    def test_unknown_key_rejected(self, tmp_path):
        p = tmp_path / "bad.txt"
        p.write_text("p3 = 2\n")
        with pytest.raises(ConfigError):
            parse_config(str(p))

    def test_duplicate_key_rejected(self, tmp_path):
        p = tmp_path / "dup.txt"
        p.write_text("p1 = 2\np1 = 3\n")
        with pytest.raises(ConfigError):
            parse_config(str(p))

    def test_malformed_line_rejected(self, tmp_path):
        p = tmp_path / "bad.txt"
        p.write_text("just some words\n")
        with pytest.raises(ConfigError):
            parse_config(str(p))

    def test_defaults_documented_in_dataclass(self):
        rc = RunConfig()
        assert rc.tol == 1e-6 and rc.path_points == 33 and rc.seed == 0


class TestSerializer:
    def test_seventeen_digit_round_trip(self):
        x = 0.1234567890123456789
        line = json_line({"x": x})
        assert json.loads(line)["x"] == x

    def test_special_floats(self):
        line = json_line({"a": math.inf, "b": -math.inf, "c": math.nan})
        parsed = json.loads(line)
        assert parsed["a"] == math.inf and parsed["b"] == -math.inf
        assert math.isnan(parsed["c"])

    def test_nested(self):
        line = json_line({"xs": [1, 2.5, "s", True, None]})
        assert json.loads(line) == {"xs": [1, 2.5, "s", True, None]}


class TestCheckCommand:
    def test_admissible_exits_zero(self, capsys, coupled_path):
        code, records = run_cli(capsys, "check", "--config", coupled_path)
        assert code == 0
        assert records[0]["record"] == "header"
        assert records[0]["tool"] == "quasivar"
        summary = records[-1]
        assert summary["admissible"] is True

    def test_gamma_five_exits_one_naming_failures(self, capsys, tmp_path):
        p = tmp_path / "gamma5.txt"
        p.write_text(COUPLED_TEXT.replace("gamma1 = 4", "gamma1 = 5")
                     .replace("gamma2 = 4", "gamma2 = 5"))
        code, records = run_cli(capsys, "check", "--config", str(p))
        assert code == 1
        failing = records[-1]["failing"]
        assert any(name.startswith("exj02") for name in failing)

    def test_unknown_key_exits_two(self, capsys, tmp_path):
        p = tmp_path / "bad.txt"
        p.write_text("p3 = 2\n")
        code, records = run_cli(capsys, "check", "--config", str(p))
        assert code == 2
        assert records[-1]["record"] == "error"


class TestDeriveConstants:
    def test_derive(self, capsys, coupled_path):
        code, records = run_cli(capsys, "derive", "--config", coupled_path)
        assert code == 0
        rec = records[-1]
        assert rec["t1"] == 7.0 and rec["t3"] == 8.25 and rec["qbar1"] == 8.25

    def test_constants(self, capsys, decoupled_path):
        code, records = run_cli(capsys, "constants", "--config", decoupled_path)
        assert code == 0
        assert records[-1]["mu2_1"] == 0.25

    def test_constants_inadmissible_exits_one(self, capsys, tmp_path):
        p = tmp_path / "gamma5.txt"
        p.write_text(COUPLED_TEXT.replace("gamma1 = 4", "gamma1 = 5")
                     .replace("gamma2 = 4", "gamma2 = 5"))
        code, _ = run_cli(capsys, "constants", "--config", str(p))
        assert code == 1


class TestGradcheck:
    def test_slopes_pass(self, capsys, decoupled_path):
        code, records = run_cli(capsys, "gradcheck", "--config", decoupled_path)
        assert code == 0
        slopes = [r["slope"] for r in records if r["record"] == "gradcheck"]
        assert len(slopes) >= 5
        assert all(1.8 <= s <= 2.2 for s in slopes)


class TestEigenCommand:
    def test_lambda1_1d(self, capsys, tmp_path):
        p = tmp_path / "eig.txt"
        p.write_text(DECOUPLED_TEXT.replace("dimension = 2", "dimension = 1")
                     .replace("n = 17", "n = 1025"))
        code, records = run_cli(capsys, "eigen", "--config", str(p))
        assert code == 0
        rec = [r for r in records if r["record"] == "eigenpair"][0]
        assert abs(rec["lambda1"] - math.pi ** 2) < 1e-3 * math.pi ** 2
        assert abs(rec["rayleigh_quotient"] - rec["lambda1"]) < 1e-10

    def test_field_dump_written(self, capsys, tmp_path, decoupled_path):
        out = tmp_path / "out"
        code, _ = run_cli(capsys, "eigen", "--config", decoupled_path,
                          "--out", str(out))
        assert code == 0
        assert (out / "phi1.txt").exists()


class TestSolveAndMulti:
    def test_solve_1d(self, capsys, tmp_path):
        p = tmp_path / "solve.txt"
        p.write_text(DECOUPLED_TEXT.replace("dimension = 2", "dimension = 1")
                     .replace("n = 17", "n = 257"))
        code, records = run_cli(capsys, "solve", "--config", str(p))
        assert code == 0
        cand = [r for r in records if r["record"] == "candidate"][0]
        assert cand["converged"] is True
        assert cand["level"] > 0.0

    def test_multi_1d(self, capsys, tmp_path):
        p = tmp_path / "multi.txt"
        p.write_text(DECOUPLED_TEXT.replace("dimension = 2", "dimension = 1")
                     .replace("n = 17", "n = 257") + "count = 4\n")
        code, records = run_cli(capsys, "multi", "--config", str(p))
        assert code == 0
        levels = [r["level"] for r in records if r["record"] == "candidate"]
        assert len(levels) >= 2
        assert all(b > a for a, b in zip(levels, levels[1:]))


class TestCertifyDump:
    def test_certify(self, capsys, decoupled_path):
        code, records = run_cli(capsys, "certify", "--config", decoupled_path)
        assert code == 0
        rec = records[-1]
        assert rec["validated"] is True and rec["rho0"] > 0.0

    def test_dump_echoes_config(self, capsys, coupled_path):
        code, records = run_cli(capsys, "dump", "--config", coupled_path)
        assert code == 0
        assert records[-1]["p1"] == 1.5 and records[-1]["theta1"] == 0.125


class TestReproducibility:
    def _stream(self, capsys, *argv) -> str:
        main(list(argv))
        out = capsys.readouterr().out
        lines = []
        for line in out.strip().splitlines():
            rec = json.loads(line)
            rec.pop("timestamp", None)
            lines.append(json_line(rec))
        return "\n".join(lines)

    def test_identical_streams_after_timestamp_strip(self, capsys,
                                                     decoupled_path):
        a = self._stream(capsys, "certify", "--config", decoupled_path,
                         "--seed", "3")
        b = self._stream(capsys, "certify", "--config", decoupled_path,
                         "--seed", "3")
        assert a == b

    def test_seed_override_changes_hash_not_determinism(self, capsys,
                                                        decoupled_path):
        a = self._stream(capsys, "certify", "--config", decoupled_path,
                         "--seed", "3")
        c = self._stream(capsys, "certify", "--config", decoupled_path,
                         "--seed", "4")
        assert a != c
