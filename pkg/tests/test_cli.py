import json
import logging

import pytest

from flowtwist.cli import main
from flowtwist.services.rule_service import parse_local_rule, validate_partition
from flowtwist.utils.logger import RUN_LOGGER_NAME


@pytest.fixture(autouse=True)
def fresh_run_logger(isolated_config):
    """每个命令重新挂日志处理器，避免写到上一个测试已关闭的流"""
    yield
    run_logger = logging.getLogger(RUN_LOGGER_NAME)
    for handler in list(run_logger.handlers):
        run_logger.removeHandler(handler)
    run_logger.propagate = True


def _write(path, text):
    path.write_text(text, encoding="utf-8")
    return str(path)


class TestUsage:
    def test_no_command(self):
        assert main([]) == 2

    def test_missing_option(self):
        assert main(["apply", "--word", "2"]) == 2

    def test_version(self, capsys):
        assert main(["--version"]) == 0
        assert "flowtwist" in capsys.readouterr().out

    def test_bad_word(self, capsys):
        assert main(["apply", "--word", "20", "--element", "a"]) == 2
        assert "word error" in capsys.readouterr().err

    def test_unknown_builtin(self, capsys):
        assert main(["validate", "--builtin", "d"]) == 2
        assert "usage error" in capsys.readouterr().err


class TestValidate:
    def test_builtin(self, capsys):
        assert main(["validate", "--builtin", "a"]) == 0
        assert json.loads(capsys.readouterr().out)["ok"] is True

    def test_incomplete_rule_file(self, tmp_path, capsys):
        rule = _write(tmp_path / "partial.rule", "(2):2\n")
        assert main(["validate", "--rule", rule]) == 1
        report = json.loads(capsys.readouterr().out)
        assert report["rule"] == "partial"
        assert report["witnesses"]

    def test_parse_error(self, tmp_path, capsys):
        rule = _write(tmp_path / "bad.rule", "(2):2\n(2x):1\n")
        assert main(["validate", "--rule", rule]) == 2
        assert "line 2" in capsys.readouterr().err


class TestApply:
    def test_block_collapses(self, capsys):
        assert main(["apply", "--word", "2001", "--element", "cbcabb"]) == 0
        payload = json.loads(capsys.readouterr().out)
        assert payload["word"] == "2"
        assert payload["span"] == "4/1"
        assert payload["identity"] is False

    def test_relation_is_identity(self, capsys):
        assert main(["apply", "--word", "211", "--element", "cc", "--engine", "bijection"]) == 0
        assert json.loads(capsys.readouterr().out)["identity"] is True

    def test_engine_error(self, capsys):
        assert main(["apply", "--word", "23", "--element", "a"]) == 2
        assert "sentinel read" in capsys.readouterr().err


class TestVerify:
    def test_broken_c_fails(self, tmp_path, capsys):
        relations = _write(tmp_path / "cc.txt", "cc\n")
        out = tmp_path / "report.json"
        code = main(
            [
                "verify",
                "--relations",
                relations,
                "--max-len",
                "5",
                "--engine",
                "bijection",
                "--generator-c",
                "c_broken",
                "--out",
                str(out),
            ]
        )
        assert code == 1
        printed = capsys.readouterr().out
        assert "211" in printed
        assert printed.strip().endswith("FAIL")
        assert json.loads(out.read_text(encoding="utf-8"))["verdict"] == "FAIL"

    def test_short_relation_passes(self, tmp_path, capsys):
        relations = _write(tmp_path / "rel.txt", "order2: aa\n")
        assert main(["verify", "--relations", relations, "--max-len", "5"]) == 0
        summary = json.loads(capsys.readouterr().out)
        assert summary["relations"][0]["label"] == "order2"

    def test_config_supplies_max_len(self, isolated_config, tmp_path, capsys):
        (isolated_config / "flowtwist.yaml").write_text("verify:\n  max_len: 4\n", encoding="utf-8")
        relations = _write(tmp_path / "rel.txt", "aa\n")
        assert main(["verify", "--relations", relations]) == 0
        assert json.loads(capsys.readouterr().out)["max_len"] == 4


class TestOtherCommands:
    def test_random(self, tmp_path, capsys):
        relations = _write(tmp_path / "rel.txt", "bbb\n")
        assert main(["random", "--relations", relations, "--count", "3", "--length", "8"]) == 0
        (report,) = json.loads(capsys.readouterr().out)
        assert report["configurations"] == 3

    def test_compile(self, tmp_path):
        out = tmp_path / "a.rule"
        assert main(["compile", "--builtin", "a", "--out", str(out)]) == 0
        assert validate_partition(parse_local_rule(out.read_text(encoding="utf-8"))).ok

    def test_compile_bijection_file(self, tmp_path, capsys):
        bijection = _write(tmp_path / "a.bij", "00 -> 01\n01 -> 00\n1 -> 1\n")
        assert main(["compile", "--bijection", bijection]) == 0
        assert "(201)2:2" in capsys.readouterr().out

    def test_render(self, tmp_path, capsys):
        out = tmp_path / "aa.svg"
        assert main(["render", "--word", "2", "--element", "aa", "--out", str(out)]) == 0
        assert out.read_text(encoding="utf-8").startswith("<svg")
        assert json.loads(capsys.readouterr().out)["discontinuities"] == 0

    def test_suite(self, tmp_path, capsys):
        relations = _write(tmp_path / "rel.txt", "aa\n")
        out = tmp_path / "suite"
        assert main(["suite", "--relations", relations, "--out", str(out)]) == 0
        assert len(list(out.glob("*.svg"))) == 8
        assert capsys.readouterr().out.strip() == "0"
