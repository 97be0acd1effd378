import pytest
from pydantic import ValidationError

from flowtwist.configs.base import BaseConfig, CustomBaseConfig, LoggingConfig, RenderConfig, VerifyConfig
from flowtwist.models.types.enums import EngineKind, Orientation


def _yaml(directory, name, text):
    (directory / name).write_text(text, encoding="utf-8")


class TestDefaults:
    def test_verify_defaults(self, isolated_config):
        config = VerifyConfig()
        assert config.max_len == 11
        assert config.engine is EngineKind.RULE_TABLE
        assert config.witness_cap == 5
        assert config.threads == 1
        assert config.generator_c == "c"

    def test_aggregate(self, isolated_config):
        config = BaseConfig()
        assert config.render.orientation is Orientation.ROWS
        assert config.logging.level == "WARNING"
        assert config.logging.path is None


class TestYamlFiles:
    def test_sections_are_read(self, isolated_config):
        _yaml(isolated_config, "flowtwist.yaml", "verify:\n  max_len: 7\nrender:\n  orientation: columns\n")
        assert VerifyConfig().max_len == 7
        assert RenderConfig().orientation is Orientation.COLUMNS

    def test_later_files_override_earlier(self, isolated_config):
        _yaml(isolated_config, "00-base.yaml", "verify:\n  max_len: 7\n  witness_cap: 2\n")
        _yaml(isolated_config, "10-local.yml", "verify:\n  max_len: 9\n")
        config = VerifyConfig()
        assert config.max_len == 9
        assert config.witness_cap == 2

    def test_broken_yaml_is_skipped(self, isolated_config):
        _yaml(isolated_config, "00-bad.yaml", "verify: [unclosed\n")
        _yaml(isolated_config, "10-good.yaml", "verify:\n  max_len: 6\n")
        assert VerifyConfig().max_len == 6

    def test_missing_directory_uses_defaults(self, isolated_config, monkeypatch):
        monkeypatch.setenv("FLOWTWIST_CONFIG_DIR", str(isolated_config / "absent"))
        CustomBaseConfig.clear_cache()
        assert VerifyConfig().max_len == 11

    def test_merge_is_recursive(self):
        merged = CustomBaseConfig.merge_yaml({"verify": {"max_len": 3, "engine": "bijection"}}, {"verify": {"max_len": 5}})
        assert merged == {"verify": {"max_len": 5, "engine": "bijection"}}


class TestEnvironment:
    def test_env_beats_file(self, isolated_config, monkeypatch):
        _yaml(isolated_config, "flowtwist.yaml", "verify:\n  max_len: 7\n  engine: rule-table\n")
        monkeypatch.setenv("FLOWTWIST_VERIFY__MAX_LEN", "8")
        monkeypatch.setenv("FLOWTWIST_VERIFY__ENGINE", "bijection")
        config = VerifyConfig()
        assert config.max_len == 8
        assert config.engine is EngineKind.BIJECTION

    def test_threads_shorthand(self, isolated_config, monkeypatch):
        monkeypatch.setenv("FLOWTWIST_THREADS", "4")
        assert VerifyConfig().threads == 4

    def test_threads_ignores_unprefixed_env(self, isolated_config, monkeypatch):
        _yaml(isolated_config, "flowtwist.yaml", "verify:\n  threads: 3\n")
        monkeypatch.setenv("THREADS", "6")
        assert VerifyConfig().threads == 3

    def test_threads_prefixed_env(self, isolated_config, monkeypatch):
        _yaml(isolated_config, "flowtwist.yaml", "verify:\n  threads: 3\n")
        monkeypatch.setenv("FLOWTWIST_VERIFY__THREADS", "2")
        assert VerifyConfig().threads == 2


class TestValidation:
    def test_invalid_log_level(self, isolated_config):
        with pytest.raises(ValidationError):
            LoggingConfig(level="LOUD")

    def test_level_is_uppercased(self, isolated_config):
        assert LoggingConfig(level="debug").level == "DEBUG"

    def test_max_len_bounds(self, isolated_config):
        _yaml(isolated_config, "flowtwist.yaml", "verify:\n  max_len: 0\n")
        with pytest.raises(ValidationError):
            VerifyConfig()

    def test_unknown_generator_c(self, isolated_config):
        with pytest.raises(ValidationError):
            VerifyConfig(generator_c="d")
