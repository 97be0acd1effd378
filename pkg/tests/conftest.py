from fractions import Fraction

import pytest

from flowtwist.configs.base import CustomBaseConfig
from flowtwist.engines import BijectionEngine, RuleTableEngine
from flowtwist.models.types.enums import Boundary
from flowtwist.models.word.model import AnchoredWord
from flowtwist.services.flow_service import identity_flow


def word(literal: str):
    return AnchoredWord.from_literal(literal)


def flow(literal: str):
    return identity_flow(word(literal))


def circular_bits(max_bits: int):
    """锚点之后不以 0 结尾的比特串（循环词 2w 合法）"""
    from flowtwist.services.veelike_service import bit_words

    return [w for w in bit_words(max_bits) if not w.endswith("0")]


def widths(fw) -> list[Fraction]:
    return [hi - lo for lo, hi in fw.letter_spans()]


@pytest.fixture(scope="session")
def rule_engine() -> RuleTableEngine:
    return RuleTableEngine()


@pytest.fixture(scope="session")
def bijection_engine() -> BijectionEngine:
    return BijectionEngine()


@pytest.fixture(scope="session")
def broken_engine() -> BijectionEngine:
    return BijectionEngine(generator_c="c_broken")


@pytest.fixture(params=["rule-table", "bijection"])
def engine(request, rule_engine, bijection_engine):
    return rule_engine if request.param == "rule-table" else bijection_engine


@pytest.fixture
def isolated_config(tmp_path, monkeypatch):
    """空配置目录，清掉缓存与相关环境变量"""
    monkeypatch.setenv("FLOWTWIST_CONFIG_DIR", str(tmp_path))
    for name in ("FLOWTWIST_THREADS", "FLOWTWIST_VERIFY__THREADS", "THREADS", "FLOWTWIST_VERIFY__MAX_LEN", "FLOWTWIST_VERIFY__ENGINE"):
        monkeypatch.delenv(name, raising=False)
    CustomBaseConfig.clear_cache()
    yield tmp_path
    CustomBaseConfig.clear_cache()


__all__ = ["word", "flow", "circular_bits", "widths", "Boundary"]
