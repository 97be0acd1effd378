from __future__ import annotations

import logging
from typing import Mapping as TypingMapping, Optional

from flowtwist.engines.base_engine import IFlowEngine, StepTrace
from flowtwist.exceptions import UnknownBuiltinError
from flowtwist.models.flow.model import FlowedWord
from flowtwist.models.rule.model import LocalRule
from flowtwist.models.types.constants import GENERATORS
from flowtwist.models.types.enums import EngineKind
from flowtwist.services.rule_service import apply_rule_traced, builtin_generator

logger = logging.getLogger(__name__)


class RuleTableEngine(IFlowEngine[LocalRule]):
    """用局部规则表作用生成元"""

    kind = EngineKind.RULE_TABLE

    def __init__(self, rules: Optional[TypingMapping[str, LocalRule]] = None, generator_c: str = "c"):
        """
        :param rules: 生成元名 → 规则；缺省为内置 a、b、c
        :param generator_c: 为 c_broken 时用反例双射编译出的规则替换 c
        """
        if rules is None:
            rules = {name: builtin_generator(name) for name in GENERATORS}
            if generator_c == "c_broken":
                rules["c"] = builtin_generator("c_broken_rule")
        self.rules = dict(rules)

    def generator(self, name: str) -> LocalRule:
        try:
            return self.rules[name]
        except KeyError:
            raise UnknownBuiltinError("generator", name, tuple(self.rules)) from None

    def step(self, name: str, fw: FlowedWord) -> StepTrace:
        outcome = apply_rule_traced(self.generator(name), fw)
        return StepTrace(name, fw, outcome.result, outcome.rewritten, outcome.read_spans)
