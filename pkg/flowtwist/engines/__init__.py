from flowtwist.models.types.enums import EngineKind

from .base_engine import IFlowEngine, StepTrace
from .bijection import BijectionEngine
from .rule_table import RuleTableEngine


def create_engine(kind: EngineKind | str, generator_c: str = "c") -> IFlowEngine:
    """按种类创建引擎"""
    if EngineKind(kind) is EngineKind.BIJECTION:
        return BijectionEngine(generator_c=generator_c)
    return RuleTableEngine(generator_c=generator_c)


__all__ = ["IFlowEngine", "StepTrace", "RuleTableEngine", "BijectionEngine", "create_engine"]
