from __future__ import annotations

from typing import Mapping, Optional

from flowtwist.engines.base_engine import IFlowEngine, StepTrace
from flowtwist.exceptions import UnknownBuiltinError
from flowtwist.models.bijection.model import PrefixBijection
from flowtwist.models.flow.model import FlowedWord
from flowtwist.models.types.constants import GENERATORS
from flowtwist.models.types.enums import EngineKind
from flowtwist.services.veelike_service import anchored_apply_traced, builtin_bijection, require_valid


class BijectionEngine(IFlowEngine[PrefixBijection]):
    """直接按前缀置换的锚定语义作用生成元"""

    kind = EngineKind.BIJECTION

    def __init__(self, bijections: Optional[Mapping[str, PrefixBijection]] = None, generator_c: str = "c"):
        if bijections is None:
            bijections = {name: builtin_bijection(name) for name in GENERATORS}
            if generator_c == "c_broken":
                bijections["c"] = builtin_bijection("c_broken")
        self.bijections = {name: require_valid(bij) for name, bij in bijections.items()}

    def generator(self, name: str) -> PrefixBijection:
        try:
            return self.bijections[name]
        except KeyError:
            raise UnknownBuiltinError("generator", name, tuple(self.bijections)) from None

    def step(self, name: str, fw: FlowedWord) -> StepTrace:
        outcome = anchored_apply_traced(self.generator(name), fw)
        return StepTrace(name, fw, outcome.result, outcome.rewritten, outcome.read_spans)
