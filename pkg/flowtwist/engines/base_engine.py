from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Generic, TypeVar

from flowtwist.models.flow.model import FlowedWord
from flowtwist.models.types.enums import EngineKind

G = TypeVar("G")


@dataclass(frozen=True, slots=True)
class StepTrace:
    """
    单个生成元作用一次的记录
    rewritten: 被改写的字母下标（作用前的词）
    read_spans: 被读取字母在作用前的物理区间，越过词尾的位置按周期或终止符顺延
    """

    generator: str
    before: FlowedWord
    after: FlowedWord
    rewritten: tuple[int, ...]
    read_spans: tuple[tuple[Fraction, Fraction], ...]


class IFlowEngine(Generic[G]):
    """流引擎接口：按名字取生成元并作用在带流的词上"""

    kind: EngineKind

    def generator(self, name: str) -> G:
        raise NotImplementedError

    def step(self, name: str, fw: FlowedWord) -> StepTrace:
        raise NotImplementedError

    def apply(self, name: str, fw: FlowedWord) -> FlowedWord:
        return self.step(name, fw).after
