from __future__ import annotations

from dataclasses import dataclass
from typing import List

from pydantic import BaseModel, Field

from flowtwist.exceptions import FlowtwistError
from flowtwist.models.types.constants import SHIFT_ALPHABET


@dataclass(frozen=True, slots=True)
class PatternToken:
    """字面符号 0/1/2，或取值于 {0,1} 的比特变量 A..Z"""

    value: str

    def __post_init__(self) -> None:
        if not (self.value in SHIFT_ALPHABET or (len(self.value) == 1 and "A" <= self.value <= "Z")):
            raise FlowtwistError(f"illegal literal {self.value!r}")

    @property
    def is_variable(self) -> bool:
        return self.value not in SHIFT_ALPHABET

    def __str__(self) -> str:
        return self.value


def tokens(text: str) -> tuple[PatternToken, ...]:
    return tuple(PatternToken(ch) for ch in text)


def _join(part: tuple[PatternToken, ...]) -> str:
    return "".join(t.value for t in part)


@dataclass(frozen=True, slots=True)
class Mapping:
    """u(v)w:v'：在上下文 u、w 中把 v 改写为 v'"""

    u: tuple[PatternToken, ...]
    v: tuple[PatternToken, ...]
    w: tuple[PatternToken, ...]
    v_out: tuple[PatternToken, ...]

    def __post_init__(self) -> None:
        if not self.v:
            raise FlowtwistError("empty v")
        if not self.v_out:
            raise FlowtwistError("empty replacement")
        bound = {t.value for t in self.u + self.v + self.w if t.is_variable}
        unbound = sorted({t.value for t in self.v_out if t.is_variable} - bound)
        if unbound:
            raise FlowtwistError(f"unbound variable {', '.join(unbound)} in replacement")

    @classmethod
    def of(cls, u: str, v: str, w: str, v_out: str) -> Mapping:
        return cls(tokens(u), tokens(v), tokens(w), tokens(v_out))

    @property
    def pattern(self) -> tuple[PatternToken, ...]:
        return self.u + self.v + self.w

    @property
    def width(self) -> int:
        return len(self.u) + len(self.v) + len(self.w)

    def variables(self) -> list[str]:
        """按首次出现顺序返回变量名"""
        seen: dict[str, None] = {}
        for t in self.pattern + self.v_out:
            if t.is_variable:
                seen.setdefault(t.value, None)
        return list(seen)

    def format(self) -> str:
        return f"{_join(self.u)}({_join(self.v)}){_join(self.w)}:{_join(self.v_out)}"

    def __str__(self) -> str:
        return self.format()


@dataclass(frozen=True, slots=True)
class LocalRule:
    name: str
    mappings: tuple[Mapping, ...]

    @property
    def radius(self) -> int:
        """R = max |u|+|v|+|w|"""
        return max(m.width for m in self.mappings)

    def format(self) -> str:
        return "\n".join(m.format() for m in self.mappings) + "\n"

    def without(self, index: int) -> LocalRule:
        return LocalRule(f"{self.name}-{index}", self.mappings[:index] + self.mappings[index + 1 :])

    def with_extra(self, mapping: Mapping) -> LocalRule:
        return LocalRule(f"{self.name}+", self.mappings + (mapping,))


@dataclass(frozen=True, slots=True)
class GroundMapping:
    """变量全部实例化后的映射；read_offsets 是 u·v·w 中算作“读取”的偏移"""

    source: int
    u: str
    v: str
    w: str
    v_out: str
    read_offsets: tuple[int, ...]

    @property
    def pattern(self) -> str:
        return self.u + self.v + self.w

    @property
    def is_identity(self) -> bool:
        return self.v_out == self.v


class PartitionWitness(BaseModel):
    window: str
    offset: int = Field(description="窗口中心格的下标")
    count: int
    mappings: List[int] = Field(default_factory=list, description="覆盖中心格的映射下标（源规则中的行序）")


class ValidationReport(BaseModel):
    rule: str
    ok: bool
    windows_checked: int
    witnesses: List[PartitionWitness] = Field(default_factory=list)
