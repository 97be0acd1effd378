from __future__ import annotations

from dataclasses import dataclass

from flowtwist.exceptions import FlowtwistError
from flowtwist.models.types.constants import GENERATOR_INVERSES, GENERATORS


def expand_inverses(word: str) -> str:
    """大写字母表示逆元：A → a, B → bb, C → c"""
    out = []
    for letter in word:
        if letter.lower() not in GENERATORS:
            raise FlowtwistError(f"未知生成元 {letter!r}", {"word": word})
        out.append(GENERATOR_INVERSES[letter.lower()] if letter.isupper() else letter)
    return "".join(out)


def inverse_word(word: str) -> str:
    """生成元词的逆：反转后逐个取逆"""
    return "".join(GENERATOR_INVERSES[letter] for letter in reversed(expand_inverses(word)))


@dataclass(frozen=True, slots=True)
class Relation:
    word: str
    label: str = ""

    def __post_init__(self) -> None:
        if not self.word:
            raise FlowtwistError("关系不能为空")
        if any(letter not in GENERATORS for letter in self.word):
            raise FlowtwistError(f"关系只能由 {''.join(GENERATORS)} 组成: {self.word!r}")
        if not self.label:
            object.__setattr__(self, "label", self.word if len(self.word) <= 8 else f"len{len(self.word)}")

    def __len__(self) -> int:
        return len(self.word)

    def reversed(self) -> Relation:
        return Relation(self.word[::-1], f"{self.label}-reversed")

    def inverse(self) -> Relation:
        return Relation(inverse_word(self.word), f"{self.label}-inverse")
