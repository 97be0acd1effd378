from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

from flowtwist.exceptions import WordError
from flowtwist.models.types.constants import ANCHOR, FORBIDDEN_FACTOR, SHIFT_ALPHABET, SHIFT_MATRIX
from flowtwist.models.types.enums import Boundary, Symbol


@dataclass(frozen=True, slots=True)
class VertexShift:
    """由 0/1 邻接矩阵给出的顶点移位"""

    alphabet: tuple[str, ...]
    adjacency: tuple[tuple[int, ...], ...]
    _index: dict[str, int] = field(init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        n = len(self.alphabet)
        if len(self.adjacency) != n or any(len(row) != n for row in self.adjacency):
            raise WordError(f"邻接矩阵必须是 {n}×{n}")
        if len(set(self.alphabet)) != n:
            raise WordError("字母表存在重复符号")
        object.__setattr__(self, "_index", {s: i for i, s in enumerate(self.alphabet)})

    def allows(self, left: str, right: str) -> bool:
        return bool(self.adjacency[self._index[left]][self._index[right]])

    def contains(self, symbol: str) -> bool:
        return symbol in self._index

    def forbidden_pairs(self) -> list[str]:
        return [x + y for x in self.alphabet for y in self.alphabet if not self.allows(x, y)]


BUILTIN_SHIFT = VertexShift(SHIFT_ALPHABET, SHIFT_MATRIX)


@dataclass(frozen=True, slots=True)
class AnchoredWord:
    """
    锚定词：letters[anchor] 为锚点 2
    CIRCULAR 表示 (2w)^Z；SENTINEL/BOWTIE 在末尾带一个虚拟终止符
    """

    letters: str
    boundary: Boundary = Boundary.CIRCULAR
    anchor: int = 0

    def __post_init__(self) -> None:
        if not self.letters:
            raise WordError("锚定词不能为空")
        for ch in self.letters:
            if ch in (Symbol.SENTINEL.value, Symbol.BOWTIE.value):
                raise WordError("marker in shift word", {"word": self.letters, "symbol": ch})
            if ch not in SHIFT_ALPHABET:
                raise WordError(f"非法符号 {ch!r}", {"word": self.letters, "symbol": ch})
        if not 0 <= self.anchor < len(self.letters) or self.letters[self.anchor] != ANCHOR:
            raise WordError(f"锚点位置 {self.anchor} 上不是 2: {self.letters!r}")
        if self.boundary is not Boundary.CIRCULAR and self.anchor != 0:
            raise WordError("非循环词的锚点必须在首位")
        closed = self.letters + self.letters[0] if self.boundary is Boundary.CIRCULAR else self.letters
        if FORBIDDEN_FACTOR in closed:
            raise WordError(f"illegal word {self.literal()!r}: contains {FORBIDDEN_FACTOR}", {"word": self.letters})

    def __len__(self) -> int:
        return len(self.letters)

    @property
    def is_circular(self) -> bool:
        return self.boundary is Boundary.CIRCULAR

    @property
    def terminator(self) -> Optional[str]:
        if self.boundary is Boundary.SENTINEL:
            return Symbol.SENTINEL.value
        if self.boundary is Boundary.BOWTIE:
            return Symbol.BOWTIE.value
        return None

    @property
    def bits(self) -> str:
        """锚点之后的比特串（仅对以锚点开头的单锚点词有意义）"""
        return self.letters[1:]

    def literal(self) -> str:
        return self.letters + (self.terminator or "")

    @classmethod
    def from_literal(cls, text: str, boundary: Optional[Boundary] = None) -> AnchoredWord:
        """
        从文本解析：末尾的 3 表示哨兵，~ 表示领结；未带终止符时使用 boundary（默认循环）
        """
        compact = "".join(text.split())
        if not compact:
            raise WordError("词字面量为空")
        tail = compact[-1]
        if tail == Symbol.SENTINEL.value or tail == Symbol.BOWTIE.value:
            marked = Boundary.SENTINEL if tail == Symbol.SENTINEL.value else Boundary.BOWTIE
            if boundary is not None and boundary is not marked:
                raise WordError(f"终止符 {tail!r} 与边界 {boundary.value} 冲突")
            return cls(compact[:-1], marked)
        return cls(compact, boundary or Boundary.CIRCULAR)

    @classmethod
    def anchored(cls, bits: str, boundary: Boundary = Boundary.CIRCULAR) -> AnchoredWord:
        return cls(ANCHOR + bits, boundary)
