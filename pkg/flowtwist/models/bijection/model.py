from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

from flowtwist.exceptions import BijectionError
from flowtwist.models.types.constants import BITS


@dataclass(frozen=True, slots=True)
class PrefixBijection:
    """两个完备前缀码之间的双射 p → q，定义 Cantor 空间上的前缀置换"""

    name: str
    pairs: tuple[tuple[str, str], ...]

    def __post_init__(self) -> None:
        for p, q in self.pairs:
            if any(ch not in BITS for ch in p + q):
                raise BijectionError(f"码字只能由 0/1 组成: {p!r} -> {q!r}", {"pair": [p, q]})

    @property
    def domain(self) -> tuple[str, ...]:
        return tuple(p for p, _ in self.pairs)

    @property
    def codomain(self) -> tuple[str, ...]:
        return tuple(q for _, q in self.pairs)

    @property
    def depth(self) -> int:
        """m = 定义域码字的最大长度"""
        return max((len(p) for p in self.domain), default=0)

    def prefix_of(self, bits: str) -> Optional[tuple[str, str]]:
        """返回作为 bits 前缀的那个定义域码字及其像"""
        for p, q in self.pairs:
            if bits.startswith(p):
                return p, q
        return None

    def inverse(self) -> PrefixBijection:
        return PrefixBijection(f"{self.name}^-1", tuple((q, p) for p, q in self.pairs))

    def format(self) -> str:
        return "".join(f"{p} -> {q}\n" for p, q in self.pairs)
