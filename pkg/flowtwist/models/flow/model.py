from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

from flowtwist.exceptions import FlowInvariantError
from flowtwist.models.word.model import AnchoredWord
from flowtwist.utils.rational import format_rational

ZERO = Fraction(0)
ONE = Fraction(1)


@dataclass(frozen=True, slots=True)
class Piece:
    """
    分片 (s, a, b, c, d)：符号 s 的瓦片子区间 [a, b] 线性地铺在物理区间 [c, d] 上
    """

    s: str
    a: Fraction
    b: Fraction
    c: Fraction
    d: Fraction

    def __post_init__(self) -> None:
        if not (ZERO <= self.a < self.b <= ONE):
            raise FlowInvariantError(f"瓦片区间非法: [{self.a}, {self.b}]", {"piece": self.as_strings()})
        if not self.c < self.d:
            raise FlowInvariantError(f"物理区间非法: [{self.c}, {self.d}]", {"piece": self.as_strings()})

    @property
    def width(self) -> Fraction:
        return self.d - self.c

    @property
    def slope(self) -> Fraction:
        """瓦片长度 / 物理长度，恒为正"""
        return (self.b - self.a) / (self.d - self.c)

    def physical_at(self, t: Fraction) -> Fraction:
        """瓦片坐标 t（a ≤ t ≤ b）对应的物理坐标"""
        return self.c + (t - self.a) / self.slope

    def tile_at(self, x: Fraction) -> Fraction:
        return self.a + (x - self.c) * self.slope

    def shifted(self, offset: Fraction) -> Piece:
        return Piece(self.s, self.a, self.b, self.c + offset, self.d + offset)

    def as_strings(self) -> list[str]:
        return [self.s, *(format_rational(v) for v in (self.a, self.b, self.c, self.d))]

    def __repr__(self) -> str:
        return "(" + ",".join(self.as_strings()) + ")"


def _assign_letters(word: AnchoredWord, pieces: tuple[Piece, ...]) -> tuple[int, ...]:
    """
    把分片逐个归属到字母：同一字母内瓦片坐标首尾相接，覆盖满 [0,1] 才换下一个字母。
    循环词经过非整数旋转后，首字母会被拆成开头一段与结尾一段。
    """
    letters = word.letters
    n = len(letters)
    head = pieces[0].a
    if head != ZERO and not word.is_circular:
        raise FlowInvariantError("只有循环词的首字母可以被拆开", {"word": word.literal()})

    owners: list[int] = []
    letter, expected, wrapped = 0, head, False
    for k, p in enumerate(pieces):
        if letter >= n:
            # 被拆开的首字母的尾段
            if head == ZERO:
                raise FlowInvariantError("分片多于字母", {"index": k})
            letter, expected, wrapped = 0, ZERO, True
        if p.s != letters[letter]:
            raise FlowInvariantError(
                f"分片符号 {p.s!r} 与字母 {letters[letter]!r} 不符", {"index": k, "letter": letter}
            )
        if p.a != expected:
            raise FlowInvariantError("同一字母内瓦片坐标不连续", {"index": k, "expected": str(expected)})
        owners.append(letter)
        expected = p.b
        if wrapped:
            if expected == head:
                if k != len(pieces) - 1:
                    raise FlowInvariantError("分片多于字母", {"index": k})
                return tuple(owners)
            continue
        if expected == ONE:
            letter += 1
            expected = ZERO

    if head != ZERO:
        raise FlowInvariantError("被拆开的首字母没有闭合", {"word": word.literal()})
    if letter != n or expected != ZERO:
        raise FlowInvariantError("字母没有被分片完整覆盖", {"covered": letter, "letters": n})
    return tuple(owners)


@dataclass(frozen=True, slots=True)
class FlowedWord:
    """带累计分段线性重参数化的锚定词"""

    word: AnchoredWord
    pieces: tuple[Piece, ...]
    owners: tuple[int, ...] = field(init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        if not self.pieces:
            raise FlowInvariantError("分片列表为空")
        if self.pieces[0].c != ZERO:
            raise FlowInvariantError("物理坐标必须从 0 开始")
        for left, right in zip(self.pieces, self.pieces[1:]):
            if left.d != right.c:
                raise FlowInvariantError(
                    "物理区间不连续", {"left": left.as_strings(), "right": right.as_strings()}
                )
        object.__setattr__(self, "owners", _assign_letters(self.word, self.pieces))

    @property
    def span(self) -> Fraction:
        return self.pieces[-1].d

    @property
    def letters(self) -> str:
        return self.word.letters

    @property
    def is_split(self) -> bool:
        """首字母是否被旋转拆成首尾两段"""
        return self.pieces[0].a != ZERO

    def letter_groups(self) -> list[list[Piece]]:
        """按字母分组的分片，组内按瓦片坐标排序（被拆开的首字母先尾段后首段）"""
        groups: list[list[Piece]] = [[] for _ in self.word.letters]
        for piece, owner in zip(self.pieces, self.owners):
            groups[owner].append(piece)
        if self.is_split:
            head = self.pieces[0].a
            first = groups[0]
            groups[0] = [p for p in first if p.a < head] + [p for p in first if p.a >= head]
        return groups

    def letter_span(self, index: int) -> tuple[Fraction, Fraction]:
        """字母占据的物理区间；被拆开的首字母返回跨越终点的区间"""
        group = self.letter_groups()[index]
        if index == 0 and self.is_split:
            return group[0].c, group[-1].d + self.span
        return group[0].c, group[-1].d

    def letter_spans(self) -> list[tuple[Fraction, Fraction]]:
        spans = []
        for index, group in enumerate(self.letter_groups()):
            end = group[-1].d + self.span if index == 0 and self.is_split else group[-1].d
            spans.append((group[0].c, end))
        return spans

    def as_rows(self) -> list[list[str]]:
        return [p.as_strings() for p in self.pieces]
