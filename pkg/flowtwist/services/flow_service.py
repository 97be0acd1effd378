from __future__ import annotations

import logging
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from flowtwist.exceptions import FlowInvariantError, RotationError, WordError
from flowtwist.models.flow.model import ONE, ZERO, FlowedWord, Piece
from flowtwist.models.report.model import Distortion
from flowtwist.models.types.constants import FORBIDDEN_FACTOR
from flowtwist.models.types.enums import Symbol
from flowtwist.models.word.model import BUILTIN_SHIFT, AnchoredWord, VertexShift
from flowtwist.utils.rational import format_rational

logger = logging.getLogger(__name__)


# ========== 合法性 ==========
def is_legal_word(word: Sequence[str], shift: VertexShift = BUILTIN_SHIFT, circular: bool = False) -> bool:
    """
    判断符号序列在顶点移位中是否合法（循环时包含首尾相接的一对）
    :raises WordError: 出现边界标记
    """
    for ch in word:
        if ch in (Symbol.SENTINEL.value, Symbol.BOWTIE.value):
            raise WordError("marker in shift word", {"symbol": ch})
        if not shift.contains(ch):
            raise WordError(f"非法符号 {ch!r}", {"symbol": ch})
    symbols = list(word)
    if circular and symbols:
        symbols.append(symbols[0])
    return all(shift.allows(x, y) for x, y in zip(symbols, symbols[1:]))


def is_legal_by_factor(word: str, circular: bool = False) -> bool:
    """按唯一禁止因子 02 判定，用于与矩阵判定交叉校验"""
    closed = word + word[:1] if circular else word
    return FORBIDDEN_FACTOR not in closed


# ========== 流 ==========
def identity_flow(word: AnchoredWord) -> FlowedWord:
    """每个字母一个单位分片 (s, 0, 1, k, k+1)"""
    return FlowedWord(
        word,
        tuple(Piece(s, ZERO, ONE, Fraction(k), Fraction(k + 1)) for k, s in enumerate(word.letters)),
    )


def _mergeable(left: Piece, right: Piece) -> bool:
    return left.s == right.s and left.b == right.a and left.d == right.c and left.slope == right.slope


def normalize(fw: FlowedWord) -> FlowedWord:
    """合并同一字母内首尾相接且斜率相同的相邻分片，得到唯一的最简分片列表"""
    merged: list[Piece] = []
    owners: list[int] = []
    for piece, owner in zip(fw.pieces, fw.owners):
        if merged and owners[-1] == owner and _mergeable(merged[-1], piece):
            last = merged[-1]
            merged[-1] = Piece(last.s, last.a, piece.b, last.c, piece.d)
        else:
            merged.append(piece)
            owners.append(owner)
    if len(merged) == len(fw.pieces):
        return fw
    return FlowedWord(fw.word, tuple(merged))


def is_identity(fw: FlowedWord, original: AnchoredWord) -> bool:
    """词不变且每个字母仍是原位置上的单个单位分片"""
    if fw.word != original:
        return False
    return normalize(fw).pieces == identity_flow(original).pieces


def rotate(fw: FlowedWord, t: Fraction) -> FlowedWord:
    """
    把循环物理线的基点移动到 t：切开 t 所在分片并重排，总跨度不变
    :raises RotationError: 非循环词或 t 越界
    """
    if not fw.word.is_circular:
        raise RotationError("rotate requires circular word", {"word": fw.word.literal()})
    t = Fraction(t)
    span = fw.span
    if not ZERO <= t < span:
        raise RotationError(f"旋转量 {t} 超出 [0, {span})")
    if t == ZERO:
        return fw

    cut = next(k for k, p in enumerate(fw.pieces) if p.c <= t < p.d)
    piece = fw.pieces[cut]
    before = list(fw.pieces[:cut])
    after = list(fw.pieces[cut + 1 :])
    if piece.c < t:
        split = piece.tile_at(t)
        before.append(Piece(piece.s, piece.a, split, piece.c, t))
        after.insert(0, Piece(piece.s, split, piece.b, t, piece.d))
    else:
        after.insert(0, piece)

    pieces = tuple([p.shifted(-t) for p in after] + [p.shifted(span - t) for p in before])
    j = fw.owners[cut]
    n = len(fw.letters)
    word = AnchoredWord(fw.letters[j:] + fw.letters[:j], fw.word.boundary, (fw.word.anchor - j) % n)
    return FlowedWord(word, pieces)


# ========== 规范坐标系 ==========
def anchor_offset(fw: FlowedWord) -> Fraction:
    """锚点字母左端（瓦片坐标 0）所在的物理坐标"""
    anchor = fw.word.anchor
    for piece, owner in zip(fw.pieces, fw.owners):
        if owner == anchor and piece.a == ZERO:
            return piece.c
    raise FlowInvariantError("找不到锚点的左端")


def to_canonical(fw: FlowedWord) -> tuple[FlowedWord, Fraction]:
    """旋转到锚点左端位于 0、锚点为第 0 个字母的坐标系，返回 (规范流, 偏移)"""
    if not fw.word.is_circular:
        return fw, ZERO
    offset = anchor_offset(fw)
    return (rotate(fw, offset) if offset else fw), offset


def from_canonical(fw: FlowedWord, offset: Fraction) -> FlowedWord:
    if not offset:
        return fw
    return rotate(fw, fw.span - offset)


# ========== 常斜率块改写 ==========
@dataclass(frozen=True, slots=True)
class BlockRewrite:
    """把从 start 开始的 length 个字母改写为 output（长度可变）"""

    start: int
    length: int
    output: str


def _rewrite_block(groups: list[list[Piece]], block: BlockRewrite) -> list[Piece]:
    old = groups[block.start : block.start + block.length]
    k, k_out = block.length, len(block.output)
    ratio = Fraction(k, k_out)
    pieces: list[Piece] = []
    for m, symbol in enumerate(block.output):
        lo, hi = m * ratio, (m + 1) * ratio
        for j, letter_pieces in enumerate(old):
            if hi <= j or lo >= j + 1:
                continue
            for p in letter_pieces:
                t1, t2 = max(lo, j + p.a), min(hi, j + p.b)
                if t1 >= t2:
                    continue
                pieces.append(
                    Piece(
                        symbol,
                        t1 / ratio - m,
                        t2 / ratio - m,
                        p.physical_at(t1 - j),
                        p.physical_at(t2 - j),
                    )
                )
    return pieces


def rewrite_blocks(fw: FlowedWord, blocks: Sequence[BlockRewrite]) -> FlowedWord:
    """
    按块改写规范坐标系下的流：每块的物理跨度按新字母数等分（常斜率），
    与已有的分段线性映射复合；输出与原字母相同的块保持原分片不动
    """
    if fw.is_split:
        raise FlowInvariantError("块改写要求规范坐标系")
    groups = fw.letter_groups()
    letters: list[str] = []
    pieces: list[Piece] = []
    cursor = 0
    for block in blocks:
        if block.start != cursor:
            raise FlowInvariantError("改写块没有连续铺满字母", {"start": block.start, "expected": cursor})
        if not block.output:
            raise FlowInvariantError("改写输出不能为空", {"start": block.start})
        cursor += block.length
        original = fw.letters[block.start : cursor]
        letters.append(block.output)
        if block.output == original:
            for group in groups[block.start : cursor]:
                pieces.extend(group)
        else:
            pieces.extend(_rewrite_block(groups, block))
    if cursor != len(fw.letters):
        raise FlowInvariantError("改写块没有覆盖整个词", {"covered": cursor, "letters": len(fw.letters)})
    word = AnchoredWord("".join(letters), fw.word.boundary, 0)
    return FlowedWord(word, tuple(pieces))


# ========== 畸变描述 ==========
def describe_distortion(fw: FlowedWord, original: AnchoredWord) -> Distortion:
    """给出与恒等流的第一个差异与各字母宽度，供见证使用"""
    normal = normalize(fw)
    reference = identity_flow(original).pieces
    first = next(
        (k for k, (x, y) in enumerate(zip(normal.pieces, reference)) if x != y),
        None if len(normal.pieces) == len(reference) else min(len(normal.pieces), len(reference)),
    )
    widths = []
    for index in range(len(fw.letters)):
        lo, hi = fw.letter_span(index)
        widths.append(format_rational(hi - lo))
    slopes = [p.slope for p in normal.pieces]
    return Distortion(
        word_changed=fw.word != original,
        final_word=fw.word.literal(),
        first_difference=first,
        letter_widths=widths,
        min_slope=format_rational(min(slopes)),
        max_slope=format_rational(max(slopes)),
    )


def position_spans(fw: FlowedWord, positions: Sequence[int], offset: Fraction = ZERO) -> tuple[tuple[Fraction, Fraction], ...]:
    """
    把规范坐标系下的字母位置换成物理区间：循环词越界按周期顺延，
    非循环词越过词尾的位置落在终止符之后的单位格上
    """
    spans = fw.letter_spans()
    n, total = len(spans), fw.span
    result = []
    for position in sorted(set(positions)):
        if fw.word.is_circular:
            period, index = divmod(position, n)
            lo, hi = spans[index]
            result.append((lo + period * total + offset, hi + period * total + offset))
        elif position >= n:
            result.append((total + position - n, total + position - n + 1))
        elif position >= 0:
            result.append(spans[position])
    return tuple(result)
