from __future__ import annotations

import logging
import math
import xml.etree.ElementTree as ET
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Mapping, Optional, Sequence

from pydantic import BaseModel, Field, field_validator

from flowtwist.engines import IFlowEngine, create_engine
from flowtwist.exceptions import RuleApplicationError
from flowtwist.models.flow.model import ONE, ZERO, FlowedWord, Piece
from flowtwist.models.relation.model import Relation, expand_inverses
from flowtwist.models.report.model import TraceStatistics
from flowtwist.models.types.constants import (
    DEFAULT_RELATIONS,
    DOCUMENTED_DISCONTINUITIES,
    SUITE_BITS,
    SUITE_DEFAULT_BITS,
)
from flowtwist.models.types.enums import Boundary, EngineKind, Orientation, Symbol, WordScheme
from flowtwist.models.word.model import AnchoredWord
from flowtwist.services.flow_service import identity_flow, normalize
from flowtwist.services.verify_service import apply_relation, enumerate_test_words, suite_word
from flowtwist.utils.rational import format_rational
from flowtwist.utils.validators import validate_element, validate_word_literal

logger = logging.getLogger(__name__)

SVG_NS = "http://www.w3.org/2000/svg"
MARGIN = 8
LABEL_WIDTH = 24
ROW_GAP = 8
STROKE = "black"
GRAY = "#999999"


class DiagramSpec(BaseModel):
    """一张时空图：初始词、生成元序列与版式"""

    word: str = Field(..., description="初始词字面量，末尾可带 3 或 ~")
    element: str = Field(..., description="生成元序列，从左到右作用")
    orientation: Orientation = Orientation.ROWS
    glyph_scale: int = Field(40, gt=0)
    row_height: int = Field(24, gt=0)
    show_discontinuities: bool = True
    labels: bool = True

    @field_validator("word")
    @classmethod
    def check_word(cls, value: str) -> str:
        return validate_word_literal(value)

    @field_validator("element")
    @classmethod
    def check_element(cls, value: str) -> str:
        return expand_inverses(validate_element(value))


# ========== 断点 ==========
def gray_ticks(fw: FlowedWord) -> list[Fraction]:
    """
    瓦片内部的断点（规范化后瓦片坐标严格落在 (0,1) 内的分片边界）的物理位置
    """
    pieces = normalize(fw).pieces
    ticks = [right.c for left, right in zip(pieces, pieces[1:]) if ZERO < right.a < ONE]
    first, last = pieces[0], pieces[-1]
    if fw.word.is_circular and ZERO < first.a < ONE and first.slope != last.slope:
        ticks.insert(0, first.c)
    return ticks


def count_discontinuities(rows: Sequence[FlowedWord]) -> int:
    return sum(len(gray_ticks(row)) for row in rows)


# ========== SVG ==========
def _length(value: Fraction | int) -> str:
    value = Fraction(value)
    return str(value.numerator) if value.denominator == 1 else repr(float(value))


def common_unit(spec: DiagramSpec, rows: Sequence[FlowedWord]) -> int:
    """
    所有坐标的公分母：用户坐标乘以它后全为整数，viewBox 按它放大
    """
    values = [Fraction(spec.row_height, 4), Fraction(spec.glyph_scale, 2)]
    for fw in rows:
        values.append(fw.span * spec.glyph_scale)
        for p in fw.pieces:
            values += [p.c * spec.glyph_scale, p.d * spec.glyph_scale]
    return math.lcm(*(Fraction(v).denominator for v in values))


@dataclass
class _Canvas:
    spec: DiagramSpec
    root: ET.Element
    unit: int = 1
    body: ET.Element = field(init=False)

    def __post_init__(self) -> None:
        self.body = ET.SubElement(self.root, "g", {"class": "trace"})

    def x(self, physical: Fraction) -> Fraction:
        return MARGIN + LABEL_WIDTH + physical * self.spec.glyph_scale

    def y(self, row: int) -> int:
        return MARGIN + row * (self.spec.row_height + ROW_GAP)

    def num(self, value: Fraction | int) -> str:
        scaled = Fraction(value) * self.unit
        assert scaled.denominator == 1, f"坐标 {value} 不在公分母 {self.unit} 的网格上"
        return str(scaled.numerator)

    def line(self, parent: ET.Element, x1, y1, x2, y2, color: str = STROKE, **extra: str) -> None:
        attrs = {"x1": self.num(x1), "y1": self.num(y1), "x2": self.num(x2), "y2": self.num(y2), "stroke": color}
        attrs.update(extra)
        ET.SubElement(parent, "line", attrs)


def _draw_piece(canvas: _Canvas, group: ET.Element, piece: Piece, row: int) -> None:
    h = canvas.spec.row_height
    top = canvas.y(row)
    x1, x2 = canvas.x(piece.c), canvas.x(piece.d)
    node = ET.SubElement(group, "g", {"class": f"piece s{piece.s}", "data-piece": ",".join(piece.as_strings())})
    if piece.s == Symbol.S2.value:
        # 三线：锚点
        for frac in (Fraction(1, 4), Fraction(1, 2), Fraction(3, 4)):
            canvas.line(node, x1, top + h * frac, x2, top + h * frac)
    elif piece.s == Symbol.S0.value:
        canvas.line(node, x1, top + Fraction(h, 2), x2, top + Fraction(h, 2))
    else:
        ET.SubElement(
            node,
            "rect",
            {
                "x": canvas.num(x1),
                "y": canvas.num(top + Fraction(h, 4)),
                "width": canvas.num(x2 - x1),
                "height": canvas.num(Fraction(h, 2)),
                "fill": "none",
                "stroke": STROKE,
            },
        )
    # 瓦片边界
    if piece.a == ZERO:
        canvas.line(node, x1, top, x1, top + h, **{"class": "tile-tick"})
    if piece.b == ONE:
        canvas.line(node, x2, top, x2, top + h, **{"class": "tile-tick"})


def _draw_terminator(canvas: _Canvas, group: ET.Element, fw: FlowedWord, row: int) -> None:
    terminator = fw.word.terminator
    if terminator is None:
        return
    h = canvas.spec.row_height
    top = canvas.y(row)
    left = canvas.x(fw.span)
    right = left + Fraction(canvas.spec.glyph_scale, 2)
    if fw.word.boundary is Boundary.BOWTIE:
        points = [
            (left, top + Fraction(h, 4)),
            (right, top + Fraction(3 * h, 4)),
            (right, top + Fraction(h, 4)),
            (left, top + Fraction(3 * h, 4)),
        ]
        ET.SubElement(
            group,
            "polygon",
            {
                "class": "bowtie",
                "points": " ".join(f"{canvas.num(px)},{canvas.num(py)}" for px, py in points),
                "fill": "none",
                "stroke": STROKE,
            },
        )
    else:
        label = ET.SubElement(
            group, "text", {"class": "sentinel", "x": canvas.num(left + 2), "y": canvas.num(top + Fraction(3 * h, 4))}
        )
        label.text = terminator


def _draw_row(canvas: _Canvas, fw: FlowedWord, row: int, label: str) -> int:
    group = ET.SubElement(
        canvas.body, "g", {"class": "row", "data-step": str(row), "data-word": fw.word.literal()}
    )
    if canvas.spec.labels and label:
        text = ET.SubElement(
            group, "text", {"class": "label", "x": canvas.num(MARGIN), "y": canvas.num(canvas.y(row) + Fraction(3 * canvas.spec.row_height, 4))}
        )
        text.text = label
    for piece in fw.pieces:
        _draw_piece(canvas, group, piece, row)
    _draw_terminator(canvas, group, fw, row)
    ticks = gray_ticks(fw)
    if canvas.spec.show_discontinuities:
        top = canvas.y(row)
        for tick in ticks:
            x = canvas.x(tick)
            canvas.line(group, x, top, x, top + canvas.spec.row_height, GRAY, **{"class": "gray-tick", "data-x": format_rational(tick)})
    return len(ticks)


def render_rows(spec: DiagramSpec, rows: Sequence[FlowedWord]) -> str:
    """把一串带流的词画成 SVG，坐标取自分片的有理数端点"""
    span = rows[0].span
    extra = Fraction(spec.glyph_scale, 2) if rows[0].word.terminator else ZERO
    width = 2 * MARGIN + LABEL_WIDTH + span * spec.glyph_scale + extra
    height = 2 * MARGIN + len(rows) * (spec.row_height + ROW_GAP) - ROW_GAP
    if spec.orientation is Orientation.COLUMNS:
        width, height = height, width
    unit = common_unit(spec, rows)
    root = ET.Element(
        "svg",
        {
            "xmlns": SVG_NS,
            "version": "1.1",
            "width": _length(width),
            "height": _length(height),
            "viewBox": f"0 0 {_length(width * unit)} {_length(height * unit)}",
            "data-word": spec.word,
            "data-element": spec.element,
        },
    )
    canvas = _Canvas(spec, root, unit)
    if spec.orientation is Orientation.COLUMNS:
        # 交换坐标轴：每步一列
        canvas.body.set("transform", "matrix(0 1 1 0 0 0)")
    labels = [""] + list(spec.element)
    for row, fw in enumerate(rows):
        _draw_row(canvas, fw, row, labels[row] if row < len(labels) else "")
    return ET.tostring(root, encoding="unicode")


def trace_statistics(rows: Sequence[FlowedWord]) -> TraceStatistics:
    return TraceStatistics(
        steps=len(rows) - 1,
        piece_counts=[len(normalize(row).pieces) for row in rows],
        discontinuities=count_discontinuities(rows),
        final_word=rows[-1].word.literal(),
    )


def render_trace(spec: DiagramSpec, engine: Optional[IFlowEngine] = None) -> tuple[str, TraceStatistics]:
    """
    作用生成元序列并画出每一步
    :raises RuleApplicationError: 引擎错误，已标注失败步骤
    """
    engine = engine or create_engine(EngineKind.RULE_TABLE)
    word = AnchoredWord.from_literal(spec.word)
    trace = apply_relation(spec.element, identity_flow(word), engine)
    rows = trace.rows()
    return render_rows(spec, rows), trace_statistics(rows)


# ========== 校验图组 ==========
@dataclass
class SuiteResult:
    documents: dict[str, str] = field(default_factory=dict)
    statistics: dict[str, TraceStatistics] = field(default_factory=dict)
    total_discontinuities: int = 0
    failures: dict[str, str] = field(default_factory=dict)


def suite_file_name(relation: Relation, literal: str) -> str:
    stem = literal.replace(Symbol.BOWTIE.value, "-bowtie")
    return f"{relation.label}_2{stem}.svg"


def _is_documented_suite(lengths: Mapping[str, int]) -> bool:
    """每条默认关系恰好出现一次，且各自的比特长度与记载一致"""
    documented = {word: SUITE_BITS.get(word, SUITE_DEFAULT_BITS) for word in DEFAULT_RELATIONS}
    return dict(lengths) == documented


def render_appendix_suite(
    relations: Sequence[Relation],
    bits: Mapping[str, int] = SUITE_BITS,
    default_bits: int = SUITE_DEFAULT_BITS,
    engine: Optional[IFlowEngine] = None,
    template: Optional[DiagramSpec] = None,
) -> SuiteResult:
    """
    每个 (关系, 测试词) 一张图，测试词按 bowtie-suite 顺序枚举；返回瓦片内部断点总数
    """
    engine = engine or create_engine(EngineKind.RULE_TABLE)
    result = SuiteResult()
    lengths: dict[str, int] = {}
    for relation in relations:
        length = bits.get(relation.word, default_bits)
        lengths[relation.word] = length
        for literal in enumerate_test_words(WordScheme.BOWTIE_SUITE, length):
            word = suite_word(literal)
            options = template.model_dump(exclude={"word", "element"}) if template else {}
            spec = DiagramSpec(word=word.literal(), element=relation.word, **options)
            name = suite_file_name(relation, literal)
            try:
                svg, stats = render_trace(spec, engine)
            except RuleApplicationError as e:
                logger.warning(f"图组 {name} 跳过: {e.message}")
                result.failures[name] = e.message
                continue
            result.documents[name] = svg
            result.statistics[name] = stats
            result.total_discontinuities += stats.discontinuities
        logger.debug(f"图组 {relation.label}：{length} 比特")
    if _is_documented_suite(lengths) and result.total_discontinuities != DOCUMENTED_DISCONTINUITIES:
        logger.warning(
            f"瓦片内部断点共 {result.total_discontinuities} 处，与文档记载的 {DOCUMENTED_DISCONTINUITIES} 不同"
        )
    return result
