from __future__ import annotations

import itertools
import logging
import re
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Iterator, Optional

from flowtwist.exceptions import FlowtwistError, RuleApplicationError, RuleParseError, UnknownBuiltinError
from flowtwist.models.flow.model import FlowedWord
from flowtwist.models.rule.model import (
    GroundMapping,
    LocalRule,
    Mapping,
    PartitionWitness,
    PatternToken,
    ValidationReport,
)
from flowtwist.models.types.constants import BITS, RULE_TEXTS
from flowtwist.models.types.enums import ApplicationErrorKind, Boundary
from flowtwist.models.word.model import BUILTIN_SHIFT, VertexShift
from flowtwist.services.flow_service import (
    BlockRewrite,
    from_canonical,
    is_legal_word,
    position_spans,
    rewrite_blocks,
    to_canonical,
)

logger = logging.getLogger(__name__)

_MAPPING_LINE = re.compile(r"^(?P<u>[^()]*)\((?P<v>[^()]*)\)(?P<w>[^():]*):(?P<out>[^():]*)$")
_LEFT = None  # 锚定词左侧之外：不与任何记号匹配
_TERMINATOR = "|"
_UNKNOWN = "?"

BUILTIN_GENERATORS = ("a", "b", "c", "c_broken_rule")


# ========== 解析与打印 ==========
def _parse_tokens(text: str, line: int, raw: str) -> tuple[PatternToken, ...]:
    try:
        return tuple(PatternToken(ch) for ch in text)
    except FlowtwistError as e:
        raise RuleParseError(e.message, line, raw) from e


def parse_mapping(raw: str, line: int = 1) -> Mapping:
    compact = "".join(raw.split())
    match = _MAPPING_LINE.match(compact)
    if not match:
        raise RuleParseError("expected u(v)w:v'", line, raw)
    parts = [_parse_tokens(match.group(key), line, raw) for key in ("u", "v", "w", "out")]
    try:
        return Mapping(*parts)
    except FlowtwistError as e:
        raise RuleParseError(e.message, line, raw) from e


def parse_local_rule(text: str, name: str = "rule") -> LocalRule:
    """
    解析规则文本：每行一个映射 u(v)w:v'，# 之后为注释
    :raises RuleParseError: 语法错误、非法字面量、空 v、未绑定变量、重复映射（带行号）
    """
    mappings: list[Mapping] = []
    seen: dict[str, int] = {}
    for line, raw in enumerate(text.splitlines(), start=1):
        body = raw.split("#", 1)[0].strip()
        if not body:
            continue
        mapping = parse_mapping(body, line)
        key = mapping.format()
        if key in seen:
            raise RuleParseError(f"duplicate mapping (first on line {seen[key]})", line, raw)
        seen[key] = line
        mappings.append(mapping)
    if not mappings:
        raise RuleParseError("rule has no mappings", 1, text)
    logger.debug(f"解析规则 {name}: {len(mappings)} 个映射")
    return LocalRule(name, tuple(mappings))


def format_local_rule(rule: LocalRule) -> str:
    return rule.format()


def builtin_generator(name: str) -> LocalRule:
    """a、b、c 的手写规则表；c_broken_rule 为反例双射编译出的规则"""
    if name in RULE_TEXTS:
        return parse_local_rule(RULE_TEXTS[name], name)
    if name == "c_broken_rule":
        from flowtwist.services.veelike_service import builtin_bijection, compile_to_local_rule

        return compile_to_local_rule(builtin_bijection("c_broken"))
    raise UnknownBuiltinError("generator", name, BUILTIN_GENERATORS)


# ========== 实例化 ==========
@lru_cache(maxsize=256)
def ground_mappings(rule: LocalRule, shift: VertexShift = BUILTIN_SHIFT) -> tuple[GroundMapping, ...]:
    """把比特变量全部实例化，丢弃 u·v·w 不合法的实例"""
    ground: list[GroundMapping] = []
    for index, mapping in enumerate(rule.mappings):
        names = mapping.variables()
        used_in_output = {t.value for t in mapping.v_out if t.is_variable}
        lu, lv = len(mapping.u), len(mapping.v)
        read_offsets = tuple(
            k
            for k, t in enumerate(mapping.pattern)
            if lu <= k < lu + lv or not t.is_variable or t.value in used_in_output
        )
        for values in itertools.product(BITS, repeat=len(names)):
            env = dict(zip(names, values))

            def bind(part: tuple[PatternToken, ...]) -> str:
                return "".join(env[t.value] if t.is_variable else t.value for t in part)

            u, v, w = bind(mapping.u), bind(mapping.v), bind(mapping.w)
            if not is_legal_word(u + v + w, shift):
                continue
            ground.append(GroundMapping(index, u, v, w, bind(mapping.v_out), read_offsets))
    return tuple(ground)


@lru_cache(maxsize=256)
def _ground_index(rule: LocalRule) -> dict[str, tuple[GroundMapping, ...]]:
    index: dict[str, list[GroundMapping]] = {}
    for g in ground_mappings(rule):
        index.setdefault(g.v[0], []).append(g)
    return {key: tuple(value) for key, value in index.items()}


# ========== 划分校验 ==========
def legal_words(length: int, shift: VertexShift = BUILTIN_SHIFT) -> Iterator[str]:
    """按字母表顺序枚举给定长度的所有合法（非循环）词"""
    if length == 0:
        yield ""
        return
    stack: list[str] = list(reversed(shift.alphabet))
    while stack:
        word = stack.pop()
        if len(word) == length:
            yield word
            continue
        for symbol in reversed(shift.alphabet):
            if shift.allows(word[-1], symbol):
                stack.append(word + symbol)


def validate_partition(rule: LocalRule, shift: VertexShift = BUILTIN_SHIFT) -> ValidationReport:
    """
    对每个长度 2R-1 的合法窗口，统计 v 覆盖中心格的实例化映射个数，恰为 1 才合格
    """
    radius = rule.radius
    size, center = 2 * radius - 1, radius - 1
    ground = ground_mappings(rule, shift)
    witnesses: list[PartitionWitness] = []
    checked = 0
    for window in legal_words(size, shift):
        checked += 1
        covering: list[int] = []
        for g in ground:
            lu = len(g.u)
            pattern = g.pattern
            for offset in range(len(g.v)):
                if window.startswith(pattern, center - offset - lu):
                    covering.append(g.source)
        if len(covering) != 1:
            witnesses.append(
                PartitionWitness(window=window, offset=center, count=len(covering), mappings=sorted(covering))
            )
    logger.debug(f"划分校验 {rule.name}: 窗口 {checked} 个，违例 {len(witnesses)} 个")
    return ValidationReport(rule=rule.name, ok=not witnesses, windows_checked=checked, witnesses=witnesses)


# ========== 应用 ==========
@dataclass(frozen=True, slots=True)
class _Choice:
    mapping: GroundMapping
    length: int  # 词内的 v 长度（领结处被截断的恒等块会更短）


class _Cells:
    """规范坐标系下按位置取符号：循环取模，左侧之外不匹配，右侧之外为终止符或未知比特"""

    def __init__(self, letters: str, boundary: Boundary):
        self.letters = letters
        self.n = len(letters)
        self.boundary = boundary

    def at(self, position: int) -> Optional[str]:
        if self.boundary is Boundary.CIRCULAR:
            return self.letters[position % self.n]
        if position < 0:
            return _LEFT
        if position < self.n:
            return self.letters[position]
        return _TERMINATOR if self.boundary is Boundary.SENTINEL else _UNKNOWN


def _match(g: GroundMapping, cells: _Cells, start: int, assignment: dict[int, str]) -> tuple[bool, list[int]]:
    """返回 (在已知位置上是否匹配, 触及的词外位置)"""
    outside: list[int] = []
    for k, expected in enumerate(g.pattern):
        position = start + k
        actual = cells.at(position)
        if actual is _LEFT:
            return False, outside
        if actual == _TERMINATOR:
            outside.append(position)
            continue
        if actual == _UNKNOWN:
            if expected not in BITS:
                return False, outside
            if position in assignment:
                if assignment[position] != expected:
                    return False, outside
            else:
                outside.append(position)
            continue
        if actual != expected:
            return False, outside
    return True, outside


def _error(kind: ApplicationErrorKind, position: int, cells: _Cells) -> RuleApplicationError:
    return RuleApplicationError(kind, position, cells.letters)


def _decide(candidates: tuple[GroundMapping, ...], cells: _Cells, i: int) -> _Choice:
    matched: list[GroundMapping] = []
    pending: list[tuple[GroundMapping, list[int]]] = []
    for g in candidates:
        ok, outside = _match(g, cells, i - len(g.u), {})
        if not ok:
            continue
        if outside:
            pending.append((g, outside))
        else:
            matched.append(g)

    if not pending:
        if not matched:
            raise _error(ApplicationErrorKind.NO_COVER, i, cells)
        if len(matched) > 1:
            raise _error(ApplicationErrorKind.AMBIGUOUS, i, cells)
        return _Choice(matched[0], len(matched[0].v))

    if cells.boundary is Boundary.SENTINEL:
        raise _error(ApplicationErrorKind.SENTINEL_READ, i, cells)

    # 领结：对涉及的未知比特逐一赋值，要求每种赋值都选出同一个改写
    unknown = sorted({p for _, outside in pending for p in outside})
    choices: list[_Choice] = []
    for values in itertools.product(BITS, repeat=len(unknown)):
        assignment = dict(zip(unknown, values))
        hits = list(matched)
        for g, _ in pending:
            if _match(g, cells, i - len(g.u), assignment)[0]:
                hits.append(g)
        if not hits:
            raise _error(ApplicationErrorKind.NO_COVER, i, cells)
        if len(hits) > 1:
            raise _error(ApplicationErrorKind.AMBIGUOUS, i, cells)
        g = hits[0]
        inside = min(len(g.v), cells.n - i)
        if inside < len(g.v) and not g.is_identity:
            raise _error(ApplicationErrorKind.BOWTIE_REWRITTEN, i, cells)
        choices.append(_Choice(g, inside))

    first = choices[0]
    signature = _signature(first)
    if any(_signature(c) != signature for c in choices[1:]):
        raise _error(ApplicationErrorKind.BOWTIE_DEPENDENT, i, cells)
    return first


def _signature(choice: _Choice) -> tuple:
    g = choice.mapping
    if g.is_identity:
        return g.source, choice.length, None
    return g.source, choice.length, g.v_out


@dataclass(frozen=True, slots=True)
class RuleStep:
    result: FlowedWord
    rewritten: tuple[int, ...]
    read_spans: tuple[tuple[Fraction, Fraction], ...]


def apply_rule_traced(rule: LocalRule, fw: FlowedWord) -> RuleStep:
    """
    从锚点起自左向右发现 v 块，每块由唯一的实例化映射覆盖，按常斜率改写
    :raises RuleApplicationError: 无覆盖、多重覆盖、读到哨兵、依赖领结、改写领结
    """
    canon, offset = to_canonical(fw)
    cells = _Cells(canon.letters, canon.word.boundary)
    index = _ground_index(rule)
    blocks: list[BlockRewrite] = []
    rewritten: list[int] = []
    reads: set[int] = set()
    i = 0
    while i < cells.n:
        choice = _decide(index.get(cells.letters[i], ()), cells, i)
        g = choice.mapping
        if i + len(g.v) > cells.n and cells.boundary is Boundary.CIRCULAR:
            # 块越过了下一个周期的锚点
            raise _error(ApplicationErrorKind.AMBIGUOUS, i, cells)
        if g.is_identity:
            blocks.append(BlockRewrite(i, choice.length, cells.letters[i : i + choice.length]))
        else:
            blocks.append(BlockRewrite(i, choice.length, g.v_out))
            rewritten.extend(range(i, i + choice.length))
            start = i - len(g.u)
            reads.update(start + k for k in g.read_offsets)
        i += choice.length

    result = rewrite_blocks(canon, blocks)
    return RuleStep(
        from_canonical(result, offset),
        tuple(rewritten),
        position_spans(canon, sorted(reads), offset),
    )


def apply_rule(rule: LocalRule, fw: FlowedWord) -> FlowedWord:
    return apply_rule_traced(rule, fw).result


def deep_bit_mappings(rule: LocalRule) -> list[Mapping]:
    """v 只由比特变量组成的映射（远离锚点的比特所用）"""
    return [m for m in rule.mappings if all(t.is_variable for t in m.v)]


def is_deep_bit_neutral(rule: LocalRule) -> bool:
    """所有纯比特变量映射都原样输出 v"""
    return all(m.v_out == m.v for m in deep_bit_mappings(rule))
