from __future__ import annotations

import itertools
import logging
import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterator

from pydantic import BaseModel, Field

from flowtwist.exceptions import BijectionError, CompilationError, RuleApplicationError, UnknownBuiltinError
from flowtwist.models.bijection.model import PrefixBijection
from flowtwist.models.flow.model import FlowedWord
from flowtwist.models.rule.model import LocalRule, Mapping, PatternToken
from flowtwist.models.types.constants import ANCHOR, BIJECTION_TABLES, BITS
from flowtwist.models.types.enums import ApplicationErrorKind, Boundary
from flowtwist.services.flow_service import (
    BlockRewrite,
    from_canonical,
    position_spans,
    rewrite_blocks,
    to_canonical,
)
from flowtwist.services.rule_service import validate_partition

logger = logging.getLogger(__name__)

_PAIR_LINE = re.compile(r"^(?P<p>[01]*)\s*->\s*(?P<q>[01]*)$")


class BijectionReport(BaseModel):
    name: str
    ok: bool
    diagnostics: list[str] = Field(default_factory=list)


# ========== 构造 ==========
def builtin_bijection(name: str) -> PrefixBijection:
    if name not in BIJECTION_TABLES:
        raise UnknownBuiltinError("bijection", name, tuple(BIJECTION_TABLES))
    return PrefixBijection(name, BIJECTION_TABLES[name])


def parse_bijection(text: str, name: str = "bijection") -> PrefixBijection:
    """每行 `p -> q`，# 之后为注释"""
    pairs: list[tuple[str, str]] = []
    for line, raw in enumerate(text.splitlines(), start=1):
        body = raw.split("#", 1)[0].strip()
        if not body:
            continue
        match = _PAIR_LINE.match(body)
        if not match:
            raise BijectionError(f"line {line}: expected `p -> q` over 0/1", {"line": line, "text": raw})
        pairs.append((match.group("p"), match.group("q")))
    if not pairs:
        raise BijectionError("bijection has no pairs")
    return PrefixBijection(name, tuple(pairs))


def strip_zeros(bits: str) -> str:
    return bits.rstrip("0")


def bit_words(max_len: int, min_len: int = 0) -> Iterator[str]:
    """按长度、再按字典序枚举比特词"""
    for length in range(min_len, max_len + 1):
        for values in itertools.product(BITS, repeat=length):
            yield "".join(values)


# ========== 校验 ==========
def _code_diagnostics(words: tuple[str, ...], side: str) -> list[str]:
    problems: list[str] = []
    if len(set(words)) != len(words):
        problems.append(f"{side}: duplicate code words")
    for x, y in itertools.permutations(set(words), 2):
        if y.startswith(x):
            problems.append(f"{side}: {x!r} is a prefix of {y!r}")
    kraft = sum((Fraction(1, 2 ** len(word)) for word in set(words)), Fraction(0))
    if kraft != 1:
        problems.append(f"{side}: Kraft sum {kraft} != 1 (incomplete)" if kraft < 1 else f"{side}: Kraft sum {kraft} > 1")
    return sorted(problems)


def validate_bijection(bij: PrefixBijection) -> BijectionReport:
    """两侧都是完备前缀码，且配对是码之间的双射"""
    diagnostics = _code_diagnostics(bij.domain, "domain") + _code_diagnostics(bij.codomain, "range")
    if not bij.pairs:
        diagnostics.append("no pairs")
    return BijectionReport(name=bij.name, ok=not diagnostics, diagnostics=diagnostics)


def require_valid(bij: PrefixBijection) -> PrefixBijection:
    report = validate_bijection(bij)
    if not report.ok:
        raise BijectionError(f"invalid bijection {bij.name}: {'; '.join(report.diagnostics)}", report.model_dump())
    return bij


# ========== Cantor 语义 ==========
def finite_support_image(bij: PrefixBijection, w: str) -> str:
    """w·0^∞ 的像，去掉末尾的 0"""
    padded = w + "0" * max(0, bij.depth - len(w))
    found = bij.prefix_of(padded)
    if found is None:
        raise BijectionError(f"{bij.name} 的定义域码不完备，无法作用于 {w!r}")
    p, q = found
    return strip_zeros(q + w[len(p) :])


@dataclass(frozen=True, slots=True)
class _AnchorBlock:
    start: int  # 锚点位置
    end: int  # 下一个锚点位置（或词长）

    @property
    def bits_start(self) -> int:
        return self.start + 1


def _anchor_blocks(letters: str) -> list[_AnchorBlock]:
    anchors = [k for k, ch in enumerate(letters) if ch == ANCHOR]
    ends = anchors[1:] + [len(letters)]
    return [_AnchorBlock(s, e) for s, e in zip(anchors, ends)]


@dataclass(frozen=True, slots=True)
class BijectionStep:
    result: FlowedWord
    rewritten: tuple[int, ...]
    read_spans: tuple[tuple[Fraction, Fraction], ...]


def anchored_apply_traced(bij: PrefixBijection, fw: FlowedWord) -> BijectionStep:
    """
    对每个锚定块 2·w：若某定义域码字 p 是 w 的真前缀，把 2·p 常斜率改写为 2·q，其余比特不动；
    否则（w 恰为码字或太短）把整个块改写为 2·finite_support_image(w)
    """
    canon, offset = to_canonical(fw)
    letters = canon.letters
    boundary = canon.word.boundary
    blocks: list[BlockRewrite] = []
    rewritten: list[int] = []
    reads: set[int] = set()

    for block in _anchor_blocks(letters):
        w = letters[block.bits_start : block.end]
        terminal = boundary is not Boundary.CIRCULAR and block.end == len(letters)
        found = bij.prefix_of(w)
        read_next = False
        if found is not None and len(found[0]) < len(w):
            p, q = found
            out, length = ANCHOR + q, 1 + len(p)
        elif found is not None:
            p, q = found
            proper, fallback = ANCHOR + q, ANCHOR + strip_zeros(q)
            length = 1 + len(p)
            if proper == fallback or p.endswith("0"):
                # 以 0 结尾的码字后面不可能是锚点
                out = proper
            elif not terminal:
                out, read_next = fallback, True
            elif boundary is Boundary.SENTINEL:
                raise RuleApplicationError(ApplicationErrorKind.SENTINEL_READ, block.start, letters)
            else:
                # 领结之后只有比特：走真前缀分支
                out = proper
        else:
            if terminal:
                kind = (
                    ApplicationErrorKind.SENTINEL_READ
                    if boundary is Boundary.SENTINEL
                    else ApplicationErrorKind.BOWTIE_REWRITTEN
                )
                raise RuleApplicationError(kind, block.start, letters)
            out, length, read_next = ANCHOR + finite_support_image(bij, w), 1 + len(w), True

        original = letters[block.start : block.start + length]
        blocks.append(BlockRewrite(block.start, length, out))
        rest = block.end - block.start - length
        if rest:
            tail = block.start + length
            blocks.append(BlockRewrite(tail, rest, letters[tail : block.end]))
        if out != original:
            positions = range(block.start, block.start + length)
            rewritten.extend(positions)
            reads.update(positions)
            if read_next:
                reads.add(block.end)

    result = rewrite_blocks(canon, blocks)
    return BijectionStep(from_canonical(result, offset), tuple(rewritten), position_spans(canon, sorted(reads), offset))


def anchored_apply(bij: PrefixBijection, fw: FlowedWord) -> FlowedWord:
    return anchored_apply_traced(bij, fw).result


# ========== 编译 ==========
def _mapping(u: str, v: str, w: str, v_out: str) -> Mapping:
    return Mapping.of(u, v, w, v_out)


def canonical_variables(mapping: Mapping) -> Mapping:
    """按首次出现顺序把变量重命名为 A, B, C, ..."""
    names = {name: chr(ord("A") + k) for k, name in enumerate(mapping.variables())}

    def rename(part: tuple[PatternToken, ...]) -> tuple[PatternToken, ...]:
        return tuple(PatternToken(names[t.value]) if t.is_variable else t for t in part)

    return Mapping(rename(mapping.u), rename(mapping.v), rename(mapping.w), rename(mapping.v_out))


def _merge(x: Mapping, y: Mapping) -> Mapping | None:
    """两映射只在一个上下文位置上 0/1 不同时，合并成一个新变量"""
    if x.v != y.v or x.v_out != y.v_out or len(x.u) != len(y.u) or len(x.w) != len(y.w):
        return None
    context_x, context_y = x.u + x.w, y.u + y.w
    diffs = [k for k, (s, t) in enumerate(zip(context_x, context_y)) if s != t]
    if len(diffs) != 1:
        return None
    k = diffs[0]
    if {context_x[k].value, context_y[k].value} != set(BITS):
        return None
    used = set(x.variables())
    fresh = next(chr(c) for c in range(ord("Z"), ord("A") - 1, -1) if chr(c) not in used)
    merged = context_x[:k] + (PatternToken(fresh),) + context_x[k + 1 :]
    lu = len(x.u)
    return canonical_variables(Mapping(merged[:lu], x.v, merged[lu:], x.v_out))


def merge_mappings(mappings: list[Mapping]) -> list[Mapping]:
    """反复合并，直到没有可合并的映射对"""
    current = [canonical_variables(m) for m in mappings]
    changed = True
    while changed:
        changed = False
        for i, j in itertools.combinations(range(len(current)), 2):
            merged = _merge(current[i], current[j])
            if merged is not None:
                current = current[:i] + [merged] + current[i + 1 : j] + current[j + 1 :]
                changed = True
                break
    return current


def _proves(bij: PrefixBijection, suffix: str) -> bool:
    """任何以 suffix 结尾的锚后比特串都已含定义域前缀（该比特不在改写块内）"""
    m = bij.depth
    if len(suffix) >= m:
        return True
    return all(bij.prefix_of(y + suffix) is not None for y in bit_words(m - len(suffix)))


def compile_to_local_rule(bij: PrefixBijection) -> LocalRule:
    """
    把前缀双射编译成局部规则：锚定块映射 + 深层比特恒等映射，合并后必须通过划分校验
    :raises CompilationError: 划分校验失败（附见证）
    """
    require_valid(bij)
    m = bij.depth

    deep: list[Mapping] = []
    for s in bit_words(m):
        if _proves(bij, s) and not any(_proves(bij, s[k:]) for k in range(1, len(s) + 1)):
            deep.append(_mapping(s, "A", "", "A"))
    for y in bit_words(m - 1):
        if bij.prefix_of(y) is not None and not any(_proves(bij, y[k:]) for k in range(len(y) + 1)):
            deep.append(_mapping(ANCHOR + y, "A", "", "A"))

    anchored: list[Mapping] = []
    for p, q in bij.pairs:
        full = strip_zeros(q)
        if p.endswith("0") or full == q:
            anchored.append(_mapping("", ANCHOR + p, "", ANCHOR + q))
        else:
            anchored.append(_mapping("", ANCHOR + p, "A", ANCHOR + q))
            anchored.append(_mapping("", ANCHOR + p, ANCHOR, ANCHOR + full))
    for w in bit_words(max(m - 1, 0)):
        if len(w) >= m or w.endswith("0") or bij.prefix_of(w) is not None:
            continue
        anchored.append(_mapping("", ANCHOR + w, ANCHOR, ANCHOR + finite_support_image(bij, w)))

    rule = LocalRule(f"compiled-{bij.name}", tuple(merge_mappings(deep) + anchored))
    report = validate_partition(rule)
    if not report.ok:
        raise CompilationError(
            f"compiled rule for {bij.name} fails the partition check ({len(report.witnesses)} windows)",
            [witness.model_dump() for witness in report.witnesses[:20]],
        )
    logger.info(f"编译 {bij.name}: {len(rule.mappings)} 个映射")
    return rule
