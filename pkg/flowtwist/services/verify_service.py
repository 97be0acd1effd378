from __future__ import annotations

import logging
import math
import random
from dataclasses import dataclass, field
from typing import Optional, Sequence

from flowtwist.engines import IFlowEngine, StepTrace, create_engine
from flowtwist.exceptions import FlowtwistError, RuleApplicationError
from flowtwist.models.flow.model import FlowedWord
from flowtwist.models.relation.model import Relation, expand_inverses
from flowtwist.models.report.model import (
    RandomCheckReport,
    RelationReport,
    VerificationSummary,
    Witness,
)
from flowtwist.models.types.constants import (
    ANCHOR,
    BITS,
    DEFAULT_MAX_LEN,
    DEFAULT_RELATIONS,
    DEFAULT_WITNESS_CAP,
)
from flowtwist.models.types.enums import Boundary, CheckPhase, EngineKind, Verdict, WordScheme
from flowtwist.models.word.model import AnchoredWord
from flowtwist.services.flow_service import describe_distortion, identity_flow, is_identity
from flowtwist.services.veelike_service import bit_words
from flowtwist.tasks.pool import run_relation_checks
from flowtwist.utils.validators import validate_relation_label

logger = logging.getLogger(__name__)


# ========== 关系 ==========
def default_relations() -> list[Relation]:
    """九个定义关系（已用 a⁻¹ = a, b⁻¹ = b² 消去逆元）"""
    return [
        Relation(word, word if len(word) <= 8 else f"r{k}") for k, word in enumerate(DEFAULT_RELATIONS, start=1)
    ]


def extra_relations() -> list[Relation]:
    """倒数第二个关系的反转，本身也是一个关系"""
    return [Relation(DEFAULT_RELATIONS[-2][::-1], "r8-reversed")]


def parse_relations(text: str) -> list[Relation]:
    """
    每行一个关系，可带 `label:` 前缀，# 之后为注释；大写字母表示逆元
    """
    relations: list[Relation] = []
    for line, raw in enumerate(text.splitlines(), start=1):
        body = raw.split("#", 1)[0].strip()
        if not body:
            continue
        label = ""
        if ":" in body:
            label, body = (part.strip() for part in body.split(":", 1))
        try:
            if label:
                validate_relation_label(label)
            relations.append(Relation(expand_inverses("".join(body.split())), label or f"line{line}"))
        except (ValueError, FlowtwistError) as e:
            message = e.message if isinstance(e, FlowtwistError) else str(e)
            raise FlowtwistError(f"line {line}: {message}", {"line": line, "text": raw}) from e
    return relations


# ========== 测试词 ==========
def enumerate_test_words(scheme: WordScheme | str, max_len: int) -> list[str]:
    """
    circular：所有比特词，先按长度再按字典序；
    bowtie-suite：长度 0..max_len 中不以 0 结尾的词，再加上长度 max_len 的全部词（带领结）
    """
    if max_len < 0:
        raise ValueError("max_len 不能为负")
    if WordScheme(scheme) is WordScheme.CIRCULAR:
        return list(bit_words(max_len))
    plain = [w for w in bit_words(max_len) if not w.endswith("0")]
    return plain + [w + "~" for w in bit_words(max_len, max_len)]


def suite_word(literal: str) -> AnchoredWord:
    """校验图组里的词：带 ~ 的是领结词，其余是循环词"""
    if literal.endswith("~"):
        return AnchoredWord.anchored(literal[:-1], Boundary.BOWTIE)
    return AnchoredWord.anchored(literal, Boundary.CIRCULAR)


# ========== 应用关系 ==========
@dataclass
class RelationTrace:
    initial: FlowedWord
    steps: list[StepTrace] = field(default_factory=list)

    @property
    def final(self) -> FlowedWord:
        return self.steps[-1].after if self.steps else self.initial

    def read_indices(self) -> set[int]:
        """所有步骤读到的原始字母下标"""
        indices: set[int] = set()
        for step in self.steps:
            for lo, hi in step.read_spans:
                indices.update(range(math.floor(lo), math.ceil(hi)))
        return indices

    @property
    def read_depth(self) -> int:
        """读到的最深位置，从锚点（含）起算"""
        indices = self.read_indices()
        return max(indices) + 1 if indices else 0

    def rows(self) -> list[FlowedWord]:
        return [self.initial] + [step.after for step in self.steps]


def apply_relation(relation: Relation | str, fw: FlowedWord, engine: IFlowEngine) -> RelationTrace:
    """
    从左到右依次作用生成元
    :raises RuleApplicationError: 引擎错误，标注失败的步骤
    """
    word = relation.word if isinstance(relation, Relation) else expand_inverses(relation)
    trace = RelationTrace(fw)
    current = fw
    for index, name in enumerate(word):
        try:
            step = engine.step(name, current)
        except RuleApplicationError as e:
            raise e.at_step(index) from e
        trace.steps.append(step)
        current = step.after
    return trace


# ========== 关系校验 ==========
class _Collector:
    def __init__(self, report: RelationReport, cap: int):
        self.report = report
        self.cap = cap

    @property
    def full(self) -> bool:
        return len(self.report.witnesses) >= self.cap

    def fail(self, word: AnchoredWord, phase: CheckPhase, reason: str, final: Optional[FlowedWord] = None) -> None:
        if self.full:
            return
        witness = Witness(word=word.literal(), phase=phase, reason=reason)
        if final is not None:
            witness.pieces = final.as_rows()
            witness.distortion = describe_distortion(final, word)
        self.report.witnesses.append(witness)
        logger.debug(f"{self.report.label} 见证 {word.literal()} [{phase.value}]: {reason}")


def _run(relation: Relation, word: AnchoredWord, engine: IFlowEngine) -> tuple[Optional[RelationTrace], str]:
    try:
        return apply_relation(relation, identity_flow(word), engine), ""
    except RuleApplicationError as e:
        return None, e.message


def _frontier_stable(relation: Relation, length: int, engine: IFlowEngine) -> tuple[bool, str]:
    """长度为 length 的所有领结词都不报错、是恒等、且不读最后一个比特"""
    for bits in bit_words(length, length):
        word = AnchoredWord.anchored(bits, Boundary.BOWTIE)
        trace, error = _run(relation, word, engine)
        if trace is None:
            return False, f"{word.literal()}: {error}"
        if not is_identity(trace.final, word):
            return False, f"{word.literal()}: not identity"
        deepest = max(trace.read_indices(), default=-1)
        if deepest >= length:
            return False, f"{word.literal()}: reads position {deepest}"
    return True, ""


def check_relation(
    relation: Relation,
    max_len: int = DEFAULT_MAX_LEN,
    engine: Optional[IFlowEngine] = None,
    witness_cap: int = DEFAULT_WITNESS_CAP,
) -> RelationReport:
    """
    三个阶段：
    1. 循环词 2w（|w| ≤ max_len-1）上作用后必须是恒等
    2. 找最小的 L，使所有 |w| = L 的领结词都不触碰最后一个比特（稳定长度）
    3. |w| = max_len-1 的哨兵词上不得读到哨兵，并统计读取深度
    """
    if max_len < 1:
        raise ValueError("max_len 至少为 1")
    engine = engine or create_engine(EngineKind.RULE_TABLE)
    report = RelationReport(
        relation=relation.word, label=relation.label, engine=engine.kind, max_len=max_len, verdict=Verdict.PASS
    )
    collector = _Collector(report, witness_cap)

    # 阶段 1：循环词
    for bits in bit_words(max_len - 1):
        if bits.endswith("0"):
            continue
        word = AnchoredWord.anchored(bits)
        report.words_checked += 1
        trace, error = _run(relation, word, engine)
        if trace is None:
            collector.fail(word, CheckPhase.CIRCULAR, error)
        elif not is_identity(trace.final, word):
            collector.fail(word, CheckPhase.CIRCULAR, "flow distortion", trace.final)
        if collector.full:
            break

    # 阶段 2：稳定长度
    if not collector.full:
        reasons = []
        for length in range(max_len):
            stable, reason = _frontier_stable(relation, length, engine)
            if stable:
                report.stabilization_length = length
                break
            reasons.append(reason)
        if report.stabilization_length is None:
            word = AnchoredWord.anchored("1" * (max_len - 1), Boundary.BOWTIE)
            collector.fail(word, CheckPhase.FRONTIER, "no stabilization length: " + "; ".join(reasons[-1:]))
        else:
            for extra in (1, 2):
                length = report.stabilization_length + extra
                if length < max_len and not _frontier_stable(relation, length, engine)[0]:
                    report.incidents.append(f"frontier not monotone at length {length}")

    # 阶段 3：哨兵
    if not collector.full:
        for bits in bit_words(max_len - 1, max_len - 1):
            word = AnchoredWord.anchored(bits, Boundary.SENTINEL)
            report.words_checked += 1
            trace, error = _run(relation, word, engine)
            if trace is None:
                report.incidents.append(f"{word.literal()}: {error}")
                collector.fail(word, CheckPhase.SENTINEL, error)
            elif not is_identity(trace.final, word):
                collector.fail(word, CheckPhase.SENTINEL, "flow distortion", trace.final)
            else:
                depth = trace.read_depth
                report.read_depth = max(report.read_depth, depth)
            if collector.full:
                break

    if report.witnesses or report.stabilization_length is None:
        report.verdict = Verdict.FAIL
        logger.warning(f"关系 {relation.label} 未通过：{len(report.witnesses)} 个见证")
    else:
        logger.info(
            f"关系 {relation.label} 通过：稳定长度 {report.stabilization_length}，读取深度 {report.read_depth}"
        )
    return report


def check_relation_with(
    relation: Relation,
    max_len: int,
    engine_kind: EngineKind,
    generator_c: str = "c",
    witness_cap: int = DEFAULT_WITNESS_CAP,
) -> RelationReport:
    """进程池入口：在工作进程里构造引擎"""
    return check_relation(relation, max_len, create_engine(engine_kind, generator_c), witness_cap)


def verify_embedding(
    relations: Sequence[Relation],
    max_len: int = DEFAULT_MAX_LEN,
    engine_kind: EngineKind | str = EngineKind.RULE_TABLE,
    generator_c: str = "c",
    witness_cap: int = DEFAULT_WITNESS_CAP,
    threads: int = 1,
) -> VerificationSummary:
    """逐个关系校验；全部通过才是 PASS"""
    kind = EngineKind(engine_kind)
    reports = run_relation_checks(relations, max_len, kind, generator_c, witness_cap, threads)
    verdict = Verdict.PASS if all(report.passed for report in reports) else Verdict.FAIL
    logger.info(f"校验完成：{verdict.value}（{len(reports)} 个关系，引擎 {kind.value}，max_len {max_len}）")
    return VerificationSummary(verdict=verdict, engine=kind, max_len=max_len, relations=reports)


# ========== 随机构型抽查 ==========
def random_anchored_word(length: int, seed: int | random.Random, anchors: Optional[int] = None) -> AnchoredWord:
    """
    随机的合法循环词，首字母是锚点
    :param anchors: 锚点个数，缺省时随机取 1..length//3+1
    """
    if length < 1:
        raise ValueError("length 至少为 1")
    rng = seed if isinstance(seed, random.Random) else random.Random(seed)
    if anchors is None:
        anchors = rng.randint(1, length // 3 + 1)
    if not 1 <= anchors <= length:
        raise ValueError(f"锚点个数必须在 1..{length} 之间")
    positions = {0} | set(rng.sample(range(1, length), anchors - 1))
    letters = [ANCHOR if k in positions else rng.choice(BITS) for k in range(length)]
    # 锚点之前不能是 0
    for k in positions:
        if letters[k - 1] == "0":
            letters[k - 1] = "1"
    return AnchoredWord("".join(letters))


def check_random_configurations(
    relation: Relation,
    count: int,
    length: int,
    seed: int,
    engine: Optional[IFlowEngine] = None,
) -> RandomCheckReport:
    """在随机的多锚点循环构型上作用关系，检查是否恒等"""
    engine = engine or create_engine(EngineKind.RULE_TABLE)
    rng = random.Random(seed)
    report = RandomCheckReport(relation=relation.word, engine=engine.kind, seed=seed, configurations=count)
    for _ in range(count):
        word = random_anchored_word(length, rng)
        trace, error = _run(relation, word, engine)
        if trace is None:
            report.failures.append(Witness(word=word.literal(), phase=CheckPhase.RANDOM, reason=error))
        elif not is_identity(trace.final, word):
            report.failures.append(
                Witness(
                    word=word.literal(),
                    phase=CheckPhase.RANDOM,
                    reason="flow distortion",
                    pieces=trace.final.as_rows(),
                    distortion=describe_distortion(trace.final, word),
                )
            )
    if report.failures:
        logger.warning(f"关系 {relation.label} 在 {len(report.failures)}/{count} 个随机构型上失败")
    return report
