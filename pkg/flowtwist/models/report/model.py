from typing import List, Optional

from pydantic import BaseModel, Field

from flowtwist.models.types.enums import CheckPhase, EngineKind, Verdict


class Distortion(BaseModel):
    """与恒等流的差异描述"""

    word_changed: bool
    final_word: str
    first_difference: Optional[int] = Field(None, description="规范化后第一个与恒等流不同的分片下标")
    letter_widths: List[str] = Field(default_factory=list, description="各字母的物理宽度 num/den")
    min_slope: str
    max_slope: str


class Witness(BaseModel):
    """失败见证：初始词 + 最终分片（有理数序列化为 num/den）"""

    word: str
    phase: CheckPhase
    reason: str
    pieces: List[List[str]] = Field(default_factory=list)
    distortion: Optional[Distortion] = None


class RelationReport(BaseModel):
    relation: str
    label: str
    engine: EngineKind
    max_len: int
    verdict: Verdict
    stabilization_length: Optional[int] = Field(None, description="最后一个比特不再被触碰的最小比特长度")
    read_depth: int = Field(0, description="哨兵阶段读到的最深位置（含锚点）")
    words_checked: int = 0
    witnesses: List[Witness] = Field(default_factory=list)
    incidents: List[str] = Field(default_factory=list, description="哨兵/领结事件")

    @property
    def passed(self) -> bool:
        return self.verdict is Verdict.PASS


class VerificationSummary(BaseModel):
    verdict: Verdict
    engine: EngineKind
    max_len: int
    relations: List[RelationReport] = Field(default_factory=list)

    @property
    def passed(self) -> bool:
        return self.verdict is Verdict.PASS


class RandomCheckReport(BaseModel):
    """随机多锚点构型上的抽查结果"""

    relation: str
    engine: EngineKind
    seed: int
    configurations: int
    failures: List[Witness] = Field(default_factory=list)

    @property
    def passed(self) -> bool:
        return not self.failures


class TraceStatistics(BaseModel):
    """时空图统计：每行分片数与瓦片内部断点数"""

    steps: int
    piece_counts: List[int] = Field(default_factory=list)
    discontinuities: int = 0
    final_word: str = ""
