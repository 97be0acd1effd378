from enum import Enum


# 注意:必须继承str
class Symbol(str, Enum):
    """字母表符号（文本形式即单字符）"""

    S0 = "0"
    S1 = "1"
    S2 = "2"  # 锚点
    SENTINEL = "3"  # 哨兵：一旦被规则读到即报错
    BOWTIE = "~"  # 领结：任意比特延续，不得被改写或用于决策

    @property
    def is_shift_symbol(self) -> bool:
        return self in (Symbol.S0, Symbol.S1, Symbol.S2)


class Boundary(str, Enum):
    """锚定词的边界语义"""

    CIRCULAR = "circular"  # (2w)^Z，首尾相接
    SENTINEL = "sentinel"
    BOWTIE = "bowtie"


class EngineKind(str, Enum):
    RULE_TABLE = "rule-table"  # 局部规则表
    BIJECTION = "bijection"  # 前缀码双射的抽象 apply


class Orientation(str, Enum):
    ROWS = "rows"  # 每步一行，自上而下
    COLUMNS = "columns"  # 每步一列，自左而右


class Verdict(str, Enum):
    PASS = "PASS"
    FAIL = "FAIL"


class CheckPhase(str, Enum):
    """关系校验的三个阶段"""

    CIRCULAR = "circular"
    FRONTIER = "frontier"
    SENTINEL = "sentinel"
    RANDOM = "random"  # 随机多锚点构型抽查


class WordScheme(str, Enum):
    CIRCULAR = "circular"
    BOWTIE_SUITE = "bowtie-suite"


class ApplicationErrorKind(str, Enum):
    """规则应用失败的种类（值即对外的错误文案）"""

    NO_COVER = "no covering mapping"
    AMBIGUOUS = "ambiguous cover"
    SENTINEL_READ = "sentinel read"
    BOWTIE_DEPENDENT = "bowtie-dependent"
    BOWTIE_REWRITTEN = "bowtie rewritten"
