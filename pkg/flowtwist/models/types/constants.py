# flowtwist/models/types/constants.py
from types import MappingProxyType

# ========== 顶点移位 ==========
# 字母表顺序 0,1,2；唯一禁止的转移是 0→2
SHIFT_ALPHABET = ("0", "1", "2")
SHIFT_MATRIX = (
    (1, 1, 0),
    (1, 1, 1),
    (1, 1, 1),
)
FORBIDDEN_FACTOR = "02"
ANCHOR = "2"
BITS = ("0", "1")

# ========== 内置局部规则（每行一个映射 u(v)w:v'） ==========
RULE_TEXTS = MappingProxyType(
    {
        "a": "\n".join(
            [
                "AB(C):C",
                "(2)2:201",
                "(200):201",
                "(201)A:200",
                "(201)2:2",
                "(21)2:21",
                "(21A):21A",
            ]
        ),
        "b": "\n".join(
            [
                "AB(C):C",
                "(2)2:2",
                "(200):200",
                "(201)A:210",
                "(201)2:21",
                "(21)2:211",
                "(210)A:211",
                "(211):201",
            ]
        ),
        "c": "\n".join(
            [
                "A0(B):B",
                "1(A):A",
                "(2)2:21",
                "(200):21",
                "(201):201",
                "(21)A:200",
                "(21)2:2",
            ]
        ),
    }
)

# ========== 内置前缀置换 ==========
BIJECTION_TABLES = MappingProxyType(
    {
        "a": (("00", "01"), ("01", "00"), ("1", "1")),
        "b": (("01", "10"), ("10", "11"), ("11", "01"), ("00", "00")),
        "c": (("00", "1"), ("1", "00"), ("01", "01")),
        "c_broken": (("000", "10"), ("001", "11"), ("1", "00"), ("01", "01")),
    }
)

# 逆元：a⁻¹ = a, b⁻¹ = b², c⁻¹ = c
GENERATOR_INVERSES = MappingProxyType({"a": "a", "b": "bb", "c": "c"})
GENERATORS = ("a", "b", "c")

# ========== 关系 ==========
DEFAULT_RELATIONS = (
    "aa",
    "bbb",
    "cc",
    "abababab",
    "cacaca",
    "cabbabacabbabacbcababbacababba",
    "acbcbabbcbbcbcabcbbcabbacbbcbcbabb",
    "abbcbcabbabbcbcbbabbcbbcbabcbbcabb",
    "cabbcbbcbacabacbcbbcabbcabcbbcbbacbacbcbbcabb",
)

# 前四个关系只需读三个符号
SHALLOW_RELATION_COUNT = 4
SHALLOW_READ_DEPTH = 3
MAX_READ_DEPTH = 4

# ========== 校验图组 ==========
# 每个关系图组使用的最长比特数（不含锚点与领结）
SUITE_BITS = MappingProxyType(
    {
        "aa": 2,
        "bbb": 2,
        "cc": 2,
        "abababab": 2,
    }
)
SUITE_DEFAULT_BITS = 3
DOCUMENTED_DISCONTINUITIES = 57

# ========== 默认值 ==========
DEFAULT_MAX_LEN = 11
DEFAULT_WITNESS_CAP = 5
