import re

from flowtwist.models.types.constants import GENERATORS

_WORD_LITERAL = re.compile(r"^[012]*[3~]?$")
_ELEMENT = re.compile(r"^[abcABC]+$")
_RELATION_LABEL = re.compile(r"^[A-Za-z0-9_.-]{1,40}$")


# 验证词字面量（可带一个终止标记）
def validate_word_literal(value: str) -> str:
    """词字面量：符号 0/1/2，末尾可带 3（哨兵）或 ~（领结），允许空格分隔"""
    compact = "".join(value.split())
    if not compact or not _WORD_LITERAL.match(compact):
        raise ValueError(f"词字面量无效: {value!r}，应由 0/1/2 组成，末尾可带 3 或 ~")
    return compact


# 验证生成元序列
def validate_element(value: str) -> str:
    """生成元序列：a/b/c，大写字母表示逆元"""
    compact = "".join(value.split())
    if not _ELEMENT.match(compact):
        raise ValueError(f"生成元序列无效: {value!r}，只允许 {''.join(GENERATORS)} 及其大写逆元")
    return compact


def validate_relation_label(value: str) -> str:
    if not _RELATION_LABEL.match(value):
        raise ValueError(f"关系标签无效: {value!r}")
    return value
