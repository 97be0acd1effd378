from __future__ import annotations

from typing import Any, Optional

from flowtwist.models.types.enums import ApplicationErrorKind


class FlowtwistError(Exception):
    """所有业务异常的根类，detail 为可序列化的附加信息"""

    def __init__(self, message: str, detail: Optional[dict[str, Any]] = None):
        super().__init__(message)
        self.message = message
        self.detail = detail or {}


class WordError(FlowtwistError):
    """非法词、移位词中出现边界标记、无法解析的词字面量"""


class RotationError(FlowtwistError):
    pass


class FlowInvariantError(FlowtwistError):
    """分片连续性、瓦片覆盖或斜率不变式被破坏"""


class RuleParseError(FlowtwistError):
    def __init__(self, message: str, line: int, text: str = ""):
        super().__init__(f"line {line}: {message}", {"line": line, "text": text})
        self.line = line


class RuleApplicationError(FlowtwistError):
    def __init__(self, kind: ApplicationErrorKind, position: int, word: str = "", step: Optional[int] = None):
        where = f"position {position}" if step is None else f"step {step}, position {position}"
        super().__init__(
            f"{kind.value} at {where} of {word!r}",
            {"kind": kind.value, "position": position, "word": word, "step": step},
        )
        self.kind = kind
        self.position = position
        self.word = word
        self.step = step

    def at_step(self, step: int) -> RuleApplicationError:
        """返回标注了失败步骤的新异常"""
        return RuleApplicationError(self.kind, self.position, self.word, step)


class BijectionError(FlowtwistError):
    pass


class CompilationError(FlowtwistError):
    def __init__(self, message: str, witnesses: list[Any]):
        super().__init__(message, {"witnesses": witnesses})
        self.witnesses = witnesses


class UnknownBuiltinError(FlowtwistError, KeyError):
    def __init__(self, kind: str, name: str, known: tuple[str, ...]):
        FlowtwistError.__init__(self, f"unknown {kind} {name!r}, expected one of {', '.join(known)}")
        self.name = name

    def __str__(self) -> str:
        return self.message
