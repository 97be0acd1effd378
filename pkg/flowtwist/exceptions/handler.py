import logging
import sys
from typing import Callable, TextIO, TypeVar

from pydantic import ValidationError

from flowtwist.exceptions import (
    BijectionError,
    CompilationError,
    FlowInvariantError,
    FlowtwistError,
    RuleApplicationError,
    RuleParseError,
    UnknownBuiltinError,
    WordError,
)

logger = logging.getLogger(__name__)

EXIT_PASS = 0
EXIT_FAIL = 1
EXIT_ERROR = 2

E = TypeVar("E", bound=BaseException)
Handler = Callable[[BaseException], int]


class ExitCodeRegistry:
    """
    异常 → 退出码的映射表，按注册顺序匹配，子类需先于父类注册
    """

    def __init__(self, stream: TextIO | None = None):
        self._handlers: list[tuple[type[BaseException], Handler]] = []
        self._stream = stream

    def register(self, exc_type: type[E]) -> Callable[[Callable[[E], int]], Callable[[E], int]]:
        def decorator(func: Callable[[E], int]) -> Callable[[E], int]:
            self._handlers.append((exc_type, func))  # type: ignore[arg-type]
            return func

        return decorator

    def report(self, message: str) -> None:
        print(message, file=self._stream or sys.stderr)

    def handle(self, exc: BaseException) -> int:
        for exc_type, func in self._handlers:
            if isinstance(exc, exc_type):
                return func(exc)
        raise exc


def register_exception_handlers(registry: ExitCodeRegistry) -> ExitCodeRegistry:
    """
    注册命令行的全局异常处理器：解析/用法/引擎错误退出码 2
    """

    @registry.register(RuleParseError)
    def rule_parse_error_handler(exc: RuleParseError) -> int:
        logger.error(f"规则文件解析失败: {exc.message}")
        registry.report(f"rule parse error: {exc.message}")
        return EXIT_ERROR

    @registry.register(RuleApplicationError)
    def rule_application_error_handler(exc: RuleApplicationError) -> int:
        logger.error(f"规则应用失败: {exc.message}")
        registry.report(f"engine error: {exc.message}")
        return EXIT_ERROR

    @registry.register(CompilationError)
    def compilation_error_handler(exc: CompilationError) -> int:
        logger.error(f"编译失败，见证数 {len(exc.witnesses)}")
        registry.report(f"compilation failed: {exc.message}")
        return EXIT_ERROR

    @registry.register(UnknownBuiltinError)
    def unknown_builtin_handler(exc: UnknownBuiltinError) -> int:
        registry.report(f"usage error: {exc.message}")
        return EXIT_ERROR

    # ========== 输入类错误 ==========
    @registry.register(WordError)
    def word_error_handler(exc: WordError) -> int:
        registry.report(f"word error: {exc.message}")
        return EXIT_ERROR

    @registry.register(BijectionError)
    def bijection_error_handler(exc: BijectionError) -> int:
        registry.report(f"bijection error: {exc.message}")
        return EXIT_ERROR

    @registry.register(FlowInvariantError)
    def flow_invariant_handler(exc: FlowInvariantError) -> int:
        logger.error(f"流不变式被破坏: {exc.message} | 详情：{exc.detail}")
        registry.report(f"engine error: {exc.message}")
        return EXIT_ERROR

    @registry.register(FlowtwistError)
    def flowtwist_error_handler(exc: FlowtwistError) -> int:
        registry.report(f"error: {exc.message}")
        return EXIT_ERROR

    @registry.register(ValidationError)
    def pydantic_validation_handler(exc: ValidationError) -> int:
        registry.report(f"invalid configuration: {exc.errors()}")
        return EXIT_ERROR

    @registry.register(OSError)
    def os_error_handler(exc: OSError) -> int:
        registry.report(f"i/o error: {exc}")
        return EXIT_ERROR

    return registry
