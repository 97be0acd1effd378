from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path
from typing import Any, Callable, Optional, Sequence

from pydantic import BaseModel

from flowtwist import __version__
from flowtwist.configs.base import BaseConfig
from flowtwist.engines import create_engine
from flowtwist.exceptions.handler import EXIT_ERROR, EXIT_FAIL, EXIT_PASS, ExitCodeRegistry, register_exception_handlers
from flowtwist.models.relation.model import Relation
from flowtwist.models.types.enums import EngineKind, Orientation
from flowtwist.models.word.model import AnchoredWord
from flowtwist.services.flow_service import identity_flow, is_identity, normalize
from flowtwist.services.render_service import DiagramSpec, render_appendix_suite, render_trace
from flowtwist.services.rule_service import builtin_generator, format_local_rule, parse_local_rule, validate_partition
from flowtwist.services.veelike_service import builtin_bijection, compile_to_local_rule, parse_bijection
from flowtwist.services.verify_service import (
    apply_relation,
    check_random_configurations,
    default_relations,
    extra_relations,
    parse_relations,
    verify_embedding,
)
from flowtwist.utils.logger import create_run_logger
from flowtwist.utils.rational import format_rational

logger = logging.getLogger(__name__)

Command = Callable[[argparse.Namespace, BaseConfig], int]


# ========== 输出 ==========
def _dump(payload: Any) -> str:
    if isinstance(payload, BaseModel):
        payload = payload.model_dump(mode="json")
    return json.dumps(payload, indent=2, ensure_ascii=False)


def _emit(text: str, out: Optional[Path]) -> None:
    """写到 --out 指定的文件，否则写到标准输出"""
    if out is None:
        sys.stdout.write(text if text.endswith("\n") else text + "\n")
        return
    out.parent.mkdir(parents=True, exist_ok=True)
    out.write_text(text if text.endswith("\n") else text + "\n", encoding="utf-8")
    logger.info(f"已写入 {out}")


def _read(path: Path) -> str:
    return path.read_text(encoding="utf-8")


# ========== 子命令 ==========
def cmd_validate(args: argparse.Namespace, config: BaseConfig) -> int:
    rule = parse_local_rule(_read(args.rule), args.rule.stem) if args.rule else builtin_generator(args.builtin)
    report = validate_partition(rule)
    _emit(_dump(report), None)
    return EXIT_PASS if report.ok else EXIT_FAIL


def cmd_apply(args: argparse.Namespace, config: BaseConfig) -> int:
    engine = create_engine(args.engine or config.verify.engine, args.generator_c or config.verify.generator_c)
    word = AnchoredWord.from_literal(args.word)
    trace = apply_relation(args.element, identity_flow(word), engine)
    final = normalize(trace.final)
    payload = {
        "word": final.word.literal(),
        "span": format_rational(final.span),
        "identity": is_identity(final, word),
        "read_depth": trace.read_depth,
        "pieces": final.as_rows(),
    }
    _emit(_dump(payload), None)
    return EXIT_PASS


def _load_relations(args: argparse.Namespace) -> list[Relation]:
    if args.relations in (None, "default"):
        relations = default_relations()
    else:
        relations = parse_relations(_read(Path(args.relations)))
    if args.extra:
        relations += extra_relations()
    return relations


def cmd_verify(args: argparse.Namespace, config: BaseConfig) -> int:
    summary = verify_embedding(
        _load_relations(args),
        max_len=args.max_len or config.verify.max_len,
        engine_kind=args.engine or config.verify.engine,
        generator_c=args.generator_c or config.verify.generator_c,
        witness_cap=config.verify.witness_cap,
        threads=args.threads or config.verify.threads,
    )
    _emit(_dump(summary), args.out)
    if args.out is not None:
        for report in summary.relations:
            witness = f" witness {report.witnesses[0].word}" if report.witnesses else ""
            sys.stdout.write(
                f"{report.label}: {report.verdict.value} L={report.stabilization_length} depth={report.read_depth}{witness}\n"
            )
        sys.stdout.write(f"{summary.verdict.value}\n")
    return EXIT_PASS if summary.passed else EXIT_FAIL


def cmd_random(args: argparse.Namespace, config: BaseConfig) -> int:
    engine = create_engine(args.engine or config.verify.engine, args.generator_c or config.verify.generator_c)
    reports = [
        check_random_configurations(relation, args.count, args.length, args.seed, engine)
        for relation in _load_relations(args)
    ]
    _emit(_dump([report.model_dump(mode="json") for report in reports]), args.out)
    return EXIT_PASS if all(report.passed for report in reports) else EXIT_FAIL


def cmd_compile(args: argparse.Namespace, config: BaseConfig) -> int:
    bij = parse_bijection(_read(args.bijection), args.bijection.stem) if args.bijection else builtin_bijection(args.builtin)
    rule = compile_to_local_rule(bij)
    _emit(format_local_rule(rule), args.out)
    return EXIT_PASS


def _diagram_options(args: argparse.Namespace, config: BaseConfig) -> dict[str, Any]:
    return {
        "orientation": args.orientation or config.render.orientation,
        "glyph_scale": config.render.glyph_scale,
        "row_height": config.render.row_height,
        "show_discontinuities": config.render.show_discontinuities,
    }


def cmd_render(args: argparse.Namespace, config: BaseConfig) -> int:
    engine = create_engine(args.engine or config.verify.engine, args.generator_c or config.verify.generator_c)
    spec = DiagramSpec(word=args.word, element=args.element, **_diagram_options(args, config))
    svg, stats = render_trace(spec, engine)
    _emit(svg, args.out)
    _emit(_dump(stats), None)
    return EXIT_PASS


def cmd_suite(args: argparse.Namespace, config: BaseConfig) -> int:
    engine = create_engine(args.engine or config.verify.engine, args.generator_c or config.verify.generator_c)
    template = DiagramSpec(word="2", element="a", **_diagram_options(args, config))
    result = render_appendix_suite(_load_relations(args), engine=engine, template=template)
    args.out.mkdir(parents=True, exist_ok=True)
    for name, svg in result.documents.items():
        (args.out / name).write_text(svg + "\n", encoding="utf-8")
    logger.info(f"图组共 {len(result.documents)} 张")
    if result.failures:
        logger.warning(f"{len(result.failures)} 张图因引擎错误跳过: {sorted(result.failures)}")
    sys.stdout.write(f"{result.total_discontinuities}\n")
    return EXIT_PASS


# ========== 参数 ==========
def _engine_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--engine", choices=[kind.value for kind in EngineKind], help="默认取配置 verify.engine")
    parser.add_argument("--generator-c", choices=["c", "c_broken"], help="用反例双射替换生成元 c")


def _relation_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--relations", default="default", help="关系文件，或 default 使用九个定义关系")
    parser.add_argument("--extra", action="store_true", help="追加反转后的长关系")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="flowtwist", description="Exact PL local rules on the 02-forbidden shift")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("--log-level", help="覆盖配置 logging.level")
    sub = parser.add_subparsers(dest="command", required=True)

    validate = sub.add_parser("validate", help="check exactly-once coverage of a local rule")
    source = validate.add_mutually_exclusive_group(required=True)
    source.add_argument("--rule", type=Path)
    source.add_argument("--builtin")
    validate.set_defaults(func=cmd_validate)

    apply = sub.add_parser("apply", help="apply a generator sequence to a word")
    apply.add_argument("--word", required=True)
    apply.add_argument("--element", required=True)
    _engine_flags(apply)
    apply.set_defaults(func=cmd_apply)

    verify = sub.add_parser("verify", help="verify the relations on anchored words")
    _relation_flags(verify)
    verify.add_argument("--max-len", type=int)
    verify.add_argument("--threads", type=int)
    verify.add_argument("--out", type=Path)
    _engine_flags(verify)
    verify.set_defaults(func=cmd_verify)

    rand = sub.add_parser("random", help="apply relations to random multi-anchor configurations")
    _relation_flags(rand)
    rand.add_argument("--count", type=int, default=100)
    rand.add_argument("--length", type=int, default=24)
    rand.add_argument("--seed", type=int, default=0)
    rand.add_argument("--out", type=Path)
    _engine_flags(rand)
    rand.set_defaults(func=cmd_random)

    compile_ = sub.add_parser("compile", help="compile a prefix bijection to a local rule")
    source = compile_.add_mutually_exclusive_group(required=True)
    source.add_argument("--bijection", type=Path)
    source.add_argument("--builtin")
    compile_.add_argument("--out", type=Path)
    compile_.set_defaults(func=cmd_compile)

    render = sub.add_parser("render", help="draw a spacetime diagram as SVG")
    render.add_argument("--word", required=True)
    render.add_argument("--element", required=True)
    render.add_argument("--out", type=Path)
    render.add_argument("--orientation", choices=[o.value for o in Orientation])
    _engine_flags(render)
    render.set_defaults(func=cmd_render)

    suite = sub.add_parser("suite", help="draw the verification diagram suite")
    suite.add_argument("--out", type=Path, required=True)
    suite.add_argument("--orientation", choices=[o.value for o in Orientation])
    _relation_flags(suite)
    _engine_flags(suite)
    suite.set_defaults(func=cmd_suite)
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return EXIT_ERROR if e.code else EXIT_PASS

    registry = register_exception_handlers(ExitCodeRegistry())
    try:
        config = BaseConfig()
        if args.log_level:
            config.logging.level = args.log_level.upper()
        create_run_logger(config.logging)
        logger.info(f"命令 {args.command}")
        return args.func(args, config)
    except Exception as e:
        return registry.handle(e)


if __name__ == "__main__":
    sys.exit(main())
