import logging
from concurrent.futures import ProcessPoolExecutor
from typing import Sequence

from flowtwist.models.relation.model import Relation
from flowtwist.models.report.model import RelationReport
from flowtwist.models.types.enums import EngineKind

logger = logging.getLogger(__name__)


# 进程池：每个关系一个任务，工作进程内自行构造引擎
def run_relation_checks(
    relations: Sequence[Relation],
    max_len: int,
    engine_kind: EngineKind,
    generator_c: str = "c",
    witness_cap: int = 5,
    threads: int = 1,
) -> list[RelationReport]:
    """按输入顺序返回各关系的报告；threads <= 1 时顺序执行"""
    from flowtwist.services.verify_service import check_relation_with

    args = [(relation, max_len, engine_kind, generator_c, witness_cap) for relation in relations]
    if threads <= 1 or len(args) <= 1:
        return [check_relation_with(*arg) for arg in args]

    workers = min(threads, len(args))
    logger.info(f"进程池启动：{workers} 个工作进程，{len(args)} 个关系")
    with ProcessPoolExecutor(max_workers=workers) as executor:
        futures = [executor.submit(check_relation_with, *arg) for arg in args]
        return [future.result() for future in futures]
