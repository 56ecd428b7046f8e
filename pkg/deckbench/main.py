"""
deckbench 命令行入口

用法:
    python -m deckbench census --kind graph --n 4
    python -m deckbench verify eq1 --n 4 --exhaustive
    python -m deckbench certify --kind graph --n 4 --predicate connected
"""

import argparse
import sys
import time
from typing import Callable, Dict, List, Optional, Tuple

from .config import COMMANDS, COUNT_ACTIONS, FORMATS, VERIFY_ACTIONS, RunConfig, reload_yaml_config
from .core.certify import (FamilySource, FamilySpec, SearchBudget, build_matrix, certify,
                           deck_sequence, load_family, verify_eq1_grid, verify_kelly,
                           verify_recurrence_grid, verify_theorem1, verify_theorem2)
from .core.covers import (GraphSequence, configure_table, cover_count, eq1_sides, kocay_sum,
                          nonoverlapping_cover_count, recurrence_sides, subgraph_count)
from .core.enumerate import ClassPredicate, ClassSpec, enumerate_classes
from .core.errors import ConfigError, Verdict, WorkbenchError
from .core.graph import Graph, GraphKind, graph_from_key
from .core.graph6 import decode_graph, encode_graph
from .core.linalg import rank
from .core.logger import logger
from .core.recon import census, deck, is_legitimate_deck, partition_by_deck
from .core.report import ReportGenerator

# 命令处理函数返回 (报告文本, 退出码)
Outcome = Tuple[str, int]


def parse_arguments(argv: Optional[List[str]] = None) -> argparse.Namespace:
    """解析命令行参数（缺省值为 None，交给 RunConfig 按配置文件/环境变量补全）"""
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--kind", choices=("graph", "digraph"), help="图类型")
    common.add_argument("--n", type=int, help="顶点数")
    common.add_argument("--predicate", choices=("all", "connected", "oriented"), help="图类谓词")
    common.add_argument("--family", dest="family_path", help="序列族文件（每行逗号分隔的 graph6）")
    common.add_argument("--sequence", help="单个序列（逗号分隔的 graph6）")
    common.add_argument("--format", dest="output_format", choices=FORMATS, help="输出格式")
    common.add_argument("-o", "--output", help="输出文件路径（默认为标准输出）")
    common.add_argument("--seed", type=int, help="随机种子")
    common.add_argument("--jobs", type=int, help="并行进程数")
    common.add_argument("--slow", action="store_true", default=None, help="允许较慢的穷举规模")
    common.add_argument("--trials", type=int, help="随机校验次数")
    common.add_argument("--exhaustive", action="store_true", default=None, help="穷举网格校验")
    common.add_argument("--timings", action="store_true", default=None, help="报告中附带耗时")
    common.add_argument("-v", "--verbose", action="store_true", default=None, help="详细输出")
    common.add_argument("--config", dest="config_path", help="YAML 配置文件路径")

    parser = argparse.ArgumentParser(
        prog="deckbench",
        description="deckbench - 图重构的覆盖数矩阵工作台",
        formatter_class=argparse.RawDescriptionHelpFormatter,
        epilog="""
示例:
  %(prog)s census --kind graph --n 4
  %(prog)s enum --kind digraph --n 3
  %(prog)s count c --sequence "A_,A_" "Bg"
  %(prog)s verify eq1 --n 4 --exhaustive
  %(prog)s certify --kind graph --n 4 --predicate connected
        """,
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for command in COMMANDS:
        p = sub.add_parser(command, parents=[common])
        if command == "count":
            p.add_argument("action", choices=COUNT_ACTIONS)
        elif command == "verify":
            p.add_argument("action", choices=VERIFY_ACTIONS)
        p.add_argument("graphs", nargs="*", help="graph6/digraph6 记号")

    # 选项之后的图记号不会被 nargs="*" 收走，这里按原顺序补回 graphs
    args, extras = parser.parse_known_args(argv)
    unknown = [token for token in extras if token.startswith("-") and len(token) > 1]
    if unknown:
        parser.error(f"unrecognized arguments: {' '.join(unknown)}")
    args.graphs = list(args.graphs) + extras
    return args


def build_config(args: argparse.Namespace) -> RunConfig:
    """命令行 > 环境变量 > YAML > 默认值"""
    if args.config_path:
        reload_yaml_config(args.config_path)
    overrides = {k: v for k, v in vars(args).items() if v is not None}
    return RunConfig(**overrides)


# ==================== 辅助 ====================

def _spec(config: RunConfig) -> ClassSpec:
    return ClassSpec(GraphKind.parse(config.kind), config.n, ClassPredicate.parse(config.predicate))


def _graphs(config: RunConfig) -> List[Graph]:
    return [decode_graph(token) for token in config.graphs]


def _sequences(config: RunConfig) -> List[GraphSequence]:
    if config.family_path:
        with open(config.family_path, "r", encoding="utf-8") as f:
            return list(load_family(f).sequences)
    return [GraphSequence.parse(config.sequence)]


def _family(config: RunConfig, reps: List[Graph]) -> FamilySpec:
    """--family / --sequence，缺省为图类全部成员的 deck 序列"""
    if config.family_path or config.sequence:
        return FamilySpec.from_sequences(_sequences(config), FamilySource.FILE)
    return FamilySpec.from_sequences([deck_sequence(g) for g in reps], FamilySource.DECK_SEQUENCES)


def _default_n(config: RunConfig, kind: GraphKind) -> int:
    if config.n is not None:
        return config.n
    return 4 if kind is GraphKind.UNDIRECTED else 3


def _render(config: RunConfig, data: Dict) -> str:
    if config.output_format == "text":
        return ReportGenerator.mapping_to_text(data)
    return ReportGenerator.to_json(data)


def _verdict_outcome(config: RunConfig, verdict: Verdict) -> Outcome:
    status = 0 if verdict.passed and not verdict.vacuous else 1
    if config.output_format == "text":
        return ReportGenerator.verdicts_to_text([verdict]), status
    return ReportGenerator.to_json(verdict.to_dict()), status


# ==================== 命令 ====================

def cmd_enum(config: RunConfig) -> Outcome:
    reps = enumerate_classes(_spec(config), config.slow, config.jobs)
    return "\n".join(encode_graph(g) for g in reps), 0


def cmd_decks(config: RunConfig) -> Outcome:
    graphs = _graphs(config) or enumerate_classes(_spec(config), config.slow, config.jobs)
    lines = []
    for g in graphs:
        cards = [encode_graph(graph_from_key(key)) for key in deck(g).cards]
        lines.append("\t".join([encode_graph(g)] + cards))
    return "\n".join(lines), 0


def cmd_census(config: RunConfig) -> Outcome:
    return _render(config, census(_spec(config), config.slow, config.jobs).to_dict()), 0


def cmd_count(config: RunConfig) -> Outcome:
    graphs = _graphs(config)
    if config.action == "s":
        h, g = graphs
        data = {"H": encode_graph(h), "G": encode_graph(g), "s": subgraph_count(h, g)}
        return _render(config, data), 0

    g = graphs[0]
    counts = []
    reps = None
    if config.action == "kocay-sum":
        spec = ClassSpec(g.kind, g.n, ClassPredicate.parse(config.predicate))
        reps = enumerate_classes(spec, config.slow, config.jobs)
    for seq in _sequences(config):
        if config.action == "c":
            value = cover_count(seq, g)
        elif config.action == "cstar":
            value = nonoverlapping_cover_count(seq, g)
        else:
            value = kocay_sum(seq, g, reps)
        counts.append({"sequence": seq.label, "value": value})
    data = {"action": config.action, "G": encode_graph(g), "counts": counts}
    return _render(config, data), 0


def cmd_matrix(config: RunConfig) -> Outcome:
    reps = enumerate_classes(_spec(config), config.slow, config.jobs)
    m = build_matrix(_family(config, reps), reps, config.jobs)
    if config.output_format == "csv":
        return ReportGenerator.matrix_to_csv(m), 0
    if config.output_format == "text":
        return ReportGenerator.matrix_to_text(m, title=f"M {_spec(config).label}"), 0
    return ReportGenerator.to_json(m.to_dict()), 0


def cmd_rank(config: RunConfig) -> Outcome:
    reps = enumerate_classes(_spec(config), config.slow, config.jobs)
    m = build_matrix(_family(config, reps), reps, config.jobs)
    return _render(config, {"rows": m.rows, "cols": m.cols, "rank": rank(m)}), 0


def cmd_certify(config: RunConfig) -> Outcome:
    budget = SearchBudget(config.search_max_length, config.search_max_candidates)
    report = certify(_spec(config), config.seed, config.trials, budget, config.slow,
                     config.jobs, config.theorem_family_cap, config.timings)
    status = 0 if report.passed else 1
    if config.output_format == "csv":
        text = ReportGenerator.matrix_to_csv(report.matrix) + "\n" + ReportGenerator.matrix_to_csv(report.k_matrix)
        return text, status
    if config.output_format == "text":
        parts = [
            ReportGenerator.mapping_to_text({"spec": report.spec, "seed": report.seed, **report.census}),
            ReportGenerator.matrix_to_text(report.matrix, title="M"),
            ReportGenerator.matrix_to_text(report.k_matrix, title="K"),
            ReportGenerator.verdicts_to_text(report.verdicts),
        ]
        return "\n".join(parts), status
    return ReportGenerator.to_json(report.to_dict()), status


def _single_identity(name: str, config: RunConfig, sides: Callable) -> Verdict:
    seq = GraphSequence.parse(config.sequence)
    g = _graphs(config)[0]
    lhs, rhs = sides(seq, g)
    verdict = Verdict(name)
    verdict.record(str(lhs) == str(rhs), sequence=seq.label, host=encode_graph(g),
                   lhs=str(lhs), rhs=str(rhs))
    verdict.details = {"lhs": str(lhs), "rhs": str(rhs)}
    return verdict


def cmd_verify(config: RunConfig) -> Outcome:
    kind = GraphKind.parse(config.kind)
    single = bool(config.sequence and config.graphs)
    if config.action == "eq1":
        if single:
            verdict = _single_identity("eq1", config, eq1_sides)
        else:
            verdict = verify_eq1_grid(kind, _default_n(config, kind), config.exhaustive,
                                      config.trials, config.seed, config.jobs)
    elif config.action == "recurrence":
        if single:
            verdict = _single_identity("recurrence", config, recurrence_sides)
        else:
            verdict = verify_recurrence_grid(kind, _default_n(config, kind), config.exhaustive,
                                             config.trials, config.seed, config.jobs)
    elif config.action == "kelly":
        verdict = verify_kelly(_spec(config), config.slow, config.jobs)
    else:
        spec = _spec(config)
        reps = enumerate_classes(spec, config.slow, config.jobs)
        partition = partition_by_deck(reps, config.jobs)
        if config.action == "theorem1":
            verdict = verify_theorem1(reps, partition, config.trials, config.seed, config.jobs,
                                      config.search_max_length)
        else:
            verdict = verify_theorem2(partition, None, spec, config.theorem_family_cap, config.jobs)
    return _verdict_outcome(config, verdict)


def cmd_legit_deck(config: RunConfig) -> Outcome:
    cards = _graphs(config)
    n = config.n if config.n is not None else len(cards)
    spec = ClassSpec(cards[0].kind, n, ClassPredicate.parse(config.predicate))
    found = is_legitimate_deck(cards, spec, config.slow)
    data = {"legitimate": found is not None, "graph": encode_graph(found) if found else None}
    return _render(config, data), 0


HANDLERS: Dict[str, Callable[[RunConfig], Outcome]] = {
    "enum": cmd_enum,
    "decks": cmd_decks,
    "census": cmd_census,
    "count": cmd_count,
    "matrix": cmd_matrix,
    "rank": cmd_rank,
    "certify": cmd_certify,
    "verify": cmd_verify,
    "legit-deck": cmd_legit_deck,
}


def run(config: RunConfig) -> int:
    """执行一条命令并输出报告，返回退出码"""
    logger.verbose = config.verbose
    configure_table(config.table_mb)
    problems = config.validate()
    if problems:
        raise ConfigError("; ".join(problems), flags=problems)

    logger.stage_start(config.command, action=config.action)
    start = time.perf_counter()
    text, status = HANDLERS[config.command](config)
    elapsed = time.perf_counter() - start
    logger.stage_complete(config.command, status=status, seconds=round(elapsed, 3))

    if config.timings:
        logger.info("耗时", seconds=round(elapsed, 3))
    ReportGenerator.write(text, config.output)
    if config.output:
        logger.info(f"报告已保存到: {config.output}")
    return status


def _failure(error_type: str, message: str, details: Dict) -> None:
    print(ReportGenerator.to_json({"error": error_type, "message": message, "details": details}))


def main(argv: Optional[List[str]] = None) -> int:
    """主函数"""
    try:
        config = build_config(parse_arguments(argv))
        return run(config)
    except KeyboardInterrupt:
        logger.info("用户中断操作")
        return 130
    except WorkbenchError as e:
        logger.error(e.message, **{k: str(v) for k, v in e.details.items()})
        print(ReportGenerator.to_json(e.to_dict()))
        return e.exit_code
    except OSError as e:
        logger.error(f"I/O 错误: {e}")
        _failure("OSError", str(e), {"path": str(e.filename)})
        return 3
    except Exception as e:
        logger.error(f"程序执行失败: {e}")
        _failure(type(e).__name__, str(e), {})
        return 1


if __name__ == "__main__":
    sys.exit(main())
