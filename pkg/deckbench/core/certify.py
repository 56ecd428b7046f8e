"""
覆盖数矩阵与定理级校验

- build_matrix / build_star_matrix：行 = 图序列，列 = 图类中的同构类（按规范键），
  元素为 c(F,H) / c*(F,H)
- build_K：deck 序列 × 重构类代表元的 c* 方阵，按卡片嵌入偏序的线性扩张排列
- search_full_rank：贪心挑选能提高秩的序列，秩达到同构类数即为可重构性证书
- verify_theorem1 / verify_theorem2 / verify_kelly：端到端校验，返回 Verdict
"""

import random
import time
from dataclasses import dataclass, field
from enum import Enum
from itertools import combinations, combinations_with_replacement
from math import comb
from typing import Any, Dict, Iterable, List, Optional, Sequence, Tuple

from .covers import (GraphSequence, cover_count, eq1_sides, kernel_witness, kocay_sum,
                     nonoverlapping_cover_count, recurrence_sides)
from .enumerate import ClassSpec, classes_up_to, enumerate_classes, graph_from_mask
from .errors import KindMismatchError, PreconditionError, Verdict
from .executor import chunked, parallel_map
from .graph import (Graph, GraphKind, canonical_form, canonical_key, complete_graph,
                    edge_slots, graph_from_key, path_graph)
from .graph6 import encode_graph
from .linalg import ExactMatrix, is_upper_triangular, rank, stack
from .logger import logger
from .recon import (Census, ReconPartition, deck, is_legitimate_deck, kelly_check,
                    order_classes, partition_by_deck)


class FamilySource(Enum):
    FILE = "file"
    DECK_SEQUENCES = "deck-sequences"
    SEARCH = "search"
    THEOREM = "theorem"
    RANDOM = "random"


@dataclass(frozen=True)
class FamilySpec:
    """两两不等价的序列族"""
    sequences: Tuple[GraphSequence, ...]
    source: FamilySource

    @classmethod
    def from_sequences(cls, sequences: Iterable[GraphSequence], source: FamilySource) -> "FamilySpec":
        """按 normalized_key 去重，保留首次出现的顺序"""
        seen = set()
        kept = []
        for seq in sequences:
            key = seq.normalized_key
            if key not in seen:
                seen.add(key)
                kept.append(seq)
        return cls(tuple(kept), source)

    def __len__(self) -> int:
        return len(self.sequences)

    def labels(self) -> List[str]:
        return [seq.label for seq in self.sequences]


@dataclass(frozen=True)
class SearchBudget:
    max_length: int = 3
    max_candidates: int = 2000
    shuffle: bool = False


@dataclass
class SearchResult:
    family: FamilySpec
    rank: int
    target: int
    trace: List[int] = field(default_factory=list)
    candidates_tried: int = 0

    @property
    def certified(self) -> bool:
        return self.rank == self.target

    def to_dict(self) -> Dict[str, Any]:
        return {
            "rank": self.rank,
            "target": self.target,
            "certified": self.certified,
            "candidates_tried": self.candidates_tried,
            "trace": self.trace,
            "family": self.family.labels(),
        }


@dataclass
class CertifyReport:
    spec: str
    seed: int
    census: Dict[str, Any]
    matrix: ExactMatrix
    k_matrix: ExactMatrix
    search: SearchResult
    verdicts: List[Verdict]
    timings: Optional[Dict[str, float]] = None

    @property
    def passed(self) -> bool:
        return all(v.passed and not v.vacuous for v in self.verdicts)

    def to_dict(self) -> Dict[str, Any]:
        result = {
            "spec": self.spec,
            "seed": self.seed,
            "census": self.census,
            "matrix": {"rows": self.matrix.rows, "cols": self.matrix.cols},
            "rank": self.search.rank,
            "certified": self.search.certified,
            "search": self.search.to_dict(),
            "K": {"rows": self.k_matrix.rows, "cols": self.k_matrix.cols},
            "verdicts": [v.to_dict() for v in self.verdicts],
            "passed": self.passed,
        }
        if self.timings is not None:
            result["timings"] = self.timings
        return result


# ==================== 族 ====================

def load_family(lines: Iterable[str]) -> FamilySpec:
    """每行一个序列：逗号分隔的 graph6/digraph6；跳过空行和 '#' 注释"""
    sequences = []
    for line in lines:
        line = line.strip()
        if line and not line.startswith("#"):
            sequences.append(GraphSequence.parse(line))
    return FamilySpec.from_sequences(sequences, FamilySource.FILE)


def _sorted_columns(class_reps: Sequence[Graph]) -> List[Graph]:
    return sorted((canonical_form(h) for h in class_reps), key=canonical_key)


def _column_labels(columns: Sequence[Graph]) -> Tuple[str, ...]:
    return tuple(encode_graph(h) for h in columns)


def _check_family(family: FamilySpec, columns: Sequence[Graph]) -> None:
    if not columns:
        return
    n = columns[0].n
    kind = columns[0].kind
    for seq in family.sequences:
        if seq.kind is not None and seq.kind is not kind:
            raise KindMismatchError("序列与图类类型不一致", sequence=seq.label)
        if any(f.n >= n for f in seq):
            raise PreconditionError("矩阵行的每一项都必须少于 n 个顶点", sequence=seq.label, n=n)


def _matrix_row(task: Tuple[GraphSequence, Tuple[Graph, ...], bool]) -> Tuple[int, ...]:
    seq, columns, distinct = task
    count = nonoverlapping_cover_count if distinct else cover_count
    return tuple(count(seq, h) for h in columns)


def _rows(sequences: Sequence[GraphSequence], columns: Sequence[Graph], distinct: bool,
          jobs: int) -> List[Tuple[int, ...]]:
    columns = tuple(columns)
    tasks = [(seq, columns, distinct) for seq in sequences]
    return parallel_map(_matrix_row, tasks, jobs, desc="matrix rows")


def _build(family: FamilySpec, class_reps: Sequence[Graph], distinct: bool, jobs: int) -> ExactMatrix:
    columns = _sorted_columns(class_reps)
    _check_family(family, columns)
    rows = _rows(family.sequences, columns, distinct, jobs)
    return ExactMatrix(tuple(rows), tuple(family.labels()), _column_labels(columns))


def build_matrix(family: FamilySpec, class_reps: Sequence[Graph], jobs: int = 1) -> ExactMatrix:
    """覆盖数矩阵 M：(i,j) = c(F_i, H_j)，列按规范键排序"""
    return _build(family, class_reps, distinct=False, jobs=jobs)


def build_star_matrix(family: FamilySpec, class_reps: Sequence[Graph], jobs: int = 1) -> ExactMatrix:
    """不重叠覆盖数矩阵 M*：(i,j) = c*(F_i, H_j)"""
    return _build(family, class_reps, distinct=True, jobs=jobs)


def deck_sequence(g: Graph) -> GraphSequence:
    """G 的 n 张卡片组成的序列，按规范键排序"""
    return GraphSequence.from_keys(deck(g).cards)


def build_K(partition: ReconPartition, reps_choice: Optional[Sequence[Graph]] = None,
            jobs: int = 1) -> ExactMatrix:
    """
    K[i][j] = c*(deck_sequence(G_i), G_j)

    行列都按 class_leq 的线性扩张排列，因此 K 为上三角；偏序有环时
    order_classes 抛出 OrderViolationError。
    """
    reps = list(reps_choice) if reps_choice is not None else partition.representatives()
    order = order_classes(partition, reps)
    columns = [canonical_form(reps[i]) for i in order]
    sequences = [deck_sequence(g) for g in columns]
    rows = _rows(sequences, columns, distinct=True, jobs=jobs)
    return ExactMatrix(tuple(rows), tuple(seq.label for seq in sequences), _column_labels(columns))


# ==================== 候选序列 ====================

def _subgraphs_of(g: Graph) -> set:
    """g 的全部非空子图（任意顶点子集上的任意边子集）的规范键"""
    keys = set()
    for size in range(1, g.n + 1):
        for chosen in combinations(range(g.n), size):
            vmask = sum(1 << v for v in chosen)
            sub = g.induced(vmask)
            edges = sub.edges()
            for emask in range(1 << len(edges)):
                picked = [edges[i] for i in range(len(edges)) if (emask >> i) & 1]
                keys.add(canonical_key(Graph.from_edges(g.kind, sub.n, picked)))
    return keys


def candidate_pool(class_reps: Sequence[Graph]) -> List[Graph]:
    """图类成员的全部 (n-1) 顶点以内子图，两两不同构，按规范键排序"""
    cards = sorted({key for g in class_reps for key in deck(g).cards})
    keys = set()
    for key in cards:
        keys |= _subgraphs_of(graph_from_key(key))
    return [graph_from_key(key) for key in sorted(keys)]


def random_family(pool: Sequence[Graph], size: int, rng: random.Random,
                  max_length: int = 3) -> FamilySpec:
    """从 pool 中有放回地抽取长度 2..max_length 的序列，去重后至多 size 条"""
    sequences = []
    if pool:
        for _ in range(size * 4):
            length = rng.randint(2, max(2, max_length))
            sequences.append(GraphSequence(tuple(rng.choice(pool) for _ in range(length))))
            if len(FamilySpec.from_sequences(sequences, FamilySource.RANDOM)) >= size:
                break
    family = FamilySpec.from_sequences(sequences, FamilySource.RANDOM)
    return FamilySpec(family.sequences[:size], FamilySource.RANDOM)


def theorem_family_size(kind: GraphKind, n: int, max_length: Optional[int] = None) -> int:
    """长度 2..max_length 的 (n-1) 顶点图多重集个数"""
    p = len(enumerate_classes(ClassSpec(kind, n - 1)))
    top = n if max_length is None else max_length
    return sum(comb(p + k - 1, k) for k in range(2, top + 1))


def theorem_family(kind: GraphKind, n: int, max_length: Optional[int] = None) -> FamilySpec:
    """全部长度 2..max_length（缺省为 n）的 (n-1) 顶点图序列，两两不等价"""
    if n < 1:
        raise PreconditionError("theorem_family 需要 n >= 1", n=n)
    cards = enumerate_classes(ClassSpec(kind, n - 1))
    top = n if max_length is None else max_length
    sequences = [
        GraphSequence(items)
        for k in range(2, top + 1)
        for items in combinations_with_replacement(cards, k)
    ]
    return FamilySpec.from_sequences(sequences, FamilySource.THEOREM)


# ==================== 满秩搜索 ====================

def _candidates(class_reps: Sequence[Graph], budget: SearchBudget, seed: int) -> List[GraphSequence]:
    pool = candidate_pool(class_reps)
    combos: List[GraphSequence] = []
    for k in range(2, budget.max_length + 1):
        for items in combinations_with_replacement(pool, k):
            combos.append(GraphSequence(items))
            if len(combos) >= budget.max_candidates:
                break
        if len(combos) >= budget.max_candidates:
            break
    if budget.shuffle:
        random.Random(seed).shuffle(combos)
    decks = [deck_sequence(g) for g in _sorted_columns(class_reps)]
    return combos + decks


def search_full_rank(class_reps: Sequence[Graph], budget: SearchBudget = SearchBudget(),
                     seed: int = 0, jobs: int = 1) -> SearchResult:
    """
    贪心地加入能提高秩的候选序列

    秩达到 |class_reps| 即停止（证书）；候选用尽时报告最好的秩。
    """
    columns = _sorted_columns(class_reps)
    target = len(columns)
    candidates = FamilySpec.from_sequences(_candidates(columns, budget, seed), FamilySource.SEARCH)
    col_labels = _column_labels(columns)

    accepted: List[GraphSequence] = []
    rows: List[Tuple[int, ...]] = []
    trace: List[int] = []
    current = 0
    tried = 0
    for batch in chunked(list(candidates.sequences), 64):
        if current == target:
            break
        batch_rows = _rows(batch, columns, distinct=False, jobs=jobs)
        for seq, row in zip(batch, batch_rows):
            if current == target:
                break
            tried += 1
            if not any(row):
                continue
            trial = ExactMatrix(tuple(rows + [row]), tuple(str(i) for i in range(len(rows) + 1)), col_labels)
            r = rank(trial)
            if r > current:
                accepted.append(seq)
                rows.append(row)
                current = r
                trace.append(r)
                logger.debug("接受候选序列", sequence=seq.label, rank=r)

    family = FamilySpec(tuple(accepted), FamilySource.SEARCH)
    logger.info("满秩搜索结束", rank=current, target=target, tried=tried)
    return SearchResult(family, current, target, trace, tried)


# ==================== 定理级校验 ====================

def _class_members(partition: ReconPartition) -> List[Graph]:
    return [graph_from_key(key) for c in partition.classes for key in c.members]


def verify_theorem1(class_reps: Sequence[Graph], partition: ReconPartition, trials: int,
                    seed: int, jobs: int = 1, max_length: int = 3) -> Verdict:
    """
    随机族上的三项检查：rank(M) <= 重构类数；每个重构类上 kocay_sum 恒定；
    M 乘任一核见证向量为 0
    """
    verdict = Verdict("theorem1")
    columns = _sorted_columns(class_reps)
    d = len(partition)
    rng = random.Random(seed)
    pool = candidate_pool(columns)
    witnesses = []
    for c in partition.non_singleton():
        first = graph_from_key(c.members[0])
        for key in c.members[1:]:
            witnesses.append((str(key), kernel_witness(graph_from_key(key), first, columns)))

    max_rank = 0
    for trial in range(trials):
        family = random_family(pool, rng.randint(1, d + 2), rng, max_length)
        m = build_matrix(family, columns, jobs)
        r = rank(m)
        max_rank = max(max_rank, r)
        verdict.record(r <= d, check="rank", trial=trial, rank=r, classes=d)

        for seq in family.sequences:
            for c in partition.non_singleton():
                values = {kocay_sum(seq, graph_from_key(key), columns) for key in c.members}
                verdict.record(len(values) == 1, check="kocay", trial=trial,
                               sequence=seq.label, values=sorted(values))

        for label, w in witnesses:
            product = [sum(a * b for a, b in zip(row, w)) for row in m.entries]
            verdict.record(not any(product), check="kernel", trial=trial, witness=label)

    verdict.details = {"trials": trials, "classes": d, "max_rank": max_rank,
                       "witnesses": len(witnesses), "seed": seed}
    logger.check("theorem1", verdict.passed, cases=verdict.cases, max_rank=max_rank)
    return verdict


def verify_theorem2(partition: ReconPartition, reps_choice: Optional[Sequence[Graph]] = None,
                    spec: Optional[ClassSpec] = None, cap: int = 400, jobs: int = 1,
                    k_matrix: Optional[ExactMatrix] = None) -> Verdict:
    """
    K 的上三角 / 正对角 / 满秩；规模允许时在完整定理族上检查
    rank([M; M*]) = rank(M) 以及 rank(K) <= rank(M*) <= rank(M) <= 重构类数

    k_matrix 为空时按 partition 和 reps_choice 构造
    """
    verdict = Verdict("theorem2")
    d = len(partition)
    if k_matrix is None:
        k_matrix = build_K(partition, reps_choice, jobs)
    k_rank = rank(k_matrix)
    verdict.record(is_upper_triangular(k_matrix), check="upper-triangular")
    verdict.record(all(x > 0 for x in k_matrix.diagonal()), check="positive-diagonal",
                   diagonal=k_matrix.diagonal())
    verdict.record(k_rank == d, check="K-rank", rank=k_rank, classes=d)
    details: Dict[str, Any] = {"classes": d, "K_rank": k_rank}

    members = _class_members(partition)
    if members:
        kind, n = members[0].kind, members[0].n
        size = theorem_family_size(kind, n) if n >= 1 else 0
        details["theorem_family_rows"] = size
        if n >= 2 and size <= cap:
            family = theorem_family(kind, n)
            m = build_matrix(family, members, jobs)
            m_star = build_star_matrix(family, members, jobs)
            m_rank = rank(m)
            star_rank = rank(m_star)
            span_rank = rank(stack(m, m_star))
            verdict.record(span_rank == m_rank, check="row-span", stacked=span_rank, rank=m_rank)
            verdict.record(k_rank <= star_rank <= m_rank <= d, check="rank-chain",
                           K=k_rank, M_star=star_rank, M=m_rank, classes=d)
            details.update({"M_rank": m_rank, "M_star_rank": star_rank, "row_span": "checked"})
            if n >= 3:
                details["legitimate_decks"] = _legitimacy(family, n, spec or ClassSpec(kind, n))
        else:
            details["row_span"] = "skipped"

    verdict.details = details
    logger.check("theorem2", verdict.passed, cases=verdict.cases, K_rank=k_rank)
    return verdict


def _legitimacy(family: FamilySpec, n: int, spec: ClassSpec) -> List[Dict[str, Any]]:
    """长度为 n 的定理族序列是否为合法 deck"""
    report = []
    for seq in family.sequences:
        if len(seq) != n:
            continue
        found = is_legitimate_deck(list(seq.items), spec, slow=True)
        report.append({"sequence": seq.label, "legitimate": found is not None})
    return report


def verify_kelly(spec: ClassSpec, slow: bool = False, jobs: int = 1) -> Verdict:
    """每个重构类内的每对成员，对每个 v(f) < n 的 f 检查 s(f,·) 相同"""
    verdict = Verdict("kelly")
    reps = enumerate_classes(spec, slow, jobs)
    partition = partition_by_deck(reps, jobs)
    small = classes_up_to(spec.kind, spec.n - 1) if spec.n >= 1 else []
    for c in partition.non_singleton():
        first = graph_from_key(c.members[0])
        for key in c.members[1:]:
            other = graph_from_key(key)
            for f in small:
                verdict.record(kelly_check(f, first, other), f=encode_graph(f),
                               g=encode_graph(first), h=encode_graph(other))
    verdict.details = {"spec": spec.label, "non_singleton_classes": len(partition.non_singleton())}
    logger.check("kelly", verdict.passed, cases=verdict.cases)
    return verdict


# ==================== 全流程 ====================

def certify(spec: ClassSpec, seed: int, trials: int = 100, budget: SearchBudget = SearchBudget(),
            slow: bool = False, jobs: int = 1, cap: int = 400, timings: bool = False) -> CertifyReport:
    """枚举 -> census -> 满秩搜索 -> 定理 1/2 校验"""
    elapsed: Dict[str, float] = {}

    def timed(stage: str, fn, *args, **kwargs):
        logger.stage_start(stage)
        start = time.perf_counter()
        result = fn(*args, **kwargs)
        elapsed[stage] = round(time.perf_counter() - start, 3)
        logger.stage_complete(stage, seconds=elapsed[stage])
        return result

    reps = timed("enumerate", enumerate_classes, spec, slow, jobs)
    partition = timed("partition", partition_by_deck, reps, jobs)
    summary = Census(len(reps), len(partition), len(reps) - len(partition), spec.n >= 3).to_dict()
    search = timed("search", search_full_rank, reps, budget, seed, jobs)
    matrix = build_matrix(search.family, reps, jobs)
    theorem1 = timed("theorem1", verify_theorem1, reps, partition, trials, seed, jobs,
                     budget.max_length)
    k_matrix = timed("K", build_K, partition, None, jobs)
    theorem2 = timed("theorem2", verify_theorem2, partition, None, spec, cap, jobs, k_matrix)

    return CertifyReport(
        spec=spec.label,
        seed=seed,
        census=summary,
        matrix=matrix,
        k_matrix=k_matrix,
        search=search,
        verdicts=[theorem1, theorem2],
        timings=elapsed if timings else None,
    )


# ==================== 恒等式网格 ====================

def eq1_pool(kind: GraphKind) -> List[Graph]:
    """Eq.1 网格的序列元素：无向 {K1, K2, P3, K3}；有向为全部 1~2 顶点有向图"""
    if kind is GraphKind.UNDIRECTED:
        return [complete_graph(1), complete_graph(2), path_graph(3), complete_graph(3)]
    return [g for g in classes_up_to(kind, 2) if g.n >= 1]


def eq1_grid(kind: GraphKind, n: int, max_length: Optional[int] = None) -> List[Tuple[GraphSequence, Graph]]:
    """全部 v(g) <= n 的宿主图 × 长度 1..max_length 的 pool 多重集"""
    top = max_length if max_length is not None else (3 if kind is GraphKind.UNDIRECTED else 2)
    pool = eq1_pool(kind)
    sequences = [GraphSequence(items) for k in range(1, top + 1)
                 for items in combinations_with_replacement(pool, k)]
    hosts = classes_up_to(kind, n)
    return [(seq, g) for g in hosts for seq in sequences]


def recurrence_grid(kind: GraphKind, n: int) -> List[Tuple[GraphSequence, Graph]]:
    """长度 2..min(3,n) 的 (n-1) 顶点图多重集 × 全部 n 顶点宿主图"""
    cards = enumerate_classes(ClassSpec(kind, n - 1))
    sequences = [GraphSequence(items) for k in range(2, min(3, n) + 1)
                 for items in combinations_with_replacement(cards, k)]
    return [(seq, g) for g in enumerate_classes(ClassSpec(kind, n)) for seq in sequences]


def random_recurrence_cases(kind: GraphKind, n: int, trials: int,
                            seed: int) -> List[Tuple[GraphSequence, Graph]]:
    """随机带标号实例：序列项为 n-1 顶点图，宿主为 n 顶点图"""
    rng = random.Random(seed)
    item_slots = len(edge_slots(kind, n - 1))
    host_slots = len(edge_slots(kind, n))
    cases = []
    for _ in range(trials):
        length = rng.randint(2, min(3, n))
        items = tuple(graph_from_mask(kind, n - 1, rng.getrandbits(item_slots) if item_slots else 0)
                      for _ in range(length))
        host = graph_from_mask(kind, n, rng.getrandbits(host_slots) if host_slots else 0)
        cases.append((GraphSequence(items), host))
    return cases


def _eq1_case(task: Tuple[GraphSequence, Graph]) -> Tuple[int, int]:
    return eq1_sides(*task)


def _recurrence_case(task: Tuple[GraphSequence, Graph]) -> Tuple[int, str]:
    lhs, rhs = recurrence_sides(*task)
    return lhs, str(rhs)


def _run_identity(name: str, cases: List[Tuple[GraphSequence, Graph]], worker, jobs: int) -> Verdict:
    verdict = Verdict(name)
    results = parallel_map(worker, cases, jobs, desc=name)
    for (seq, g), (lhs, rhs) in zip(cases, results):
        verdict.record(str(lhs) == str(rhs), sequence=seq.label, host=encode_graph(g),
                       lhs=str(lhs), rhs=str(rhs))
    logger.check(name, verdict.passed, cases=verdict.cases)
    return verdict


def verify_eq1_grid(kind: GraphKind, n: int, exhaustive: bool = True, trials: int = 100,
                    seed: int = 0, jobs: int = 1) -> Verdict:
    cases = eq1_grid(kind, n)
    if not exhaustive and trials < len(cases):
        cases = random.Random(seed).sample(cases, trials)
    verdict = _run_identity("eq1", cases, _eq1_case, jobs)
    verdict.details = {"kind": kind.value, "n": n, "exhaustive": exhaustive, "seed": seed}
    return verdict


def verify_recurrence_grid(kind: GraphKind, n: int, exhaustive: bool = True, trials: int = 50,
                           seed: int = 0, jobs: int = 1) -> Verdict:
    if n < 2:
        raise PreconditionError("递推式校验需要 n >= 2", n=n)
    if exhaustive:
        cases = recurrence_grid(kind, n)
    else:
        cases = random_recurrence_cases(kind, n, trials, seed)
    verdict = _run_identity("recurrence", cases, _recurrence_case, jobs)
    verdict.details = {"kind": kind.value, "n": n, "exhaustive": exhaustive, "seed": seed}
    return verdict
