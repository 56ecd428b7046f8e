"""
同构类穷举

每个同构类给出一个规范代表元，按 CanonicalKey 排序。两种生成方式结果相同：

- 带标号流式枚举：按边数分块遍历全部带标号邻接矩阵，逐个求规范键去重，
  用于边位置数 <= LABELED_SLOT_LIMIT 的小规模；
- 单点扩展：对 n-1 顶点的每个代表元加入一个新顶点，枚举它的所有邻域，按规范键去重。
"""

from dataclasses import dataclass
from enum import Enum
from itertools import combinations
from math import factorial
from typing import Dict, List, Set, Tuple

from .errors import BudgetExceededError, ConfigError
from .executor import chunked, parallel_map
from .graph import (CanonicalKey, Graph, GraphKind, automorphism_count, canonical_key,
                    edge_slots, graph_from_key)
from .logger import logger

LABELED_SLOT_LIMIT = 12
BRUTE_FORCE_SLOT_LIMIT = 16

# kind -> (不需要 --slow 的最大 n, 允许的最大 n)
EXHAUSTIVE_LIMITS = {
    GraphKind.UNDIRECTED: (6, 7),
    GraphKind.DIRECTED: (5, 5),
}


class ClassPredicate(Enum):
    ALL = "all"
    CONNECTED = "connected"
    ORIENTED = "oriented"

    @classmethod
    def parse(cls, text: str) -> "ClassPredicate":
        for predicate in cls:
            if predicate.value == text.lower():
                return predicate
        raise ConfigError(f"未知的 --predicate: {text}", predicate=text)


@dataclass(frozen=True)
class ClassSpec:
    """图类：类型 + 顶点数 + 同构不变的谓词"""
    kind: GraphKind
    n: int
    predicate: ClassPredicate = ClassPredicate.ALL

    def __post_init__(self):
        if self.n < 0:
            raise ConfigError("--n 不能为负", n=self.n)
        if self.predicate is ClassPredicate.ORIENTED and self.kind is not GraphKind.DIRECTED:
            raise ConfigError("--predicate oriented 只适用于有向图", kind=self.kind.value)

    def with_n(self, n: int) -> "ClassSpec":
        return ClassSpec(self.kind, n, self.predicate)

    @property
    def label(self) -> str:
        return f"{self.kind.value}/{self.n}/{self.predicate.value}"


def satisfies(g: Graph, predicate: ClassPredicate) -> bool:
    if predicate is ClassPredicate.CONNECTED:
        return g.is_connected
    if predicate is ClassPredicate.ORIENTED:
        return g.directed and g.is_oriented
    return True


def check_budget(spec: ClassSpec, slow: bool = False) -> None:
    fast, limit = EXHAUSTIVE_LIMITS[spec.kind]
    if spec.n > limit:
        raise BudgetExceededError(
            f"{spec.kind.value} 的穷举上限为 n={limit}", n=spec.n, limit=limit)
    if spec.n > fast and not slow:
        raise BudgetExceededError(
            f"n={spec.n} 的穷举需要 --slow", n=spec.n, fast_limit=fast)


def graph_from_mask(kind: GraphKind, n: int, mask: int) -> Graph:
    """edge_slots 枚举下的边集 bitmask 转成图"""
    slots = edge_slots(kind, n)
    return Graph.from_edges(kind, n, [slots[i] for i in range(len(slots)) if (mask >> i) & 1])


# ==================== 带标号流式枚举 ====================

def _labeled_worker(task: Tuple[ClassSpec, Tuple[int, ...]]) -> List[CanonicalKey]:
    """处理一块带标号 bitmask，按规范键去重"""
    spec, masks = task
    found: Set[CanonicalKey] = set()
    for mask in masks:
        g = graph_from_mask(spec.kind, spec.n, mask)
        if satisfies(g, spec.predicate):
            found.add(canonical_key(g))
    return sorted(found)


def _labeled_tasks(spec: ClassSpec) -> List[Tuple[ClassSpec, Tuple[int, ...]]]:
    slots = len(edge_slots(spec.kind, spec.n))
    tasks = []
    # 按边数切块，每块内部再按固定大小切分
    for e in range(slots + 1):
        masks = [sum(1 << i for i in chosen) for chosen in combinations(range(slots), e)]
        for chunk in chunked(masks, 512):
            tasks.append((spec, tuple(chunk)))
    return tasks


# ==================== 单点扩展 ====================

def _neighbourhoods(kind: GraphKind, k: int) -> List[Tuple[int, int]]:
    """新顶点 k 的 (出邻域, 入邻域) 所有取法；无向图两者相同"""
    full = 1 << k
    if kind is GraphKind.UNDIRECTED:
        return [(mask, mask) for mask in range(full)]
    return [(out_mask, in_mask) for out_mask in range(full) for in_mask in range(full)]


def _extend(g: Graph, out_mask: int, in_mask: int) -> Graph:
    k = g.n
    rows = [row | (((in_mask >> u) & 1) << k) for u, row in enumerate(g.rows)]
    rows.append(out_mask)
    return Graph(g.kind, k + 1, tuple(rows))


def _extension_worker(task: Tuple[ClassSpec, Tuple[CanonicalKey, ...]]) -> List[CanonicalKey]:
    spec, parent_keys = task
    found: Set[CanonicalKey] = set()
    choices = _neighbourhoods(spec.kind, spec.n - 1)
    for parent_key in parent_keys:
        parent = graph_from_key(parent_key)
        for out_mask, in_mask in choices:
            child = _extend(parent, out_mask, in_mask)
            if satisfies(child, spec.predicate):
                found.add(canonical_key(child))
    return sorted(found)


# ==================== 对外接口 ====================

# 写一次的缓存：ClassSpec -> 排好序的规范键
_CLASS_CACHE: Dict[ClassSpec, Tuple[CanonicalKey, ...]] = {}


def _class_keys(spec: ClassSpec, jobs: int) -> Tuple[CanonicalKey, ...]:
    if spec in _CLASS_CACHE:
        return _CLASS_CACHE[spec]

    if len(edge_slots(spec.kind, spec.n)) <= LABELED_SLOT_LIMIT:
        logger.debug("带标号流式枚举", spec=spec.label)
        chunks = parallel_map(_labeled_worker, _labeled_tasks(spec), jobs, desc=f"enum {spec.label}")
        keys = {key for chunk in chunks for key in chunk}
    else:
        logger.debug("单点扩展枚举", spec=spec.label)
        # 子类谓词不一定对 n-1 顶点成立（如连通性），扩展总是从全体 n-1 顶点图出发
        parents = _class_keys(ClassSpec(spec.kind, spec.n - 1), jobs)
        tasks = [(spec, tuple(chunk)) for chunk in chunked(parents, 8)]
        chunks = parallel_map(_extension_worker, tasks, jobs, desc=f"extend {spec.label}")
        keys = {key for chunk in chunks for key in chunk}

    result = tuple(sorted(keys))
    _CLASS_CACHE.setdefault(spec, result)
    return _CLASS_CACHE[spec]


def enumerate_classes(spec: ClassSpec, slow: bool = False, jobs: int = 1) -> List[Graph]:
    """
    每个同构类一个规范代表元

    Args:
        spec: 图类
        slow: 是否允许较慢的规模（无向 n=7）
        jobs: 进程数；结果与之无关

    Returns:
        按 CanonicalKey 升序的代表元列表
    """
    check_budget(spec, slow)
    return [graph_from_key(key) for key in _class_keys(spec, jobs)]


def psi(spec: ClassSpec, slow: bool = False, jobs: int = 1) -> int:
    """ψ：图类中两两不同构的图的个数"""
    return len(enumerate_classes(spec, slow, jobs))


def classes_up_to(kind: GraphKind, n: int, slow: bool = False) -> List[Graph]:
    """顶点数 0..n 的全部同构类（按 CanonicalKey 排序，即先按 n）"""
    reps: List[Graph] = []
    for m in range(n + 1):
        reps.extend(enumerate_classes(ClassSpec(kind, m), slow=slow))
    return reps


def labeled_count(spec: ClassSpec, slow: bool = False) -> int:
    """轨道计数：Σ n!/|Aut(G)|，与穷举相互独立"""
    total = factorial(spec.n)
    return sum(total // automorphism_count(g) for g in enumerate_classes(spec, slow))


def brute_force_labeled_count(spec: ClassSpec) -> int:
    """直接数满足谓词的带标号图（只用于小规模交叉校验）"""
    slots = len(edge_slots(spec.kind, spec.n))
    if slots > BRUTE_FORCE_SLOT_LIMIT:
        raise BudgetExceededError("带标号图过多，无法直接计数", n=spec.n, slots=slots)
    return sum(
        1 for mask in range(1 << slots)
        if satisfies(graph_from_mask(spec.kind, spec.n, mask), spec.predicate)
    )
