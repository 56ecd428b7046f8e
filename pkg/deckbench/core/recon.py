"""
Deck 与重构类

- deck / partition_by_deck / census：按 deck 划分同构类，统计 ψ、d、α
- kelly_check：Kelly 引理的逐例校验
- class_leq / order_classes：卡片嵌入偏序及其线性扩张（构造 K 用）
- is_legitimate_deck：暴力判断一组卡片是否为某个图的 deck
"""

import heapq
from dataclasses import dataclass
from typing import Dict, List, Optional, Sequence, Tuple

from .covers import contains_subgraph, subgraph_count
from .enumerate import ClassSpec, enumerate_classes
from .errors import KindMismatchError, OrderViolationError, PreconditionError
from .executor import parallel_map
from .graph import CanonicalKey, Graph, canonical_key, graph_from_key, vertex_deleted
from .logger import logger


@dataclass(frozen=True, order=True)
class Deck:
    """n 张卡片的规范键，按 CanonicalKey 排序（可重复）"""
    cards: Tuple[CanonicalKey, ...]

    @classmethod
    def from_cards(cls, cards: Sequence[Graph]) -> "Deck":
        return cls(tuple(sorted(canonical_key(card) for card in cards)))

    @property
    def n(self) -> int:
        return len(self.cards)

    def card_graphs(self) -> List[Graph]:
        return [graph_from_key(key) for key in self.cards]

    def to_list(self) -> List[str]:
        return [str(key) for key in self.cards]


@dataclass(frozen=True)
class ReconClass:
    members: Tuple[CanonicalKey, ...]
    deck: Deck

    @property
    def size(self) -> int:
        return len(self.members)

    @property
    def representative(self) -> Graph:
        """默认代表元：最小规范键的成员"""
        return graph_from_key(self.members[0])


@dataclass(frozen=True)
class ReconPartition:
    """重构类划分；类按最小成员键排序，类内成员排序"""
    classes: Tuple[ReconClass, ...]

    def __len__(self) -> int:
        return len(self.classes)

    @property
    def sizes(self) -> List[int]:
        return [c.size for c in self.classes]

    @property
    def deck_of_class(self) -> List[Deck]:
        return [c.deck for c in self.classes]

    def representatives(self) -> List[Graph]:
        return [c.representative for c in self.classes]

    def non_singleton(self) -> List[ReconClass]:
        return [c for c in self.classes if c.size > 1]

    def class_index(self, key: CanonicalKey) -> int:
        for index, c in enumerate(self.classes):
            if key in c.members:
                return index
        raise KeyError(str(key))

    def to_dict(self) -> Dict:
        return {
            "classes": [[str(key) for key in c.members] for c in self.classes],
            "sizes": self.sizes,
        }


@dataclass(frozen=True)
class Census:
    psi: int
    d: int
    alpha: int
    applicable: bool = True

    def to_dict(self) -> Dict:
        result = {"psi": self.psi, "d": self.d, "alpha": self.alpha}
        if not self.applicable:
            result["note"] = "conjecture not applicable (n < 3)"
        return result


def deck(g: Graph) -> Deck:
    """G 的 deck：全部 G-v 的规范键"""
    return Deck.from_cards([vertex_deleted(g, v) for v in range(g.n)])


def _check_reps(reps: Sequence[Graph]) -> None:
    if not reps:
        return
    first = reps[0]
    for g in reps[1:]:
        if g.kind is not first.kind:
            raise KindMismatchError("代表元的图类型不一致")
        if g.n != first.n:
            raise PreconditionError("代表元的顶点数不一致", expected=first.n, got=g.n)
    keys = [canonical_key(g) for g in reps]
    if len(set(keys)) != len(keys):
        raise PreconditionError("代表元之间存在同构")


def partition_by_deck(reps: Sequence[Graph], jobs: int = 1) -> ReconPartition:
    """按 deck 相等分组"""
    _check_reps(reps)
    decks = parallel_map(deck, reps, jobs)
    groups: Dict[Deck, List[CanonicalKey]] = {}
    for g, d in zip(reps, decks):
        groups.setdefault(d, []).append(canonical_key(g))
    classes = [ReconClass(tuple(sorted(members)), d) for d, members in groups.items()]
    classes.sort(key=lambda c: c.members[0])
    return ReconPartition(tuple(classes))


def census(spec: ClassSpec, slow: bool = False, jobs: int = 1) -> Census:
    reps = enumerate_classes(spec, slow, jobs)
    partition = partition_by_deck(reps, jobs)
    logger.debug("census", spec=spec.label, psi=len(reps), d=len(partition))
    return Census(
        psi=len(reps),
        d=len(partition),
        alpha=len(reps) - len(partition),
        applicable=spec.n >= 3,
    )


def kelly_check(f: Graph, g: Graph, h: Graph) -> bool:
    """deck(g) = deck(h) 且 v(f) < v(g) 时 s(f,g) = s(f,h)"""
    if deck(g) != deck(h):
        raise PreconditionError("kelly_check 要求 g、h 的 deck 相同")
    if f.n >= g.n:
        raise PreconditionError("kelly_check 要求 v(f) < v(g)", f_n=f.n, g_n=g.n)
    return subgraph_count(f, g) == subgraph_count(f, h)


def edge_count_from_deck(d: Deck) -> Optional[int]:
    """Σ e(G-v) = (n-2) e(G)；不能整除时返回 None"""
    if d.n < 3:
        raise PreconditionError("边数只能从 n >= 3 的 deck 还原", n=d.n)
    total = sum(card.edge_count for card in d.card_graphs())
    if total % (d.n - 2):
        return None
    return total // (d.n - 2)


# ==================== 卡片嵌入偏序 ====================

def _has_perfect_matching(compatible: List[List[bool]]) -> bool:
    """增广路（Kuhn）求二分图最大匹配，判断是否完美"""
    size = len(compatible)
    match: List[Optional[int]] = [None] * size

    def search(x: int, seen: List[bool]) -> bool:
        for y in range(size):
            if compatible[x][y] and not seen[y]:
                seen[y] = True
                if match[y] is None or search(match[y], seen):
                    match[y] = x
                    return True
        return False

    return all(search(x, [False] * size) for x in range(size))


def class_leq(gi: Graph, gj: Graph) -> bool:
    """是否存在双射 f 使每张卡 G_i - v 同构于 G_j - f(v) 的子图"""
    if gi.kind is not gj.kind:
        raise KindMismatchError("图类型不一致", left=gi.kind.value, right=gj.kind.value)
    if gi.n != gj.n:
        raise PreconditionError("class_leq 要求顶点数相同", left=gi.n, right=gj.n)
    left = deck(gi).card_graphs()
    right = deck(gj).card_graphs()
    compatible = [[contains_subgraph(c, d) for d in right] for c in left]
    return _has_perfect_matching(compatible)


def order_classes(partition: ReconPartition,
                  reps_choice: Optional[Sequence[Graph]] = None) -> List[int]:
    """
    重构类的线性扩张：class_leq 意义下较小的类在前，不可比时按代表元规范键

    Returns:
        类下标的排列

    Raises:
        OrderViolationError: 两个不同的类互相 <=（偏序出现环）
    """
    reps = list(reps_choice) if reps_choice is not None else partition.representatives()
    if len(reps) != len(partition):
        raise PreconditionError("每个重构类需要恰好一个代表元",
                                classes=len(partition), reps=len(reps))
    keys = [canonical_key(g) for g in reps]
    count = len(reps)
    successors: List[List[int]] = [[] for _ in range(count)]
    indegree = [0] * count
    for i in range(count):
        for j in range(count):
            if i != j and class_leq(reps[i], reps[j]):
                successors[i].append(j)
                indegree[j] += 1

    ready = [(keys[i], i) for i in range(count) if indegree[i] == 0]
    heapq.heapify(ready)
    order: List[int] = []
    while ready:
        _, i = heapq.heappop(ready)
        order.append(i)
        for j in successors[i]:
            indegree[j] -= 1
            if indegree[j] == 0:
                heapq.heappush(ready, (keys[j], j))
    if len(order) != count:
        stuck = sorted(str(keys[i]) for i in range(count) if i not in order)
        raise OrderViolationError("卡片嵌入偏序出现环", classes=stuck)
    return order


# ==================== 合法 deck ====================

def is_legitimate_deck(cards: Sequence[Graph], spec: ClassSpec,
                       slow: bool = False) -> Optional[Graph]:
    """
    在 spec 给出的图类中暴力查找 deck 恰为 cards 的图

    Returns:
        最小规范键的那个图；不存在时为 None
    """
    if len(cards) != spec.n:
        raise PreconditionError("卡片数必须等于 n", cards=len(cards), n=spec.n)
    for card in cards:
        if card.kind is not spec.kind:
            raise KindMismatchError("卡片类型与图类不一致")
        if card.n != spec.n - 1:
            raise PreconditionError("每张卡片必须有 n-1 个顶点", card_n=card.n, n=spec.n)

    target = Deck.from_cards(cards)
    edges: Optional[int] = None
    if spec.n >= 3:
        edges = edge_count_from_deck(target)
        if edges is None:
            logger.debug("卡片边数之和不能被 n-2 整除", n=spec.n)
            return None
    for g in enumerate_classes(spec, slow):
        if edges is not None and g.edge_count != edges:
            continue
        if deck(g) == target:
            return g
    return None
