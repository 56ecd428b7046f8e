"""
图的基础表示与同构工具

- Graph: 有限简单无向图 / 无自环简单有向图，邻接矩阵按行存成 bitmask
- CanonicalKey: 同构类的规范编码，也是所有下游排序的唯一依据
- 规范标号、自同构计数、删点子图

规范编码采用 "bordered" 位序：依次放入第 k 个顶点时追加它与前 k 个顶点之间的位
（无向：(i,k)；有向：(i->k, k->i)）。无向情形即 graph6 的按列上三角顺序。
规范键是所有 n! 种重标号下该位串的字典序最小值。
"""

from dataclasses import dataclass
from enum import Enum
from functools import lru_cache
from itertools import combinations, permutations
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

from .errors import BudgetExceededError, GraphFormatError, KindMismatchError

# graph6/digraph6 单字节长度头的上限
MAX_VERTICES = 62
# 自同构 / 规范标号等排列搜索支持的上限
MAX_SEARCH_VERTICES = 10


class GraphKind(Enum):
    UNDIRECTED = "graph"
    DIRECTED = "digraph"

    @property
    def code(self) -> int:
        return 0 if self is GraphKind.UNDIRECTED else 1

    @classmethod
    def parse(cls, text: str) -> "GraphKind":
        for kind in cls:
            if kind.value == text or kind.name.lower() == text.lower():
                return kind
        raise ValueError(f"未知图类型: {text}")


@dataclass(frozen=True)
class Graph:
    """
    带标号的有限图，顶点为 0..n-1

    rows[u] 的第 v 位为 1 表示边 u-v（无向）或弧 u->v（有向）。
    """
    kind: GraphKind
    n: int
    rows: Tuple[int, ...]

    def __post_init__(self):
        if not 0 <= self.n <= MAX_VERTICES:
            raise GraphFormatError(f"顶点数超出范围: {self.n}", n=self.n)
        if len(self.rows) != self.n:
            raise GraphFormatError("邻接矩阵行数与 n 不一致", n=self.n, rows=len(self.rows))
        full = (1 << self.n) - 1
        for u, row in enumerate(self.rows):
            if row & ~full:
                raise GraphFormatError("邻接行包含越界顶点", vertex=u)
            if (row >> u) & 1:
                raise GraphFormatError("不允许自环", vertex=u)
        if self.kind is GraphKind.UNDIRECTED:
            for u in range(self.n):
                for v in range(u + 1, self.n):
                    if ((self.rows[u] >> v) & 1) != ((self.rows[v] >> u) & 1):
                        raise GraphFormatError("无向图邻接矩阵必须对称", edge=(u, v))

    # ---------- 构造 ----------

    @classmethod
    def empty(cls, kind: GraphKind, n: int) -> "Graph":
        return cls(kind, n, (0,) * n)

    @classmethod
    def from_edges(cls, kind: GraphKind, n: int, edges: Iterable[Tuple[int, int]]) -> "Graph":
        rows = [0] * n
        for u, v in edges:
            if u == v:
                raise GraphFormatError("不允许自环", vertex=u)
            if not (0 <= u < n and 0 <= v < n):
                raise GraphFormatError("边端点越界", edge=(u, v))
            rows[u] |= 1 << v
            if kind is GraphKind.UNDIRECTED:
                rows[v] |= 1 << u
        return cls(kind, n, tuple(rows))

    # ---------- 基本量 ----------

    @property
    def directed(self) -> bool:
        return self.kind is GraphKind.DIRECTED

    def has_edge(self, u: int, v: int) -> bool:
        return bool((self.rows[u] >> v) & 1)

    @property
    def in_rows(self) -> Tuple[int, ...]:
        cols = [0] * self.n
        for u, row in enumerate(self.rows):
            for v in range(self.n):
                if (row >> v) & 1:
                    cols[v] |= 1 << u
        return tuple(cols)

    @property
    def edge_count(self) -> int:
        """e(G)：无向为边数，有向为弧数"""
        total = sum(row.bit_count() for row in self.rows)
        return total if self.directed else total // 2

    def edges(self) -> List[Tuple[int, int]]:
        return [(u, v) for (u, v) in edge_slots(self.kind, self.n) if self.has_edge(u, v)]

    def out_degree(self, v: int) -> int:
        return self.rows[v].bit_count()

    def in_degree(self, v: int) -> int:
        return sum((row >> v) & 1 for row in self.rows)

    def degree(self, v: int) -> int:
        """无向为度；有向为入度 + 出度"""
        if self.directed:
            return self.out_degree(v) + self.in_degree(v)
        return self.out_degree(v)

    def degree_signature(self) -> Tuple[Tuple[int, int], ...]:
        """排序后的 (出度, 入度) 序列，同构不变量"""
        return tuple(sorted((self.out_degree(v), self.in_degree(v)) for v in range(self.n)))

    @property
    def edge_mask(self) -> int:
        """在 edge_slots 枚举下的边集 bitmask"""
        mask = 0
        for index, (u, v) in enumerate(edge_slots(self.kind, self.n)):
            if self.has_edge(u, v):
                mask |= 1 << index
        return mask

    @property
    def is_connected(self) -> bool:
        """连通性（有向图按弱连通）；n=0 视为连通"""
        if self.n == 0:
            return True
        sym = [self.rows[v] | self.in_rows[v] for v in range(self.n)]
        seen = 1
        frontier = 1
        while frontier:
            reach = 0
            for v in range(self.n):
                if (frontier >> v) & 1:
                    reach |= sym[v]
            frontier = reach & ~seen
            seen |= frontier
        return seen == (1 << self.n) - 1

    @property
    def is_oriented(self) -> bool:
        """不含方向相反的一对弧（无向图恒为 False，除非无边）"""
        for u in range(self.n):
            for v in range(u + 1, self.n):
                if self.has_edge(u, v) and self.has_edge(v, u):
                    return False
        return True

    # ---------- 变换 ----------

    def relabeled(self, order: Sequence[int]) -> "Graph":
        """新顶点 p 对应原顶点 order[p]"""
        rows = []
        for p in range(self.n):
            old = self.rows[order[p]]
            row = 0
            for q in range(self.n):
                if (old >> order[q]) & 1:
                    row |= 1 << q
            rows.append(row)
        return Graph(self.kind, self.n, tuple(rows))

    def induced(self, vmask: int) -> "Graph":
        keep = [v for v in range(self.n) if (vmask >> v) & 1]
        rows = []
        for u in keep:
            row = 0
            for q, v in enumerate(keep):
                if (self.rows[u] >> v) & 1:
                    row |= 1 << q
            rows.append(row)
        return Graph(self.kind, len(keep), tuple(rows))

    def __str__(self):
        return f"{self.kind.value}(n={self.n}, e={self.edge_count})"


@lru_cache(maxsize=None)
def edge_slots(kind: GraphKind, n: int) -> Tuple[Tuple[int, int], ...]:
    """
    边位置的固定全局枚举（EmbeddedSubgraph.emask 依赖它，不可更改）

    无向：i<j 的字典序；有向：i!=j 的有序对字典序。
    """
    if kind is GraphKind.UNDIRECTED:
        return tuple(combinations(range(n), 2))
    return tuple((i, j) for i in range(n) for j in range(n) if i != j)


@lru_cache(maxsize=None)
def key_slots(kind: GraphKind, n: int) -> Tuple[Tuple[int, int], ...]:
    """
    规范编码的位序（bordered 顺序）：k = 1..n-1，i < k 时依次放 (i,k)，有向图再放 (k,i)

    不是按行的位序；无向图时与 graph6 的按列顺序一致，放置顶点时可按前缀精确剪枝。
    """
    slots = []
    for k in range(1, n):
        for i in range(k):
            slots.append((i, k))
            if kind is GraphKind.DIRECTED:
                slots.append((k, i))
    return tuple(slots)


def subgraph_from_masks(host: Graph, vmask: int, emask: int) -> Graph:
    """把 (vmask, emask) 子图取出来，顶点按原序重标号为 0..k-1"""
    keep = [v for v in range(host.n) if (vmask >> v) & 1]
    position = {v: p for p, v in enumerate(keep)}
    edges = []
    for index, (u, v) in enumerate(edge_slots(host.kind, host.n)):
        if (emask >> index) & 1:
            edges.append((position[u], position[v]))
    return Graph.from_edges(host.kind, len(keep), edges)


# ==================== 规范键 ====================

@dataclass(frozen=True, order=True)
class CanonicalKey:
    """同构类的规范编码；按 (kind, n, bits) 全序比较"""
    kind_code: int
    n: int
    bits: bytes

    @property
    def kind(self) -> GraphKind:
        return GraphKind.UNDIRECTED if self.kind_code == 0 else GraphKind.DIRECTED

    def __str__(self):
        return f"{self.kind.value}:{self.n}:{self.bits.hex()}"


def _pack_bits(bits: Sequence[int]) -> bytes:
    if not bits:
        return b""
    value = 0
    for b in bits:
        value = (value << 1) | b
    pad = (-len(bits)) % 8
    value <<= pad
    return value.to_bytes((len(bits) + pad) // 8, "big")


def _unpack_bits(data: bytes, length: int) -> List[int]:
    if length == 0:
        return []
    value = int.from_bytes(data, "big")
    total = len(data) * 8
    return [(value >> (total - 1 - i)) & 1 for i in range(length)]


def encode_bits(g: Graph, order: Sequence[int]) -> Tuple[int, ...]:
    """给定放置顺序 order 下的规范位串（测试里的暴力参照也用它）"""
    return tuple(
        (g.rows[order[i]] >> order[j]) & 1 for (i, j) in key_slots(g.kind, g.n)
    )


def _check_search_size(g: Graph) -> None:
    if g.n > MAX_SEARCH_VERTICES:
        raise BudgetExceededError(
            f"排列搜索只支持 n <= {MAX_SEARCH_VERTICES}", n=g.n)


@lru_cache(maxsize=1 << 16)
def canonical_labeling(g: Graph) -> Tuple[Tuple[int, ...], Tuple[int, ...]]:
    """
    求最小位串及其放置顺序

    逐个放置顶点；在当前前缀下只沿“新列最小”的顶点分支（新列更大的分支
    必然字典序更大），并与已知最优前缀比较剪枝。两个剩余顶点若互换是 g 的
    自同构（twins），它们的子树给出同样的位串，只展开一个。

    Returns:
        (bits, order)，order[p] 为放在位置 p 的原顶点
    """
    _check_search_size(g)
    n = g.n
    if n <= 1:
        return (), tuple(range(n))

    rows = g.rows
    ins = g.in_rows
    directed = g.directed
    best: List[Optional[Tuple[int, ...]]] = [None, None]

    def column(v: int, placed: List[int]) -> Tuple[int, ...]:
        if directed:
            bits = []
            for u in placed:
                bits.append((rows[u] >> v) & 1)
                bits.append((rows[v] >> u) & 1)
            return tuple(bits)
        return tuple((rows[u] >> v) & 1 for u in placed)

    def twins(u: int, w: int) -> bool:
        mask = ~((1 << u) | (1 << w))
        if (rows[u] & mask) != (rows[w] & mask):
            return False
        if directed:
            if (ins[u] & mask) != (ins[w] & mask):
                return False
            if ((rows[u] >> w) & 1) != ((rows[w] >> u) & 1):
                return False
        return True

    def search(placed: List[int], remaining: List[int], prefix: Tuple[int, ...]) -> None:
        if not remaining:
            if best[0] is None or prefix < best[0]:
                best[0], best[1] = prefix, tuple(placed)
            return
        cols = [(column(v, placed), v) for v in remaining]
        low = min(c for c, _ in cols)
        candidate = prefix + low
        if best[0] is not None and candidate > best[0][:len(candidate)]:
            return
        chosen: List[int] = []
        for c, v in cols:
            if c != low or any(twins(v, w) for w in chosen):
                continue
            chosen.append(v)
        for v in chosen:
            search(placed + [v], [w for w in remaining if w != v], candidate)

    search([], list(range(n)), ())
    return best[0], best[1]


def canonical_key(g: Graph) -> CanonicalKey:
    bits, _ = canonical_labeling(g)
    return CanonicalKey(g.kind.code, g.n, _pack_bits(bits))


def canonical_form(g: Graph) -> Graph:
    _, order = canonical_labeling(g)
    return g.relabeled(order)


@lru_cache(maxsize=None)
def graph_from_key(key: CanonicalKey) -> Graph:
    """规范键还原为规范代表元"""
    slots = key_slots(key.kind, key.n)
    bits = _unpack_bits(key.bits, len(slots))
    edges = [slot for slot, bit in zip(slots, bits) if bit]
    return Graph.from_edges(key.kind, key.n, edges)


def _require_same_kind(g: Graph, h: Graph) -> None:
    if g.kind is not h.kind:
        raise KindMismatchError("图类型不一致", left=g.kind.value, right=h.kind.value)


def is_isomorphic(g: Graph, h: Graph) -> bool:
    _require_same_kind(g, h)
    if g.n != h.n or g.edge_count != h.edge_count:
        return False
    if g.degree_signature() != h.degree_signature():
        return False
    return canonical_key(g) == canonical_key(h)


# ==================== 自同构 ====================

def refine_colors(g: Graph) -> Tuple[int, ...]:
    """
    迭代度细化得到的顶点着色（同构不变：自同构保持颜色）

    初始颜色为 (出度, 入度)，每轮加入出/入邻居的颜色多重集，直到类数不再增加。
    """
    ins = g.in_rows
    colors = [(g.out_degree(v), g.in_degree(v)) for v in range(g.n)]
    palette = {c: i for i, c in enumerate(sorted(set(colors)))}
    current = [palette[c] for c in colors]
    while True:
        signatures = []
        for v in range(g.n):
            outs = sorted(current[u] for u in range(g.n) if (g.rows[v] >> u) & 1)
            inn = sorted(current[u] for u in range(g.n) if (ins[v] >> u) & 1)
            signatures.append((current[v], tuple(outs), tuple(inn)))
        palette = {s: i for i, s in enumerate(sorted(set(signatures)))}
        refined = [palette[s] for s in signatures]
        if len(set(refined)) == len(set(current)):
            return tuple(refined)
        current = refined


def _extends_to_automorphism(g: Graph, colors: Sequence[int], mapping: Dict[int, int]) -> bool:
    """部分映射能否延拓成 g 的自同构（回溯，颜色剪枝）"""
    n = g.n
    rows = g.rows

    def consistent(v: int, w: int, current: Dict[int, int]) -> bool:
        for a, b in current.items():
            if ((rows[v] >> a) & 1) != ((rows[w] >> b) & 1):
                return False
            if ((rows[a] >> v) & 1) != ((rows[b] >> w) & 1):
                return False
        return True

    if len(set(mapping.values())) != len(mapping):
        return False
    for v, w in mapping.items():
        rest = {a: b for a, b in mapping.items() if a != v}
        if colors[v] != colors[w] or not consistent(v, w, rest):
            return False

    def extend(current: Dict[int, int], used: int) -> bool:
        if len(current) == n:
            return True
        v = next(u for u in range(n) if u not in current)
        for w in range(n):
            if (used >> w) & 1 or colors[w] != colors[v]:
                continue
            if consistent(v, w, current):
                current[v] = w
                if extend(current, used | (1 << w)):
                    return True
                del current[v]
        return False

    used = 0
    for w in mapping.values():
        used |= 1 << w
    return extend(dict(mapping), used)


@lru_cache(maxsize=1 << 14)
def automorphism_count(g: Graph) -> int:
    """
    |Aut(g)|：沿稳定化子链做轨道-稳定化子计数

    |Aut_{b1..bk}| = |b_{k+1} 在 Aut_{b1..bk} 下的轨道| * |Aut_{b1..bk+1}|
    """
    _check_search_size(g)
    colors = refine_colors(g)
    fixed: Dict[int, int] = {}
    total = 1
    for b in range(g.n):
        orbit = 1
        for w in range(g.n):
            if w == b or colors[w] != colors[b]:
                continue
            trial = dict(fixed)
            trial[b] = w
            if _extends_to_automorphism(g, colors, trial):
                orbit += 1
        total *= orbit
        fixed[b] = b
    return total


def vertex_deleted(g: Graph, v: int) -> Graph:
    """G - v，剩余顶点保序重标号为 0..n-2"""
    if not 0 <= v < g.n:
        raise ValueError(f"顶点越界: {v}")
    return g.induced(((1 << g.n) - 1) & ~(1 << v))


def labeled_copies(g: Graph) -> int:
    """固定 n 元顶点集上与 g 同构的带标号图个数（暴力，仅用于小图校验）"""
    _check_search_size(g)
    return len({g.relabeled(p).rows for p in permutations(range(g.n))})


# ==================== 常用图 ====================

def complete_graph(n: int) -> Graph:
    return Graph.from_edges(GraphKind.UNDIRECTED, n, combinations(range(n), 2))


def path_graph(n: int) -> Graph:
    return Graph.from_edges(GraphKind.UNDIRECTED, n, [(i, i + 1) for i in range(n - 1)])


def cycle_graph(n: int) -> Graph:
    return Graph.from_edges(GraphKind.UNDIRECTED, n, [(i, (i + 1) % n) for i in range(n)])


def star_graph(n: int) -> Graph:
    """K_{1,n-1}，中心为 0"""
    return Graph.from_edges(GraphKind.UNDIRECTED, n, [(0, i) for i in range(1, n)])


def directed_cycle(n: int) -> Graph:
    return Graph.from_edges(GraphKind.DIRECTED, n, [(i, (i + 1) % n) for i in range(n)])


def transitive_tournament(n: int) -> Graph:
    return Graph.from_edges(GraphKind.DIRECTED, n, combinations(range(n), 2))
