"""
计数工具：嵌入子图、s(H,G)、覆盖数 c(F,G)、不重叠覆盖数 c*(F,G)

子图是 (顶点集, 边集) 对，用 EmbeddedSubgraph(vmask, emask) 表示，emask 基于
edge_slots 的固定枚举。所有计数都是 Python int / Fraction，精确无溢出。
"""

from collections import Counter, OrderedDict
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from itertools import combinations_with_replacement, product
from math import factorial, prod
from typing import Dict, Iterator, List, Optional, Sequence, Tuple

from .enumerate import classes_up_to
from .errors import KindMismatchError, PreconditionError
from .graph import (CanonicalKey, Graph, GraphKind, automorphism_count, canonical_key,
                    edge_slots, graph_from_key, subgraph_from_masks)
from .graph6 import decode_graph, encode_graph
from .logger import logger

# 置换表只在 n + 边位置数 不超过该值时启用
TABLE_SIZE_LIMIT = 24
# 估算的单条置换表记录字节数
_ENTRY_BYTES = 160

# 默认 64MB；CLI 按 RunConfig.table_mb 重新设置
_table_entries = 64 * 1024 * 1024 // _ENTRY_BYTES


def configure_table(megabytes: int) -> None:
    """设置 cover_count 置换表的内存上限（MB），0 表示关闭"""
    global _table_entries
    _table_entries = max(0, megabytes) * 1024 * 1024 // _ENTRY_BYTES
    _COVER_CACHE.clear()


@dataclass(frozen=True, order=True)
class EmbeddedSubgraph:
    host_n: int
    vmask: int
    emask: int

    @property
    def vertex_count(self) -> int:
        return self.vmask.bit_count()

    @property
    def edge_count(self) -> int:
        return self.emask.bit_count()


@dataclass(frozen=True)
class GraphSequence:
    """图序列 F = (F_1, ..., F_m)；两个序列等价当且仅当 normalized_key 相同"""
    items: Tuple[Graph, ...]

    def __post_init__(self):
        kinds = {f.kind for f in self.items}
        if len(kinds) > 1:
            raise KindMismatchError("序列中混用了有向图与无向图")

    @classmethod
    def of(cls, *items: Graph) -> "GraphSequence":
        return cls(tuple(items))

    @classmethod
    def from_keys(cls, keys: Sequence[CanonicalKey]) -> "GraphSequence":
        return cls(tuple(graph_from_key(key) for key in keys))

    @classmethod
    def parse(cls, text: str) -> "GraphSequence":
        """逗号分隔的 graph6/digraph6 记号"""
        tokens = [token.strip() for token in text.strip().split(",")]
        return cls(tuple(decode_graph(token) for token in tokens if token))

    def __len__(self) -> int:
        return len(self.items)

    def __iter__(self) -> Iterator[Graph]:
        return iter(self.items)

    @property
    def kind(self) -> Optional[GraphKind]:
        return self.items[0].kind if self.items else None

    @property
    def normalized_key(self) -> Tuple[CanonicalKey, ...]:
        return tuple(sorted(canonical_key(f) for f in self.items))

    def normalized(self) -> "GraphSequence":
        """等价序列中的规范代表：规范形式按键排序"""
        return GraphSequence.from_keys(self.normalized_key)

    def restrict(self, indices: Sequence[int]) -> "GraphSequence":
        return GraphSequence(tuple(self.items[i] for i in indices))

    @property
    def vertex_total(self) -> int:
        return sum(f.n for f in self.items)

    @property
    def edge_total(self) -> int:
        return sum(f.edge_count for f in self.items)

    @property
    def label(self) -> str:
        return ",".join(encode_graph(graph_from_key(key)) for key in self.normalized_key)

    def __str__(self):
        return f"({self.label})"


def _require_kind(g: Graph, seq: GraphSequence) -> None:
    if seq.kind is not None and seq.kind is not g.kind:
        raise KindMismatchError("序列与宿主图类型不一致", sequence=seq.kind.value, host=g.kind.value)


# ==================== 嵌入与子图 ====================

@lru_cache(maxsize=None)
def _slot_index(kind: GraphKind, n: int) -> Dict[Tuple[int, int], int]:
    index = {}
    for i, (u, v) in enumerate(edge_slots(kind, n)):
        index[(u, v)] = i
        if kind is GraphKind.UNDIRECTED:
            index[(v, u)] = i
    return index


def _embeddings(f: Graph, host: Graph) -> Iterator[Tuple[int, ...]]:
    """f 到 host 的保边单射（非诱导），phi[u] 为 u 的像"""
    if f.kind is not host.kind:
        raise KindMismatchError("图类型不一致", left=f.kind.value, right=host.kind.value)
    if f.n > host.n:
        return
    phi = [0] * f.n
    frows, hrows = f.rows, host.rows

    def extend(u: int, used: int) -> Iterator[Tuple[int, ...]]:
        if u == f.n:
            yield tuple(phi)
            return
        for w in range(host.n):
            if (used >> w) & 1:
                continue
            ok = True
            for a in range(u):
                if (frows[u] >> a) & 1 and not (hrows[w] >> phi[a]) & 1:
                    ok = False
                    break
                if (frows[a] >> u) & 1 and not (hrows[phi[a]] >> w) & 1:
                    ok = False
                    break
            if ok:
                phi[u] = w
                yield from extend(u + 1, used | (1 << w))

    yield from extend(0, 0)


@lru_cache(maxsize=1 << 16)
def embedded_subgraphs(f: Graph, host: Graph) -> Tuple[EmbeddedSubgraph, ...]:
    """host 中所有与 f 同构的子图（不同的 (vmask, emask) 对），按 (vmask, emask) 排序"""
    slot = _slot_index(host.kind, host.n)
    found = set()
    f_edges = f.edges()
    for phi in _embeddings(f, host):
        vmask = 0
        for w in phi:
            vmask |= 1 << w
        emask = 0
        for u, v in f_edges:
            emask |= 1 << slot[(phi[u], phi[v])]
        found.add(EmbeddedSubgraph(host.n, vmask, emask))
    return tuple(sorted(found))


def embedding_count(h: Graph, g: Graph) -> int:
    """保边单射 h -> g 的个数"""
    return sum(1 for _ in _embeddings(h, g))


def subgraph_count(h: Graph, g: Graph) -> int:
    """s(H,G)：G 中与 H 同构的子图个数"""
    if h.kind is not g.kind:
        raise KindMismatchError("图类型不一致", left=h.kind.value, right=g.kind.value)
    if h.n > g.n or h.edge_count > g.edge_count:
        return 0
    return len(embedded_subgraphs(h, g))


def subgraph_count_by_automorphisms(h: Graph, g: Graph) -> int:
    """s(H,G) 的第二种算法：嵌入数 / |Aut(H)|"""
    embeddings = embedding_count(h, g)
    aut = automorphism_count(h)
    if embeddings % aut:
        raise ArithmeticError(f"嵌入数 {embeddings} 不能被 |Aut| = {aut} 整除")
    return embeddings // aut


@lru_cache(maxsize=1 << 16)
def contains_subgraph(h: Graph, g: Graph) -> bool:
    """G 是否含有与 H 同构的子图，即 s(H,G) >= 1"""
    if h.kind is not g.kind:
        raise KindMismatchError("图类型不一致", left=h.kind.value, right=g.kind.value)
    if h.n > g.n or h.edge_count > g.edge_count:
        return False
    return next(_embeddings(h, g), None) is not None


# ==================== 覆盖计数 ====================

# (normalized_key, canonical_key(g), distinct) -> count，LRU，最多 COVER_CACHE_LIMIT 条
COVER_CACHE_LIMIT = 100_000
_COVER_CACHE: "OrderedDict[Tuple, int]" = OrderedDict()


def _count_covers(seq: GraphSequence, g: Graph, distinct: bool) -> int:
    if len(seq) == 0:
        return 1 if g.n == 0 else 0

    order = sorted(range(len(seq)), key=lambda i: (-seq.items[i].edge_count, -seq.items[i].n))
    items = [seq.items[i] for i in order]
    lists = [embedded_subgraphs(f, g) for f in items]
    if any(not choices for choices in lists):
        return 0

    full_v = (1 << g.n) - 1
    full_e = g.edge_mask
    m = len(items)
    vcap = [0] * (m + 1)
    ecap = [0] * (m + 1)
    for i in range(m - 1, -1, -1):
        vcap[i] = vcap[i + 1] + items[i].n
        ecap[i] = ecap[i + 1] + items[i].edge_count

    slots = len(edge_slots(g.kind, g.n))
    use_table = not distinct and g.n + slots <= TABLE_SIZE_LIMIT and _table_entries > 0
    table: Dict[Tuple[int, int, int], int] = {}

    def dfs(i: int, vmask: int, emask: int, used: Tuple[int, ...]) -> int:
        if i == m:
            return int(vmask == full_v and emask == full_e)
        # 剩余项的顶点 / 边容量不足以补齐缺口
        if (full_v & ~vmask).bit_count() > vcap[i] or (full_e & ~emask).bit_count() > ecap[i]:
            return 0
        if use_table:
            cached = table.get((i, vmask, emask))
            if cached is not None:
                return cached
        total = 0
        for sub in lists[i]:
            if distinct and sub.vmask in used:
                continue
            total += dfs(i + 1, vmask | sub.vmask, emask | sub.emask,
                         used + (sub.vmask,) if distinct else used)
        if use_table and len(table) < _table_entries:
            table[(i, vmask, emask)] = total
        return total

    return dfs(0, 0, 0, ())


def _cached_cover_count(seq: GraphSequence, g: Graph, distinct: bool) -> int:
    _require_kind(g, seq)
    cache_key = (seq.normalized_key, canonical_key(g), distinct)
    if cache_key in _COVER_CACHE:
        _COVER_CACHE.move_to_end(cache_key)
        return _COVER_CACHE[cache_key]
    value = _count_covers(seq, g, distinct)
    _COVER_CACHE[cache_key] = value
    while len(_COVER_CACHE) > COVER_CACHE_LIMIT:
        _COVER_CACHE.popitem(last=False)
    return value


def cover_count(seq: GraphSequence, g: Graph) -> int:
    """
    c(F,G)：有序覆盖 (S_1..S_m) 的个数，S_i ≅ F_i 且并集恰为 G（顶点与边）

    空序列只覆盖 0 顶点图。
    """
    return _cached_cover_count(seq, g, distinct=False)


def nonoverlapping_cover_count(seq: GraphSequence, g: Graph) -> int:
    """c*(F,G)：在 c 的基础上要求各 S_i 的顶点集两两不同"""
    return _cached_cover_count(seq, g, distinct=True)


def gamma(seq: GraphSequence) -> Fraction:
    """γ = 1 / ∏ (同构类重数)!"""
    multiplicities = Counter(seq.normalized_key)
    return Fraction(1, prod(factorial(k) for k in multiplicities.values()))


def kocay_sum(seq: GraphSequence, g: Graph, class_reps: Sequence[Graph]) -> int:
    """Σ_H c(F,H) s(H,G)，H 取遍 class_reps"""
    _require_kind(g, seq)
    if any(f.n >= g.n for f in seq):
        raise PreconditionError("kocay_sum 要求每个 F_i 的顶点数小于 v(G)", n=g.n)
    return sum(cover_count(seq, h) * subgraph_count(h, g) for h in class_reps)


# ==================== 恒等式校验 ====================

def eq1_sides(seq: GraphSequence, g: Graph) -> Tuple[int, int]:
    """
    ∏ s(F_i,G) 与 Σ_X c(F,X) s(X,G)

    X 取遍顶点数 <= v(G) 的全部同构类；只有 v(X) <= Σv(F_i) 且 e(X) <= Σe(F_i)
    的 X 可能非零。
    """
    _require_kind(g, seq)
    lhs = prod(subgraph_count(f, g) for f in seq)
    top = min(g.n, seq.vertex_total)
    rhs = 0
    for x in classes_up_to(g.kind, top):
        if x.edge_count > seq.edge_total or x.edge_count > g.edge_count:
            continue
        s = subgraph_count(x, g)
        if s:
            rhs += cover_count(seq, x) * s
    return lhs, rhs


def verify_eq1(seq: GraphSequence, g: Graph) -> bool:
    lhs, rhs = eq1_sides(seq, g)
    if lhs != rhs:
        logger.warn("Eq.1 不成立", sequence=seq.label, host=encode_graph(g), lhs=lhs, rhs=rhs)
    return lhs == rhs


def onto_maps(ell: int, k: int) -> List[Tuple[int, ...]]:
    """{0..ell-1} -> {0..k-1} 的全部满射，按字典序"""
    return [p for p in product(range(k), repeat=ell) if len(set(p)) == k]


def union_pool(seq: GraphSequence, g: Graph) -> List[CanonicalKey]:
    """
    G 中由 F 的嵌入子图在同一 (n-1) 顶点集上取并得到的全部子图的同构类

    递推式里的 H_i 只可能来自这里。
    """
    by_vertex_set: Dict[int, set] = {}
    for f in seq:
        for sub in embedded_subgraphs(f, g):
            by_vertex_set.setdefault(sub.vmask, set()).add(sub.emask)
    keys = set()
    for vmask, emasks in by_vertex_set.items():
        closure = set(emasks)
        frontier = set(emasks)
        while frontier:
            grown = {a | b for a in frontier for b in emasks} - closure
            closure |= grown
            frontier = grown
        for emask in closure:
            keys.add(canonical_key(subgraph_from_masks(g, vmask, emask)))
    return sorted(keys)


def recurrence_sides(seq: GraphSequence, g: Graph) -> Tuple[int, Fraction]:
    """
    c(F,G) 与 Σ_{k=2..ℓ} Σ_P Σ_H γ(H) c*(H,G) ∏_i c(F|P⁻¹(i), H_i)

    F 的每一项都是 v(G)-1 顶点图；H 取遍 union_pool 上长度为 k 的多重集。
    """
    _require_kind(g, seq)
    ell = len(seq)
    if not 2 <= ell <= g.n:
        raise PreconditionError("递推式要求 2 <= ℓ <= v(G)", length=ell, n=g.n)
    if any(f.n != g.n - 1 for f in seq):
        raise PreconditionError("递推式要求每个 F_i 恰有 v(G)-1 个顶点", n=g.n)

    lhs = cover_count(seq, g)
    pool = union_pool(seq, g)
    rhs = Fraction(0)
    for k in range(2, ell + 1):
        maps = onto_maps(ell, k)
        for keys in combinations_with_replacement(pool, k):
            h = GraphSequence.from_keys(keys)
            star = nonoverlapping_cover_count(h, g)
            if not star:
                continue
            inner = 0
            for p in maps:
                term = 1
                for i, target in enumerate(h.items):
                    block = seq.restrict([j for j in range(ell) if p[j] == i])
                    term *= cover_count(block, target)
                    if not term:
                        break
                inner += term
            rhs += gamma(h) * star * inner
    return lhs, rhs


def verify_recurrence(seq: GraphSequence, g: Graph) -> bool:
    lhs, rhs = recurrence_sides(seq, g)
    if Fraction(lhs) != rhs:
        logger.warn("c/c* 递推不成立", sequence=seq.label, host=encode_graph(g), lhs=lhs, rhs=str(rhs))
    return Fraction(lhs) == rhs


def kernel_witness(gij: Graph, gi1: Graph, class_reps: Sequence[Graph]) -> List[int]:
    """w(H) = s(H,G_ij) - s(H,G_i1)，按 class_reps 的顺序"""
    from .recon import deck

    if deck(gij) != deck(gi1):
        raise PreconditionError("kernel_witness 要求两图的 deck 相同")
    return [subgraph_count(h, gij) - subgraph_count(h, gi1) for h in class_reps]
