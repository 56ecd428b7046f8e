"""
graph6 / digraph6 编解码

严格按公开格式定义：N(n) 为单字节 n+63（本项目支持 n <= 62），
R(x) 把位串补零到 6 的倍数后每 6 位加 63 成一个可打印字节。

- graph6：x 为上三角按列顺序 x(0,1), x(0,2), x(1,2), x(0,3), ...
- digraph6：前缀 '&'，x 为完整 n*n 邻接矩阵按行展开（对角线必须为 0）
"""

from typing import Iterable, List

from .errors import GraphFormatError
from .graph import MAX_VERTICES, Graph, GraphKind, key_slots

GRAPH6_HEADER = b">>graph6<<"
DIGRAPH6_HEADER = b">>digraph6<<"


def _to_bytes(data) -> bytes:
    if isinstance(data, str):
        try:
            data = data.encode("ascii")
        except UnicodeEncodeError:
            raise GraphFormatError("graph6 只允许 ASCII 字符", token=data)
    return bytes(data).strip()


def _encode_n(n: int) -> bytes:
    if not 0 <= n <= MAX_VERTICES:
        raise GraphFormatError(f"只支持 n <= {MAX_VERTICES}", n=n)
    return bytes([n + 63])


def _encode_r(bits: List[int]) -> bytes:
    padded = bits + [0] * ((-len(bits)) % 6)
    out = bytearray()
    for i in range(0, len(padded), 6):
        value = 0
        for b in padded[i:i + 6]:
            value = (value << 1) | b
        out.append(value + 63)
    return bytes(out)


def _decode_r(payload: bytes, length: int, token: bytes) -> List[int]:
    expected = (length + 5) // 6
    if len(payload) < expected:
        raise GraphFormatError("数据被截断", token=token, expected=expected, got=len(payload))
    if len(payload) > expected:
        raise GraphFormatError("数据多余", token=token, expected=expected, got=len(payload))
    bits: List[int] = []
    for byte in payload:
        if not 63 <= byte <= 126:
            raise GraphFormatError("非法数据字节", token=token, byte=byte)
        value = byte - 63
        bits.extend((value >> (5 - k)) & 1 for k in range(6))
    if any(bits[length:]):
        raise GraphFormatError("填充位必须为 0", token=token)
    return bits[:length]


def _decode_n(data: bytes, token: bytes) -> int:
    if not data:
        raise GraphFormatError("缺少顶点数头字节", token=token)
    n = data[0] - 63
    if not 0 <= n <= MAX_VERTICES:
        raise GraphFormatError("非法顶点数头字节", token=token, byte=data[0])
    return n


def encode_g6(g: Graph) -> bytes:
    if g.kind is not GraphKind.UNDIRECTED:
        raise GraphFormatError("graph6 只能编码无向图", kind=g.kind.value)
    bits = [int(g.has_edge(i, j)) for (i, j) in key_slots(g.kind, g.n)]
    return _encode_n(g.n) + _encode_r(bits)


def decode_g6(data) -> Graph:
    token = _to_bytes(data)
    if token.startswith(GRAPH6_HEADER):
        token = token[len(GRAPH6_HEADER):]
    if token.startswith(b"&"):
        raise GraphFormatError("这是 digraph6，不是 graph6", token=token)
    n = _decode_n(token, token)
    slots = key_slots(GraphKind.UNDIRECTED, n)
    bits = _decode_r(token[1:], len(slots), token)
    edges = [slot for slot, bit in zip(slots, bits) if bit]
    return Graph.from_edges(GraphKind.UNDIRECTED, n, edges)


def encode_d6(g: Graph) -> bytes:
    if g.kind is not GraphKind.DIRECTED:
        raise GraphFormatError("digraph6 只能编码有向图", kind=g.kind.value)
    bits = [int(g.has_edge(i, j)) for i in range(g.n) for j in range(g.n)]
    return b"&" + _encode_n(g.n) + _encode_r(bits)


def decode_d6(data) -> Graph:
    token = _to_bytes(data)
    if token.startswith(DIGRAPH6_HEADER):
        token = token[len(DIGRAPH6_HEADER):]
    if not token.startswith(b"&"):
        raise GraphFormatError("digraph6 必须以 '&' 开头", token=token)
    body = token[1:]
    n = _decode_n(body, token)
    bits = _decode_r(body[1:], n * n, token)
    rows = []
    for i in range(n):
        if bits[i * n + i]:
            raise GraphFormatError("digraph6 中出现自环", token=token, vertex=i)
        row = 0
        for j in range(n):
            if bits[i * n + j]:
                row |= 1 << j
        rows.append(row)
    return Graph(GraphKind.DIRECTED, n, tuple(rows))


def encode_graph(g: Graph) -> str:
    """按图类型选择格式，返回 ASCII 字符串"""
    raw = encode_d6(g) if g.directed else encode_g6(g)
    return raw.decode("ascii")


def decode_graph(data) -> Graph:
    """根据 '&' 前缀自动识别 graph6 / digraph6"""
    token = _to_bytes(data)
    if token.startswith(b"&") or token.startswith(DIGRAPH6_HEADER):
        return decode_d6(token)
    return decode_g6(token)


def read_graphs(lines: Iterable[str]) -> List[Graph]:
    """逐行读取，跳过空行与 '#' 注释"""
    graphs = []
    for line in lines:
        line = line.strip()
        if line and not line.startswith("#"):
            graphs.append(decode_graph(line))
    return graphs
