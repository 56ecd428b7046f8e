"""
精确整数矩阵

rank 用 Bareiss 无分数消元（逐列找第一个非零主元，整列为零时跳过），
每一步的除法都必须整除，否则抛 ArithmeticError。
"""

from dataclasses import dataclass
from typing import Dict, List, Sequence, Tuple


@dataclass(frozen=True)
class ExactMatrix:
    """稠密整数矩阵，带行/列标签（行：序列，列：同构类）"""
    entries: Tuple[Tuple[int, ...], ...]
    row_labels: Tuple[str, ...]
    col_labels: Tuple[str, ...]

    def __post_init__(self):
        if len(self.row_labels) != len(self.entries):
            raise ValueError(f"行标签数 {len(self.row_labels)} 与行数 {len(self.entries)} 不一致")
        for row in self.entries:
            if len(row) != len(self.col_labels):
                raise ValueError(f"行长度 {len(row)} 与列数 {len(self.col_labels)} 不一致")

    @classmethod
    def build(cls, entries: Sequence[Sequence[int]], row_labels: Sequence[str] = (),
              col_labels: Sequence[str] = ()) -> "ExactMatrix":
        """标签缺省时用行号/列号"""
        rows = tuple(tuple(int(x) for x in row) for row in entries)
        cols = len(rows[0]) if rows else len(col_labels)
        row_labels = tuple(row_labels) or tuple(str(i) for i in range(len(rows)))
        col_labels = tuple(col_labels) or tuple(str(j) for j in range(cols))
        return cls(rows, row_labels, col_labels)

    @classmethod
    def identity(cls, n: int) -> "ExactMatrix":
        return cls.build([[int(i == j) for j in range(n)] for i in range(n)],
                         col_labels=[str(j) for j in range(n)])

    @property
    def rows(self) -> int:
        return len(self.entries)

    @property
    def cols(self) -> int:
        return len(self.col_labels)

    @property
    def shape(self) -> Tuple[int, int]:
        return self.rows, self.cols

    def diagonal(self) -> List[int]:
        return [self.entries[i][i] for i in range(min(self.rows, self.cols))]

    def to_dict(self) -> Dict:
        return {
            "rows": self.rows,
            "cols": self.cols,
            "row_labels": list(self.row_labels),
            "col_labels": list(self.col_labels),
            "entries": [list(row) for row in self.entries],
        }


def rank(m: ExactMatrix) -> int:
    """有理数域上的精确秩"""
    a = [list(row) for row in m.entries]
    nrows, ncols = m.rows, m.cols
    r = 0
    previous = 1
    for c in range(ncols):
        if r == nrows:
            break
        pivot = next((i for i in range(r, nrows) if a[i][c]), None)
        if pivot is None:
            continue
        a[r], a[pivot] = a[pivot], a[r]
        for i in range(r + 1, nrows):
            for j in range(c + 1, ncols):
                value = a[r][c] * a[i][j] - a[i][c] * a[r][j]
                quotient, remainder = divmod(value, previous)
                if remainder:
                    raise ArithmeticError(f"Bareiss 消元出现非整除: {value} / {previous}")
                a[i][j] = quotient
            a[i][c] = 0
        previous = a[r][c]
        r += 1
    return r


def matvec(m: ExactMatrix, x: Sequence[int]) -> List[int]:
    if len(x) != m.cols:
        raise ValueError(f"向量长度 {len(x)} 与列数 {m.cols} 不一致")
    return [sum(a * b for a, b in zip(row, x)) for row in m.entries]


def transpose(m: ExactMatrix) -> ExactMatrix:
    entries = tuple(tuple(m.entries[i][j] for i in range(m.rows)) for j in range(m.cols))
    return ExactMatrix(entries, m.col_labels, m.row_labels)


def stack(top: ExactMatrix, bottom: ExactMatrix) -> ExactMatrix:
    """纵向拼接；两者的列标签必须一致"""
    if top.col_labels != bottom.col_labels:
        raise ValueError("拼接的两个矩阵列标签不一致")
    return ExactMatrix(top.entries + bottom.entries,
                       top.row_labels + bottom.row_labels, top.col_labels)


def is_upper_triangular(m: ExactMatrix) -> bool:
    if m.rows != m.cols:
        return False
    return all(m.entries[i][j] == 0 for i in range(m.rows) for j in range(i))
