"""linalg.py 测试：Bareiss 精确秩与矩阵工具"""

from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from deckbench.core.linalg import (ExactMatrix, is_upper_triangular, matvec, rank, stack,
                                   transpose)


def fraction_rank(entries):
    """有理数高斯消元，作为独立参照"""
    a = [[Fraction(x) for x in row] for row in entries]
    r = 0
    cols = len(a[0]) if a else 0
    for c in range(cols):
        pivot = next((i for i in range(r, len(a)) if a[i][c] != 0), None)
        if pivot is None:
            continue
        a[r], a[pivot] = a[pivot], a[r]
        for i in range(r + 1, len(a)):
            factor = a[i][c] / a[r][c]
            a[i] = [x - factor * y for x, y in zip(a[i], a[r])]
        r += 1
    return r


matrices = st.integers(1, 6).flatmap(
    lambda cols: st.lists(st.lists(st.integers(-5, 5), min_size=cols, max_size=cols),
                          min_size=0, max_size=7))


def build(entries, cols=None):
    if not entries:
        return ExactMatrix.build([], col_labels=[str(j) for j in range(cols or 0)])
    return ExactMatrix.build(entries)


def test_identity_and_trivial_ranks():
    assert rank(ExactMatrix.identity(5)) == 5
    assert rank(build([[1, 2, 3], [1, 2, 3]])) == 1
    assert rank(build([[0, 0], [0, 0]])) == 0
    empty = build([], cols=4)
    assert empty.shape == (0, 4)
    assert rank(empty) == 0


def test_covering_certificate_has_full_rank():
    rows = [
        [6, 6, 0, 0, 0, 0],
        [2, 3, 0, 0, 0, 0],
        [2, 6, 4, 4, 0, 0],
        [0, 0, 0, 1, 0, 0],
        [0, 0, 0, 0, 2, 0],
        [0, 0, 0, 0, 6, 24],
    ]
    assert rank(build(rows)) == 6


def test_large_entries_stay_exact():
    big = 10 ** 40
    m = build([[big, big + 1], [big + 1, big + 2]])
    assert rank(m) == 2
    assert rank(build([[big, 2 * big], [3, 6]])) == 1


@given(matrices)
def test_rank_matches_fraction_elimination(entries):
    assert rank(build(entries, cols=1)) == fraction_rank(entries)


@given(matrices)
def test_rank_of_transpose(entries):
    if not entries:
        return
    m = build(entries)
    assert rank(transpose(m)) == rank(m)
    assert rank(m) <= min(m.rows, m.cols)


@given(matrices, st.randoms(use_true_random=False), st.integers(1, 9))
def test_rank_invariant_under_scaling_and_permutation(entries, rnd, scale):
    if not entries:
        return
    shuffled = [list(row) for row in entries]
    rnd.shuffle(shuffled)
    scaled = [[x * (-scale if i % 2 else scale) for x in row] for i, row in enumerate(shuffled)]
    assert rank(build(scaled)) == rank(build(entries))


@given(matrices, st.integers(-3, 3))
def test_adding_rows_never_lowers_rank(entries, extra):
    if not entries:
        return
    m = build(entries)
    grown = build(entries + [[extra] * m.cols])
    assert rank(m) <= rank(grown) <= rank(m) + 1
    repeated = build(entries + [list(entries[0])])
    assert rank(repeated) == rank(m)


def test_matvec():
    m = build([[1, 2], [3, 4], [5, 6]])
    assert matvec(m, [0, 0]) == [0, 0, 0]
    assert matvec(ExactMatrix.identity(3), [4, -1, 7]) == [4, -1, 7]
    assert matvec(m, [1, -1]) == [-1, -1, -1]
    with pytest.raises(ValueError):
        matvec(m, [1, 2, 3])


def test_construction_and_helpers():
    with pytest.raises(ValueError):
        ExactMatrix(((1, 2),), ("r",), ("a",))
    with pytest.raises(ValueError):
        ExactMatrix(((1,),), ("r", "s"), ("a",))
    a = ExactMatrix.build([[1, 0]], ["x"], ["p", "q"])
    b = ExactMatrix.build([[0, 1]], ["y"], ["p", "q"])
    both = stack(a, b)
    assert both.row_labels == ("x", "y") and rank(both) == 2
    with pytest.raises(ValueError):
        stack(a, ExactMatrix.build([[0, 1]], ["y"], ["q", "p"]))
    assert is_upper_triangular(build([[1, 5], [0, 2]]))
    assert not is_upper_triangular(build([[1, 0], [3, 2]]))
    assert not is_upper_triangular(a)
    assert build([[1, 2], [3, 4]]).diagonal() == [1, 4]
    assert transpose(a).to_dict()["entries"] == [[1], [0]]
