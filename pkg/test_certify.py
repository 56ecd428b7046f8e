"""certify.py 测试：覆盖数矩阵、K、满秩搜索、定理级校验、确定性"""

import random

import pytest

from deckbench.core import certify as certify_module
from deckbench.core.certify import (FamilySource, FamilySpec, SearchBudget, build_K, build_matrix,
                                    build_star_matrix, candidate_pool, certify, deck_sequence,
                                    load_family, random_family, search_full_rank, theorem_family,
                                    theorem_family_size, verify_kelly, verify_theorem1,
                                    verify_theorem2)
from deckbench.core.covers import GraphSequence, cover_count, kernel_witness
from deckbench.core.enumerate import ClassPredicate, ClassSpec, enumerate_classes
from deckbench.core.errors import PreconditionError
from deckbench.core.graph import (Graph, GraphKind, complete_graph, cycle_graph, graph_from_key,
                                  is_isomorphic, path_graph, star_graph)
from deckbench.core.graph6 import decode_graph
from deckbench.core.linalg import is_upper_triangular, matvec, rank
from deckbench.core.recon import partition_by_deck
from deckbench.core.report import ReportGenerator

U = GraphKind.UNDIRECTED
D = GraphKind.DIRECTED
K2, K3 = complete_graph(2), complete_graph(3)
P3 = path_graph(3)

CONNECTED4 = ClassSpec(U, 4, ClassPredicate.CONNECTED)
ORIENTED3 = ClassSpec(D, 3, ClassPredicate.ORIENTED)


def family(*sequences):
    return FamilySpec.from_sequences([GraphSequence(tuple(s)) for s in sequences], FamilySource.FILE)


# ==================== 矩阵 ====================

def test_build_matrix_three_vertex_row():
    reps = enumerate_classes(ClassSpec(U, 3))
    m = build_matrix(family((K2, K2)), reps)
    assert m.shape == (1, 4)
    assert [decode_graph(label).edge_count for label in m.col_labels] == [0, 1, 2, 3]
    assert m.entries == ((0, 0, 2, 0),)


def test_length_one_and_empty_families():
    reps = enumerate_classes(ClassSpec(U, 3))
    assert build_matrix(family((K2,)), reps).entries == ((0, 0, 0, 0),)
    empty = build_matrix(family(), reps)
    assert empty.shape == (0, 4)
    assert rank(empty) == 0
    with pytest.raises(PreconditionError):
        build_matrix(family((K3, K2)), reps)


def test_connected_four_vertex_certificate_rows():
    paw = Graph.from_edges(U, 4, [(0, 1), (1, 2), (2, 0), (2, 3)])
    diamond = Graph.from_edges(U, 4, [(0, 1), (0, 2), (1, 2), (1, 3), (2, 3)])
    columns = [path_graph(4), star_graph(4), cycle_graph(4), paw, diamond, complete_graph(4)]
    rows = {
        (K2, K2, K2): [6, 6, 0, 0, 0, 0],
        (P3, K2): [2, 3, 0, 0, 0, 0],
        (P3, P3): [2, 6, 4, 4, 0, 0],
        (K3, K2): [0, 0, 0, 1, 0, 0],
        (K3, K3): [0, 0, 0, 0, 2, 0],
        (K3, K3, K3): [0, 0, 0, 0, 6, 24],
    }
    for items, expected in rows.items():
        assert [cover_count(GraphSequence(items), g) for g in columns] == expected
    m = build_matrix(family(*rows), enumerate_classes(CONNECTED4))
    assert rank(m) == 6


def test_star_matrix_bounded_by_matrix():
    reps = enumerate_classes(ClassSpec(U, 4))
    fam = theorem_family(U, 4, max_length=3)
    m, m_star = build_matrix(fam, reps), build_star_matrix(fam, reps)
    for row, star_row in zip(m.entries, m_star.entries):
        assert all(s <= c for s, c in zip(star_row, row))


def test_matrix_independent_of_jobs():
    reps = enumerate_classes(ClassSpec(U, 4))
    fam = theorem_family(U, 4, max_length=3)
    assert build_matrix(fam, reps, jobs=2) == build_matrix(fam, reps)


# ==================== 族 ====================

def test_load_family_dedupes():
    lines = ["# 注释", "A_,A_", "", "Bg,A_", "A_,Bg", "A_, A_"]
    fam = load_family(lines)
    assert len(fam) == 2
    assert fam.source is FamilySource.FILE


def test_deck_sequence_sorted_cards():
    cards = deck_sequence(cycle_graph(4))
    assert len(cards) == 4
    assert all(is_isomorphic(card, P3) for card in cards)


@pytest.mark.parametrize("kind,n,rows", [(U, 3, 7), (U, 4, 65), (D, 3, 16)])
def test_theorem_family_size(kind, n, rows):
    assert theorem_family_size(kind, n) == rows
    assert len(theorem_family(kind, n)) == rows


def test_candidate_pool_and_random_family():
    pool = candidate_pool(enumerate_classes(CONNECTED4))
    assert len(pool) == 7
    first = random_family(pool, 5, random.Random(7))
    second = random_family(pool, 5, random.Random(7))
    assert first.labels() == second.labels()
    assert len(first) == 5
    assert all(2 <= len(s) <= 3 for s in first.sequences)


# ==================== K ====================

@pytest.mark.parametrize("spec,size", [
    (ClassSpec(U, 3), 4),
    (ClassSpec(U, 4), 11),
    (ClassSpec(D, 3), 10),
    (ORIENTED3, 4),
])
def test_build_K(spec, size):
    partition = partition_by_deck(enumerate_classes(spec))
    k = build_K(partition)
    assert k.shape == (size, size)
    assert is_upper_triangular(k)
    assert all(x > 0 for x in k.diagonal())
    assert rank(k) == size


def test_build_K_with_other_representatives():
    partition = partition_by_deck(enumerate_classes(ClassSpec(D, 3)))
    reps = [c.representative for c in partition.classes]
    other = [graph_from_key(c.members[-1]) for c in partition.classes]
    assert rank(build_K(partition, other)) == rank(build_K(partition, reps)) == 10


# ==================== 满秩搜索 ====================

def test_search_certifies_connected_four_vertex_graphs():
    result = search_full_rank(enumerate_classes(CONNECTED4), SearchBudget(), seed=0)
    assert result.certified
    assert result.rank == 6
    assert rank(build_matrix(result.family, enumerate_classes(CONNECTED4))) == 6
    assert result.trace == sorted(result.trace)


@pytest.mark.parametrize("spec,best", [(ClassSpec(D, 3), 10), (ORIENTED3, 4)])
def test_search_stops_at_reconstruction_class_count(spec, best):
    reps = enumerate_classes(spec)
    result = search_full_rank(reps, SearchBudget(), seed=0)
    assert result.rank == best
    assert not result.certified


def test_search_singleton_class():
    result = search_full_rank([cycle_graph(4)], SearchBudget(), seed=0)
    assert result.certified and result.rank == 1


# ==================== 定理级校验 ====================

@pytest.mark.parametrize("spec", [ClassSpec(D, 3), ORIENTED3])
def test_theorem1_quick(spec):
    reps = enumerate_classes(spec)
    partition = partition_by_deck(reps)
    verdict = verify_theorem1(reps, partition, trials=10, seed=20240601)
    assert verdict.passed, verdict.violations[:3]
    assert verdict.details["max_rank"] <= len(partition)
    assert verdict.details["witnesses"] == len(reps) - len(partition)


@pytest.mark.slow
@pytest.mark.parametrize("spec", [ClassSpec(U, 4), ClassSpec(D, 3)])
def test_theorem1_hundred_families(spec):
    reps = enumerate_classes(spec)
    verdict = verify_theorem1(reps, partition_by_deck(reps), trials=100, seed=20240601)
    assert verdict.passed


def test_kernel_witnesses_annihilated():
    reps = enumerate_classes(ClassSpec(D, 3))
    partition = partition_by_deck(reps)
    m = build_matrix(theorem_family(D, 3), reps)
    for c in partition.non_singleton():
        for key in c.members[1:]:
            w = kernel_witness(graph_from_key(key), graph_from_key(c.members[0]), reps)
            assert matvec(m, w) == [0] * m.rows


@pytest.mark.parametrize("spec", [ClassSpec(U, 3), ClassSpec(U, 4), ClassSpec(D, 3), ORIENTED3])
def test_theorem2(spec):
    partition = partition_by_deck(enumerate_classes(spec))
    verdict = verify_theorem2(partition, spec=spec)
    assert verdict.passed, verdict.violations
    assert verdict.details["K_rank"] == len(partition)
    assert verdict.details["row_span"] == "checked"


def test_theorem2_skips_row_span_over_cap():
    spec = ClassSpec(U, 4)
    verdict = verify_theorem2(partition_by_deck(enumerate_classes(spec)), spec=spec, cap=10)
    assert verdict.passed
    assert verdict.details["row_span"] == "skipped"


def test_theorem2_reports_legitimate_decks():
    spec = ClassSpec(U, 3)
    verdict = verify_theorem2(partition_by_deck(enumerate_classes(spec)), spec=spec)
    legit = {entry["sequence"]: entry["legitimate"] for entry in verdict.details["legitimate_decks"]}
    assert len(legit) == 4
    assert sum(legit.values()) == 4


def test_kelly_verdicts():
    verdict = verify_kelly(ClassSpec(D, 3))
    assert verdict.passed and verdict.cases == 6 * 5
    vacuous = verify_kelly(ClassSpec(U, 4))
    assert vacuous.vacuous
    assert vacuous.to_dict()["passed"] is False
    assert str(vacuous).startswith("ERROR")


# ==================== 全流程 ====================

def test_certify_connected_four_vertex_graphs():
    report = certify(CONNECTED4, seed=20240601, trials=5)
    data = report.to_dict()
    assert data["census"] == {"psi": 6, "d": 6, "alpha": 0}
    assert data["certified"] and data["rank"] == 6
    assert data["passed"]
    assert "timings" not in data


def test_certify_reports_are_reproducible():
    for spec in (CONNECTED4, ORIENTED3):
        serial = ReportGenerator.to_json(certify(spec, seed=11, trials=5, jobs=1).to_dict())
        parallel = ReportGenerator.to_json(certify(spec, seed=11, trials=5, jobs=2).to_dict())
        assert serial == parallel


def test_certify_oriented_class():
    data = certify(ORIENTED3, seed=20240601, trials=10, timings=True).to_dict()
    assert data["census"] == {"psi": 7, "d": 4, "alpha": 3}
    assert data["rank"] == 4 and not data["certified"]
    assert data["passed"]
    assert set(data["timings"]) == {"enumerate", "partition", "search", "theorem1", "K", "theorem2"}


def test_certify_builds_k_once(monkeypatch):
    calls = []

    def counting_build_K(*args, **kwargs):
        calls.append(args)
        return build_K(*args, **kwargs)

    monkeypatch.setattr(certify_module, "build_K", counting_build_K)
    report = certify(ClassSpec(U, 3), seed=5, trials=2)
    assert len(calls) == 1
    assert report.k_matrix.shape == (4, 4)
    assert report.passed


def test_theorem2_uses_given_k():
    partition = partition_by_deck(enumerate_classes(ClassSpec(U, 3)))
    k_matrix = build_K(partition)
    verdict = verify_theorem2(partition, k_matrix=k_matrix)
    assert verdict.passed and verdict.details["K_rank"] == 4
