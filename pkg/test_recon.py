"""recon.py 测试：deck、重构类、census、Kelly、卡片嵌入偏序、合法 deck"""

import pytest

from deckbench.core.enumerate import ClassPredicate, ClassSpec, classes_up_to, enumerate_classes
from deckbench.core.errors import KindMismatchError, PreconditionError
from deckbench.core.graph import (Graph, GraphKind, canonical_key, complete_graph, cycle_graph,
                                  directed_cycle, graph_from_key, is_isomorphic, path_graph,
                                  transitive_tournament)
from deckbench.core.recon import (Deck, census, class_leq, deck, edge_count_from_deck,
                                  is_legitimate_deck, kelly_check, order_classes,
                                  partition_by_deck)

U = GraphKind.UNDIRECTED
D = GraphKind.DIRECTED


def key(g):
    return canonical_key(g)


# ==================== deck ====================

def test_deck_examples():
    k2 = key(complete_graph(2))
    e2 = key(Graph.empty(U, 2))
    assert deck(complete_graph(3)).cards == (k2, k2, k2)
    assert deck(path_graph(3)).cards == (e2, k2, k2)
    assert deck(directed_cycle(3)) == deck(transitive_tournament(3))
    single_arc = key(Graph.from_edges(D, 2, [(0, 1)]))
    assert deck(directed_cycle(3)).cards == (single_arc,) * 3
    assert deck(Graph.empty(U, 0)).n == 0
    assert deck(Graph.empty(U, 1)).cards == (key(Graph.empty(U, 0)),)


# ==================== 划分与 census ====================

def test_undirected_three_vertex_partition_is_discrete():
    partition = partition_by_deck(enumerate_classes(ClassSpec(U, 3)))
    assert partition.sizes == [1, 1, 1, 1]


def test_directed_three_vertex_partition():
    partition = partition_by_deck(enumerate_classes(ClassSpec(D, 3)))
    assert len(partition) == 10
    assert sorted(partition.sizes) == [1] * 6 + [2, 2, 3, 3]


def test_oriented_three_vertex_partition():
    partition = partition_by_deck(enumerate_classes(ClassSpec(D, 3, ClassPredicate.ORIENTED)))
    assert sorted(partition.sizes) == [1, 1, 2, 3]
    pair = next(c for c in partition.classes if c.size == 2)
    assert set(pair.members) == {key(directed_cycle(3)), key(transitive_tournament(3))}


def test_partition_invariants():
    reps = enumerate_classes(ClassSpec(D, 3))
    partition = partition_by_deck(reps)
    members = [m for c in partition.classes for m in c.members]
    assert sorted(members) == sorted(key(g) for g in reps)
    decks = partition.deck_of_class
    assert len(set(decks)) == len(decks)
    for c in partition.classes:
        assert list(c.members) == sorted(c.members)
        assert all(deck(graph_from_key(m)) == c.deck for m in c.members)
        # 同一重构类的边数相同
        assert len({graph_from_key(m).edge_count for m in c.members}) == 1
    firsts = [c.members[0] for c in partition.classes]
    assert firsts == sorted(firsts)


def test_partition_single_graph_and_bad_input():
    assert partition_by_deck([cycle_graph(4)]).sizes == [1]
    assert len(partition_by_deck([])) == 0
    with pytest.raises(PreconditionError):
        partition_by_deck([cycle_graph(4), cycle_graph(4).relabeled([1, 0, 2, 3])])
    with pytest.raises(PreconditionError):
        partition_by_deck([cycle_graph(4), path_graph(3)])
    with pytest.raises(KindMismatchError):
        partition_by_deck([path_graph(3), directed_cycle(3)])


def test_partition_independent_of_jobs():
    reps = enumerate_classes(ClassSpec(D, 3))
    assert partition_by_deck(reps, jobs=2) == partition_by_deck(reps)


@pytest.mark.parametrize("spec,expected", [
    (ClassSpec(U, 3), {"psi": 4, "d": 4, "alpha": 0}),
    (ClassSpec(U, 4), {"psi": 11, "d": 11, "alpha": 0}),
    (ClassSpec(U, 5), {"psi": 34, "d": 34, "alpha": 0}),
    (ClassSpec(U, 6), {"psi": 156, "d": 156, "alpha": 0}),
    (ClassSpec(D, 3), {"psi": 16, "d": 10, "alpha": 6}),
    (ClassSpec(D, 3, ClassPredicate.ORIENTED), {"psi": 7, "d": 4, "alpha": 3}),
    (ClassSpec(U, 4, ClassPredicate.CONNECTED), {"psi": 6, "d": 6, "alpha": 0}),
])
def test_census(spec, expected):
    assert census(spec).to_dict() == expected


def test_census_flags_small_n():
    one = census(ClassSpec(U, 1))
    assert (one.psi, one.d, one.alpha) == (1, 1, 0)
    result = census(ClassSpec(U, 2))
    assert (result.psi, result.d, result.alpha) == (2, 1, 1)
    assert "note" in result.to_dict()


@pytest.mark.slow
def test_census_seven_vertices():
    assert census(ClassSpec(U, 7), slow=True).to_dict() == {"psi": 1044, "d": 1044, "alpha": 0}


# ==================== Kelly ====================

def test_kelly_on_directed_three_vertex_classes():
    small = classes_up_to(D, 2)
    partition = partition_by_deck(enumerate_classes(ClassSpec(D, 3)))
    checked = 0
    for c in partition.non_singleton():
        first = graph_from_key(c.members[0])
        for m in c.members[1:]:
            for f in small:
                assert kelly_check(f, first, graph_from_key(m))
                checked += 1
    assert checked == 6 * len(small)


def test_kelly_preconditions():
    with pytest.raises(PreconditionError):
        kelly_check(complete_graph(2), complete_graph(3), path_graph(3))
    with pytest.raises(PreconditionError):
        kelly_check(complete_graph(3), directed_cycle(3), transitive_tournament(3))


# ==================== 偏序 ====================

def test_class_leq_examples():
    c4 = cycle_graph(4)
    assert class_leq(c4, c4)
    assert class_leq(Graph.empty(U, 4), complete_graph(4))
    assert not class_leq(complete_graph(4), c4)
    with pytest.raises(KindMismatchError):
        class_leq(complete_graph(3), directed_cycle(3))
    with pytest.raises(PreconditionError):
        class_leq(complete_graph(3), complete_graph(4))


@pytest.mark.parametrize("spec", [ClassSpec(U, 4), ClassSpec(D, 3)])
def test_class_leq_is_a_preorder(spec):
    reps = enumerate_classes(spec)
    leq = {(i, j): class_leq(a, b) for i, a in enumerate(reps) for j, b in enumerate(reps)}
    size = len(reps)
    for i in range(size):
        assert leq[(i, i)]
        for j in range(size):
            if leq[(i, j)] and leq[(j, i)]:
                assert deck(reps[i]) == deck(reps[j])
            for k in range(size):
                if leq[(i, j)] and leq[(j, k)]:
                    assert leq[(i, k)]


@pytest.mark.parametrize("spec", [ClassSpec(U, 4), ClassSpec(D, 3), ClassSpec(D, 3, ClassPredicate.ORIENTED)])
def test_order_classes_is_linear_extension(spec):
    partition = partition_by_deck(enumerate_classes(spec))
    reps = partition.representatives()
    order = order_classes(partition)
    assert sorted(order) == list(range(len(partition)))
    position = {c: p for p, c in enumerate(order)}
    for i in range(len(reps)):
        for j in range(len(reps)):
            if i != j and class_leq(reps[i], reps[j]):
                assert position[i] < position[j]


def test_order_classes_needs_one_rep_per_class():
    partition = partition_by_deck(enumerate_classes(ClassSpec(U, 3)))
    with pytest.raises(PreconditionError):
        order_classes(partition, partition.representatives()[:2])


# ==================== 合法 deck ====================

def test_edge_count_from_deck():
    assert edge_count_from_deck(deck(cycle_graph(4))) == 4
    assert edge_count_from_deck(deck(complete_graph(5))) == 10
    with pytest.raises(PreconditionError):
        edge_count_from_deck(deck(complete_graph(2)))


def test_legitimate_decks():
    spec4 = ClassSpec(U, 4)
    found = is_legitimate_deck(deck(cycle_graph(4)).card_graphs(), spec4)
    assert found is not None and is_isomorphic(found, cycle_graph(4))

    k2 = complete_graph(2)
    assert is_isomorphic(is_legitimate_deck([k2, k2, k2], ClassSpec(U, 3)), complete_graph(3))

    k3 = complete_graph(3)
    assert is_legitimate_deck([k3, k3, k3, Graph.empty(U, 3)], spec4) is None


def test_legitimate_deck_preconditions():
    k2 = complete_graph(2)
    with pytest.raises(PreconditionError):
        is_legitimate_deck([k2, k2], ClassSpec(U, 3))
    with pytest.raises(PreconditionError):
        is_legitimate_deck([k2, k2, complete_graph(3)], ClassSpec(U, 3))
    with pytest.raises(KindMismatchError):
        is_legitimate_deck([directed_cycle(2)] * 3, ClassSpec(U, 3))


def test_deck_from_cards_sorts():
    k2, e2 = complete_graph(2), Graph.empty(U, 2)
    assert Deck.from_cards([k2, e2, k2]) == deck(path_graph(3))
