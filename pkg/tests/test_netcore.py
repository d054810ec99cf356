import itertools

import pytest

from snprlab.errors import (
    BudgetExceededError,
    InvalidNetworkError,
    MoveError,
)
from snprlab.netcore import (
    Edge,
    canonical_signature,
    delete_reticulation_edge,
    enumerate_tree_child,
    is_tree_child,
    isomorphic,
    isomorphism_map,
    network_violations,
    random_network,
    random_tree_child,
    rooted_tree_count,
    tree_child_report,
    validate,
)


def count_identity_holds(n):
    leaves = len(n.leaves)
    retics = n.reticulation_count
    trees = sum(1 for v in n.vertices
                if n.in_degree(v) == 1 and n.out_degree(v) == 2)
    return (len(n.edges) == leaves + trees + 2 * retics
            and len(n.edges) == 1 + 2 * trees + retics)


def test_triple_counts(triple_ab_c):
    assert len(triple_ab_c.vertices) == 6
    assert len(triple_ab_c.edges) == 5
    assert triple_ab_c.reticulation_count == 0
    assert triple_ab_c.taxa == {"a", "b", "c"}


def test_reticulated_counts(retic_ab_c):
    assert len(retic_ab_c.vertices) == 8
    assert len(retic_ab_c.edges) == 8
    assert retic_ab_c.reticulation_count == 1


def test_single_leaf_network_is_valid():
    n = validate([(0, 1)], {1: "a"})
    assert len(n.vertices) == 2
    assert n.root == 0


def test_count_identity(triple_ab_c, retic_ab_c, stack_sibling_host, parallel_one_leaf):
    for n in (triple_ab_c, retic_ab_c, stack_sibling_host, parallel_one_leaf):
        assert count_identity_holds(n)


def test_validate_rejects_self_loop():
    with pytest.raises(InvalidNetworkError):
        validate([(0, 1), (1, 1)], {1: "a"})


def test_validate_rejects_two_sources():
    with pytest.raises(InvalidNetworkError) as err:
        validate([(0, 1), (2, 1), (1, 3)], {3: "a"}, root=0)
    assert any("in-degree-zero" in p for p in err.value.violations)


def test_validate_rejects_cycle():
    with pytest.raises(InvalidNetworkError) as err:
        validate([(0, 1), (1, 2), (2, 3), (3, 1), (2, 4), (3, 5)],
                 {4: "a", 5: "b"}, root=0)
    assert any("cycle" in p for p in err.value.violations)


def test_validate_rejects_bad_degrees():
    # vertex 1 has out-degree 3
    with pytest.raises(InvalidNetworkError):
        validate([(0, 1), (1, 2), (1, 3), (1, 4)], {2: "a", 3: "b", 4: "c"})


def test_validate_rejects_unlabelled_leaf():
    with pytest.raises(InvalidNetworkError) as err:
        validate([(0, 1), (1, 2), (1, 3)], {2: "a"})
    assert any("no label" in p for p in err.value.violations)


def test_validate_rejects_duplicate_labels():
    with pytest.raises(InvalidNetworkError) as err:
        validate([(0, 1), (1, 2), (1, 3)], {2: "a", 3: "a"})
    assert any("not distinct" in p for p in err.value.violations)


def test_validate_rejects_bad_label_charset():
    with pytest.raises(InvalidNetworkError):
        validate([(0, 1)], {1: "a b"})


def test_violations_report_sparse_slots():
    problems = network_violations(
        {0, 1, 2}, [Edge(0, 1, 0), Edge(1, 2, 1)], 0, {2: "a"})
    assert any("not dense" in p for p in problems)


def test_parallel_edges_accepted(parallel_one_leaf):
    assert len(parallel_one_leaf.edges) == 4
    assert parallel_one_leaf.reticulation_count == 1


def test_tree_child_report_on_trees(triple_ab_c):
    rep = tree_child_report(triple_ab_c)
    assert rep.is_tree_child
    assert not rep.stacks and not rep.sibling_reticulations and not rep.parallel_pairs


def test_tree_child_report_on_reticulated(retic_ab_c):
    assert tree_child_report(retic_ab_c).is_tree_child


def test_tree_child_report_flags_stack_and_siblings(stack_sibling_host):
    rep = tree_child_report(stack_sibling_host)
    assert not rep.is_tree_child
    assert Edge(4, 5, 0) in rep.stacks
    assert (3, 4, 5) in rep.sibling_reticulations
    assert not rep.parallel_pairs


def test_tree_child_report_flags_parallel(parallel_one_leaf):
    rep = tree_child_report(parallel_one_leaf)
    assert not rep.is_tree_child
    assert rep.parallel_pairs == ((1, 2),)


def test_root_child_is_never_a_reticulation():
    for seed in range(30):
        n = random_network(4, 2, seed=seed)
        child = n.children(n.root)[0]
        assert n.in_degree(child) == 1


def test_isomorphic_under_relabelling(triple_ab_c):
    shifted = validate([(10, 11), (11, 12), (11, 15), (12, 13), (12, 14)],
                       {13: "a", 14: "b", 15: "c"})
    assert isomorphic(triple_ab_c, shifted)
    assert canonical_signature(triple_ab_c) == canonical_signature(shifted)


def test_not_isomorphic_across_topologies(triple_ab_c, triple_ac_b, triple_a_bc):
    assert not isomorphic(triple_ab_c, triple_ac_b)
    assert not isomorphic(triple_ab_c, triple_a_bc)
    assert canonical_signature(triple_ab_c) != canonical_signature(triple_ac_b)


def test_isomorphism_map_preserves_labels_and_edges(retic_ab_c):
    shifted = validate(
        [(u + 20, v + 20, s) for u, v, s in retic_ab_c.edges],
        {v + 20: lab for v, lab in retic_ab_c.leaf_labels.items()})
    mapping = isomorphism_map(retic_ab_c, shifted)
    assert mapping is not None
    for v, lab in retic_ab_c.leaf_labels.items():
        assert shifted.leaf_labels[mapping[v]] == lab
    mapped = sorted((mapping[u], mapping[v]) for u, v, _ in retic_ab_c.edges)
    assert mapped == sorted((u, v) for u, v, _ in shifted.edges)


def test_signature_agrees_with_isomorphism_oracle():
    # dual route: canonical signatures versus the backtracking matcher
    nets = list(enumerate_tree_child(3, max_reticulations=1))
    for a, b in itertools.combinations(nets, 2):
        assert (canonical_signature(a) == canonical_signature(b)) == isomorphic(a, b)
    for a in nets:
        assert isomorphic(a, a)


def test_delete_reticulation_edge_both_ways(retic_ab_c, triple_ab_c, triple_a_bc):
    # removing the a-side reticulation edge leaves (a,(b,c))
    got = delete_reticulation_edge(retic_ab_c, Edge(2, 6, 0))
    assert isomorphic(got, triple_a_bc)
    # removing the c-side reticulation edge leaves ((a,b),c)
    got = delete_reticulation_edge(retic_ab_c, Edge(3, 6, 0))
    assert isomorphic(got, triple_ab_c)


def test_delete_reticulation_edge_rejects_tree_edge(triple_ab_c):
    with pytest.raises(MoveError):
        delete_reticulation_edge(triple_ab_c, Edge(1, 2, 0))


def test_delete_reticulation_edge_rejects_missing_edge(retic_ab_c):
    with pytest.raises(MoveError):
        delete_reticulation_edge(retic_ab_c, Edge(0, 7, 0))


def test_delete_reticulation_edge_rejects_reticulation_tail(stack_sibling_host):
    with pytest.raises(MoveError):
        delete_reticulation_edge(stack_sibling_host, Edge(4, 5, 0))


def test_delete_reticulation_edge_keeps_tree_child():
    for seed in range(20):
        n = random_tree_child(4, 2, seed=seed)
        retics = set(n.reticulations())
        for e in n.edges:
            if e.dst in retics:
                assert is_tree_child(delete_reticulation_edge(n, e))


def test_random_tree_child_is_deterministic_and_valid():
    a = random_tree_child(5, 2, seed=7)
    b = random_tree_child(5, 2, seed=7)
    assert a == b
    assert len(a.leaves) == 5
    assert a.reticulation_count == 2
    assert is_tree_child(a)
    assert not network_violations(a.vertices, a.edges, a.root, a.leaf_labels)


def test_random_tree_child_unreachable_count():
    # a single leaf admits no tree-child reticulation insertion
    with pytest.raises(BudgetExceededError):
        random_tree_child(1, 1, seed=0)


def test_random_network_reaches_non_tree_child():
    hit = False
    for seed in range(40):
        n = random_network(2, 2, seed=seed)
        assert count_identity_holds(n)
        if not is_tree_child(n):
            hit = True
    assert hit


def test_enumerate_tree_counts():
    for n_leaves, expected in ((2, 1), (3, 3), (4, 15)):
        nets = list(enumerate_tree_child(n_leaves))
        assert len(nets) == expected == rooted_tree_count(n_leaves)
        sigs = {canonical_signature(t) for t in nets}
        assert len(sigs) == expected
        for t in nets:
            assert t.is_tree
            assert len(t.leaves) == n_leaves


def test_enumerate_tree_child_two_leaves_one_reticulation():
    # worked out by hand: the reticulation feeds one of the two leaves and
    # its parents are the two tree vertices; two labelled variants exist
    nets = list(enumerate_tree_child(2, max_reticulations=1))
    assert len(nets) == 1 + 2
    level1 = [n for n in nets if n.reticulation_count == 1]
    assert len(level1) == 2
    for n in level1:
        assert is_tree_child(n)
        assert count_identity_holds(n)


def test_enumerate_tree_child_one_leaf_has_no_reticulated_level():
    nets = list(enumerate_tree_child(1, max_reticulations=1))
    assert len(nets) == 1
    assert nets[0].is_tree


def test_enumerate_leaf_limit_guard():
    with pytest.raises(ValueError):
        list(enumerate_tree_child(6))
    # explicit limit override works
    assert rooted_tree_count(5) == 105


def test_enumeration_is_deterministic():
    first = [canonical_signature(n) for n in enumerate_tree_child(3, 1)]
    second = [canonical_signature(n) for n in enumerate_tree_child(3, 1)]
    assert first == second
