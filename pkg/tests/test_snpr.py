import pytest

from snprlab.errors import (BudgetExceededError, ContractViolationError,
                            InvalidNetworkError, MoveError)
from snprlab.netcore import (Edge, canonical_signature, is_tree_child,
                             isomorphic, random_tree_child, validate)
from snprlab.snpr import (Move, MoveSequence, NeighborCache, apply_move,
                          apply_move_detailed, dtc, enforce_global_assumption,
                          enumerate_moves, moves_from_json, moves_to_json,
                          normalize_sequence, sequence_weight, _find_move_to)


@pytest.fixture
def leaf_a():
    return validate([(0, 1)], {1: "a"})


# --- apply_move -------------------------------------------------------------

def test_minus_choices_on_reticulated_triple(retic_ab_c, triple_a_bc, triple_ab_c):
    # deleting either reticulation edge collapses to one of two triples
    out1 = apply_move(retic_ab_c, Move("minus", Edge(2, 6)))
    assert isomorphic(out1, triple_a_bc)
    out2 = apply_move(retic_ab_c, Move("minus", Edge(3, 6)))
    assert isomorphic(out2, triple_ab_c)
    assert out1.reticulation_count == 0


def test_minus_rejects_non_reticulation_edge(retic_ab_c):
    with pytest.raises(MoveError):
        apply_move(retic_ab_c, Move("minus", Edge(2, 4)))


def test_minus_rejects_reticulation_tail(stack_sibling_host):
    # (4,5) heads a reticulation but its tail is one too
    with pytest.raises(MoveError):
        apply_move(stack_sibling_host, Move("minus", Edge(4, 5)))


def test_move_edge_must_exist(triple_ab_c):
    with pytest.raises(MoveError):
        apply_move(triple_ab_c, Move("minus", Edge(9, 9)))


def test_pm_relocates_leaf(triple_ab_c, triple_ac_b):
    # detach b, regraft above the a-c cherry that remains
    out = apply_move(triple_ab_c, Move("pm", Edge(2, 4), Edge(0, 1)))
    assert isomorphic(out, triple_ac_b)


def test_pm_rejects_descendant_target(triple_ab_c):
    with pytest.raises(MoveError):
        apply_move(triple_ab_c, Move("pm", Edge(1, 2), Edge(2, 3)))


def test_pm_target_may_name_merged_edge(triple_ab_c):
    # (2,3) survives suppression of 2 only as part of the merged edge
    out = apply_move(triple_ab_c, Move("pm", Edge(2, 4), Edge(2, 3)))
    assert isomorphic(out, triple_ab_c)


def test_pm_rejects_root_source(triple_ab_c):
    with pytest.raises(MoveError):
        apply_move(triple_ab_c, Move("pm", Edge(0, 1), Edge(2, 3)))


def test_plus_adds_reticulation(triple_ab_c):
    out = apply_move(triple_ab_c, Move("plus", Edge(2, 3), Edge(1, 5)))
    assert out.reticulation_count == 1
    assert len(out.edges) == len(triple_ab_c.edges) + 3
    assert is_tree_child(out)
    assert out.taxa == triple_ab_c.taxa


def test_plus_on_same_edge_makes_parallel_pair(triple_ab_c):
    out = apply_move(triple_ab_c, Move("plus", Edge(2, 3), Edge(2, 3)))
    assert out.reticulation_count == 1
    assert not is_tree_child(out)
    pairs = {(e.src, e.dst) for e in out.edges}
    assert len(pairs) == len(out.edges) - 1  # exactly one parallel pair


def test_plus_rejects_descendant_tail(triple_ab_c):
    with pytest.raises(MoveError):
        apply_move(triple_ab_c, Move("plus", Edge(1, 2), Edge(2, 3)))


def test_plus_then_minus_on_created_edge_restores(triple_ab_c):
    detail = apply_move_detailed(triple_ab_c,
                                 Move("plus", Edge(2, 3), Edge(1, 5)))
    created = [e for e in detail.network.edges
               if detail.origin_of[e] == ("new",)]
    assert len(created) == 1
    back = apply_move(detail.network, Move("minus", created[0]))
    assert isomorphic(back, triple_ab_c)


def test_move_kind_and_target_validation():
    with pytest.raises(MoveError):
        Move("swap", Edge(0, 1))
    with pytest.raises(MoveError):
        Move("minus", Edge(0, 1), Edge(1, 2))
    with pytest.raises(MoveError):
        Move("pm", Edge(0, 1))
    with pytest.raises(MoveError):
        Move("plus", Edge(0, 1))


# --- enumerate_moves --------------------------------------------------------

def test_tree_has_no_minus_moves(triple_ab_c):
    kinds = {mv.kind for mv, _ in enumerate_moves(triple_ab_c, False)}
    assert "minus" not in kinds
    assert kinds == {"pm", "plus"}


def test_pm_neighborhood_of_triple_covers_other_triples(
        triple_ab_c, triple_ac_b, triple_a_bc):
    sigs = {canonical_signature(succ)
            for mv, succ in enumerate_moves(triple_ab_c)
            if mv.kind == "pm"}
    assert canonical_signature(triple_ac_b) in sigs
    assert canonical_signature(triple_a_bc) in sigs


def test_enumerate_successors_are_valid_and_filtered(retic_ab_c):
    seen = set()
    for mv, succ in enumerate_moves(retic_ab_c, tree_child_only=True):
        assert is_tree_child(succ)
        assert succ.taxa == retic_ab_c.taxa
        key = (mv.kind, mv.edge, mv.target)
        assert key not in seen
        seen.add(key)
    assert seen


def test_enumerate_is_deterministic(retic_ab_c):
    a = [(mv, canonical_signature(s)) for mv, s in enumerate_moves(retic_ab_c)]
    b = [(mv, canonical_signature(s)) for mv, s in enumerate_moves(retic_ab_c)]
    assert a == b


def test_single_edge_network_has_one_unfiltered_move(leaf_a):
    got = list(enumerate_moves(leaf_a, tree_child_only=False))
    assert len(got) == 1
    mv, succ = got[0]
    assert mv.kind == "plus" and mv.edge == mv.target
    assert not is_tree_child(succ)
    # and the tree-child filter removes it
    assert list(enumerate_moves(leaf_a, tree_child_only=True)) == []


def test_every_move_reverses(triple_ab_c, retic_ab_c):
    for i, (mv, succ) in enumerate(enumerate_moves(triple_ab_c, False)):
        assert any(isomorphic(back, triple_ab_c)
                   for _, back in enumerate_moves(succ, False)), mv
    sampled = list(enumerate_moves(retic_ab_c, False))[::3]
    for mv, succ in sampled:
        assert any(isomorphic(back, retic_ab_c)
                   for _, back in enumerate_moves(succ, False)), mv


def test_minus_keeps_tree_child(retic_ab_c):
    for seed in range(6):
        n = random_tree_child(4, 2, seed=seed)
        for mv, succ in enumerate_moves(n, tree_child_only=False):
            if mv.kind == "minus":
                assert is_tree_child(succ)


# --- sequences and weights --------------------------------------------------

def test_sequence_weight_mixed(retic_ab_c):
    first = Move("minus", Edge(3, 6))
    mid = apply_move(retic_ab_c, first)
    second = next(mv for mv, _ in enumerate_moves(mid) if mv.kind == "pm")
    s = MoveSequence(retic_ab_c, [first, second])
    assert sequence_weight(s) == 3
    assert len(s.networks) == 3


def test_sequence_weight_empty(triple_ab_c):
    assert sequence_weight(MoveSequence(triple_ab_c)) == 0


def test_sequence_weight_four_additions(triple_ab_c):
    cur = triple_ab_c
    moves = []
    for _ in range(4):
        mv, cur = next(m for m in enumerate_moves(cur, tree_child_only=False)
                       if m[0].kind == "plus")
        moves.append(mv)
    s = MoveSequence(triple_ab_c, moves)
    assert sequence_weight(s) == 4
    assert s.end.reticulation_count == 4


def test_moves_json_roundtrip(retic_ab_c):
    s = MoveSequence(retic_ab_c, [Move("pm", Edge(2, 6), Edge(3, 5))])
    text = moves_to_json(s)
    s2 = moves_from_json(text)
    assert [canonical_signature(x) for x in s2.networks] == \
           [canonical_signature(x) for x in s.networks]
    with pytest.raises(MoveError):
        moves_from_json('{"format": "other"}')


# --- global assumption ------------------------------------------------------

def test_global_assumption_noop(triple_ab_c, triple_ac_b):
    s = MoveSequence(triple_ab_c, [Move("pm", Edge(2, 4), Edge(0, 1))])
    assert enforce_global_assumption(s) is s


def test_global_assumption_splits_offending_pm(retic_ab_c):
    # this pm deletes reticulation edge (2,6)
    s = MoveSequence(retic_ab_c, [Move("pm", Edge(2, 6), Edge(3, 5))])
    out = enforce_global_assumption(s)
    assert [mv.kind for mv in out.moves] == ["minus", "plus"]
    assert sequence_weight(out) == sequence_weight(s) == 2
    assert isomorphic(out.end, s.end)
    assert out.start is s.start
    # postcondition: nothing left to rewrite
    assert enforce_global_assumption(out) is out


# --- normalization ----------------------------------------------------------

def test_normalize_drops_inverse_pair(triple_ab_c):
    detail = apply_move_detailed(triple_ab_c,
                                 Move("plus", Edge(2, 3), Edge(1, 5)))
    created = [e for e in detail.network.edges
               if detail.origin_of[e] == ("new",)][0]
    s = MoveSequence(triple_ab_c,
                     [Move("plus", Edge(2, 3), Edge(1, 5)),
                      Move("minus", created)])
    assert isomorphic(s.end, triple_ab_c)
    out = normalize_sequence(s)
    assert len(out.moves) == 0
    assert isomorphic(out.end, s.end)


def test_normalize_merges_add_then_delete_to_single_pm(triple_ab_c, triple_ac_b):
    detail = apply_move_detailed(triple_ab_c,
                                 Move("plus", Edge(2, 3), Edge(1, 5)))
    mid = detail.network
    # delete the other edge into the new reticulation, landing at a
    # different tree than the start
    minus = next(mv for mv, succ in enumerate_moves(mid)
                 if mv.kind == "minus" and isomorphic(succ, triple_ac_b))
    s = MoveSequence(triple_ab_c, [Move("plus", Edge(2, 3), Edge(1, 5)), minus])
    out = normalize_sequence(s)
    assert [mv.kind for mv in out.moves] == ["pm"]
    assert sequence_weight(out) == 2
    assert isomorphic(out.end, triple_ac_b)


def test_normalize_rejects_non_tree_child_intermediate(triple_ab_c):
    s = MoveSequence(triple_ab_c, [Move("plus", Edge(2, 3), Edge(2, 3))])
    with pytest.raises(MoveError):
        normalize_sequence(s)


def test_normalize_random_walks(retic_ab_c, triple_ab_c):
    import random
    for seed in range(10):
        rng = random.Random(seed)
        start = retic_ab_c if seed % 2 else triple_ab_c
        cur, moves = start, []
        for _ in range(rng.randrange(2, 5)):
            options = list(enumerate_moves(cur, tree_child_only=True))
            if not options:
                break
            mv, cur = rng.choice(options)
            moves.append(mv)
        s = MoveSequence(start, moves)
        out = normalize_sequence(s)
        assert sequence_weight(out) <= sequence_weight(s)
        assert isomorphic(out.end, s.end)
        kinds = [mv.kind for mv in out.moves]
        if "minus" in kinds:
            last_minus = len(kinds) - 1 - kinds[::-1].index("minus")
            assert all(k == "minus" for k in kinds[:last_minus + 1])
        for net in out.networks:
            assert is_tree_child(net)


# --- dtc --------------------------------------------------------------------

def test_dtc_isomorphic_is_zero(triple_ab_c):
    shifted = validate([(10, 11), (11, 12), (11, 15), (12, 13), (12, 14)],
                       {13: "a", 14: "b", 15: "c"})
    w, s = dtc(triple_ab_c, shifted)
    assert w == 0
    assert len(s.moves) == 0


def test_dtc_between_triples_is_two(triple_ab_c, triple_ac_b):
    w, s = dtc(triple_ab_c, triple_ac_b)
    assert w == 2
    assert sequence_weight(s) == 2
    assert isomorphic(s.end, triple_ac_b)
    assert s.start is triple_ab_c
    for net in s.networks:
        assert is_tree_child(net)


def test_dtc_single_deletion(retic_ab_c, triple_a_bc):
    w, s = dtc(retic_ab_c, triple_a_bc)
    assert w == 1
    assert [mv.kind for mv in s.moves] == ["minus"]
    assert isomorphic(s.end, triple_a_bc)


def test_dtc_symmetry_and_cache_reuse(retic_ab_c, triple_a_bc, triple_ab_c):
    cache = NeighborCache()
    pairs = [(retic_ab_c, triple_a_bc), (triple_ab_c, triple_a_bc),
             (retic_ab_c, triple_ab_c)]
    for a, b in pairs:
        wab, _ = dtc(a, b, cache=cache)
        wba, _ = dtc(b, a, cache=cache)
        assert wab == wba


def test_dtc_cap_sensitivity(triple_ab_c, triple_ac_b, retic_ab_c, triple_a_bc):
    for a, b in [(triple_ab_c, triple_ac_b), (retic_ab_c, triple_a_bc)]:
        base = max(a.reticulation_count, b.reticulation_count)
        w1, _ = dtc(a, b, reticulation_cap=base + 1, witness=False)
        w2, _ = dtc(a, b, reticulation_cap=base + 2, witness=False)
        assert w1 == w2


def test_dtc_cap_below_inputs(retic_ab_c, triple_ab_c):
    with pytest.raises(MoveError):
        dtc(retic_ab_c, triple_ab_c, reticulation_cap=0)


def test_dtc_budget_exhaustion(triple_ab_c, triple_ac_b):
    with pytest.raises(BudgetExceededError):
        dtc(triple_ab_c, triple_ac_b, budget=0)


def test_dtc_rejects_bad_inputs(parallel_one_leaf, leaf_a, triple_ab_c):
    with pytest.raises(InvalidNetworkError):
        dtc(parallel_one_leaf, leaf_a)
    two = validate([(0, 1), (1, 2), (1, 3)], {2: "a", 3: "b"})
    with pytest.raises(InvalidNetworkError):
        dtc(triple_ab_c, two)


def test_dtc_unsafe_space(parallel_one_leaf, leaf_a):
    w, s = dtc(parallel_one_leaf, leaf_a, tree_child_only=False)
    assert w == 1
    assert [mv.kind for mv in s.moves] == ["minus"]


def test_dtc_bidirectional_agrees(triple_ab_c, triple_ac_b, retic_ab_c,
                                  triple_a_bc):
    for a, b in [(triple_ab_c, triple_ac_b), (retic_ab_c, triple_a_bc),
                 (retic_ab_c, triple_ac_b)]:
        w_uni, _ = dtc(a, b)
        w_bi, s_bi = dtc(a, b, bidirectional=True)
        assert w_bi == w_uni
        assert sequence_weight(s_bi) == w_bi
        assert isomorphic(s_bi.end, b)
        for net in s_bi.networks:
            assert is_tree_child(net)


def test_dtc_metric_on_random_corpus():
    nets = [random_tree_child(3, r, seed=s) for r in (0, 1) for s in (0, 1)]
    cache = NeighborCache()
    d = {}
    for i, a in enumerate(nets):
        for j, b in enumerate(nets):
            if i <= j:
                w, _ = dtc(a, b, cache=cache, witness=False)
                d[i, j] = d[j, i] = w
                if i == j:
                    assert w == 0
    for i in range(len(nets)):
        for j in range(len(nets)):
            for k in range(len(nets)):
                assert d[i, j] <= d[i, k] + d[k, j]


def test_find_move_to_contract(triple_ab_c, triple_ac_b):
    with pytest.raises(ContractViolationError):
        _find_move_to(triple_ab_c, "minus", canonical_signature(triple_ac_b))
