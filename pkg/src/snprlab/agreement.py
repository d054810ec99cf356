"""Shared digraphs of network pairs, the cut-count measure, and its bounds."""

import itertools
import random
from dataclasses import dataclass
from fractions import Fraction

from .errors import (
    BudgetExceededError,
    ContractViolationError,
    EmbeddingError,
    InvalidDigraphError,
    InvalidNetworkError,
)
from .netcore import (Network, canonical_signature, is_tree_child,
                      random_tree_child)
from .digraphcore import (
    component_violations,
    digraph_signature,
    is_tree_child_digraph,
    validate_component,
    validate_digraph,
    _quotient_with_paths,
)
from .embed import Embedding, cut_size, extend, find_embedding, root_extend
from .snpr import dtc


class AgreementWitness:
    """A digraph displayed by both hosts, with one extension on each side."""

    __slots__ = ("digraph", "embedding_n", "embedding_m",
                 "extension_n", "extension_m", "cut_n", "cut_m")

    def __init__(self, digraph, embedding_n, embedding_m,
                 extension_n, extension_m, cut_n, cut_m):
        self.digraph = digraph
        self.embedding_n = embedding_n
        self.embedding_m = embedding_m
        self.extension_n = extension_n
        self.extension_m = extension_m
        self.cut_n = cut_n
        self.cut_m = cut_m

    @property
    def total(self):
        return self.cut_n + self.cut_m

    def __repr__(self):
        return "<AgreementWitness cut %d+%d on %d taxa>" % (
            self.cut_n, self.cut_m, len(self.digraph.taxa))


@dataclass(frozen=True)
class BoundsReport:
    half_m: Fraction
    d: int
    m: int

    @property
    def holds(self) -> bool:
        return self.half_m <= self.d <= self.m


def candidate_from_edges(n: Network, edge_subset):
    """Read an edge subset of the host as a digraph, or nothing.

    The subgraph keeps every leaf and the root as vertices whether or not
    an edge of the subset touches them. Whenever collapsing its pass-through
    vertices yields well-formed components that assemble into a digraph on
    the host's taxa, the digraph comes back paired with the embedding that
    the subset itself witnesses.
    """
    subset = set(edge_subset)
    stray = subset - set(n.edges)
    if stray:
        raise ContractViolationError(
            "edges %r are not edges of the host" % (sorted(stray),))
    vertices = {v for e in subset for v in (e.src, e.dst)}
    vertices |= set(n.leaves)
    vertices.add(n.root)
    labels = {v: lab for v, lab in n.leaf_labels.items() if v in vertices}

    raw, edge_paths, problems = _quotient_with_paths(
        vertices, subset, n.root, labels)
    if problems:
        return None
    components = []
    for vs, es, labs, r in raw:
        if component_violations(vs, es, labs, r):
            return None
        components.append(validate_component(es, labs, rho=r, vertices=vs))
    try:
        d = validate_digraph(components, n.taxa)
    except InvalidDigraphError:
        return None
    vmap = {v: v for v in d.all_vertices()}
    emap = {e: edge_paths[e] for e in d.all_edges()}
    return d, Embedding(d, n, vmap, emap)


def _check_pair(n: Network, m: Network):
    if n.taxa != m.taxa:
        raise EmbeddingError("leaf sets differ: %r vs %r"
                             % (sorted(n.taxa), sorted(m.taxa)))


def _distinct_candidates(n: Network):
    """Candidate digraphs of n, one per isomorphism class, smallest cut first
    within each exclusion level."""
    edges = list(n.edges)
    seen = set()
    for k in range(len(edges) + 1):
        for dropped in itertools.combinations(range(len(edges)), k):
            gone = set(dropped)
            subset = [e for i, e in enumerate(edges) if i not in gone]
            got = candidate_from_edges(n, subset)
            if got is None:
                continue
            d, emb = got
            sig = digraph_signature(d)
            if sig in seen:
                continue
            seen.add(sig)
            yield d, emb


def _witness(d, emb_n, m: Network, emb_m=None):
    if emb_m is None:
        emb_m = find_embedding(d, m)
        if emb_m is None:
            return None
    n = emb_n.host
    rn = extend(emb_n, n)
    rm = extend(emb_m, m)
    return AgreementWitness(d, emb_n, emb_m, rn, rm,
                            cut_size(n, rn), cut_size(m, rm))


def enumerate_agreement_digraphs(n: Network, m: Network,
                                 tree_child_only: bool = True):
    """Every digraph displayed by both hosts, as a witness stream.

    Deterministic order; one witness per digraph isomorphism class.
    """
    _check_pair(n, m)
    for d, emb in _distinct_candidates(n):
        if tree_child_only and not is_tree_child_digraph(d):
            continue
        w = _witness(d, emb, m)
        if w is not None:
            yield w


def _require_tree_child_pair(n, m):
    for net, side in ((n, "first"), (m, "second")):
        if not is_tree_child(net):
            raise InvalidNetworkError(
                ["%s network is not tree-child" % side])


def mtc(n: Network, m: Network, subset_budget=None):
    """Minimum total cut over the pair's shared tree-child digraphs.

    Returns (count, witness). The witness is the first optimum in
    enumeration order; each side carries a grown extension certifying
    its cut. subset_budget caps how many edge subsets of n are read
    before giving up.
    """
    _require_tree_child_pair(n, m)
    _check_pair(n, m)
    best = None
    best_w = None
    examined = 0
    for d, emb in _distinct_candidates(n):
        examined += 1
        if subset_budget is not None and examined > subset_budget:
            raise BudgetExceededError(
                "stopped after %d candidate digraphs" % (examined - 1))
        if not is_tree_child_digraph(d):
            continue
        rn = extend(emb, n)
        cut_n = cut_size(n, rn)
        if best is not None and cut_n >= best:
            continue
        emb_m = find_embedding(d, m)
        if emb_m is None:
            continue
        rm = extend(emb_m, m)
        cut_m = cut_size(m, rm)
        total = cut_n + cut_m
        if best is None or total < best:
            best = total
            best_w = AgreementWitness(d, emb, emb_m, rn, rm, cut_n, cut_m)
            if best == 0:
                break
    if best_w is None:
        # the all-singletons digraph is displayed by every network pair
        raise ContractViolationError("no shared digraph found")
    _cross_check_root_cuts(n, m, best_w)
    return best, best_w


def _cross_check_root_cuts(n, m, w):
    # both hosts are tree-child, so root-only growth must agree on the cuts
    for net, emb, cut in ((n, w.embedding_n, w.cut_n),
                          (m, w.embedding_m, w.cut_m)):
        root_cut = cut_size(net, root_extend(emb, net))
        if root_cut != cut:
            raise ContractViolationError(
                "root extension cut %d disagrees with %d" % (root_cut, cut))


def check_bounds(n: Network, m: Network, cap=None) -> BoundsReport:
    """Certify half-measure <= distance <= measure for one pair."""
    measure, _ = mtc(n, m)
    # meeting in the middle changes nothing about the weight, only the time
    d, _ = dtc(n, m, reticulation_cap=cap, witness=False, bidirectional=True)
    return BoundsReport(half_m=Fraction(measure, 2), d=d, m=measure)


# ---------------------------------------------------------------------------
# independent tree-pair oracle, no digraph machinery involved


_RHO = "\x00root"  # taxa are printable names, so this cannot collide


def _partitions(items):
    if not items:
        yield []
        return
    head, rest = items[0], items[1:]
    for part in _partitions(rest):
        for i in range(len(part)):
            yield part[:i] + [part[i] + [head]] + part[i + 1:]
        yield part + [[head]]


def _tree_maps(t: Network):
    parent = {}
    depth = {t.root: 0}
    order = [t.root]
    while order:
        v = order.pop()
        for e in t.out_edges(v):
            parent[e.dst] = v
            depth[e.dst] = depth[v] + 1
            order.append(e.dst)
    return parent, depth


def _block_span(t, parent, depth, block):
    """Vertices and suppressed shape of one block's spanning subtree."""
    leaves = {t.leaf_of_label(lab): lab for lab in block if lab != _RHO}
    anchored = _RHO in block
    if anchored:
        anchor = t.root
    else:
        cur = set(leaves)
        while len(cur) > 1:
            deepest = max(cur, key=lambda v: (depth[v], v))
            cur.discard(deepest)
            cur.add(parent[deepest])
        anchor = cur.pop()
    span = {anchor}
    kids = {}
    for lf in leaves:
        v = lf
        while v != anchor:
            p = parent[v]
            if v not in kids.setdefault(p, []):
                kids[p].append(v)
            if v in span:
                break
            span.add(v)
            v = p

    def shp(v):
        below = tuple(sorted(shp(w) for w in kids.get(v, ())))
        if v in leaves:
            return ("leaf", leaves[v])
        if len(below) == 1:
            return below[0]
        return ("node",) + below

    if anchored:
        return span, ("anchor",) + tuple(sorted(shp(w) for w in kids.get(anchor, ())))
    return span, shp(anchor)


def maf_rspr(t: Network, u: Network) -> int:
    """Prune-regraft distance between two trees by forest enumeration.

    Exhaustive over partitions of the taxa plus a root marker: a partition
    agrees when each part spans the same suppressed shape in both trees and
    the spanned regions are vertex-disjoint within each tree. The answer is
    the smallest agreeing part count minus one.
    """
    for net, side in ((t, "first"), (u, "second")):
        if net.reticulation_count:
            raise InvalidNetworkError(
                ["%s input has reticulations" % side])
    _check_pair(t, u)
    maps_t = _tree_maps(t)
    maps_u = _tree_maps(u)
    labels = [_RHO] + sorted(t.taxa)

    best = None
    for part in _partitions(labels):
        if best is not None and len(part) >= best:
            continue
        ok = True
        for net, (parent, depth) in ((t, maps_t), (u, maps_u)):
            used = set()
            shapes = []
            for block in part:
                span, shape = _block_span(net, parent, depth, block)
                if used & span:
                    ok = False
                    break
                used |= span
                shapes.append(shape)
            if not ok:
                break
            if net is t:
                shapes_t = shapes
            elif shapes != shapes_t:
                ok = False
        if ok:
            best = len(part)
    return best - 1


def _measure_at_least(n, m, floor):
    """Exact measure of the pair, or nothing once it drops below floor."""
    best = None
    for d, emb in _distinct_candidates(n):
        if not is_tree_child_digraph(d):
            continue
        cn = cut_size(n, extend(emb, n))
        if best is not None and cn >= best:
            continue
        em = find_embedding(d, m)
        if em is None:
            continue
        total = cn + cut_size(m, extend(em, m))
        if best is None or total < best:
            best = total
            if best < floor:
                return None
    return best


def _leaf_tail_moves(n):
    from .snpr import enumerate_moves

    leaves = set(n.leaves)
    for mv, succ in enumerate_moves(n, tree_child_only=True):
        if mv.kind == "pm" and mv.edge.dst in leaves:
            yield mv, succ


def gap_witness_search(n_leaves, r, budget, seed=0):
    """Hunt for a pair whose distance sits strictly below the measure.

    Walks random tree-child networks and their double leaf prune-regraft
    neighbours. Such a pair is at most two tail moves apart, so a measure
    of five or more already pins the distance: the halved measure pushes
    it above two, equal reticulation counts force it even, and the two
    moves bound it by four. The final report recomputes both numbers from
    scratch anyway. budget counts candidate pairs; nothing comes back
    once it runs out.
    """
    rng = random.Random(seed)
    left = budget
    while left > 0:
        base = random_tree_child(n_leaves, r, seed=rng.randrange(2 ** 30))
        base_sig = canonical_signature(base)
        seen = set()
        for mv1, s1 in _leaf_tail_moves(base):
            pruned = base.leaf_labels[mv1.edge.dst]
            for mv2, s2 in _leaf_tail_moves(s1):
                if s1.leaf_labels[mv2.edge.dst] == pruned:
                    continue
                sig = canonical_signature(s2)
                if sig == base_sig or sig in seen:
                    continue
                seen.add(sig)
                if left <= 0:
                    return None
                left -= 1
                if _measure_at_least(base, s2, floor=5) is None:
                    continue
                report = check_bounds(base, s2)
                if report.holds and report.d < report.m:
                    return base, s2, report
    return None
