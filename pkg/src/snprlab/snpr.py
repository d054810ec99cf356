"""Rearrangement moves on rooted binary networks and exact move distances.

Three move kinds operate on a network:

  "minus"  delete a reticulation edge (u,v), where u is a tree vertex,
           and suppress both resulting degree-two vertices; weight 1.
  "plus"   subdivide an edge with a fresh reticulation head, subdivide a
           second edge with a fresh tail, and join tail to head; weight 1.
  "pm"     delete an edge (u,v) whose source u is a tree vertex, suppress
           u, then reattach v underneath any surviving edge; weight 2
           (one deletion plus one addition).

The regraft/attachment target must not be a descendant of the moved
subtree's head, otherwise the added edge would close a directed cycle.

`dtc` computes the exact minimum total weight over move sequences whose
every intermediate network is tree-child, by uniform-cost search on
canonical signatures.
"""

from dataclasses import dataclass
import heapq
import json
from typing import Optional

from .errors import (BudgetExceededError, ContractViolationError,
                     InvalidNetworkError, MoveError)
from .netcore import Edge, Network, canonical_signature, is_tree_child

WEIGHTS = {"minus": 1, "plus": 1, "pm": 2}

# kind of the move that undoes a move of the keyed kind
REVERSE_KIND = {"pm": "pm", "minus": "plus", "plus": "minus"}


def _as_edge(value) -> Edge:
    if isinstance(value, Edge):
        return value
    return Edge(*value)


@dataclass(frozen=True)
class Move:
    """One rearrangement step.

    kind    "minus", "plus", or "pm".
    edge    the deleted edge, or for "plus" the edge that receives the
            new reticulation head.
    target  for "pm" the regraft edge in the network after deletion and
            suppression (original edges of the input network serve as
            names; an edge merged away by the suppression is named by
            the out-edge of the suppressed vertex). For "plus" the edge
            that receives the new tail; naming the head edge itself
            means its upper half, which creates a parallel pair.
    """
    kind: str
    edge: Edge
    target: Optional[Edge] = None

    def __post_init__(self):
        if self.kind not in WEIGHTS:
            raise MoveError("unknown move kind %r" % (self.kind,))
        object.__setattr__(self, "edge", _as_edge(self.edge))
        if self.target is not None:
            object.__setattr__(self, "target", _as_edge(self.target))
        if self.kind == "minus" and self.target is not None:
            raise MoveError("minus moves take no target edge")
        if self.kind in ("pm", "plus") and self.target is None:
            raise MoveError("%s moves need a target edge" % self.kind)


class ApplyResult:
    """A move's outcome plus the bookkeeping needed to chase edges through it.

    vertex_map sends surviving pre-move vertex ids to post-move ids.
    origin_of keys every post-move edge by how it arose: ("kept", e),
    ("merged", (...)), ("upper"/"lower", ...) halves of a subdivision,
    or ("new",).
    """

    __slots__ = ("network", "vertex_map", "origin_of", "new_vertices")

    def __init__(self, network, vertex_map, origin_of, new_vertices):
        self.network = network
        self.vertex_map = vertex_map
        self.origin_of = origin_of
        self.new_vertices = new_vertices


def apply_move_detailed(n: Network, move: Move) -> ApplyResult:
    from .netcore import _Builder

    e = move.edge
    if e not in set(n.edges):
        raise MoveError("edge %r is not an edge of the network" % (e,))
    b = _Builder(n)

    if move.kind == "minus":
        u, v = e.src, e.dst
        if n.in_degree(v) != 2:
            raise MoveError("edge %r is not a reticulation edge" % (e,))
        if not (n.in_degree(u) == 1 and n.out_degree(u) == 2):
            raise MoveError("source of %r is not a tree vertex" % (e,))
        b.delete_edge(b.resolve(e))
        b.suppress(u)
        b.suppress(v)

    elif move.kind == "pm":
        u, v = e.src, e.dst
        if not (n.in_degree(u) == 1 and n.out_degree(u) == 2):
            raise MoveError("source of %r is not a tree vertex" % (e,))
        b.delete_edge(b.resolve(e))
        b.suppress(u)
        eid_f = b.resolve(move.target)
        if b.src[eid_f] in n.reachable_from(v):
            raise MoveError("target %r is a descendant of the moved subtree"
                            % (move.target,))
        mid, _, _ = b.subdivide(eid_f)
        b.add_edge(mid, v)

    else:  # plus
        head_mid, upper, _ = b.subdivide(b.resolve(e))
        if move.target == e:
            eid_2 = upper
        else:
            if move.target not in set(n.edges):
                raise MoveError("edge %r is not an edge of the network"
                                % (move.target,))
            if move.target.src in n.reachable_from(e.dst):
                raise MoveError("target %r is a descendant of the new "
                                "reticulation" % (move.target,))
            eid_2 = b.resolve(move.target)
        tail_mid, _, _ = b.subdivide(eid_2)
        b.add_edge(tail_mid, head_mid)

    net, vmap, origin_of = b.to_network()
    new_vs = tuple(vmap[v] for v in b.new_vertex_ids)
    return ApplyResult(net, vmap, origin_of, new_vs)


def apply_move(n: Network, move: Move) -> Network:
    return apply_move_detailed(n, move).network


def enumerate_moves(n: Network, tree_child_only: bool = True):
    """Yield every legal (Move, successor) pair exactly once.

    Order is deterministic: all minus moves, then pm, then plus, each
    block sorted by edge tuples. When tree_child_only is set, successors
    failing the tree-child condition are dropped (the moves themselves
    are still legal in the wider space).
    """
    edges = sorted(n.edges)
    retics = n.reticulations()

    def emit(move):
        succ = apply_move(n, move)
        if tree_child_only and not is_tree_child(succ):
            return None
        return move, succ

    for e in edges:
        if e.dst in retics and n.in_degree(e.src) == 1 and n.out_degree(e.src) == 2:
            got = emit(Move("minus", e))
            if got:
                yield got

    for e in edges:
        u, v = e.src, e.dst
        if not (n.in_degree(u) == 1 and n.out_degree(u) == 2):
            continue
        parent_edge = n.in_edges(u)[0]
        other_child = next(f for f in n.out_edges(u) if f != e)
        blocked = n.reachable_from(v)
        for t in edges:
            if t == e or t == parent_edge:
                continue
            # the out-edge of u doubles as the name of the merged edge
            src_eff = parent_edge.src if t == other_child else t.src
            if src_eff in blocked:
                continue
            got = emit(Move("pm", e, t))
            if got:
                yield got

    for e1 in edges:
        blocked = n.reachable_from(e1.dst)
        for e2 in edges:
            if e2 != e1 and e2.src in blocked:
                continue
            got = emit(Move("plus", e1, e2))
            if got:
                yield got


class MoveSequence:
    """A start network and the moves applied to it, in order."""

    def __init__(self, start: Network, moves=()):
        self.start = start
        self.moves = tuple(moves)
        self._networks = None

    @property
    def networks(self):
        """All t+1 networks along the sequence, first is the start."""
        if self._networks is None:
            nets = [self.start]
            for mv in self.moves:
                nets.append(apply_move(nets[-1], mv))
            self._networks = nets
        return self._networks

    @property
    def end(self) -> Network:
        return self.networks[-1]

    def __len__(self):
        return len(self.moves)

    def __repr__(self):
        return "MoveSequence(%d moves, weight %d)" % (
            len(self.moves), sequence_weight(self))


def sequence_weight(s: MoveSequence) -> int:
    return sum(WEIGHTS[mv.kind] for mv in s.moves)


def moves_to_json(s: MoveSequence) -> str:
    from .phyloio import write_pnd

    records = []
    for mv in s.moves:
        rec = {"kind": mv.kind, "edge": list(mv.edge)}
        rec["target"] = list(mv.target) if mv.target is not None else None
        records.append(rec)
    doc = {"format": "snprlab-moves-1", "start": write_pnd(s.start),
           "moves": records}
    return json.dumps(doc, indent=1)


def moves_from_json(text: str) -> MoveSequence:
    from .phyloio import parse_pnd

    doc = json.loads(text)
    if doc.get("format") != "snprlab-moves-1":
        raise MoveError("unrecognised move document format %r"
                        % (doc.get("format"),))
    start = parse_pnd(doc["start"])
    moves = []
    for rec in doc["moves"]:
        target = rec.get("target")
        moves.append(Move(rec["kind"], Edge(*rec["edge"]),
                          Edge(*target) if target is not None else None))
    return MoveSequence(start, moves)


def _find_move_to(n: Network, kind: str, target_sig: bytes,
                  tree_child_only: bool = False):
    """First enumerated move of the given kind whose successor has the
    wanted signature. Enumeration order makes the pick deterministic."""
    for move, succ in enumerate_moves(n, tree_child_only=tree_child_only):
        if move.kind == kind and canonical_signature(succ) == target_sig:
            return move, succ
    raise ContractViolationError(
        "no %s move reaches the required network; the rewrite guaranteed "
        "by the underlying theory was not found" % kind)


def _rebuild_tail(current: Network, old_moves, old_networks):
    """Re-express a move suffix against a replacement starting network.

    old_networks[i+1] is the network the i-th old move produced; the new
    moves reach the same isomorphism classes from `current`.
    """
    rebuilt = []
    for i, mv in enumerate(old_moves):
        want = canonical_signature(old_networks[i + 1])
        found, current = _find_move_to(current, mv.kind, want)
        rebuilt.append(found)
    return rebuilt


def enforce_global_assumption(s: MoveSequence) -> MoveSequence:
    """Split every pm move that deletes a reticulation edge into a minus
    followed by a plus reaching the same network, preserving total weight."""
    nets = s.networks
    for i, mv in enumerate(s.moves):
        if mv.kind != "pm":
            continue
        cur = nets[i]
        if cur.in_degree(mv.edge.dst) != 2:
            continue
        minus = Move("minus", mv.edge)
        after_minus = apply_move(cur, minus)
        plus, after_plus = _find_move_to(
            after_minus, "plus", canonical_signature(nets[i + 1]))
        tail = _rebuild_tail(after_plus, s.moves[i + 1:], nets[i + 1:])
        replaced = MoveSequence(s.start,
                                list(s.moves[:i]) + [minus, plus] + tail)
        return enforce_global_assumption(replaced)
    return s


def _first_inversion(moves):
    for i in range(len(moves) - 1):
        if moves[i].kind in ("plus", "pm") and moves[i + 1].kind == "minus":
            return i
    return None


def normalize_sequence(s: MoveSequence) -> MoveSequence:
    """Push deletions to the front of a tree-child sequence.

    Repeatedly rewrites an adjacent (plus-or-pm, minus) pair: drop both
    when the flanking networks agree, collapse to a single move when one
    suffices, otherwise swap the pair to (minus, plus-or-pm). Endpoints
    are preserved up to isomorphism and the weight never increases. The
    fixpoint has every minus before every plus and pm.

    Raises ContractViolationError if no rewrite applies to a pair; on
    tree-child input satisfying the reticulation-deleting-pm ban (which
    this function first enforces) that would signal a bug, since the
    rewrites are guaranteed to exist.
    """
    for i, net in enumerate(s.networks):
        if not is_tree_child(net):
            raise MoveError("network %d in the sequence is not tree-child" % i)
    s = enforce_global_assumption(s)

    while True:
        i = _first_inversion(s.moves)
        if i is None:
            return s
        nets = s.networks
        first = s.moves[i]
        a, c = nets[i], nets[i + 2]
        sig_c = canonical_signature(c)
        tail_moves, tail_nets = s.moves[i + 2:], nets[i + 2:]

        if canonical_signature(a) == sig_c:
            tail = _rebuild_tail(a, tail_moves, tail_nets)
            s = MoveSequence(s.start, list(s.moves[:i]) + tail)
            continue

        single_kind = "pm" if first.kind == "plus" else "minus"
        try:
            mv, after = _find_move_to(a, single_kind, sig_c,
                                      tree_child_only=True)
        except ContractViolationError:
            mv = None
        if mv is not None:
            tail = _rebuild_tail(after, tail_moves, tail_nets)
            s = MoveSequence(s.start, list(s.moves[:i]) + [mv] + tail)
            continue

        swapped = None
        for minus_mv, mid in enumerate_moves(a, tree_child_only=True):
            if minus_mv.kind != "minus":
                continue
            try:
                second, after = _find_move_to(mid, first.kind, sig_c,
                                              tree_child_only=True)
            except ContractViolationError:
                continue
            swapped = [minus_mv, second]
            break
        if swapped is None:
            raise ContractViolationError(
                "no rewrite applies to the move pair at position %d" % i)
        tail = _rebuild_tail(after, tail_moves, tail_nets)
        s = MoveSequence(s.start, list(s.moves[:i]) + swapped + tail)


class NeighborCache:
    """Memo of move neighborhoods keyed by canonical signature.

    Stores one representative network per signature and, per (signature,
    filter mode), the successor signatures with move kind, weight, and
    reticulation count. Entries ignore any reticulation cap so a cache
    can be shared between searches with different caps.
    """

    def __init__(self):
        self.rep = {}
        self._succ = {}

    def representative(self, sig: bytes, net: Network = None) -> Network:
        if sig not in self.rep:
            if net is None:
                raise KeyError("no representative known for signature")
            self.rep[sig] = net
        return self.rep[sig]

    def successors(self, sig: bytes, tree_child_only: bool = True):
        key = (sig, tree_child_only)
        if key not in self._succ:
            rep = self.rep[sig]
            seen = []
            for move, succ in enumerate_moves(rep, tree_child_only):
                ssig = canonical_signature(succ)
                self.rep.setdefault(ssig, succ)
                seen.append((ssig, move.kind, WEIGHTS[move.kind],
                             succ.reticulation_count))
            self._succ[key] = tuple(seen)
        return self._succ[key]


def _check_dtc_inputs(n, m, reticulation_cap, tree_child_only):
    if tree_child_only:
        for name, net in (("first", n), ("second", m)):
            if not is_tree_child(net):
                raise InvalidNetworkError(
                    ["%s network is not tree-child" % name])
    if n.taxa != m.taxa:
        raise InvalidNetworkError(["networks are on different leaf sets"])
    floor = max(n.reticulation_count, m.reticulation_count)
    cap = reticulation_cap if reticulation_cap is not None else floor + 1
    if cap < floor:
        raise MoveError("reticulation cap %d is below the inputs' maximum %d"
                        % (cap, floor))
    return cap


def _dijkstra(source_sig, target_sig, cache, cap, budget, tree_child_only):
    dist = {source_sig: 0}
    parent = {source_sig: None}
    heap = [(0, source_sig)]
    expansions = 0
    while heap:
        d, sig = heapq.heappop(heap)
        if d > dist.get(sig, d):
            continue
        if sig == target_sig:
            return d, parent
        if budget is not None and expansions >= budget:
            raise BudgetExceededError(
                "distance search exceeded the expansion budget (%d)" % budget)
        expansions += 1
        for ssig, kind, w, retics in cache.successors(sig, tree_child_only):
            if retics > cap:
                continue
            nd = d + w
            if nd < dist.get(ssig, nd + 1):
                dist[ssig] = nd
                parent[ssig] = (sig, kind)
                heapq.heappush(heap, (nd, ssig))
    raise ContractViolationError(
        "search space exhausted without reaching the target; the move "
        "space at this reticulation cap should be connected")


def _bidirectional(sig_n, sig_m, cache, cap, budget, tree_child_only):
    # two frontiers over the same undirected weighted signature graph;
    # edge weights agree in both directions because every move reverses
    # at matching weight
    dist = ({sig_n: 0}, {sig_m: 0})
    parent = ({sig_n: None}, {sig_m: None})
    heaps = ([(0, sig_n)], [(0, sig_m)])
    settled = (set(), set())
    best = None
    meet = None
    expansions = 0
    while heaps[0] and heaps[1]:
        tops = [h[0][0] for h in heaps]
        if best is not None and tops[0] + tops[1] >= best:
            break
        side = 0 if tops[0] <= tops[1] else 1
        other = 1 - side
        d, sig = heapq.heappop(heaps[side])
        if sig in settled[side]:
            continue
        settled[side].add(sig)
        if budget is not None and expansions >= budget:
            raise BudgetExceededError(
                "distance search exceeded the expansion budget (%d)" % budget)
        expansions += 1
        for ssig, kind, w, retics in cache.successors(sig, tree_child_only):
            if retics > cap:
                continue
            nd = d + w
            if nd < dist[side].get(ssig, nd + 1):
                dist[side][ssig] = nd
                parent[side][ssig] = (sig, kind)
                heapq.heappush(heaps[side], (nd, ssig))
            # any vertex with a finite label on both sides witnesses a
            # real path; track the cheapest such meeting
            here = dist[side][ssig] if ssig in dist[side] else nd
            there = dist[other].get(ssig)
            if there is not None:
                total = here + there
                if best is None or total < best:
                    best, meet = total, ssig
    if best is None:
        raise ContractViolationError(
            "bidirectional search ended without meeting; the move space "
            "at this reticulation cap should be connected")
    return best, meet, parent


def _chain(parent, sig):
    """Signatures and kinds from the source to sig, following parents."""
    sigs, kinds = [sig], []
    while parent[sig] is not None:
        sig, kind = parent[sig]
        sigs.append(sig)
        kinds.append(kind)
    sigs.reverse()
    kinds.reverse()
    return sigs, kinds


def _replay(start: Network, sigs, kinds, tree_child_only) -> MoveSequence:
    current = start
    moves = []
    for i, kind in enumerate(kinds):
        mv, current = _find_move_to(current, kind, sigs[i + 1],
                                    tree_child_only=tree_child_only)
        moves.append(mv)
    return MoveSequence(start, moves)


def dtc(n: Network, m: Network, reticulation_cap=None, *, budget=None,
        cache: NeighborCache = None, witness: bool = True,
        bidirectional: bool = False, tree_child_only: bool = True):
    """Exact minimum weight of a tree-child move sequence from n to m.

    Every intermediate network is tree-child with at most
    `reticulation_cap` reticulations (default: one above the inputs'
    maximum). Returns (weight, sequence); the witness sequence ends at a
    network isomorphic to m and is None when witness is False. A shared
    NeighborCache makes repeated calls over a corpus much cheaper.

    tree_child_only=False searches the wider space of all valid binary
    networks under the cap. No published optimality claims attach to
    that mode; it exists for exploration.
    """
    cap = _check_dtc_inputs(n, m, reticulation_cap, tree_child_only)
    if cache is None:
        cache = NeighborCache()
    sig_n, sig_m = canonical_signature(n), canonical_signature(m)
    cache.representative(sig_n, n)
    cache.representative(sig_m, m)
    if sig_n == sig_m:
        return 0, (MoveSequence(n) if witness else None)

    if bidirectional:
        weight, meet, parents = _bidirectional(sig_n, sig_m, cache, cap,
                                               budget, tree_child_only)
        if not witness:
            return weight, None
        sigs_f, kinds_f = _chain(parents[0], meet)
        sigs_b, kinds_b = _chain(parents[1], meet)
        # the backward half lists moves out of m; invert them to run m-ward
        sigs = sigs_f + sigs_b[-2::-1]
        kinds = kinds_f + [REVERSE_KIND[k] for k in reversed(kinds_b)]
        return weight, _replay(n, sigs, kinds, tree_child_only)

    weight, parents = _dijkstra(sig_n, sig_m, cache, cap, budget,
                                tree_child_only)
    if not witness:
        return weight, None
    sigs, kinds = _chain(parents, sig_m)
    return weight, _replay(n, sigs, kinds, tree_child_only)
