"""Build a tree spanning exactly k vertices from a threshold tuple.

The two growth runs of a threshold tuple differ by one edge or one processed
subset.  Pruning their union with the smaller collection gives a host that
spans at least k vertices; a subset path orders the extra material as a
cascade of witnessed parts ending at the under-k pruned tree.  The tail of
the cascade is kept whole and the remaining vertices are picked from one
part by walking down the binary laminar family.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .errors import InternalInvariantError, ValidationError
from .growth import EdgeEvent, SubsetEvent, grow
from .instance import Instance, Tree
from .pruning import (PruneGraph, prune, subset_path_for_edge_event,
                      subset_path_for_subset_event)


@dataclass
class PickContext:
    """Everything produced on the way from a threshold tuple to the k-tree."""

    tau_minus: tuple
    tau_plus: tuple
    out_minus: object
    out_plus: object
    sigma: object
    eplus_index: object      # edge joining the two trees, edge case only
    removed_index: object    # cycle edge removed from the host, edge case only
    host: PruneGraph
    path: object
    t: int
    m: int
    witness_set: int         # SetId of the picking witness in the minus family
    entry_vertex: int
    picked_parts: list
    w: int

    def dump(self) -> str:
        kind = "edge" if isinstance(self.sigma, EdgeEvent) else "subset"
        fam = self.out_minus.family
        return "sigma=%s t=%d m=%d W={%s} w=%d parts=[%s]" % (
            kind, self.t, self.m,
            " ".join(str(v) for v in fam.key[self.witness_set]), self.w,
            " ".join("{%s}" % " ".join(str(v) for v in sorted(p))
                     for p in self.picked_parts))


def choose_t(part_sizes, k):
    """Largest 1-based t whose suffix covers at least k, plus the shortfall m.

    Requires total >= k > last part; guarantees 1 <= m <= part_sizes[t-1].
    """
    total = sum(part_sizes)
    if total < k or part_sizes[-1] >= k:
        raise ValidationError("choose_t preconditions violated")
    suffix = 0
    for t in range(len(part_sizes), 0, -1):
        suffix += part_sizes[t - 1]
        if suffix >= k:
            m = k - (suffix - part_sizes[t - 1])
            if not 1 <= m <= part_sizes[t - 1]:
                raise InternalInvariantError("picking shortfall out of range")
            return t, m
    raise InternalInvariantError("no part index covers k")


def pick_parts(fam, host: PruneGraph, d_t, witness_sid, v, m):
    """Pick exactly m vertices of d_t by descending the binary family from W.

    Returns the picked parts in order; the last one is the singleton {w}.
    Consecutive parts are joined by host edges whose picked endpoints stay
    inside d_t.
    """
    if v not in fam.members[witness_sid] or v not in d_t:
        raise ValidationError("entry vertex outside the witness part")
    if len(fam.members[witness_sid] & d_t) < m or m < 1:
        raise ValidationError("witness cannot supply the requested vertices")
    edge_pairs = [(e.u, e.v) for e in host.edge_objects()]
    sid = witness_sid
    parts = []
    while True:
        if m == 1:
            parts.append(frozenset([v]))
            return parts
        ch = fam.children_of(sid)
        if ch is None:
            raise InternalInvariantError("singleton reached with m > 1")
        s1, s2 = ch
        if v not in fam.members[s1]:
            s1, s2 = s2, s1
        m1, m2 = fam.members[s1], fam.members[s2]
        if len(m1 & d_t) >= m:
            sid = s1
            continue
        strict, relaxed = None, None
        for x, yv in edge_pairs:
            if x in m2 and yv in m1:
                x, yv = yv, x
            if x in m1 and yv in m2:
                if yv in d_t:
                    if x in d_t:
                        strict = (x, yv)
                        break
                    relaxed = (x, yv)
        pick = strict or relaxed
        if pick is None:
            raise InternalInvariantError("no host edge between the family children")
        part = frozenset(m1 & d_t)
        if v not in part:
            raise InternalInvariantError("entry vertex fell out of the picked part")
        parts.append(part)
        m -= len(part)
        if m < 1:
            raise InternalInvariantError("picked past the shortfall")
        sid = s2
        v = pick[1]


def assemble_tree(host: PruneGraph, parts) -> Tree:
    """Host subgraph induced by the union of parts; must come out a tree."""
    union = frozenset().union(*parts)
    sub = host.induced(union)
    if host.instance.root not in union:
        raise InternalInvariantError("assembled graph misses the root")
    if len(sub.edge_idxs) != len(union) - 1 or not sub.is_connected():
        raise InternalInvariantError("induced subgraph is not a tree")
    return Tree(union, sub.edge_idxs)


def pick_tree(inst: Instance, lam, tau, k, check=False):
    """Run both growth phases of a threshold tuple and pick a k-vertex tree.

    Returns (tree, PickContext).  The tree contains the root, spans exactly
    k vertices, and uses only tight edges of the two growth trees.
    """
    lam = Fraction(lam)
    tau = tuple(tau)
    if not tau:
        raise ValidationError("threshold tuple with empty list")
    out_full = grow(inst, lam, tau, check=check)
    if [t.event for t in out_full.trace[:len(tau)]] != list(tau):
        raise ValidationError("list not respected at this potential")
    out_pref = grow(inst, lam, tau[:-1], check=check)

    def pruned_count(out):
        host = PruneGraph(inst, frozenset(inst.vertices), out.tree.edges)
        return len(prune(host, out.processed_vertex_sets()).vertices)

    nf, np_ = pruned_count(out_full), pruned_count(out_pref)
    if nf >= k > np_:
        tau_plus, tau_minus = tau, tau[:-1]
        out_plus, out_minus = out_full, out_pref
    elif nf < k <= np_:
        tau_plus, tau_minus = tau[:-1], tau
        out_plus, out_minus = out_pref, out_full
    else:
        raise ValidationError("not a threshold tuple: no straddle around k")

    bminus = out_minus.processed_vertex_sets()
    bplus = out_plus.processed_vertex_sets()
    union = PruneGraph(inst, frozenset(inst.vertices),
                       out_minus.tree.edges | out_plus.tree.edges)
    hhat = prune(union, bplus)
    sigma = tau[-1]
    eplus_index = None
    removed_index = None
    if isinstance(sigma, SubsetEvent):
        if out_minus.tree.edges != out_plus.tree.edges:
            raise InternalInvariantError("subset case with differing trees")
        path = subset_path_for_subset_event(hhat, bminus)
    else:
        diff = out_plus.tree.edges - out_minus.tree.edges
        if len(diff) != 1:
            raise InternalInvariantError("edge case: trees differ by %d edges"
                                         % len(diff))
        eplus_index = next(iter(diff))
        removed_index, path = subset_path_for_edge_event(hhat, bminus, eplus_index)
    host = path.host
    if not (len(host.vertices) >= k > len(path.parts[-1])):
        raise InternalInvariantError("host and pruned tail do not straddle k")

    t, m = choose_t([len(p) for p in path.parts], k)
    wkey = tuple(sorted(path.witnesses[t - 1]))
    witness_sid = out_minus.family.find_by_key(wkey)
    if witness_sid is None:
        raise InternalInvariantError("witness set missing from the family")
    entry = path.links[t - 1]
    picked = pick_parts(out_minus.family, host, path.parts[t - 1],
                        witness_sid, entry, m)
    tree = assemble_tree(host, picked + path.parts[t:])
    if len(tree.vertices) != k:
        raise InternalInvariantError("assembled tree does not span exactly k")
    ctx = PickContext(tau_minus, tau_plus, out_minus, out_plus, sigma,
                      eplus_index, removed_index, host, path, t, m,
                      witness_sid, entry, picked, next(iter(picked[-1])))
    return tree, ctx
