"""Exhaustive exact solver for desk-scale instances.

Any tree whose vertex set is exactly S is a spanning tree of the induced
subgraph on S, so the cheapest one is its minimum spanning tree.  The oracle
enumerates every vertex set containing the root (ascending bitmask order),
keeps sets of size at least k whose induced subgraph is connected, and
minimizes MST cost plus the penalties of the left-out vertices.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .errors import LimitError, ValidationError
from .instance import Instance, Tree


@dataclass
class ExactResult:
    opt_value: Fraction
    tree: Tree
    examined: int


def mst_of_subset(inst: Instance, subset):
    """Exact-rational MST of the induced subgraph, or None if disconnected."""
    subset = frozenset(subset)
    if not subset:
        return None
    parent = {v: v for v in subset}

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    inside = [e for e in inst.edges if e.u in subset and e.v in subset]
    inside.sort(key=lambda e: (e.cost, e.index))
    chosen = []
    for e in inside:
        ru, rv = find(e.u), find(e.v)
        if ru != rv:
            parent[ru] = rv
            chosen.append(e.index)
    if len(chosen) != len(subset) - 1:
        return None
    return Tree(subset, frozenset(chosen))


def exact_solve(inst: Instance, limit=18) -> ExactResult:
    """Minimum over all rooted connected vertex sets of size at least k."""
    if inst.n > limit:
        raise LimitError("instance has %d vertices, oracle limit is %d"
                         % (inst.n, limit))
    verts = list(inst.vertices)
    rpos = verts.index(inst.root)
    by_index = {e.index: e for e in inst.edges}
    total_pen = sum((inst.penalties[v] for v in verts if v != inst.root),
                    Fraction(0))
    best = None
    best_tree = None
    examined = 0
    for mask in range(1 << inst.n):
        if not mask >> rpos & 1:
            continue
        size = mask.bit_count()
        if size < inst.k:
            continue
        subset = frozenset(verts[i] for i in range(inst.n) if mask >> i & 1)
        tree = mst_of_subset(inst, subset)
        if tree is None:
            continue
        examined += 1
        cost = sum((by_index[i].cost for i in tree.edges), Fraction(0))
        value = cost + total_pen - sum((inst.penalties[v] for v in subset
                                        if v != inst.root), Fraction(0))
        if best is None or value < best:
            best = value
            best_tree = tree
    if best is None:
        raise ValidationError("no feasible vertex set")
    return ExactResult(best, best_tree, examined)
