"""Degree-one pruning, its order-free semantics, and subset paths.

Pruning repeatedly deletes any collection member whose degree on the current
graph is exactly one; the result is independent of deletion order.  The
traced variant always deletes an inclusion-wise minimal candidate and records
the deletion cascade as a subset path: an ordered partition whose parts are
witnessed by collection members and linked by single edges.  Input graphs may
carry one cycle (the union of the two growth trees does).
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import InternalInvariantError, ValidationError
from .instance import Instance


@dataclass(frozen=True)
class PruneGraph:
    instance: Instance
    vertices: frozenset
    edge_idxs: frozenset

    def edge_objects(self):
        by_index = self.instance.edge_map()
        return [by_index[i] for i in sorted(self.edge_idxs)]

    def without_edge(self, idx):
        return PruneGraph(self.instance, self.vertices, self.edge_idxs - {idx})

    def induced(self, keep):
        keep = frozenset(keep)
        by_index = self.instance.edge_map()
        idxs = frozenset(i for i in self.edge_idxs
                         if by_index[i].u in keep and by_index[i].v in keep)
        return PruneGraph(self.instance, keep, idxs)

    def is_connected(self):
        if not self.vertices:
            return False
        adj = _adjacency(self)
        start = next(iter(self.vertices))
        stack, seen = [start], {start}
        while stack:
            x = stack.pop()
            for y, _ in adj[x]:
                if y not in seen:
                    seen.add(y)
                    stack.append(y)
        return seen == self.vertices


def _adjacency(h: PruneGraph):
    by_index = h.instance.edge_map()
    adj = {v: [] for v in h.vertices}
    for idx in h.edge_idxs:
        e = by_index[idx]
        adj[e.u].append((e.v, idx))
        adj[e.v].append((e.u, idx))
    return adj


def degree_of(h: PruneGraph, subset) -> int:
    """Number of edges of h with exactly one extreme in ``subset``."""
    count = 0
    by_index = h.instance.edge_map()
    for idx in h.edge_idxs:
        e = by_index[idx]
        if (e.u in subset) != (e.v in subset):
            count += 1
    return count


def is_pruned(h: PruneGraph, collection) -> bool:
    return all(degree_of(h, b) != 1 for b in collection)


def _check_collection(h: PruneGraph, collection):
    for b in collection:
        if h.instance.root in b:
            raise ValidationError("collection member contains the root")
    for i, b1 in enumerate(collection):
        for b2 in collection[i + 1:]:
            if b1 & b2 and not (b1 <= b2 or b2 <= b1):
                raise ValidationError("collection is not laminar")


class _Pruner:
    """Shared incremental degree bookkeeping for both pruning variants."""

    def __init__(self, h: PruneGraph, collection):
        if not h.is_connected() or h.instance.root not in h.vertices:
            raise ValidationError("prune input must be connected and rooted")
        _check_collection(h, collection)
        self.h = h
        self.sets = [frozenset(b) for b in collection]
        self.alive = set(h.vertices)
        self.live_edges = set(h.edge_idxs)
        self.by_index = h.instance.edge_map()
        lists = {v: [] for v in h.vertices}
        for i, b in enumerate(self.sets):
            for v in b:
                if v in lists:
                    lists[v].append(i)
        self.chains = {v: frozenset(ids) for v, ids in lists.items()}
        self.deg = [0] * len(self.sets)
        for idx in self.live_edges:
            e = self.by_index[idx]
            for i in self.chains[e.u] ^ self.chains[e.v]:
                self.deg[i] += 1

    def candidates(self):
        return [i for i in range(len(self.sets)) if self.deg[i] == 1]

    def delete(self, i):
        """Remove set i's surviving vertices; returns (victims, crossing edge idx)."""
        victims = self.sets[i] & self.alive
        crossing = None
        removed = []
        for idx in self.live_edges:
            e = self.by_index[idx]
            inu, inv = e.u in victims, e.v in victims
            if inu or inv:
                removed.append(idx)
                if inu != inv:
                    crossing = idx
        for idx in removed:
            self.live_edges.discard(idx)
            e = self.by_index[idx]
            for j in self.chains[e.u] ^ self.chains[e.v]:
                self.deg[j] -= 1
        self.alive -= victims
        return victims, crossing

    def result(self) -> PruneGraph:
        return PruneGraph(self.h.instance, frozenset(self.alive),
                          frozenset(self.live_edges))


def prune(h: PruneGraph, collection, rng=None) -> PruneGraph:
    """Delete degree-one collection members until none remains.

    The output does not depend on the deletion order; ``rng`` (tests only)
    randomizes the order to exercise exactly that.
    """
    pr = _Pruner(h, collection)
    while True:
        cands = pr.candidates()
        if not cands:
            break
        pick = rng.choice(cands) if rng is not None else cands[0]
        pr.delete(pick)
    out = pr.result()
    if h.instance.root not in out.vertices or not out.is_connected():
        raise InternalInvariantError("pruning lost the root or connectivity")
    return out


@dataclass
class SubsetPath:
    """Ordered partition recording a minimal-first pruning cascade."""

    host: PruneGraph
    parts: list          # ell + 1 frozensets, deletion order then survivors
    witnesses: list      # ell collection members, one per deleted part
    links: list          # ell vertices, links[i] in parts[i] adjacent to parts[i+1]
    collection: list     # the collection the path was processed with

    def dump(self) -> str:
        bits = []
        for i, part in enumerate(self.parts):
            txt = "D%d={%s}" % (i + 1, " ".join(str(v) for v in sorted(part)))
            if i < len(self.witnesses):
                txt += " B%d={%s} v%d=%d" % (
                    i + 1, " ".join(str(v) for v in sorted(self.witnesses[i])),
                    i + 1, self.links[i])
            bits.append(txt)
        return " | ".join(bits)


def verify_subset_path(path: SubsetPath):
    """Check the three definitional invariants; raise on any breach."""
    h, coll = path.host, path.collection
    union = frozenset().union(*path.parts) if path.parts else frozenset()
    if union != h.vertices or sum(len(p) for p in path.parts) != len(h.vertices):
        raise InternalInvariantError("not a subset path: parts do not partition")
    ell = len(path.parts) - 1
    if len(path.witnesses) != ell or len(path.links) != ell:
        raise InternalInvariantError("not a subset path: ragged witness lists")
    tail = frozenset(path.parts[ell])
    if not is_pruned(h.induced(tail), coll):
        raise InternalInvariantError("not a subset path: tail not pruned")
    by_index = h.instance.edge_map()
    suffix = tail
    for i in range(ell - 1, -1, -1):
        di, vi, bi = path.parts[i], path.links[i], path.witnesses[i]
        if vi not in di:
            raise InternalInvariantError("not a subset path: link outside part")
        if not any((by_index[idx].u == vi and by_index[idx].v in path.parts[i + 1]) or
                   (by_index[idx].v == vi and by_index[idx].u in path.parts[i + 1])
                   for idx in h.edge_idxs):
            raise InternalInvariantError("not a subset path: missing link edge")
        if not di <= bi or bi not in coll:
            raise InternalInvariantError("not a subset path: bad witness")
        for j in range(i + 1, ell + 1):
            if bi & path.parts[j]:
                raise InternalInvariantError("not a subset path: witness leaks forward")
        suffix = suffix | di
        sub = h.induced(suffix)
        if not sub.is_connected():
            raise InternalInvariantError("not a subset path: suffix disconnected")
        rest = [b for b in coll if vi not in b]
        if not is_pruned(sub, rest):
            raise InternalInvariantError("not a subset path: suffix not pruned")


def prune_trace_minimal(h: PruneGraph, collection) -> SubsetPath:
    """Minimal-first pruning cascade, returned as a verified subset path."""
    pr = _Pruner(h, collection)
    parts, witnesses, links = [], [], []
    while True:
        cands = pr.candidates()
        if not cands:
            break
        minimal = [i for i in cands
                   if not any(j != i and pr.sets[j] < pr.sets[i] for j in cands)]
        pick = min(minimal, key=lambda i: tuple(sorted(pr.sets[i])))
        victims, crossing = pr.delete(pick)
        if crossing is None:
            raise InternalInvariantError("degree-one set without crossing edge")
        e = pr.by_index[crossing]
        vi = e.u if e.u in victims else e.v
        parts.append(frozenset(victims))
        witnesses.append(pr.sets[pick])
        links.append(vi)
    parts.append(frozenset(pr.alive))
    path = SubsetPath(h, parts, witnesses, links, [frozenset(b) for b in collection])
    verify_subset_path(path)
    return path


def find_cycle(h: PruneGraph):
    """The unique cycle of h as an edge index list, or None if h is a forest."""
    if len(h.edge_idxs) > len(h.vertices):
        raise ValidationError("graph has more than one cycle")
    adj = _adjacency(h)
    seen = {}
    for start in h.vertices:
        if start in seen:
            continue
        stack = [(start, None)]
        seen[start] = (None, None)
        while stack:
            x, via = stack.pop()
            for y, idx in adj[x]:
                if idx == via:
                    continue
                if y in seen:
                    # reconstruct the two tree paths to their meeting point
                    pathx = _walk_up(seen, x)
                    pathy = _walk_up(seen, y)
                    meetx = {v for v, _ in pathx}
                    common = next(v for v, _ in pathy if v in meetx)
                    cyc = [idx]
                    for v, eidx in pathx:
                        if v == common:
                            break
                        cyc.append(eidx)
                    for v, eidx in pathy:
                        if v == common:
                            break
                        cyc.append(eidx)
                    return cyc
                seen[y] = (x, idx)
                stack.append((y, idx))
    return None


def _walk_up(seen, x):
    out = []
    while True:
        out.append((x, seen[x][1]))
        if seen[x][0] is None:
            return out
        x = seen[x][0]


def tree_path(h: PruneGraph, start, goal):
    """Vertex/edge path from start to goal in an acyclic PruneGraph."""
    adj = _adjacency(h)
    prev = {start: (None, None)}
    stack = [start]
    while stack:
        x = stack.pop()
        if x == goal:
            break
        for y, idx in adj[x]:
            if y not in prev:
                prev[y] = (x, idx)
                stack.append(y)
    if goal not in prev:
        raise InternalInvariantError("no path between required vertices")
    verts, edges = [goal], []
    x = goal
    while prev[x][0] is not None:
        edges.append(prev[x][1])
        x = prev[x][0]
        verts.append(x)
    verts.reverse()
    edges.reverse()
    return verts, edges


def subset_path_for_subset_event(host: PruneGraph, bminus) -> SubsetPath:
    """Subset case: the host is already pruned with all but the new subset."""
    return prune_trace_minimal(host, bminus)


def subset_path_for_edge_event(host: PruneGraph, bminus, eplus_idx):
    """Edge case: pick a cycle edge e so that host - e admits a subset path.

    Follows the constructive argument step by step, asserting every
    intermediate claim; returns (e, subset path of host - e).
    """
    cyc = find_cycle(host)
    if cyc is None or eplus_idx not in cyc:
        raise InternalInvariantError("edge case: host lost the cycle")
    eplus = host.instance.edge(eplus_idx)
    h1 = host.without_edge(eplus_idx)
    if not h1.is_connected():
        raise InternalInvariantError("edge case: breaking the cycle disconnected")
    deg1 = [b for b in bminus if degree_of(h1, b) == 1]
    if not deg1:
        # degenerate: nothing becomes deletable; treat e+ itself as the cut edge
        return eplus_idx, prune_trace_minimal(h1, bminus)
    minimal = [b for b in deg1 if not any(c < b for c in deg1)]
    bstar = min(minimal, key=lambda b: tuple(sorted(b)))
    inside = [x for x in (eplus.u, eplus.v) if x in bstar]
    if len(inside) != 1:
        raise InternalInvariantError("edge case: first deletable set must cut e+")
    v = inside[0]
    vprime = eplus.other(v)
    b1 = [b for b in bminus if vprime not in b]
    h1p = prune(h1, b1)
    if v in h1p.vertices:
        raise InternalInvariantError("edge case: near extreme survived pruning")
    kverts, kedges = tree_path(h1, host.instance.root, v)
    u = None
    for pos, x in enumerate(kverts):
        if x in h1p.vertices:
            u = pos
    if u is None or u + 1 >= len(kverts):
        raise InternalInvariantError("edge case: no surviving prefix on root path")
    e_idx = kedges[u]
    if e_idx not in cyc:
        raise InternalInvariantError("edge case: chosen edge not on the cycle")
    uprime = kverts[u + 1]
    h2 = host.without_edge(e_idx)
    b2 = [b for b in bminus if uprime not in b]
    if not is_pruned(h2, b2):
        raise InternalInvariantError("edge case: host minus e not pruned as claimed")
    leg1 = prune_trace_minimal(h2, b1)
    if leg1.witnesses and uprime not in leg1.parts[0]:
        raise InternalInvariantError("edge case: first leg does not start at u'")
    hmid = h2.induced(leg1.parts[-1])
    leg2 = prune_trace_minimal(hmid, bminus)
    if leg2.witnesses and vprime not in leg2.parts[0]:
        raise InternalInvariantError("edge case: second leg does not start at v'")
    path = SubsetPath(h2,
                      leg1.parts[:-1] + leg2.parts,
                      leg1.witnesses + leg2.witnesses,
                      leg1.links + leg2.links,
                      [frozenset(b) for b in bminus])
    verify_subset_path(path)
    return e_idx, path
