"""Problem instances: model, canonical text format, validation, reduction.

An instance is a connected simple graph with rational edge costs, rational
vertex penalties (infinite at the root), and a target vertex count k.  Vertex
ids and edge input indices are stable: reducing an instance to an induced
subgraph keeps the original ids, indices and penalties, so objectives of
trees found on reduced instances can be charged against the original.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction

from .errors import ParseError, ValidationError
from .rationals import INF, format_scalar, is_finite, parse_scalar


@dataclass(frozen=True)
class Edge:
    index: int
    u: int
    v: int
    cost: Fraction

    def endpoints(self):
        return (self.u, self.v)

    def other(self, x):
        return self.v if x == self.u else self.u


@dataclass(frozen=True)
class Tree:
    """A tree in some instance: original vertex ids plus edge input indices."""

    vertices: frozenset
    edges: frozenset


@dataclass
class Instance:
    vertices: tuple
    edges: tuple                # Edge values, declaration order
    penalties: dict             # vertex id -> Fraction or INF (root only)
    root: int
    k: int
    _adj: dict = field(default=None, repr=False, compare=False)

    @property
    def n(self):
        return len(self.vertices)

    @property
    def m(self):
        return len(self.edges)

    def total_cost(self) -> Fraction:
        return sum((e.cost for e in self.edges), Fraction(0))

    def adjacency(self):
        """vertex -> list of incident Edge values (built once, cached)."""
        if self._adj is None:
            adj = {v: [] for v in self.vertices}
            for e in self.edges:
                adj[e.u].append(e)
                adj[e.v].append(e)
            object.__setattr__(self, "_adj", adj)
        return self._adj

    def edge_map(self) -> dict:
        """edge input index -> Edge (built once, cached)."""
        cached = getattr(self, "_edge_map", None)
        if cached is None:
            cached = {e.index: e for e in self.edges}
            object.__setattr__(self, "_edge_map", cached)
        return cached

    def edge(self, index: int) -> Edge:
        e = self.edge_map().get(index)
        if e is None:
            raise ValidationError("no edge with input index %d" % index)
        return e


def _connected(vertices, edge_pairs) -> bool:
    verts = list(vertices)
    if not verts:
        return False
    parent = {v: v for v in verts}

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for u, v in edge_pairs:
        parent[find(u)] = find(v)
    root = find(verts[0])
    return all(find(v) == root for v in verts)


def validate_instance(inst: Instance):
    """Check every instance invariant; returns a list of problems (empty = ok)."""
    problems = []
    vs = set(inst.vertices)
    if tuple(sorted(vs)) != tuple(inst.vertices):
        problems.append("vertex list not sorted or not unique")
    if inst.root not in vs:
        problems.append("root out of range")
    if not 0 <= inst.k <= len(vs):
        problems.append("k exceeds |V|" if inst.k > len(vs) else "negative k")
    seen_pairs = set()
    seen_idx = set()
    for e in inst.edges:
        if e.u not in vs or e.v not in vs:
            problems.append("edge %d endpoint out of range" % e.index)
            continue
        if e.u == e.v:
            problems.append("self-loop at vertex %d" % e.u)
        pair = (min(e.u, e.v), max(e.u, e.v))
        if pair in seen_pairs:
            problems.append("duplicate edge %d-%d" % pair)
        seen_pairs.add(pair)
        if e.index in seen_idx:
            problems.append("duplicate edge index %d" % e.index)
        seen_idx.add(e.index)
        if not is_finite(e.cost) or e.cost < 0:
            problems.append("negative cost on edge %d" % e.index)
    for v in inst.vertices:
        p = inst.penalties.get(v)
        if p is None:
            problems.append("missing penalty for vertex %d" % v)
        elif v == inst.root:
            if p is not INF:
                problems.append("root penalty must be inf")
        elif not is_finite(p):
            problems.append("non-root penalty must be finite")
        elif p < 0:
            problems.append("negative penalty at vertex %d" % v)
    if not problems and not _connected(inst.vertices, [(e.u, e.v) for e in inst.edges]):
        problems.append("graph is disconnected")
    return problems


def _checked(inst: Instance) -> Instance:
    problems = validate_instance(inst)
    if problems:
        raise ValidationError("; ".join(problems))
    return inst


def parse_instance(text: str) -> Instance:
    """Parse the canonical '.kpcst' text format (see serialize_instance)."""
    lines = []
    for raw in text.splitlines():
        line = raw.split("#", 1)[0].strip()
        if line:
            lines.append(line)
    if not lines or lines[0].split() != ["kpcst", "1"]:
        raise ParseError("missing 'kpcst 1' header")

    def need(i, what):
        if i >= len(lines):
            raise ParseError("unexpected end of file, expected %s" % what)
        return lines[i].split()

    hdr = need(1, "n/m line")
    if len(hdr) != 4 or hdr[0] != "n" or hdr[2] != "m":
        raise ParseError("malformed line %r" % lines[1])
    try:
        n, m = int(hdr[1]), int(hdr[3])
    except ValueError:
        raise ParseError("malformed line %r" % lines[1]) from None
    rootline = need(2, "root line")
    kline = need(3, "k line")
    pline = need(4, "penalties line")
    if len(rootline) != 2 or rootline[0] != "root":
        raise ParseError("malformed line %r" % lines[2])
    if len(kline) != 2 or kline[0] != "k":
        raise ParseError("malformed line %r" % lines[3])
    if pline[0] != "penalties" or len(pline) != n + 1:
        raise ParseError("penalties line must carry %d entries" % n)
    try:
        root, k = int(rootline[1]), int(kline[1])
    except ValueError:
        raise ParseError("malformed root or k line") from None
    if n <= 0:
        raise ParseError("n must be positive")
    penalties = {v: parse_scalar(pline[1 + v]) for v in range(n)}
    if len(lines) != 5 + m:
        raise ParseError("expected %d edge lines, found %d" % (m, len(lines) - 5))
    edges = []
    for i in range(m):
        parts = lines[5 + i].split()
        if len(parts) != 4 or parts[0] != "e":
            raise ParseError("malformed line %r" % lines[5 + i])
        try:
            u, v = int(parts[1]), int(parts[2])
        except ValueError:
            raise ParseError("malformed line %r" % lines[5 + i]) from None
        cost = parse_scalar(parts[3])
        if cost is INF:
            raise ParseError("edge cost cannot be inf")
        edges.append(Edge(i, u, v, cost))
    inst = Instance(tuple(range(n)), tuple(edges), penalties, root, k)
    return _checked(inst)


def serialize_instance(inst: Instance) -> str:
    """Emit the canonical text form; parse_instance round-trips it bit-exactly."""
    if tuple(inst.vertices) != tuple(range(inst.n)):
        raise ValidationError("only instances with contiguous vertex ids serialize")
    if tuple(e.index for e in inst.edges) != tuple(range(inst.m)):
        raise ValidationError("only instances with contiguous edge indices serialize")
    out = ["kpcst 1",
           "n %d m %d" % (inst.n, inst.m),
           "root %d" % inst.root,
           "k %d" % inst.k,
           "penalties " + " ".join(format_scalar(inst.penalties[v])
                                   for v in inst.vertices)]
    for e in inst.edges:
        out.append("e %d %d %s" % (e.u, e.v, format_scalar(e.cost)))
    return "\n".join(out) + "\n"


def induce_subgraph(inst: Instance, keep) -> Instance:
    """Restrict to the vertex set ``keep``, preserving ids, indices, penalties, k."""
    keep = frozenset(keep)
    if inst.root not in keep:
        raise ValidationError("root not in induced vertex set")
    if not keep <= set(inst.vertices):
        raise ValidationError("induced vertex set not a subset of V")
    vertices = tuple(sorted(keep))
    edges = tuple(e for e in inst.edges if e.u in keep and e.v in keep)
    if not _connected(vertices, [(e.u, e.v) for e in edges]):
        raise ValidationError("induced subgraph is disconnected")
    penalties = {v: inst.penalties[v] for v in vertices}
    return Instance(vertices, edges, penalties, inst.root, inst.k)


def check_tree(inst: Instance, tree: Tree):
    """Raise unless ``tree`` is a tree of a subgraph of ``inst`` containing the root."""
    by_index = {e.index: e for e in inst.edges}
    if inst.root not in tree.vertices:
        raise ValidationError("tree does not contain the root")
    if not tree.vertices <= set(inst.vertices):
        raise ValidationError("tree vertex outside instance")
    pairs = []
    for idx in tree.edges:
        e = by_index.get(idx)
        if e is None:
            raise ValidationError("tree edge %d not in instance" % idx)
        if e.u not in tree.vertices or e.v not in tree.vertices:
            raise ValidationError("tree edge %d leaves the vertex set" % idx)
        pairs.append((e.u, e.v))
    if len(tree.edges) != len(tree.vertices) - 1 or not _connected(tree.vertices, pairs):
        raise ValidationError("edge set is not a tree on the vertex set")


def objective(original: Instance, tree: Tree) -> Fraction:
    """Edge cost of the tree plus penalties of original vertices it misses."""
    check_tree(original, tree)
    by_index = {e.index: e for e in original.edges}
    cost = sum((by_index[i].cost for i in tree.edges), Fraction(0))
    penalty = Fraction(0)
    for v in original.vertices:
        if v not in tree.vertices:
            p = original.penalties[v]
            if not is_finite(p):
                raise ValidationError("unspanned vertex with infinite penalty")
            penalty += p
    return cost + penalty


def generate_random(n, m, max_cost, max_penalty, k, seed) -> Instance:
    """Random connected simple instance: a spanning tree plus extra edges.

    Costs and penalties are uniform integers; the root is vertex 0 with an
    infinite penalty.  Deterministic in ``seed``.
    """
    if n < 1 or m < n - 1 or m > n * (n - 1) // 2:
        raise ValidationError("infeasible (n, m) pair")
    if not 0 <= k <= n:
        raise ValidationError("k out of range")
    rng = random.Random(seed)
    pairs = []
    order = list(range(n))
    rng.shuffle(order)
    for i in range(1, n):
        j = rng.randrange(i)
        u, v = order[j], order[i]
        pairs.append((min(u, v), max(u, v)))
    chosen = set(pairs)
    extra = m - (n - 1)
    if extra:
        candidates = [(u, v) for u in range(n) for v in range(u + 1, n)
                      if (u, v) not in chosen]
        pairs.extend(rng.sample(candidates, extra))
    edges = tuple(Edge(i, u, v, Fraction(rng.randint(0, max_cost)))
                  for i, (u, v) in enumerate(pairs))
    penalties = {v: Fraction(rng.randint(0, max_penalty)) for v in range(1, n)}
    penalties[0] = INF
    return _checked(Instance(tuple(range(n)), edges, penalties, 0, k))
