"""Binary laminar family with dual values, processed flags, and set queries.

The family is generic over the scalar type of the dual values: concrete
growth runs store Fractions, the symbolic replay stores AffineFn values.
Merges never split, so the vertex-to-maximal-set map is a union-find with
path compression.  Canonical keys are ascending vertex-id tuples; the fixed
lexicographic order on subsets is tuple order on these keys.
"""

from __future__ import annotations

from fractions import Fraction

from .errors import InternalInvariantError, ValidationError
from .rationals import INF, INFINITE_FN, AffineFn, format_scalar, is_finite


def canonical_key(vertices) -> tuple:
    return tuple(sorted(vertices))


class LaminarFamily:
    def __init__(self, instance, zero=None):
        """Start from singletons, one per instance vertex, all duals zero."""
        zero = Fraction(0) if zero is None else zero
        self.vertices = tuple(instance.vertices)
        self.root = instance.root
        self._pos = {v: i for i, v in enumerate(self.vertices)}
        n = len(self.vertices)
        self.members = [frozenset([v]) for v in self.vertices]
        self.key = [(v,) for v in self.vertices]
        self.children = [None] * n
        self.parent = [None] * n
        self.y = [zero] * n
        self.inner = [zero] * n
        self.processed = [False] * n
        self.contains_root = [v == self.root for v in self.vertices]
        self.pi_sum = [instance.penalties[v] for v in self.vertices]
        self.size = [1] * n
        self.processed_order = []
        self._uf = list(range(n))
        self._maxset_of = list(range(n))     # uf representative -> SetId
        self._maximal = set(range(n))

    def __len__(self):
        return len(self.members)

    def _find(self, i):
        while self._uf[i] != i:
            self._uf[i] = self._uf[self._uf[i]]
            i = self._uf[i]
        return i

    def maximal_set_of(self, v) -> int:
        return self._maxset_of[self._find(self._pos[v])]

    def maximal_sets(self):
        return sorted(self._maximal)

    def is_maximal(self, sid) -> bool:
        return sid in self._maximal

    def is_active(self, sid) -> bool:
        return sid in self._maximal and not self.processed[sid]

    def active_sets(self):
        return [s for s in sorted(self._maximal) if not self.processed[s]]

    def merge(self, a: int, b: int, y_init=None) -> int:
        """Union two current maximal sets; the new set starts with dual zero."""
        if a not in self._maximal or b not in self._maximal or a == b:
            raise ValidationError("merge requires two distinct maximal sets")
        y_init = Fraction(0) if y_init is None else y_init
        sid = len(self.members)
        self.members.append(self.members[a] | self.members[b])
        self.key.append(canonical_key(self.members[sid]))
        self.children.append((a, b))
        self.parent.append(None)
        self.parent[a] = sid
        self.parent[b] = sid
        self.y.append(y_init)
        self.inner.append(self.inner[a] + self.inner[b] + y_init)
        self.processed.append(False)
        self.contains_root.append(self.contains_root[a] or self.contains_root[b])
        self.pi_sum.append(self.pi_sum[a] + self.pi_sum[b])
        self.size.append(self.size[a] + self.size[b])
        ra = self._find(self._pos[next(iter(self.members[a]))])
        rb = self._find(self._pos[next(iter(self.members[b]))])
        self._uf[ra] = rb
        self._maxset_of[rb] = sid
        self._maximal.discard(a)
        self._maximal.discard(b)
        self._maximal.add(sid)
        return sid

    def mark_processed(self, sid: int):
        if sid not in self._maximal or self.processed[sid]:
            raise ValidationError("only active maximal sets can be processed")
        if self.contains_root[sid]:
            raise InternalInvariantError("root-containing set became processed")
        self.processed[sid] = True
        self.processed_order.append(sid)

    def add_growth(self, sid: int, delta):
        """Grow the dual of an active set; keeps its inner sum in step."""
        self.y[sid] = self.y[sid] + delta
        self.inner[sid] = self.inner[sid] + delta

    def children_of(self, sid: int):
        return self.children[sid]

    def penalty_fn(self, sid: int):
        """lam -> penalty-with-potential of the set, as an affine function."""
        if self.contains_root[sid]:
            return INFINITE_FN
        return AffineFn(Fraction(self.pi_sum[sid]), Fraction(self.size[sid]))

    def pi_lambda(self, sid: int, lam):
        if self.contains_root[sid]:
            return INF
        return self.pi_sum[sid] + Fraction(lam) * self.size[sid]

    def inner_sum(self, sid: int):
        return self.inner[sid]

    def recompute_inner(self, sid: int):
        """Inner sum from scratch; cross-checks the maintained value in tests."""
        total = self.y[sid]
        if self.children[sid] is not None:
            a, b = self.children[sid]
            total = total + self.recompute_inner(a) + self.recompute_inner(b)
        return total

    # --- set queries used throughout the analysis ---

    def crossing_sets(self, subset):
        """Family sets containing some, but not all, vertices of ``subset``."""
        s = frozenset(subset)
        return [i for i, mem in enumerate(self.members)
                if mem & s and not s <= mem]

    def contained_sets(self, subset):
        """Family sets that are subsets of ``subset``."""
        s = frozenset(subset)
        return [i for i, mem in enumerate(self.members) if mem <= s]

    def sets_containing(self, v):
        """The chain of family sets containing vertex ``v``, smallest first."""
        sid = self._pos[v]
        chain = [sid]
        while self.parent[sid] is not None:
            sid = self.parent[sid]
            chain.append(sid)
        return chain

    def find_by_key(self, key: tuple):
        for i, k in enumerate(self.key):
            if k == key:
                return i
        return None

    def y_by_key(self) -> dict:
        """Nonzero dual values keyed by canonical vertex tuple."""
        out = {}
        for i, val in enumerate(self.y):
            if not (val == 0):
                out[self.key[i]] = val
        return out

    def dump(self) -> str:
        lines = []
        for i in range(len(self.members)):
            lines.append("S%d: {%s} y=%s inner=%s processed=%d" % (
                i, " ".join(str(v) for v in self.key[i]),
                _fmt(self.y[i]), _fmt(self.inner[i]), int(self.processed[i])))
        return "\n".join(lines)


def _fmt(x):
    if isinstance(x, (Fraction, int)) or x is INF:
        return format_scalar(x)
    return repr(x)
