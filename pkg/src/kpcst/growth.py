"""The moat-growing phase, parametrized by a potential and a tie-breaking list.

Duals of active sets grow uniformly until an external edge or an active set
becomes tight; the tie-breaking list overrides the fixed lexicographic order
(edges by input index, subsets by canonical key) for its first entries.

Two run modes share the same structural logic.  The concrete mode fixes the
potential and tracks exact event times as integers over a common denominator
that doubles on demand: a set's dual is simply its stop time minus its
creation time, an edge's tightening time is anchored once and only re-derived
when the activity of an endpoint changes, so one run costs integer arithmetic
plus one min-scan per round.  The symbolic mode replays a respected list with
every quantity an exact affine function of the potential and performs no
scalar comparisons.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import gcd, lcm
from types import SimpleNamespace

from .errors import InternalInvariantError, NotRespectedError, ValidationError
from .instance import Instance, Tree
from .laminar import LaminarFamily
from .rationals import AffineFn, ZERO_FN, format_scalar

_POOL, _FROZEN, _INTERNAL = 0, 1, 2


@dataclass(frozen=True)
class EdgeEvent:
    index: int


@dataclass(frozen=True)
class SubsetEvent:
    key: tuple


def format_event(ev) -> str:
    if isinstance(ev, EdgeEvent):
        return "E#%d" % ev.index
    return "S{%s}" % " ".join(str(v) for v in ev.key)


def parse_event(text: str):
    text = text.strip()
    if text.startswith("E#"):
        return EdgeEvent(int(text[2:]))
    if text.startswith("S{") and text.endswith("}"):
        inner = text[2:-1].split()
        return SubsetEvent(tuple(sorted(int(v) for v in inner)))
    raise ValidationError("bad event %r" % text)


class TraceEntry:
    __slots__ = ("iteration", "event", "_num", "_den")

    def __init__(self, iteration, event, num, den):
        self.iteration = iteration
        self.event = event
        self._num = num
        self._den = den

    @property
    def delta(self) -> Fraction:
        return Fraction(self._num, self._den)

    def __repr__(self):
        return "TraceEntry(i=%d, delta=%s, %s)" % (
            self.iteration, format_scalar(self.delta), format_event(self.event))


def format_trace(trace) -> str:
    return "\n".join("i=%d Δ=%s %s" % (t.iteration, format_scalar(t.delta),
                                            format_event(t.event))
                     for t in trace)


class GrowthOutput:
    """Result of one growth run; the laminar family materializes on demand."""

    def __init__(self, run, tree, processed_sets, trace):
        self._run = run
        self.instance = run.inst
        self.lam = run.lam
        self.tree = tree
        self.processed_sets = processed_sets
        self.trace = trace
        self._family = None

    @property
    def family(self) -> LaminarFamily:
        if self._family is None:
            self._family = self._run.build_family()
        return self._family

    @property
    def processed(self):
        """SetIds of the processed collection, in processing order."""
        self.family
        return list(self._run.processed_order)

    def processed_vertex_sets(self):
        return list(self.processed_sets)

    def events(self):
        return [t.event for t in self.trace]


@dataclass
class GrowthState:
    """Snapshot at an iteration boundary, with all scalars as Fractions."""

    instance: Instance
    lam: Fraction
    iteration: int
    family: LaminarFamily
    loads: dict              # edge input index -> Fraction
    forest: list             # edge input indices added so far


def _cache(inst: Instance):
    cc = getattr(inst, "_growth_cache", None)
    if cc is not None:
        return cc
    verts = list(inst.vertices)
    vpos = {v: i for i, v in enumerate(verts)}
    m = inst.m
    eu, ev, eidx = [], [], []
    adj = [[] for _ in verts]
    for p, e in enumerate(inst.edges):
        u, v = vpos[e.u], vpos[e.v]
        eu.append(u)
        ev.append(v)
        eidx.append(e.index)
        adj[u].append((p, v))
        adj[v].append((p, u))
    dens = [e.cost.denominator for e in inst.edges]
    dens += [inst.penalties[v].denominator for v in verts if v != inst.root]
    base_den = lcm(*dens) if dens else 1
    cc = SimpleNamespace(
        n=len(verts), m=m, vid=verts, vpos=vpos, root_local=vpos[inst.root],
        eu=eu, ev=ev, eidx=eidx, adj=adj,
        pos_of_index={idx: p for p, idx in enumerate(eidx)},
        D=base_den,
        costD=[int(e.cost * base_den) for e in inst.edges],
        penD=[None if v == inst.root else int(inst.penalties[v] * base_den)
              for v in verts],
        aff_cost=[AffineFn(e.cost, Fraction(0)) for e in inst.edges],
        aff_pen=[None if v == inst.root else AffineFn(inst.penalties[v], Fraction(1))
                 for v in verts])
    inst._growth_cache = cc
    return cc


class _ConcreteRun:
    """Integer-time growth engine at a fixed potential."""

    def __init__(self, inst: Instance, lam: Fraction):
        cc = _cache(inst)
        self.inst = inst
        self.cc = cc
        self.lam = lam
        extra = lam.denominator // gcd(lam.denominator, cc.D)
        self.scale = cc.D * extra
        lam_sc = int(lam * self.scale)
        n, m = cc.n, cc.m
        self.t = 0
        self.C = [c * extra for c in cc.costD]
        self.pilam = [None if pd is None else pd * extra + lam_sc
                      for pd in cc.penD]
        self.size = [1] * n
        self.rootin = [False] * n
        self.rootin[cc.root_local] = True
        self.proc = [False] * n
        self.kids = [None] * n
        self.tc = [0] * n
        self.tstop = [None] * n
        self.inner0 = [0] * n
        self.head = list(range(n))
        self.tail = list(range(n))
        self.nxt = [-1] * n
        self.uf = list(range(n))
        self.maxset = list(range(n))
        self.nmax = n
        self.status = [_POOL] * m
        self.a = [2] * m
        self.base = [0] * m
        self.tref = [0] * m
        self.frozen_load = {}
        self.frozen_tight = set()
        self.dead_load = {}
        self.skey = {sid: self.pilam[sid] for sid in range(n)
                     if self.pilam[sid] is not None}
        self.ekey = {}
        for p in range(m):
            self._anchor(p, 0)
        self.forest = []
        self.log = []
        self.processed_order = []

    # -- scaling and keys --

    def _rescale(self):
        self.scale *= 2
        self.t *= 2
        for name in ("C", "tc", "inner0", "base", "tref"):
            arr = getattr(self, name)
            for i in range(len(arr)):
                arr[i] *= 2
        for arr in (self.pilam, self.tstop):
            for i in range(len(arr)):
                if arr[i] is not None:
                    arr[i] *= 2
        self.frozen_load = {p: v * 2 for p, v in self.frozen_load.items()}
        self.dead_load = {p: v * 2 for p, v in self.dead_load.items()}
        self.ekey = {p: v * 2 for p, v in self.ekey.items()}
        self.skey = {s: v * 2 for s, v in self.skey.items()}

    def _anchor(self, p, load):
        """Record base load and from it the time at which pool edge p tightens."""
        slack = self.C[p] - load
        if slack < 0:
            raise InternalInvariantError("edge %d overloaded" % self.cc.eidx[p])
        if self.a[p] == 2 and slack & 1:
            self._rescale()
            load *= 2
            slack *= 2
        self.base[p] = load
        self.tref[p] = self.t
        self.ekey[p] = self.t + slack // self.a[p]

    # -- membership and uf --

    def _find(self, i):
        uf = self.uf
        while uf[i] != i:
            uf[i] = uf[uf[i]]
            i = uf[i]
        return i

    def maxset_of(self, vlocal):
        return self.maxset[self._find(vlocal)]

    def walk(self, sid):
        """Local vertex indices of a set: size-bounded walk of its list segment."""
        x = self.head[sid]
        nxt = self.nxt
        for _ in range(self.size[sid]):
            yield x
            x = nxt[x]

    def key_of(self, sid) -> tuple:
        vid = self.cc.vid
        return tuple(sorted(vid[x] for x in self.walk(sid)))

    def members_of(self, sid) -> frozenset:
        vid = self.cc.vid
        return frozenset(vid[x] for x in self.walk(sid))

    # -- loads --

    def current_load(self, p):
        st = self.status[p]
        if st == _INTERNAL:
            return self.dead_load[p]
        if st == _FROZEN:
            return self.frozen_load[p]
        return self.base[p] + (self.t - self.tref[p]) * self.a[p]

    def frozen_inner(self, sid):
        return self.inner0[sid] + (self.tstop[sid] - self.tc[sid])

    def _refresh_edge(self, p):
        load = self.current_load(p)
        self.frozen_load.pop(p, None)
        self.ekey.pop(p, None)
        self.frozen_tight.discard(p)
        m1 = self.maxset_of(self.cc.eu[p])
        m2 = self.maxset_of(self.cc.ev[p])
        if m1 == m2:
            raise InternalInvariantError("refresh of internal edge")
        acount = (0 if self.proc[m1] else 1) + (0 if self.proc[m2] else 1)
        self.a[p] = acount
        if acount == 0:
            self.status[p] = _FROZEN
            self.frozen_load[p] = load
            if load == self.C[p]:
                self.frozen_tight.add(p)
            return
        self.status[p] = _POOL
        self._anchor(p, load)

    def _internalize(self, p):
        self.dead_load[p] = self.current_load(p)
        self.status[p] = _INTERNAL
        self.frozen_load.pop(p, None)
        self.ekey.pop(p, None)
        self.frozen_tight.discard(p)

    # -- events --

    def edge_event(self, p):
        cc = self.cc
        l1 = self.maxset_of(cc.eu[p])
        l2 = self.maxset_of(cc.ev[p])
        if l1 == l2:
            raise InternalInvariantError("processed edge is not external")
        self.forest.append(p)
        self.log.append(("e", p))
        resurrect = [c for c in (l1, l2) if self.proc[c]]
        for c in (l1, l2):
            if self.tstop[c] is None:
                self.tstop[c] = self.t
            self.skey.pop(c, None)
        new = len(self.size)
        self.size.append(self.size[l1] + self.size[l2])
        self.rootin.append(self.rootin[l1] or self.rootin[l2])
        self.proc.append(False)
        self.kids.append((l1, l2))
        self.tc.append(self.t)
        self.tstop.append(None)
        self.inner0.append(self.frozen_inner(l1) + self.frozen_inner(l2))
        if self.pilam[l1] is None or self.pilam[l2] is None:
            self.pilam.append(None)
        else:
            self.pilam.append(self.pilam[l1] + self.pilam[l2])
        self.head.append(self.head[l1])
        self.nxt[self.tail[l1]] = self.head[l2]
        self.tail.append(self.tail[l2])
        r1 = self._find(cc.eu[p])
        r2 = self._find(cc.ev[p])
        self.uf[r1] = r2
        self.maxset[r2] = new
        self.nmax -= 1
        if self.pilam[new] is not None:
            slack = self.pilam[new] - self.inner0[new]
            if slack < 0:
                raise InternalInvariantError("merged set over its penalty")
            self.skey[new] = self.t + slack
        smaller = l1 if self.size[l1] <= self.size[l2] else l2
        adj, status = cc.adj, self.status
        newroot = self._find(r2)
        for x in self.walk(smaller):
            for p2, other in adj[x]:
                if status[p2] != _INTERNAL and self._find(other) == newroot:
                    self._internalize(p2)
        for c in resurrect:
            for x in self.walk(c):
                for p2, _other in adj[x]:
                    if status[p2] != _INTERNAL:
                        self._refresh_edge(p2)
        return new

    def subset_event(self, sid):
        if self.proc[sid] or self.rootin[sid]:
            raise InternalInvariantError("bad subset event target")
        self.proc[sid] = True
        self.processed_order.append(sid)
        self.log.append(("s", sid))
        self.tstop[sid] = self.t
        self.skey.pop(sid, None)
        adj, status = self.cc.adj, self.status
        for x in self.walk(sid):
            for p2, _other in adj[x]:
                if status[p2] != _INTERNAL:
                    self._refresh_edge(p2)

    # -- materialization --

    def build_family(self) -> LaminarFamily:
        fam = LaminarFamily(self.inst)
        edges = self.inst.edges
        for kind, payload in self.log:
            if kind == "e":
                e = edges[payload]
                fam.merge(fam.maximal_set_of(e.u), fam.maximal_set_of(e.v))
            else:
                fam.mark_processed(payload)
        if len(fam) != len(self.size):
            raise InternalInvariantError("family replay size mismatch")
        for sid in range(len(fam)):
            stop = self.tstop[sid] if self.tstop[sid] is not None else self.t
            grown = stop - self.tc[sid]
            fam.y[sid] = Fraction(grown, self.scale)
            fam.inner[sid] = Fraction(self.inner0[sid] + grown, self.scale)
        return fam

    def loads_by_index(self):
        return {self.cc.eidx[p]: Fraction(self.current_load(p), self.scale)
                for p in range(self.cc.m)}


def _state_of(run: _ConcreteRun, iteration) -> GrowthState:
    return GrowthState(run.inst, run.lam, iteration, run.build_family(),
                       run.loads_by_index(),
                       [run.cc.eidx[p] for p in run.forest])


def grow(inst: Instance, lam, tau=(), check=False, stop_at=None):
    """Run the growth phase at a fixed potential.

    Returns a GrowthOutput, or the GrowthState at the beginning of iteration
    ``stop_at``.  With ``check`` the five growth invariants are asserted at
    every iteration boundary.
    """
    lam = Fraction(lam)
    if lam < 0:
        raise ValidationError("potential must be non-negative")
    tau = tuple(tau)
    run = _ConcreteRun(inst, lam)
    cc = run.cc
    n = inst.n
    bound = 3 * n - 3
    trace = []
    i = 0
    while True:
        i += 1
        if check:
            check_growth_invariants(_state_of(run, i))
        if stop_at is not None and i == stop_at:
            return _state_of(run, i)
        if run.nmax == 1:
            if stop_at is not None:
                raise ValidationError("run terminates before iteration %d" % stop_at)
            top = run.maxset_of(0)
            run.tstop[top] = run.t
            if len(run.forest) != n - 1:
                raise InternalInvariantError("final forest is not spanning")
            tree = Tree(frozenset(inst.vertices),
                        frozenset(cc.eidx[p] for p in run.forest))
            psets = [run.members_of(s) for s in run.processed_order]
            return GrowthOutput(run, tree, psets, trace)
        if len(trace) >= bound:
            raise InternalInvariantError("more than 3|V|-3 processed events")

        t = run.t
        min_ekey = min(run.ekey.values()) if run.ekey else None
        min_skey = min(run.skey.values()) if run.skey else None
        edge_tight = bool(run.frozen_tight) or min_ekey == t
        subset_tight = min_skey == t
        if edge_tight or subset_tight:
            delta = 0
        else:
            cands = [kv for kv in (min_ekey, min_skey) if kv is not None]
            if not cands:
                raise InternalInvariantError("no candidate event; disconnected?")
            nxt = min(cands)
            if nxt < t:
                raise InternalInvariantError("event time moved backwards")
            delta = nxt - t
            run.t = t = nxt

        tight_pos = list(run.frozen_tight)
        if min_ekey == t:
            tight_pos += [p for p, kv in run.ekey.items() if kv == t]
        tight_edge_idxs = sorted(cc.eidx[p] for p in tight_pos)
        tight_sids = [s for s, kv in run.skey.items() if kv == t] \
            if min_skey == t else []
        ev = None
        want = tau[i - 1] if len(tau) >= i else None
        if isinstance(want, EdgeEvent) and want.index in tight_edge_idxs:
            ev = want
            sid_chosen = None
        elif isinstance(want, SubsetEvent) and any(run.key_of(s) == want.key
                                                   for s in tight_sids):
            ev = want
            sid_chosen = next(s for s in tight_sids if run.key_of(s) == want.key)
        elif tight_edge_idxs:
            ev = EdgeEvent(tight_edge_idxs[0])
            sid_chosen = None
        elif tight_sids:
            sid_chosen = min(tight_sids, key=run.key_of) \
                if len(tight_sids) > 1 else tight_sids[0]
            ev = SubsetEvent(run.key_of(sid_chosen))
        else:
            raise InternalInvariantError("no tight event after increase")
        trace.append(TraceEntry(i, ev, delta, run.scale))
        if isinstance(ev, EdgeEvent):
            run.edge_event(cc.pos_of_index[ev.index])
        else:
            run.subset_event(sid_chosen)


class SymbolicRun:
    """Replay of a respected list with affine-in-potential scalars.

    No scalar comparisons are made: the increment applied by ``extend`` is
    the increase-function of the event itself.  Every finite increase-function
    at the next iteration has the shape (static part) - (accumulated time),
    so candidate diverging potentials come from crossings of static parts.
    """

    def __init__(self, inst: Instance):
        cc = _cache(inst)
        self.inst = inst
        self.cc = cc
        self.fam = LaminarFamily(inst, zero=ZERO_FN)
        self.t = ZERO_FN
        n, m = cc.n, cc.m
        self.pilam = list(cc.aff_pen)
        self.tc = [ZERO_FN] * n
        self.tstop = [None] * n
        self.inner0 = [ZERO_FN] * n
        # static part of a set's increase-function: pilam - inner0 + tc
        self.pstat_set = list(cc.aff_pen)
        self.status = [_POOL] * m
        self.a = [2] * m
        self.base = [ZERO_FN] * m
        self.tref = [ZERO_FN] * m
        self.pstat_edge = [f / 2 for f in cc.aff_cost]
        self.frozen_load = {}
        self.zero_edges = set()
        self.dead_load = {}
        self.iteration = 0

    def current_load(self, p):
        st = self.status[p]
        if st == _INTERNAL:
            return self.dead_load[p]
        if st == _FROZEN:
            return self.frozen_load[p]
        return self.base[p] + (self.t - self.tref[p]) * self.a[p]

    def frozen_inner(self, sid):
        return self.inner0[sid] + (self.tstop[sid] - self.tc[sid])

    def inner_now(self, sid):
        stop = self.tstop[sid] if self.tstop[sid] is not None else self.t
        return self.inner0[sid] + (stop - self.tc[sid])

    def _refresh_edge(self, p):
        load = self.current_load(p)
        self.frozen_load.pop(p, None)
        self.zero_edges.discard(p)
        fam, cc = self.fam, self.cc
        e = self.inst.edges[p]
        m1, m2 = fam.maximal_set_of(e.u), fam.maximal_set_of(e.v)
        if m1 == m2:
            raise InternalInvariantError("refresh of internal edge")
        acount = (0 if fam.processed[m1] else 1) + (0 if fam.processed[m2] else 1)
        self.a[p] = acount
        if acount == 0:
            self.status[p] = _FROZEN
            self.frozen_load[p] = load
            if (cc.aff_cost[p] - load).is_zero():
                self.zero_edges.add(p)
            return
        self.status[p] = _POOL
        self.base[p] = load
        self.tref[p] = self.t
        self.pstat_edge[p] = (cc.aff_cost[p] - load) / acount + self.t

    def _internalize(self, p):
        self.dead_load[p] = self.current_load(p)
        self.status[p] = _INTERNAL
        self.frozen_load.pop(p, None)
        self.zero_edges.discard(p)

    def extend(self, ev):
        """Apply the next list entry as iteration len(tau)+1."""
        self.iteration += 1
        fam, cc = self.fam, self.cc
        if len(fam._maximal) == 1:
            raise NotRespectedError("growth ends before iteration %d" % self.iteration)
        if isinstance(ev, EdgeEvent):
            p = cc.pos_of_index.get(ev.index)
            if p is None or self.status[p] == _INTERNAL:
                raise NotRespectedError("edge %d not external at iteration %d"
                                        % (ev.index, self.iteration))
            acount = self.a[p]
            delta = ZERO_FN if acount == 0 else \
                (cc.aff_cost[p] - self.current_load(p)) / acount
        else:
            sid = fam.find_by_key(ev.key)
            if sid is None or not fam.is_active(sid):
                raise NotRespectedError("subset %r not active at iteration %d"
                                        % (ev.key, self.iteration))
            if self.pilam[sid] is None:
                raise NotRespectedError("root-containing subset in list")
            delta = self.pilam[sid] - self.inner_now(sid)
        self.t = self.t + delta
        if isinstance(ev, EdgeEvent):
            self._edge_event(cc.pos_of_index[ev.index])
        else:
            self._subset_event(fam.find_by_key(ev.key))

    def _edge_event(self, p):
        fam = self.fam
        e = self.inst.edges[p]
        l1, l2 = fam.maximal_set_of(e.u), fam.maximal_set_of(e.v)
        if l1 == l2:
            raise NotRespectedError("edge event on internal edge")
        resurrect = [c for c in (l1, l2) if fam.processed[c]]
        for c in (l1, l2):
            if self.tstop[c] is None:
                self.tstop[c] = self.t
        new = fam.merge(l1, l2)
        self.tc.append(self.t)
        self.tstop.append(None)
        self.inner0.append(self.frozen_inner(l1) + self.frozen_inner(l2))
        if self.pilam[l1] is None or self.pilam[l2] is None:
            self.pilam.append(None)
            self.pstat_set.append(None)
        else:
            self.pilam.append(self.pilam[l1] + self.pilam[l2])
            self.pstat_set.append(self.pilam[new] - self.inner0[new] + self.t)
        smaller = l1 if fam.size[l1] <= fam.size[l2] else l2
        for x in fam.members[smaller]:
            for p2, _other in self.cc.adj[self.cc.vpos[x]]:
                if self.status[p2] != _INTERNAL:
                    e2 = self.inst.edges[p2]
                    if fam.maximal_set_of(e2.u) == fam.maximal_set_of(e2.v):
                        self._internalize(p2)
        for c in resurrect:
            for x in fam.members[c]:
                for p2, _other in self.cc.adj[self.cc.vpos[x]]:
                    if self.status[p2] != _INTERNAL:
                        self._refresh_edge(p2)

    def _subset_event(self, sid):
        fam = self.fam
        fam.mark_processed(sid)
        self.tstop[sid] = self.t
        for x in fam.members[sid]:
            for p2, _other in self.cc.adj[self.cc.vpos[x]]:
                if self.status[p2] != _INTERNAL:
                    self._refresh_edge(p2)

    def object_functions(self) -> dict:
        """Event -> increase-function for everything processable next."""
        from .rationals import INFINITE_FN
        fam = self.fam
        funcs = {}
        for sid in fam.active_sets():
            ev = SubsetEvent(fam.key[sid])
            if self.pstat_set[sid] is None:
                funcs[ev] = INFINITE_FN
            else:
                funcs[ev] = self.pstat_set[sid] - self.t
        for p in range(self.cc.m):
            st = self.status[p]
            if st == _POOL:
                funcs[EdgeEvent(self.cc.eidx[p])] = self.pstat_edge[p] - self.t
            elif st == _FROZEN and p in self.zero_edges:
                funcs[EdgeEvent(self.cc.eidx[p])] = ZERO_FN
        return funcs

    def candidate_potentials(self, a, b):
        """Crossings of distinct next-event increase-functions inside (a, b).

        Every finite function is (static part) - t, so crossings are
        crossings of static parts, plus crossings with t itself when a
        zero function (tight inactive edge) is present.
        """
        fam = self.fam
        seen = set()
        fns = []

        def add(f):
            key = (f.intercept.numerator, f.intercept.denominator,
                   f.slope.numerator, f.slope.denominator)
            if key not in seen:
                seen.add(key)
                fns.append(f)

        for sid in fam.active_sets():
            if self.pstat_set[sid] is not None:
                add(self.pstat_set[sid])
        for p in range(self.cc.m):
            if self.status[p] == _POOL:
                add(self.pstat_edge[p])
        if self.zero_edges:
            add(self.t)
        quads = [(f.intercept.numerator, f.intercept.denominator,
                  f.slope.numerator, f.slope.denominator) for f in fns]
        an, ad = a.numerator, a.denominator
        bn, bd = b.numerator, b.denominator
        points = set()
        for i in range(len(quads)):
            i1n, i1d, s1n, s1d = quads[i]
            for j in range(i + 1, len(quads)):
                i2n, i2d, s2n, s2d = quads[j]
                num = (i2n * i1d - i1n * i2d) * s1d * s2d
                den = (s1n * s2d - s2n * s1d) * i1d * i2d
                if den == 0:
                    continue
                if den < 0:
                    num, den = -num, -den
                # a < num/den < b by cross multiplication
                if an * den < num * ad and num * bd < bn * den:
                    points.add(Fraction(num, den))
        return sorted(points)


def replay_symbolic(inst: Instance, tau) -> SymbolicRun:
    """Fresh symbolic replay of a whole tie-breaking list."""
    sym = SymbolicRun(inst)
    for ev in tau:
        sym.extend(ev)
    return sym


def next_deltas(state: GrowthState):
    """Candidate increments and currently tight events of a mid-run state.

    Returns (delta1, delta2, tight edge indices, tight subset keys) following
    the growth listing: a candidate is 0 when its kind already has a tight
    member, None when its pool is empty, INF when only root-bearing sets are
    active.
    """
    from .rationals import INF
    inst, fam, lam = state.instance, state.family, state.lam
    actives = fam.active_sets()
    external = []
    for e in inst.edges:
        m1, m2 = fam.maximal_set_of(e.u), fam.maximal_set_of(e.v)
        if m1 != m2:
            acount = (0 if fam.processed[m1] else 1) + (0 if fam.processed[m2] else 1)
            external.append((e, acount))
    tight_edges = sorted(e.index for e, _ in external if state.loads[e.index] == e.cost)
    tight_keys = sorted(fam.key[s] for s in actives
                        if fam.pi_lambda(s, lam) == fam.inner[s])
    if tight_edges:
        d1 = Fraction(0)
    else:
        cands = [Fraction(e.cost - state.loads[e.index], acount)
                 for e, acount in external if acount >= 1]
        d1 = min(cands) if cands else None
    if tight_keys:
        d2 = Fraction(0)
    else:
        d2 = INF
        for s in actives:
            pl = fam.pi_lambda(s, lam)
            if pl is INF:
                continue
            slack = pl - fam.inner[s]
            if slack < d2:
                d2 = slack
    if d1 is None and d2 is INF and len(actives) > 1:
        raise InternalInvariantError("no finite candidate with several active sets")
    return d1, d2, tight_edges, tight_keys


def select_event(i, tau, tight_edge_idxs, tight_subset_keys):
    """Event priority: the i-th list entry if tight, then edges, then subsets."""
    if not tight_edge_idxs and not tight_subset_keys:
        raise ValidationError("no tight event to select")
    if len(tau) >= i:
        cand = tau[i - 1]
        if isinstance(cand, EdgeEvent) and cand.index in tight_edge_idxs:
            return cand
        if isinstance(cand, SubsetEvent) and cand.key in tight_subset_keys:
            return cand
    if tight_edge_idxs:
        return EdgeEvent(min(tight_edge_idxs))
    return SubsetEvent(min(tight_subset_keys))


def is_respected(inst: Instance, lam, tau) -> bool:
    """True when the first len(tau) processed events equal the list itself."""
    tau = tuple(tau)
    if not tau:
        return True
    try:
        out = grow(inst, lam, tau)
    except InternalInvariantError:
        return False
    if len(out.trace) < len(tau):
        return False
    return all(out.trace[i].event == tau[i] for i in range(len(tau)))


def check_growth_invariants(state: GrowthState):
    """Assert the five growth invariants on an iteration-boundary snapshot."""
    inst, fam, lam = state.instance, state.family, state.lam
    # gp1: binary laminar, maximal sets partition V
    seen = set()
    for sid in fam.maximal_sets():
        if fam.members[sid] & seen:
            raise InternalInvariantError("gp1: maximal sets overlap")
        seen |= fam.members[sid]
    if seen != set(inst.vertices):
        raise InternalInvariantError("gp1: maximal sets do not cover V")
    for sid in range(len(fam)):
        ch = fam.children[sid]
        if ch is None:
            if len(fam.members[sid]) != 1:
                raise InternalInvariantError("gp1: non-singleton leaf")
        else:
            a, b = ch
            if fam.members[a] & fam.members[b]:
                raise InternalInvariantError("gp1: children overlap")
            if fam.members[a] | fam.members[b] != fam.members[sid]:
                raise InternalInvariantError("gp1: children do not cover parent")
    # gp2: loads respect costs, inner sums respect penalties
    for e in inst.edges:
        if state.loads[e.index] > e.cost:
            raise InternalInvariantError("gp2: edge %d overloaded" % e.index)
    for sid in range(len(fam)):
        if not fam.inner[sid] <= fam.pi_lambda(sid, lam):
            raise InternalInvariantError("gp2: set %d over its penalty" % sid)
    # gp3: forest, family-connected, forest edges tight
    by_index = inst.edge_map()
    parent = {v: v for v in inst.vertices}

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    adj = {v: [] for v in inst.vertices}
    for idx in state.forest:
        e = by_index[idx]
        if find(e.u) == find(e.v):
            raise InternalInvariantError("gp3: forest has a cycle")
        parent[find(e.u)] = find(e.v)
        adj[e.u].append(e.v)
        adj[e.v].append(e.u)
        if state.loads[idx] != e.cost:
            raise InternalInvariantError("gp3: forest edge %d not tight" % idx)
    for sid in range(len(fam)):
        mem = fam.members[sid]
        start = next(iter(mem))
        stack, reach = [start], {start}
        while stack:
            x = stack.pop()
            for yv in adj[x]:
                if yv in mem and yv not in reach:
                    reach.add(yv)
                    stack.append(yv)
        if reach != mem:
            raise InternalInvariantError("gp3: set %d not forest-connected" % sid)
    # gp4: processed sets tight; gp5: none contains the root
    for sid in range(len(fam)):
        if fam.processed[sid]:
            if fam.inner[sid] != fam.pi_lambda(sid, lam):
                raise InternalInvariantError("gp4: processed set %d not tight" % sid)
            if fam.contains_root[sid]:
                raise InternalInvariantError("gp5: processed set contains root")
