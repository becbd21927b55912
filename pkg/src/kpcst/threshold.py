"""Increase-functions, diverging potentials, and the threshold-tuple search.

On an interval of potentials where a tie-breaking list is respected, the dual
increment that would make any given object tight in the next iteration is an
exact affine function of the potential.  Crossing points of these functions
are the only places the next processed event can change, so the search
bisects over them, narrowing the interval and extending the list until the
spanned-vertex counts of the list and its proper prefix straddle k.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .errors import InternalInvariantError, ValidationError
from .growth import (EdgeEvent, SubsetEvent, SymbolicRun, format_event, grow,
                     is_respected, next_deltas, parse_event, replay_symbolic)
from .gw import run_gw
from .instance import Instance
from .pruning import PruneGraph, prune
from .rationals import INF, INFINITE_FN, format_scalar, parse_scalar


@dataclass
class ObjectCollection:
    """Event -> increase-function at the first iteration beyond the list."""

    functions: dict
    interval: tuple
    tau: tuple

    def finite_functions(self):
        return {ev: f for ev, f in self.functions.items() if f is not INFINITE_FN}


@dataclass(frozen=True)
class ThresholdTuple:
    lam: Fraction
    tau: tuple
    side: str       # "full" when the whole list spans >= k, else "prefix"


@dataclass
class SearchRecord:
    """One search iteration, kept for the symbolic/concrete agreement checks."""

    tau: tuple
    interval: tuple
    functions: dict
    potentials: list
    crossing: int
    lam0: Fraction
    sigma: object


def increase_functions(inst: Instance, tau, interval) -> ObjectCollection:
    """Symbolically replay the list and collect all next-event increase-functions.

    Members: every active subset (infinite for root-bearing ones), every
    external edge with an active endpoint, and the zero function for external
    edges that are tight with no active endpoint.
    """
    sym = replay_symbolic(inst, tuple(tau))
    return ObjectCollection(sym.object_functions(), tuple(interval), tuple(tau))


def diverging_potentials(collection: ObjectCollection, interval):
    """All crossing points of distinct finite increase-functions inside (a, b).

    A superset of the potentials where the processed event can change, which
    is all the search needs: consecutive candidates bound intersection-free
    open intervals.
    """
    a, b = Fraction(interval[0]), Fraction(interval[1])
    unique = {(f.intercept, f.slope) for f in collection.finite_functions().values()}
    fns = sorted(unique)
    points = set()
    for i in range(len(fns)):
        i1, s1 = fns[i]
        for j in range(i + 1, len(fns)):
            i2, s2 = fns[j]
            if s1 == s2:
                continue
            x = (i2 - i1) / (s1 - s2)
            if a < x < b:
                points.add(x)
    return sorted(points)


def spans_at_least_k(inst: Instance, lam, tau, k) -> bool:
    tree, _ = run_gw(inst, lam, tau)
    return len(tree.vertices) >= k


def find_crossing_index(inst: Instance, tau, k, potentials, verify_bracket=True) -> int:
    """Index j with a spans-false at potentials[j], spans-true at potentials[j+1].

    Bisection on the boolean sequence; valid without monotonicity because a
    false-left, true-right bracket is maintained throughout.
    """
    lo, hi = 0, len(potentials) - 1
    if verify_bracket:
        if spans_at_least_k(inst, potentials[lo], tau, k):
            raise InternalInvariantError("crossing bracket: left end already spans k")
        if not spans_at_least_k(inst, potentials[hi], tau, k):
            raise InternalInvariantError("crossing bracket: right end spans under k")
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if spans_at_least_k(inst, potentials[mid], tau, k):
            hi = mid
        else:
            lo = mid
    return lo


def _probe(inst: Instance, lam, tau, k):
    """(respected, spans at least k) of one growth-and-prune run."""
    out = grow(inst, lam, tau)
    respected = all(out.trace[i].event == tau[i] for i in range(len(tau))) \
        if len(out.trace) >= len(tau) else False
    host = PruneGraph(inst, frozenset(inst.vertices), out.tree.edges)
    spans = len(prune(host, out.processed_vertex_sets()).vertices) >= k
    return respected, spans


def _processable_events(inst: Instance, lam, tau):
    """Events that a respected list could name next at this potential."""
    try:
        state = grow(inst, lam, tau, stop_at=len(tau) + 1)
    except ValidationError:
        return []
    d1, d2, tight_edges, tight_keys = next_deltas(state)
    if tight_edges or tight_keys:
        return [EdgeEvent(i) for i in tight_edges] + \
               [SubsetEvent(key) for key in tight_keys]
    cands = [x for x in (d1, d2) if x is not None and x is not INF]
    if not cands:
        return []
    delta = min(cands)
    fam = state.family
    evs = []
    for e in inst.edges:
        m1, m2 = fam.maximal_set_of(e.u), fam.maximal_set_of(e.v)
        if m1 == m2:
            continue
        acount = (0 if fam.processed[m1] else 1) + (0 if fam.processed[m2] else 1)
        if acount and Fraction(e.cost - state.loads[e.index], acount) == delta:
            evs.append(EdgeEvent(e.index))
    for s in fam.active_sets():
        pl = fam.pi_lambda(s, lam)
        if pl is not INF and pl - fam.inner[s] == delta:
            evs.append(SubsetEvent(fam.key[s]))
    return evs


def _rescue_at(inst: Instance, lam_star, k, budget=400):
    """Search for a tuple anchored exactly at one potential.

    Depth-first over respected lists at lam_star; each extension is tested
    for a straddle against its own prefix.  Used when interval narrowing
    stalls against a potential where the next event changes discontinuously.
    Returns a verified tuple or None.
    """
    spans_memo = {}

    def spans_of(tau):
        if tau not in spans_memo:
            _, sp = _probe(inst, lam_star, tau, k)
            spans_memo[tau] = sp
        return spans_memo[tau]

    limit = 3 * inst.n - 3
    probes = [0]

    def dfs(tau):
        if len(tau) >= limit or probes[0] > budget:
            return None
        base = spans_of(tau)
        for ev in _processable_events(inst, lam_star, tau):
            ext = tau + (ev,)
            probes[0] += 1
            if spans_of(ext) != base:
                ok, _ = verify_threshold(inst, lam_star, ext, k)
                if ok:
                    return ThresholdTuple(lam_star, ext,
                                          "full" if spans_of(ext) else "prefix")
            found = dfs(ext)
            if found is not None:
                return found
        return None

    return dfs(())


def threshold_search(inst: Instance, k, check=False, record=None) -> ThresholdTuple:
    """Find a threshold tuple, assuming the zero-potential run spans under k.

    Follows the interval-narrowing scheme with one strengthening: the list is
    kept respected at both interval endpoints by explicit verification.  When
    a chosen endpoint fails respectedness for the extended list (a frozen
    edge can become tight exactly there), the iteration either returns the
    midpoint tuple directly, keeps the half interval on which the extension
    is sound, or retries on a halved interval with the unextended list.
    """
    if not 0 <= k <= inst.n:
        raise ValidationError("k out of range")
    a, b = Fraction(0), inst.total_cost() + 1
    tau = ()
    extension_bound = 3 * inst.n - 3
    sym = SymbolicRun(inst)
    fallbacks = 0
    for _round in range(4 * extension_bound + 120):
        i = len(tau) + 1
        if check:
            if spans_at_least_k(inst, a, tau, k):
                raise InternalInvariantError("search invariant: low end spans k")
            if not spans_at_least_k(inst, b, tau, k):
                raise InternalInvariantError("search invariant: high end under k")
            if not (is_respected(inst, a, tau) and is_respected(inst, b, tau)):
                raise InternalInvariantError("search invariant: list not respected")
        pots = [a] + sym.candidate_potentials(a, b) + [b]
        j = find_crossing_index(inst, tau, k, pots, verify_bracket=check)
        lam0 = (pots[j] + pots[j + 1]) / 2
        out0 = grow(inst, lam0, tau)
        if len(out0.trace) < i:
            raise InternalInvariantError("growth ended before the search iteration")
        sigma = out0.trace[i - 1].event
        if record is not None:
            record.append(SearchRecord(tau, (a, b), sym.object_functions(),
                                       list(pots), j, lam0, sigma))
        ext = tau + (sigma,)
        if len(ext) > extension_bound:
            raise InternalInvariantError("tie-breaking list exceeded its bound")
        host0 = PruneGraph(inst, frozenset(inst.vertices), out0.tree.edges)
        nat0 = len(prune(host0, out0.processed_vertex_sets()).vertices) >= k
        _, f0 = _probe(inst, lam0, ext, k)
        if f0 != nat0:
            return ThresholdTuple(lam0, ext, "full" if f0 else "prefix")
        resp_l, f_l = _probe(inst, pots[j], ext, k)
        if resp_l and f_l:
            return ThresholdTuple(pots[j], ext, "full")
        resp_r, f_r = _probe(inst, pots[j + 1], ext, k)
        if resp_r and not f_r:
            return ThresholdTuple(pots[j + 1], ext, "prefix")
        new_a, new_b = None, None
        if resp_l and resp_r:
            new_a, new_b = pots[j], pots[j + 1]
        elif resp_l:
            if f0:
                new_a, new_b = pots[j], lam0
            else:
                fallback = (lam0, pots[j + 1], pots[j + 1], True)
        elif resp_r:
            if not f0:
                new_a, new_b = lam0, pots[j + 1]
            else:
                fallback = (pots[j], lam0, pots[j], False)
        else:
            if f0:
                fallback = (pots[j], lam0, pots[j], False)
            else:
                fallback = (lam0, pots[j + 1], pots[j + 1], True)
        if new_a is not None:
            tau = ext
            a, b = new_a, new_b
            sym.extend(sigma)
            fallbacks = 0
            continue
        # endpoint anchor is not respected for the extension: keep the old
        # list on the halved interval; after repeated halvings toward the
        # same anchor, try alternative last entries right at it
        a, b, anchor, _anchor_spans = fallback
        fallbacks += 1
        if fallbacks >= 3:
            rescued = _rescue_at(inst, anchor, k)
            if rescued is not None:
                return rescued
            if fallbacks >= 25:
                raise InternalInvariantError(
                    "threshold search stalled at a non-respected anchor")
    raise InternalInvariantError("threshold search exceeded its iteration bound")


def verify_threshold(inst: Instance, lam, tau, k):
    """Check the threshold definition plus the structural dichotomy.

    Returns (ok, diagnostics).  Verifies: the list is respected, the spanned
    counts of the list and its prefix straddle k, the dual vectors of both
    runs agree, and the outputs differ by exactly one edge or one subset
    according to the kind of the last entry.
    """
    diags = []
    tau = tuple(tau)
    if not tau:
        return False, ["tie-breaking list is empty"]
    lam = Fraction(lam)
    if lam < 0:
        return False, ["negative potential"]
    out_full = grow(inst, lam, tau)
    if [t.event for t in out_full.trace[:len(tau)]] != list(tau):
        return False, ["list not respected at this potential"]
    out_pref = grow(inst, lam, tau[:-1])
    full_tree, _ = run_gw(inst, lam, tau)
    pref_tree, _ = run_gw(inst, lam, tau[:-1])
    nf, np_ = len(full_tree.vertices), len(pref_tree.vertices)
    if not (nf >= k > np_ or nf < k <= np_):
        diags.append("no straddle: %d and %d against k=%d" % (nf, np_, k))
    if out_full.family.y_by_key() != out_pref.family.y_by_key():
        diags.append("dual vectors differ")
    sigma = tau[-1]
    bfull = {tuple(sorted(s)) for s in out_full.processed_sets}
    bpref = {tuple(sorted(s)) for s in out_pref.processed_sets}
    if isinstance(sigma, EdgeEvent):
        if bfull != bpref:
            diags.append("edge case: processed collections differ")
        if sigma.index in out_pref.tree.edges:
            diags.append("edge case: last edge already in the prefix tree")
        if not out_full.tree.edges <= out_pref.tree.edges | {sigma.index}:
            diags.append("edge case: trees differ by more than the last edge")
    else:
        if out_full.tree.edges != out_pref.tree.edges:
            diags.append("subset case: trees differ")
        if sigma.key in bpref:
            diags.append("subset case: last subset already processed by prefix")
        if bfull != bpref | {sigma.key}:
            diags.append("subset case: collections differ by more than the subset")
    return not diags, diags


def format_threshold(tt: ThresholdTuple) -> str:
    return "lambda=%s; tau=[%s]" % (format_scalar(tt.lam),
                                    ", ".join(format_event(e) for e in tt.tau))


def parse_threshold(text: str) -> ThresholdTuple:
    text = text.strip()
    if not text.startswith("lambda="):
        raise ValidationError("bad threshold tuple %r" % text)
    lam_part, _, tau_part = text.partition(";")
    lam = parse_scalar(lam_part[len("lambda="):])
    tau_part = tau_part.strip()
    if not tau_part.startswith("tau=[") or not tau_part.endswith("]"):
        raise ValidationError("bad threshold tuple %r" % text)
    inner = tau_part[len("tau=["):-1].strip()
    tau = tuple(parse_event(tok) for tok in inner.split(",") if tok.strip()) if inner else ()
    return ThresholdTuple(lam, tau, "unknown")
