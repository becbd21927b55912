"""Outer approximation driver: best-of loop with instance reduction.

Each round either the zero-potential run already spans k vertices (store it
and stop) or a threshold tuple is searched, a k-vertex tree is picked and
stored, and the instance shrinks to the root-side child of the final merge.
The stored tree with the smallest objective against the original instance is
returned, together with an exact-arithmetic certificate of every inequality
the approximation argument rests on.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction

from .errors import CertificateError, InternalInvariantError, ValidationError
from .growth import EdgeEvent, SubsetEvent, format_event, parse_event
from .gw import run_gw
from .instance import Instance, Tree, induce_subgraph, objective, validate_instance
from .laminar import LaminarFamily
from .picking import pick_tree
from .rationals import format_scalar, parse_scalar
from .threshold import (ThresholdTuple, format_threshold, threshold_search,
                        verify_threshold)


@dataclass(frozen=True)
class Inequality:
    name: str
    lhs: Fraction
    rhs: Fraction

    def holds(self) -> bool:
        return self.lhs <= self.rhs


@dataclass
class CertificateBundle:
    branch: str              # "gw0" or "pv"
    lam: Fraction
    y_support: list          # (canonical key, Fraction) pairs, nonzero duals
    inequalities: list
    witness_key: tuple       # W, pv branch only
    w: object                # picked vertex, pv branch only

    def verify(self):
        for ineq in self.inequalities:
            if not ineq.holds():
                raise CertificateError("%s: %s > %s" % (
                    ineq.name, format_scalar(ineq.lhs), format_scalar(ineq.rhs)))


@dataclass
class IterationReport:
    branch: str
    vertices: tuple          # vertex set of the instance this round ran on
    lam: Fraction
    tau: tuple
    tree: Tree
    objective: Fraction      # against the original instance
    certificate: CertificateBundle


@dataclass
class Solution:
    tree: Tree
    edge_cost: Fraction
    penalty_cost: Fraction
    objective: Fraction
    iterations: list
    chosen: int

    @property
    def certificate(self):
        return self.iterations[self.chosen].certificate


def _edge_load(fam: LaminarFamily, e) -> Fraction:
    total = Fraction(0)
    for sid in range(len(fam)):
        mem = fam.members[sid]
        if (e.u in mem) != (e.v in mem):
            total += fam.y[sid]
    return total


def _ysum(fam: LaminarFamily, sids) -> Fraction:
    return sum((fam.y[s] for s in sids), Fraction(0))


def certify_gw0(inst: Instance, gout, pruned: Tree) -> CertificateBundle:
    """Edge and penalty bounds for the zero-potential branch."""
    fam = gout.family
    spanned = pruned.vertices
    by_index = {e.index: e for e in inst.edges}
    lhs_edges = sum((by_index[i].cost for i in pruned.edges), Fraction(0))
    crossing = [s for s in fam.crossing_sets(spanned) if not fam.contains_root[s]]
    ineqs = [Inequality("gw0-edge-cost", lhs_edges, 2 * _ysum(fam, crossing))]
    missing = frozenset(inst.vertices) - spanned
    lhs_pen = sum((inst.penalties[v] for v in missing), Fraction(0))
    ineqs.append(Inequality("gw0-penalty", lhs_pen,
                            _ysum(fam, fam.contained_sets(missing))))
    tight_gap = sum((by_index[i].cost - _edge_load(fam, by_index[i])
                     for i in pruned.edges), Fraction(0))
    ineqs.append(Inequality("gw0-edges-tight", tight_gap, Fraction(0)))
    if tight_gap != 0:
        raise CertificateError("gw0 branch kept a non-tight edge")
    bundle = CertificateBundle("gw0", Fraction(0),
                               sorted(fam.y_by_key().items()), ineqs, (), None)
    bundle.verify()
    return bundle


def _degree_bound_rows(inst: Instance, out_minus, tree: Tree, wset, w):
    """Replay the growth trace structurally; one (lhs, rhs) row per boundary."""
    fam = LaminarFamily(inst)
    by_index = {e.index: e for e in inst.edges}
    tpairs = [(by_index[i].u, by_index[i].v) for i in tree.edges]
    rows = []

    def snap():
        active = [s for s in fam.active_sets() if fam.members[s] & tree.vertices]
        lhs = 0
        for s in active:
            mem = fam.members[s]
            lhs += sum(1 for u, v in tpairs if (u in mem) != (v in mem))
        aw = sum(1 for s in active if fam.members[s] <= wset and w in fam.members[s])
        rows.append((lhs, 2 * (len(active) - aw)))

    snap()
    for entry in out_minus.trace:
        ev = entry.event
        if isinstance(ev, EdgeEvent):
            e = by_index[ev.index]
            fam.merge(fam.maximal_set_of(e.u), fam.maximal_set_of(e.v))
        else:
            fam.mark_processed(fam.find_by_key(ev.key))
        snap()
    return rows


def certify_pv(inst: Instance, ctx, tree: Tree) -> CertificateBundle:
    """Edge, penalty, combined, and per-iteration degree bounds for picking."""
    fam = ctx.out_minus.family
    lam = ctx.out_minus.lam
    wset = fam.members[ctx.witness_set]
    w = ctx.w
    by_index = {e.index: e for e in inst.edges}
    lw_w = [s for s in fam.sets_containing(w) if fam.members[s] <= wset]
    y_lww = _ysum(fam, lw_w)
    cost = sum((by_index[i].cost for i in tree.edges), Fraction(0))
    ineqs = [Inequality("pv-edge-cost", cost,
                        2 * _ysum(fam, fam.crossing_sets(tree.vertices)) - 2 * y_lww)]
    missing = frozenset(inst.vertices) - tree.vertices
    pen = sum((inst.penalties[v] for v in missing), Fraction(0)) + lam * len(missing)
    ineqs.append(Inequality("pv-penalty", pen,
                            _ysum(fam, fam.contained_sets(missing)) + y_lww))
    ineqs.append(Inequality("pv-combined", cost + 2 * pen,
                            2 * _ysum(fam, fam.crossing_sets(inst.vertices))))
    tight_gap = sum((by_index[i].cost - _edge_load(fam, by_index[i])
                     for i in tree.edges), Fraction(0))
    ineqs.append(Inequality("pv-edges-tight", tight_gap, Fraction(0)))
    if tight_gap != 0:
        raise CertificateError("picked tree kept a non-tight edge")
    rows = _degree_bound_rows(inst, ctx.out_minus, tree, wset, w)
    worst = 0
    for i, (lhs, rhs) in enumerate(rows):
        if lhs > rhs:
            raise CertificateError("degree bound fails at boundary %d: %d > %d"
                                   % (i + 1, lhs, rhs))
        if rhs - lhs < rows[worst][1] - rows[worst][0]:
            worst = i
    ineqs.append(Inequality("pv-degree-bound@%d" % (worst + 1),
                            Fraction(rows[worst][0]), Fraction(rows[worst][1])))
    bundle = CertificateBundle("pv", lam, sorted(fam.y_by_key().items()),
                               ineqs, fam.key[ctx.witness_set], w)
    bundle.verify()
    return bundle


def reduce_step(g: Instance, fam: LaminarFamily) -> Instance:
    """Shrink to the root-side child of the final merge of the whole vertex set."""
    top = fam.maximal_set_of(g.root)
    if fam.members[top] != frozenset(g.vertices):
        raise InternalInvariantError("family top set does not cover the instance")
    ch = fam.children_of(top)
    if ch is None:
        raise InternalInvariantError("cannot reduce a single-vertex instance")
    l_r = ch[0] if fam.contains_root[ch[0]] else ch[1]
    reduced = induce_subgraph(g, fam.members[l_r])
    if reduced.n >= g.n:
        raise InternalInvariantError("reduction removed no vertex")
    return reduced


def solve(inst0: Instance, check=False) -> Solution:
    """Approximate the instance; the result carries per-round certificates."""
    problems = validate_instance(inst0)
    if problems:
        raise ValidationError("; ".join(problems))
    k = inst0.k
    g = inst0
    reports = []
    while g.n >= k:
        pruned, gout = run_gw(g, 0, (), check=check)
        if len(pruned.vertices) >= k:
            cert = certify_gw0(g, gout, pruned)
            reports.append(IterationReport("gw0", g.vertices, Fraction(0), (),
                                           pruned, objective(inst0, pruned), cert))
            break
        tt = threshold_search(g, k, check=check)
        tree, ctx = pick_tree(g, tt.lam, tt.tau, k, check=check)
        cert = certify_pv(g, ctx, tree)
        reports.append(IterationReport("pv", g.vertices, tt.lam, tt.tau, tree,
                                       objective(inst0, tree), cert))
        g = reduce_step(g, ctx.out_minus.family)
    if not reports:
        raise InternalInvariantError("solver loop stored no tree")
    chosen = 0
    for i, rep in enumerate(reports):
        if rep.objective < reports[chosen].objective:
            chosen = i
    best = reports[chosen]
    by_index = {e.index: e for e in inst0.edges}
    edge_cost = sum((by_index[i].cost for i in best.tree.edges), Fraction(0))
    return Solution(best.tree, edge_cost, best.objective - edge_cost,
                    best.objective, reports, chosen)


def check_ratio(sol: Solution, opt: Fraction) -> bool:
    """The approximation guarantee with the doubled penalty term, exactly."""
    return sol.edge_cost + 2 * sol.penalty_cost <= 2 * opt


def verify_opt_lower_bound(inst: Instance, fam: LaminarFamily, lam,
                           opt_tree: Tree) -> bool:
    """Dual lower bound on the optimum via the minimal family superset."""
    lam = Fraction(lam)
    spanned = opt_tree.vertices
    supersets = [s for s in range(len(fam)) if spanned <= fam.members[s]]
    if not supersets:
        raise ValidationError("family has no superset of the optimal tree")
    lstar = min(supersets, key=lambda s: fam.size[s])
    outside = fam.members[lstar] - spanned
    lhs = _ysum(fam, fam.crossing_sets(fam.members[lstar])) - lam * len(outside)
    by_index = {e.index: e for e in inst.edges}
    rhs = sum((by_index[i].cost for i in opt_tree.edges), Fraction(0))
    rhs += sum((inst.penalties[v] for v in outside), Fraction(0))
    return lhs <= rhs


# --- structured result text ---

def solution_to_json(sol: Solution, include_certificate=False) -> str:
    def report_dict(rep: IterationReport):
        d = {"branch": rep.branch,
             "vertices": sorted(rep.vertices),
             "lambda": format_scalar(rep.lam),
             "tau": [format_event(e) for e in rep.tau],
             "tree_edges": sorted(rep.tree.edges),
             "tree_vertices": sorted(rep.tree.vertices),
             "objective": format_scalar(rep.objective)}
        if include_certificate:
            d["certificate"] = certificate_dict(rep.certificate)
        return d

    doc = {"format": "kpcst-result 1",
           "objective": format_scalar(sol.objective),
           "edge_cost": format_scalar(sol.edge_cost),
           "penalty_cost": format_scalar(sol.penalty_cost),
           "edges": sorted(sol.tree.edges),
           "vertices": sorted(sol.tree.vertices),
           "chosen": sol.chosen,
           "iterations": [report_dict(r) for r in sol.iterations]}
    return json.dumps(doc, sort_keys=True, separators=(",", ": "), indent=1)


def certificate_dict(cert: CertificateBundle):
    return {"branch": cert.branch,
            "lambda": format_scalar(cert.lam),
            "y": [[" ".join(str(v) for v in key), format_scalar(val)]
                  for key, val in cert.y_support],
            "inequalities": [{"name": q.name,
                              "lhs": format_scalar(q.lhs),
                              "rhs": format_scalar(q.rhs)}
                             for q in cert.inequalities],
            "W": sorted(cert.witness_key),
            "w": cert.w}


def check_result(inst0: Instance, text: str):
    """Re-verify a stored result against the instance; returns problem list."""
    problems = []
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        return ["result is not valid JSON: %s" % exc]
    if doc.get("format") != "kpcst-result 1":
        return ["unknown result format"]
    try:
        tree = Tree(frozenset(doc["vertices"]), frozenset(doc["edges"]))
        stated = parse_scalar(doc["objective"])
        recomputed = objective(inst0, tree)
        if recomputed != stated:
            problems.append("objective mismatch: stated %s, recomputed %s"
                            % (doc["objective"], format_scalar(recomputed)))
        if len(tree.vertices) < inst0.k:
            problems.append("tree spans fewer than k vertices")
        for num, rep in enumerate(doc.get("iterations", [])):
            sub = induce_subgraph(inst0, rep["vertices"])
            tau = tuple(parse_event(t) for t in rep["tau"])
            lam = parse_scalar(rep["lambda"])
            if rep["branch"] == "pv":
                ok, diags = verify_threshold(sub, lam, tau, inst0.k)
                if not ok:
                    problems.append("iteration %d threshold tuple invalid: %s"
                                    % (num, "; ".join(diags)))
            rtree = Tree(frozenset(rep["tree_vertices"]),
                         frozenset(rep["tree_edges"]))
            robj = objective(inst0, rtree)
            if robj != parse_scalar(rep["objective"]):
                problems.append("iteration %d objective mismatch" % num)
            cert = rep.get("certificate")
            if cert:
                for q in cert["inequalities"]:
                    if parse_scalar(q["lhs"]) > parse_scalar(q["rhs"]):
                        problems.append("certificate inequality %s violated"
                                        % q["name"])
    except (KeyError, TypeError) as exc:
        problems.append("malformed result document: %r" % exc)
    except (ValidationError, InternalInvariantError) as exc:
        problems.append(str(exc))
    return problems
