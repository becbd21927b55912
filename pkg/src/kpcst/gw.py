"""Composition of one growth run with the pruning of its output tree."""

from __future__ import annotations

from .instance import Instance, Tree
from .growth import grow
from .pruning import PruneGraph, prune


def run_gw(inst: Instance, lam, tau=(), check=False):
    """Grow at the given potential, prune with the processed collection.

    Returns (pruned tree, growth output).
    """
    out = grow(inst, lam, tau, check=check)
    host = PruneGraph(inst, frozenset(inst.vertices), out.tree.edges)
    pruned = prune(host, out.processed_vertex_sets())
    tree = Tree(pruned.vertices, pruned.edge_idxs)
    return tree, out
