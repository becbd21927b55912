"""Exact primal-dual solver for the rooted k-prize-collecting Steiner tree."""

from .errors import (CertificateError, InternalInvariantError, KpcstError,
                     LimitError, NotRespectedError, ParseError, ValidationError)
from .growth import (EdgeEvent, GrowthOutput, GrowthState, SubsetEvent,
                     format_event, format_trace, grow, is_respected,
                     next_deltas, parse_event, select_event)
from .gw import run_gw
from .instance import (Edge, Instance, Tree, generate_random, induce_subgraph,
                       objective, parse_instance, serialize_instance,
                       validate_instance)
from .laminar import LaminarFamily, canonical_key
from .oracle import ExactResult, exact_solve, mst_of_subset
from .picking import PickContext, assemble_tree, choose_t, pick_parts, pick_tree
from .pruning import (PruneGraph, SubsetPath, degree_of, find_cycle, is_pruned,
                      prune, prune_trace_minimal, subset_path_for_edge_event,
                      subset_path_for_subset_event, verify_subset_path)
from .rationals import (AffineFn, INF, INFINITE_FN, Rational, affine_eval,
                        affine_intersect, format_scalar, parse_scalar,
                        rational_normalize)
from .solver import (CertificateBundle, Solution, check_ratio, check_result,
                     reduce_step, solution_to_json, solve,
                     verify_opt_lower_bound)
from .threshold import (ObjectCollection, ThresholdTuple, diverging_potentials,
                        find_crossing_index, format_threshold,
                        increase_functions, parse_threshold, spans_at_least_k,
                        threshold_search, verify_threshold)
