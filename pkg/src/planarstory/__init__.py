"""Planar graph stories: frames of a fixed drawing where one edge enters at a
time and the edges it crosses leave for good."""

from .geometry import (CrossingGraph, GeometricGraph, InstanceError, Point2D,
                       build_crossing_graph, parse_crossing_graph, parse_geometric_graph,
                       segments_cross)
from .story import (Bounds, PlanarStory, StoryError, StoryTrace, ValidationReport,
                    report_with_free_edges, simulate, upper_bounds, validate)
from .greedy import (GreedyConfig, HeuristicRun, advanced_greedy, phase1_variant_b,
                     phase1_variant_c, run_heuristic, simple_greedy)
from .treewidth import (TreeDecomposition, WidthCapExceeded, degree2_maximum_pair,
                        maximum_pair, min_fill_in_decomposition, pareto_pairs,
                        verify_decomposition)
from .exact import ExactResult, Limits, exact_decision, exact_solve, maximum_independent_set

__version__ = "0.1.0"
