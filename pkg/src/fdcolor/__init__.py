"""Finitely dependent proper colorings of bounded-degree graphs."""

from .dependence import DependenceReport, check_k_dependence_exact, check_properness
from .exact import ExactJoint, exact_pipeline_distribution
from .graph import Graph, GraphError, build_graph, generate, set_distance
from .insertion import check_k_dependence_line, exact_line_distribution, sample_line
from .pipeline import ColorAssignment, color, color_fiid, color_invariant, flatten
from .randomness import VertexRandomness

__all__ = [
    "ColorAssignment",
    "DependenceReport",
    "ExactJoint",
    "Graph",
    "GraphError",
    "VertexRandomness",
    "build_graph",
    "check_k_dependence_exact",
    "check_k_dependence_line",
    "check_properness",
    "color",
    "color_fiid",
    "color_invariant",
    "exact_line_distribution",
    "exact_pipeline_distribution",
    "flatten",
    "generate",
    "sample_line",
    "set_distance",
]

__version__ = "0.1.0"
