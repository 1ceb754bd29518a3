"""Postselected depth-1 QAOA for MaxCut on regular graphs."""
from .graphs import Graph, ring_graph, grid_graph, sample_configuration_model, sample_simple_regular
from .qaoa import CUBIC_P1, RING_P1, QaoaParams, ZString
from .ising import IsingInstance, Solution, solve
from .postselect import build_couplings, improvement

__all__ = [
    "Graph", "ring_graph", "grid_graph", "sample_configuration_model", "sample_simple_regular",
    "CUBIC_P1", "RING_P1", "QaoaParams", "ZString",
    "IsingInstance", "Solution", "solve",
    "build_couplings", "improvement",
]
__version__ = "0.1.0"
