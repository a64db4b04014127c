"""Hierarchical bipartition routing (HBR) and cost-over-progress greedy
routing on random geometric networks, with the evaluation harness."""

from .geometry import GenerationConfig, GenerationRejected, Mask, Network, Position, WeightModel, generate_network
from .graph import Disconnected, WeightedGraph, sssp
from .greedy import GEO, LMR, RecoveryStrategy, ShortestPathRouter, route_greedy, virtual_coordinates
from .hbr import HbrStructure, build_hbr, hbr_next_hop, route_hbr, simulate_flood
from .trace import RouteTrace

__version__ = "0.1.0"

__all__ = [
    "GEO", "LMR", "Disconnected", "GenerationConfig", "GenerationRejected", "HbrStructure", "Mask",
    "Network", "Position", "RecoveryStrategy", "RouteTrace", "ShortestPathRouter", "WeightModel",
    "WeightedGraph", "build_hbr", "generate_network", "hbr_next_hop", "route_greedy", "route_hbr",
    "simulate_flood", "sssp", "virtual_coordinates",
]
