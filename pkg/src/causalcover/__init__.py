"""Network reconstruction from ordered cascade traces by per-node set covering,
with description-length early stopping for lossy data."""

from .analysis import BoundsReport, EvalReport, bounds, evaluate, heuristic_h1, heuristic_h2, tp_lower
from .graph import (
    MarkerDataset,
    Network,
    ParseError,
    is_globally_consistent,
    is_locally_consistent,
    load_network,
    load_traces,
    save_network,
    save_traces,
)
from .mdl import DlBreakdown, description_length, rank_edges, reconstruct_mdl
from .setcover import CoverPlan, NodeCoverInstance, build_instance, greedy_cover, naive1, naive2, reconstruct_cover
from .synth import NoiseParams, SirParams, apply_noise, generate_er, simulate_dataset, simulate_marker

__all__ = [
    "BoundsReport", "CoverPlan", "DlBreakdown", "EvalReport", "MarkerDataset", "Network",
    "NodeCoverInstance", "NoiseParams", "ParseError", "SirParams", "apply_noise", "bounds",
    "build_instance", "description_length", "evaluate", "generate_er", "greedy_cover",
    "heuristic_h1", "heuristic_h2", "is_globally_consistent", "is_locally_consistent",
    "load_network", "load_traces", "naive1", "naive2", "rank_edges", "reconstruct_cover",
    "reconstruct_mdl", "save_network", "save_traces", "simulate_dataset", "simulate_marker",
    "tp_lower",
]
