"""Prepare graph adjacency states and estimate motif counts from them."""

from .errors import (
    ConfigError,
    EmptyGraphError,
    ParseError,
    PostselectionError,
    ResourceError,
    UndefinedCellError,
)
from .graph import Graph, MotifKind, count_motifs, er_generate, hamming, parse_edge_list

__all__ = [
    "ConfigError",
    "EmptyGraphError",
    "Graph",
    "MotifKind",
    "ParseError",
    "PostselectionError",
    "ResourceError",
    "UndefinedCellError",
    "count_motifs",
    "er_generate",
    "hamming",
    "parse_edge_list",
]
