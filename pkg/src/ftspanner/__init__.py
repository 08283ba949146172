"""Geometric t-spanners and k-vertex-fault-tolerant spanners built on
compressed split-trees and bounded-separated pair decompositions."""
from .generators import generate
from .geometry import AABox, Cone, ConeFrame, box_distance, box_size, build_frame
from .params import SpannerParams, choose_parameters, verify_inequalities
from .spanner import SpannerGraph, build_spanner
from .split_tree import CompressedSplitTree, assign_representatives, build_tree
from .verify import full_report, stretch_factor, verify_vfts
from .vfts import build_vfts

__all__ = [
    "AABox", "Cone", "ConeFrame", "box_distance", "box_size", "build_frame",
    "SpannerParams", "choose_parameters", "verify_inequalities",
    "CompressedSplitTree", "assign_representatives", "build_tree",
    "SpannerGraph", "build_spanner", "build_vfts",
    "full_report", "stretch_factor", "verify_vfts", "generate",
]
__version__ = "0.1.0"
