"""Convex partitions, relative inradii and inradius-sum inequalities."""

from .extend2d import extend_partition
from .geom import AffineFunc, Halfspace, HPolyhedron, PolygonV, support
from .inradius import InradiusResult, relative_inradius
from .lp import LpProblem, solve_lp
from .partition import (AffineSpec, CellSet, PartitionTree, TreeNode, build_affine_cells,
                        flatten_tree, hierarchical_cells, voronoi_functions)
from .verify import gen_instance, kadets_sum, sweep_translation, translation_region_2d

__version__ = "0.1.0"

__all__ = [
    "AffineFunc",
    "AffineSpec",
    "CellSet",
    "HPolyhedron",
    "Halfspace",
    "InradiusResult",
    "LpProblem",
    "PartitionTree",
    "PolygonV",
    "TreeNode",
    "build_affine_cells",
    "extend_partition",
    "flatten_tree",
    "gen_instance",
    "hierarchical_cells",
    "kadets_sum",
    "relative_inradius",
    "solve_lp",
    "support",
    "sweep_translation",
    "translation_region_2d",
    "voronoi_functions",
]
