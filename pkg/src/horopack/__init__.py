"""Decorated ideal triangulations, horoball packings and cusp areas.

Submodules:

- ``hyp2``: upper half-plane geometry (Moebius maps, horoballs, ideal triangles)
- ``surface``: half-edge triangulations and the subdivided icosahedron family
- ``decor``: corner-area decorations, their checks and the explicit family decoration
- ``develop``: developing map, cusp holonomy, embedding checks and figures
- ``optimize``: maximising the smallest cusp area
- ``analysis``: slope lengths, the length-6 gate and the Farey disk probe
- ``persist``: canonical JSON files
- ``cli``: the ``horopack`` command
"""

from .analysis import (CuspBasis, Slope, dense_packing, farey_points, six_theorem_gate,
                       slope_length, transverse_disk_obstruction)
from .decor import (C1_SATURATING, TARGET_AREA, CornerDecoration, DecorationParams,
                    analyze_recursion, check_geometric, choose_m_for_epsilon,
                    corner_to_edge, cusp_areas, edge_to_corner, paper_decoration,
                    uniform_decoration)
from .develop import (cusp_holonomy, develop, embedded_cusp_check, render_svg)
from .hyp2 import INF, Horoball, IdealTriangleGeom, Mobius, horoball_distance
from .optimize import OptimizeConfig, density, maximize_min_cusp_area
from .persist import load_surface, save_surface
from .surface import Triangulation, family, icosahedron, thrice_punctured_sphere

__version__ = "0.1.0"

__all__ = [
    "CuspBasis", "Slope", "dense_packing", "farey_points", "six_theorem_gate",
    "slope_length", "transverse_disk_obstruction",
    "C1_SATURATING", "TARGET_AREA", "CornerDecoration", "DecorationParams",
    "analyze_recursion", "check_geometric", "choose_m_for_epsilon", "corner_to_edge",
    "cusp_areas", "edge_to_corner", "paper_decoration", "uniform_decoration",
    "cusp_holonomy", "develop", "embedded_cusp_check", "render_svg",
    "INF", "Horoball", "IdealTriangleGeom", "Mobius", "horoball_distance",
    "OptimizeConfig", "density", "maximize_min_cusp_area",
    "load_surface", "save_surface",
    "Triangulation", "family", "icosahedron", "thrice_punctured_sphere",
]
