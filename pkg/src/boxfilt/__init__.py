"""Box filtrations: persistence from covers of LP-grown axis-aligned boxes."""

from .baselines import DtmParams, dtm_filtration, dtm_values, vr_filtration
from .complex import FiltrationComplex, PersistenceDiagram, flag_complex, persistence
from .estimators import BoxFiltration, BoxMapper, DTMFiltration, VietorisRips
from .expansion import (ExpansionProblem, ExpansionSolution, InfeasibleExpansion, SolverConfig,
                        k_optimal_expansion, largest_optimal_expansion, objective_cost,
                        solve_expansion_lp, verify_facet_bounds)
from .filtration import (CoverSequence, box_filtration, compute_m, expand_cover,
                         initial_pixel_cover, initial_point_cover, nerve_filtration)
from .geometry import (Box, PixelGrid, RoundingKind, box_intersection, box_union, neighborhood,
                       pixel_weight, pixelize, point_weight, round_box)
from .mapper import MapperGraph, box_mapper, export_mapper
from .metrics import bottleneck_distance, classical_mds, kmeans, rand_score

__version__ = "0.1.0"

__all__ = [
    "Box", "PixelGrid", "RoundingKind", "box_union", "box_intersection", "neighborhood",
    "point_weight", "pixel_weight", "pixelize", "round_box",
    "ExpansionProblem", "ExpansionSolution", "SolverConfig", "InfeasibleExpansion",
    "objective_cost", "solve_expansion_lp", "largest_optimal_expansion", "k_optimal_expansion",
    "verify_facet_bounds",
    "CoverSequence", "initial_point_cover", "initial_pixel_cover", "compute_m", "expand_cover",
    "nerve_filtration", "box_filtration",
    "FiltrationComplex", "PersistenceDiagram", "flag_complex", "persistence",
    "DtmParams", "vr_filtration", "dtm_values", "dtm_filtration",
    "bottleneck_distance", "rand_score", "classical_mds", "kmeans",
    "MapperGraph", "box_mapper", "export_mapper",
    "BoxFiltration", "VietorisRips", "DTMFiltration", "BoxMapper",
]
