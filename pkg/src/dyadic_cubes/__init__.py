"""Dyadic cube systems on finite metric spaces, and certificates deciding
which subsets can be dyadic cubes."""

__version__ = "0.1.0"

from .characterization import (
    CubeCandidateCert,
    auto_params,
    certify_cube_candidate,
    cube_plumpness_params,
    verify_all_cubes_plump,
)
from .cubes import CubeParams, CubeSystem, build_cube_system, locate, verify_cube_system
from .estimators import CubeCertifier, DyadicCubes
from .metric import (
    FiniteMetricSpace,
    SubsetMask,
    dist_to_set,
    doubling_constant,
    from_points,
    open_ball,
    validate_metric,
)
from .nets import (
    DyadicPointSystem,
    NetParams,
    build_adapted_points,
    build_plain_points,
    verify_point_system,
)
from .order import ParentOrder, build_order, descendants, verify_order
from .plumpness import (
    DPlumpParams,
    PlumpParams,
    PlumpnessVerdict,
    check_dplump,
    check_plump,
    dplump_to_plump,
    plump_to_dplump,
    weaken_plump_params,
)

__all__ = [
    "CubeCandidateCert", "CubeCertifier", "CubeParams", "CubeSystem", "DPlumpParams",
    "DyadicCubes", "DyadicPointSystem", "FiniteMetricSpace", "NetParams", "ParentOrder",
    "PlumpParams", "PlumpnessVerdict", "SubsetMask", "auto_params", "build_adapted_points",
    "build_cube_system", "build_order", "build_plain_points", "certify_cube_candidate",
    "check_dplump", "check_plump", "cube_plumpness_params", "descendants", "dist_to_set",
    "doubling_constant", "dplump_to_plump", "from_points", "locate", "open_ball",
    "plump_to_dplump", "validate_metric", "verify_all_cubes_plump", "verify_cube_system",
    "verify_order", "verify_point_system", "weaken_plump_params",
]
