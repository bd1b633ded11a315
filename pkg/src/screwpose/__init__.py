"""Minimal relative-pose solvers for calibrated cameras constrained by
SE(3) invariants (rotation angle and screw translation), with robust
estimation and synthetic benchmarks."""

from .errors import (
    AllCheiralityFailed,
    DegenerateAxis,
    DegenerateInput,
    EmptySolutionSet,
    NoModelFound,
    NoRealSolutions,
    NotEnoughPoints,
    NullVectorAmbiguous,
    RankDeficient,
    ScrewposeError,
    ZeroScrewDelta,
    ZeroScrewDirection,
    ZeroTranslation,
)
from .geom import (
    BearingPair,
    RigidMotion,
    Se3Invariants,
    axis_angle_rotation,
    cheirality_counts,
    decompose_essential,
    epipolar_residual,
    essential_from_pose,
    normalize_essential,
    random_motion,
    random_rotation,
    rotation_angle,
    rotation_axis,
    sampson_batch,
    screw_translation,
    se3_invariants,
    skew,
    triangulate_depths,
)
from .robust import (
    RansacConfig,
    RansacResult,
    SolverKind,
    numerical_accuracy,
    ransac_estimate,
    rotation_error,
    translation_direction_error,
)
from .solvers import (
    MIN_ANGLE,
    SolutionSet,
    recover_scale,
    solve_2p_to,
    solve_3p_ra_st0,
    solve_4p_st0,
    solve_5p,
)
from .synth import ScenePair, SyntheticConfig, generate_scene

__version__ = "0.1.0"

__all__ = [
    "AllCheiralityFailed",
    "BearingPair",
    "DegenerateAxis",
    "DegenerateInput",
    "EmptySolutionSet",
    "MIN_ANGLE",
    "NoModelFound",
    "NoRealSolutions",
    "NotEnoughPoints",
    "NullVectorAmbiguous",
    "RansacConfig",
    "RansacResult",
    "RankDeficient",
    "RigidMotion",
    "ScenePair",
    "ScrewposeError",
    "Se3Invariants",
    "SolutionSet",
    "SolverKind",
    "SyntheticConfig",
    "ZeroScrewDelta",
    "ZeroScrewDirection",
    "ZeroTranslation",
    "axis_angle_rotation",
    "cheirality_counts",
    "decompose_essential",
    "epipolar_residual",
    "essential_from_pose",
    "generate_scene",
    "normalize_essential",
    "numerical_accuracy",
    "random_motion",
    "random_rotation",
    "ransac_estimate",
    "recover_scale",
    "rotation_angle",
    "rotation_axis",
    "rotation_error",
    "sampson_batch",
    "screw_translation",
    "se3_invariants",
    "skew",
    "solve_2p_to",
    "solve_3p_ra_st0",
    "solve_4p_st0",
    "solve_5p",
    "translation_direction_error",
]
