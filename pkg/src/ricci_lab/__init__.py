"""Numerical laboratory for multiply-warped sphere metrics, Ricci flow
smoothing of conical tips, gradient soliton profiles, Ricci-DeTurck
stability, and the eigenvalue-simplex combinatorics that organizes them.

Conventions used throughout:
  * curvature quantities are reported in g-orthonormal frames, with
    sec(e_i, e_j) = Rm(e_i ∧ e_j, e_i ∧ e_j), so the unit round sphere
    has all sectional curvatures +1;
  * units of curvature are inverse length squared;
  * gradient solitons satisfy Ric + λ g = Hess f with λ = 0 for steady
    profiles and λ = +1 for the expanding time-one slice.
"""

__version__ = "0.1.0"

from .warped import (
    SuspensionSpec,
    WarpLayer,
    SuspensionChain,
    build_suspension,
    layer_curvature,
    min_rm_over_suspension,
)
from .fd_curvature import CurvatureReport, curvature_oracle, curvature_at_point
from .solitons import (
    SolitonProfile,
    EigenvalueVector,
    cigar_profile,
    bryant_shoot,
    product_steady,
    expander_shoot,
    tip_ricci_eigenvalues,
    soliton_residual,
    hamilton_identity_deviation,
)
from .flow import (
    MetricGrid1D,
    FlowTrajectory,
    GlueParams,
    suspension_to_grid,
    glue_expander,
    evolve_ricci_flow,
    grid_curvature,
)
from .distances import distance_profile, gh_estimate
from .deturck import (
    PerturbationField,
    deturck_evolve,
    stability_ratio,
    deturck_ode_pullback,
    shrinking_round_background,
)
from .simplex import (
    SimplexPoint,
    FaceDescriptor,
    face_membership,
    delta_vertex,
    contraction_r,
    build_phi,
    pl_degree,
    surjectivity_check,
)

__all__ = [
    "SuspensionSpec",
    "WarpLayer",
    "SuspensionChain",
    "build_suspension",
    "layer_curvature",
    "min_rm_over_suspension",
    "CurvatureReport",
    "curvature_oracle",
    "curvature_at_point",
    "SolitonProfile",
    "EigenvalueVector",
    "cigar_profile",
    "bryant_shoot",
    "product_steady",
    "expander_shoot",
    "tip_ricci_eigenvalues",
    "soliton_residual",
    "hamilton_identity_deviation",
    "MetricGrid1D",
    "FlowTrajectory",
    "GlueParams",
    "suspension_to_grid",
    "glue_expander",
    "evolve_ricci_flow",
    "grid_curvature",
    "distance_profile",
    "gh_estimate",
    "PerturbationField",
    "deturck_evolve",
    "stability_ratio",
    "deturck_ode_pullback",
    "shrinking_round_background",
    "SimplexPoint",
    "FaceDescriptor",
    "face_membership",
    "delta_vertex",
    "contraction_r",
    "build_phi",
    "pl_degree",
    "surjectivity_check",
]
