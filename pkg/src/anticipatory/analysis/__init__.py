"""Fixed points, stability, parameter scans and information measures."""

from .fixed_points import (
    Branch,
    Classification,
    FixedPointReport,
    Stability,
    branch_map,
    finite_difference,
    fixed_points,
    stability,
)
from .information import (
    BOLTZMANN,
    RedundancyProfile,
    RedundancyRow,
    entropy_of_counts,
    redundancy_profile,
    shannon_entropy,
    thermodynamic_entropy,
)
from .scans import (
    BifurcationPoint,
    SeparatrixReport,
    SeparatrixRow,
    bifurcation_point,
    bifurcation_scan,
    detect_period,
    period_doubling_onset,
    separatrix_scan,
)

__all__ = [
    "BOLTZMANN",
    "BifurcationPoint",
    "Branch",
    "Classification",
    "FixedPointReport",
    "RedundancyProfile",
    "RedundancyRow",
    "SeparatrixReport",
    "SeparatrixRow",
    "Stability",
    "bifurcation_point",
    "bifurcation_scan",
    "branch_map",
    "detect_period",
    "entropy_of_counts",
    "finite_difference",
    "fixed_points",
    "period_doubling_onset",
    "redundancy_profile",
    "separatrix_scan",
    "shannon_entropy",
    "stability",
    "thermodynamic_entropy",
]
