"""Recursive, incursive and hyperincursive logistic dynamics.

Step solvers for six discrete anticipatory maps, instantiation policies,
trajectory and ensemble engines, and fixed-point, scan and redundancy
analysis.
"""

from .maps import (
    ConfigError,
    DomainError,
    MapKind,
    MapSpec,
    StepOutcome,
    residual,
    solve,
    solve_hyperincursive,
    solve_interaction,
    solve_organization,
    solve_self_organization,
    step_incursive,
    step_recursive,
)
from .policy import Perished, PerishReason, PolicyKind, PolicyState, RngStream, SelectionPolicy, select
from .simulate import (
    LifetimeDistribution,
    ReachableTree,
    SurvivedCap,
    Termination,
    Trajectory,
    lifetime,
    lifetime_distribution,
    lifetimes,
    reachable_tree,
    run_trajectory,
)

__version__ = "0.1.0"
