"""Shannon entropy and the redundancy profile of the root-choice tree.

Maximum information at depth t is the capacity of t binary instantiation
decisions, t bits. Realized information is the entropy of the binned
distribution of states actually reached. Redundancy is
``R = 1 - H_realized / H_max``, taken as 0 at depth 0.
"""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass
from typing import Iterable, Sequence

from ..maps import ConfigError, DomainError, MapSpec
from ..policy import RngStream, SelectionPolicy
from ..simulate import DEFAULT_BIN_WIDTH, reachable_tree, run_trajectory

__all__ = [
    "BOLTZMANN",
    "RedundancyProfile",
    "RedundancyRow",
    "entropy_of_counts",
    "redundancy_profile",
    "shannon_entropy",
    "thermodynamic_entropy",
]

# J/K, exact since the 2019 SI redefinition
BOLTZMANN = 1.380649e-23

_NORM_TOL = 1e-9


def shannon_entropy(p: Sequence[float]) -> float:
    """H = -sum p_i log2 p_i in bits, with 0 log 0 = 0."""
    probs = [float(v) for v in p]
    if not probs:
        raise DomainError("empty distribution")
    if any(not math.isfinite(v) or v < 0.0 for v in probs):
        raise DomainError("probabilities must be finite and non-negative")
    if abs(math.fsum(probs) - 1.0) > _NORM_TOL:
        raise DomainError(f"probabilities sum to {math.fsum(probs)!r}, not 1")
    groups = Counter(v for v in probs if v > 0.0)
    if len(groups) == 1:
        # uniform over k outcomes, whatever rounding 1/k carried
        return math.log2(next(iter(groups.values())))
    h = -math.fsum(k * v * math.log2(v) for v, k in groups.items())
    return max(h, 0.0)


def entropy_of_counts(counts: Iterable[int]) -> float:
    """Entropy in bits of the empirical distribution given by positive counts.

    Equal counts are grouped, so k equal counts give exactly log2(k).
    """
    groups = Counter(int(m) for m in counts if m > 0)
    if not groups:
        return 0.0
    if len(groups) == 1:
        return math.log2(next(iter(groups.values())))
    total = sum(m * k for m, k in groups.items())
    h = math.fsum(k * m / total * math.log2(total / m) for m, k in groups.items())
    return max(h, 0.0)


def thermodynamic_entropy(h_bits: float) -> float:
    """Thermodynamic entropy S = k_B H ln 2 in J/K for ``h_bits`` of information."""
    if not h_bits >= 0.0:
        raise DomainError(f"entropy must be non-negative, got {h_bits!r}")
    return BOLTZMANN * h_bits * math.log(2.0)


@dataclass(frozen=True)
class RedundancyRow:
    depth: int
    reachable: int
    h_max_bits: float
    h_bits: float
    redundancy: float


@dataclass(frozen=True)
class RedundancyProfile:
    map: MapSpec
    x0: float
    mode: str  # "all" or a policy token
    bin_width: float
    rows: tuple[RedundancyRow, ...]


def _row(depth: int, counts: list[int]) -> RedundancyRow:
    h = entropy_of_counts(counts)
    h_max = float(depth)
    if depth == 0:
        r = 0.0
    else:
        r = min(1.0, max(0.0, 1.0 - h / h_max))
    return RedundancyRow(depth, len(counts), h_max, h, r)


def redundancy_profile(
    spec: MapSpec,
    x0: float,
    depth: int,
    policy: SelectionPolicy | None = None,
    bin_width: float = DEFAULT_BIN_WIDTH,
    n_samples: int = 10_000,
    seed: int = 0,
) -> RedundancyProfile:
    """Reachable count, maximum and realized entropy, and redundancy per depth.

    With ``policy=None`` every root choice is taken with equal weight and the
    distribution comes exactly from the reachable tree. With a policy,
    ``n_samples`` trajectories (stream i for sample i) are binned at each
    depth; a deterministic policy needs only one.
    """
    if policy is None:
        tree = reachable_tree(spec, x0, depth, bin_width)
        rows = tuple(_row(t, [m for _, m in level]) for t, level in enumerate(tree.levels))
        return RedundancyProfile(spec, tree.x0, "all", bin_width, rows)

    if depth < 0:
        raise ConfigError(f"depth must be >= 0, got {depth}")
    if n_samples < 1:
        raise ConfigError(f"n_samples must be >= 1, got {n_samples}")
    if not bin_width > 0.0:
        raise ConfigError(f"bin_width must be positive, got {bin_width}")
    runs = n_samples if policy.stochastic else 1
    per_depth = [Counter() for _ in range(depth + 1)]
    for i in range(runs):
        if depth == 0:
            states = (float(x0),)
        else:
            states = run_trajectory(spec, x0, policy, depth, RngStream(seed, i)).states
        for t, x in enumerate(states):
            per_depth[t][round(x / bin_width)] += 1
    rows = tuple(_row(t, list(c.values())) for t, c in enumerate(per_depth))
    return RedundancyProfile(spec, float(x0), policy.token, bin_width, rows)

