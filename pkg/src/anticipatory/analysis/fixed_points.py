"""Fixed points of the branch maps and their stability multipliers."""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from typing import Callable

import numpy as np

from ..maps import ConfigError, MapKind, MapSpec

__all__ = [
    "FD_STEP",
    "STABILITY_TOL",
    "Branch",
    "Classification",
    "FixedPointReport",
    "Stability",
    "branch_derivative",
    "branch_map",
    "finite_difference",
    "fixed_points",
    "stability",
]

STABILITY_TOL = 1e-6
FD_STEP = 1e-6


class Branch(Enum):
    SINGLE = "single"
    LOWER = "lower"
    UPPER = "upper"
    REAL_CUBIC = "real-cubic"


class Classification(Enum):
    STABLE = "Stable"
    MARGINAL = "Marginal"
    UNSTABLE = "Unstable"


_BRANCHES = {
    MapKind.RECURSIVE: (Branch.SINGLE,),
    MapKind.INCURSIVE: (Branch.SINGLE,),
    MapKind.HYPERINCURSIVE: (Branch.LOWER, Branch.UPPER),
    MapKind.INTERACTION: (Branch.LOWER, Branch.UPPER),
    MapKind.SELF_ORGANIZATION: (Branch.REAL_CUBIC,),
    MapKind.ORGANIZATION: (Branch.LOWER, Branch.UPPER),
}


def _check_branch(spec: MapSpec, branch: Branch) -> None:
    if branch not in _BRANCHES[spec.kind]:
        raise ConfigError(f"{spec.kind.value} map has no {branch.value} branch")


def branch_map(spec: MapSpec, branch: Branch) -> Callable[[float], float]:
    """The single-valued map x_t -> x_{t+1} along one root branch."""
    _check_branch(spec, branch)
    p = spec.param
    sign = -1.0 if branch is Branch.LOWER else 1.0
    kind = spec.kind
    if kind is MapKind.RECURSIVE:
        return lambda x: p * x * (1.0 - x)
    if kind is MapKind.INCURSIVE:
        return lambda x: p * x / (1.0 + p * x)
    if kind is MapKind.HYPERINCURSIVE:
        return lambda x: 0.5 + sign * 0.5 * math.sqrt(1.0 - 4.0 * x / p)
    if kind is MapKind.INTERACTION:
        return lambda x: 1.0 + sign * math.sqrt(x / p)
    if kind is MapKind.SELF_ORGANIZATION:
        return lambda x: 1.0 - float(np.cbrt(x / p))
    return lambda x: 1.0 + sign * math.sqrt(x / (p * (1.0 - x)))


def branch_derivative(spec: MapSpec, branch: Branch, x: float) -> float | None:
    """Closed-form derivative of the branch map at ``x``; ``None`` where it blows up."""
    _check_branch(spec, branch)
    p = spec.param
    sign = -1.0 if branch is Branch.LOWER else 1.0
    kind = spec.kind
    if kind is MapKind.RECURSIVE:
        return p * (1.0 - 2.0 * x)
    if kind is MapKind.INCURSIVE:
        return p / (1.0 + p * x) ** 2
    if kind is MapKind.HYPERINCURSIVE:
        disc = 1.0 - 4.0 * x / p
        if disc <= 0.0:
            return None
        return -sign / (p * math.sqrt(disc))
    if kind is MapKind.INTERACTION:
        if x <= 0.0:
            return None
        return sign / (2.0 * math.sqrt(p * x))
    if kind is MapKind.SELF_ORGANIZATION:
        if x <= 0.0:
            return None
        return -1.0 / (3.0 * p) * (x / p) ** (-2.0 / 3.0)
    if x <= 0.0 or x >= 1.0:
        return None
    h = x / (p * (1.0 - x))
    dh = 1.0 / (p * (1.0 - x) ** 2)
    return sign * dh / (2.0 * math.sqrt(h))


def finite_difference(f: Callable[[float], float], x: float, h: float = FD_STEP) -> float:
    return (f(x + h) - f(x - h)) / (2.0 * h)


def classify(multiplier: float, singular: bool = False, tol: float = STABILITY_TOL) -> Classification:
    if singular or abs(multiplier - 1.0) <= tol:
        return Classification.MARGINAL
    return Classification.STABLE if multiplier < 1.0 else Classification.UNSTABLE


@dataclass(frozen=True)
class Stability:
    multiplier: float
    fd_multiplier: float
    classification: Classification
    singular: bool = False


def stability(spec: MapSpec, branch: Branch, x_star: float, tol: float = STABILITY_TOL) -> Stability:
    """Multiplier |f'(x*)| of the branch map, with a central-difference cross-check.

    Where the closed-form derivative is singular the multiplier is reported
    as infinite and the point classed Marginal with ``singular`` set.
    """
    deriv = branch_derivative(spec, branch, x_star)
    f = branch_map(spec, branch)
    try:
        fd = abs(finite_difference(f, x_star))
    except (ValueError, ZeroDivisionError):
        fd = math.nan
    if deriv is None:
        return Stability(math.inf, fd, Classification.MARGINAL, singular=True)
    m = abs(deriv)
    return Stability(m, fd, classify(m, tol=tol))


@dataclass(frozen=True)
class FixedPointReport:
    map: MapSpec
    branch: Branch
    location: float
    multiplier: float
    fd_multiplier: float
    classification: Classification
    singular: bool = False

    def residual(self) -> float:
        return abs(branch_map(self.map, self.branch)(self.location) - self.location)


def _bisect(g: Callable[[float], float], lo: float, hi: float) -> float:
    """Root of increasing ``g`` on [lo, hi], bisected down to adjacent doubles."""
    while True:
        mid = 0.5 * (lo + hi)
        if mid <= lo or mid >= hi:
            return lo if abs(g(lo)) <= abs(g(hi)) else hi
        gm = g(mid)
        if gm == 0.0:
            return mid
        if gm < 0.0:
            lo = mid
        else:
            hi = mid


def _locations(spec: MapSpec) -> list[tuple[Branch, float]]:
    p = spec.param
    kind = spec.kind
    if kind in (MapKind.RECURSIVE, MapKind.INCURSIVE):
        out = [(Branch.SINGLE, 0.0)]
        if p > 1.0:
            out.append((Branch.SINGLE, 1.0 - 1.0 / p))
        return out
    if kind is MapKind.HYPERINCURSIVE:
        out = [(Branch.LOWER, 0.0)]
        if p > 1.0:
            x = 1.0 - 1.0 / p
            out.append((Branch.UPPER if x >= 0.5 else Branch.LOWER, x))
        return out
    if kind is MapKind.INTERACTION:
        # b x^2 - (2b + 1) x + b = 0; the roots multiply to 1, take the small one
        big = ((2.0 * p + 1.0) + math.sqrt(4.0 * p + 1.0)) / (2.0 * p)
        return [(Branch.LOWER, 1.0 / big)]
    if kind is MapKind.SELF_ORGANIZATION:
        f = branch_map(spec, Branch.REAL_CUBIC)
        return [(Branch.REAL_CUBIC, _bisect(lambda x: x - f(x), 0.0, 1.0))]
    f = branch_map(spec, Branch.LOWER)
    # g(x) = x - f(x) runs from -1 at x = 0 to +inf as x -> 1
    hi = math.nextafter(1.0, 0.0)
    return [(Branch.LOWER, _bisect(lambda x: x - f(x), 0.0, hi))]


def fixed_points(spec: MapSpec) -> list[FixedPointReport]:
    """Fixed points in [0, 1] of every real branch map, with stability."""
    reports = []
    for branch, x in _locations(spec):
        st = stability(spec, branch, x)
        reports.append(
            FixedPointReport(spec, branch, x, st.multiplier, st.fd_multiplier, st.classification, st.singular)
        )
    return reports
