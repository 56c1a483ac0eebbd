"""Closed-form step solvers for the six logistic-family maps.

Each implicit recurrence is solved for the next state in closed form and
every mathematical solution is returned, real or complex:

    recursive        x' = a x (1 - x)
    incursive        x' = a x (1 - x')          ->  x' = a x / (1 + a x)
    hyperincursive   x  = a x' (1 - x')         ->  x' = 1/2 -+ 1/2 sqrt(1 - 4x/a)
    interaction      x  = b (1 - x')^2          ->  x' = 1 -+ sqrt(x/b)
    self-organization x = c (1 - x')^3          ->  x' = 1 - s w,  s = (x/c)^(1/3),
                                                    w in the cube roots of unity
    organization     x  = d (1 - x')^2 (1 - x)  ->  x' = 1 -+ sqrt(x / (d (1 - x)))

Roots are held as Python ``complex`` values; a real root has ``imag == 0.0``
exactly. The complex pair of the self-organization cubic is what the
literature loosely calls its "imaginary" roots: they have real part
``1 + s/2``, not zero.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np

__all__ = [
    "EPS_DOMAIN",
    "ConfigError",
    "DomainError",
    "MapKind",
    "MapSpec",
    "StepOutcome",
    "in_domain",
    "residual",
    "solve",
    "solve_hyperincursive",
    "solve_incursive",
    "solve_interaction",
    "solve_organization",
    "solve_recursive",
    "solve_self_organization",
    "step_incursive",
    "step_recursive",
]

EPS_DOMAIN = 1e-12

_CUBE_ROOT_OF_UNITY = complex(-0.5, math.sqrt(3.0) / 2.0)


class DomainError(ValueError):
    """A state or parameter lies outside where an operation is defined."""


class ConfigError(ValueError):
    """An invalid map, policy or run configuration."""


class MapKind(Enum):
    RECURSIVE = "recursive"
    INCURSIVE = "incursive"
    HYPERINCURSIVE = "hyperincursive"
    INTERACTION = "interaction"
    SELF_ORGANIZATION = "self-organization"
    ORGANIZATION = "organization"

    @property
    def degree(self) -> int:
        """Polynomial degree of the recurrence in the next state."""
        return _DEGREE[self]

    @property
    def multi_root(self) -> bool:
        return self in (MapKind.HYPERINCURSIVE, MapKind.INTERACTION, MapKind.ORGANIZATION)


_DEGREE = {
    MapKind.RECURSIVE: 1,
    MapKind.INCURSIVE: 1,
    MapKind.HYPERINCURSIVE: 2,
    MapKind.INTERACTION: 2,
    MapKind.SELF_ORGANIZATION: 3,
    MapKind.ORGANIZATION: 2,
}

_ALIASES = {
    "recursive": MapKind.RECURSIVE,
    "rec": MapKind.RECURSIVE,
    "logistic": MapKind.RECURSIVE,
    "incursive": MapKind.INCURSIVE,
    "inc": MapKind.INCURSIVE,
    "hyperincursive": MapKind.HYPERINCURSIVE,
    "hyper": MapKind.HYPERINCURSIVE,
    "interaction": MapKind.INTERACTION,
    "int": MapKind.INTERACTION,
    "self-organization": MapKind.SELF_ORGANIZATION,
    "selforg": MapKind.SELF_ORGANIZATION,
    "organization": MapKind.ORGANIZATION,
    "org": MapKind.ORGANIZATION,
}


@dataclass(frozen=True)
class MapSpec:
    """One of the six maps together with its positive control parameter."""

    kind: MapKind
    param: float

    def __post_init__(self) -> None:
        if not isinstance(self.kind, MapKind):
            raise ConfigError(f"unknown map kind {self.kind!r}")
        try:
            param = float(self.param)
        except (TypeError, ValueError):
            raise ConfigError(f"param must be a real number, got {self.param!r}") from None
        if not math.isfinite(param) or param <= 0.0:
            raise ConfigError(f"param must be positive and finite, got {self.param!r}")
        object.__setattr__(self, "param", param)

    @classmethod
    def parse(cls, token: str, param: float) -> MapSpec:
        try:
            kind = _ALIASES[token.strip().lower()]
        except KeyError:
            raise ConfigError(f"unknown map {token!r}; expected one of {sorted(_ALIASES)}") from None
        return cls(kind, param)

    @property
    def token(self) -> str:
        return self.kind.value


@dataclass(frozen=True)
class StepOutcome:
    """All candidate next states produced by one step from ``x``.

    ``roots`` is sorted by real part, then imaginary part. A singular
    outcome (vanishing denominator) carries no roots.
    """

    map: MapSpec
    x: float
    roots: tuple[complex, ...]
    singular: bool = False

    @property
    def real_roots(self) -> tuple[float, ...]:
        return tuple(r.real for r in self.roots if r.imag == 0.0)

    @property
    def has_complex(self) -> bool:
        return any(r.imag != 0.0 for r in self.roots)


def in_domain(x: float, eps: float = EPS_DOMAIN) -> bool:
    return -eps <= x <= 1.0 + eps


def _check_finite(x: float) -> float:
    x = float(x)
    if not math.isfinite(x):
        raise DomainError(f"state must be finite, got {x!r}")
    return x


def _sorted(roots) -> tuple[complex, ...]:
    return tuple(sorted((complex(r) for r in roots), key=lambda r: (r.real, r.imag)))


def step_recursive(x: float, a: float) -> float:
    x = _check_finite(x)
    return a * x * (1.0 - x)


def step_incursive(x: float, a: float) -> float:
    x = _check_finite(x)
    denom = 1.0 + a * x
    if denom == 0.0:
        raise DomainError(f"incursive step undefined at x={x!r}, a={a!r}")
    return a * x / denom


def solve_recursive(x: float, a: float) -> StepOutcome:
    return StepOutcome(MapSpec(MapKind.RECURSIVE, a), float(x), (complex(step_recursive(x, a)),))


def solve_incursive(x: float, a: float) -> StepOutcome:
    return StepOutcome(MapSpec(MapKind.INCURSIVE, a), float(x), (complex(step_incursive(x, a)),))


def _quadratic_about(center: float, half_width_sq: float) -> tuple[complex, complex]:
    """Roots ``center -+ sqrt(half_width_sq)``, complex when the radicand is negative."""
    if half_width_sq >= 0.0:
        w = math.sqrt(half_width_sq)
        return complex(center - w), complex(center + w)
    w = math.sqrt(-half_width_sq)
    return complex(center, -w), complex(center, w)


def solve_hyperincursive(x: float, a: float) -> StepOutcome:
    x = _check_finite(x)
    spec = MapSpec(MapKind.HYPERINCURSIVE, a)
    disc = 1.0 - 4.0 * x / spec.param
    if disc >= 0.0:
        upper = 0.5 + 0.5 * math.sqrt(disc)
        # product of the roots is x/a; avoids cancellation in the small root
        lower = (x / spec.param) / upper
        roots = (complex(lower), complex(upper))
    else:
        roots = _quadratic_about(0.5, 0.25 * disc)
    return StepOutcome(spec, x, _sorted(roots))


def solve_interaction(x: float, b: float) -> StepOutcome:
    x = _check_finite(x)
    spec = MapSpec(MapKind.INTERACTION, b)
    return StepOutcome(spec, x, _sorted(_quadratic_about(1.0, x / spec.param)))


def solve_self_organization(x: float, c: float) -> StepOutcome:
    x = _check_finite(x)
    spec = MapSpec(MapKind.SELF_ORGANIZATION, c)
    if x < 0.0:
        raise DomainError(f"self-organization step needs x >= 0, got {x!r}")
    if x == 0.0:
        return StepOutcome(spec, x, (1 + 0j, 1 + 0j, 1 + 0j))
    s = float(np.cbrt(x / spec.param))
    w = s * _CUBE_ROOT_OF_UNITY
    roots = (complex(1.0 - s), complex(1.0 - w.real, -w.imag), complex(1.0 - w.real, w.imag))
    return StepOutcome(spec, x, _sorted(roots))


def solve_organization(x: float, d: float) -> StepOutcome:
    x = _check_finite(x)
    spec = MapSpec(MapKind.ORGANIZATION, d)
    if abs(1.0 - x) <= EPS_DOMAIN:
        return StepOutcome(spec, x, (), singular=True)
    return StepOutcome(spec, x, _sorted(_quadratic_about(1.0, x / (spec.param * (1.0 - x)))))


_SOLVERS = {
    MapKind.RECURSIVE: solve_recursive,
    MapKind.INCURSIVE: solve_incursive,
    MapKind.HYPERINCURSIVE: solve_hyperincursive,
    MapKind.INTERACTION: solve_interaction,
    MapKind.SELF_ORGANIZATION: solve_self_organization,
    MapKind.ORGANIZATION: solve_organization,
}


def solve(spec: MapSpec, x: float) -> StepOutcome:
    """Dispatch to the closed-form solver for ``spec.kind``."""
    return _SOLVERS[spec.kind](x, spec.param)


def residual(spec: MapSpec, x: float, x_next: complex) -> float:
    """Modulus of LHS - RHS of the map's recurrence at (x, x_next)."""
    x = _check_finite(x)
    p = spec.param
    y = complex(x_next)
    kind = spec.kind
    if kind is MapKind.RECURSIVE:
        err = y - p * x * (1.0 - x)
    elif kind is MapKind.INCURSIVE:
        err = y - p * x * (1.0 - y)
    elif kind is MapKind.HYPERINCURSIVE:
        err = x - p * y * (1.0 - y)
    elif kind is MapKind.INTERACTION:
        err = x - p * (1.0 - y) ** 2
    elif kind is MapKind.SELF_ORGANIZATION:
        err = x - p * (1.0 - y) ** 3
    else:
        if abs(1.0 - x) <= EPS_DOMAIN:
            raise DomainError("organization recurrence is singular at x = 1")
        err = x - p * (1.0 - y) ** 2 * (1.0 - x)
    return abs(err)
