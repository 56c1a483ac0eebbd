"""Instantiation policies: collapse a multi-root step into one next state.

A policy names a preferred root among the real roots of a step. The
preference is checked against eligibility afterwards; an ineligible
preference perishes the trajectory instead of falling back to another
root. ``NEAREST`` is the exception and chooses among eligible roots only.

Random draws come from a counter-based generator (Philox) keyed by
``(master_seed, stream_index)`` with the step number as counter, so the
draw at a given step never depends on how many draws came before it or on
which worker ran the trajectory.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from enum import Enum
from functools import lru_cache

import numpy as np
from numpy.random import Philox

from .maps import ConfigError, StepOutcome, in_domain

__all__ = [
    "PerishReason",
    "Perished",
    "PolicyKind",
    "PolicyState",
    "RngStream",
    "SelectionPolicy",
    "select",
]

_U64 = (1 << 64) - 1
_BLOCK = 64


@lru_cache(maxsize=8192)
def _philox_block(seed: int, stream: int, block: int) -> tuple[int, ...]:
    # first output word of each counter value in [block*_BLOCK, (block+1)*_BLOCK)
    key = np.array([seed, stream], dtype=np.uint64)
    raw = Philox(key=key, counter=block * _BLOCK).random_raw(4 * _BLOCK)
    return tuple(int(v) for v in raw[::4])


@dataclass(frozen=True)
class RngStream:
    """Reproducible stream of uniforms addressed by step number."""

    master_seed: int
    stream_index: int = 0

    def __post_init__(self) -> None:
        if not 0 <= int(self.master_seed) <= _U64:
            raise ConfigError(f"master_seed must fit in 64 unsigned bits, got {self.master_seed}")
        if not 0 <= int(self.stream_index) <= _U64:
            raise ConfigError(f"stream_index must be a non-negative 64-bit int, got {self.stream_index}")

    def raw(self, step: int) -> int:
        block, offset = divmod(step, _BLOCK)
        return _philox_block(int(self.master_seed), int(self.stream_index), block)[offset]

    def uniform(self, step: int) -> float:
        """Uniform draw in [0, 1) for ``step``; 53 random mantissa bits."""
        return (self.raw(step) >> 11) * (1.0 / (1 << 53))

    def spawn(self, stream_index: int) -> RngStream:
        return RngStream(self.master_seed, stream_index)


class PolicyKind(Enum):
    LOWER = "lower"
    UPPER = "upper"
    ALTERNATING = "alt"
    RANDOM = "rand"
    NEAREST = "nearest"


@dataclass(frozen=True)
class SelectionPolicy:
    """How one real root is chosen at each instantiation.

    ``start_upper`` only matters for ``ALTERNATING``; ``p_upper`` only for
    ``RANDOM``. With ``domain_filter`` off every real root is eligible.
    """

    kind: PolicyKind
    start_upper: bool = False
    p_upper: float = 0.5
    domain_filter: bool = True

    def __post_init__(self) -> None:
        if not isinstance(self.kind, PolicyKind):
            raise ConfigError(f"unknown policy kind {self.kind!r}")
        if not 0.0 <= self.p_upper <= 1.0:
            raise ConfigError(f"p_upper must lie in [0, 1], got {self.p_upper!r}")

    @classmethod
    def lower(cls) -> SelectionPolicy:
        return cls(PolicyKind.LOWER)

    @classmethod
    def upper(cls) -> SelectionPolicy:
        return cls(PolicyKind.UPPER)

    @classmethod
    def alternating(cls, start: str = "lower") -> SelectionPolicy:
        if start not in ("lower", "upper"):
            raise ConfigError(f"alternating start must be 'lower' or 'upper', got {start!r}")
        return cls(PolicyKind.ALTERNATING, start_upper=start == "upper")

    @classmethod
    def random(cls, p_upper: float = 0.5) -> SelectionPolicy:
        return cls(PolicyKind.RANDOM, p_upper=float(p_upper))

    @classmethod
    def nearest(cls) -> SelectionPolicy:
        return cls(PolicyKind.NEAREST)

    @classmethod
    def parse(cls, token: str, domain_filter: bool = True) -> SelectionPolicy:
        """Parse ``lower``, ``upper``, ``alt:lower``, ``alt:upper``, ``rand:P`` or ``nearest``."""
        head, _, arg = token.strip().lower().partition(":")
        if head == "lower" and not arg:
            policy = cls.lower()
        elif head == "upper" and not arg:
            policy = cls.upper()
        elif head in ("alt", "alternating"):
            policy = cls.alternating(arg or "lower")
        elif head in ("rand", "random"):
            try:
                p = float(arg) if arg else 0.5
            except ValueError:
                raise ConfigError(f"bad probability in policy token {token!r}") from None
            policy = cls.random(p)
        elif head == "nearest" and not arg:
            policy = cls.nearest()
        else:
            raise ConfigError(f"unknown policy token {token!r}")
        return replace(policy, domain_filter=domain_filter)

    @property
    def token(self) -> str:
        if self.kind is PolicyKind.ALTERNATING:
            return "alt:upper" if self.start_upper else "alt:lower"
        if self.kind is PolicyKind.RANDOM:
            return f"rand:{self.p_upper:g}"
        return self.kind.value

    @property
    def stochastic(self) -> bool:
        return self.kind is PolicyKind.RANDOM


class PerishReason(Enum):
    NO_REAL_ROOT = "NoRealRoot"
    OUT_OF_DOMAIN = "OutOfDomain"
    SINGULAR = "Singular"


@dataclass(frozen=True)
class Perished:
    reason: PerishReason


@dataclass(frozen=True)
class PolicyState:
    """Per-trajectory policy state: step counter and alternation parity."""

    step: int = 0
    instantiations: int = 0

    def advanced(self, success: bool) -> PolicyState:
        return PolicyState(self.step + 1, self.instantiations + (1 if success else 0))


def _eligible(root: float, policy: SelectionPolicy) -> bool:
    return in_domain(root) if policy.domain_filter else math.isfinite(root)


def select(
    outcome: StepOutcome,
    policy: SelectionPolicy,
    state: PolicyState = PolicyState(),
    rng: RngStream | None = None,
) -> tuple[float | Perished, PolicyState]:
    """Choose the next state from ``outcome`` or report why the trajectory perishes.

    Returns the choice together with the policy state to use on the next step.
    """
    if outcome.singular:
        return Perished(PerishReason.SINGULAR), state.advanced(False)
    real = outcome.real_roots
    if not real:
        return Perished(PerishReason.NO_REAL_ROOT), state.advanced(False)

    kind = policy.kind
    if kind is PolicyKind.NEAREST:
        eligible = [r for r in real if _eligible(r, policy)]
        if not eligible:
            return Perished(PerishReason.OUT_OF_DOMAIN), state.advanced(False)
        # min() keeps the first of equal distances, i.e. the lower root
        choice = min(eligible, key=lambda r: abs(r - outcome.x))
        return choice, state.advanced(True)

    if kind is PolicyKind.LOWER:
        want_upper = False
    elif kind is PolicyKind.UPPER:
        want_upper = True
    elif kind is PolicyKind.ALTERNATING:
        want_upper = policy.start_upper ^ (state.instantiations % 2 == 1)
    else:
        if rng is None:
            raise ConfigError("random policy requires an RngStream")
        want_upper = rng.uniform(state.step) < policy.p_upper

    choice = real[-1] if want_upper else real[0]
    if not _eligible(choice, policy):
        return Perished(PerishReason.OUT_OF_DOMAIN), state.advanced(False)
    return choice, state.advanced(True)
