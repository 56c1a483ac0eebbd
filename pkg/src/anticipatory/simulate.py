"""Trajectory, lifetime and reachable-set engines."""

from __future__ import annotations

import math
from collections import Counter, deque
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from typing import Union

import numpy as np
from numpy.random import Philox

from .maps import EPS_DOMAIN, ConfigError, DomainError, MapKind, MapSpec, in_domain, solve
from .policy import (
    Perished,
    PerishReason,
    PolicyKind,
    PolicyState,
    RngStream,
    SelectionPolicy,
    select,
)

__all__ = [
    "MAX_TREE_DEPTH",
    "LifetimeDistribution",
    "ReachableTree",
    "SurvivedCap",
    "Termination",
    "Trajectory",
    "lifetime",
    "lifetime_distribution",
    "lifetimes",
    "reachable_tree",
    "run_trajectory",
]

MAX_TREE_DEPTH = 30
CYCLE_WINDOW = 16
DEFAULT_BIN_WIDTH = 1e-9


@dataclass(frozen=True)
class Termination:
    reason: PerishReason | None = None
    at_step: int | None = None

    @property
    def completed(self) -> bool:
        return self.reason is None

    def __str__(self) -> str:
        if self.completed:
            return "Completed"
        return f"Perished({self.reason.value}, at_step={self.at_step})"


@dataclass(frozen=True)
class Trajectory:
    map: MapSpec
    x0: float
    policy: SelectionPolicy
    states: tuple[float, ...]
    termination: Termination

    @property
    def lifetime(self) -> int:
        """Number of successful instantiations after ``x0``."""
        return len(self.states) - 1


@dataclass(frozen=True)
class SurvivedCap:
    """No perish happened within ``cap`` steps."""

    cap: int


LifetimeResult = Union[int, SurvivedCap]


def _check_x0(x0: float) -> float:
    x0 = float(x0)
    if not math.isfinite(x0) or not in_domain(x0):
        raise ConfigError(f"x0 must lie in [0, 1], got {x0!r}")
    return x0


def _check_rng(policy: SelectionPolicy, rng: RngStream | None) -> None:
    if policy.stochastic and rng is None:
        raise ConfigError("random policy requires an RngStream (seed)")


def _advance(outcome, policy, pstate, rng):
    if outcome.map.kind.degree == 1:
        # single-valued maps need no decision, only the domain check
        y = outcome.roots[0].real
        if not math.isfinite(y) or (policy.domain_filter and not in_domain(y)):
            return Perished(PerishReason.OUT_OF_DOMAIN), pstate.advanced(False)
        return y, pstate.advanced(True)
    return select(outcome, policy, pstate, rng)


def run_trajectory(
    spec: MapSpec,
    x0: float,
    policy: SelectionPolicy,
    max_steps: int,
    rng: RngStream | None = None,
) -> Trajectory:
    if not isinstance(spec, MapSpec):
        raise ConfigError(f"expected a MapSpec, got {spec!r}")
    if max_steps < 1:
        raise ConfigError(f"max_steps must be >= 1, got {max_steps}")
    x0 = _check_x0(x0)
    _check_rng(policy, rng)

    states = [x0]
    pstate = PolicyState()
    x = x0
    for step in range(1, max_steps + 1):
        choice, pstate = _advance(solve(spec, x), policy, pstate, rng)
        if isinstance(choice, Perished):
            return Trajectory(spec, x0, policy, tuple(states), Termination(choice.reason, step))
        x = choice
        states.append(x)
    return Trajectory(spec, x0, policy, tuple(states), Termination())


def _cycle_is_forced(policy: SelectionPolicy, lag: int, forced) -> bool:
    """Whether a repeat of the state after ``lag`` steps repeats every later step too.

    ``forced`` flags the steps in the window whose choice was fixed by the
    state alone (a single distinct real root).
    """
    if policy.kind in (PolicyKind.LOWER, PolicyKind.UPPER, PolicyKind.NEAREST):
        return True
    if policy.kind is PolicyKind.ALTERNATING and lag % 2 == 0:
        return True
    return all(forced)


def lifetime(
    spec: MapSpec,
    x0: float,
    policy: SelectionPolicy,
    cap: int,
    rng: RngStream | None = None,
) -> LifetimeResult:
    """Instantiations before perishing, or ``SurvivedCap`` if none within ``cap``.

    Stops early, with the answer the full loop would give, once the state
    exactly revisits one of the last ``CYCLE_WINDOW`` states and the policy
    is bound to repeat the same choices around that cycle.
    """
    if cap < 1:
        raise ConfigError(f"cap must be >= 1, got {cap}")
    x0 = _check_x0(x0)
    _check_rng(policy, rng)

    recent: deque[tuple[float, bool]] = deque(maxlen=CYCLE_WINDOW)
    pstate = PolicyState()
    x = x0
    for n in range(cap):
        outcome = solve(spec, x)
        choice, pstate = _advance(outcome, policy, pstate, rng)
        if isinstance(choice, Perished):
            return n
        recent.append((x, len(set(outcome.real_roots)) == 1))
        for lag in range(1, len(recent) + 1):
            if recent[-lag][0] == choice:
                window = [f for _, f in list(recent)[-lag:]]
                if _cycle_is_forced(policy, lag, window):
                    return SurvivedCap(cap)
                break
        x = choice
    return SurvivedCap(cap)


# ---------------------------------------------------------------------------
# batched ensemble kernel


_WINDOW = 256


def _uniform_window(seed: int, streams: np.ndarray, start: int) -> np.ndarray:
    """Uniforms for steps [start, start + _WINDOW) of each stream, shape (len(streams), _WINDOW)."""
    out = np.empty((len(streams), _WINDOW), dtype=np.float64)
    for i, s in enumerate(streams):
        key = np.array([seed, s], dtype=np.uint64)
        raw = Philox(key=key, counter=start).random_raw(4 * _WINDOW)[::4]
        out[i] = (raw >> np.uint64(11)).astype(np.float64) * (1.0 / (1 << 53))
    return out


def _batch_roots(spec: MapSpec, x: np.ndarray):
    """Lower/upper real roots, a has-real mask and a singular mask for each state.

    Mirrors the scalar solvers operation for operation so results are bitwise equal.
    """
    p = spec.param
    kind = spec.kind
    n = len(x)
    singular = np.zeros(n, dtype=bool)
    with np.errstate(invalid="ignore", divide="ignore"):
        if kind is MapKind.RECURSIVE:
            lo = p * x * (1.0 - x)
            hi = lo
            real = np.ones(n, dtype=bool)
        elif kind is MapKind.INCURSIVE:
            denom = 1.0 + p * x
            if np.any(denom == 0.0):
                raise DomainError("incursive step undefined")
            lo = p * x / denom
            hi = lo
            real = np.ones(n, dtype=bool)
        elif kind is MapKind.HYPERINCURSIVE:
            disc = 1.0 - 4.0 * x / p
            real = disc >= 0.0
            hi = 0.5 + 0.5 * np.sqrt(np.where(real, disc, 0.0))
            lo = (x / p) / hi
        elif kind is MapKind.INTERACTION:
            rad = x / p
            real = rad >= 0.0
            w = np.sqrt(np.where(real, rad, 0.0))
            lo, hi = 1.0 - w, 1.0 + w
        elif kind is MapKind.SELF_ORGANIZATION:
            if np.any(x < 0.0):
                raise DomainError("self-organization step needs x >= 0")
            lo = np.where(x == 0.0, 1.0, 1.0 - np.cbrt(x / p))
            hi = lo
            real = np.ones(n, dtype=bool)
        else:
            singular = np.abs(1.0 - x) <= EPS_DOMAIN
            rad = x / (p * (1.0 - x))
            real = (rad >= 0.0) & ~singular
            w = np.sqrt(np.where(real, rad, 0.0))
            lo, hi = 1.0 - w, 1.0 + w
    return lo, hi, real, singular


def _eligible(v: np.ndarray, policy: SelectionPolicy) -> np.ndarray:
    if not policy.domain_filter:
        return np.isfinite(v)
    return (v >= -EPS_DOMAIN) & (v <= 1.0 + EPS_DOMAIN)


def _lifetimes_chunk(spec, x0, policy, cap, seed, streams):
    """Lifetimes for one chunk of runs; -1 marks survival to ``cap``.

    Same semantics as :func:`lifetime`, including the exact cycle shortcut.
    """
    streams = np.asarray(streams, dtype=np.uint64)
    n = len(streams)
    result = np.full(n, -1, dtype=np.int64)
    idx = np.arange(n)
    x = np.full(n, x0, dtype=np.float64)
    # ring of the last CYCLE_WINDOW states and whether the step from each was forced
    hist_x = np.full((CYCLE_WINDOW, n), np.nan)
    hist_f = np.zeros((CYCLE_WINDOW, n), dtype=bool)
    memoryless = policy.kind in (PolicyKind.LOWER, PolicyKind.UPPER, PolicyKind.NEAREST)
    alternating = policy.kind is PolicyKind.ALTERNATING
    draws = None

    for step in range(cap):
        if len(idx) == 0:
            break
        m = len(idx)
        if policy.stochastic and step % _WINDOW == 0:
            draws = _uniform_window(seed, streams[idx], step)
        lo, hi, real, singular = _batch_roots(spec, x)
        el_lo, el_hi = _eligible(lo, policy), _eligible(hi, policy)

        kind = policy.kind
        if kind is PolicyKind.NEAREST:
            pick_hi = ~el_lo | (el_hi & (np.abs(hi - x) < np.abs(lo - x)))
            ok = real & (el_lo | el_hi)
        else:
            if kind is PolicyKind.LOWER:
                pick_hi = np.zeros(m, dtype=bool)
            elif kind is PolicyKind.UPPER:
                pick_hi = np.ones(m, dtype=bool)
            elif alternating:
                pick_hi = np.full(m, policy.start_upper ^ (step % 2 == 1))
            else:
                pick_hi = draws[:, step % _WINDOW] < policy.p_upper
            ok = real & np.where(pick_hi, el_hi, el_lo)
        ok &= ~singular
        y = np.where(pick_hi, hi, lo)
        result[idx[~ok]] = step

        slot = step % CYCLE_WINDOW
        hist_x[slot] = x
        hist_f[slot] = lo == hi
        cycled = np.zeros(m, dtype=bool)
        unmatched = np.ones(m, dtype=bool)
        all_forced = np.ones(m, dtype=bool)
        for lag in range(1, min(step + 1, CYCLE_WINDOW) + 1):
            s_lag = (step + 1 - lag) % CYCLE_WINDOW
            all_forced &= hist_f[s_lag]
            hit = unmatched & (hist_x[s_lag] == y)
            if memoryless or (alternating and lag % 2 == 0):
                cycled |= hit
            else:
                cycled |= hit & all_forced
            unmatched &= ~hit

        keep = ok & ~cycled
        idx, x = idx[keep], y[keep]
        hist_x, hist_f = hist_x[:, keep], hist_f[:, keep]
        if draws is not None:
            draws = draws[keep]
    return result


def lifetimes(
    spec: MapSpec,
    x0: float,
    policy: SelectionPolicy,
    cap: int,
    n_runs: int,
    master_seed: int = 0,
    *,
    workers: int | None = None,
    chunk_size: int = 4096,
) -> np.ndarray:
    """Lifetime of each of ``n_runs`` runs (run i uses stream i); -1 means survived.

    Runs are split into chunks that may be evaluated by ``workers`` processes;
    the result is the same for every chunking and worker count.
    """
    if n_runs < 1:
        raise ConfigError(f"n_runs must be >= 1, got {n_runs}")
    if cap < 1:
        raise ConfigError(f"cap must be >= 1, got {cap}")
    if chunk_size < 1:
        raise ConfigError(f"chunk_size must be >= 1, got {chunk_size}")
    x0 = _check_x0(x0)
    RngStream(master_seed)  # validates the seed
    chunks = [range(i, min(i + chunk_size, n_runs)) for i in range(0, n_runs, chunk_size)]
    args = [(spec, x0, policy, cap, master_seed, list(c)) for c in chunks]
    if workers is None or workers <= 1 or len(chunks) == 1:
        parts = [_lifetimes_chunk(*a) for a in args]
    else:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(_lifetimes_chunk, *zip(*args)))
    return np.concatenate(parts)


@dataclass(frozen=True)
class LifetimeDistribution:
    map: MapSpec
    x0: float
    policy: SelectionPolicy
    cap: int
    n_runs: int
    master_seed: int
    histogram: dict[int, int]
    survived: int

    @property
    def n_perished(self) -> int:
        return self.n_runs - self.survived

    @property
    def mean(self) -> float:
        """Mean lifetime, counting survivors at ``cap`` (a lower bound if any survived)."""
        total = sum(k * v for k, v in self.histogram.items()) + self.cap * self.survived
        return total / self.n_runs

    @property
    def stderr(self) -> float:
        if self.n_runs < 2:
            return float("nan")
        m = self.mean
        ss = sum(v * (k - m) ** 2 for k, v in self.histogram.items())
        ss += self.survived * (self.cap - m) ** 2
        return math.sqrt(ss / (self.n_runs - 1) / self.n_runs)


def lifetime_distribution(
    spec: MapSpec,
    x0: float,
    policy: SelectionPolicy,
    cap: int,
    n_runs: int,
    master_seed: int = 0,
    *,
    workers: int | None = None,
    chunk_size: int = 4096,
) -> LifetimeDistribution:
    lt = lifetimes(spec, x0, policy, cap, n_runs, master_seed, workers=workers, chunk_size=chunk_size)
    counts = Counter(int(v) for v in lt if v >= 0)
    return LifetimeDistribution(
        map=spec,
        x0=float(x0),
        policy=policy,
        cap=cap,
        n_runs=n_runs,
        master_seed=master_seed,
        histogram=dict(sorted(counts.items())),
        survived=int(np.count_nonzero(lt < 0)),
    )


# ---------------------------------------------------------------------------
# reachable sets


@dataclass(frozen=True)
class ReachableTree:
    """Binned states reachable at each depth, with root-choice path counts.

    ``levels[t]`` is a tuple of ``(state, multiplicity)`` sorted by state.
    """

    map: MapSpec
    x0: float
    depth: int
    bin_width: float
    levels: tuple[tuple[tuple[float, int], ...], ...]

    def reachable_count(self, t: int) -> int:
        return len(self.levels[t])

    def surviving_paths(self, t: int) -> int:
        return sum(m for _, m in self.levels[t])


def reachable_tree(
    spec: MapSpec,
    x0: float,
    depth: int,
    bin_width: float = DEFAULT_BIN_WIDTH,
) -> ReachableTree:
    """Breadth-first expansion of every real in-domain root choice.

    States within the same ``bin_width`` bin are merged, keeping the first
    state seen as representative and summing multiplicities. A double root
    counts as two paths into the same bin.
    """
    if not 0 <= depth <= MAX_TREE_DEPTH:
        raise ConfigError(f"depth must lie in [0, {MAX_TREE_DEPTH}], got {depth}")
    if not bin_width > 0.0:
        raise ConfigError(f"bin_width must be positive, got {bin_width}")
    x0 = _check_x0(x0)

    levels = [((x0, 1),)]
    current = levels[0]
    for _ in range(depth):
        bins: dict[int, list] = {}
        for x, mult in current:
            outcome = solve(spec, x)
            if outcome.singular:
                continue
            for r in outcome.real_roots:
                if not in_domain(r):
                    continue
                key = round(r / bin_width)
                if key in bins:
                    bins[key][1] += mult
                else:
                    bins[key] = [r, mult]
        current = tuple((v, m) for _, (v, m) in sorted(bins.items()))
        levels.append(current)
    return ReachableTree(spec, x0, depth, bin_width, tuple(levels))
