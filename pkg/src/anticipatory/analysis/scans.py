"""Parameter scans of the logistic family: the separatrix at four and period doubling."""

from __future__ import annotations

import math
from dataclasses import dataclass

from ..maps import ConfigError

__all__ = [
    "BifurcationPoint",
    "bifurcation_point",
    "SeparatrixReport",
    "SeparatrixRow",
    "bifurcation_scan",
    "detect_period",
    "grid",
    "period_doubling_onset",
    "recursive_attractor",
    "separatrix_scan",
]

PERIOD_TOL = 1e-6
MAX_PERIOD = 64


def grid(start: float, stop: float, step: float) -> list[float]:
    """Inclusive grid ``start, start + step, ...`` rounded to 12 decimals.

    Rounding keeps points such as 4.0 exact when the step is a decimal
    fraction that binary floating point cannot represent.
    """
    if not (math.isfinite(start) and math.isfinite(stop) and math.isfinite(step)):
        raise ConfigError("grid bounds and step must be finite")
    if step <= 0.0:
        raise ConfigError(f"step must be positive, got {step}")
    if stop < start:
        raise ConfigError(f"empty grid: {start} > {stop}")
    n = int(math.floor((stop - start) / step + 1e-9)) + 1
    return [round(start + k * step, 12) for k in range(n)]


@dataclass(frozen=True)
class SeparatrixRow:
    a: float
    recursive_interval_invariant: bool
    hyperincursive_all_real: bool
    incursive_defined: bool


@dataclass(frozen=True)
class SeparatrixReport:
    rows: tuple[SeparatrixRow, ...]

    def threshold(self, attr: str) -> float | None:
        """Grid value on the True side of the first flip of ``attr``, if it flips."""
        for prev, row in zip(self.rows, self.rows[1:]):
            if getattr(prev, attr) != getattr(row, attr):
                return row.a if getattr(row, attr) else prev.a
        return None


def _recursive_invariant(a: float) -> bool:
    # max of a x (1 - x) over [0, 1] is a/4, attained at x = 1/2
    return a / 4.0 <= 1.0


def _hyperincursive_all_real(a: float) -> bool:
    # the discriminant 1 - 4x/a is smallest at x = 1
    return 1.0 - 4.0 / a >= 0.0


def _incursive_defined(a: float) -> bool:
    # 1 + a x is linear in x, so its sign on [0, 1] is fixed by the endpoints
    return min(1.0, 1.0 + a) > 0.0


def separatrix_scan(a_min: float, a_max: float, step: float) -> SeparatrixReport:
    if not 0.0 < a_min < a_max:
        raise ConfigError(f"need 0 < a_min < a_max, got {a_min}, {a_max}")
    rows = tuple(
        SeparatrixRow(a, _recursive_invariant(a), _hyperincursive_all_real(a), _incursive_defined(a))
        for a in grid(a_min, a_max, step)
    )
    return SeparatrixReport(rows)


# Not the critical point 0.5: at a = 4 that orbit hits 1 and then sticks at 0.
ORBIT_START = 0.3


def recursive_attractor(a: float, transient: int, samples: int, x0: float = ORBIT_START) -> list[float]:
    x = x0
    for _ in range(transient):
        x = a * x * (1.0 - x)
    out = []
    for _ in range(samples):
        x = a * x * (1.0 - x)
        out.append(x)
    return out


def detect_period(orbit: list[float], tol: float = PERIOD_TOL, max_period: int = MAX_PERIOD) -> int | None:
    """Smallest p <= max_period with |x[i+p] - x[i]| <= tol across the orbit, else None."""
    n = len(orbit)
    for p in range(1, min(max_period, n - 1) + 1):
        if all(abs(orbit[i + p] - orbit[i]) <= tol for i in range(n - p)):
            return p
    return None


@dataclass(frozen=True)
class BifurcationPoint:
    a: float
    attractor: tuple[float, ...]
    period: int | None

    @property
    def aperiodic(self) -> bool:
        return self.period is None


def _check_scan_args(transient: int, samples: int) -> None:
    if transient < 500:
        raise ConfigError(f"transient must be >= 500, got {transient}")
    if samples < 128:
        raise ConfigError(f"samples must be >= 128, got {samples}")


def bifurcation_point(a: float, transient: int = 1000, samples: int = 256, tol: float = PERIOD_TOL) -> BifurcationPoint:
    if not 0.0 < a <= 4.0:
        raise ConfigError(f"bifurcation scan needs a in (0, 4], got {a}")
    _check_scan_args(transient, samples)
    orbit = recursive_attractor(a, transient, samples)
    return BifurcationPoint(a, tuple(orbit), detect_period(orbit, tol))


def bifurcation_scan(
    a_min: float,
    a_max: float,
    step: float,
    transient: int = 1000,
    samples: int = 256,
    tol: float = PERIOD_TOL,
) -> list[BifurcationPoint]:
    """Attractor sample and detected period of the recursive map at each grid value."""
    if not 0.0 < a_min <= a_max <= 4.0:
        raise ConfigError(f"bifurcation scan needs 0 < a_min <= a_max <= 4, got {a_min}, {a_max}")
    _check_scan_args(transient, samples)
    return [bifurcation_point(a, transient, samples, tol) for a in grid(a_min, a_max, step)]


def period_doubling_onset(
    lo: float = 2.8,
    hi: float = 3.2,
    width: float = 1e-3,
    transient: int = 100_000,
    samples: int = 128,
) -> float:
    """Bisect for the parameter where the detected period leaves 1.

    Near the onset the orbit relaxes slowly (multiplier close to 1), so the
    transient has to be long for the period detector to settle.
    """
    if bifurcation_point(lo, transient, samples).period != 1:
        raise ConfigError(f"period at lower bracket {lo} is not 1")
    if bifurcation_point(hi, transient, samples).period == 1:
        raise ConfigError(f"period at upper bracket {hi} is still 1")
    while hi - lo > width:
        mid = 0.5 * (lo + hi)
        if bifurcation_point(mid, transient, samples).period == 1:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)
