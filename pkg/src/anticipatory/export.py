"""CSV and JSON serialization of results.

CSV floats are written with 17 significant digits so that every double
round-trips exactly. JSON floats use Python's shortest round-trip repr.
Run metadata goes into leading ``# key=value`` comment lines in CSV and
into top-level fields in JSON; table rows go under ``"rows"``.
"""

from __future__ import annotations

import csv
import io
import json
import math
from typing import Any, Sequence

from .analysis.fixed_points import FixedPointReport
from .analysis.information import RedundancyProfile
from .analysis.scans import BifurcationPoint, SeparatrixReport
from .maps import StepOutcome
from .simulate import LifetimeDistribution, Trajectory

__all__ = [
    "Table",
    "fixed_points_table",
    "fmt",
    "lifetime_table",
    "redundancy_table",
    "render",
    "roots_table",
    "scan_table",
    "trajectory_table",
]


def fmt(v: Any) -> str:
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, float):
        if math.isnan(v):
            return "nan"
        if math.isinf(v):
            return "inf" if v > 0 else "-inf"
        return format(v, ".17g")
    if v is None:
        return ""
    return str(v)


class Table:
    """Column header, rows and metadata of one result."""

    def __init__(self, columns: Sequence[str], rows: Sequence[Sequence[Any]], meta: dict[str, Any] | None = None):
        self.columns = list(columns)
        self.rows = [list(r) for r in rows]
        self.meta = dict(meta or {})

    def to_csv(self) -> str:
        buf = io.StringIO()
        for k, v in self.meta.items():
            buf.write(f"# {k}={fmt(v)}\n")
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(self.columns)
        for row in self.rows:
            writer.writerow([fmt(v) for v in row])
        return buf.getvalue()

    def to_json(self) -> str:
        def clean(v):
            if isinstance(v, float) and not math.isfinite(v):
                return fmt(v)
            return v

        doc = {k: clean(v) for k, v in self.meta.items()}
        doc["rows"] = [{c: clean(v) for c, v in zip(self.columns, r)} for r in self.rows]
        return json.dumps(doc, indent=2) + "\n"


def render(table: Table, fmt_name: str = "csv") -> str:
    if fmt_name == "csv":
        return table.to_csv()
    if fmt_name == "json":
        return table.to_json()
    raise ValueError(f"unknown output format {fmt_name!r}")


def roots_table(outcome: StepOutcome) -> Table:
    meta = {"map": outcome.map.token, "param": outcome.map.param, "x": outcome.x, "singular": outcome.singular}
    return Table(["re", "im"], [(r.real, r.imag) for r in outcome.roots], meta)


def trajectory_table(traj: Trajectory, seed: int | None = None) -> Table:
    meta = {
        "map": traj.map.token,
        "param": traj.map.param,
        "x0": traj.x0,
        "policy": traj.policy.token,
        "domain_filter": traj.policy.domain_filter,
    }
    if seed is not None:
        meta["seed"] = seed
    meta["termination"] = "Completed" if traj.termination.completed else "Perished"
    meta["reason"] = None if traj.termination.completed else traj.termination.reason.value
    meta["at_step"] = traj.termination.at_step
    meta["lifetime"] = traj.lifetime
    return Table(["step", "x"], list(enumerate(traj.states)), meta)


def lifetime_table(dist: LifetimeDistribution) -> Table:
    meta = {
        "map": dist.map.token,
        "param": dist.map.param,
        "x0": dist.x0,
        "policy": dist.policy.token,
        "cap": dist.cap,
        "n_runs": dist.n_runs,
        "seed": dist.master_seed,
        "survived": dist.survived,
        "mean": dist.mean,
        "stderr": dist.stderr,
    }
    rows: list[tuple[Any, int]] = [(k, v) for k, v in dist.histogram.items()]
    if dist.survived:
        rows.append(("survived", dist.survived))
    return Table(["lifetime", "count"], rows, meta)


def redundancy_table(profile: RedundancyProfile, seed: int | None = None) -> Table:
    meta = {
        "map": profile.map.token,
        "param": profile.map.param,
        "x0": profile.x0,
        "mode": profile.mode,
        "bin_width": profile.bin_width,
    }
    if seed is not None:
        meta["seed"] = seed
    rows = [(r.depth, r.reachable, r.h_max_bits, r.h_bits, r.redundancy) for r in profile.rows]
    return Table(["depth", "reachable", "H_max_bits", "H_bits", "R"], rows, meta)


def scan_table(
    separatrix: SeparatrixReport | None = None,
    bifurcation: Sequence[BifurcationPoint] | None = None,
) -> Table:
    """One row per grid value; columns a scan did not compute are left empty."""
    sep = {row.a: row for row in separatrix.rows} if separatrix else {}
    bif = {pt.a: pt for pt in bifurcation} if bifurcation else {}
    rows = []
    for a in sorted(set(sep) | set(bif)):
        s, b = sep.get(a), bif.get(a)
        period: Any = None
        if b is not None:
            period = b.period if b.period is not None else "aperiodic"
        rows.append(
            (
                a,
                s.recursive_interval_invariant if s else None,
                s.hyperincursive_all_real if s else None,
                period,
            )
        )
    return Table(["a", "invariant", "all_real", "period"], rows)


def fixed_points_table(reports: Sequence[FixedPointReport]) -> Table:
    rows = [
        (r.map.token, r.branch.value, r.location, r.multiplier, r.classification.value)
        for r in reports
    ]
    meta = {"param": reports[0].map.param} if reports else {}
    return Table(["map", "branch", "x_star", "multiplier", "class"], rows, meta)
