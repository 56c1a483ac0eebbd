"""Command-line frontend.

Every command builds its inputs, calls one library function and serializes
the result with :mod:`anticipatory.export`. Exit status: 0 on success
(a perished trajectory is a successful run), 1 on usage or configuration
errors, 2 on numerical or domain errors.

A ``--config FILE`` of ``key = value`` lines supplies option defaults;
flags given on the command line win. ``ANTICIPATORY_SEED`` sets the default
seed when neither provides one.
"""

from __future__ import annotations

import argparse
import os
import sys
from pathlib import Path

from . import export
from .analysis import (
    bifurcation_scan,
    fixed_points,
    redundancy_profile,
    separatrix_scan,
    shannon_entropy,
    thermodynamic_entropy,
)
from .maps import ConfigError, DomainError, MapSpec, solve
from .policy import RngStream, SelectionPolicy
from .simulate import DEFAULT_BIN_WIDTH, lifetime_distribution, run_trajectory

SEED_ENV = "ANTICIPATORY_SEED"

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_NUMERIC = 2


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _default_seed() -> int:
    raw = os.environ.get(SEED_ENV)
    if raw is None:
        return 0
    try:
        return int(raw)
    except ValueError:
        raise UsageError(f"{SEED_ENV} must be an integer, got {raw!r}") from None


def _output_opts(p: argparse.ArgumentParser) -> None:
    p.add_argument("--format", choices=("csv", "json"), default="csv")
    p.add_argument("--out", type=Path, default=None, help="output file (default: stdout)")
    p.add_argument("--config", type=Path, default=None, help="file of 'key = value' defaults")


def _map_opts(p: argparse.ArgumentParser) -> None:
    p.add_argument("--map", required=True, help="recursive|incursive|hyper|interaction|selforg|org")
    p.add_argument("--param", type=float, required=True, help="control parameter a/b/c/d (> 0)")


def _seed_opts(p: argparse.ArgumentParser) -> None:
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--no-domain-filter", dest="domain_filter", action="store_false")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="anticipatory", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("roots", help="all solutions of one step")
    _map_opts(p)
    p.add_argument("--x", type=float, required=True)
    _output_opts(p)

    p = sub.add_parser("run", help="one trajectory")
    _map_opts(p)
    p.add_argument("--x0", type=float, required=True)
    p.add_argument("--steps", type=int, default=100)
    p.add_argument("--policy", default="lower")
    p.add_argument("--stream", type=int, default=0)
    _seed_opts(p)
    _output_opts(p)

    p = sub.add_parser("lifetime", help="lifetime histogram over seeded runs")
    _map_opts(p)
    p.add_argument("--x0", type=float, required=True)
    p.add_argument("--policy", default="lower")
    p.add_argument("--cap", type=int, default=1_000_000)
    p.add_argument("--runs", type=int, default=1)
    p.add_argument("--workers", type=int, default=None)
    _seed_opts(p)
    _output_opts(p)

    p = sub.add_parser("ensemble", help="reachable-set redundancy profile")
    _map_opts(p)
    p.add_argument("--x0", type=float, required=True)
    p.add_argument("--depth", type=int, default=10)
    p.add_argument("--policy", default="all", help="'all' for every root choice, or a policy token")
    p.add_argument("--bin", dest="bin_width", type=float, default=DEFAULT_BIN_WIDTH)
    p.add_argument("--samples", type=int, default=10_000)
    _seed_opts(p)
    _output_opts(p)

    p = sub.add_parser("scan", help="separatrix or bifurcation scan over a")
    p.add_argument("--map", choices=("separatrix", "bifurcation"), default="separatrix")
    p.add_argument("--from", dest="a_from", type=float, required=True)
    p.add_argument("--to", dest="a_to", type=float, required=True)
    p.add_argument("--step", type=float, required=True)
    p.add_argument("--transient", type=int, default=1000)
    p.add_argument("--samples", type=int, default=256)
    p.add_argument("--tol", type=float, default=1e-6, help="period detection tolerance")
    _output_opts(p)

    p = sub.add_parser("fixed", help="fixed points and multipliers")
    _map_opts(p)
    _output_opts(p)

    p = sub.add_parser("entropy", help="Shannon and thermodynamic entropy")
    group = p.add_mutually_exclusive_group(required=True)
    group.add_argument("--p", type=float, nargs="+", help="probability distribution")
    group.add_argument("--bits", type=float, help="entropy in bits")
    _output_opts(p)

    return parser


def read_config(path: Path) -> dict[str, str]:
    """Parse ``key = value`` lines; blank lines and ``#`` comments are skipped."""
    values = {}
    try:
        text = path.read_text()
    except OSError as exc:
        raise UsageError(f"cannot read config {path}: {exc}") from None
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        key, sep, value = line.partition("=")
        if not sep:
            raise UsageError(f"{path}:{lineno}: expected 'key = value'")
        values[key.strip().replace("-", "_")] = value.strip()
    return values


def _apply_config(parser: argparse.ArgumentParser, command: str, path: Path) -> None:
    sub = next(a for a in parser._actions if isinstance(a, argparse._SubParsersAction))
    cmd_parser = sub.choices[command]
    actions = {a.dest: a for a in cmd_parser._actions}
    aliases = {"from": "a_from", "to": "a_to", "bin": "bin_width"}
    defaults = {}
    for key, value in read_config(path).items():
        dest = aliases.get(key, key)
        if dest == "no_domain_filter":
            dest, value = "domain_filter", str(value.lower() not in ("true", "1", "yes"))
        action = actions.get(dest)
        if action is None or dest in ("help", "config"):
            raise UsageError(f"config field {key!r} is not an option of {command!r}")
        if isinstance(action, (argparse._StoreTrueAction, argparse._StoreFalseAction)):
            defaults[dest] = value.lower() in ("true", "1", "yes")
        elif action.nargs in ("+", "*"):
            defaults[dest] = [action.type(v) for v in value.replace(",", " ").split()]
        else:
            try:
                defaults[dest] = action.type(value) if action.type else value
            except (TypeError, ValueError):
                raise UsageError(f"config field {key!r}: bad value {value!r}") from None
        action.required = False
    cmd_parser.set_defaults(**defaults)


def _find_config(argv: list[str]) -> Path | None:
    for i, tok in enumerate(argv):
        if tok == "--config" and i + 1 < len(argv):
            return Path(argv[i + 1])
        if tok.startswith("--config="):
            return Path(tok.split("=", 1)[1])
    return None


def parse_args(argv: list[str] | None) -> argparse.Namespace:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    config = _find_config(argv)
    command = next((tok for tok in argv if tok in COMMANDS), None)
    if config is not None and command is not None:
        _apply_config(parser, command, config)
    args = parser.parse_args(argv)
    if hasattr(args, "seed") and args.seed is None:
        args.seed = _default_seed()
    return args


def _policy(args) -> SelectionPolicy:
    return SelectionPolicy.parse(args.policy, domain_filter=args.domain_filter)


def cmd_roots(args) -> tuple[export.Table, int]:
    outcome = solve(MapSpec.parse(args.map, args.param), args.x)
    status = EXIT_OK
    if outcome.singular:
        print(f"singular: {outcome.map.token} map has no solution at x={args.x!r}", file=sys.stderr)
        status = EXIT_NUMERIC
    return export.roots_table(outcome), status


def cmd_run(args) -> tuple[export.Table, int]:
    spec = MapSpec.parse(args.map, args.param)
    traj = run_trajectory(spec, args.x0, _policy(args), args.steps, RngStream(args.seed, args.stream))
    return export.trajectory_table(traj, seed=args.seed), EXIT_OK


def cmd_lifetime(args) -> tuple[export.Table, int]:
    spec = MapSpec.parse(args.map, args.param)
    dist = lifetime_distribution(spec, args.x0, _policy(args), args.cap, args.runs, args.seed, workers=args.workers)
    return export.lifetime_table(dist), EXIT_OK


def cmd_ensemble(args) -> tuple[export.Table, int]:
    spec = MapSpec.parse(args.map, args.param)
    policy = None if args.policy == "all" else _policy(args)
    profile = redundancy_profile(spec, args.x0, args.depth, policy, args.bin_width, args.samples, args.seed)
    return export.redundancy_table(profile, seed=args.seed), EXIT_OK


def cmd_scan(args) -> tuple[export.Table, int]:
    if args.map == "separatrix":
        return export.scan_table(separatrix=separatrix_scan(args.a_from, args.a_to, args.step)), EXIT_OK
    bif = bifurcation_scan(args.a_from, args.a_to, args.step, args.transient, args.samples, args.tol)
    sep = separatrix_scan(args.a_from, args.a_to, args.step) if args.a_from < args.a_to else None
    return export.scan_table(separatrix=sep, bifurcation=bif), EXIT_OK


def cmd_fixed(args) -> tuple[export.Table, int]:
    return export.fixed_points_table(fixed_points(MapSpec.parse(args.map, args.param))), EXIT_OK


def cmd_entropy(args) -> tuple[export.Table, int]:
    h = shannon_entropy(args.p) if args.p is not None else args.bits
    return export.Table(["H_bits", "S_J_per_K"], [(h, thermodynamic_entropy(h))]), EXIT_OK


COMMANDS = {
    "roots": cmd_roots,
    "run": cmd_run,
    "lifetime": cmd_lifetime,
    "ensemble": cmd_ensemble,
    "scan": cmd_scan,
    "fixed": cmd_fixed,
    "entropy": cmd_entropy,
}


def main(argv: list[str] | None = None) -> int:
    try:
        args = parse_args(argv)
        table, status = COMMANDS[args.command](args)
    except (UsageError, ConfigError) as exc:
        print(f"anticipatory: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (DomainError, ArithmeticError) as exc:
        print(f"anticipatory: numerical error: {exc}", file=sys.stderr)
        return EXIT_NUMERIC

    text = export.render(table, args.format)
    if args.out is None:
        sys.stdout.write(text)
    else:
        args.out.write_text(text)
    return status


if __name__ == "__main__":
    raise SystemExit(main())
