"""
Command-line front end.

    lorentz-ot lattice --region box:0,0:1,1 --spacing 0.5 space.json
    lorentz-ot certify-tmcp --space space.json --mu slice:0:0 --x1 point:1,0.5 --K 0 --N 2
    lorentz-ot run experiment.cfg

Exit codes: 0 when every verdict passes, 2 on any FAIL, 3 when nothing fails but
some check is vacuous, 4 on input errors.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

from .causal_space import validate_axioms
from .config import (
    CHECKS,
    MODEL_KINDS,
    ExperimentConfig,
    InputSection,
    ModelSection,
    OutputSection,
    SamplerSection,
    TaskSection,
    build_model,
    build_sampler,
    parse_config,
    validate_config,
)
from .domains import ConfigError, LorentzOTError
from .experiments import exit_code, run_experiment
from .persistence import read_space, save
from .sampling import discretize

logger = logging.getLogger(__name__)

INPUT_ERROR = 4


class _Parser(argparse.ArgumentParser):
    """Usage errors are input errors"""

    def error(self, message: str):  # type: ignore[override]
        raise ConfigError("<command line>", message)


def _floats(text: str) -> tuple[float, ...]:
    return tuple(float(part) for part in text.split(",") if part.strip())


def _add_space_options(parser: argparse.ArgumentParser) -> None:
    group = parser.add_argument_group("space", "a causal-space document, or a model to discretize")
    group.add_argument("--space", help="causal-space v1 document")
    group.add_argument("--model", choices=MODEL_KINDS, default="minkowski", help="model spacetime")
    group.add_argument("--dim", type=int, default=2, help="spacetime dimension")
    group.add_argument("--k-sec", type=float, default=0.0, help="sectional curvature of constant-curvature models")
    group.add_argument("--region", default="box:0,0:1,1", help="box:lo:hi, diamond:T, diamond:bottom:top or cone:...")
    group.add_argument("--spacing", type=float, default=0.1, help="lattice spacing")
    group.add_argument("--density", type=float, help="sprinkle at this density instead of building a lattice")


_ALIASES = {"mu": ("--mu0",), "t-grid": ("--grid",)}


def _add_task_options(parser: argparse.ArgumentParser, *names: str) -> None:
    options = {
        "K": dict(type=float, help="curvature lower bound"),
        "N": dict(type=float, help="dimension upper bound"),
        "p": dict(type=float, default=0.5, help="transport exponent in (0, 1)"),
        "t-grid": dict(type=int, default=21, help="number of interpolation times"),
        "mu": dict(help="selector or measure v1 document"),
        "nu": dict(help="selector or measure v1 document"),
        "x0": dict(help="point selector"),
        "x1": dict(help="point selector"),
        "V": dict(help="achronal set selector"),
        "E": dict(help="set selector"),
        "A0": dict(help="set selector"),
        "A1": dict(help="set selector"),
        "radii": dict(type=_floats, default=(), help="comma-separated radii"),
        "eps-gamma": dict(type=float, help="tolerance of the transport relation"),
    }
    for name in names:
        parser.add_argument(f"--{name}", *_ALIASES.get(name, ()), **options[name])  # type: ignore[arg-type]


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="lorentz-ot", description="Lorentzian optimal transport on finite causal spaces")
    parser.add_argument("--seed", type=int, help="seed of every random stream")
    parser.add_argument("--tol", type=float, help="multiplicative tolerance of the certifiers")
    parser.add_argument("--threads", type=int, default=1, help="worker threads of refinement studies")
    parser.add_argument("--out", default="out", help="directory for reports and residual tables")
    parser.add_argument("-v", "--verbose", action="store_true", help="log per-item detail")
    parser.add_argument("-q", "--quiet", action="store_true", help="log warnings only")
    sub = parser.add_subparsers(dest="command", required=True)

    for name, help_text in (("lattice", "build a lattice of a model region"), ("sprinkle", "sprinkle a model region")):
        cmd = sub.add_parser(name, help=help_text)
        _add_space_options(cmd)
        cmd.add_argument("path", help="where to write the causal-space document")

    cmd = sub.add_parser("validate", help="check the causal-space axioms of a document")
    cmd.add_argument("path", help="causal-space v1 document")

    cmd = sub.add_parser("solve", help="optimal coupling, monotonicity audit and duality gap")
    _add_space_options(cmd)
    _add_task_options(cmd, "mu", "nu", "p")
    cmd.add_argument("--backend", choices=("exact", "highs", "network", "auto"), default="auto", help="transport solver")

    cmd = sub.add_parser("certify-tcd", help="entropic convexity along the geodesic of an optimal plan")
    _add_space_options(cmd)
    _add_task_options(cmd, "mu", "nu", "K", "N", "p", "t-grid")

    cmd = sub.add_parser("certify-tmcp", help="entropic convexity of the contraction toward a point")
    _add_space_options(cmd)
    _add_task_options(cmd, "mu", "x1", "K", "N", "p", "t-grid")

    cmd = sub.add_parser("compare", help="Brunn-Minkowski, Bishop-Gromov, Bonnet-Myers or Poincare")
    _add_space_options(cmd)
    _add_task_options(cmd, "K", "N", "p", "t-grid", "x0", "E", "A0", "A1", "V", "radii", "eps-gamma")
    cmd.add_argument("--check", choices=CHECKS, default="bishop-gromov", help="which comparison")
    cmd.add_argument("--non-sharp", action="store_true", help="use the exponent-N forms")
    cmd.add_argument("--u", default="tau_V", help="Poincare test function: tau_V or coordinate:AXIS")

    cmd = sub.add_parser("disintegrate", help="rays of an achronal set and the MCP density test")
    _add_space_options(cmd)
    _add_task_options(cmd, "V", "K", "N", "t-grid", "radii", "eps-gamma")

    cmd = sub.add_parser("hawking", help="sup of the time separation to V against the Hawking threshold")
    _add_space_options(cmd)
    _add_task_options(cmd, "V", "K", "N", "eps-gamma")
    cmd.add_argument("--rays", help="rays v1 document written by disintegrate; skips ray extraction")
    cmd.add_argument("--H0", type=float, help="mean curvature bound; estimated from the rays when absent")
    cmd.add_argument("--phi", type=float, default=1.0, help="constant normal variation used by the estimate")
    cmd.add_argument("--t-max", type=float, help="fit window of the estimate")

    cmd = sub.add_parser("refine", help="certifier residual floors over decreasing spacings")
    cmd.add_argument("config", help="experiment file")
    cmd.add_argument("--spacings", type=_floats, help="comma-separated decreasing spacings")

    cmd = sub.add_parser("run", help="run an experiment file")
    cmd.add_argument("config", help="experiment file")
    return parser


# Configs from the command line


def _space_sections(args: argparse.Namespace) -> tuple[ModelSection, SamplerSection]:
    model = ModelSection(args.model, args.dim, args.k_sec, args.region)
    if args.density is not None:
        return model, SamplerSection("sprinkle", args.spacing, args.density, args.seed)
    return model, SamplerSection("lattice", args.spacing, None, args.seed)


def config_from_args(args: argparse.Namespace) -> ExperimentConfig:
    model, sampler = _space_sections(args)
    get = lambda name, default=None: getattr(args, name, default)
    inputs = InputSection(
        space=args.space,
        mu=get("mu"),
        nu=get("nu"),
        x0=get("x0"),
        x1=get("x1"),
        V=get("V"),
        E=get("E"),
        A0=get("A0"),
        A1=get("A1"),
        u=get("u", "tau_V"),
        rays=get("rays"),
    )
    task = TaskSection(
        name=args.command,
        K=get("K"),
        N=get("N"),
        p=get("p", 0.5),
        t_grid=get("t_grid", 21),
        tol=args.tol,
        backend=get("backend", "auto"),
        check=get("check", "bishop-gromov"),
        sharp=not get("non_sharp", False),
        radii=tuple(get("radii", ())),
        H0=get("H0"),
        phi=get("phi", 1.0),
        t_max=get("t_max"),
        eps_gamma=get("eps_gamma"),
        threads=args.threads,
    )
    return validate_config(ExperimentConfig(model, sampler, inputs, task, OutputSection(dir=args.out)))


def _overrides(args: argparse.Namespace) -> dict[str, str]:
    out = {"output.dir": args.out, "task.threads": str(args.threads)}
    if args.seed is not None:
        out["sampler.seed"] = str(args.seed)
    if args.tol is not None:
        out["task.tol"] = repr(args.tol)
    return out


def config_from_file(args: argparse.Namespace) -> ExperimentConfig:
    overrides = _overrides(args)
    if args.command == "refine":
        overrides["task.name"] = "refine"
        if args.spacings:
            overrides["task.spacings"] = ",".join(repr(s) for s in args.spacings)
    return parse_config(Path(args.config).read_text(), overrides)


# Commands


def _discretize(args: argparse.Namespace) -> int:
    if args.command == "sprinkle" and args.density is None:
        raise ConfigError("sampler.density", "mandatory in sprinkle mode")
    if args.command == "lattice":
        args.density = None
    model, sampler = _space_sections(args)
    config = ExperimentConfig(model, sampler)
    if sampler.mode == "sprinkle" and sampler.seed is None:
        raise ConfigError("sampler.seed", "mandatory in sprinkle mode")
    space = discretize(build_model(config), build_sampler(config))
    path = save(space, args.path)
    print(f"[{args.command.upper()}] {space.n} points -> {path}")
    return 0


def _validate(args: argparse.Namespace) -> int:
    space = read_space(args.path)
    violations = validate_axioms(space)
    for v in violations:
        print(f"[AXIOMS] {v.kind} at {v.indices}: defect {v.defect:.3g}")
    print(f"[AXIOMS] {space.n} points, {len(violations)} violations")
    return 0 if not violations else 2


def _experiment(config: ExperimentConfig) -> int:
    report = run_experiment(config)
    for check in report.checks:
        print(f"[{check.name.upper()}] {check.verdict} (worst residual {check.worst_residual:.4g}, tol {check.tolerance:.3g})")
    print(f"[REPORT] {report.verdict} -> {Path(config.output.dir) / config.output.report}")
    return exit_code(report.verdict)


def dispatch(args: argparse.Namespace) -> int:
    match args.command:
        case "lattice" | "sprinkle":
            return _discretize(args)
        case "validate":
            return _validate(args)
        case "run" | "refine":
            return _experiment(config_from_file(args))
        case _:
            return _experiment(config_from_args(args))


def main(argv: list[str] | None = None) -> int:
    try:
        args = build_parser().parse_args(argv)
    except ConfigError as e:
        print(f"[ERROR] {e}", file=sys.stderr)
        return INPUT_ERROR
    level = logging.DEBUG if args.verbose else logging.WARNING if args.quiet else logging.INFO
    logging.basicConfig(format="%(message)s")
    logging.getLogger().setLevel(level)
    try:
        return dispatch(args)
    except (LorentzOTError, OSError, json.JSONDecodeError) as e:
        print(f"[ERROR] {e}", file=sys.stderr)
        return INPUT_ERROR


if __name__ == "__main__":
    sys.exit(main())
