"""
Experiment orchestration: run one configured task into a certification report,
and refinement studies over decreasing lattice spacings.
"""

from __future__ import annotations

import dataclasses
import json
import logging
import math
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Any

import numpy as np

from .causal_space import (
    AchronalSet,
    FiniteCausalSpace,
    WeightedMeasure,
    achronal_set,
    normalized_reference,
)
from .comparison import bishop_gromov_profile, bonnet_myers_check, brunn_minkowski_check, poincare_check
from .config import ExperimentConfig, build_model, build_sampler, is_document, parse_selector
from .disintegration import (
    RayDecomposition,
    conical_bishop_gromov,
    extract_rays,
    hawking_certify,
    level_measures,
    mcp_density_test,
    mean_curvature_estimate,
    transport_relation,
)
from .domains import (
    ConfigError,
    Infinite,
    LorentzOTError,
    NotCyclicallyMonotoneError,
    PreconditionError,
    RegimeError,
    Verdict,
    combine_verdicts,
    to_json,
)
from .geodesics import ConvexityReport, default_tolerance, displacement_interpolation, tcd_certify, tmcp_certify
from .models import ModelSpacetime, select_points
from .persistence import (
    Persistable,
    achronal_from_json,
    input_hash,
    load,
    measure_to_json,
    read_document,
    read_measure,
    read_space,
    save,
    space_to_json,
    write_residual_table,
)
from .sampling import discretize
from .transport import (
    audit_cyclical_monotonicity,
    build_potentials,
    duality_gap,
    solve_lp,
    strong_dualisability_certificate,
)

logger = logging.getLogger(__name__)

COAREA_TOLERANCE = 1e-3
DUALITY_TOLERANCE = 1e-9


# Define the semantic domains


@dataclass(frozen=True)
class Provenance:
    module: str
    operation: str
    input_hash: str


@dataclass(frozen=True)
class CheckResult:
    name: str
    verdict: Verdict
    tolerance: float
    worst_residual: float
    columns: tuple[str, ...]
    rows: list[tuple[Any, ...]]
    provenance: Provenance
    summary: dict[str, Any] = field(default_factory=dict)


@dataclass(frozen=True)
class CertificationReport:
    config: dict[str, Any]
    checks: list[CheckResult]
    verdict: Verdict
    input_hashes: dict[str, str]
    wall_time: float = 0.0

    @property
    def exit_code(self) -> int:
        return exit_code(self.verdict)

    def to_json(self) -> dict[str, Any]:
        return {
            "schema": "report v1",
            "config": self.config,
            "verdict": self.verdict,
            "input_hashes": self.input_hashes,
            "checks": [_plain(dataclasses.asdict(check)) for check in self.checks],
            "wall_time": self.wall_time,
        }


@dataclass(frozen=True)
class ConvergenceRow:
    spacing: float
    points: int
    worst: float
    floor: float
    tolerance: float
    verdict: Verdict


@dataclass(frozen=True)
class ConvergenceTable:
    rows: list[ConvergenceRow]
    order: float | None
    verdict: Verdict


def exit_code(verdict: Verdict) -> int:
    match verdict:
        case "PASS":
            return 0
        case "FAIL":
            return 2
        case "VACUOUS":
            return 3


def _plain(value: Any) -> Any:
    """JSON-ready copy: numpy to Python, infinities to their string tags"""
    match value:
        case Infinite():
            return to_json(value)
        case dict():
            return {str(k): _plain(v) for k, v in value.items()}
        case list() | tuple():
            return [_plain(v) for v in value]
        case np.ndarray():
            return _plain(value.tolist())
        case np.generic():
            return _plain(value.item())
        case bool() | int() | str() | None:
            return value
        case float() if math.isinf(value):
            return "+inf" if value > 0 else "-inf"
        case float():
            return value
        case _:
            return str(value)


# Inputs


@dataclass(frozen=True, eq=False)
class Inputs:
    space: FiniteCausalSpace
    model: ModelSpacetime | None
    hashes: dict[str, str]


def load_inputs(config: ExperimentConfig, spacing: float | None = None) -> Inputs:
    if config.input.space is not None:
        space = read_space(config.input.space)
        model = space.meta.model
    else:
        model = build_model(config)
        space = discretize(model, build_sampler(config, spacing))
    hashes = {"config": input_hash(config.echo()), "space": input_hash(space_to_json(space))}
    return Inputs(space, model, hashes)


def _require(value: Any, path: str) -> Any:
    if value is None:
        raise ConfigError(path, "missing")
    return value


def resolve_points(space: FiniteCausalSpace, text: str, path: str) -> tuple[int, ...]:
    try:
        if is_document(text):
            return achronal_from_json(read_document(text, "achronal-set")).members
        return select_points(space, parse_selector(text, space.dim, path))
    except ConfigError:
        raise
    except LorentzOTError as e:
        raise ConfigError(path, str(e)) from e


def resolve_point(space: FiniteCausalSpace, text: str, path: str) -> int:
    points = resolve_points(space, text, path)
    if len(points) != 1:
        raise ConfigError(path, f"selects {len(points)} points, expected one")
    return points[0]


def resolve_measure(space: FiniteCausalSpace, text: str, path: str) -> WeightedMeasure:
    """A measure document, or the normalized reference measure on the selected points"""
    if is_document(text):
        mu = read_measure(text)
        stray = [i for i in mu.support if not 0 <= i < space.n]
        if stray:
            raise ConfigError(path, f"measure charges points {stray[:5]} outside the space")
        return mu
    return normalized_reference(space, resolve_points(space, text, path))


def resolve_achronal(space: FiniteCausalSpace, text: str, path: str) -> AchronalSet:
    try:
        return achronal_set(space, resolve_points(space, text, path), text)
    except ConfigError:
        raise
    except LorentzOTError as e:
        raise ConfigError(path, str(e)) from e


def _combined_hash(inputs: Inputs, extra: dict[str, str]) -> str:
    hashes = inputs.hashes | extra
    return input_hash(hashes)


# Conversions into checks


def _times(times: tuple[float, ...]) -> str:
    return ";".join(repr(t) for t in times)


def convexity_check(name: str, report: ConvexityReport, provenance: Provenance) -> CheckResult:
    rows = [("integrated", _times(r.times), r.lhs, r.rhs, r.residual, r.passed) for r in report.residuals]
    rows += [("second-difference", _times(r.times), r.lhs, r.rhs, r.residual, r.passed) for r in report.second_differences]
    summary = {
        "K": report.K,
        "N": report.N,
        "tau_norm": report.tau_norm,
        "regime": report.regime,
        "non_unique": report.non_unique,
        "u_values": list(report.u_values),
        "times": list(report.times),
        "residual_count": len(report.residuals),
    }
    return CheckResult(
        name,
        report.verdict,
        report.tolerance,
        report.worst,
        ("kind", "times", "lhs", "rhs", "residual", "passed"),
        rows,
        provenance,
        summary,
    )


def _verdict(passed: bool) -> Verdict:
    return "PASS" if passed else "FAIL"


# Tasks


def _run_solve(config: ExperimentConfig, inputs: Inputs) -> tuple[list[CheckResult], dict[str, Persistable]]:
    space, task = inputs.space, config.task
    mu = resolve_measure(space, _require(config.input.mu, "input.mu"), "input.mu")
    nu = resolve_measure(space, _require(config.input.nu, "input.nu"), "input.nu")
    digest = _combined_hash(inputs, {"mu": input_hash(measure_to_json(mu)), "nu": input_hash(measure_to_json(nu))})
    value, coupling = solve_lp(space, mu, nu, task.p, task.backend)
    logger.info(f"[SOLVE] l_{task.p} = {value} over {len(mu.support)} x {len(nu.support)} points")
    if coupling is None:
        provenance = Provenance("lorentz_ot.transport", "solve_lp", digest)
        return [
            CheckResult("solve", "VACUOUS", 0.0, 0.0, (), [], provenance, {"value": to_json(value), "reason": "no causal coupling"})
        ], {}
    scale = max(1.0, float(coupling.value))  # type: ignore[arg-type]
    audit = audit_cyclical_monotonicity(space, coupling, task.p, seed=config.sampler.seed or 0)
    rows = [(i, j, m, float(space.tau[i, j])) for i, j, m in coupling.pairs]
    checks = [
        CheckResult(
            "cyclical-monotonicity",
            _verdict(audit.defect <= DUALITY_TOLERANCE * scale),
            DUALITY_TOLERANCE * scale,
            -audit.defect,
            ("src", "dst", "mass", "tau"),
            rows,
            Provenance("lorentz_ot.transport", "audit_cyclical_monotonicity", digest),
            {
                "value": to_json(value),
                "defect": audit.defect,
                "cycle": [list(pair) for pair in audit.cycle],
                "cycles_checked": audit.cycles_checked,
                "exhaustive": audit.exhaustive,
            },
        )
    ]
    support = coupling.support()
    if all(space.tau[i, j] > 0 for i, j in support):
        provenance = Provenance("lorentz_ot.transport", "duality_gap", digest)
        try:
            potentials = build_potentials(space, support, task.p, support[0])
            gap = duality_gap(space, mu, nu, task.p, potentials)
            checks.append(
                CheckResult(
                    "duality",
                    _verdict(abs(gap) <= DUALITY_TOLERANCE * scale),
                    DUALITY_TOLERANCE * scale,
                    -abs(gap),
                    ("point", "phi", "psi"),
                    [(i, potentials.phi.get(i), potentials.psi.get(i)) for i in sorted(set(potentials.phi) | set(potentials.psi))],
                    provenance,
                    {"gap": gap},
                )
            )
        except NotCyclicallyMonotoneError as e:
            checks.append(CheckResult("duality", "FAIL", DUALITY_TOLERANCE * scale, -math.inf, (), [], provenance, {"cycle": str(e.cycle)}))
    return checks, {"coupling.json": coupling}


def _certify(config: ExperimentConfig, inputs: Inputs, certifier: str) -> tuple[ConvexityReport, Provenance]:
    space, task = inputs.space, config.task
    K, N = _require(task.K, "task.K"), _require(task.N, "task.N")
    times = np.linspace(0.0, 1.0, task.t_grid)
    match certifier:
        case "certify-tmcp":
            mu0 = resolve_measure(space, _require(config.input.mu, "input.mu"), "input.mu")
            x1 = resolve_point(space, _require(config.input.x1, "input.x1"), "input.x1")
            digest = _combined_hash(inputs, {"mu": input_hash(measure_to_json(mu0)), "x1": str(x1)})
            report = tmcp_certify(space, inputs.model, mu0, x1, K, N, task.p, task.t_grid, task.tol)
            return report, Provenance("lorentz_ot.geodesics", "tmcp_certify", digest)
        case "certify-tcd":
            mu = resolve_measure(space, _require(config.input.mu, "input.mu"), "input.mu")
            nu = resolve_measure(space, _require(config.input.nu, "input.nu"), "input.nu")
            digest = _combined_hash(inputs, {"mu": input_hash(measure_to_json(mu)), "nu": input_hash(measure_to_json(nu))})
            certificate = strong_dualisability_certificate(space, mu, nu, task.p)
            if certificate.witness is None:
                raise PreconditionError(f"(mu, nu) is not timelike p-dualisable: {certificate.reason}", certificate)
            path = displacement_interpolation(inputs.model, space, certificate.witness, times)
            report = tcd_certify(path, certificate.witness, K, N, space, task.tol, check_uniqueness=True)
            return report, Provenance("lorentz_ot.geodesics", "tcd_certify", digest)
        case other:
            raise ConfigError("task.certifier", f"unknown certifier {other!r}")


def _run_compare(config: ExperimentConfig, inputs: Inputs) -> tuple[list[CheckResult], dict[str, Persistable]]:
    space, model, task = inputs.space, inputs.model, config.task
    K, N = _require(task.K, "task.K"), _require(task.N, "task.N")
    match task.check:
        case "brunn-minkowski":
            A0 = resolve_points(space, _require(config.input.A0, "input.A0"), "input.A0")
            A1 = resolve_points(space, _require(config.input.A1, "input.A1"), "input.A1")
            digest = _combined_hash(inputs, {"A0": input_hash(list(A0)), "A1": input_hash(list(A1))})
            bm = brunn_minkowski_check(model, space, A0, A1, np.linspace(0.0, 1.0, task.t_grid), K, N, task.p, task.tol)
            rows = [(_times(r.times), r.lhs, r.rhs, r.residual, r.passed) for r in bm.rows]
            worst = min((r.residual for r in bm.rows), default=0.0)
            summary = {"theta": bm.theta, "half": bm.half, "regime": bm.regime, "volumes": {repr(t): v for t, v in bm.volumes.items()}}
            check = CheckResult(
                "brunn-minkowski",
                bm.verdict,
                bm.tolerance,
                worst,
                ("t", "lhs", "rhs", "residual", "passed"),
                rows,
                Provenance("lorentz_ot.comparison", "brunn_minkowski_check", digest),
                summary,
            )
        case "bishop-gromov":
            x0 = resolve_point(space, _require(config.input.x0, "input.x0"), "input.x0")
            E = resolve_points(space, _require(config.input.E, "input.E"), "input.E")
            digest = _combined_hash(inputs, {"x0": str(x0), "E": input_hash(list(E))})
            bg = bishop_gromov_profile(model, space, x0, E, task.radii, K, N, task.sharp, task.tol)
            rows = [(r.r, r.R, r.v_ratio, r.v_bound, r.s_ratio, r.s_bound, r.passed) for r in bg.rows]
            check = CheckResult(
                "bishop-gromov",
                bg.verdict,
                bg.tolerance,
                min((r.residual for r in bg.rows), default=0.0),
                ("r", "R", "v_ratio", "v_bound", "s_ratio", "s_bound", "passed"),
                rows,
                Provenance("lorentz_ot.comparison", "bishop_gromov_profile", digest),
                {"sharp": bg.sharp, "sharp_dominates": bg.sharp_dominates, "v": bg.profile.v, "s": bg.profile.s},
            )
        case "bonnet-myers":
            digest = _combined_hash(inputs, {})
            tol = default_tolerance(space) if task.tol is None else task.tol
            result = bonnet_myers_check(space, K, N, task.sharp, tol)
            check = CheckResult(
                "bonnet-myers",
                _verdict(result.passed),
                tol,
                result.bound - result.max_tau,
                ("max_tau", "bound", "src", "dst"),
                [(result.max_tau, result.bound, *result.witness)],
                Provenance("lorentz_ot.comparison", "bonnet_myers_check", digest),
            )
        case "poincare":
            V = resolve_achronal(space, _require(config.input.V, "input.V"), "input.V")
            rays = _rays(space, V, task.eps_gamma)
            u = _test_function(space, rays, config.input.u)
            digest = _combined_hash(inputs, {"V": input_hash(list(V.members)), "u": input_hash(u.tolist())})
            tol = default_tolerance(space) if task.tol is None else task.tol
            result = poincare_check(space, V, u, K, N, rays, tol=tol)
            check = CheckResult(
                "poincare",
                _verdict(result.passed),
                tol,
                result.rhs - result.lhs,
                ("alpha", "variance", "energy"),
                list(result.per_ray),
                Provenance("lorentz_ot.comparison", "poincare_check", digest),
                {"lambda": result.lambda_used, "diameter": result.diameter, "conservative": result.conservative},
            )
        case other:
            raise ConfigError("task.check", f"unknown check {other!r}")
    return [check], {}


def _rays(space: FiniteCausalSpace, V: AchronalSet, eps_gamma: float | None) -> RayDecomposition:
    relation = transport_relation(space, V, eps_gamma)
    return extract_rays(space, relation)


def _load_rays(space: FiniteCausalSpace, path: str) -> RayDecomposition:
    try:
        rays = load(path, "rays")
    except LorentzOTError as e:
        raise ConfigError("input.rays", str(e)) from e
    highest = max((max(ray.points) for ray in rays.rays), default=-1)
    if rays.tau_V.shape != (space.n,) or highest >= space.n or max(rays.V.members, default=-1) >= space.n:
        raise ConfigError("input.rays", f"rays of a different space: {rays.tau_V.size} levels for {space.n} points")
    logger.info(f"[RAYS] loaded {len(rays.rays)} rays from {path}")
    return rays


def _test_function(space: FiniteCausalSpace, rays: RayDecomposition, text: str) -> np.ndarray:
    future = rays.tau_V > 0
    match text.split(":"):
        case ["tau_V"]:
            return np.where(future, rays.tau_V, 0.0)
        case ["coordinate", axis] if axis.isdigit() and int(axis) < space.dim:
            return np.where(future, space.coords[:, int(axis)], 0.0)
        case _:
            raise ConfigError("input.u", f"expected tau_V or coordinate:AXIS, got {text!r}")


def _run_disintegrate(config: ExperimentConfig, inputs: Inputs) -> tuple[list[CheckResult], dict[str, Persistable]]:
    space, task = inputs.space, config.task
    K, N = _require(task.K, "task.K"), _require(task.N, "task.N")
    if config.input.rays is not None:
        rays = _load_rays(space, config.input.rays)
        V = rays.V
        if config.input.V is not None and resolve_achronal(space, config.input.V, "input.V").members != V.members:
            raise ConfigError("input.V", "differs from the achronal set of input.rays")
    else:
        V = resolve_achronal(space, _require(config.input.V, "input.V"), "input.V")
        rays = _rays(space, V, task.eps_gamma)
    digest = _combined_hash(inputs, {"V": input_hash(list(V.members))})
    logger.info(f"[RAYS] {len(rays.rays)} rays, {len(rays.unassigned)} unassigned points, {rays.splits} splits")
    density = mcp_density_test(rays, K, N, task.tol)
    checks = [
        CheckResult(
            "mcp-density",
            density.verdict,
            density.tolerance,
            min((r.residual for r in density.residuals), default=0.0),
            ("alpha", "t0", "t1", "ratio", "lower", "upper", "residual"),
            [dataclasses.astuple(r) for r in density.residuals],
            Provenance("lorentz_ot.disintegration", "mcp_density_test", digest),
            {"skipped": density.skipped, "skipped_mass": density.skipped_mass, "rays": len(rays.rays)},
        )
    ]
    top = float(rays.tau_V.max(initial=0.0))
    levels = level_measures(rays, np.linspace(0.0, top, task.t_grid))
    checks.append(
        CheckResult(
            "coarea",
            _verdict(levels.coarea_residual <= COAREA_TOLERANCE),
            COAREA_TOLERANCE,
            -levels.coarea_residual,
            ("ray_lo", "ray_hi", "lo", "hi", "mass", "integral", "residual"),
            [dataclasses.astuple(s) for s in levels.slabs],
            Provenance("lorentz_ot.disintegration", "level_measures", digest),
            {"t_grid": levels.t_grid, "H": levels.H, "mass_defect": rays.mass_defect},
        )
    )
    if task.radii and N > 1:
        conical = conical_bishop_gromov(rays, task.radii, K, N)
        rows = [("level", *dataclasses.astuple(r)) for r in conical.level_rows]
        rows += [("volume", *dataclasses.astuple(r)) for r in conical.volume_rows]
        checks.append(
            CheckResult(
                "conical-bishop-gromov",
                conical.verdict,
                1e-6,
                min((r.ratio - r.bound for r in conical.level_rows + conical.volume_rows), default=0.0),
                ("kind", "r", "R", "ratio", "bound", "passed"),
                rows,
                Provenance("lorentz_ot.disintegration", "conical_bishop_gromov", digest),
            )
        )
    return checks, {"rays.json": rays}


def _run_hawking(config: ExperimentConfig, inputs: Inputs) -> tuple[list[CheckResult], dict[str, Persistable]]:
    space, task = inputs.space, config.task
    K, N = _require(task.K, "task.K"), _require(task.N, "task.N")
    V = resolve_achronal(space, _require(config.input.V, "input.V"), "input.V")
    rays = _rays(space, V, task.eps_gamma)
    digest = _combined_hash(inputs, {"V": input_hash(list(V.members))})
    summary: dict[str, Any] = {}
    H0 = task.H0
    if H0 is None:
        t_max = task.t_max if task.t_max is not None else rays.tau_V.max(initial=0.0) / 4.0
        estimate = mean_curvature_estimate(space, rays, {v: task.phi for v in V.members}, float(t_max))
        H0 = estimate.H0_sample
        summary |= {"H0_estimated": True, "fit_window": list(estimate.fit_window), "fit_residual": estimate.residual}
    provenance = Provenance("lorentz_ot.disintegration", "hawking_certify", digest)
    try:
        result = hawking_certify(space, rays, H0, K, N)
    except RegimeError as e:
        logger.info(f"[HAWKING] {e}: the bound says nothing")
        return [CheckResult("hawking", "VACUOUS", 1e-9, 0.0, (), [], provenance, summary | {"H0": H0, "reason": str(e)})], {}
    return [
        CheckResult(
            "hawking",
            _verdict(result.passed),
            1e-9,
            result.D - result.sup_tau_V,
            ("sup_tau_V", "D", "witness"),
            [(result.sup_tau_V, result.D, result.witness)],
            provenance,
            summary | {"H0": H0, "regime": result.regime},
        )
    ], {}


# Refinement


def _refinement_row(config: ExperimentConfig, spacing: float) -> ConvergenceRow:
    inputs = load_inputs(config, spacing)
    report, _ = _certify(config, inputs, config.task.certifier)
    floor = max(0.0, -report.worst)
    logger.info(f"[REFINE] spacing {spacing}: {inputs.space.n} points, residual floor {floor:.4g}, {report.verdict}")
    return ConvergenceRow(spacing, inputs.space.n, report.worst, floor, report.tolerance, report.verdict)


def refinement_study(config: ExperimentConfig, spacings: list[float] | None = None) -> ConvergenceTable:
    """Certifier residual floors across decreasing spacings, with a fitted convergence order"""
    spacings = list(config.task.spacings if spacings is None else spacings)
    if len(spacings) < 3:
        raise ConfigError("task.spacings", f"a refinement study needs at least 3 spacings, got {len(spacings)}")
    if any(b >= a for a, b in zip(spacings, spacings[1:])):
        raise ConfigError("task.spacings", "spacings must decrease")
    with ThreadPoolExecutor(max_workers=config.task.threads) as pool:
        rows = list(pool.map(lambda s: _refinement_row(config, s), spacings))
    floors = np.array([row.floor for row in rows])
    positive = floors > 0
    order = None
    if positive.sum() >= 2:
        slope, _ = np.polyfit(np.log(np.array(spacings)[positive]), np.log(floors[positive]), 1)
        order = float(slope)
    settled = all(b.floor <= a.floor + b.tolerance for a, b in zip(rows, rows[1:]))
    verdict = _verdict(settled and rows[-1].floor <= rows[-1].tolerance)
    logger.info(f"[REFINE] order {order if order is None else round(order, 3)}, verdict {verdict}")
    return ConvergenceTable(rows, order, verdict)


def _run_refine(config: ExperimentConfig, hashes: dict[str, str]) -> tuple[list[CheckResult], dict[str, Persistable]]:
    table = refinement_study(config)
    operation = "tmcp_certify" if config.task.certifier == "certify-tmcp" else "tcd_certify"
    return [
        CheckResult(
            "refinement",
            table.verdict,
            table.rows[-1].tolerance,
            table.rows[-1].worst,
            ("spacing", "points", "worst", "floor", "tolerance", "verdict"),
            [dataclasses.astuple(row) for row in table.rows],
            Provenance("lorentz_ot.geodesics", operation, input_hash(hashes)),
            {"order": table.order, "certifier": config.task.certifier},
        )
    ], {}


# Orchestration


def _dispatch(config: ExperimentConfig, inputs: Inputs) -> tuple[list[CheckResult], dict[str, Persistable]]:
    match config.task.name:
        case "solve":
            return _run_solve(config, inputs)
        case "certify-tcd" | "certify-tmcp":
            report, provenance = _certify(config, inputs, config.task.name)
            return [convexity_check(config.task.name, report, provenance)], {}
        case "compare":
            return _run_compare(config, inputs)
        case "disintegrate":
            return _run_disintegrate(config, inputs)
        case "hawking":
            return _run_hawking(config, inputs)
        case other:
            raise ConfigError("task.name", f"unknown task {other!r}")


def run_experiment(config: ExperimentConfig, write: bool = True) -> CertificationReport:
    """Run the configured task; with write, store the report, residual tables and artifacts"""
    start = time.perf_counter()
    if config.task.name == "refine":
        # every spacing builds its own space
        hashes = {"config": input_hash(config.echo())}
        checks, artifacts = _run_refine(config, hashes)
    else:
        inputs = load_inputs(config)
        hashes = inputs.hashes
        checks, artifacts = _dispatch(config, inputs)
    verdict = combine_verdicts([check.verdict for check in checks])
    report = CertificationReport(config.echo(), checks, verdict, dict(hashes))
    report = replace(report, wall_time=time.perf_counter() - start)
    logger.info(f"[REPORT] {config.task.name}: {verdict} over {len(checks)} checks in {report.wall_time:.2f}s")
    if write:
        write_report(report, Path(config.output.dir), config.output.report, config.output.csv, artifacts)
    return report


def report_text(report: CertificationReport) -> str:
    return json.dumps(report.to_json(), sort_keys=True, indent=1) + "\n"


def write_report(
    report: CertificationReport,
    directory: Path,
    name: str = "report.json",
    tables: bool = True,
    artifacts: dict[str, Persistable] | None = None,
) -> Path:
    directory.mkdir(parents=True, exist_ok=True)
    path = directory / name
    path.write_text(report_text(report))
    if tables:
        for check in report.checks:
            if check.columns:
                provenance = {
                    "module": check.provenance.module,
                    "operation": check.provenance.operation,
                    "input_hash": check.provenance.input_hash,
                    "tolerance": repr(check.tolerance),
                    "verdict": check.verdict,
                }
                write_residual_table(directory / f"{check.name}.csv", check.columns, check.rows, provenance)
    for filename, obj in (artifacts or {}).items():
        save(obj, directory / filename)
    logger.info(f"[REPORT] wrote {path}")
    return path


def report_digest(report: CertificationReport) -> str:
    """Hash of the report without its wall time"""
    body = report.to_json()
    body.pop("wall_time")
    return input_hash(body)
