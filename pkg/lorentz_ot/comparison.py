"""
Geometric inequality checkers: Brunn-Minkowski, Bishop-Gromov in both exponents,
Bonnet-Myers in both forms, and the timelike Poincare inequality along rays.
"""

from __future__ import annotations

import functools
import json
import logging
import math
import os
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
from scipy import linalg
from scipy.spatial import cKDTree

from .causal_space import AchronalSet, FiniteCausalSpace, normalized_reference
from .coefficients import s_kappa, s_power_integral, sigma
from .disintegration import RayDecomposition
from .domains import DomainError, Infinite, PreconditionError, Verdict, passes_multiplicative
from .geodesics import Residual, default_tolerance, intermediate_point, snap_points
from .models import ModelSpacetime, geodesic_interpolate
from .transport import DualisabilityCertificate, strong_dualisability_certificate

logger = logging.getLogger(__name__)

CACHE_VARIABLE = "LORENZ_OT_CACHE"
FEM_KNOTS = 64


# Define the semantic domains


@dataclass(frozen=True)
class BrunnMinkowskiReport:
    K: float
    N: float
    theta: float
    half: bool
    tolerance: float
    regime: str
    verdict: Verdict
    rows: list[Residual]
    volumes: dict[float, float]
    certificate: DualisabilityCertificate


@dataclass(frozen=True, eq=False)
class VolumeProfile:
    radii: np.ndarray
    v: np.ndarray
    s: np.ndarray


@dataclass(frozen=True)
class ProfileRow:
    r: float
    R: float
    v_ratio: float
    v_bound: float
    s_ratio: float | None
    s_bound: float
    passed: bool

    @property
    def residual(self) -> float:
        return self.v_ratio - self.v_bound


@dataclass(frozen=True)
class BishopGromovReport:
    K: float
    N: float
    sharp: bool
    tolerance: float
    profile: VolumeProfile
    rows: list[ProfileRow]
    verdict: Verdict
    sharp_dominates: bool


@dataclass(frozen=True)
class BonnetMyersResult:
    max_tau: float
    bound: float
    passed: bool
    witness: tuple[int, int]


@dataclass(frozen=True)
class PoincareResult:
    lhs: float
    rhs: float
    lambda_used: float
    passed: bool
    diameter: float
    per_ray: list[tuple[int, float, float]] = field(default_factory=list)
    conservative: bool = True


# Brunn-Minkowski


def _intermediate_set(
    model: ModelSpacetime | None, space: FiniteCausalSpace, A0: list[int], A1: list[int], t: float
) -> list[int]:
    """Snapped t-intermediate points of all timelike pairs of A0 x A1"""
    pairs = [(x, y) for x in A0 for y in A1 if space.tau[x, y] > 0]
    if not pairs:
        return []
    if model is None:
        return sorted({intermediate_point(space, x, y, t) for x, y in pairs})
    targets = np.array([geodesic_interpolate(model, space.coords[x], space.coords[y], t) for x, y in pairs])
    points, _ = snap_points(space, cKDTree(space.coords), targets)
    return sorted(set(points.tolist()))


def brunn_minkowski_check(
    model: ModelSpacetime | None,
    space: FiniteCausalSpace,
    A0,
    A1,
    t_grid,
    K: float,
    N: float,
    p: float = 0.5,
    tol: float | None = None,
) -> BrunnMinkowskiReport:
    """m(A_t)^(1/N) >= sigma^(1-t)(Theta) m(A0)^(1/N) + sigma^(t)(Theta) m(A1)^(1/N)"""
    A0, A1 = sorted(set(int(i) for i in A0)), sorted(set(int(i) for i in A1))
    certificate = strong_dualisability_certificate(
        space, normalized_reference(space, A0), normalized_reference(space, A1), p
    )
    if not certificate.strongly:
        raise PreconditionError(f"Marginals are not strongly timelike {p}-dualisable: {certificate.reason}", certificate)
    tol = default_tolerance(space) if tol is None else tol
    separations = space.tau[np.ix_(A0, A1)]
    theta = float(separations.max() if K < 0 else separations.min())
    half = len(A1) == 1
    m0, m1 = float(space.weight[A0].sum()), float(space.weight[A1].sum())
    rows, volumes = [], {}
    for t in np.asarray(t_grid, dtype=float):
        if t == 0.0:
            At = A0
        elif t == 1.0:
            At = A1
        else:
            At = _intermediate_set(model, space, A0, A1, float(t))
        mt = float(space.weight[At].sum()) if At else 0.0
        volumes[float(t)] = mt
        s0, s1 = sigma(K / N, 1.0 - float(t), theta), sigma(K / N, float(t), theta)
        if isinstance(s0, Infinite) or isinstance(s1, Infinite):
            logger.info(f"[BM] K={K} N={N} Theta={theta:.6g}: K Theta^2 / N >= pi^2, inequality is vacuous")
            return BrunnMinkowskiReport(K, N, theta, half, tol, "vacuous", "VACUOUS", [], volumes, certificate)
        lhs = mt ** (1.0 / N)
        rhs = s0 * m0 ** (1.0 / N) + (0.0 if half else s1 * m1 ** (1.0 / N))
        rows.append(Residual((float(t),), lhs, rhs, lhs - rhs, passes_multiplicative(lhs, rhs, tol)))
    verdict: Verdict = "PASS" if all(r.passed for r in rows) else "FAIL"
    logger.info(f"[BM] K={K} N={N} Theta={theta:.6g}: {len(rows)} times, verdict {verdict}")
    return BrunnMinkowskiReport(K, N, theta, half, tol, "numeric", verdict, rows, volumes, certificate)


# Bishop-Gromov


def _check_star_shaped(model: ModelSpacetime | None, space: FiniteCausalSpace, x0: int, E: list[int]) -> None:
    members = set(E) | {x0}
    outside = [x for x in E if x != x0 and not space.tau[x0, x] > 0]
    if outside:
        raise DomainError(f"E is not inside I^+(x0) and {{x0}}: witness point {space.label(outside[0])}")
    tree = cKDTree(space.coords) if model is not None else None
    for t in (0.25, 0.5, 0.75):
        for x in E:
            if x == x0:
                continue
            if model is None:
                z = intermediate_point(space, x0, x, t)
            else:
                target = geodesic_interpolate(model, space.coords[x0], space.coords[x], t)
                z = int(snap_points(space, tree, target[None, :])[0][0])
            if z not in members:
                raise DomainError(
                    f"E is not tau-star-shaped about {space.label(x0)}: "
                    f"the {t}-intermediate point toward {space.label(x)} snaps to {space.label(z)}"
                )


def _profile_bounds(K: float, N: float, sharp: bool) -> tuple[float, float]:
    """(kappa, exponent) of the comparison profile"""
    if sharp:
        if N <= 1:
            raise DomainError(f"The sharp form needs N > 1, got N={N}")
        return K / (N - 1.0), N - 1.0
    return K / N, N


def _ratio_bounds(K: float, N: float, sharp: bool, r: float, R: float) -> tuple[float, float]:
    kappa, exponent = _profile_bounds(K, N, sharp)
    s = s_kappa(kappa, np.array([r, R]))
    s_bound = float((s[0] / s[1]) ** exponent)
    v_bound = s_power_integral(kappa, exponent, r) / s_power_integral(kappa, exponent, R)
    return v_bound, s_bound


def bishop_gromov_profile(
    model: ModelSpacetime | None,
    space: FiniteCausalSpace,
    x0: int,
    E,
    radii,
    K: float,
    N: float,
    sharp: bool,
    tol: float | None = None,
) -> BishopGromovReport:
    """Volume profile of tau-balls about x0 inside E, against the Bishop-Gromov ratio bounds"""
    E = sorted(set(int(i) for i in E))
    radii = np.asarray(radii, dtype=float)
    if radii.size < 2 or np.any(np.diff(radii) <= 0) or radii[0] <= 0:
        raise DomainError("Radii must be a positive increasing grid of at least two values")
    kappa, _ = _profile_bounds(K, N, sharp)
    if kappa > 0 and radii[-1] > math.pi / math.sqrt(kappa):
        raise DomainError(f"Radius {radii[-1]} exceeds pi / sqrt({kappa})")
    _check_star_shaped(model, space, x0, E)
    tol = default_tolerance(space) if tol is None else tol
    separation = space.tau[x0, E]
    weight = space.weight[E]
    v = np.array([math.fsum(weight[separation <= r]) for r in radii])
    steps = np.diff(radii)
    forward = np.diff(v) / steps
    # forward differences, and a backward one at the last radius
    s = np.concatenate([forward, forward[-1:]])
    profile = VolumeProfile(radii, v, s)
    rows, dominates = [], True
    for i, r in enumerate(radii):
        for j in range(i + 1, len(radii)):
            R = radii[j]
            if v[j] <= 0:
                continue
            v_bound, s_bound = _ratio_bounds(K, N, sharp, r, R)
            v_ratio = float(v[i] / v[j])
            s_ratio = float(s[i] / s[j]) if s[j] > 0 else None
            passed = passes_multiplicative(v_ratio, v_bound, tol) and (
                s_ratio is None or passes_multiplicative(s_ratio, s_bound, tol)
            )
            rows.append(ProfileRow(float(r), float(R), v_ratio, v_bound, s_ratio, s_bound, passed))
            if N > 1:
                sharp_v, sharp_s = _ratio_bounds(K, N, True, r, R)
                loose_v, loose_s = _ratio_bounds(K, N, False, r, R)
                if sharp_s < loose_s * (1.0 - 1e-12) or sharp_v < loose_v * (1.0 - 1e-12):
                    dominates = False
    if not dominates:
        logger.warning(f"[BG] the (N-1)-exponent bound is weaker than the N-exponent bound for K={K}, N={N}")
    verdict: Verdict = "PASS" if all(row.passed for row in rows) else "FAIL"
    logger.info(f"[BG] x0={space.label(x0)} |E|={len(E)} K={K} N={N} sharp={sharp}: {len(rows)} pairs, verdict {verdict}")
    return BishopGromovReport(K, N, sharp, tol, profile, rows, verdict, dominates)


# Bonnet-Myers


def bonnet_myers_check(space: FiniteCausalSpace, K: float, N: float, sharp: bool, tol: float | None = None) -> BonnetMyersResult:
    """max tau against pi sqrt(N/K), or pi sqrt((N-1)/K) in the sharp form"""
    if K <= 0:
        raise DomainError(f"Bonnet-Myers needs K > 0, got K={K}")
    if sharp and N <= 1:
        raise DomainError(f"The sharp form needs N > 1, got N={N}")
    tol = default_tolerance(space) if tol is None else tol
    bound = math.pi * math.sqrt(((N - 1.0) if sharp else N) / K)
    i, j = np.unravel_index(int(np.argmax(space.tau)), space.tau.shape)
    max_tau = float(space.tau[i, j])
    passed = max_tau <= bound * (1.0 + tol)
    logger.info(f"[BONNET-MYERS] max tau {max_tau:.6g} against {bound:.6g}: {'PASS' if passed else 'FAIL'}")
    return BonnetMyersResult(max_tau, bound, passed, (int(i), int(j)))


# Poincare


def _model_densities(K: float, N: float, D: float, knots: np.ndarray) -> list[np.ndarray]:
    """Constant, one-sided model and geometric-mean MCP(K, N) densities on [0, D]"""
    kappa = K / (N - 1.0)
    limit = math.pi / math.sqrt(kappa) if kappa > 0 else math.inf
    offsets = [0.0] + [D * 2.0**k for k in range(-3, 3)]
    left = [s_kappa(kappa, knots + a) ** (N - 1.0) for a in offsets if D + a < limit]
    right = [s_kappa(kappa, D + b - knots) ** (N - 1.0) for b in offsets if D + b < limit]
    means = [np.sqrt(l * r) for l in left for r in right]
    return [np.ones_like(knots)] + left + right + means


def _poincare_constant(density: np.ndarray, knots: np.ndarray) -> float:
    """Inverse first nonzero Neumann eigenvalue of -(h u')' = lambda h u by P1 finite elements"""
    n = knots.size
    h_mid = (density[:-1] + density[1:]) / 2.0
    step = np.diff(knots)
    stiffness, mass = np.zeros((n, n)), np.zeros((n, n))
    for e in range(n - 1):
        k = h_mid[e] / step[e]
        m = h_mid[e] * step[e] / 6.0
        idx = np.ix_([e, e + 1], [e, e + 1])
        stiffness[idx] += k * np.array([[1.0, -1.0], [-1.0, 1.0]])
        mass[idx] += m * np.array([[2.0, 1.0], [1.0, 2.0]])
    eigenvalues = linalg.eigh(stiffness, mass, eigvals_only=True)
    return 1.0 / float(eigenvalues[1])


def _cache_file() -> Path | None:
    directory = os.environ.get(CACHE_VARIABLE)
    return Path(directory) / "lambda_mcp.json" if directory else None


@functools.cache
def lambda_mcp(K: float, N: float, D: float) -> float:
    """An upper estimate of the one-dimensional MCP(K, N) Poincare constant on intervals of length D"""
    if N <= 1:
        raise DomainError(f"lambda_MCP needs N > 1, got N={N}")
    if D <= 0:
        raise DomainError(f"Interval length must be positive, got D={D}")
    if K > 0 and D >= math.pi * math.sqrt((N - 1.0) / K):
        raise DomainError(f"No MCP({K},{N}) interval has length {D}")
    key = f"{K!r},{N!r},{D!r}"
    path = _cache_file()
    cached = {}
    if path is not None and path.exists():
        cached = json.loads(path.read_text())
        if key in cached:
            return float(cached[key])

    def worst(knot_count: int) -> float:
        knots = np.linspace(0.0, D, knot_count + 1)
        return max(_poincare_constant(h, knots) for h in _model_densities(K, N, D, knots))

    fine, coarse = worst(FEM_KNOTS), worst(FEM_KNOTS // 2)
    value = fine + abs(fine - coarse)
    logger.debug(f"[POINCARE] lambda_MCP({K}, {N}, {D}) = {value:.6g} (64 vs 32 knots: {fine:.6g}, {coarse:.6g})")
    if path is not None:
        path.parent.mkdir(parents=True, exist_ok=True)
        cached[key] = value
        path.write_text(json.dumps(cached, sort_keys=True, indent=1))
    return value


def poincare_check(
    space: FiniteCausalSpace,
    V: AchronalSet,
    u,
    K: float,
    N: float,
    rays: RayDecomposition,
    lambda_override: float | None = None,
    tol: float | None = None,
) -> PoincareResult:
    """sum |u - u_alpha|^2 m <= lambda sum |d/dt u(alpha, t)|^2 m along the rays of V"""
    u = np.asarray(u, dtype=float)
    if u.shape != (space.n,):
        raise DomainError(f"u needs one value per point, got shape {u.shape}")
    support = np.flatnonzero(u != 0)
    stray = [int(i) for i in support if not rays.tau_V[i] > 0]
    if stray:
        raise DomainError(f"u is supported outside I^+(V) at {[space.label(i) for i in stray[:5]]}")
    tol = default_tolerance(space) if tol is None else tol
    segments = []
    for ray in rays.rays:
        values = u[list(ray.points)]
        hit = np.flatnonzero(values != 0)
        if hit.size == 0:
            continue
        lo, hi = int(hit[0]), int(hit[-1]) + 1
        segments.append((ray, values[lo:hi], ray.t_values[lo:hi], ray.weights[lo:hi]))
    diameter = max((float(t[-1] - t[0]) for _, _, t, _ in segments), default=0.0)
    if lambda_override is not None:
        lam, conservative = lambda_override, False
    elif diameter > 0:
        lam, conservative = lambda_mcp(K, N, diameter), True
    else:
        lam, conservative = 0.0, True
    per_ray, lhs_terms, rhs_terms = [], [], []
    for ray, values, t, w in segments:
        mean = float(np.dot(w, values) / w.sum())
        lhs = math.fsum(w * (values - mean) ** 2)
        slopes = np.diff(values) / np.diff(t) if t.size > 1 else np.zeros(0)
        rhs = math.fsum(slopes**2 * (w[:-1] + w[1:]) / 2.0)
        per_ray.append((ray.alpha, lhs, rhs))
        lhs_terms.append(lhs)
        rhs_terms.append(rhs)
    lhs, rhs = math.fsum(lhs_terms), lam * math.fsum(rhs_terms)
    passed = lhs <= rhs * (1.0 + tol)
    logger.info(f"[POINCARE] D={diameter:.4g} lambda={lam:.6g}: {lhs:.6g} <= {rhs:.6g} {'PASS' if passed else 'FAIL'}")
    return PoincareResult(lhs, rhs, lam, passed, diameter, per_ray, conservative)
