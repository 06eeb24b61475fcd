"""
Ray decomposition of I^+(V) induced by the signed time separation tau_V.

The transport relation Gamma_V pairs x with z when tau_V(z) - tau_V(x) = tau(x, z) > 0.
On a sample this equality only holds up to the spacing, so rays are read off the
best-successor forest of Gamma_V and every ray is checked for the isometry property.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from typing import Iterable, Literal

import numpy as np

from .causal_space import AchronalSet, FiniteCausalSpace, from_weights, signed_time_separation
from .coefficients import HawkingParams, hawking_threshold, mcp_ratio_bounds, s_c_coeff, s_power_integral
from .domains import CodimensionError, DomainError, IndexSet, RegimeError, Verdict, passes_multiplicative
from .transport import Coupling, make_coupling

logger = logging.getLogger(__name__)

# Rays need this many bins before their density is tested
MIN_BINS = 3
MAX_BINS = 32
COAREA_SLABS = 4


# Define the semantic domains


@dataclass(frozen=True, eq=False)
class TransportRelation:
    V: AchronalSet
    tau_V: np.ndarray
    eps: float
    spacing: float
    domain: IndexSet  # I^+(V) together with V
    src: np.ndarray
    dst: np.ndarray
    defect: np.ndarray

    def pairs(self) -> set[tuple[int, int]]:
        """Gamma_V without its diagonal"""
        return {(int(x), int(z)) for x, z in zip(self.src, self.dst)}

    def symmetric(self) -> set[tuple[int, int]]:
        """R_V = Gamma_V and its inverse, without the diagonal"""
        gamma = self.pairs()
        return gamma | {(z, x) for x, z in gamma}

    def transport_set(self) -> IndexSet:
        return tuple(sorted(set(self.src.tolist()) | set(self.dst.tolist())))


@dataclass(frozen=True, eq=False)
class Ray:
    alpha: int
    points: IndexSet
    t_values: np.ndarray
    weights: np.ndarray
    cells: np.ndarray  # (k, 2) Voronoi interval of each t value
    q_weight: float
    bin_edges: np.ndarray
    h_samples: np.ndarray

    @property
    def mass(self) -> float:
        return math.fsum(self.weights)

    @property
    def length(self) -> float:
        return float(self.t_values[-1] - self.t_values[0])

    @property
    def bin_centers(self) -> np.ndarray:
        return (self.bin_edges[:-1] + self.bin_edges[1:]) / 2.0

    @property
    def point_density(self) -> np.ndarray:
        """m-weight per unit of t at each point, relative to q"""
        return self.weights / (self.cells[:, 1] - self.cells[:, 0]) / self.q_weight

    def h_at(self, t: float) -> float:
        """The binned conditional density h(alpha, t), zero off the ray"""
        if not self.bin_edges[0] <= t <= self.bin_edges[-1]:
            return 0.0
        k = min(int(np.searchsorted(self.bin_edges, t, side="right")) - 1, len(self.h_samples) - 1)
        return float(self.h_samples[k])

    def g_at(self, t: float | np.ndarray) -> np.ndarray:
        """Piecewise-linear density through the point values"""
        return np.interp(t, self.t_values, self.point_density)

    def h_linear(self, t: np.ndarray) -> np.ndarray:
        """h through the bin centres, extended linearly to the outer edges and clipped at zero"""
        centers, h = self.bin_centers, self.h_samples
        if len(h) == 1:
            return np.full(np.shape(t), float(h[0]))
        out = np.interp(t, centers, h)
        left, right = t < centers[0], t > centers[-1]
        out[left] = h[0] + (t[left] - centers[0]) * (h[1] - h[0]) / (centers[1] - centers[0])
        out[right] = h[-1] + (t[right] - centers[-1]) * (h[-1] - h[-2]) / (centers[-1] - centers[-2])
        return np.maximum(out, 0.0)

    def cell_integral(self, lo: float, hi: float) -> tuple[float, float]:
        """(mass of the points with lo <= t <= hi, q times the integral of h over their cells)"""
        inside = np.flatnonzero((self.t_values >= lo) & (self.t_values <= hi))
        if inside.size == 0:
            return 0.0, 0.0
        a, b = self.cells[inside[0], 0], self.cells[inside[-1], 1]
        knots = np.concatenate([[a], self.bin_centers[(self.bin_centers > a) & (self.bin_centers < b)], [b]])
        integral = float(np.sum(np.diff(knots) * (self.h_linear(knots[:-1]) + self.h_linear(knots[1:])) / 2.0))
        return math.fsum(self.weights[inside]), self.q_weight * integral


@dataclass(frozen=True, eq=False)
class RayDecomposition:
    V: AchronalSet
    tau_V: np.ndarray
    rays: list[Ray]
    endpoints_a: IndexSet
    endpoints_b: IndexSet
    unassigned: IndexSet
    total_mass: float
    spacing: float
    splits: int = 0

    @property
    def short_rays(self) -> list[Ray]:
        return [ray for ray in self.rays if len(ray.h_samples) < MIN_BINS]

    @property
    def mass_defect(self) -> float:
        """|sum_alpha q(alpha) int h(alpha, t) dt - m(T_V)|"""
        total = math.fsum(ray.q_weight * float(np.dot(ray.h_samples, np.diff(ray.bin_edges))) for ray in self.rays)
        return abs(total - self.total_mass)


@dataclass(frozen=True)
class DensityResidual:
    alpha: int
    t0: float
    t1: float
    ratio: float
    lower: float
    upper: float
    residual: float


@dataclass(frozen=True)
class DensityTestReport:
    K: float
    N: float
    tolerance: float
    verdict: Verdict
    residuals: list[DensityResidual]
    skipped: int
    skipped_mass: float
    witness: DensityResidual | None = None


@dataclass(frozen=True)
class SlabCheck:
    """Coarea check on rays[ray_lo:ray_hi] x {lo <= tau_V <= hi}"""

    ray_lo: int
    ray_hi: int
    lo: float
    hi: float
    mass: float
    integral: float
    residual: float


@dataclass(frozen=True)
class LevelMeasures:
    t_grid: np.ndarray
    H: np.ndarray
    slabs: list[SlabCheck]

    @property
    def coarea_residual(self) -> float:
        return max((s.residual for s in self.slabs), default=0.0)


@dataclass(frozen=True)
class MeanCurvatureEstimate:
    phi: dict[int, float]
    H0_sample: float
    fit_window: tuple[float, float]
    residual: float
    quotients: np.ndarray = field(default_factory=lambda: np.zeros(0))


@dataclass(frozen=True)
class HawkingReport:
    sup_tau_V: float
    D: float
    passed: bool
    regime: Literal["K>0", "K=0", "K<0", "N=1"]
    witness: int | None


@dataclass(frozen=True)
class ConicalRow:
    r: float
    R: float
    ratio: float
    bound: float
    passed: bool


@dataclass(frozen=True)
class ConicalReport:
    level_rows: list[ConicalRow]
    volume_rows: list[ConicalRow]
    verdict: Verdict


def _spacing(space: FiniteCausalSpace) -> float:
    if space.meta.spacing is not None:
        return space.meta.spacing
    gaps = np.diff(np.unique(space.coords[:, 0]))
    return float(gaps.min()) if gaps.size else 1.0


# Transport relation


def transport_relation(space: FiniteCausalSpace, V: AchronalSet, eps_gamma: float | None = None) -> TransportRelation:
    """Gamma_V = {(x, z): x <= z, tau(x, z) > 0, |tau_V(z) - tau_V(x) - tau(x, z)| <= eps}"""
    tau_V = signed_time_separation(space, V)
    spacing = _spacing(space)
    top = float(tau_V.max(initial=0.0))
    eps = 2.0 * spacing * (1.0 + top) if eps_gamma is None else eps_gamma
    in_V = np.zeros(space.n, dtype=bool)
    in_V[list(V.members)] = True
    domain = np.flatnonzero((tau_V > 0) | in_V)
    sub_tau = space.tau[np.ix_(domain, domain)]
    t = tau_V[domain]
    defect = t[None, :] - t[:, None] - sub_tau
    mask = space.leq[np.ix_(domain, domain)] & (sub_tau > 0) & (np.abs(defect) <= eps) & (t[None, :] > t[:, None])
    xi, zi = np.nonzero(mask)
    logger.info(f"[RAYS] Gamma_V over {domain.size} points: {xi.size} pairs at eps {eps:.3g}")
    return TransportRelation(
        V, tau_V, eps, spacing, tuple(int(i) for i in domain), domain[xi], domain[zi], np.abs(defect[mask])
    )


# Rays


def _best_successors(space: FiniteCausalSpace, relation: TransportRelation) -> dict[int, tuple[int, int, float]]:
    """x -> (z, quantized defect, tau) for the least-defect successor of each x"""
    quantum = 1e-12 * (1.0 + float(relation.tau_V.max(initial=0.0)))
    q = np.round(relation.defect / quantum).astype(np.int64)
    tau = space.tau[relation.src, relation.dst]
    order = np.lexsort((relation.dst, tau, q, relation.src))
    best: dict[int, tuple[int, int, float]] = {}
    for k in order:
        x = int(relation.src[k])
        if x not in best:
            best[x] = (int(relation.dst[k]), int(q[k]), float(tau[k]))
    return best


def _chains(relation: TransportRelation, best: dict[int, tuple[int, int, float]]) -> tuple[list[list[int]], int]:
    claims: dict[int, list[tuple[int, float, int]]] = {}
    for x, (z, q, tau) in best.items():
        claims.setdefault(z, []).append((q, tau, x))
    successor: dict[int, int] = {}
    splits = 0
    for z, claimants in claims.items():
        claimants.sort()
        successor[claimants[0][2]] = z
        splits += len(claimants) - 1
    has_predecessor = set(successor.values())
    chains = []
    for start in relation.domain:
        if start in has_predecessor:
            continue
        chain = [start]
        while chain[-1] in successor:
            chain.append(successor[chain[-1]])
        chains.append(chain)
    return chains, splits


def _split_isometry(space: FiniteCausalSpace, chain: list[int], tau_V: np.ndarray, tol: float) -> list[list[int]]:
    """Cut a chain wherever tau(p_i, p_{i+2}) departs from t_{i+2} - t_i"""
    pieces, current = [], chain[:2]
    for k in range(2, len(chain)):
        a, b = current[-2], chain[k]
        if len(current) >= 2 and abs(space.tau[a, b] - (tau_V[b] - tau_V[a])) > tol:
            pieces.append(current)
            current = [chain[k]]
        else:
            current.append(chain[k])
    pieces.append(current)
    return pieces


def _cells(t: np.ndarray, spacing: float) -> np.ndarray:
    mids = (t[:-1] + t[1:]) / 2.0
    lo = np.concatenate([[t[0] - spacing / 2.0], mids])
    hi = np.concatenate([mids, [t[-1] + spacing / 2.0]])
    return np.stack([lo, hi], axis=1)


def _bin_edges(start: float, end: float, spacing: float) -> np.ndarray:
    width = max(2.0 * spacing, (end - start) / MAX_BINS)
    full = math.floor((end - start) / width + 1e-9)
    edges = list(start + width * np.arange(full + 1))
    if len(edges) == 1:
        edges.append(end)
    elif end - edges[-1] > width / 2.0:
        edges.append(end)
    else:
        edges[-1] = end
    return np.array(edges)


def _binned_mass(cells: np.ndarray, weights: np.ndarray, edges: np.ndarray) -> np.ndarray:
    """Mass per bin, spreading each point's weight uniformly over its cell"""
    lo = np.maximum(cells[:, 0][:, None], edges[None, :-1])
    hi = np.minimum(cells[:, 1][:, None], edges[None, 1:])
    overlap = np.clip(hi - lo, 0.0, None) / (cells[:, 1] - cells[:, 0])[:, None]
    return weights @ overlap


def make_ray(alpha: int, points: Iterable[int], t_values, weights, q_weight: float, spacing: float) -> Ray:
    t = np.asarray(t_values, dtype=float)
    w = np.asarray(weights, dtype=float)
    cells = _cells(t, spacing)
    edges = _bin_edges(cells[0, 0], cells[-1, 1], spacing)
    h = _binned_mass(cells, w, edges) / np.diff(edges) / q_weight
    return Ray(alpha, tuple(int(i) for i in points), t, w, cells, q_weight, edges, h)


def extract_rays(space: FiniteCausalSpace, relation: TransportRelation, tol: float | None = None) -> RayDecomposition:
    """Classes of R_V ordered by tau_V, with quotient weights and binned conditional densities"""
    tol = relation.eps if tol is None else tol
    tau_V = relation.tau_V
    chains, splits = _chains(relation, _best_successors(space, relation))
    pieces = []
    for chain in chains:
        parts = _split_isometry(space, chain, tau_V, tol)
        splits += len(parts) - 1
        pieces.extend(parts)
    if splits:
        logger.warning(f"[RAYS] {splits} splits of branching chains")
    long = sorted((p for p in pieces if len(p) >= 2), key=lambda p: p[0])
    unassigned = tuple(sorted(p[0] for p in pieces if len(p) == 1))
    total = math.fsum(float(space.weight[p].sum()) for p in long)
    rays = [
        make_ray(alpha, p, tau_V[p], space.weight[p], float(space.weight[p].sum()) / total, relation.spacing)
        for alpha, p in enumerate(long)
    ]
    decomposition = RayDecomposition(
        relation.V,
        tau_V,
        rays,
        tuple(sorted(p[0] for p in long)),
        tuple(sorted(p[-1] for p in long)),
        unassigned,
        total,
        relation.spacing,
        splits,
    )
    logger.info(
        f"[RAYS] {len(rays)} rays, {len(unassigned)} unassigned points, {len(decomposition.short_rays)} short rays"
    )
    return decomposition


def ray_translation_coupling(
    space: FiniteCausalSpace, decomposition: RayDecomposition, shift: float, p: float, tol: float | None = None
) -> Coupling:
    """Uniform coupling of each ray point x with the point at tau_V(x) + shift on its ray"""
    tol = 1e-9 * (1.0 + shift) if tol is None else tol
    src, dst = [], []
    for ray in decomposition.rays:
        for k, t in enumerate(ray.t_values):
            hit = np.flatnonzero(np.abs(ray.t_values - (t + shift)) <= tol)
            if hit.size:
                src.append(ray.points[k])
                dst.append(ray.points[int(hit[0])])
    if not src:
        raise DomainError(f"No ray carries two points at distance {shift}")
    mass = np.full(len(src), 1.0 / len(src))
    return make_coupling(space, src, dst, mass, from_weights(src, mass), from_weights(dst, mass), p)


# Density test


def _as_rays(rays: RayDecomposition | list[Ray]) -> list[Ray]:
    return rays.rays if isinstance(rays, RayDecomposition) else list(rays)


def mcp_density_test(rays: RayDecomposition | list[Ray], K: float, N: float, tol: float | None = None) -> DensityTestReport:
    """Two-sided MCP(K, N) ratio bounds of h(alpha, .) over all bin pairs of every ray"""
    rays = _as_rays(rays)
    if N < 1:
        raise DomainError(f"Dimension bound N must be at least 1, got {N}")
    if tol is None:
        spacing = min((float(np.diff(r.bin_edges).min()) / 2.0 for r in rays), default=0.0)
        tol = max(5.0 * spacing, 1e-6)
    residuals, skipped, skipped_mass = [], 0, 0.0
    witness = None
    for ray in rays:
        if len(ray.h_samples) < MIN_BINS:
            skipped += 1
            skipped_mass += ray.mass
            continue
        centers, h = ray.bin_centers, ray.h_samples
        a, b = float(ray.bin_edges[0]), float(ray.bin_edges[-1])
        if N == 1:
            spread = (h.max() - h.min()) / h.max()
            row = DensityResidual(ray.alpha, a, b, float(h.min() / h.max()), 1.0, 1.0, -float(spread))
            residuals.append(row)
            if spread > tol and (witness is None or row.residual < witness.residual):
                witness = row
            continue
        for i in range(len(h)):
            for j in range(i + 1, len(h)):
                t0, t1 = float(centers[i]), float(centers[j])
                ratio = float(h[j] / h[i]) if h[i] > 0 else math.inf
                try:
                    lower, upper = mcp_ratio_bounds(K, N, a, b, t0, t1)
                    residual = min((ratio - lower) / lower if lower > 0 else 0.0, (upper - ratio) / upper)
                except DomainError:
                    # the ray is longer than pi sqrt((N-1)/K)
                    lower, upper, residual = math.inf, math.inf, -math.inf
                row = DensityResidual(ray.alpha, t0, t1, ratio, lower, upper, residual)
                residuals.append(row)
                if residual < -tol and (witness is None or residual < witness.residual):
                    witness = row
    if skipped:
        logger.warning(f"[MCP] skipped {skipped} rays with fewer than {MIN_BINS} bins (mass {skipped_mass:.3g})")
    verdict: Verdict = "FAIL" if witness is not None else "PASS"
    logger.info(f"[MCP] K={K} N={N}: {len(residuals)} bin pairs, verdict {verdict}")
    return DensityTestReport(K, N, tol, verdict, residuals, skipped, skipped_mass, witness)


# Level measures


type CoareaSet = tuple[float, float] | tuple[float, float, int, int]


def coarea_test_sets(rays: RayDecomposition, slabs: int = COAREA_SLABS) -> list[CoareaSet]:
    """Both halves of the rays crossed with equal slabs of the tau_V range"""
    if not rays.rays:
        return []
    lo = min(float(r.bin_edges[0]) for r in rays.rays)
    hi = max(float(r.bin_edges[-1]) for r in rays.rays)
    cuts = np.linspace(lo, hi, slabs + 1)
    n, half = len(rays.rays), max(1, len(rays.rays) // 2)
    groups = [(0, half)] + ([(half, n)] if half < n else [])
    return [(float(a), float(b), r0, r1) for r0, r1 in groups for a, b in zip(cuts[:-1], cuts[1:])]


def level_measures(rays: RayDecomposition, t_grid, test_sets: list[CoareaSet] | None = None) -> LevelMeasures:
    """H_t = sum_alpha h(alpha, t) q(alpha), and the coarea check on rectangles of rays x {lo <= tau_V <= hi}

    Each ray meets a rectangle in the Voronoi cells of its points with level in
    [lo, hi]; the mass of those points is compared with the integral of H_t
    over the cells, h read linearly between bin centres.
    """
    t_grid = np.asarray(t_grid, dtype=float)
    H = np.array([math.fsum(ray.h_at(t) * ray.q_weight for ray in rays.rays) for t in t_grid])
    if test_sets is None:
        test_sets = coarea_test_sets(rays)
    checks = []
    for test_set in test_sets:
        match test_set:
            case (lo, hi):
                r0, r1 = 0, len(rays.rays)
            case (lo, hi, r0, r1):
                pass
            case _:
                raise DomainError(f"Bad coarea test set: {test_set}")
        parts = [ray.cell_integral(lo, hi) for ray in rays.rays[r0:r1]]
        mass = math.fsum(m for m, _ in parts)
        integral = math.fsum(i for _, i in parts)
        residual = abs(mass - integral) / mass if mass > 0 else abs(integral)
        checks.append(SlabCheck(r0, r1, lo, hi, mass, integral, residual))
    return LevelMeasures(t_grid, H, checks)


# Mean curvature


def mean_curvature_estimate(
    space: FiniteCausalSpace, rays: RayDecomposition, phi: dict[int, float], t_max: float, n_grid: int = 8
) -> MeanCurvatureEstimate:
    """Fit the limit of (m(V_{t,phi}) - t int phi dH_0) / (t^2/2) and divide by int phi^2 dH_0"""
    if any(v < 0 for v in phi.values()):
        raise DomainError("phi must be non-negative")
    members = set(rays.V.members)
    outside = [x for x, v in phi.items() if v > 0 and x not in members]
    if outside:
        raise DomainError(f"phi is supported outside V at {outside[:5]}")
    carried = [(ray, float(phi.get(ray.points[0], 0.0))) for ray in rays.rays if ray.t_values[0] == 0.0]
    carried = [(ray, f) for ray, f in carried if f > 0]
    if not carried:
        raise CodimensionError("phi charges no ray starting on V")
    h0 = np.array([float(ray.g_at(0.0)) for ray, _ in carried])
    scale = max(float(h0.max()), 1e-300)
    if np.any(h0 <= 1e-12 * scale) or h0.max() <= 0:
        raise CodimensionError("h(alpha, 0) vanishes on the support of phi: the codimension condition fails")
    q = np.array([ray.q_weight for ray, _ in carried])
    f = np.array([f for _, f in carried])
    reach = min(ray.length / fa for ray, fa in carried)
    if t_max > reach:
        logger.warning(f"[CURVATURE] fit window capped at {reach:.4g} by the shortest ray")
        t_max = reach
    first = math.fsum(f * h0 * q)
    second = math.fsum(f * f * h0 * q)

    def normal_variation(t: float) -> float:
        total = []
        for (ray, fa), qa in zip(carried, q):
            s = np.concatenate([ray.t_values[ray.t_values < t * fa], [t * fa]])
            g = ray.g_at(s)
            total.append(qa * float(np.sum((g[1:] + g[:-1]) / 2.0 * np.diff(s))))
        return math.fsum(total)

    ts = t_max * np.arange(1, n_grid + 1) / n_grid
    quotients = np.array([(normal_variation(t) - t * first) / (t * t / 2.0) for t in ts])
    slope, intercept = np.polyfit(ts, quotients, 1)
    residual = float(np.max(np.abs(quotients - (slope * ts + intercept))))
    H0 = float(intercept) / second
    logger.info(f"[CURVATURE] H0 ~ {H0:.6g} over t in (0, {t_max:.4g}], fit residual {residual:.2e}")
    return MeanCurvatureEstimate(dict(phi), H0, (0.0, float(t_max)), residual, quotients)


# Hawking


def hawking_certify(
    space: FiniteCausalSpace, rays: RayDecomposition, H0: float, K: float, N: float, tol: float = 1e-9
) -> HawkingReport:
    """sup tau_V over I^+(V) against D_{H0,K,N}; for N = 1, I^+(V) must carry no mass"""
    future = np.flatnonzero(rays.tau_V > 0)
    if N == 1:
        if not H0 < 0:
            raise RegimeError(f"N = 1 requires H0 < 0, got H0={H0}")
        mass = math.fsum(space.weight[future])
        witness = int(future[0]) if future.size else None
        logger.info(f"[HAWKING] N=1: I^+(V) carries mass {mass:.6g}")
        return HawkingReport(float(rays.tau_V.max(initial=0.0)), 0.0, mass == 0.0, "N=1", witness)
    D = hawking_threshold(HawkingParams(H0, K, N))
    regime = "K>0" if K > 0 else "K=0" if K == 0 else "K<0"
    if future.size == 0:
        return HawkingReport(0.0, D, True, regime, None)
    witness = int(future[np.argmax(rays.tau_V[future])])
    sup = float(rays.tau_V[witness])
    passed = sup <= D * (1.0 + tol)
    logger.info(f"[HAWKING] sup tau_V = {sup:.6g} against D = {D:.6g}: {'PASS' if passed else 'FAIL'}")
    return HawkingReport(sup, D, passed, regime, witness)


# Bishop-Gromov over an achronal set


def conical_bishop_gromov(
    rays: RayDecomposition, radii, K: float, N: float, tol: float = 1e-6
) -> ConicalReport:
    """Level-measure and sub-level-volume ratios against the s_{K/(N-1)}^{N-1} profile"""
    if N <= 1:
        raise DomainError(f"Conical Bishop-Gromov needs N > 1, got N={N}")
    radii = np.asarray(radii, dtype=float)
    kappa = K / (N - 1.0)
    level = np.array([math.fsum(ray.h_at(r) * ray.q_weight for ray in rays.rays) for r in radii])
    slack = 1e-9 * (1.0 + float(radii.max(initial=0.0)))
    volume = np.array(
        [
            math.fsum(float(w) for ray in rays.rays for t, w in zip(ray.t_values, ray.weights) if 0.0 <= t <= r + slack)
            for r in radii
        ]
    )
    level_rows, volume_rows = [], []
    for i, r in enumerate(radii):
        for j in range(i + 1, len(radii)):
            R = radii[j]
            if level[j] > 0:
                bound = (s_c_coeff(kappa, r)[0] / s_c_coeff(kappa, R)[0]) ** (N - 1.0)
                ratio = float(level[i] / level[j])
                level_rows.append(ConicalRow(float(r), float(R), ratio, bound, passes_multiplicative(ratio, bound, tol)))
            if volume[j] > 0:
                bound = s_power_integral(kappa, N - 1.0, r) / s_power_integral(kappa, N - 1.0, R)
                ratio = float(volume[i] / volume[j])
                volume_rows.append(ConicalRow(float(r), float(R), ratio, bound, passes_multiplicative(ratio, bound, tol)))
    passed = all(row.passed for row in level_rows + volume_rows)
    return ConicalReport(level_rows, volume_rows, "PASS" if passed else "FAIL")
