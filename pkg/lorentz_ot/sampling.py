"""
Discretizers turning a model spacetime into a finite causal space: chart lattices,
polar lattices of cone regions and Poisson sprinklings, plus the causal-set
estimate of tau from longest chains.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from typing import Literal

import networkx as nx
import numpy as np
from scipy import optimize
from typing_extensions import assert_never

from .causal_space import FiniteCausalSpace, SpaceMeta, validate_axioms
from .domains import DomainError, SamplingError
from .models import (
    Box,
    Cone,
    Diamond,
    ModelSpacetime,
    ball_volume,
    conformal_factor,
    contains,
    leq_matrix,
    region_bounds,
    region_volume,
    tau_matrix,
)

logger = logging.getLogger(__name__)

MAX_POINTS = 1_000_000

# Longest-chain constants: E[L] ~ m_d (rho V)^(1/d) in dimension d
CHAIN_CONSTANTS = {3: 2.3868, 4: 2.5199}

# Finite-size correction of the longest increasing subsequence of N Poisson points in 1+1 dimensions
_LIS_CORRECTION = 1.7711


# Define the semantic domains


@dataclass(frozen=True)
class Lattice:
    spacing: float


@dataclass(frozen=True)
class Sprinkle:
    density: float
    seed: int


type SamplerMode = Lattice | Sprinkle


@dataclass(frozen=True)
class SamplerConfig:
    mode: SamplerMode
    weight_rule: Literal["cell-volume", "1/density"] | None = None

    def __post_init__(self):
        match self.mode:
            case Lattice(spacing=spacing):
                if not spacing > 0:
                    raise DomainError(f"Lattice spacing must be positive, got {spacing}")
                expected = "cell-volume"
            case Sprinkle(density=density):
                if not density > 0:
                    raise DomainError(f"Sprinkling density must be positive, got {density}")
                expected = "1/density"
            case _:
                assert_never(self.mode)
        if self.weight_rule is None:
            object.__setattr__(self, "weight_rule", expected)
        elif self.weight_rule != expected:
            raise DomainError(f"Weight rule {self.weight_rule!r} does not fit sampler {self.mode}")


def rng_stream(seed: int, stream: str) -> np.random.Generator:
    """A generator keyed by the seed and the stream name"""
    return np.random.default_rng(np.random.SeedSequence(seed, spawn_key=tuple(stream.encode())))


# Lattices


def _axis(lo: float, hi: float, anchor: float, spacing: float) -> np.ndarray:
    first = math.ceil((lo - anchor) / spacing - 1e-9)
    last = math.floor((hi - anchor) / spacing + 1e-9)
    return anchor + spacing * np.arange(first, last + 1)


def _grid(axes: list[np.ndarray]) -> np.ndarray:
    count = math.prod(a.size for a in axes)
    if count > 10 * MAX_POINTS:
        raise DomainError(f"Lattice would have {count} grid points")
    return np.stack(np.meshgrid(*axes, indexing="ij"), axis=-1).reshape(-1, len(axes))


def _chart_lattice(model: ModelSpacetime, spacing: float) -> tuple[np.ndarray, np.ndarray]:
    lo, hi = region_bounds(model.region)
    match model.region:
        case Box():
            anchor = lo
        case Diamond(bottom=bottom):
            anchor = np.array(bottom)
        case _:
            raise DomainError(f"No chart lattice for region {model.region}")
    coords = _grid([_axis(l, h, a, spacing) for l, h, a in zip(lo, hi, anchor)])
    coords = coords[[contains(model.region, y) for y in coords]]
    weight = (spacing * conformal_factor(model, coords)) ** model.dim
    return coords, weight


def _shell_volume(rho: float, spacing: float, dim: int) -> float:
    inner = max(rho - spacing / 2.0, 0.0)
    return ((rho + spacing / 2.0) ** dim - inner**dim) / dim


def _directions(region: Cone, spacing: float, dim: int) -> tuple[np.ndarray, np.ndarray]:
    """Unit future timelike directions of the rapidity grid and their hyperboloid areas"""
    steps = math.floor(region.rapidity / spacing + 1e-9)
    match dim:
        case 2:
            a = spacing * np.arange(-steps, steps + 1)
            return np.stack([np.cosh(a), np.sinh(a)], axis=1), np.full(a.size, spacing)
        case 3:
            dirs, areas = [np.array([1.0, 0.0, 0.0])], [2.0 * math.pi * (math.cosh(spacing / 2.0) - 1.0)]
            for j in range(1, steps + 1):
                a = j * spacing
                ring = 2.0 * math.pi * (math.cosh(a + spacing / 2.0) - math.cosh(a - spacing / 2.0))
                m = max(1, round(2.0 * math.pi * math.sinh(a) / spacing))
                for phi in 2.0 * math.pi * np.arange(m) / m:
                    dirs.append(np.array([math.cosh(a), math.sinh(a) * math.cos(phi), math.sinh(a) * math.sin(phi)]))
                    areas.append(ring / m)
            return np.array(dirs), np.array(areas)
        case _:
            raise DomainError(f"Polar lattices exist in dimensions 2 and 3, got {dim}")


def _polar_lattice(model: ModelSpacetime, spacing: float) -> tuple[np.ndarray, np.ndarray]:
    region = model.region
    assert isinstance(region, Cone)
    dirs, areas = _directions(region, spacing, model.dim)
    apex, sign = np.array(region.apex), region.orientation()
    coords, weight = [], []
    k = 0
    while (rho := region.rho_max - k * spacing) >= region.rho_min - 1e-12:
        if rho <= 1e-12:
            coords.append(apex.copy())
            weight.append((spacing / 2.0) ** model.dim / model.dim * float(areas.sum()))
            break
        coords.extend(apex + sign * rho * dirs)
        weight.extend(_shell_volume(rho, spacing, model.dim) * areas)
        k += 1
    return np.array(coords), np.array(weight)


def _sprinkle(model: ModelSpacetime, density: float, seed: int) -> np.ndarray:
    expected = density * region_volume(model)
    if expected > MAX_POINTS:
        raise DomainError(f"Sprinkling would produce about {expected:.0f} points (limit {MAX_POINTS})")
    lo, hi = region_bounds(model.region)
    rng = rng_stream(seed, "sprinkle")
    corners = np.stack([lo, hi])
    omega_max = float(np.max(conformal_factor(model, corners)))
    intensity = density * omega_max**model.dim * float(np.prod(hi - lo))
    count = rng.poisson(intensity)
    candidates = rng.uniform(lo, hi, size=(count, model.dim))
    accept = rng.uniform(size=count) < (conformal_factor(model, candidates) / omega_max) ** model.dim
    inside = np.array([contains(model.region, y) for y in candidates], dtype=bool)
    points = candidates[accept & inside] if count else candidates
    return points[np.lexsort(points.T[::-1])] if len(points) else points


def discretize(model: ModelSpacetime, config: SamplerConfig) -> FiniteCausalSpace:
    match config.mode:
        case Lattice(spacing=spacing):
            tag = "LATTICE"
            if isinstance(model.region, Cone):
                coords, weight = _polar_lattice(model, spacing)
            else:
                coords, weight = _chart_lattice(model, spacing)
            meta = SpaceMeta(model, "lattice", spacing=spacing, dim=model.dim)
        case Sprinkle(density=density, seed=seed):
            tag = "SPRINKLE"
            coords = _sprinkle(model, density, seed)
            weight = np.full(len(coords), 1.0 / density)
            spacing = density ** (-1.0 / model.dim)
            meta = SpaceMeta(model, "sprinkle", spacing=spacing, density=density, dim=model.dim, seed=seed)
        case _:
            assert_never(config.mode)
    if len(coords) == 0:
        raise SamplingError(f"[{tag}] {model.region} produced no points")
    if len(coords) > MAX_POINTS:
        raise DomainError(f"[{tag}] {len(coords)} points exceed the limit of {MAX_POINTS}")
    leq = leq_matrix(model, coords, coords)
    tau = tau_matrix(model, coords, coords, leq)
    space = FiniteCausalSpace(coords, weight, leq, tau, meta=meta)
    violations = validate_axioms(space, 2.0 * spacing)
    if violations:
        raise SamplingError(f"[{tag}] sample violates the causal-space axioms: {violations[:3]}")
    logger.info(f"[{tag}] {model.kind} dim={model.dim}: {space.n} points, total mass {space.total_mass():.6g}")
    return space


# Causal-set time separation


def diamond_coefficient(dim: int) -> float:
    """c_d with vol(diamond of height tau) = c_d tau^d"""
    return 2.0 * ball_volume(dim - 1) * 0.5**dim / dim


def tau_from_chain_length(links: int, density: float, dim: int) -> float:
    """Invert the longest-chain law for a chain of the given number of links"""
    if links <= 0:
        return 0.0
    match dim:
        case 2:
            interior = links - 1

            def excess(n: float) -> float:
                return 2.0 * math.sqrt(n) - _LIS_CORRECTION * n ** (1.0 / 6.0) - interior

            # 2 sqrt(N) - 1.7711 N^(1/6) is increasing beyond its minimum at N = (1.7711/6)^3
            start = (_LIS_CORRECTION / 6.0) ** 3
            count = optimize.brentq(excess, start, (interior + 2.0) ** 2)
            return math.sqrt(2.0 * count / density)
        case 3 | 4:
            return links / (CHAIN_CONSTANTS[dim] * (density * diamond_coefficient(dim)) ** (1.0 / dim))
        case _:
            raise DomainError(f"No chain-length law in dimension {dim}")


def longest_chain(space: FiniteCausalSpace, i: int, j: int) -> int:
    """Number of links of the longest <=-chain from i to j"""
    if i == j or not space.leq[i, j]:
        return 0
    between = np.flatnonzero(space.leq[i, :] & space.leq[:, j])
    sub = space.leq[np.ix_(between, between)].copy()
    np.fill_diagonal(sub, False)
    return int(nx.dag_longest_path_length(nx.from_numpy_array(sub.astype(int), create_using=nx.DiGraph)))


def chain_length_tau(space: FiniteCausalSpace, i: int, j: int) -> float:
    meta = space.meta
    if meta.mode != "sprinkle" or meta.density is None or meta.dim is None:
        raise DomainError("chain_length_tau needs a sprinkled space")
    links = longest_chain(space, i, j)
    estimate = tau_from_chain_length(links, meta.density, meta.dim)
    logger.debug(f"[CHAIN] {i} -> {j}: {links} links, tau ~ {estimate:.6g}")
    return estimate
