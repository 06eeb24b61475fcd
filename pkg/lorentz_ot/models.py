"""
Closed-form model spacetimes: Minkowski space, the constant-curvature models and the Milne wedge.

Every chart used here is conformal to Minkowski space, so the causal relation
is the flat cone relation of the chart coordinates:

- Minkowski and the wedge: inertial coordinates (t, x...)
- de Sitter (k_sec < 0, radius R = 1/sqrt(-k_sec)): planar chart (eta, x...), eta < 0,
  metric (R/eta)^2 (-deta^2 + dx^2)
- anti-de Sitter (k_sec > 0, radius R = 1/sqrt(k_sec)): Poincare chart (t, x..., z), z > 0,
  metric (R/z)^2 (-dt^2 + dx^2 + dz^2)

The curved time separations and geodesics come from the standard embeddings
as quadrics in a flat space of one more dimension.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from typing import Iterable, Literal

import numpy as np
from scipy import integrate, special
from scipy.spatial import cKDTree
from typing_extensions import assert_never

from .causal_space import AchronalSet, FiniteCausalSpace, achronal_set
from .coefficients import s_kappa
from .domains import DomainError, IndexSet

logger = logging.getLogger(__name__)

# Relative slack of the chart light cone
CONE_TOLERANCE = 1e-9

_CHUNK = 512


# Define the semantic domains


@dataclass(frozen=True)
class Minkowski:
    pass


@dataclass(frozen=True)
class ConstantCurvature:
    k_sec: float

    @property
    def radius(self) -> float:
        return 1.0 / math.sqrt(abs(self.k_sec))


@dataclass(frozen=True)
class MilneWedge:
    pass


type ModelKind = Minkowski | ConstantCurvature | MilneWedge


def _vec(values: Iterable[float]) -> tuple[float, ...]:
    return tuple(float(v) for v in values)


@dataclass(frozen=True)
class Box:
    lo: tuple[float, ...]
    hi: tuple[float, ...]

    def __post_init__(self):
        object.__setattr__(self, "lo", _vec(self.lo))
        object.__setattr__(self, "hi", _vec(self.hi))
        if len(self.lo) != len(self.hi) or any(l > h for l, h in zip(self.lo, self.hi)):
            raise DomainError(f"Empty or malformed box {self.lo} .. {self.hi}")


@dataclass(frozen=True)
class Diamond:
    """The causal diamond J^+(bottom) and J^-(top)"""

    bottom: tuple[float, ...]
    top: tuple[float, ...]

    def __post_init__(self):
        object.__setattr__(self, "bottom", _vec(self.bottom))
        object.__setattr__(self, "top", _vec(self.top))
        if len(self.bottom) != len(self.top):
            raise DomainError(f"Diamond tips {self.bottom}, {self.top} differ in dimension")
        if not chart_leq(np.array(self.bottom), np.array(self.top)):
            raise DomainError(f"Diamond tips {self.bottom}, {self.top} are not causally related")

    @property
    def height(self) -> float:
        return float(np.sqrt(max(_interval(np.array(self.bottom), np.array(self.top)), 0.0)))


@dataclass(frozen=True)
class Cone:
    """A hyperbolic sector of the future or past light cone of an apex (flat models only)"""

    apex: tuple[float, ...]
    rho_max: float
    rapidity: float
    direction: Literal["future", "past"] = "future"
    rho_min: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "apex", _vec(self.apex))
        if not 0.0 <= self.rho_min < self.rho_max:
            raise DomainError(f"Cone radii need 0 <= rho_min < rho_max, got {self.rho_min}, {self.rho_max}")
        if self.rapidity <= 0:
            raise DomainError(f"Cone rapidity must be positive, got {self.rapidity}")

    def orientation(self) -> float:
        return 1.0 if self.direction == "future" else -1.0


type Region = Box | Diamond | Cone


@dataclass(frozen=True)
class ModelSpacetime:
    kind: ModelKind
    dim: int
    region: Region
    nonbranching: bool = True

    def __post_init__(self):
        if isinstance(self.kind, ConstantCurvature) and self.kind.k_sec == 0:
            object.__setattr__(self, "kind", Minkowski())
        if self.dim < 2:
            raise DomainError(f"Spacetime dimension must be at least 2, got {self.dim}")
        if region_dim(self.region) != self.dim:
            raise DomainError(f"Region {self.region} does not live in dimension {self.dim}")
        _check_region(self)

    @property
    def curved(self) -> bool:
        return isinstance(self.kind, ConstantCurvature)

    @property
    def k_sec(self) -> float:
        match self.kind:
            case ConstantCurvature(k_sec=k):
                return k
            case _:
                return 0.0


# Regions


def region_dim(region: Region) -> int:
    match region:
        case Box(lo=lo):
            return len(lo)
        case Diamond(bottom=bottom):
            return len(bottom)
        case Cone(apex=apex):
            return len(apex)
        case _:
            assert_never(region)


def region_bounds(region: Region) -> tuple[np.ndarray, np.ndarray]:
    """An axis-aligned chart box containing the region"""
    match region:
        case Box(lo=lo, hi=hi):
            return np.array(lo), np.array(hi)
        case Diamond(bottom=bottom, top=top):
            b, t = np.array(bottom), np.array(top)
            T = t[0] - b[0]
            lo = (b + t - T) / 2.0
            hi = (b + t + T) / 2.0
            lo[0], hi[0] = b[0], t[0]
            return lo, hi
        case Cone(apex=apex, rho_max=rho_max, rapidity=rapidity):
            a = np.array(apex)
            reach = rho_max * math.sinh(rapidity)
            lo, hi = a - reach, a + reach
            if region.direction == "future":
                lo[0], hi[0] = a[0] + region.rho_min, a[0] + rho_max * math.cosh(rapidity)
            else:
                lo[0], hi[0] = a[0] - rho_max * math.cosh(rapidity), a[0] - region.rho_min
            return lo, hi
        case _:
            assert_never(region)


def _scale_tol(y: np.ndarray) -> float:
    return 1e-9 * (1.0 + float(np.max(np.abs(y))))


def _interval(x: np.ndarray, y: np.ndarray) -> float:
    d = y - x
    return float(d[0] ** 2 - np.dot(d[1:], d[1:]))


def chart_leq(x: np.ndarray, y: np.ndarray) -> bool:
    d = y - x
    dx2 = float(np.dot(d[1:], d[1:]))
    return d[0] >= 0 and d[0] ** 2 - dx2 >= -CONE_TOLERANCE * (d[0] ** 2 + dx2)


def cone_coordinates(region: Cone, y: np.ndarray) -> tuple[float, float]:
    """(Lorentzian radius, rapidity) of a point relative to the cone apex"""
    v = region.orientation() * (np.asarray(y, dtype=float) - np.array(region.apex))
    spatial = float(np.linalg.norm(v[1:]))
    rho = math.sqrt(max(v[0] ** 2 - spatial**2, 0.0))
    if v[0] < 0:
        return -rho, 0.0
    if rho == 0.0:
        return 0.0, math.inf if spatial > 0 else 0.0
    return rho, math.asinh(spatial / rho)


def contains(region: Region, y: np.ndarray) -> bool:
    y = np.asarray(y, dtype=float)
    tol = _scale_tol(y)
    match region:
        case Box(lo=lo, hi=hi):
            return bool(np.all(y >= np.array(lo) - tol) and np.all(y <= np.array(hi) + tol))
        case Diamond(bottom=bottom, top=top):
            return chart_leq(np.array(bottom), y) and chart_leq(y, np.array(top))
        case Cone(rho_max=rho_max, rapidity=rapidity, rho_min=rho_min):
            v = region.orientation() * (y - np.array(region.apex))
            if v[0] < -tol or _interval(np.zeros_like(v), v) < -tol * (1.0 + v[0] ** 2):
                return False
            rho, rap = cone_coordinates(region, y)
            if rho <= tol:
                return rho_min <= tol and float(np.linalg.norm(v)) <= tol
            return rho_min - tol <= rho <= rho_max + tol and rap <= rapidity * (1.0 + 1e-9) + tol
        case _:
            assert_never(region)


def ball_volume(k: int) -> float:
    return math.pi ** (k / 2.0) / special.gamma(k / 2.0 + 1.0)


def diamond_volume(height: float, dim: int) -> float:
    """Flat volume of a causal diamond of proper height"""
    return 2.0 * ball_volume(dim - 1) * (height / 2.0) ** dim / dim


def hyperbolic_ball_area(rapidity: float, dim: int) -> float:
    """Volume of the rapidity ball of a (dim-1)-dimensional hyperboloid"""
    if dim == 2:
        return 2.0 * rapidity
    sphere = 2.0 * math.pi ** ((dim - 1) / 2.0) / special.gamma((dim - 1) / 2.0)
    value, _ = integrate.quad(lambda a: math.sinh(a) ** (dim - 2), 0.0, rapidity)
    return sphere * value


def _region_rng(stream: str) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence(0, spawn_key=(sum(map(ord, stream)),)))


def sample_region(model: ModelSpacetime, count: int, stream: str) -> np.ndarray:
    """Deterministic uniform chart samples of the region"""
    lo, hi = region_bounds(model.region)
    rng = _region_rng(stream)
    found: list[np.ndarray] = []
    for _ in range(200):
        batch = rng.uniform(lo, hi, size=(4 * count, model.dim))
        found.extend(y for y in batch if contains(model.region, y))
        if len(found) >= count:
            break
    return np.array(found[:count])


def region_volume(model: ModelSpacetime) -> float:
    """Spacetime volume of the region (exact for flat models, quadrature otherwise)"""
    region = model.region
    if not model.curved:
        match region:
            case Box(lo=lo, hi=hi):
                return float(np.prod(np.array(hi) - np.array(lo)))
            case Diamond():
                return diamond_volume(region.height, model.dim)
            case Cone(rho_max=rho_max, rho_min=rho_min, rapidity=rapidity):
                radial = (rho_max**model.dim - rho_min**model.dim) / model.dim
                return radial * hyperbolic_ball_area(rapidity, model.dim)
    lo, hi = region_bounds(region)
    samples = np.random.default_rng(np.random.SeedSequence(0, spawn_key=(1,))).uniform(lo, hi, (20000, model.dim))
    inside = np.array([contains(region, y) for y in samples])
    weight = conformal_factor(model, samples) ** model.dim
    return float(np.prod(hi - lo) * np.mean(np.where(inside, weight, 0.0)))


def _check_region(model: ModelSpacetime) -> None:
    region = model.region
    match model.kind:
        case MilneWedge():
            _check_wedge_region(region)
        case ConstantCurvature(k_sec=k):
            if isinstance(region, Cone):
                raise DomainError("Cone regions are only available on flat models")
            lo, hi = region_bounds(region)
            if k < 0 and not hi[0] < 0:
                raise DomainError(f"de Sitter chart needs eta < 0 on the region, got eta up to {hi[0]}")
            if k > 0 and not lo[-1] > 0:
                raise DomainError(f"anti-de Sitter chart needs z > 0 on the region, got z down to {lo[-1]}")
            _check_curved_convexity(model)
        case Minkowski():
            pass
        case _:
            assert_never(model.kind)


def _strictly_past_of_origin(y: np.ndarray) -> bool:
    return y[0] < 0 and y[0] ** 2 > float(np.dot(y[1:], y[1:]))


def _check_wedge_region(region: Region) -> None:
    match region:
        case Cone(apex=apex, direction="past", rho_min=rho_min):
            a = np.array(apex)
            if np.all(a == 0) and rho_min > 0:
                return
            if _strictly_past_of_origin(a):
                return
        case Box(lo=lo, hi=hi):
            corners = np.array(np.meshgrid(*zip(lo, hi), indexing="ij")).reshape(len(lo), -1).T
            if all(_strictly_past_of_origin(c) for c in corners):
                return
        case Diamond(top=top):
            if _strictly_past_of_origin(np.array(top)):
                return
    raise DomainError(f"Milne wedge region {region} is not inside the open past cone of the origin")


def _check_curved_convexity(model: ModelSpacetime) -> None:
    points = sample_region(model, 48, "region-check")
    if isinstance(model.region, Diamond):
        points = np.vstack([np.array(model.region.bottom), points, np.array(model.region.top)])
    leq = leq_matrix(model, points, points)
    R = model.kind.radius  # type: ignore[union-attr]
    for i, j in np.argwhere(leq):
        if i == j:
            continue
        x, y = points[i], points[j]
        if model.k_sec > 0 and _ads_delta(x, y) > 2.0:
            raise DomainError(f"Region of {model.kind} reaches beyond the conjugate locus: {x} -> {y}")
        if _interval(x, y) <= 0:
            continue
        for t in (0.25, 0.5, 0.75):
            z = _curved_geodesic(model.k_sec, R, x, y, t)
            if not contains(model.region, z):
                raise DomainError(f"Region of {model.kind} is not geodesically convex: {x} -> {y} leaves at t={t}")


# Conformal factor and embeddings


def conformal_factor(model: ModelSpacetime, coords: np.ndarray) -> np.ndarray:
    coords = np.atleast_2d(coords)
    match model.kind:
        case ConstantCurvature(k_sec=k) if k < 0:
            return model.kind.radius / (-coords[:, 0])
        case ConstantCurvature():
            return model.kind.radius / coords[:, -1]
        case Minkowski() | MilneWedge():
            return np.ones(coords.shape[0])
        case _:
            assert_never(model.kind)


def _ds_delta(x: np.ndarray, y: np.ndarray) -> float:
    return _interval(x, y) / (2.0 * x[0] * y[0])


def _ads_delta(x: np.ndarray, y: np.ndarray) -> float:
    return _interval(x, y) / (2.0 * x[-1] * y[-1])


def _embed(k_sec: float, R: float, y: np.ndarray) -> np.ndarray:
    if k_sec < 0:
        a = -R / y[0]
        x2 = float(np.dot(y[1:], y[1:]))
        X0 = R * (a - 1.0 / a) / 2.0 + a * x2 / (2.0 * R)
        Xn = R * (a + 1.0 / a) / 2.0 - a * x2 / (2.0 * R)
        return np.concatenate([[X0], a * y[1:], [Xn]])
    t, x, z = y[0], y[1:-1], y[-1]
    x2 = float(np.dot(x, x))
    U = (z * z + R * R + x2 - t * t) / (2.0 * z)
    W = (z * z - R * R + x2 - t * t) / (2.0 * z)
    return np.concatenate([[U, R * t / z], R * x / z, [W]])


def _unembed(k_sec: float, R: float, X: np.ndarray) -> np.ndarray:
    if k_sec < 0:
        a = (X[0] + X[-1]) / R
        return np.concatenate([[-R / a], X[1:-1] / a])
    U, V, Xs, W = X[0], X[1], X[2:-1], X[-1]
    z = R * R / (U - W)
    return np.concatenate([[V * z / R], Xs * z / R, [z]])


def _curved_tau(k_sec: float, R: float, x: np.ndarray, y: np.ndarray) -> float:
    if k_sec < 0:
        delta = _ds_delta(x, y)
        if delta <= 0:
            return 0.0
        return R * math.log1p(delta + math.sqrt(delta * (2.0 + delta)))
    delta = _ads_delta(x, y)
    if delta <= 0:
        return 0.0
    return 2.0 * R * math.asin(math.sqrt(min(delta / 2.0, 1.0)))


def _curved_geodesic(k_sec: float, R: float, x: np.ndarray, y: np.ndarray, t: float) -> np.ndarray:
    theta = _curved_tau(k_sec, R, x, y) / R
    X, Y = _embed(k_sec, R, x), _embed(k_sec, R, y)
    if k_sec < 0:
        Z = (math.sinh((1.0 - t) * theta) * X + math.sinh(t * theta) * Y) / math.sinh(theta)
    else:
        Z = (math.sin((1.0 - t) * theta) * X + math.sin(t * theta) * Y) / math.sin(theta)
    return _unembed(k_sec, R, Z)


# Relations


def leq_matrix(model: ModelSpacetime, A: np.ndarray, B: np.ndarray) -> np.ndarray:
    """Chart cone relation A[i] <= B[j]"""
    out = np.empty((A.shape[0], B.shape[0]), dtype=bool)
    for start in range(0, A.shape[0], _CHUNK):
        a = A[start : start + _CHUNK]
        d = B[None, :, :] - a[:, None, :]
        dt = d[:, :, 0]
        dx2 = np.einsum("ijk,ijk->ij", d[:, :, 1:], d[:, :, 1:])
        out[start : start + _CHUNK] = (dt >= 0) & (dt * dt - dx2 >= -CONE_TOLERANCE * (dt * dt + dx2))
    return out


def tau_matrix(model: ModelSpacetime, A: np.ndarray, B: np.ndarray, leq: np.ndarray | None = None) -> np.ndarray:
    _require_trusted(model)
    if leq is None:
        leq = leq_matrix(model, A, B)
    out = np.zeros((A.shape[0], B.shape[0]))
    for start in range(0, A.shape[0], _CHUNK):
        a = A[start : start + _CHUNK]
        d = B[None, :, :] - a[:, None, :]
        interval = d[:, :, 0] ** 2 - np.einsum("ijk,ijk->ij", d[:, :, 1:], d[:, :, 1:])
        interval = np.where(leq[start : start + _CHUNK], np.maximum(interval, 0.0), 0.0)
        match model.kind:
            case Minkowski() | MilneWedge():
                block = np.sqrt(interval)
            case ConstantCurvature(k_sec=k) if k < 0:
                R = model.kind.radius
                delta = interval / (2.0 * np.outer(a[:, 0], B[:, 0]))
                block = R * np.log1p(delta + np.sqrt(delta * (2.0 + delta)))
            case ConstantCurvature():
                R = model.kind.radius
                delta = interval / (2.0 * np.outer(a[:, -1], B[:, -1]))
                if np.any(delta > 2.0 * (1.0 + 1e-12)):
                    raise DomainError(f"Pair beyond the conjugate locus of {model.kind}")
                block = 2.0 * R * np.arcsin(np.sqrt(np.minimum(delta / 2.0, 1.0)))
            case _:
                assert_never(model.kind)
        out[start : start + _CHUNK] = block
    return out


def _require_trusted(model: ModelSpacetime) -> None:
    if not model.curved:
        return
    from .oracle import certify_closed_form

    report = certify_closed_form(model)
    if not report.passed:
        raise DomainError(
            f"Closed-form tau of {model.kind} disagrees with the shooting oracle "
            f"(tau error {report.max_tau_error:.3g}, point error {report.max_point_error:.3g})"
        )


def _check_in_region(model: ModelSpacetime, *points: np.ndarray) -> None:
    for y in points:
        if y.shape != (model.dim,):
            raise DomainError(f"Point {y} is not a {model.dim}-dimensional chart point")
        if not contains(model.region, y):
            raise DomainError(f"Point {tuple(y)} lies outside the region {model.region}")


def model_tau(model: ModelSpacetime, x: Iterable[float], y: Iterable[float]) -> float:
    x, y = np.asarray(x, dtype=float), np.asarray(y, dtype=float)
    _check_in_region(model, x, y)
    if not chart_leq(x, y):
        return 0.0
    match model.kind:
        case Minkowski() | MilneWedge():
            return math.sqrt(max(_interval(x, y), 0.0))
        case ConstantCurvature(k_sec=k):
            _require_trusted(model)
            if k > 0 and _ads_delta(x, y) > 2.0:
                raise DomainError(f"Pair {tuple(x)} -> {tuple(y)} lies beyond the conjugate locus")
            return _curved_tau(k, model.kind.radius, x, y)
        case _:
            assert_never(model.kind)


def geodesic_interpolate(model: ModelSpacetime, x: Iterable[float], y: Iterable[float], t: float) -> np.ndarray:
    """The t-intermediate point of the timelike geodesic from x to y"""
    x, y = np.asarray(x, dtype=float), np.asarray(y, dtype=float)
    if not 0.0 <= t <= 1.0:
        raise DomainError(f"Interpolation fraction {t} outside [0, 1]")
    if model_tau(model, x, y) <= 0:
        raise DomainError(f"Points {tuple(x)} and {tuple(y)} are not timelike related")
    if t == 0.0:
        return x.copy()
    if t == 1.0:
        return y.copy()
    match model.kind:
        case Minkowski() | MilneWedge():
            return x + t * (y - x)
        case ConstantCurvature(k_sec=k):
            return _curved_geodesic(k, model.kind.radius, x, y, t)
        case _:
            assert_never(model.kind)


# Radial volume density


def model_radial_density(model: ModelSpacetime, r: float) -> float:
    """Volume density r^(n-1) (flat) or s_k(r)^(n-1) along a timelike geodesic from a point"""
    if r < 0:
        raise DomainError(f"Radius {r} must be non-negative")
    k = model.k_sec
    if k > 0 and r >= math.pi / math.sqrt(k):
        raise DomainError(f"Radius {r} reaches the conjugate radius pi/sqrt({k})")
    return float(s_kappa(k, np.array([r]))[0] ** (model.dim - 1))


def timelike_ricci(model: ModelSpacetime) -> float:
    """Ric(v, v) for unit timelike v"""
    return (model.dim - 1) * model.k_sec


def radial_ratio_slope(model: ModelSpacetime) -> float:
    """Coefficient c in A(r)/A(2r) = 2^(1-n) (1 + c r^2) + O(r^3)

    Each of the n - 1 Jacobi factors s_k(r)/s_k(2r) contributes k r^2 / 2, so
    c = Ric(v, v) / 2.
    """
    return timelike_ricci(model) / 2.0


# Point selectors


@dataclass(frozen=True)
class AllPoints:
    pass


@dataclass(frozen=True)
class BoxSelector:
    lo: tuple[float, ...]
    hi: tuple[float, ...]


@dataclass(frozen=True)
class SliceSelector:
    axis: int
    value: float


@dataclass(frozen=True)
class HyperboloidSelector:
    rho: float


@dataclass(frozen=True)
class PointSelector:
    coords: tuple[float, ...]


@dataclass(frozen=True)
class IndexSelector:
    indices: tuple[int, ...]


@dataclass(frozen=True)
class ConeSelector:
    cone: Cone


type Selector = AllPoints | BoxSelector | SliceSelector | HyperboloidSelector | PointSelector | IndexSelector | ConeSelector


def _selection_tolerance(space: FiniteCausalSpace, scale: float) -> float:
    if space.meta.mode == "sprinkle" and space.meta.spacing is not None:
        return space.meta.spacing / 2.0
    return 1e-9 * max(1.0, abs(scale))


def nearest_point(space: FiniteCausalSpace, y: Iterable[float]) -> int:
    """Index of the nearest point under the Euclidean chart metric, lowest index on ties"""
    y = np.asarray(y, dtype=float)
    k = min(8, space.n)
    dist, idx = cKDTree(space.coords).query(y, k=k)
    dist, idx = np.atleast_1d(dist), np.atleast_1d(idx)
    ties = idx[dist <= dist.min() + 1e-12 * (1.0 + dist.min())]
    return int(ties.min())


def select_points(space: FiniteCausalSpace, selector: Selector) -> IndexSet:
    coords = space.coords
    match selector:
        case AllPoints():
            hit = np.ones(space.n, dtype=bool)
        case BoxSelector(lo=lo, hi=hi):
            tol = _selection_tolerance(space, max(abs(v) for v in lo + hi))
            hit = np.all((coords >= np.array(lo) - tol) & (coords <= np.array(hi) + tol), axis=1)
        case SliceSelector(axis=axis, value=value):
            if not 0 <= axis < space.dim:
                raise DomainError(f"Slice axis {axis} outside 0..{space.dim - 1}")
            hit = np.abs(coords[:, axis] - value) <= _selection_tolerance(space, value)
        case HyperboloidSelector(rho=rho):
            sq = coords[:, 0] ** 2 - np.sum(coords[:, 1:] ** 2, axis=1)
            radius = np.sqrt(np.maximum(sq, 0.0))
            hit = (sq > 0) & (np.abs(radius - rho) <= _selection_tolerance(space, rho))
        case PointSelector(coords=y):
            return (nearest_point(space, y),)
        case IndexSelector(indices=indices):
            bad = [i for i in indices if not 0 <= i < space.n]
            if bad:
                raise DomainError(f"Point indices {bad} outside 0..{space.n - 1}")
            return tuple(sorted(set(indices)))
        case ConeSelector(cone=cone):
            hit = np.array([contains(cone, y) for y in coords])
        case _:
            assert_never(selector)
    selected = tuple(int(i) for i in np.flatnonzero(hit))
    if not selected:
        raise DomainError(f"Selector {selector} matches no points")
    return selected


def time_slice(space: FiniteCausalSpace, value: float, axis: int = 0) -> AchronalSet:
    return achronal_set(space, select_points(space, SliceSelector(axis, value)), f"slice:{axis}:{value}")


def hyperboloid(space: FiniteCausalSpace, rho: float) -> AchronalSet:
    return achronal_set(space, select_points(space, HyperboloidSelector(rho)), f"hyperboloid:{rho}")
