"""
Finite measured causal spaces: the tuple (X, d, m, <<, <=, tau) on finitely many points.

The causal relation <= is stored explicitly next to tau, so null relations
(x <= y with tau(x, y) = 0) are first class. The chronological relation is
always read off as {tau > 0}.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field, replace
from typing import TYPE_CHECKING, Iterable, Literal

import numpy as np

from .domains import DomainError, IndexSet

if TYPE_CHECKING:
    from .models import ModelSpacetime

logger = logging.getLogger(__name__)

# Elements of one (rows x middles x n) block of the max-plus reverse-triangle scan
AXIOM_BLOCK = 1 << 22

MASS_TOLERANCE = 1e-12


# Define the semantic domains


@dataclass(frozen=True)
class SpaceMeta:
    """Provenance of a space: which model and sampler produced it"""

    model: ModelSpacetime | None = None
    mode: Literal["lattice", "sprinkle", "explicit"] = "explicit"
    spacing: float | None = None
    density: float | None = None
    dim: int | None = None
    seed: int | None = None
    exact_tau: bool = True


def _frozen(array: np.ndarray, dtype) -> np.ndarray:
    out = np.array(array, dtype=dtype, copy=True)
    out.flags.writeable = False
    return out


@dataclass(frozen=True, eq=False)
class FiniteCausalSpace:
    coords: np.ndarray
    weight: np.ndarray
    leq: np.ndarray
    tau: np.ndarray
    labels: tuple[str, ...] | None = None
    meta: SpaceMeta = field(default_factory=SpaceMeta)

    def __post_init__(self):
        coords = np.atleast_2d(np.asarray(self.coords, dtype=float))
        n = coords.shape[0]
        if n == 0:
            raise DomainError("A causal space needs at least one point")
        if np.shape(self.weight) != (n,):
            raise DomainError(f"weight has shape {np.shape(self.weight)}, expected ({n},)")
        for name in ("leq", "tau"):
            if np.shape(getattr(self, name)) != (n, n):
                raise DomainError(f"{name} has shape {np.shape(getattr(self, name))}, expected ({n}, {n})")
        if self.labels is not None and len(self.labels) != n:
            raise DomainError(f"{len(self.labels)} labels for {n} points")
        object.__setattr__(self, "coords", _frozen(coords, float))
        object.__setattr__(self, "weight", _frozen(self.weight, float))
        object.__setattr__(self, "leq", _frozen(self.leq, bool))
        object.__setattr__(self, "tau", _frozen(self.tau, float))

    @property
    def n(self) -> int:
        return self.coords.shape[0]

    @property
    def dim(self) -> int:
        return self.coords.shape[1]

    def label(self, i: int) -> str:
        if self.labels is not None:
            return self.labels[i]
        return str(tuple(round(float(c), 12) for c in self.coords[i]))

    def total_mass(self, indices: Iterable[int] | None = None) -> float:
        if indices is None:
            return math.fsum(self.weight)
        return math.fsum(self.weight[list(indices)])


@dataclass(frozen=True)
class Violation:
    kind: Literal["reflexivity", "transitivity", "causality", "negative_tau", "weight", "reverse_triangle"]
    indices: IndexSet
    defect: float


@dataclass(frozen=True)
class AchronalSet:
    members: IndexSet
    label: str = ""


@dataclass(frozen=True, eq=False)
class WeightedMeasure:
    """A probability measure on point indices"""

    support: IndexSet
    mass: np.ndarray

    def __post_init__(self):
        mass = np.asarray(self.mass, dtype=float)
        if mass.shape != (len(self.support),):
            raise DomainError(f"{mass.shape[0]} masses for {len(self.support)} support points")
        if len(set(self.support)) != len(self.support):
            raise DomainError(f"Support indices are not distinct: {self.support}")
        if len(self.support) == 0:
            raise DomainError("Empty support")
        if np.any(mass < 0):
            raise DomainError("Negative mass in measure")
        total = math.fsum(mass)
        if abs(total - 1.0) > MASS_TOLERANCE:
            raise DomainError(f"Measure has total mass {total!r}, expected 1")
        object.__setattr__(self, "support", tuple(int(i) for i in self.support))
        object.__setattr__(self, "mass", _frozen(mass, float))

    def dense(self, n: int) -> np.ndarray:
        out = np.zeros(n)
        out[list(self.support)] = self.mass
        return out

    def mass_at(self, i: int) -> float:
        try:
            return float(self.mass[self.support.index(i)])
        except ValueError:
            return 0.0

    def same_as(self, other: WeightedMeasure, tol: float = MASS_TOLERANCE) -> bool:
        keys = sorted(set(self.support) | set(other.support))
        return all(abs(self.mass_at(i) - other.mass_at(i)) <= tol for i in keys)


# Measure factories


def from_weights(support: Iterable[int], weights: Iterable[float]) -> WeightedMeasure:
    """Normalize nonnegative weights, dropping zeros and merging repeated indices"""
    acc: dict[int, float] = {}
    for i, w in zip(support, weights):
        if w < 0:
            raise DomainError(f"Negative weight {w} at point {i}")
        if w > 0:
            acc[int(i)] = acc.get(int(i), 0.0) + float(w)
    if not acc:
        raise DomainError("All weights are zero")
    keys = sorted(acc)
    total = math.fsum(acc.values())
    mass = np.array([acc[k] / total for k in keys])
    # absorb the last rounding ulp so that fsum(mass) == 1 within tolerance
    mass[-1] = 1.0 - math.fsum(mass[:-1])
    return WeightedMeasure(tuple(keys), mass)


def dirac(i: int) -> WeightedMeasure:
    return WeightedMeasure((int(i),), np.array([1.0]))


def uniform(indices: Iterable[int]) -> WeightedMeasure:
    indices = sorted(set(int(i) for i in indices))
    return from_weights(indices, [1.0] * len(indices))


def normalized_reference(space: FiniteCausalSpace, indices: Iterable[int]) -> WeightedMeasure:
    """The reference measure m restricted to a set and normalized"""
    indices = sorted(set(int(i) for i in indices))
    return from_weights(indices, space.weight[indices])


# Axioms


def default_eps_rt(space: FiniteCausalSpace) -> float:
    if space.meta.exact_tau or space.meta.spacing is None:
        return 1e-9 * max(1.0, float(space.tau.max()))
    return 2.0 * space.meta.spacing


def _transitivity(leq: np.ndarray) -> list[Violation]:
    """One (i, j, k) per pair i <= j <= k with not i <= k, j the lowest such middle point"""
    n = len(leq)
    counts = leq.astype(np.float32)
    rows = max(1, AXIOM_BLOCK // max(n, 1))
    found = []
    for start in range(0, n, rows):
        stop = min(start + rows, n)
        through = (counts[start:stop] @ counts) > 0
        for a, k in np.argwhere(through & ~leq[start:stop]):
            i = start + int(a)
            j = int(np.argmax(leq[i] & leq[:, k]))
            found.append(Violation("transitivity", (i, j, int(k)), 1.0))
    return found


def _reverse_triangle(leq: np.ndarray, tau: np.ndarray, eps: float) -> list[Violation]:
    """One (i, j, k) per causal pair i <= k, j the middle point of largest defect"""
    n = len(leq)
    masked = np.where(leq, tau, -np.inf)
    side = max(1, math.isqrt(AXIOM_BLOCK // max(n, 1)))
    found = []
    for i0 in range(0, n, side):
        i1 = min(i0 + side, n)
        best = np.full((i1 - i0, n), -np.inf)
        arg = np.zeros((i1 - i0, n), dtype=np.int64)
        for j0 in range(0, n, side):
            j1 = min(j0 + side, n)
            through = masked[i0:i1, j0:j1, None] + masked[None, j0:j1, :]
            local = through.argmax(axis=1)
            value = np.take_along_axis(through, local[:, None, :], axis=1)[:, 0, :]
            better = value > best
            best[better] = value[better]
            arg[better] = j0 + local[better]
        defect = best - tau[i0:i1]
        for a, k in np.argwhere(leq[i0:i1] & (defect > eps)):
            found.append(
                Violation("reverse_triangle", (i0 + int(a), int(arg[a, k]), int(k)), float(defect[a, k]))
            )
    return found


def validate_axioms(space: FiniteCausalSpace, eps_rt: float | None = None) -> list[Violation]:
    """Report every violated axiom; an empty list means the space is a valid causal space

    Transitivity and the reverse triangle inequality are checked through every
    middle point, with one witness triple reported per offending pair.
    """
    eps = default_eps_rt(space) if eps_rt is None else eps_rt
    leq, tau, n = space.leq, space.tau, space.n
    violations: list[Violation] = []

    for i in np.flatnonzero(~np.diag(leq)):
        violations.append(Violation("reflexivity", (int(i),), 1.0))
    for i in np.flatnonzero(space.weight <= 0):
        violations.append(Violation("weight", (int(i),), float(space.weight[i])))
    for i, j in np.argwhere(tau < 0):
        violations.append(Violation("negative_tau", (int(i), int(j)), float(-tau[i, j])))
    for i, j in np.argwhere((tau > 0) & ~leq):
        violations.append(Violation("causality", (int(i), int(j)), float(tau[i, j])))

    violations += _transitivity(leq)
    violations += _reverse_triangle(leq, tau, eps)
    logger.debug(f"[AXIOMS] {n} points, eps_rt={eps:.3g}: {len(violations)} violations")
    return violations


# Cones and achronal sets


def _as_indices(A: Iterable[int]) -> list[int]:
    return sorted(set(int(a) for a in A))


def cone_sets(
    space: FiniteCausalSpace, A: Iterable[int], direction: Literal["future", "past"], strict: bool
) -> IndexSet:
    """I^+(A), J^+(A), I^-(A) or J^-(A)"""
    A = _as_indices(A)
    if not A:
        return ()
    relation = space.tau > 0 if strict else space.leq
    match direction:
        case "future":
            hit = relation[A, :].any(axis=0)
        case "past":
            hit = relation[:, A].any(axis=1)
        case _:
            raise DomainError(f"Unknown cone direction: {direction}")
    return tuple(int(i) for i in np.flatnonzero(hit))


def check_achronal(space: FiniteCausalSpace, V: Iterable[int]) -> tuple[bool, tuple[int, int] | None]:
    V = _as_indices(V)
    if not V:
        return True, None
    timelike = np.argwhere(space.tau[np.ix_(V, V)] > 0)
    if timelike.size == 0:
        return True, None
    a, b = timelike[0]
    return False, (V[a], V[b])


def achronal_set(space: FiniteCausalSpace, members: Iterable[int], label: str = "") -> AchronalSet:
    members = tuple(_as_indices(members))
    if not members:
        raise DomainError(f"Achronal set {label!r} is empty")
    ok, witness = check_achronal(space, members)
    if not ok:
        i, j = witness  # type: ignore[misc]
        raise DomainError(
            f"Set {label!r} is not achronal: tau({space.label(i)}, {space.label(j)}) = {space.tau[i, j]:.6g} > 0"
        )
    return AchronalSet(members, label)


def signed_time_separation(space: FiniteCausalSpace, V: AchronalSet) -> np.ndarray:
    """tau_V per point: positive on I^+(V), negative on I^-(V), zero elsewhere"""
    ok, witness = check_achronal(space, V.members)
    if not ok:
        raise DomainError(f"V = {V.label!r} is not achronal: witness pair {witness}")
    members = list(V.members)
    future = space.tau[members, :].max(axis=0)
    past = space.tau[:, members].max(axis=1)
    return np.where(future > 0, future, np.where(past > 0, -past, 0.0))


# Derived spaces


def causal_reverse(space: FiniteCausalSpace) -> FiniteCausalSpace:
    """The same points with past and future exchanged"""
    return replace(space, leq=space.leq.T, tau=space.tau.T)


def restrict_space(space: FiniteCausalSpace, indices: Iterable[int]) -> FiniteCausalSpace:
    keep = _as_indices(indices)
    if not keep:
        raise DomainError("Cannot restrict to an empty set of points")
    return FiniteCausalSpace(
        coords=space.coords[keep],
        weight=space.weight[keep],
        leq=space.leq[np.ix_(keep, keep)],
        tau=space.tau[np.ix_(keep, keep)],
        labels=None if space.labels is None else tuple(space.labels[i] for i in keep),
        meta=space.meta,
    )
