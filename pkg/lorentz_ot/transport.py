"""
The l_p transport problem on a finite causal space.

Couplings only ever use arcs (i, j) with i <= j; forbidden arcs are left out
of every graph and every LP, so the value -inf never enters arithmetic.
"""

from __future__ import annotations

import itertools
import logging
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Literal

import networkx as nx
import numpy as np
from scipy import optimize, sparse

from .causal_space import FiniteCausalSpace, WeightedMeasure, from_weights
from .domains import NEG_INF, DomainError, ExtendedReal, Infinite, NotCyclicallyMonotoneError
from .sampling import rng_stream

logger = logging.getLogger(__name__)

MARGINAL_TOLERANCE = 1e-10
FLOW_SCALE = 10**12
NETWORK_MASS_SCALE = 10**12
NETWORK_COST_SCALE = 10**9
# Under "auto" the exact backend is used while both supports have at most this many points
EXACT_LIMIT = 64
OPTIMUM_SLACK = 1e-9

type Backend = Literal["exact", "highs", "network", "auto"]


# Define the semantic domains


@dataclass(frozen=True, eq=False)
class Coupling:
    src: np.ndarray
    dst: np.ndarray
    mass: np.ndarray
    mu: WeightedMeasure
    nu: WeightedMeasure
    p: float
    value: ExtendedReal

    def __post_init__(self):
        for name, dtype in (("src", int), ("dst", int), ("mass", float)):
            object.__setattr__(self, name, np.asarray(getattr(self, name), dtype=dtype))
        for side, measure, index in (("first", self.mu, self.src), ("second", self.nu, self.dst)):
            marginal = _aggregate(index, self.mass)
            expected = dict(zip(measure.support, measure.mass.tolist()))
            for point in set(marginal) | set(expected):
                gap = abs(marginal.get(point, 0.0) - expected.get(point, 0.0))
                if gap > MARGINAL_TOLERANCE:
                    raise DomainError(f"Coupling {side} marginal at point {point} is off by {gap:.3g}")

    @property
    def pairs(self) -> list[tuple[int, int, float]]:
        return [(int(i), int(j), float(m)) for i, j, m in zip(self.src, self.dst, self.mass)]

    @property
    def causal(self) -> bool:
        return not isinstance(self.value, Infinite)

    def support(self, tol: float = 0.0) -> list[tuple[int, int]]:
        return [(int(i), int(j)) for i, j, m in zip(self.src, self.dst, self.mass) if m > tol]


@dataclass(frozen=True)
class PotentialPair:
    phi: dict[int, float]
    psi: dict[int, float]


@dataclass(frozen=True)
class DualisabilityCertificate:
    timelike_dualisable: bool
    strongly: bool
    witness: Coupling | None
    null_mass: float
    reason: str
    # integrable bounds a + b always exist on a finite space
    bounds_condition: Literal["vacuous"] = "vacuous"


@dataclass(frozen=True)
class MonotonicityAudit:
    defect: float
    cycle: tuple[tuple[int, int], ...]
    cycles_checked: int
    exhaustive: bool


@dataclass(frozen=True)
class GluedPlan:
    triples: list[tuple[int, int, int, float]]
    projected: Coupling


def _aggregate(index: np.ndarray, mass: np.ndarray) -> dict[int, float]:
    out: dict[int, list[float]] = {}
    for i, m in zip(index, mass):
        out.setdefault(int(i), []).append(float(m))
    return {i: math.fsum(ms) for i, ms in out.items()}


def coupling_value(space: FiniteCausalSpace, src, dst, mass, p: float) -> ExtendedReal:
    """sum of mass * tau^p over the pairs, or -inf if some charged pair is not causal"""
    src, dst, mass = np.asarray(src, dtype=int), np.asarray(dst, dtype=int), np.asarray(mass)
    charged = mass > 0
    if not np.all(space.leq[src[charged], dst[charged]]):
        return NEG_INF
    return math.fsum(mass * space.tau[src, dst] ** p)


def make_coupling(space: FiniteCausalSpace, src, dst, mass, mu: WeightedMeasure, nu: WeightedMeasure, p: float) -> Coupling:
    return Coupling(src, dst, mass, mu, nu, p, coupling_value(space, src, dst, mass, p))


def _check_inputs(space: FiniteCausalSpace, mu: WeightedMeasure, nu: WeightedMeasure, p: float | None = None) -> None:
    for name, measure in (("mu", mu), ("nu", nu)):
        bad = [i for i in measure.support if not 0 <= i < space.n]
        if bad:
            raise DomainError(f"{name} charges points {bad} outside the space of {space.n} points")
    if p is not None and not 0.0 < p <= 1.0:
        raise DomainError(f"Exponent p must lie in (0, 1], got {p}")


def _integer_masses(mass: np.ndarray, scale: int) -> list[int]:
    """Largest-remainder rounding of a probability vector to integers summing to scale"""
    raw = np.asarray(mass) * scale
    base = np.floor(raw).astype(np.int64)
    short = scale - int(base.sum())
    order = np.argsort(-(raw - base), kind="stable")
    out = [int(b) for b in base]
    for k in order[:short]:
        out[int(k)] += 1
    return out


# Feasibility


def causal_feasible(space: FiniteCausalSpace, mu: WeightedMeasure, nu: WeightedMeasure) -> tuple[bool, Coupling | None]:
    """Decide whether a causal coupling exists by bipartite max-flow"""
    _check_inputs(space, mu, nu)
    G = nx.DiGraph()
    for i, cap in zip(mu.support, _integer_masses(mu.mass, FLOW_SCALE)):
        G.add_edge("s", ("x", i), capacity=cap)
    for j, cap in zip(nu.support, _integer_masses(nu.mass, FLOW_SCALE)):
        G.add_edge(("y", j), "t", capacity=cap)
    for i in mu.support:
        for j in nu.support:
            if space.leq[i, j]:
                G.add_edge(("x", i), ("y", j))
    if not G.has_node("t") or not G.has_node("s"):
        return False, None
    flow_value, flow = nx.maximum_flow(G, "s", "t")
    if flow_value != FLOW_SCALE:
        logger.debug(f"[FEASIBLE] max flow {flow_value / FLOW_SCALE:.12f} < 1: no causal coupling")
        return False, None
    src, dst, mass = [], [], []
    for i in mu.support:
        for (_, j), f in sorted(flow[("x", i)].items()):
            if f > 0:
                src.append(i)
                dst.append(j)
                mass.append(f / FLOW_SCALE)
    return True, make_coupling(space, src, dst, mass, mu, nu, 1.0)


# Linear programs over causal arcs


@dataclass(frozen=True)
class _Arcs:
    src: np.ndarray  # point indices
    dst: np.ndarray
    row_src: np.ndarray  # constraint rows
    row_dst: np.ndarray


def _arcs(space: FiniteCausalSpace, mu: WeightedMeasure, nu: WeightedMeasure, chronological: bool = False) -> _Arcs:
    """Admissible arcs in lexicographic (i, j) order"""
    relation = space.tau > 0 if chronological else space.leq
    src_order = sorted(range(len(mu.support)), key=lambda a: mu.support[a])
    dst_order = sorted(range(len(nu.support)), key=lambda b: nu.support[b])
    rows = [(a, b) for a in src_order for b in dst_order if relation[mu.support[a], nu.support[b]]]
    row_src = np.array([a for a, _ in rows], dtype=int)
    row_dst = np.array([b for _, b in rows], dtype=int)
    support_src, support_dst = np.array(mu.support, dtype=int), np.array(nu.support, dtype=int)
    return _Arcs(
        support_src[row_src] if rows else np.array([], dtype=int),
        support_dst[row_dst] if rows else np.array([], dtype=int),
        row_src,
        row_dst,
    )


def _marginal_constraints(arcs: _Arcs, mu: WeightedMeasure, nu: WeightedMeasure):
    m, k = len(mu.support), len(arcs.src)
    rows = np.concatenate([arcs.row_src, m + arcs.row_dst])
    cols = np.concatenate([np.arange(k), np.arange(k)])
    A = sparse.csr_matrix((np.ones(2 * k), (rows, cols)), shape=(m + len(nu.support), k))
    b = np.concatenate([mu.mass, nu.mass])
    return A, b


def _polish(A: sparse.csr_matrix, b: np.ndarray, x: np.ndarray) -> np.ndarray:
    """Re-solve the basic columns exactly, so that marginals hold to rounding"""
    basic = np.flatnonzero(x > 1e-12)
    out = np.zeros_like(x)
    if basic.size == 0:
        return out
    sub = A[:, basic].toarray()
    solution, _, rank, _ = np.linalg.lstsq(sub, b, rcond=None)
    if rank == basic.size and np.all(solution >= -1e-14) and np.max(np.abs(sub @ solution - b)) <= 1e-13:
        out[basic] = np.maximum(solution, 0.0)
    else:
        out[basic] = x[basic]
    return out


def _highs(
    c: np.ndarray,
    A: sparse.csr_matrix,
    b: np.ndarray,
    A_ub: np.ndarray | None = None,
    b_ub: np.ndarray | None = None,
) -> np.ndarray | None:
    """Maximize c.x over the transport polytope; None when infeasible"""
    result = optimize.linprog(
        -c,
        A_ub=A_ub,
        b_ub=b_ub,
        A_eq=A,
        b_eq=b,
        bounds=(0, None),
        method="highs-ds",
        options={"presolve": False, "primal_feasibility_tolerance": 1e-10, "dual_feasibility_tolerance": 1e-10},
    )
    match result.status:
        case 0:
            return _polish(A, b, result.x)
        case 2:
            return None
        case _:
            raise DomainError(f"Transport LP failed: {result.message}")


def _network_simplex(space: FiniteCausalSpace, mu: WeightedMeasure, nu: WeightedMeasure, arcs: _Arcs, p: float) -> np.ndarray:
    G = nx.DiGraph()
    for i, d in zip(mu.support, _integer_masses(mu.mass, NETWORK_MASS_SCALE)):
        G.add_node(("x", i), demand=-d)
    for j, d in zip(nu.support, _integer_masses(nu.mass, NETWORK_MASS_SCALE)):
        G.add_node(("y", j), demand=d)
    for i, j in zip(arcs.src, arcs.dst):
        G.add_edge(("x", int(i)), ("y", int(j)), weight=-round(space.tau[i, j] ** p * NETWORK_COST_SCALE))
    _, flow = nx.network_simplex(G)
    return np.array([flow[("x", int(i))][("y", int(j))] for i, j in zip(arcs.src, arcs.dst)]) / NETWORK_MASS_SCALE


def _exact_simplex(space: FiniteCausalSpace, mu: WeightedMeasure, nu: WeightedMeasure, arcs: _Arcs, p: float) -> np.ndarray:
    """Network simplex over Fractions: every pivot is exact for the given float masses and costs

    The marginals only balance to rounding, so a slack node absorbs the
    difference through arcs dearer than any transport gain.
    """
    supply = [Fraction(m) for m in mu.mass.tolist()]
    demand = [Fraction(m) for m in nu.mass.tolist()]
    cost = [Fraction(c) for c in (space.tau[arcs.src, arcs.dst] ** p).tolist()]
    dear = 1 + sum(cost, Fraction(0))
    G = nx.DiGraph()
    G.add_node("slack", demand=sum(supply, Fraction(0)) - sum(demand, Fraction(0)))
    for i, s in zip(mu.support, supply):
        G.add_node(("x", i), demand=-s)
        G.add_edge(("x", i), "slack", weight=dear)
    for j, d in zip(nu.support, demand):
        G.add_node(("y", j), demand=d)
        G.add_edge("slack", ("y", j), weight=dear)
    for i, j, c in zip(arcs.src, arcs.dst, cost):
        G.add_edge(("x", int(i)), ("y", int(j)), weight=-c)
    _, flow = nx.network_simplex(G)
    return np.array([float(flow[("x", int(i))][("y", int(j))]) for i, j in zip(arcs.src, arcs.dst)])


def solve_lp(
    space: FiniteCausalSpace, mu: WeightedMeasure, nu: WeightedMeasure, p: float, backend: Backend = "auto"
) -> tuple[ExtendedReal, Coupling | None]:
    """l_p(mu, nu) and an optimal vertex coupling; (-inf, None) when no causal coupling exists"""
    _check_inputs(space, mu, nu, p)
    feasible, _ = causal_feasible(space, mu, nu)
    if not feasible:
        logger.debug("[SOLVE] no causal coupling: l_p = -inf")
        return NEG_INF, None
    arcs = _arcs(space, mu, nu)
    cost = space.tau[arcs.src, arcs.dst] ** p
    if backend == "auto":
        backend = "exact" if max(len(mu.support), len(nu.support)) <= EXACT_LIMIT else "network"
    match backend:
        case "exact":
            x = _exact_simplex(space, mu, nu, arcs, p)
        case "highs":
            A, b = _marginal_constraints(arcs, mu, nu)
            x = _highs(cost, A, b)
            if x is None:
                return NEG_INF, None
        case "network":
            A, b = _marginal_constraints(arcs, mu, nu)
            x = _polish(A, b, _network_simplex(space, mu, nu, arcs, p))
        case _:
            raise DomainError(f"Unknown transport backend {backend!r}")
    keep = x > 0
    coupling = make_coupling(space, arcs.src[keep], arcs.dst[keep], x[keep], mu, nu, p)
    value = coupling.value
    assert not isinstance(value, Infinite)
    ell = max(value, 0.0) ** (1.0 / p)
    logger.debug(f"[SOLVE] {backend}: {len(arcs.src)} arcs, {int(keep.sum())} charged, l_p = {ell:.12g}")
    return ell, coupling


def _optimal_face_lp(
    space: FiniteCausalSpace, mu: WeightedMeasure, nu: WeightedMeasure, p: float, value: float, bonus: np.ndarray, arcs: _Arcs
) -> tuple[float, np.ndarray] | None:
    """Maximize bonus.x over couplings within OPTIMUM_SLACK of the optimum"""
    A, b = _marginal_constraints(arcs, mu, nu)
    cost = space.tau[arcs.src, arcs.dst] ** p
    floor = value * (1.0 - OPTIMUM_SLACK) - 1e-12
    x = _highs(bonus, A, b, A_ub=-cost[None, :], b_ub=np.array([-floor]))
    if x is None:
        return None
    return math.fsum(bonus * x), x


def strong_dualisability_certificate(
    space: FiniteCausalSpace, mu: WeightedMeasure, nu: WeightedMeasure, p: float
) -> DualisabilityCertificate:
    ell, _ = solve_lp(space, mu, nu, p)
    match ell:
        case Infinite():
            return DualisabilityCertificate(False, False, None, 0.0, "no causal coupling: l_p = -inf")
        case _ if ell <= 0:
            return DualisabilityCertificate(False, False, None, 0.0, "l_p = 0 is not in (0, inf)")
    value = ell**p
    chrono = _arcs(space, mu, nu, chronological=True)
    witness = None
    if len(chrono.src):
        A, b = _marginal_constraints(chrono, mu, nu)
        x = _highs(space.tau[chrono.src, chrono.dst] ** p, A, b)
        if x is not None:
            keep = x > 0
            candidate = make_coupling(space, chrono.src[keep], chrono.dst[keep], x[keep], mu, nu, p)
            if candidate.value >= value * (1.0 - OPTIMUM_SLACK) - 1e-12:  # type: ignore[operator]
                witness = candidate
    if witness is None:
        return DualisabilityCertificate(False, False, None, 0.0, "no optimal coupling lives on {tau > 0}")
    arcs = _arcs(space, mu, nu)
    null = (space.tau[arcs.src, arcs.dst] <= 0).astype(float)
    null_mass = 0.0
    if null.any():
        face = _optimal_face_lp(space, mu, nu, p, value, null, arcs)
        null_mass = 0.0 if face is None else face[0]
    strongly = null_mass <= OPTIMUM_SLACK
    reason = "every optimal coupling lives on {tau > 0}" if strongly else f"an optimal coupling puts mass {null_mass:.3g} on null arcs"
    logger.debug(f"[DUAL] l_p = {ell:.6g}: timelike dualisable, strongly={strongly}")
    return DualisabilityCertificate(True, strongly, witness, null_mass, reason)


def second_optimal_vertex(space: FiniteCausalSpace, coupling: Coupling) -> float:
    """Largest mass an optimal coupling can put off the support of the given one"""
    if not coupling.causal:
        raise DomainError("Coupling is not causal")
    arcs = _arcs(space, coupling.mu, coupling.nu)
    charged = set(coupling.support())
    off = np.array([0.0 if (int(i), int(j)) in charged else 1.0 for i, j in zip(arcs.src, arcs.dst)])
    if not off.any():
        return 0.0
    face = _optimal_face_lp(space, coupling.mu, coupling.nu, coupling.p, coupling.value, off, arcs)  # type: ignore[arg-type]
    return 0.0 if face is None else max(face[0], 0.0)


def is_induced_by_map(coupling: Coupling, tol: float = 1e-12) -> bool:
    targets: dict[int, set[int]] = {}
    for i, j, m in coupling.pairs:
        if m > tol:
            targets.setdefault(i, set()).add(j)
    return all(len(js) == 1 for js in targets.values())


def restrict_coupling(space: FiniteCausalSpace, coupling: Coupling, density: np.ndarray) -> Coupling:
    """The renormalized f * pi for a nonnegative f given per pair"""
    f = np.asarray(density, dtype=float)
    if f.shape != coupling.mass.shape or np.any(f < 0):
        raise DomainError("Restriction density must be nonnegative with one value per pair")
    mass = f * coupling.mass
    total = math.fsum(mass)
    if total <= 0:
        raise DomainError("Restriction density vanishes on the support")
    keep = mass > 0
    src, dst, mass = coupling.src[keep], coupling.dst[keep], mass[keep] / total
    mu = from_weights(src, mass)
    nu = from_weights(dst, mass)
    return make_coupling(space, src, dst, mass, mu, nu, coupling.p)


# Cyclical monotonicity


def _pair_cost(space: FiniteCausalSpace, x: int, y: int, p: float, variant: str) -> float | None:
    if variant == "ell" and not space.leq[x, y]:
        return None
    return float(space.tau[x, y] ** p)


def _cycles(size: int, max_len: int):
    for k in range(2, max_len + 1):
        for combo in itertools.combinations(range(size), k):
            for rest in itertools.permutations(combo[1:]):
                yield (combo[0],) + rest


def audit_cyclical_monotonicity(
    space: FiniteCausalSpace,
    coupling: Coupling,
    p: float,
    max_cycle_len: int | None = None,
    n_random: int = 2000,
    variant: Literal["ell", "tau"] = "ell",
    seed: int = 0,
) -> MonotonicityAudit:
    """Worst gain sum c(x_{i+1}, y_i) - sum c(x_i, y_i) over cycles of support pairs"""
    pairs = coupling.support()
    size = len(pairs)
    max_len = min(size, 5 if max_cycle_len is None else max_cycle_len)
    exhaustive = size <= 12
    if exhaustive:
        cycles = _cycles(size, max_len)
    else:
        rng = rng_stream(seed, "audit")
        cycles = (
            tuple(int(a) for a in rng.choice(size, size=int(rng.integers(2, max_len + 1)), replace=False))
            for _ in range(n_random)
        )
    diagonal = [_pair_cost(space, x, y, p, "tau") for x, y in pairs]
    worst: float | None = None
    witness: tuple[tuple[int, int], ...] = ()
    checked = 0
    for cycle in cycles:
        if len(cycle) < 2:
            continue
        shifted = []
        for a, b in zip(cycle, cycle[1:] + cycle[:1]):
            c = _pair_cost(space, pairs[b][0], pairs[a][1], p, variant)
            if c is None:
                break
            shifted.append(c)
        else:
            checked += 1
            gain = math.fsum(shifted) - math.fsum(diagonal[a] for a in cycle)  # type: ignore[misc]
            if worst is None or gain > worst:
                worst, witness = gain, tuple(pairs[a] for a in cycle)
    defect = 0.0 if worst is None else worst
    logger.debug(f"[AUDIT] {variant}^p, {checked} cycles over {size} pairs: defect {defect:.3g}")
    return MonotonicityAudit(defect, witness, checked, exhaustive)


# Kantorovich potentials


def _check_root(gamma: list[tuple[int, int]], root: tuple[int, int]) -> None:
    if tuple(root) not in {tuple(g) for g in gamma}:
        raise DomainError(f"Root pair {root} is not in Gamma")


def build_potentials(space: FiniteCausalSpace, gamma: list[tuple[int, int]], p: float, root: tuple[int, int]) -> PotentialPair:
    """phi as the chain infimum anchored at phi(root.x) = 0, psi as its l^p-transform"""
    _check_root(gamma, root)
    cost = lambda x, y: float(space.tau[x, y] ** p)
    G = nx.DiGraph()
    sources = sorted({x for x, _ in gamma})
    G.add_nodes_from(sources)
    for xa, ya in gamma:
        for xb in sources:
            if xb == xa or not space.leq[xb, ya]:
                continue
            w = cost(xa, ya) - cost(xb, ya) + 1e-12
            if not G.has_edge(xa, xb) or G[xa][xb]["weight"] > w:
                G.add_edge(xa, xb, weight=w)
    if nx.negative_edge_cycle(G):
        H = G.copy()
        H.add_edges_from((("*", x) for x in sources), weight=0.0)
        cycle = nx.find_negative_cycle(H, "*")
        raise NotCyclicallyMonotoneError("Gamma is not cyclically monotone", cycle)
    reach = nx.single_source_bellman_ford_path_length(G, root[0])
    phi = {x: float(d) for x, d in reach.items()}
    stranded = [x for x in sources if x not in phi]
    if stranded:
        H = G.copy()
        H.add_edges_from((("*", x) for x in sources), weight=0.0)
        h = nx.single_source_bellman_ford_path_length(H, "*")
        offset = max(
            [0.0]
            + [phi[b] - h[a] - d["weight"] for a, b, d in G.edges(data=True) if a not in phi and b in phi]
        )
        phi.update({x: h[x] + offset for x in stranded})
    targets = sorted({y for _, y in gamma})
    psi = {y: max(phi[x] + cost(x, y) for x in sources if space.leq[x, y]) for y in targets}
    logger.debug(f"[POTENTIALS] {len(sources)} sources, {len(stranded)} outside the root component")
    return PotentialPair(phi, psi)


def transform_potential(
    space: FiniteCausalSpace, phi: dict[int, float], targets: list[int], p: float, variant: Literal["ell", "tau"] = "ell"
) -> dict[int, ExtendedReal]:
    """psi(y) = sup_x phi(x) + c(x, y), with c = l^p or tau^p"""
    out: dict[int, ExtendedReal] = {}
    for y in targets:
        values = [phi[x] + float(space.tau[x, y] ** p) for x in phi if variant == "tau" or space.leq[x, y]]
        out[y] = max(values) if values else NEG_INF
    return out


def duality_gap(space: FiniteCausalSpace, mu: WeightedMeasure, nu: WeightedMeasure, p: float, potentials: PotentialPair) -> float:
    """int psi dnu - int phi dmu - l_p(mu, nu)^p"""
    missing = [i for i in mu.support if i not in potentials.phi] + [j for j in nu.support if j not in potentials.psi]
    if missing:
        raise DomainError(f"Potentials are undefined at points {missing}")
    ell, _ = solve_lp(space, mu, nu, p)
    if isinstance(ell, Infinite):
        raise DomainError("No causal coupling: the dual problem is unbounded")
    values = [abs(v) for v in (*potentials.phi.values(), *potentials.psi.values())]
    tol = 1e-12 * max([1.0, float(space.tau.max() ** p)] + values)
    for i in mu.support:
        for j in nu.support:
            if not space.leq[i, j]:
                continue
            slack = potentials.psi[j] - potentials.phi[i] - float(space.tau[i, j] ** p)
            if slack < -tol:
                raise DomainError(f"Potentials are infeasible at ({i}, {j}): psi - phi - l^p = {slack:.3g}")
    primal = math.fsum(nu.mass * np.array([potentials.psi[j] for j in nu.support])) - math.fsum(
        mu.mass * np.array([potentials.phi[i] for i in mu.support])
    )
    return primal - ell**p


# Gluing


def glue(space: FiniteCausalSpace, pi12: Coupling, pi23: Coupling) -> GluedPlan:
    """pi_123 = pi_12(i, j) pi_23(j, k) / mu_2(j) and its (1, 3) projection"""
    if not pi12.nu.same_as(pi23.mu, MARGINAL_TOLERANCE):
        raise DomainError("Second marginal of pi12 differs from first marginal of pi23")
    middle = _aggregate(pi12.dst, pi12.mass)
    onward: dict[int, list[tuple[int, float]]] = {}
    for j, k, m in pi23.pairs:
        onward.setdefault(j, []).append((k, m))
    triples = []
    for i, j, m in pi12.pairs:
        for k, n in onward.get(j, []):
            mass = m * n / middle[j]
            if mass > 0:
                triples.append((i, j, k, mass))
    src = [t[0] for t in triples]
    dst = [t[2] for t in triples]
    mass = np.array([t[3] for t in triples])
    merged: dict[tuple[int, int], list[float]] = {}
    for i, k, m in zip(src, dst, mass):
        merged.setdefault((i, k), []).append(float(m))
    keys = sorted(merged)
    projected = make_coupling(
        space,
        [k[0] for k in keys],
        [k[1] for k in keys],
        [math.fsum(merged[k]) for k in keys],
        pi12.mu,
        pi23.nu,
        pi12.p,
    )
    return GluedPlan(triples, projected)
