from __future__ import annotations

import itertools
import math

import numpy as np
from pytest import approx, fixture, mark, raises

from conftest import flat_space
from lorentz_ot.causal_space import dirac, from_weights, uniform
from lorentz_ot.domains import NEG_INF, DomainError, NotCyclicallyMonotoneError
from lorentz_ot.models import time_slice
from lorentz_ot.transport import (
    PotentialPair,
    audit_cyclical_monotonicity,
    build_potentials,
    causal_feasible,
    duality_gap,
    glue,
    is_induced_by_map,
    make_coupling,
    restrict_coupling,
    second_optimal_vertex,
    solve_lp,
    strong_dualisability_certificate,
    transform_potential,
)

ROOT3 = math.sqrt(3.0)
EIGHTH_ROOT = 8.0**0.25


@fixture
def pairing(four_points):
    """mu on {a, b}, nu on {c, d}"""
    return four_points, uniform([0, 1]), uniform([2, 3])


def brute_force(space, sources, targets, p):
    """Best value over the permutation vertices of the uniform transport polytope"""
    best = None
    for perm in itertools.permutations(targets):
        if all(space.leq[i, j] for i, j in zip(sources, perm)):
            value = sum(space.tau[i, j] ** p for i, j in zip(sources, perm)) / len(sources)
            best = value if best is None else max(best, value)
    return best


# Solving


def test_four_point_optimum(pairing):
    space, mu, nu = pairing
    ell, coupling = solve_lp(space, mu, nu, 0.5)
    assert ell == approx(3.0, rel=1e-12)
    assert coupling.value == approx(ROOT3, rel=1e-12)
    assert coupling.support() == [(0, 2), (1, 3)]
    assert is_induced_by_map(coupling)


def test_swapped_pairing_is_worse(pairing):
    space, mu, nu = pairing
    swapped = make_coupling(space, [0, 1], [3, 2], [0.5, 0.5], mu, nu, 0.5)
    assert swapped.value == approx(EIGHTH_ROOT, rel=1e-12)
    assert swapped.causal


def test_no_causal_coupling(four_points):
    ell, coupling = solve_lp(four_points, dirac(0), dirac(1), 0.5)
    assert ell == NEG_INF
    assert coupling is None
    assert causal_feasible(four_points, dirac(0), dirac(1)) == (False, None)


def test_noncausal_coupling_has_value_minus_infinity(pairing):
    space, _, _ = pairing
    coupling = make_coupling(space, [0], [1], [1.0], dirac(0), dirac(1), 0.5)
    assert coupling.value == NEG_INF
    assert not coupling.causal


def test_feasibility_witness(pairing):
    space, mu, nu = pairing
    ok, witness = causal_feasible(space, mu, nu)
    assert ok
    assert witness.p == 1.0
    assert witness.mu.same_as(mu) and witness.nu.same_as(nu)


@mark.parametrize("p", [0.0, -0.5, 1.5])
def test_exponent_outside_unit_interval(pairing, p):
    space, mu, nu = pairing
    with raises(DomainError, match="Exponent"):
        solve_lp(space, mu, nu, p)


def test_measures_outside_the_space(pairing):
    space, mu, _ = pairing
    with raises(DomainError, match="outside the space"):
        solve_lp(space, mu, dirac(9), 0.5)


def test_marginals_are_enforced(pairing):
    space, mu, nu = pairing
    with raises(DomainError, match="marginal"):
        make_coupling(space, [0], [2], [1.0], mu, nu, 0.5)


def test_unknown_backend(pairing):
    space, mu, nu = pairing
    with raises(DomainError, match="backend"):
        solve_lp(space, mu, nu, 0.5, backend="simplex")  # type: ignore[arg-type]


def test_against_permutation_vertices():
    rng = np.random.default_rng(2024)
    infeasible = 0
    for _ in range(200):
        size = int(rng.integers(1, 6))
        space = flat_space(rng.uniform(0.0, 1.0, size=(10, 2)))
        sources = sorted(rng.choice(10, size=size, replace=False).tolist())
        targets = sorted(rng.choice(10, size=size, replace=False).tolist())
        p = float(rng.uniform(0.1, 1.0))
        ell, coupling = solve_lp(space, uniform(sources), uniform(targets), p)
        best = brute_force(space, sources, targets, p)
        if best is None:
            assert ell == NEG_INF
            infeasible += 1
            continue
        assert coupling.value == approx(best, rel=1e-10, abs=1e-12)
        assert ell == approx(max(best, 0.0) ** (1.0 / p), rel=1e-10, abs=1e-12)
    assert 0 < infeasible < 200


@mark.parametrize("backend", ["highs", "network", "auto"])
def test_backends_agree(small_lattice, backend):
    mu = uniform(time_slice(small_lattice, 0.0).members)
    nu = uniform(time_slice(small_lattice, 1.5).members + time_slice(small_lattice, 2.0).members)
    exact, _ = solve_lp(small_lattice, mu, nu, 0.5, backend="exact")
    other, coupling = solve_lp(small_lattice, mu, nu, 0.5, backend=backend)
    assert other == approx(exact, rel=1e-8)
    assert coupling.mu.same_as(mu)
    assert coupling.nu.same_as(nu)


def test_exact_backend_absorbs_rounded_marginals(four_points):
    mu = from_weights([0, 1], [1.0, 2.0])
    nu = from_weights([2, 3], [2.0, 1.0])
    ell, coupling = solve_lp(four_points, mu, nu, 0.5, backend="exact")
    assert coupling.mu.same_as(mu) and coupling.nu.same_as(nu)
    highs, _ = solve_lp(four_points, mu, nu, 0.5, backend="highs")
    assert ell == approx(highs, rel=1e-10)


# Dualisability


def test_timelike_pairing_is_strongly_dualisable(pairing):
    cert = strong_dualisability_certificate(*pairing, 0.5)
    assert cert.timelike_dualisable and cert.strongly
    assert cert.null_mass == 0.0
    assert cert.witness.value == approx(ROOT3)
    assert cert.bounds_condition == "vacuous"


def test_null_pair_is_not_dualisable():
    space = flat_space([(0, 0), (1, 1)])
    cert = strong_dualisability_certificate(space, dirac(0), dirac(1), 0.5)
    assert not cert.timelike_dualisable
    assert "l_p = 0" in cert.reason


def test_infeasible_pair_is_not_dualisable(four_points):
    cert = strong_dualisability_certificate(four_points, dirac(0), dirac(1), 0.5)
    assert not cert.timelike_dualisable and not cert.strongly
    assert cert.witness is None


def test_unique_optimum_has_no_second_vertex(pairing):
    _, coupling = solve_lp(*pairing, 0.5)
    assert second_optimal_vertex(pairing[0], coupling) == approx(0.0, abs=1e-6)


def test_symmetric_targets_have_a_second_vertex():
    space = flat_space([(0, 0), (0, 1), (3, 0.5), (4, 0.5)])
    _, coupling = solve_lp(space, uniform([0, 1]), uniform([2, 3]), 0.5)
    assert second_optimal_vertex(space, coupling) > 0.5


def test_restriction(pairing):
    space = pairing[0]
    _, coupling = solve_lp(*pairing, 0.5)
    restricted = restrict_coupling(space, coupling, np.array([1.0, 0.0]))
    assert restricted.support() == [(0, 2)]
    assert restricted.mu.same_as(dirac(0))
    assert restricted.value == approx(ROOT3)
    with raises(DomainError, match="vanishes"):
        restrict_coupling(space, coupling, np.zeros(2))
    with raises(DomainError, match="one value per pair"):
        restrict_coupling(space, coupling, np.ones(3))


# Cyclical monotonicity and potentials


def test_optimal_coupling_is_cyclically_monotone(pairing):
    _, coupling = solve_lp(*pairing, 0.5)
    audit = audit_cyclical_monotonicity(pairing[0], coupling, 0.5)
    assert audit.defect <= 0.0
    assert audit.exhaustive
    assert audit.cycles_checked == 1


def test_swapped_coupling_has_a_defect(pairing):
    space, mu, nu = pairing
    swapped = make_coupling(space, [0, 1], [3, 2], [0.5, 0.5], mu, nu, 0.5)
    audit = audit_cyclical_monotonicity(space, swapped, 0.5)
    assert audit.defect == approx(2.0 * ROOT3 - 2.0 * EIGHTH_ROOT, rel=1e-12)
    assert set(audit.cycle) == {(0, 3), (1, 2)}


def test_translation_is_cyclically_monotone(small_lattice):
    mu = uniform(time_slice(small_lattice, 0.0).members)
    nu = uniform(time_slice(small_lattice, 1.0).members)
    _, coupling = solve_lp(small_lattice, mu, nu, 0.5)
    assert coupling.value == approx(1.0)
    assert audit_cyclical_monotonicity(small_lattice, coupling, 0.5).defect <= 1e-12
    assert audit_cyclical_monotonicity(small_lattice, coupling, 0.5, variant="tau").defect <= 1e-12


def test_sampled_audit_is_reproducible(small_lattice):
    mu = uniform([i for t in (0.0, 0.25, 0.5) for i in time_slice(small_lattice, t).members])
    nu = uniform([i for t in (1.5, 1.75, 2.0) for i in time_slice(small_lattice, t).members])
    _, coupling = solve_lp(small_lattice, mu, nu, 0.5)
    first = audit_cyclical_monotonicity(small_lattice, coupling, 0.5, n_random=300, seed=4)
    again = audit_cyclical_monotonicity(small_lattice, coupling, 0.5, n_random=300, seed=4)
    assert not first.exhaustive
    assert first == again
    assert first.defect <= 1e-9


def test_potentials_close_the_duality_gap(pairing):
    space, mu, nu = pairing
    potentials = build_potentials(space, [(0, 2), (1, 3)], 0.5, (0, 2))
    assert potentials.phi[0] == 0.0
    assert potentials.phi[1] == approx(ROOT3 - EIGHTH_ROOT, rel=1e-9)
    assert potentials.psi[2] == approx(ROOT3, rel=1e-12)
    assert potentials.psi[3] == approx(2.0 * ROOT3 - EIGHTH_ROOT, rel=1e-9)
    assert duality_gap(space, mu, nu, 0.5, potentials) == approx(0.0, abs=1e-9)


def test_potentials_need_a_monotone_set(pairing):
    space = pairing[0]
    with raises(NotCyclicallyMonotoneError) as err:
        build_potentials(space, [(0, 3), (1, 2)], 0.5, (0, 3))
    assert err.value.cycle


def test_root_must_be_in_gamma(pairing):
    with raises(DomainError, match="Root pair"):
        build_potentials(pairing[0], [(0, 2), (1, 3)], 0.5, (0, 3))


def test_duality_gap_rejects_bad_potentials(pairing):
    space, mu, nu = pairing
    with raises(DomainError, match="infeasible"):
        duality_gap(space, mu, nu, 0.5, PotentialPair({0: 0.0, 1: 0.0}, {2: 0.0, 3: 0.0}))
    with raises(DomainError, match="undefined"):
        duality_gap(space, mu, nu, 0.5, PotentialPair({0: 0.0}, {2: 0.0, 3: 0.0}))


def test_transform_potential(pairing):
    space = pairing[0]
    psi = transform_potential(space, {0: 0.0, 1: 1.0}, [0, 2, 3], 0.5)
    assert psi[0] == 0.0
    assert psi[2] == approx(1.0 + EIGHTH_ROOT)
    assert psi[3] == approx(1.0 + ROOT3)
    assert transform_potential(space, {1: 0.0}, [0], 0.5) == {0: NEG_INF}
    assert transform_potential(space, {1: 0.0}, [0], 0.5, variant="tau") == {0: 0.0}


# Gluing and the reverse triangle


def test_glue_of_translations(small_lattice):
    slices = [uniform(time_slice(small_lattice, t).members) for t in (0.0, 1.0, 2.0)]
    ell12, pi12 = solve_lp(small_lattice, slices[0], slices[1], 0.5)
    ell23, pi23 = solve_lp(small_lattice, slices[1], slices[2], 0.5)
    ell13, _ = solve_lp(small_lattice, slices[0], slices[2], 0.5)
    glued = glue(small_lattice, pi12, pi23)
    assert len(glued.triples) == 5
    assert glued.projected.mu.same_as(slices[0]) and glued.projected.nu.same_as(slices[2])
    assert glued.projected.value == approx(2.0**0.5)
    assert ell13 >= ell12 + ell23 - 1e-9


def test_glue_needs_matching_marginals(pairing):
    space, mu, nu = pairing
    _, pi12 = solve_lp(space, mu, nu, 0.5)
    other = make_coupling(space, [0], [2], [1.0], dirac(0), dirac(2), 0.5)
    with raises(DomainError, match="Second marginal"):
        glue(space, pi12, other)


def test_reverse_triangle_on_random_layers():
    rng = np.random.default_rng(11)
    for _ in range(30):
        layers = [np.column_stack([rng.uniform(t, t + 0.5, 4), rng.uniform(0.0, 1.0, 4)]) for t in (0.0, 1.5, 3.0)]
        space = flat_space(np.vstack(layers))
        mu, nu, rho = (from_weights(range(4 * k, 4 * k + 4), rng.uniform(0.1, 1.0, 4)) for k in range(3))
        p = float(rng.uniform(0.2, 1.0))
        ell12, pi12 = solve_lp(space, mu, nu, p)
        ell23, pi23 = solve_lp(space, nu, rho, p)
        ell13, _ = solve_lp(space, mu, rho, p)
        assert ell13 >= ell12 + ell23 - 1e-8 * ell13
        projected = glue(space, pi12, pi23).projected
        assert projected.causal
        assert projected.value ** (1.0 / p) <= ell13 * (1.0 + 1e-8)
