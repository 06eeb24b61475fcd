from __future__ import annotations

import dataclasses

import numpy as np
from pytest import approx, fixture, mark, raises

from lorentz_ot.disintegration import (
    conical_bishop_gromov,
    extract_rays,
    hawking_certify,
    level_measures,
    make_ray,
    mcp_density_test,
    mean_curvature_estimate,
    ray_translation_coupling,
    transport_relation,
)
from lorentz_ot.domains import CodimensionError, DomainError, RegimeError
from lorentz_ot.models import hyperboloid, time_slice


@fixture(scope="module")
def bottom(small_lattice):
    return time_slice(small_lattice, 0.0)


@fixture(scope="module")
def columns(small_lattice, bottom):
    """Five vertical rays of nine points over the slice t = 0"""
    return extract_rays(small_lattice, transport_relation(small_lattice, bottom))


@fixture(scope="module")
def rim(wedge_lattice):
    return hyperboloid(wedge_lattice, 1.0)


@fixture(scope="module")
def converging(wedge_lattice, rim):
    """Radial rays from the hyperboloid rho = 1 toward the apex of the wedge"""
    return extract_rays(wedge_lattice, transport_relation(wedge_lattice, rim))


# Transport relation


def test_relation_of_a_time_slice(small_lattice, bottom):
    relation = transport_relation(small_lattice, bottom)
    assert relation.eps == approx(1.5)
    assert relation.tau_V == approx(small_lattice.coords[:, 0])
    assert len(relation.transport_set()) == small_lattice.n
    gamma = relation.pairs()
    assert (0, 5) in gamma and (5, 0) not in gamma
    assert (5, 0) in relation.symmetric()


# Rays


def test_columns_are_the_rays(small_lattice, columns):
    assert len(columns.rays) == 5
    assert columns.splits == 0
    assert columns.unassigned == ()
    assert columns.rays[0].points == tuple(range(0, 45, 5))
    assert columns.endpoints_a == (0, 1, 2, 3, 4)
    assert columns.endpoints_b == (40, 41, 42, 43, 44)
    assert columns.total_mass == approx(small_lattice.total_mass())
    assert columns.mass_defect == approx(0.0, abs=1e-12)


def test_column_densities_are_constant(columns):
    ray = columns.rays[2]
    assert ray.q_weight == approx(0.2)
    assert ray.length == approx(2.0)
    assert ray.bin_edges == approx(np.array([-0.125, 0.375, 0.875, 1.375, 2.125]))
    assert ray.h_samples == approx(np.full(4, 1.25))
    assert ray.h_at(1.0) == approx(1.25)
    assert ray.h_at(3.0) == 0.0
    assert ray.g_at(0.6) == approx(1.25)
    assert columns.short_rays == []


def test_wedge_rays_are_radial(wedge_lattice, converging):
    assert len(converging.rays) == 21
    assert converging.splits == 0
    assert converging.tau_V.max() == approx(0.9)
    for ray in converging.rays:
        rho = np.sqrt(wedge_lattice.coords[list(ray.points), 0] ** 2 - wedge_lattice.coords[list(ray.points), 1] ** 2)
        assert ray.t_values == approx(1.0 - rho)
        assert len(ray.points) == 19


def test_short_rays_are_reported():
    ray = make_ray(0, [0, 1], [0.0, 0.1], [0.05, 0.05], 1.0, 0.1)
    assert len(ray.h_samples) < 3
    report = mcp_density_test([ray], 0.0, 2.0)
    assert report.skipped == 1
    assert report.skipped_mass == approx(0.1)
    assert report.residuals == []


def test_translation_along_rays(small_lattice, columns):
    plan = ray_translation_coupling(small_lattice, columns, 0.5, 0.5)
    assert len(plan.pairs) == 35
    assert plan.value == approx(0.5)
    assert all(small_lattice.tau[i, j] == approx(0.5) for i, j, _ in plan.pairs)
    with raises(DomainError, match="No ray carries"):
        ray_translation_coupling(small_lattice, columns, 3.0, 0.5)


# Conditional densities


def test_constant_density_is_flat(columns):
    assert mcp_density_test(columns, 0.0, 2.0).verdict == "PASS"
    assert mcp_density_test(columns, 0.0, 1.0).verdict == "PASS"


def test_constant_density_fails_positive_curvature(columns):
    report = mcp_density_test(columns, 1.0, 2.0, tol=1e-6)
    assert report.verdict == "FAIL"
    assert report.witness.residual < 0


def test_rays_longer_than_the_diameter_bound_fail(columns):
    report = mcp_density_test(columns, 4.0, 2.0)
    assert report.verdict == "FAIL"
    assert report.witness.residual == -np.inf


def test_converging_density_is_flat(converging):
    assert mcp_density_test(converging, 0.0, 2.0).verdict == "PASS"


def test_density_test_needs_N_at_least_one(columns):
    with raises(DomainError, match="at least 1"):
        mcp_density_test(columns, 0.0, 0.5)


def test_level_measures_and_coarea(columns):
    levels = level_measures(columns, [0.5, 1.0, 1.5])
    assert levels.H == approx(np.full(3, 1.25))
    assert len(levels.slabs) == 8
    assert levels.coarea_residual == approx(0.0, abs=1e-12)
    (slab,) = level_measures(columns, [1.0], test_sets=[(0.5, 1.0)]).slabs
    assert slab.mass == approx(15 * 0.0625)
    assert slab.integral == approx(slab.mass)


@mark.parametrize("test_set", [(0.0, 0.9), (0.3, 0.6, 0, 10), (0.05, 0.35, 10, 21), (0.4, 0.5, 3, 4)])
def test_wedge_coarea_on_partial_sets(converging, test_set):
    (check,) = level_measures(converging, [0.5], test_sets=[test_set]).slabs
    assert check.mass > 0
    assert check.residual <= 1e-3


def test_wedge_default_coarea_sets(converging):
    levels = level_measures(converging, [0.0, 0.5])
    assert {(s.ray_lo, s.ray_hi) for s in levels.slabs} == {(0, 10), (10, 21)}
    assert levels.coarea_residual <= 1e-3


def test_coarea_detects_uneven_mass(columns):
    ray = make_ray(0, range(5), [0.0, 0.25, 0.5, 0.75, 1.0], np.array([1, 1, 4, 1, 1]) / 8, 1.0, 0.25)
    lumpy = dataclasses.replace(columns, rays=[ray])
    (check,) = level_measures(lumpy, [0.5], test_sets=[(0.5, 0.5)]).slabs
    assert check.mass == approx(0.5)
    assert check.integral == approx(0.2)
    assert check.residual == approx(0.6)


def test_malformed_coarea_set(columns):
    with raises(DomainError, match="coarea test set"):
        level_measures(columns, [0.5], test_sets=[(0.5,)])


# Mean curvature


def test_flat_slice_has_no_mean_curvature(small_lattice, bottom, columns):
    phi = {v: 1.0 for v in bottom.members}
    estimate = mean_curvature_estimate(small_lattice, columns, phi, 1.0)
    assert estimate.H0_sample == approx(0.0, abs=1e-9)
    assert estimate.residual == approx(0.0, abs=1e-9)


def test_hyperboloid_mean_curvature(wedge_lattice, rim, converging):
    phi = {v: 1.0 for v in rim.members}
    estimate = mean_curvature_estimate(wedge_lattice, converging, phi, 0.5)
    assert estimate.H0_sample == approx(-1.0, rel=1e-6)
    assert estimate.fit_window == (0.0, 0.5)


def test_mean_curvature_input_checks(small_lattice, bottom, columns):
    with raises(DomainError, match="non-negative"):
        mean_curvature_estimate(small_lattice, columns, {0: -1.0}, 1.0)
    with raises(DomainError, match="outside V"):
        mean_curvature_estimate(small_lattice, columns, {44: 1.0}, 1.0)
    with raises(CodimensionError, match="no ray"):
        mean_curvature_estimate(small_lattice, columns, {v: 0.0 for v in bottom.members}, 1.0)


# Hawking


def test_wedge_meets_the_hawking_bound(wedge_lattice, converging):
    report = hawking_certify(wedge_lattice, converging, -1.0, 0.0, 2.0)
    assert report.passed
    assert report.D == approx(1.0)
    assert report.sup_tau_V == approx(0.9)
    assert report.regime == "K=0"


def test_tall_box_breaks_the_hawking_bound(small_lattice, columns):
    report = hawking_certify(small_lattice, columns, -1.0, 0.0, 2.0)
    assert not report.passed
    assert columns.tau_V[report.witness] == approx(2.0)


@mark.parametrize("H0, K, N", [(0.0, 0.0, 2.0), (-0.5, -1.0, 2.0), (0.0, 0.0, 1.0)])
def test_hawking_regimes(small_lattice, columns, H0, K, N):
    with raises(RegimeError):
        hawking_certify(small_lattice, columns, H0, K, N)


def test_hawking_with_N_one_needs_an_empty_future(small_lattice, columns):
    report = hawking_certify(small_lattice, columns, -1.0, 0.0, 1.0)
    assert report.regime == "N=1"
    assert not report.passed


# Bishop-Gromov over an achronal set


def test_conical_profile_of_the_columns(columns):
    report = conical_bishop_gromov(columns, [0.5, 1.0, 1.5], 0.0, 2.0)
    assert report.verdict == "PASS"
    assert len(report.level_rows) == 3
    assert report.volume_rows[0].ratio == approx(0.6)


def test_conical_profile_needs_N_above_one(columns):
    with raises(DomainError, match="N > 1"):
        conical_bishop_gromov(columns, [0.5, 1.0], 0.0, 1.0)
