from __future__ import annotations

import math

import numpy as np
from hypothesis import given
from hypothesis import strategies as st
from pytest import approx, fixture, mark, raises

from lorentz_ot.domains import DomainError
from lorentz_ot.models import (
    AllPoints,
    Box,
    BoxSelector,
    Cone,
    ConeSelector,
    ConstantCurvature,
    Diamond,
    HyperboloidSelector,
    IndexSelector,
    MilneWedge,
    Minkowski,
    ModelSpacetime,
    PointSelector,
    SliceSelector,
    contains,
    geodesic_interpolate,
    model_radial_density,
    model_tau,
    nearest_point,
    radial_ratio_slope,
    region_volume,
    select_points,
    timelike_ricci,
)
from lorentz_ot.oracle import certify_closed_form, shooting_geodesic, shooting_tau


@fixture(scope="module")
def flat() -> ModelSpacetime:
    return ModelSpacetime(Minkowski(), 2, Box((0.0, 0.0), (3.0, 3.0)))


@fixture(scope="module")
def de_sitter() -> ModelSpacetime:
    return ModelSpacetime(ConstantCurvature(-1.0), 2, Box((-1.2, -0.5), (-0.4, 0.5)))


# Closed forms


def test_flat_time_separation(flat):
    assert model_tau(flat, (0, 0), (2, 1)) == approx(math.sqrt(3.0))
    assert model_tau(flat, (0, 0), (0, 1)) == 0.0
    assert model_tau(flat, (1, 0), (0, 0)) == 0.0


def test_points_outside_the_region_are_rejected(flat):
    with raises(DomainError, match="outside"):
        model_tau(flat, (0, 0), (5, 0))


def test_flat_geodesic_midpoint(flat):
    assert geodesic_interpolate(flat, (0, 0), (2, 0), 0.5) == approx(np.array([1.0, 0.0]))


def test_geodesic_needs_a_timelike_pair(flat):
    with raises(DomainError, match="not timelike"):
        geodesic_interpolate(flat, (0, 0), (1, 1), 0.5)


def test_zero_curvature_is_minkowski():
    model = ModelSpacetime(ConstantCurvature(0.0), 2, Box((0.0, 0.0), (1.0, 1.0)))
    assert model.kind == Minkowski()
    assert not model.curved


def test_de_sitter_time_separation(de_sitter):
    # conformal times -1 and -exp(-0.7) on a comoving worldline are proper time 0.7 apart
    assert model_tau(de_sitter, (-1.0, 0.0), (-math.exp(-0.7), 0.0)) == approx(0.7, rel=1e-12)


def test_de_sitter_closed_form_agrees_with_the_oracle(de_sitter):
    report = certify_closed_form(de_sitter)
    assert report.passed
    x, y = np.array([-1.1, -0.1]), np.array([-0.5, 0.1])
    assert shooting_tau(de_sitter, x, y) == approx(model_tau(de_sitter, x, y), abs=1e-5)
    assert shooting_geodesic(de_sitter, x, y, 0.3) == approx(geodesic_interpolate(de_sitter, x, y, 0.3), abs=1e-5)


def test_cones_are_flat_only():
    with raises(DomainError, match="flat"):
        ModelSpacetime(ConstantCurvature(-1.0), 2, Cone((-2.0, 0.0), 0.5, 0.3))


def test_de_sitter_chart_needs_negative_conformal_time():
    with raises(DomainError, match="eta < 0"):
        ModelSpacetime(ConstantCurvature(-1.0), 2, Box((-1.0, 0.0), (0.5, 1.0)))


# Regions


@mark.parametrize(
    "region",
    [
        Cone((0.0, 0.0), 1.0, 0.5, "past", 0.1),
        Cone((-3.0, 0.0), 1.0, 0.5, "future"),
        Box((-3.0, -0.5), (-2.0, 0.5)),
        Diamond((-3.0, 0.0), (-2.0, 0.0)),
    ],
)
def test_wedge_regions(region):
    assert ModelSpacetime(MilneWedge(), 2, region).region == region


@mark.parametrize(
    "region",
    [
        Cone((0.0, 0.0), 1.0, 0.5, "past", 0.0),
        Cone((0.0, 0.0), 1.0, 0.5, "future", 0.1),
        Box((-1.0, -2.0), (-0.5, 2.0)),
    ],
)
def test_wedge_rejects_regions_reaching_the_origin(region):
    with raises(DomainError, match="past cone"):
        ModelSpacetime(MilneWedge(), 2, region)


def test_region_dimension_must_match():
    with raises(DomainError, match="dimension"):
        ModelSpacetime(Minkowski(), 3, Box((0.0, 0.0), (1.0, 1.0)))


def test_cone_membership():
    cone = Cone((0.0, 0.0), 1.0, 0.5, "future")
    assert contains(cone, np.array([0.5, 0.0]))
    assert contains(cone, np.array([0.0, 0.0]))
    assert not contains(cone, np.array([1.5, 0.0]))
    assert not contains(cone, np.array([-0.5, 0.0]))
    assert not contains(cone, np.array([1.0, 0.9]))


@mark.parametrize(
    "region, volume",
    [
        (Box((0.0, 0.0), (2.0, 3.0)), 6.0),
        (Diamond((0.0, 0.0), (2.0, 0.0)), 2.0),
        (Cone((0.0, 0.0), 1.0, 0.5, "future"), 0.5),
    ],
)
def test_flat_region_volumes(region, volume):
    assert region_volume(ModelSpacetime(Minkowski(), 2, region)) == approx(volume, rel=1e-12)


# Radial densities


def test_radial_density_examples():
    flat3 = ModelSpacetime(Minkowski(), 3, Box((0.0, 0.0, 0.0), (1.0, 1.0, 1.0)))
    assert model_radial_density(flat3, 2.0) == approx(4.0)
    de_sitter = ModelSpacetime(ConstantCurvature(-1.0), 2, Box((-1.2, -0.5), (-0.4, 0.5)))
    assert model_radial_density(de_sitter, 1.0) == approx(math.sinh(1.0), rel=1e-12)


@mark.parametrize("dim", [2, 3, 4])
def test_flat_radial_ratio(dim):
    lo, hi = (0.0,) * dim, (1.0,) * dim
    model = ModelSpacetime(Minkowski(), dim, Box(lo, hi))
    ratio = model_radial_density(model, 0.3) / model_radial_density(model, 0.6)
    assert ratio == approx(2.0 ** (1 - dim))
    assert radial_ratio_slope(model) == 0.0


def test_radial_ratio_expansion_matches_ricci():
    model = ModelSpacetime(ConstantCurvature(-1.0), 2, Box((-1.2, -0.5), (-0.4, 0.5)))
    slope = radial_ratio_slope(model)
    for r in (0.01, 0.02, 0.04):
        ratio = model_radial_density(model, r) / model_radial_density(model, 2 * r)
        assert ratio == approx(0.5 * (1.0 + slope * r * r), abs=r**3)


def test_radial_ratio_slope_is_half_the_ricci_curvature():
    model = ModelSpacetime(ConstantCurvature(-1.0), 2, Box((-1.2, -0.5), (-0.4, 0.5)))
    r = np.linspace(0.01, 0.1, 10)
    ratio = np.array([model_radial_density(model, x) / model_radial_density(model, 2 * x) for x in r])
    fitted = np.polyfit(r * r, 2.0 * ratio - 1.0, 1)[0]
    assert fitted == approx(timelike_ricci(model) / 2.0, rel=0.05)
    assert radial_ratio_slope(model) == approx(-0.5)


# Selectors


def test_selectors(small_lattice):
    assert len(select_points(small_lattice, AllPoints())) == small_lattice.n
    assert len(select_points(small_lattice, SliceSelector(0, 0.0))) == 5
    assert len(select_points(small_lattice, BoxSelector((0.0, 0.0), (0.5, 1.0)))) == 15
    assert select_points(small_lattice, IndexSelector((4, 2, 4))) == (2, 4)
    point = select_points(small_lattice, PointSelector((1.0, 0.5)))
    assert small_lattice.coords[point[0]] == approx(np.array([1.0, 0.5]))


def test_selector_errors(small_lattice):
    with raises(DomainError, match="matches no points"):
        select_points(small_lattice, SliceSelector(0, 0.1))
    with raises(DomainError, match="outside"):
        select_points(small_lattice, IndexSelector((0, 10_000)))
    with raises(DomainError, match="axis"):
        select_points(small_lattice, SliceSelector(5, 0.0))


def test_cone_and_hyperboloid_selectors(wedge_lattice):
    rim = select_points(wedge_lattice, HyperboloidSelector(1.0))
    assert len(rim) == 21
    inner = select_points(wedge_lattice, ConeSelector(Cone((0.0, 0.0), 0.5, 0.5, "past", 0.1)))
    assert all(math.sqrt(y[0] ** 2 - y[1] ** 2) <= 0.5 + 1e-9 for y in wedge_lattice.coords[list(inner)])


def test_nearest_point_breaks_ties_by_index(nine_points):
    assert nearest_point(nine_points, (0.25, 0.0)) == 0


@given(st.floats(0.0, 3.0), st.floats(0.0, 3.0), st.floats(0.05, 0.95))
def test_flat_geodesic_splits_time_separation(t, x, s):
    flat = ModelSpacetime(Minkowski(), 2, Box((0.0, -5.0), (10.0, 5.0)))
    start, end = np.array([0.0, 0.0]), np.array([t + abs(x) + 0.1, x])
    z = geodesic_interpolate(flat, start, end, s)
    total = model_tau(flat, start, end)
    assert model_tau(flat, start, z) == approx(s * total, rel=1e-9)
    assert model_tau(flat, z, end) == approx((1.0 - s) * total, rel=1e-9)
