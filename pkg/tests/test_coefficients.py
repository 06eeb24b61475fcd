from __future__ import annotations

import math

import mpmath
import numpy as np
from hypothesis import given, settings
from hypothesis import strategies as st
from pytest import approx, mark, raises

from lorentz_ot.coefficients import (
    HawkingParams,
    DistortionParams,
    entropy_exp,
    hawking_threshold,
    mcp_ratio_bounds,
    s_c_coeff,
    s_kappa,
    s_power_integral,
    sigma,
    tau_coeff,
)
from lorentz_ot.domains import NEG_INF, POS_INF, DomainError, RegimeError

mpmath.mp.dps = 50


def reference_s_c(kappa: float, theta: float) -> tuple[mpmath.mpf, mpmath.mpf]:
    k, th = mpmath.mpf(kappa), mpmath.mpf(theta)
    if k > 0:
        root = mpmath.sqrt(k)
        return mpmath.sin(root * th) / root, mpmath.cos(root * th)
    if k < 0:
        root = mpmath.sqrt(-k)
        return mpmath.sinh(root * th) / root, mpmath.cosh(root * th)
    return th, mpmath.mpf(1)


def reference_sigma(kappa: float, t: float, theta: float) -> mpmath.mpf:
    if theta == 0:
        return mpmath.mpf(t)
    return reference_s_c(kappa, t * theta)[0] / reference_s_c(kappa, theta)[0]


def random_triples(count: int, seed: int = 0):
    """(kappa, t, theta) with kappa theta^2 <= 0.9 pi^2, mixing in tiny kappa"""
    rng = np.random.default_rng(seed)
    for k in range(count):
        theta = float(rng.uniform(0.01, 3.0))
        if k % 5 == 0:
            kappa = float(rng.choice([-1.0, 1.0]) * 10.0 ** rng.uniform(-14, -6))
        else:
            kappa = float(rng.uniform(-5.0, 5.0))
        kappa = min(kappa, 0.9 * math.pi**2 / theta**2)
        yield kappa, float(rng.uniform(0.0, 1.0)), theta


# Closed forms


@mark.parametrize(
    "kappa, theta, s, c",
    [
        (0.0, 2.0, 2.0, 1.0),
        (1.0, math.pi / 2, 1.0, 0.0),
        (-1.0, 1.0, 1.1752011936438014, 1.5430806348152437),
    ],
)
def test_s_c_closed_forms(kappa, theta, s, c):
    got_s, got_c = s_c_coeff(kappa, theta)
    assert got_s == approx(s, rel=1e-12)
    assert got_c == approx(c, rel=1e-12, abs=1e-15)


@mark.parametrize(
    "kappa, t, theta, expected",
    [
        (1.0, 0.5, math.pi / 2, math.sqrt(2) / 2),
        (-1.0, 0.5, 2.0, math.sinh(1.0) / math.sinh(2.0)),
        (3.0, 0.3, 0.0, 0.3),
        (-2.0, 0.7, 0.0, 0.7),
    ],
)
def test_sigma_values(kappa, t, theta, expected):
    assert sigma(kappa, t, theta) == approx(expected, rel=1e-12)


def test_sigma_reference_value():
    assert sigma(-1.0, 0.5, 2.0) == approx(0.324027, abs=1e-6)


@mark.parametrize(
    "K, N, t, theta, expected",
    [
        (0.0, 2.0, 0.25, 1.0, 0.25),
        (-1.0, 2.0, 0.5, 2.0, math.sqrt(0.5 * math.sinh(1.0) / math.sinh(2.0))),
        (1.0, 3.0, 1.0, 1.2, 1.0),
        (-4.0, 4.0, 1.0, 2.5, 1.0),
    ],
)
def test_tau_coeff_values(K, N, t, theta, expected):
    assert tau_coeff(K, N, t, theta) == approx(expected, rel=1e-12)


def test_tau_coeff_reference_value():
    assert tau_coeff(-1.0, 2.0, 0.5, 2.0) == approx(0.402510, abs=1e-6)


@mark.parametrize(
    "H0, K, N, expected",
    [
        (-2.0, 0.0, 3.0, 1.0),
        (0.0, 4.0, 2.0, math.pi / 4),
        (-2.0, -1.0, 2.0, 0.5 * math.log(3.0)),
        (-1.0, 0.0, 2.0, 1.0),
    ],
)
def test_hawking_threshold_values(H0, K, N, expected):
    assert hawking_threshold(HawkingParams(H0, K, N)) == approx(expected, rel=1e-12)


@mark.parametrize("ent, N, expected", [(0.0, 5.0, 1.0), (-math.log(4.0), 2.0, 2.0), (POS_INF, 3.0, 0.0)])
def test_entropy_exp_values(ent, N, expected):
    assert entropy_exp(ent, N) == approx(expected, rel=1e-14)


# Errors and regimes


def test_sigma_beyond_first_conjugate_point_is_infinite():
    assert sigma(1.0, 0.5, 3.2) is POS_INF
    assert sigma(4.0, 0.2, 2.0) is POS_INF
    assert tau_coeff(2.0, 3.0, 0.5, 3.3) is POS_INF


@mark.parametrize("t", [-0.1, 1.5])
def test_sigma_rejects_fractions_outside_unit_interval(t):
    with raises(DomainError, match="fraction"):
        sigma(0.0, t, 1.0)


def test_negative_theta_is_rejected():
    with raises(DomainError, match="non-negative"):
        s_c_coeff(1.0, -0.5)
    with raises(DomainError):
        DistortionParams(0.0, 0.5, -1.0)


@mark.parametrize("N", [1.0, 0.5])
def test_tau_coeff_needs_N_above_one(N):
    with raises(DomainError, match="N > 1"):
        tau_coeff(0.0, N, 0.5, 1.0)


@mark.parametrize(
    "H0, K, N, match",
    [
        (0.0, 0.0, 2.0, "K = 0 requires H0 < 0"),
        (1.0, 0.0, 3.0, "K = 0 requires H0 < 0"),
        (-1.0, -1.0, 2.0, "K < 0 requires"),
        (-0.5, -1.0, 2.0, "K < 0 requires"),
        (-1.0, 1.0, 1.0, "N > 1"),
    ],
)
def test_hawking_threshold_regimes(H0, K, N, match):
    with raises(RegimeError, match=match):
        hawking_threshold(HawkingParams(H0, K, N))


def test_entropy_exp_rejects_minus_infinity():
    with raises(DomainError):
        entropy_exp(NEG_INF, 2.0)


# Oracle


@mark.parametrize("seed", [0, 1])
def test_coefficients_against_fifty_digit_reference(seed):
    for kappa, t, theta in random_triples(5000, seed):
        s, c = s_c_coeff(kappa, theta)
        ref_s, ref_c = reference_s_c(kappa, theta)
        assert s == approx(float(ref_s), rel=1e-12)
        assert c == approx(float(ref_c), rel=1e-12, abs=1e-12)
        assert sigma(kappa, t, theta) == approx(float(reference_sigma(kappa, t, theta)), rel=1e-12, abs=1e-300)


def test_tau_coeff_against_fifty_digit_reference():
    rng = np.random.default_rng(7)
    for _ in range(500):
        N = float(rng.uniform(1.5, 6.0))
        theta = float(rng.uniform(0.05, 2.5))
        K = float(rng.uniform(-4.0, 0.8 * math.pi**2 * (N - 1.0) / theta**2))
        t = float(rng.uniform(0.0, 1.0))
        ref = mpmath.mpf(t) ** (1 / mpmath.mpf(N)) * reference_sigma(K / (N - 1.0), t, theta) ** (
            (mpmath.mpf(N) - 1) / N
        )
        assert tau_coeff(K, N, t, theta) == approx(float(ref), rel=1e-12, abs=1e-300)


def test_large_negative_curvature_uses_the_stable_form():
    ref = reference_sigma(-400.0, 0.3, 2.0)
    assert sigma(-400.0, 0.3, 2.0) == approx(float(ref), rel=1e-12)
    assert sigma(-400.0, 0.0, 2.0) == 0.0


@mark.parametrize("kappa", [-1.0, -0.3, 0.5, 1.0])
def test_midpoint_expansion_has_small_fourth_order_constant(kappa):
    r = np.linspace(1e-3, 0.1, 60)
    remainder = np.array([abs(sigma(kappa, 0.5, 2.0 * x) - 0.5 * (1.0 + kappa * x * x / 2.0)) for x in r])
    assert np.max(remainder / r**4) < 1.0


def test_vectorized_s_kappa_matches_scalar():
    theta = np.array([0.0, 1e-6, 0.3, 1.7])
    for kappa in (-2.0, 0.0, 1e-12, 0.8):
        assert s_kappa(kappa, theta) == approx(np.array([s_c_coeff(kappa, x)[0] for x in theta]), rel=1e-14)


# Properties


@settings(max_examples=200)
@given(
    st.floats(-3.0, 3.0),
    st.just(0.0) | st.floats(0.001, 1.0),
    st.floats(0.01, 1.5),
    st.floats(0.01, 1.0),
)
def test_sigma_is_monotone_in_kappa(kappa, t, theta, step):
    lower = sigma(kappa, t, theta)
    upper = sigma(kappa + step, t, theta)
    assert upper >= lower * (1.0 - 1e-12)


@given(st.floats(-5.0, 5.0), st.floats(0.0, 1.0))
def test_sigma_endpoints(kappa, theta):
    assert sigma(kappa, 0.0, theta) == 0.0
    assert sigma(kappa, 1.0, theta) == approx(1.0, rel=1e-14)


@given(st.floats(-5.0, 5.0), st.floats(0.0, 1.0), st.floats(0.01, 1.0))
def test_sigma_is_nondecreasing_in_t(kappa, t, theta):
    later = min(1.0, t + 0.1)
    assert sigma(kappa, later, theta) >= sigma(kappa, t, theta) - 1e-15


@given(st.floats(-3.0, -0.01), st.floats(1.5, 5.0))
def test_hawking_threshold_decreases_away_from_the_admissible_boundary(K, N):
    bound = -math.sqrt(-K * (N - 1.0))
    near = hawking_threshold(HawkingParams(bound * 1.01, K, N))
    far = hawking_threshold(HawkingParams(bound * 2.0, K, N))
    assert near > far > 0


@given(st.floats(1.5, 5.0))
def test_flat_hawking_threshold_blows_up_as_H0_vanishes(N):
    assert hawking_threshold(HawkingParams(-1e-9, 0.0, N)) > 1e8


# Profiles


def test_s_power_integral_flat_closed_form():
    assert s_power_integral(0.0, 2.0, 1.5) == approx(1.5**3 / 3.0, rel=1e-14)
    assert s_power_integral(0.0, 1.0, 0.0) == 0.0


def test_s_power_integral_against_quadrature_reference():
    expected = mpmath.quad(lambda t: mpmath.sinh(t) ** 2, [0, 1])
    assert s_power_integral(-1.0, 2.0, 1.0) == approx(float(expected), rel=1e-10)


def test_s_power_integral_rejects_radii_beyond_first_zero():
    with raises(DomainError):
        s_power_integral(1.0, 1.0, 4.0)


def test_flat_mcp_ratio_bounds():
    lower, upper = mcp_ratio_bounds(0.0, 2.0, 0.0, 1.0, 0.25, 0.5)
    assert lower == approx(0.5 / 0.75, rel=1e-14)
    assert upper == approx(2.0, rel=1e-14)


def test_mcp_ratio_bounds_need_an_ordered_window():
    with raises(DomainError, match="Window"):
        mcp_ratio_bounds(0.0, 2.0, 0.0, 1.0, 0.5, 0.25)
