"""Distortion coefficients, entropy exponentials and the Hawking threshold.

All functions are pure. The coefficient sigma may return the tagged
``POS_INF`` when kappa * theta**2 >= pi**2; callers branch on it with ``match``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import integrate

from .domains import POS_INF, DomainError, ExtendedReal, Infinite, RegimeError

# Below this |kappa| theta^2 the trigonometric quotients are replaced by their Taylor expansion
TAYLOR_CUTOFF = 1e-8

# sinh(x) ~ exp(x)/2 beyond this argument
_SINH_LARGE = 20.0


@dataclass(frozen=True)
class DistortionParams:
    kappa: float
    t: float
    theta: float

    def __post_init__(self):
        _check_fraction(self.t)
        _check_theta(self.theta)


@dataclass(frozen=True)
class HawkingParams:
    H0: float
    K: float
    N: float


def _check_fraction(t: float) -> None:
    if not 0.0 <= t <= 1.0:
        raise DomainError(f"Interpolation fraction {t} outside [0, 1]")


def _check_theta(theta: float) -> None:
    if theta < 0 or math.isnan(theta):
        raise DomainError(f"Time separation {theta} must be non-negative")


def s_c_coeff(kappa: float, theta: float) -> tuple[float, float]:
    """The pair (s_kappa(theta), c_kappa(theta))"""
    _check_theta(theta)
    x = kappa * theta * theta
    if abs(x) < TAYLOR_CUTOFF:
        return theta * (1.0 - x / 6.0), 1.0 - x / 2.0
    if kappa > 0:
        root = math.sqrt(kappa)
        return math.sin(root * theta) / root, math.cos(root * theta)
    root = math.sqrt(-kappa)
    return math.sinh(root * theta) / root, math.cosh(root * theta)


def s_kappa(kappa: float, theta: np.ndarray | float) -> np.ndarray:
    """Vectorized s_kappa over an array of non-negative arguments"""
    theta = np.asarray(theta, dtype=float)
    x = kappa * theta * theta
    small = np.abs(x) < TAYLOR_CUTOFF
    out = np.empty_like(theta)
    out[small] = theta[small] * (1.0 - x[small] / 6.0)
    if kappa > 0:
        root = math.sqrt(kappa)
        out[~small] = np.sin(root * theta[~small]) / root
    elif kappa < 0:
        root = math.sqrt(-kappa)
        out[~small] = np.sinh(root * theta[~small]) / root
    return out


def sigma(kappa: float, t: float, theta: float) -> ExtendedReal:
    """sigma_kappa^(t)(theta) = s_kappa(t theta) / s_kappa(theta)"""
    _check_fraction(t)
    _check_theta(theta)
    x = kappa * theta * theta
    if x >= math.pi**2:
        return POS_INF
    if x == 0.0:
        return t
    if abs(x) < TAYLOR_CUTOFF:
        return t * (1.0 + x * (1.0 - t * t) / 6.0)
    if kappa > 0:
        a = math.sqrt(kappa) * theta
        return math.sin(t * a) / math.sin(a)
    a = math.sqrt(-kappa) * theta
    if a > _SINH_LARGE:
        if t == 0.0:
            return 0.0
        return math.exp(a * (t - 1.0)) * math.expm1(-2.0 * t * a) / math.expm1(-2.0 * a)
    return math.sinh(t * a) / math.sinh(a)


def tau_coeff(K: float, N: float, t: float, theta: float) -> ExtendedReal:
    """tau_{K,N}^(t)(theta) = t^(1/N) sigma_{K/(N-1)}^(t)(theta)^((N-1)/N)"""
    if N <= 1:
        raise DomainError(f"tau_coeff needs N > 1, got N={N}")
    match sigma(K / (N - 1.0), t, theta):
        case Infinite():
            return POS_INF
        case value:
            return t ** (1.0 / N) * value ** ((N - 1.0) / N)


def hawking_threshold(params: HawkingParams) -> float:
    """The sharp bound D_{H0,K,N} on the signed time separation"""
    H0, K, N = params.H0, params.K, params.N
    if N <= 1:
        raise RegimeError(f"Hawking threshold needs N > 1, got N={N}")
    if K > 0:
        y = -H0 / math.sqrt(K * (N - 1.0))
        # inverse cotangent on the branch (0, pi)
        return math.sqrt((N - 1.0) / K) * (math.pi / 2.0 - math.atan(y))
    if K == 0:
        if not H0 < 0:
            raise RegimeError(f"K = 0 requires H0 < 0, got H0={H0}")
        return -(N - 1.0) / H0
    bound = -math.sqrt(-K * (N - 1.0))
    if not H0 < bound:
        raise RegimeError(f"K < 0 requires H0 < -sqrt(-K(N-1)) = {bound}, got H0={H0}")
    y = -H0 / math.sqrt(-K * (N - 1.0))
    return math.sqrt(-(N - 1.0) / K) * math.atanh(1.0 / y)


def entropy_exp(ent: ExtendedReal, N: float) -> float:
    """U_N = exp(-Ent/N), zero for infinite entropy"""
    if N <= 0:
        raise DomainError(f"entropy_exp needs N > 0, got N={N}")
    match ent:
        case Infinite(sign=1):
            return 0.0
        case Infinite():
            raise DomainError("Entropy cannot be -inf")
        case value:
            return math.exp(-value / N)


def s_power_integral(kappa: float, exponent: float, r: float) -> float:
    """int_0^r s_kappa(t)^exponent dt"""
    if r < 0:
        raise DomainError(f"Radius {r} must be non-negative")
    if kappa > 0 and r > math.pi / math.sqrt(kappa):
        raise DomainError(f"Radius {r} beyond the first zero of s_kappa")
    if r == 0:
        return 0.0
    if kappa == 0:
        return r ** (exponent + 1.0) / (exponent + 1.0)
    value, _ = integrate.quad(
        lambda t: max(s_c_coeff(kappa, t)[0], 0.0) ** exponent, 0.0, r, epsabs=0.0, epsrel=1e-12, limit=200
    )
    return value


def mcp_ratio_bounds(K: float, N: float, a: float, b: float, t0: float, t1: float) -> tuple[float, float]:
    """Lower and upper MCP(K,N) bounds on h(t1)/h(t0) over the window a < t0 < t1 < b"""
    if not a < t0 < t1 < b:
        raise DomainError(f"Window needs a < t0 < t1 < b, got {(a, t0, t1, b)}")
    if N <= 1:
        raise DomainError(f"MCP ratio bounds need N > 1, got N={N}")
    kappa = K / (N - 1.0)
    if kappa > 0 and b - a >= math.pi / math.sqrt(kappa):
        raise DomainError(f"Window length {b - a} beyond pi sqrt((N-1)/K)")
    e = N - 1.0
    lower = (s_c_coeff(kappa, b - t1)[0] / s_c_coeff(kappa, b - t0)[0]) ** e
    upper = (s_c_coeff(kappa, t1 - a)[0] / s_c_coeff(kappa, t0 - a)[0]) ** e
    return lower, upper
