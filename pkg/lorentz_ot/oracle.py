"""
Geodesic-shooting oracle for the constant-curvature models.

Solves the geodesic boundary-value problem of the conformally flat chart
metric Omega^2 eta directly, independent of the embedding formulas, and
compares the two. The closed forms are only trusted after this comparison.
"""

from __future__ import annotations

import functools
import logging
from dataclasses import dataclass

import numpy as np
from scipy import integrate

from .domains import DomainError
from .models import ConstantCurvature, ModelSpacetime, _curved_geodesic, _curved_tau, leq_matrix, sample_region

logger = logging.getLogger(__name__)

GATE_TOLERANCE = 1e-6
GATE_PAIRS = 4
_QUADRATURE_POINTS = 2001


@dataclass(frozen=True)
class OracleReport:
    passed: bool
    pairs: int
    max_tau_error: float
    max_point_error: float


def _log_gradient(model: ModelSpacetime, y: np.ndarray) -> np.ndarray:
    """Gradient of log Omega, evaluated column-wise on a (dim, m) array"""
    omega = np.zeros_like(y)
    if model.k_sec < 0:
        omega[0] = -1.0 / y[0]
    else:
        omega[-1] = -1.0 / y[-1]
    return omega


def _conformal(model: ModelSpacetime, y: np.ndarray) -> np.ndarray:
    R = model.kind.radius  # type: ignore[union-attr]
    return R / (-y[0]) if model.k_sec < 0 else R / y[-1]


def _eta(u: np.ndarray, v: np.ndarray) -> np.ndarray:
    return -u[0] * v[0] + np.sum(u[1:] * v[1:], axis=0)


def _solve(model: ModelSpacetime, x: np.ndarray, y: np.ndarray):
    if not isinstance(model.kind, ConstantCurvature):
        raise DomainError(f"The shooting oracle is only needed for curved models, got {model.kind}")
    n = model.dim

    def rhs(s, state):
        pos, vel = state[:n], state[n:]
        omega = _log_gradient(model, pos)
        raised = omega.copy()
        raised[0] = -raised[0]
        acc = -2.0 * _eta_lower(omega, vel) * vel + _eta(vel, vel) * raised
        return np.vstack([vel, acc])

    def bc(ya, yb):
        return np.concatenate([ya[:n] - x, yb[:n] - y])

    mesh = np.linspace(0.0, 1.0, 41)
    guess = np.vstack([x[:, None] + (y - x)[:, None] * mesh, np.repeat((y - x)[:, None], mesh.size, axis=1)])
    sol = integrate.solve_bvp(rhs, bc, mesh, guess, tol=1e-10, max_nodes=200000)
    if not sol.success:
        raise DomainError(f"Geodesic shooting from {tuple(x)} to {tuple(y)} failed: {sol.message}")
    return sol


def _eta_lower(omega: np.ndarray, vel: np.ndarray) -> np.ndarray:
    """Contraction omega_a v^a"""
    return np.sum(omega * vel, axis=0)


def shooting_tau(model: ModelSpacetime, x: np.ndarray, y: np.ndarray) -> float:
    sol = _solve(model, np.asarray(x, dtype=float), np.asarray(y, dtype=float))
    s = np.linspace(0.0, 1.0, _QUADRATURE_POINTS)
    state = sol.sol(s)
    pos, vel = state[: model.dim], state[model.dim :]
    speed = _conformal(model, pos) * np.sqrt(np.maximum(-_eta(vel, vel), 0.0))
    return float(integrate.simpson(speed, x=s))


def shooting_geodesic(model: ModelSpacetime, x: np.ndarray, y: np.ndarray, t: float) -> np.ndarray:
    sol = _solve(model, np.asarray(x, dtype=float), np.asarray(y, dtype=float))
    return sol.sol(t)[: model.dim]


@functools.cache
def certify_closed_form(model: ModelSpacetime) -> OracleReport:
    """Compare the embedding formulas with the shooting oracle on sampled timelike pairs"""
    k, R = model.k_sec, model.kind.radius  # type: ignore[union-attr]
    points = sample_region(model, 24, "oracle")
    leq = leq_matrix(model, points, points)
    pairs = [(i, j) for i, j in np.argwhere(leq) if i != j and _curved_tau(k, R, points[i], points[j]) > 1e-3]
    pairs = pairs[:GATE_PAIRS]
    tau_error, point_error = 0.0, 0.0
    for i, j in pairs:
        x, y = points[i], points[j]
        closed = _curved_tau(k, R, x, y)
        tau_error = max(tau_error, abs(shooting_tau(model, x, y) - closed) / closed)
        for t in (0.3, 0.5):
            gap = np.abs(shooting_geodesic(model, x, y, t) - _curved_geodesic(k, R, x, y, t))
            point_error = max(point_error, float(np.max(gap / (1.0 + np.abs(_curved_geodesic(k, R, x, y, t))))))
    passed = bool(pairs) and tau_error <= GATE_TOLERANCE and point_error <= GATE_TOLERANCE
    logger.info(
        f"[ORACLE] {model.kind} dim={model.dim}: {len(pairs)} pairs, "
        f"tau error {tau_error:.2e}, point error {point_error:.2e}: {'trusted' if passed else 'REJECTED'}"
    )
    return OracleReport(passed, len(pairs), tau_error, point_error)
