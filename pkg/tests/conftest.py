from __future__ import annotations

import numpy as np
from pytest import fixture

from lorentz_ot.causal_space import FiniteCausalSpace
from lorentz_ot.models import Box, Cone, MilneWedge, Minkowski, ModelSpacetime, leq_matrix, tau_matrix
from lorentz_ot.sampling import Lattice, SamplerConfig, discretize


def flat_space(coords, weight=None, labels=None) -> FiniteCausalSpace:
    """An explicit space on given chart points with the Minkowski relations"""
    coords = np.asarray(coords, dtype=float)
    model = ModelSpacetime(Minkowski(), coords.shape[1], Box(coords.min(axis=0), coords.max(axis=0)))
    leq = leq_matrix(model, coords, coords)
    tau = tau_matrix(model, coords, coords, leq)
    weight = np.ones(len(coords)) if weight is None else np.asarray(weight, dtype=float)
    return FiniteCausalSpace(coords, weight, leq, tau, labels)


def minkowski_lattice(lo, hi, spacing: float) -> FiniteCausalSpace:
    model = ModelSpacetime(Minkowski(), len(lo), Box(lo, hi))
    return discretize(model, SamplerConfig(Lattice(spacing)))


@fixture
def four_points() -> FiniteCausalSpace:
    """a=(0,0), b=(0,1), c=(3,0), d=(3,1)"""
    return flat_space([(0, 0), (0, 1), (3, 0), (3, 1)], labels=("a", "b", "c", "d"))


@fixture(scope="session")
def nine_points() -> FiniteCausalSpace:
    """The unit box at spacing 0.5"""
    return minkowski_lattice((0, 0), (1, 1), 0.5)


@fixture(scope="session")
def small_lattice() -> FiniteCausalSpace:
    return minkowski_lattice((0, 0), (2, 1), 0.25)


@fixture(scope="session")
def wedge_model() -> ModelSpacetime:
    return ModelSpacetime(MilneWedge(), 2, Cone((0.0, 0.0), 1.0, 0.5, "past", 0.1))


@fixture(scope="session")
def wedge_lattice(wedge_model) -> FiniteCausalSpace:
    return discretize(wedge_model, SamplerConfig(Lattice(0.05)))
