from __future__ import annotations

import json

import numpy as np
from pytest import approx, raises

from lorentz_ot.causal_space import achronal_set, dirac, uniform
from lorentz_ot.disintegration import extract_rays, transport_relation
from lorentz_ot.domains import NEG_INF, DomainError, SchemaVersionError
from lorentz_ot.models import time_slice
from lorentz_ot.persistence import (
    input_hash,
    io_roundtrip,
    load,
    model_to_json,
    read_residual_table,
    read_space,
    save,
    space_from_json,
    space_to_json,
    write_residual_table,
)
from lorentz_ot.transport import make_coupling, solve_lp


def test_space_document(tmp_path, four_points):
    back = io_roundtrip(four_points, tmp_path / "space.json")
    assert np.array_equal(back.coords, four_points.coords)
    assert np.array_equal(back.leq, four_points.leq)
    assert np.array_equal(back.tau, four_points.tau)
    assert back.labels == ("a", "b", "c", "d")
    assert json.loads((tmp_path / "space.json").read_text())["schema"] == "causal-space v1"


def test_compact_documents_rebuild_the_relations(nine_points):
    body = space_to_json(nine_points, compact=True)
    assert "leq" not in body and "tau" not in body
    back = space_from_json(body)
    assert np.array_equal(back.leq, nine_points.leq)
    assert back.tau == approx(nine_points.tau)
    assert model_to_json(back.meta.model) == model_to_json(nine_points.meta.model)
    assert back.meta.spacing == 0.5


def test_explicit_documents_need_relations(four_points):
    body = space_to_json(four_points, compact=True)
    assert "leq" in body
    del body["leq"]
    with raises(DomainError, match="leq and tau"):
        space_from_json(body)


def test_other_schema_versions_are_rejected(tmp_path, four_points):
    path = save(four_points, tmp_path / "space.json")
    doc = json.loads(path.read_text())
    doc["schema"] = "causal-space v0"
    path.write_text(json.dumps(doc))
    with raises(SchemaVersionError) as err:
        read_space(path)
    assert err.value.found == "causal-space v0"
    with raises(SchemaVersionError):
        load(save(uniform([0, 1]), tmp_path / "mu.json"), "coupling")


def test_coupling_document(tmp_path, four_points):
    _, plan = solve_lp(four_points, uniform([0, 1]), uniform([2, 3]), 0.5)
    back = io_roundtrip(plan, tmp_path / "plan.json")
    assert back.pairs == plan.pairs
    assert back.value == approx(plan.value)
    doc = json.loads((tmp_path / "plan.json").read_text())
    assert doc["p"] == 0.5


def test_noncausal_values_are_tagged(tmp_path, four_points):
    plan = make_coupling(four_points, [0], [1], [1.0], dirac(0), dirac(1), 0.5)
    back = io_roundtrip(plan, tmp_path / "plan.json")
    assert back.value == NEG_INF
    assert json.loads((tmp_path / "plan.json").read_text())["value"] == "-inf"


def test_ray_document(tmp_path, small_lattice):
    V = time_slice(small_lattice, 0.0)
    rays = extract_rays(small_lattice, transport_relation(small_lattice, V))
    back = io_roundtrip(rays, tmp_path / "rays.json")
    assert back.V == V
    assert len(back.rays) == 5
    assert back.rays[3].h_samples == approx(rays.rays[3].h_samples)
    assert back.rays[3].cells.shape == (9, 2)
    assert back.total_mass == approx(rays.total_mass)


def test_achronal_document(tmp_path, nine_points):
    V = achronal_set(nine_points, [0, 1, 2], "bottom")
    assert io_roundtrip(V, tmp_path / "V.json") == V


def test_residual_table(tmp_path):
    path = write_residual_table(
        tmp_path / "table.csv", ("t", "residual"), [(0.1, 1 / 3), (0.2, -0.5)], {"operation": "tcd_certify"}
    )
    assert path.read_text().startswith("# operation=tcd_certify\n")
    header, rows = read_residual_table(path)
    assert header == ["t", "residual"]
    assert float(rows[0][1]) == 1 / 3


def test_input_hash_ignores_key_order():
    assert input_hash({"a": 1, "b": [1.5, 2]}) == input_hash({"b": [1.5, 2], "a": 1})
    assert input_hash({"a": 1}) != input_hash({"a": 2})
    assert len(input_hash({})) == 64
