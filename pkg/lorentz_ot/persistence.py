"""
Versioned JSON documents for spaces, measures, couplings, rays and achronal sets,
CSV residual tables and content hashes.

Every document carries "schema": "<kind> v1"; reading another version raises
SchemaVersionError. Reals are written with repr precision, so they read back
exactly.
"""

from __future__ import annotations

import base64
import csv
import hashlib
import json
import logging
from pathlib import Path
from typing import Any, Iterable, Literal

import numpy as np
from typing_extensions import assert_never

from .causal_space import AchronalSet, FiniteCausalSpace, SpaceMeta, WeightedMeasure
from .disintegration import Ray, RayDecomposition
from .domains import DomainError, SchemaVersionError, from_json, to_json
from .models import (
    Box,
    Cone,
    ConstantCurvature,
    Diamond,
    MilneWedge,
    Minkowski,
    ModelSpacetime,
    Region,
    leq_matrix,
    tau_matrix,
)
from .transport import Coupling

logger = logging.getLogger(__name__)

SCHEMA_VERSION = "v1"

type DocumentKind = Literal["causal-space", "measure", "coupling", "rays", "achronal-set", "report"]
type Persistable = FiniteCausalSpace | WeightedMeasure | Coupling | RayDecomposition | AchronalSet


# Documents


def schema_tag(kind: DocumentKind) -> str:
    return f"{kind} {SCHEMA_VERSION}"


def canonical_json(body: Any) -> str:
    return json.dumps(body, sort_keys=True, separators=(",", ":"))


def input_hash(body: Any) -> str:
    """SHA-256 of the canonical serialization"""
    return hashlib.sha256(canonical_json(body).encode("utf-8")).hexdigest()


def write_document(path: str | Path, kind: DocumentKind, body: dict[str, Any]) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps({"schema": schema_tag(kind)} | body, sort_keys=True, indent=1) + "\n")
    logger.debug(f"[IO] wrote {kind} to {path}")
    return path


def check_schema(doc: dict[str, Any], kind: DocumentKind) -> dict[str, Any]:
    found = doc.get("schema") if isinstance(doc, dict) else None
    if found != schema_tag(kind):
        raise SchemaVersionError(str(found), schema_tag(kind))
    return doc


def read_document(path: str | Path, kind: DocumentKind) -> dict[str, Any]:
    return check_schema(json.loads(Path(path).read_text()), kind)


def _field(doc: dict[str, Any], key: str, kind: str) -> Any:
    try:
        return doc[key]
    except KeyError as e:
        raise DomainError(f"{kind} document lacks the field {key!r}") from e


# Models


def region_to_json(region: Region) -> dict[str, Any]:
    match region:
        case Box(lo=lo, hi=hi):
            return {"shape": "box", "lo": list(lo), "hi": list(hi)}
        case Diamond(bottom=bottom, top=top):
            return {"shape": "diamond", "bottom": list(bottom), "top": list(top)}
        case Cone(apex=apex, rho_max=rho_max, rapidity=rapidity, direction=direction, rho_min=rho_min):
            return {
                "shape": "cone",
                "apex": list(apex),
                "rho_max": rho_max,
                "rapidity": rapidity,
                "direction": direction,
                "rho_min": rho_min,
            }
        case _:
            assert_never(region)


def region_from_json(doc: dict[str, Any]) -> Region:
    match doc:
        case {"shape": "box", "lo": lo, "hi": hi}:
            return Box(tuple(lo), tuple(hi))
        case {"shape": "diamond", "bottom": bottom, "top": top}:
            return Diamond(tuple(bottom), tuple(top))
        case {"shape": "cone", "apex": apex, "rho_max": rho_max, "rapidity": rapidity, "direction": direction}:
            return Cone(tuple(apex), rho_max, rapidity, direction, doc.get("rho_min", 0.0))
        case _:
            raise DomainError(f"Unknown region document {doc!r}")


def model_to_json(model: ModelSpacetime) -> dict[str, Any]:
    match model.kind:
        case Minkowski():
            kind: dict[str, Any] = {"kind": "minkowski"}
        case ConstantCurvature(k_sec=k):
            kind = {"kind": "constant-curvature", "k_sec": k}
        case MilneWedge():
            kind = {"kind": "milne-wedge"}
        case _:
            assert_never(model.kind)
    return kind | {"dim": model.dim, "region": region_to_json(model.region), "nonbranching": model.nonbranching}


def model_from_json(doc: dict[str, Any]) -> ModelSpacetime:
    match doc.get("kind"):
        case "minkowski":
            kind: Any = Minkowski()
        case "constant-curvature":
            kind = ConstantCurvature(float(_field(doc, "k_sec", "model")))
        case "milne-wedge":
            kind = MilneWedge()
        case other:
            raise DomainError(f"Unknown model kind {other!r}")
    region = region_from_json(_field(doc, "region", "model"))
    return ModelSpacetime(kind, int(_field(doc, "dim", "model")), region, bool(doc.get("nonbranching", True)))


# Causal spaces


def pack_relation(leq: np.ndarray) -> str:
    return base64.b64encode(np.packbits(np.asarray(leq, dtype=bool), axis=None).tobytes()).decode("ascii")


def unpack_relation(text: str, n: int) -> np.ndarray:
    bits = np.unpackbits(np.frombuffer(base64.b64decode(text), dtype=np.uint8), count=n * n)
    return bits.astype(bool).reshape(n, n)


def space_to_json(space: FiniteCausalSpace, compact: bool = False) -> dict[str, Any]:
    """The document body of a space; compact drops leq and tau of model-tagged spaces"""
    meta = space.meta
    body: dict[str, Any] = {
        "n": space.n,
        "coords": space.coords.tolist(),
        "weight": space.weight.tolist(),
        "labels": None if space.labels is None else list(space.labels),
        "meta": {
            "model": None if meta.model is None else model_to_json(meta.model),
            "mode": meta.mode,
            "spacing": meta.spacing,
            "density": meta.density,
            "dim": meta.dim,
            "seed": meta.seed,
            "exact_tau": meta.exact_tau,
        },
    }
    if not (compact and meta.model is not None and meta.exact_tau):
        body["leq"] = pack_relation(space.leq)
        body["tau"] = space.tau.ravel().tolist()
    return body


def space_from_json(doc: dict[str, Any]) -> FiniteCausalSpace:
    n = int(_field(doc, "n", "causal-space"))
    coords = np.array(_field(doc, "coords", "causal-space"), dtype=float).reshape(n, -1)
    weight = np.array(_field(doc, "weight", "causal-space"), dtype=float)
    raw_meta = _field(doc, "meta", "causal-space")
    model = None if raw_meta.get("model") is None else model_from_json(raw_meta["model"])
    meta = SpaceMeta(
        model,
        raw_meta.get("mode", "explicit"),
        raw_meta.get("spacing"),
        raw_meta.get("density"),
        raw_meta.get("dim"),
        raw_meta.get("seed"),
        raw_meta.get("exact_tau", True),
    )
    if "leq" in doc and "tau" in doc:
        leq = unpack_relation(doc["leq"], n)
        tau = np.array(doc["tau"], dtype=float).reshape(n, n)
    elif model is not None:
        leq = leq_matrix(model, coords, coords)
        tau = tau_matrix(model, coords, coords, leq)
    else:
        raise DomainError("causal-space document without a model must carry leq and tau")
    labels = doc.get("labels")
    return FiniteCausalSpace(coords, weight, leq, tau, None if labels is None else tuple(labels), meta)


# Measures, couplings and achronal sets


def measure_to_json(mu: WeightedMeasure) -> dict[str, Any]:
    return {"support": list(mu.support), "mass": mu.mass.tolist()}


def measure_from_json(doc: dict[str, Any]) -> WeightedMeasure:
    return WeightedMeasure(
        tuple(int(i) for i in _field(doc, "support", "measure")), np.array(_field(doc, "mass", "measure"), dtype=float)
    )


def coupling_to_json(coupling: Coupling) -> dict[str, Any]:
    return {
        "src": coupling.src.tolist(),
        "dst": coupling.dst.tolist(),
        "mass": coupling.mass.tolist(),
        "mu": measure_to_json(coupling.mu),
        "nu": measure_to_json(coupling.nu),
        "p": coupling.p,
        "value": to_json(coupling.value),
    }


def coupling_from_json(doc: dict[str, Any]) -> Coupling:
    return Coupling(
        np.array(_field(doc, "src", "coupling"), dtype=int),
        np.array(_field(doc, "dst", "coupling"), dtype=int),
        np.array(_field(doc, "mass", "coupling"), dtype=float),
        measure_from_json(_field(doc, "mu", "coupling")),
        measure_from_json(_field(doc, "nu", "coupling")),
        float(_field(doc, "p", "coupling")),
        from_json(_field(doc, "value", "coupling")),
    )


def achronal_to_json(V: AchronalSet) -> dict[str, Any]:
    return {"members": list(V.members), "label": V.label}


def achronal_from_json(doc: dict[str, Any]) -> AchronalSet:
    return AchronalSet(tuple(int(i) for i in _field(doc, "members", "achronal-set")), doc.get("label", ""))


# Rays


def _ray_to_json(ray: Ray) -> dict[str, Any]:
    return {
        "alpha": ray.alpha,
        "points": list(ray.points),
        "t_values": ray.t_values.tolist(),
        "weights": ray.weights.tolist(),
        "cells": ray.cells.tolist(),
        "q_weight": ray.q_weight,
        "bin_edges": ray.bin_edges.tolist(),
        "h_samples": ray.h_samples.tolist(),
    }


def _ray_from_json(doc: dict[str, Any]) -> Ray:
    return Ray(
        int(doc["alpha"]),
        tuple(int(i) for i in doc["points"]),
        np.array(doc["t_values"], dtype=float),
        np.array(doc["weights"], dtype=float),
        np.array(doc["cells"], dtype=float).reshape(-1, 2),
        float(doc["q_weight"]),
        np.array(doc["bin_edges"], dtype=float),
        np.array(doc["h_samples"], dtype=float),
    )


def rays_to_json(decomposition: RayDecomposition) -> dict[str, Any]:
    return {
        "V": achronal_to_json(decomposition.V),
        "tau_V": decomposition.tau_V.tolist(),
        "rays": [_ray_to_json(ray) for ray in decomposition.rays],
        "endpoints_a": list(decomposition.endpoints_a),
        "endpoints_b": list(decomposition.endpoints_b),
        "unassigned": list(decomposition.unassigned),
        "total_mass": decomposition.total_mass,
        "spacing": decomposition.spacing,
        "splits": decomposition.splits,
    }


def rays_from_json(doc: dict[str, Any]) -> RayDecomposition:
    try:
        return RayDecomposition(
            achronal_from_json(doc["V"]),
            np.array(doc["tau_V"], dtype=float),
            [_ray_from_json(ray) for ray in doc["rays"]],
            tuple(int(i) for i in doc["endpoints_a"]),
            tuple(int(i) for i in doc["endpoints_b"]),
            tuple(int(i) for i in doc["unassigned"]),
            float(doc["total_mass"]),
            float(doc["spacing"]),
            int(doc.get("splits", 0)),
        )
    except KeyError as e:
        raise DomainError(f"rays document lacks the field {e.args[0]!r}") from e


# Typed writers and readers


def to_document(obj: Persistable) -> tuple[DocumentKind, dict[str, Any]]:
    match obj:
        case FiniteCausalSpace():
            return "causal-space", space_to_json(obj)
        case WeightedMeasure():
            return "measure", measure_to_json(obj)
        case Coupling():
            return "coupling", coupling_to_json(obj)
        case RayDecomposition():
            return "rays", rays_to_json(obj)
        case AchronalSet():
            return "achronal-set", achronal_to_json(obj)
        case _:
            raise DomainError(f"Cannot persist {type(obj).__name__}")


def from_document(kind: DocumentKind, doc: dict[str, Any]) -> Persistable:
    match kind:
        case "causal-space":
            return space_from_json(doc)
        case "measure":
            return measure_from_json(doc)
        case "coupling":
            return coupling_from_json(doc)
        case "rays":
            return rays_from_json(doc)
        case "achronal-set":
            return achronal_from_json(doc)
        case _:
            raise DomainError(f"No reader for {kind} documents")


def save(obj: Persistable, path: str | Path) -> Path:
    kind, body = to_document(obj)
    return write_document(path, kind, body)


def load(path: str | Path, kind: DocumentKind) -> Any:
    return from_document(kind, read_document(path, kind))


def read_space(path: str | Path) -> FiniteCausalSpace:
    return space_from_json(read_document(path, "causal-space"))


def read_measure(path: str | Path) -> WeightedMeasure:
    return measure_from_json(read_document(path, "measure"))


def io_roundtrip(obj: Persistable, path: str | Path) -> Persistable:
    """Write the object and read it back"""
    kind, _ = to_document(obj)
    return load(save(obj, path), kind)


# Residual tables


def write_residual_table(
    path: str | Path, columns: Iterable[str], rows: Iterable[Iterable[Any]], provenance: dict[str, str] | None = None
) -> Path:
    """CSV with `# key=value` provenance lines and a header row"""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", newline="", encoding="utf-8") as f:
        for key, value in (provenance or {}).items():
            f.write(f"# {key}={value}\n")
        writer = csv.writer(f)
        writer.writerow(list(columns))
        for row in rows:
            writer.writerow([repr(v) if isinstance(v, float) else v for v in row])
    logger.debug(f"[IO] wrote residual table {path}")
    return path


def read_residual_table(path: str | Path) -> tuple[list[str], list[list[str]]]:
    with Path(path).open(newline="", encoding="utf-8") as f:
        lines = [line for line in f if not line.startswith("#")]
    header, *rows = list(csv.reader(lines))
    return header, rows
