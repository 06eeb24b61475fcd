"""
Experiment files, region specs and point selectors.

An experiment file is flat `key = value` text split into [model], [sampler],
[input], [task] and [output] sections, with `#` comments:

    [model]
    kind = minkowski
    dim = 2
    region = box:0,0:1,1

    [sampler]
    mode = lattice
    spacing = 0.5

    [input]
    mu = slice:0:0
    x1 = point:1,0

    [task]
    name = certify-tmcp
    K = 0
    N = 2

Each text is parsed by a lark grammar and the parse tree is turned into frozen
dataclasses by structural pattern matching. Every missing or ill-typed field
raises ConfigError with its dotted path.
"""

from __future__ import annotations

import dataclasses
import logging
import math
from dataclasses import dataclass, field
from typing import Any, Callable, Literal, cast

from lark import Lark, Token, Tree
from lark.exceptions import LarkError, UnexpectedInput

from .domains import ConfigError, LorentzOTError
from .models import (
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
    ModelKind,
    ModelSpacetime,
    PointSelector,
    Region,
    Selector,
    SliceSelector,
)
from .sampling import Lattice, SamplerConfig, Sprinkle

logger = logging.getLogger(__name__)


# Define the semantic domains

type TaskName = Literal["solve", "certify-tcd", "certify-tmcp", "compare", "disintegrate", "hawking", "refine"]
type CompareCheck = Literal["brunn-minkowski", "bishop-gromov", "bonnet-myers", "poincare"]

TASKS: tuple[str, ...] = ("solve", "certify-tcd", "certify-tmcp", "compare", "disintegrate", "hawking", "refine")
CHECKS: tuple[str, ...] = ("brunn-minkowski", "bishop-gromov", "bonnet-myers", "poincare")
MODEL_KINDS: tuple[str, ...] = ("minkowski", "constant-curvature", "milne-wedge")


@dataclass(frozen=True)
class ModelSection:
    kind: str = "minkowski"
    dim: int = 2
    k_sec: float = 0.0
    region: str = "box:0,0:1,1"


@dataclass(frozen=True)
class SamplerSection:
    mode: Literal["lattice", "sprinkle"] = "lattice"
    spacing: float = 0.1
    density: float | None = None
    seed: int | None = None


@dataclass(frozen=True)
class InputSection:
    """Measures and point sets, each a selector or a path to a JSON document"""

    space: str | None = None
    mu: str | None = None
    nu: str | None = None
    x0: str | None = None
    x1: str | None = None
    V: str | None = None
    E: str | None = None
    A0: str | None = None
    A1: str | None = None
    u: str = "tau_V"
    rays: str | None = None


@dataclass(frozen=True)
class TaskSection:
    name: str = "solve"
    K: float | None = None
    N: float | None = None
    p: float = 0.5
    t_grid: int = 21
    tol: float | None = None
    backend: Literal["exact", "highs", "network", "auto"] = "auto"
    check: str = "bishop-gromov"
    sharp: bool = True
    radii: tuple[float, ...] = ()
    H0: float | None = None
    phi: float = 1.0
    t_max: float | None = None
    eps_gamma: float | None = None
    spacings: tuple[float, ...] = ()
    certifier: str = "certify-tmcp"
    threads: int = 1


@dataclass(frozen=True)
class OutputSection:
    dir: str = "out"
    report: str = "report.json"
    csv: bool = True


@dataclass(frozen=True)
class ExperimentConfig:
    model: ModelSection = field(default_factory=ModelSection)
    sampler: SamplerSection = field(default_factory=SamplerSection)
    input: InputSection = field(default_factory=InputSection)
    task: TaskSection = field(default_factory=TaskSection)
    output: OutputSection = field(default_factory=OutputSection)

    def echo(self) -> dict[str, dict[str, Any]]:
        """The resolved configuration, defaults included"""
        return {
            name: {key: list(value) if isinstance(value, tuple) else value for key, value in section.items()}
            for name, section in dataclasses.asdict(self).items()
        }


# Grammar of experiment files
config_grammar = r"""
    start: _NL* section*

    section: header _NL+ entry*
    header: "[" NAME "]"
    entry: NAME "=" VALUE _NL+

    NAME: /[A-Za-z_][A-Za-z0-9_\-]*/
    VALUE: /[^\s#][^\n#]*/
    COMMENT: /#[^\n]*/
    _NL: /(\r?\n[\t ]*)+/

    %ignore COMMENT
    %ignore /[\t ]+/
"""

config_parser = Lark(config_grammar, start="start", parser="lalr")


# Grammar of regions and selectors; both share the box and cone shapes
shape_grammar = r"""
    ?region: box | diamond | cone
    ?selector: all | box | slice | hyperboloid | point | indices | cone

    all: "all"
    box: "box" ":" vector ":" vector
    diamond: "diamond" ":" vector (":" vector)?
    cone: "cone" ":" DIRECTION ":" NUMBER ":" NUMBER (":" NUMBER)? ("@" vector)?
    slice: "slice" ":" NUMBER ":" NUMBER
    hyperboloid: "hyperboloid" ":" NUMBER
    point: "point" ":" vector
    indices: "indices" ":" vector

    vector: NUMBER ("," NUMBER)*

    DIRECTION: "past" | "future"
    NUMBER: /[+-]?(\d+(\.\d*)?|\.\d+)([eE][+-]?\d+)?/

    %ignore /[\t ]+/
"""

shape_parser = Lark(shape_grammar, start=["region", "selector"], parser="lalr")


# Parse tree transformation for experiment files
def transform_config_tree(tree: Tree) -> dict[str, dict[str, str]]:
    match tree:
        case Tree(data="start", children=sections):
            raw: dict[str, dict[str, str]] = {}
            for subtree in sections:
                name, entries = transform_section_tree(cast(Tree, subtree))
                if name in raw:
                    raise ConfigError(name, "section appears twice")
                raw[name] = entries
            return raw

        case x:
            raise ConfigError("<file>", f"unexpected parse tree structure {x!r}")


def transform_section_tree(tree: Tree) -> tuple[str, dict[str, str]]:
    match tree:
        case Tree(data="section", children=[Tree(data="header", children=[Token(type="NAME", value=name)]), *entries]):
            out: dict[str, str] = {}
            for entry in entries:
                match entry:
                    case Tree(data="entry", children=[Token(type="NAME", value=key), Token(type="VALUE", value=value)]):
                        if key in out:
                            raise ConfigError(f"{name}.{key}", "key appears twice")
                        out[key] = value.strip()
                    case x:
                        raise ConfigError(name, f"unexpected parse tree structure {x!r}")
            return name, out

        case x:
            raise ConfigError("<file>", f"unexpected parse tree structure {x!r}")


# Parse tree transformation for regions and selectors
def _numbers(tree: Tree) -> tuple[float, ...]:
    match tree:
        case Tree(data="vector", children=tokens):
            return tuple(float(cast(Token, t).value) for t in tokens)
        case x:
            raise ValueError(f"Unexpected parse tree structure for a vector: {x!r}")


def _integer(value: float, what: str) -> int:
    if value != math.floor(value):
        raise ValueError(f"{what} must be an integer, got {value}")
    return int(value)


def _cone(children: list, dim: int) -> Cone:
    match children:
        case [Token(type="DIRECTION", value=direction), Token(value=rho_max), Token(value=rapidity), *rest]:
            rho_min, apex = 0.0, (0.0,) * dim
            for item in rest:
                match item:
                    case Token(type="NUMBER", value=v):
                        rho_min = float(v)
                    case Tree(data="vector"):
                        apex = _numbers(item)
            return Cone(apex, float(rho_max), float(rapidity), cast(Literal["future", "past"], direction), rho_min)
        case x:
            raise ValueError(f"Unexpected parse tree structure for a cone: {x!r}")


def transform_region_tree(tree: Tree, dim: int) -> Region:
    match tree:
        case Tree(data="box", children=[lo, hi]):
            return Box(_numbers(cast(Tree, lo)), _numbers(cast(Tree, hi)))

        case Tree(data="diamond", children=[height]):
            # diamond:T is the diamond of proper height T above the origin
            (T,) = _numbers(cast(Tree, height))
            return Diamond((0.0,) * dim, (T,) + (0.0,) * (dim - 1))

        case Tree(data="diamond", children=[bottom, top]):
            return Diamond(_numbers(cast(Tree, bottom)), _numbers(cast(Tree, top)))

        case Tree(data="cone", children=children):
            return _cone(children, dim)

        case x:
            raise ValueError(f"Unexpected parse tree structure for a region: {x!r}")


def transform_selector_tree(tree: Tree, dim: int) -> Selector:
    match tree:
        case Tree(data="all", children=[]):
            return AllPoints()

        case Tree(data="box", children=[lo, hi]):
            return BoxSelector(_numbers(cast(Tree, lo)), _numbers(cast(Tree, hi)))

        case Tree(data="slice", children=[Token(value=axis), Token(value=value)]):
            return SliceSelector(_integer(float(axis), "slice axis"), float(value))

        case Tree(data="hyperboloid", children=[Token(value=rho)]):
            return HyperboloidSelector(float(rho))

        case Tree(data="point", children=[coords]):
            return PointSelector(_numbers(cast(Tree, coords)))

        case Tree(data="indices", children=[indices]):
            return IndexSelector(tuple(_integer(v, "point index") for v in _numbers(cast(Tree, indices))))

        case Tree(data="cone", children=children):
            return ConeSelector(_cone(children, dim))

        case x:
            raise ValueError(f"Unexpected parse tree structure for a selector: {x!r}")


def parse_region(text: str, dim: int, path: str = "model.region") -> Region:
    try:
        return transform_region_tree(shape_parser.parse(text, start="region"), dim)
    except (LarkError, ValueError) as e:
        raise ConfigError(path, f"bad region {text!r}: {e}") from e


def parse_selector(text: str, dim: int, path: str = "selector") -> Selector:
    try:
        return transform_selector_tree(shape_parser.parse(text, start="selector"), dim)
    except (LarkError, ValueError) as e:
        raise ConfigError(path, f"bad selector {text!r}: {e}") from e


def is_document(value: str) -> bool:
    """Input values naming a JSON document rather than a selector"""
    return value.endswith(".json")


# Field conversion

type Converter = Callable[[str, str], Any]


def _float(path: str, text: str) -> float:
    try:
        value = float(text)
    except ValueError as e:
        raise ConfigError(path, f"expected a number, got {text!r}") from e
    if math.isnan(value):
        raise ConfigError(path, "NaN is not a parameter value")
    return value


def _positive(path: str, text: str) -> float:
    value = _float(path, text)
    if not value > 0:
        raise ConfigError(path, f"expected a positive number, got {text!r}")
    return value


def _int(path: str, text: str) -> int:
    try:
        return int(text)
    except ValueError as e:
        raise ConfigError(path, f"expected an integer, got {text!r}") from e


def _bool(path: str, text: str) -> bool:
    match text.lower():
        case "true" | "yes" | "1":
            return True
        case "false" | "no" | "0":
            return False
        case _:
            raise ConfigError(path, f"expected true or false, got {text!r}")


def _floats(path: str, text: str) -> tuple[float, ...]:
    return tuple(_float(path, part.strip()) for part in text.split(",") if part.strip())


def _text(path: str, text: str) -> str:
    return text


def _choice(*options: str) -> Converter:
    def convert(path: str, text: str) -> str:
        if text not in options:
            raise ConfigError(path, f"expected one of {', '.join(options)}, got {text!r}")
        return text

    return convert


def _input(path: str, text: str) -> str:
    if not is_document(text) and text != "tau_V" and not text.startswith("coordinate:"):
        try:
            shape_parser.parse(text, start="selector")
        except UnexpectedInput as e:
            raise ConfigError(path, f"bad selector {text!r}: {e}") from e
    return text


_CONVERTERS: dict[str, tuple[type, dict[str, Converter]]] = {
    "model": (
        ModelSection,
        {"kind": _choice(*MODEL_KINDS), "dim": _int, "k_sec": _float, "region": _text},
    ),
    "sampler": (
        SamplerSection,
        {"mode": _choice("lattice", "sprinkle"), "spacing": _positive, "density": _positive, "seed": _int},
    ),
    "input": (
        InputSection,
        {name: _input for name in ("mu", "nu", "x0", "x1", "V", "E", "A0", "A1", "u")}
        | {"space": _text, "rays": _text},
    ),
    "task": (
        TaskSection,
        {
            "name": _choice(*TASKS),
            "K": _float,
            "N": _positive,
            "p": _float,
            "t_grid": _int,
            "tol": _positive,
            "backend": _choice("exact", "highs", "network", "auto"),
            "check": _choice(*CHECKS),
            "sharp": _bool,
            "radii": _floats,
            "H0": _float,
            "phi": _positive,
            "t_max": _positive,
            "eps_gamma": _positive,
            "spacings": _floats,
            "certifier": _choice("certify-tmcp", "certify-tcd"),
            "threads": _int,
        },
    ),
    "output": (OutputSection, {"dir": _text, "report": _text, "csv": _bool}),
}


def _section(name: str, entries: dict[str, str]) -> Any:
    if name not in _CONVERTERS:
        raise ConfigError(name, f"unknown section; expected one of {', '.join(_CONVERTERS)}")
    cls, converters = _CONVERTERS[name]
    values = {}
    for key, text in entries.items():
        if key not in converters:
            raise ConfigError(f"{name}.{key}", "unknown key")
        values[key] = converters[key](f"{name}.{key}", text)
    return cls(**values)


# Requirements per task

_TASK_FIELDS: dict[str, tuple[str, ...]] = {
    "solve": ("input.mu", "input.nu"),
    "certify-tcd": ("input.mu", "input.nu", "task.K", "task.N"),
    "certify-tmcp": ("input.mu", "input.x1", "task.K", "task.N"),
    "compare": ("task.K", "task.N"),
    "disintegrate": ("input.V", "task.K", "task.N"),
    "hawking": ("task.K", "task.N"),
    "refine": ("task.K", "task.N", "task.spacings"),
}

_CHECK_FIELDS: dict[str, tuple[str, ...]] = {
    "brunn-minkowski": ("input.A0", "input.A1"),
    "bishop-gromov": ("input.x0", "input.E", "task.radii"),
    "bonnet-myers": (),
    "poincare": ("input.V",),
}


def _lookup(config: ExperimentConfig, path: str) -> Any:
    section, key = path.split(".")
    return getattr(getattr(config, section), key)


def required_fields(config: ExperimentConfig) -> tuple[str, ...]:
    task = config.task
    fields = _TASK_FIELDS[task.name]
    if task.name == "compare":
        fields += _CHECK_FIELDS[task.check]
    if task.name == "refine":
        fields += _TASK_FIELDS[task.certifier]
    return fields


def validate_config(config: ExperimentConfig) -> ExperimentConfig:
    for path in required_fields(config):
        if _lookup(config, path) in (None, ()):
            raise ConfigError(path, f"required by task {config.task.name}")
    task, sampler = config.task, config.sampler
    if task.name == "hawking" and config.input.V is None and config.input.rays is None:
        raise ConfigError("input.V", "required by task hawking unless input.rays is given")
    if config.input.space is None:
        if sampler.mode == "sprinkle":
            if sampler.seed is None:
                raise ConfigError("sampler.seed", "mandatory in sprinkle mode")
            if sampler.density is None:
                raise ConfigError("sampler.density", "mandatory in sprinkle mode")
        build_model(config)
    if not 0 < task.p < 1:
        raise ConfigError("task.p", f"expected 0 < p < 1, got {task.p}")
    if task.t_grid < 3:
        raise ConfigError("task.t_grid", f"need at least 3 times, got {task.t_grid}")
    if task.threads < 1:
        raise ConfigError("task.threads", f"need at least one thread, got {task.threads}")
    if task.name == "refine":
        if len(task.spacings) < 3:
            raise ConfigError("task.spacings", f"a refinement study needs at least 3 spacings, got {len(task.spacings)}")
        if any(b >= a for a, b in zip(task.spacings, task.spacings[1:])):
            raise ConfigError("task.spacings", "spacings must decrease")
        if sampler.mode != "lattice" or config.input.space is not None:
            raise ConfigError("sampler.mode", "a refinement study resamples a lattice")
    return config


def parse_config(text: str, overrides: dict[str, str] | None = None) -> ExperimentConfig:
    """Parse an experiment file; overrides are dotted keys with raw text values"""
    try:
        raw = transform_config_tree(config_parser.parse(text + "\n"))
    except UnexpectedInput as e:
        raise ConfigError(f"line {e.line}", f"syntax error at column {e.column}") from e
    for path, value in (overrides or {}).items():
        section, key = path.split(".")
        raw.setdefault(section, {})[key] = value
    if "task" not in raw or "name" not in raw["task"]:
        raise ConfigError("task.name", "every experiment names its task")
    sections = {name: _section(name, entries) for name, entries in raw.items()}
    config = ExperimentConfig(**sections)
    logger.debug(f"[CONFIG] task {config.task.name} with sections {', '.join(raw)}")
    return validate_config(config)


# Resolution into library objects


def _model_kind(section: ModelSection) -> ModelKind:
    match section.kind:
        case "minkowski":
            return Minkowski()
        case "constant-curvature":
            return ConstantCurvature(section.k_sec)
        case "milne-wedge":
            return MilneWedge()
        case other:
            raise ConfigError("model.kind", f"unknown model {other!r}")


def build_model(config: ExperimentConfig) -> ModelSpacetime:
    section = config.model
    region = parse_region(section.region, section.dim)
    try:
        return ModelSpacetime(_model_kind(section), section.dim, region)
    except LorentzOTError as e:
        raise ConfigError("model.region", str(e)) from e


def build_sampler(config: ExperimentConfig, spacing: float | None = None) -> SamplerConfig:
    section = config.sampler
    match section.mode:
        case "lattice":
            return SamplerConfig(Lattice(section.spacing if spacing is None else spacing))
        case "sprinkle":
            return SamplerConfig(Sprinkle(cast(float, section.density), cast(int, section.seed)))
        case other:
            raise ConfigError("sampler.mode", f"unknown sampler {other!r}")
