"""Semantic domains shared across the package: extended reals, verdicts and errors"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Any, Literal


# Define the semantic domains


@dataclass(frozen=True)
class Infinite:
    """A tagged infinity; never enters floating arithmetic"""

    sign: Literal[1, -1]

    def __neg__(self) -> Infinite:
        return Infinite(-self.sign)  # type: ignore[arg-type]

    def __str__(self) -> str:
        return "+inf" if self.sign > 0 else "-inf"


POS_INF = Infinite(1)
NEG_INF = Infinite(-1)

type ExtendedReal = float | Infinite

type Verdict = Literal["PASS", "FAIL", "VACUOUS"]

type IndexSet = tuple[int, ...]


def is_finite(value: ExtendedReal) -> bool:
    return not isinstance(value, Infinite)


def to_float(value: ExtendedReal) -> float:
    """Convert to a float (math.inf for the infinities); for CSV and plotting only"""
    match value:
        case Infinite(sign=sign):
            return sign * math.inf
        case _:
            return float(value)


def to_json(value: ExtendedReal) -> float | str:
    match value:
        case Infinite():
            return str(value)
        case _:
            return float(value)


def from_json(value: Any) -> ExtendedReal:
    match value:
        case "+inf":
            return POS_INF
        case "-inf":
            return NEG_INF
        case bool():
            raise DomainError(f"Not an extended real: {value!r}")
        case int() | float():
            return float(value)
        case _:
            raise DomainError(f"Not an extended real: {value!r}")


def combine_verdicts(verdicts: list[Verdict]) -> Verdict:
    """FAIL dominates VACUOUS, which dominates PASS"""
    if "FAIL" in verdicts:
        return "FAIL"
    if "VACUOUS" in verdicts:
        return "VACUOUS"
    return "PASS"


def passes_multiplicative(lhs: float, rhs: float, tol: float) -> bool:
    """lhs >= rhs up to a tolerance relative to |rhs|"""
    return lhs - rhs >= -tol * abs(rhs)


# Errors


class LorentzOTError(ValueError):
    """Root of every error raised by the library"""


class DomainError(LorentzOTError):
    pass


class RegimeError(LorentzOTError):
    pass


class SamplingError(LorentzOTError):
    pass


class CodimensionError(LorentzOTError):
    pass


class PreconditionError(LorentzOTError):
    def __init__(self, message: str, certificate: Any = None):
        super().__init__(message)
        self.certificate = certificate


class NotCyclicallyMonotoneError(LorentzOTError):
    def __init__(self, message: str, cycle: list[Any]):
        super().__init__(f"{message}: cycle {cycle}")
        self.cycle = cycle


class SchemaVersionError(LorentzOTError):
    def __init__(self, found: str, expected: str):
        super().__init__(f"Schema mismatch: found {found!r}, expected {expected!r}")
        self.found = found
        self.expected = expected


class ConfigError(LorentzOTError):
    def __init__(self, path: str, message: str):
        super().__init__(f"{path}: {message}")
        self.path = path
