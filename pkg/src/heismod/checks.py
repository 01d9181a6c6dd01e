"""A single named numeric comparison, shared by verification routines and reports."""

from __future__ import annotations

from dataclasses import asdict, dataclass
from typing import Optional


@dataclass(frozen=True)
class Check:
    name: str
    expected: Optional[float]
    actual: float
    tol: float
    passed: bool

    @classmethod
    def close(cls, name: str, expected: float, actual: float, rtol: float) -> "Check":
        err = abs(actual - expected) / max(abs(expected), 1e-300)
        return cls(name, float(expected), float(actual), rtol, bool(err <= rtol))

    @classmethod
    def absolute(cls, name: str, expected: float, actual: float, atol: float) -> "Check":
        return cls(name, float(expected), float(actual), atol, bool(abs(actual - expected) <= atol))

    @classmethod
    def at_most(cls, name: str, bound: float, actual: float, tol: float = 0.0) -> "Check":
        return cls(name, float(bound), float(actual), tol, bool(actual <= bound + tol))

    @classmethod
    def at_least(cls, name: str, bound: float, actual: float, tol: float = 0.0) -> "Check":
        return cls(name, float(bound), float(actual), tol, bool(actual >= bound - tol))

    def as_dict(self) -> dict:
        d = asdict(self)
        d["pass"] = d.pop("passed")
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "Check":
        return cls(d["name"], d["expected"], d["actual"], d["tol"], d["pass"])
