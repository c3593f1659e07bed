"""Solve reports and a-priori ratio guarantees checked in exact arithmetic."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any

from .core import MultistageMatching, profit, solution_to_json, union_cost


@dataclass(frozen=True)
class CertifiedRatio:
    """An approximation guarantee with an irrational part ``1/sqrt(radicand)``.

    ``inv_sqrt`` (maximisation): ``value >= coef * OPT / sqrt(radicand)``.
    ``affine`` (minimisation): ``value <= (constant - coef / sqrt(radicand)) * OPT``.

    ``exact``: ``value == OPT``.

    A radicand of 0 comes from an empty intersection (``mu = 0``); every
    solution is then optimal and the guarantee is plain optimality.
    """

    kind: str
    radicand: int
    constant: Fraction = Fraction(0)
    coef: Fraction = Fraction(1)

    @classmethod
    def exact(cls) -> "CertifiedRatio":
        return cls("exact", 0)

    @classmethod
    def inv_sqrt(cls, radicand: int) -> "CertifiedRatio":
        return cls("inv_sqrt", radicand)

    @classmethod
    def affine(cls, constant: int | Fraction, coef: int | Fraction, radicand: int) -> "CertifiedRatio":
        return cls("affine", radicand, Fraction(constant), Fraction(coef))

    def holds(self, value: int, opt: int) -> bool:
        if self.kind == "exact":
            return value == opt
        if self.radicand == 0:
            return value >= opt if self.kind == "inv_sqrt" else value <= opt
        if self.kind == "inv_sqrt":
            lhs = Fraction(value)
            rhs = self.coef * opt
            return lhs >= 0 and (rhs <= 0 or lhs * lhs * self.radicand >= rhs * rhs)
        slack = self.constant * opt - value
        t = self.coef * opt
        if slack < 0:
            return False
        return t <= 0 or t * t <= self.radicand * slack * slack

    def ratio(self) -> float:
        if self.radicand == 0:
            return 1.0
        root = math.sqrt(self.radicand)
        if self.kind == "inv_sqrt":
            return float(self.coef) / root
        return float(self.constant) - float(self.coef) / root

    def to_json(self) -> dict[str, Any]:
        out: dict[str, Any] = {"kind": self.kind, "radicand": self.radicand}
        if self.kind == "affine":
            out["constant"] = str(self.constant)
        out["coef"] = str(self.coef)
        out["ratio"] = self.ratio()
        return out


@dataclass
class SolveReport:
    method: str
    objective: str
    value: int
    certified_ratio: CertifiedRatio | None
    solution: MultistageMatching | None
    iterations: int = 0
    runtime_ms: float = 0.0
    instance_digest: str = ""
    notes: dict[str, Any] = field(default_factory=dict)

    def to_json(self) -> dict[str, Any]:
        value = self.value
        if self.solution is not None:
            value = profit(self.solution) if self.objective == "mim" else union_cost(self.solution)
        return {
            "method": self.method,
            "objective": self.objective,
            "value": value,
            "certified_ratio": self.certified_ratio.to_json() if self.certified_ratio else None,
            "solution": solution_to_json(self.solution) if self.solution is not None else None,
            "iterations": self.iterations,
            "runtime_ms": round(self.runtime_ms, 3),
            "instance_digest": self.instance_digest,
            "notes": self.notes,
        }
