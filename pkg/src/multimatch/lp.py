"""The natural two-stage LP, exact feasibility checks and the gap certificate.

Variables are keyed ``("x", stage, edge)`` and ``("z", edge)``.  Everything
is a ``Fraction``; nothing here solves an LP.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Mapping

from .core import Edge, TemporalGraph, vertices_of
from .exact import MIM, exact_solve
from .gadgets import gen_lp_gap, gen_lp_gap_fractional
from .matching import has_perfect_matching

Var = tuple


@dataclass(frozen=True)
class Row:
    name: str
    coeffs: tuple[tuple[Var, int], ...]
    sense: str  # "=" or "<="
    rhs: Fraction


@dataclass(frozen=True)
class LpModel:
    variables: tuple[Var, ...]
    rows: tuple[Row, ...]
    objective: tuple[Var, ...]  # maximise the sum of these

    def count(self, prefix: str) -> int:
        return sum(1 for r in self.rows if r.name.startswith(prefix))


def _factor_critical(verts: tuple[int, ...], edges: list[Edge]) -> bool:
    for v in verts:
        rest = [e for e in edges if v not in e]
        others = set(verts) - {v}
        if vertices_of(rest) != others or not has_perfect_matching(rest):
            return False
    return True


def build_lp(g: TemporalGraph, blossom_cap: int | None = None) -> LpModel:
    """Variables and rows of the LP for a two-stage graph.

    Degree equalities for every matched vertex of each stage, ``z <= x``
    for each shared edge and stage, and, when ``blossom_cap`` is given,
    odd-set rows for every ``W`` with ``3 <= |W| <= blossom_cap``.  Only
    sets inducing a factor-critical subgraph get a row; the others are
    implied by the degree rows (for ``|W| = 3`` these are the triangles).
    """
    if g.tau != 2:
        raise ValueError(f"the LP is defined for two stages, got {g.tau}")
    shared = sorted(g.intersection(1))
    variables: list[Var] = []
    for stage in (1, 2):
        variables += [("x", stage, e) for e in sorted(g.stage(stage))]
    variables += [("z", e) for e in shared]

    rows: list[Row] = []
    for stage in (1, 2):
        edges = sorted(g.stage(stage))
        for v in sorted(vertices_of(edges)):
            coeffs = tuple((("x", stage, e), 1) for e in edges if v in e)
            rows.append(Row(f"deg_{stage}_{v}", coeffs, "=", Fraction(1)))
    if blossom_cap is not None:
        if blossom_cap < 3 or blossom_cap % 2 == 0:
            raise ValueError("blossom_cap must be an odd integer >= 3")
        for stage in (1, 2):
            edges = sorted(g.stage(stage))
            verts = sorted(vertices_of(edges))
            for size in range(3, blossom_cap + 1, 2):
                for w in itertools.combinations(verts, size):
                    ws = set(w)
                    inside = [e for e in edges if e[0] in ws and e[1] in ws]
                    if len(inside) < size or not _factor_critical(w, inside):
                        continue
                    coeffs = tuple((("x", stage, e), 1) for e in inside)
                    label = "_".join(map(str, w))
                    rows.append(Row(f"odd_{stage}_{label}", coeffs, "<=", Fraction(size - 1, 2)))
    for e in shared:
        for stage in (1, 2):
            rows.append(Row(f"min_{stage}_{e[0]}_{e[1]}", ((("z", e), 1), (("x", stage, e), -1)), "<=", Fraction(0)))
    return LpModel(tuple(variables), tuple(rows), tuple(("z", e) for e in shared))


@dataclass(frozen=True)
class AssignmentCheck:
    feasible: bool
    objective: Fraction
    violated: str | None = None


def check_assignment(model: LpModel, values: Mapping[Var, Fraction | int]) -> AssignmentCheck:
    """Evaluate every bound and row exactly; report the first violation."""
    missing = [v for v in model.variables if v not in values]
    if missing:
        raise KeyError(f"no value for variable {missing[0]!r}")
    vals = {v: Fraction(values[v]) for v in model.variables}
    objective = sum((vals[v] for v in model.objective), Fraction(0))
    for v in model.variables:
        if not 0 <= vals[v] <= 1:
            return AssignmentCheck(False, objective, f"bound {v!r}")
    for row in model.rows:
        lhs = sum((c * vals[v] for v, c in row.coeffs), Fraction(0))
        ok = lhs == row.rhs if row.sense == "=" else lhs <= row.rhs
        if not ok:
            return AssignmentCheck(False, objective, row.name)
    return AssignmentCheck(True, objective)


def integral_assignment(g: TemporalGraph, m1: Iterable[Edge], m2: Iterable[Edge]) -> dict[Var, Fraction]:
    """The 0/1 point of a two-stage solution (``z`` is the minimum of the ``x``)."""
    m1, m2 = set(m1), set(m2)
    out: dict[Var, Fraction] = {}
    for stage, m in ((1, m1), (2, m2)):
        for e in g.stage(stage):
            out["x", stage, e] = Fraction(int(e in m))
    for e in g.intersection(1):
        out["z", e] = Fraction(int(e in m1 and e in m2))
    return out


@dataclass(frozen=True)
class GapCertificate:
    k: int
    mu: int
    ip_opt: int
    lp_lb: Fraction
    gap_lb: Fraction

    def to_json(self) -> dict:
        return {"k": self.k, "mu": self.mu, "ip_opt": self.ip_opt,
                "lp_lb": str(self.lp_lb), "gap_lb": str(self.gap_lb)}


class CertificationError(AssertionError):
    pass


def certify_gap(k: int) -> GapCertificate:
    """Integer optimum 1 against a feasible fractional point of value ``k + 1``."""
    gad = gen_lp_gap(k)
    g = gad.graph
    ip_opt = exact_solve(g, MIM).value
    check = check_assignment(build_lp(g), gen_lp_gap_fractional(k))
    if not check.feasible:
        raise CertificationError(f"fractional point violates {check.violated}")
    if ip_opt != 1:
        raise CertificationError(f"integer optimum is {ip_opt}, expected 1")
    if check.objective != k + 1:
        raise CertificationError(f"fractional objective is {check.objective}, expected {k + 1}")
    if g.mu != (k + 1) ** 2:
        raise CertificationError(f"mu is {g.mu}, expected {(k + 1) ** 2}")
    return GapCertificate(k, g.mu, ip_opt, check.objective, check.objective / ip_opt)


def _decimal(q: Fraction) -> str:
    if q.denominator == 1:
        return str(q.numerator)
    return repr(float(q))


def _varname(v: Var) -> str:
    if v[0] == "x":
        return f"x{v[1]}_{v[2][0]}_{v[2][1]}"
    return f"z_{v[1][0]}_{v[1][1]}"


def to_lp_text(model: LpModel) -> str:
    """CPLEX LP format export (one way; nothing reads it back)."""
    lines = ["\\ two-stage intersection matching LP", "Maximize"]
    if model.objective:
        obj = " + ".join(_varname(v) for v in model.objective)
    elif model.variables:
        obj = "0 " + _varname(model.variables[0])
    else:
        obj = "0"
    lines.append(f" obj: {obj}")
    lines.append("Subject To")
    for row in model.rows:
        terms = []
        for v, c in row.coeffs:
            sign = "-" if c < 0 else "+"
            mag = "" if abs(c) == 1 else f"{abs(c)} "
            terms.append(f"{sign} {mag}{_varname(v)}")
        lhs = " ".join(terms).lstrip("+ ")
        lines.append(f" {row.name}: {lhs} {row.sense} {_decimal(row.rhs)}")
    lines.append("Bounds")
    for v in model.variables:
        lines.append(f" 0 <= {_varname(v)} <= 1")
    lines.append("End")
    return "\n".join(lines) + "\n"
