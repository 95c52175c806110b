"""Numeric spot checks of emitted equations against closed-form solutions.

Spacetime derivatives of solution functions are approximated with central
finite differences; derivatives with respect to field values are taken
exactly on the expression trees.  Each equation family reports its maximum
absolute residual over a seeded sample of points, and a step-halving check
estimates the finite-difference order.

The order check runs at a coarser base step than the residual check: with
second derivatives in play, rounding error grows like 1/h^2 and would mask
the O(h^2) truncation signal at the default verification step.
"""

import math
import random
from dataclasses import dataclass
from typing import Dict, List, Sequence, Tuple

from . import numeric
from .equations import Equation
from .expr import Variable, VarKind
from .parser import Solution
from .pipeline import DerivedSystem

DEFAULT_STEP = 1e-4
DEFAULT_TOLERANCE = 1e-6
DEFAULT_POINTS = 100
DEFAULT_ORDER_STEP = 1e-2
ORDER_FLOOR = 1e-12
ORDER_WINDOW = (3.2, 4.8)


class SolutionCoverage(ValueError):
    """The solution file lacks a function the checked equations need."""


@dataclass
class Family:
    """One equation family plus the evaluation mode it requires."""

    name: str
    equation: Equation
    mode: str


@dataclass
class FamilyResult:
    name: str
    mode: str
    count: int
    max_residual: float


@dataclass
class ResidualReport:
    """Residuals of every checked family over the sample."""

    step: float
    tolerance: float
    points: int
    families: List[FamilyResult]
    records: List[dict]

    @property
    def max_residual(self) -> float:
        if not self.families:
            return 0.0
        return max(f.max_residual for f in self.families)

    @property
    def passed(self) -> bool:
        return self.max_residual <= self.tolerance


@dataclass
class ConvergenceRow:
    """Max residual at a base step and at half that step, with the ratio."""

    name: str
    coarse: float
    fine: float

    @property
    def ratio(self) -> float:
        if self.fine == 0.0:
            return float("inf")
        return self.coarse / self.fine

    @property
    def second_order(self) -> bool:
        return ORDER_WINDOW[0] <= self.ratio <= ORDER_WINDOW[1]


def _families(system: DerivedSystem, solution: Solution) -> List[Family]:
    families: List[Family] = []
    if solution.fields:
        if not system.field_eqs.closed:
            raise SolutionCoverage(
                "field functions were supplied but the model has no closed "
                "field equations to check")
        for eq in system.field_eqs.closed:
            families.append(Family(eq.label, eq, "field"))
    if solution.fluxes:
        families.append(Family(system.hj.equation.label, system.hj.equation,
                               "flux"))
        for eq in system.hj.conditions:
            families.append(Family(eq.label, eq, "flux"))
        if solution.fields:
            for eq in system.hj.embedding:
                families.append(Family(eq.label, eq, "embedding"))
    if not families:
        raise SolutionCoverage("the solution file assigns no functions")
    for family in families:
        _check_coverage(family, solution)
    return families


def _check_coverage(family: Family, solution: Solution):
    for var in sorted(family.equation.residual().variables(),
                      key=lambda v: v.sort_key()):
        kind = var.kind
        if kind in (VarKind.FIELD, VarKind.JET, VarKind.JET2):
            comp = _component_of(var)
            if comp not in solution.fields:
                raise SolutionCoverage(
                    "%s: no solution function for field %s"
                    % (family.name, comp))
        if kind in (VarKind.FLUX, VarKind.FLUX_JET, VarKind.FLUX_DERIV):
            mu = var.indices[1] if kind == VarKind.FLUX_JET else var.indices[0]
            if mu not in solution.fluxes:
                raise SolutionCoverage(
                    "%s: no solution function for S[%d]" % (family.name, mu))
        if kind in (VarKind.MOMENTUM, VarKind.MOMENTUM_JET):
            raise SolutionCoverage(
                "%s references momentum %s, which numeric checks do not "
                "evaluate" % (family.name, var))


def _component_of(var: Variable) -> Variable:
    drop = 2 if var.kind in (VarKind.JET2,) else 1
    if var.kind == VarKind.FIELD:
        drop = 0
    return Variable(VarKind.FIELD, var.base, var.indices[drop:])


def _shift(x: Sequence[float], alpha: int, delta: float) -> List[float]:
    out = list(x)
    out[alpha] += delta
    return out


def _field_values(solution: Solution, x: Sequence[float]) -> Dict[Variable, float]:
    return {comp: numeric.evaluate(node, x, {})
            for comp, node in solution.fields.items()}


def _env_for(variables, x: Sequence[float], h: float, solution: Solution,
             fieldvals: Dict[Variable, float]) -> Dict[Variable, float]:
    env: Dict[Variable, float] = {}
    for var in variables:
        kind = var.kind
        if kind == VarKind.COORDINATE:
            env[var] = x[var.indices[0]]
        elif kind == VarKind.FIELD:
            env[var] = fieldvals[var]
        elif kind == VarKind.JET:
            alpha = var.indices[0]
            node = solution.fields[_component_of(var)]
            env[var] = (numeric.evaluate(node, _shift(x, alpha, h), {})
                        - numeric.evaluate(node, _shift(x, alpha, -h), {})) / (2 * h)
        elif kind == VarKind.JET2:
            mu, nu = var.indices[0], var.indices[1]
            node = solution.fields[_component_of(var)]
            if mu == nu:
                env[var] = (numeric.evaluate(node, _shift(x, mu, h), {})
                            - 2.0 * numeric.evaluate(node, x, {})
                            + numeric.evaluate(node, _shift(x, mu, -h), {})) / (h * h)
            else:
                total = 0.0
                for smu in (h, -h):
                    for snu in (h, -h):
                        sign = 1.0 if (smu > 0) == (snu > 0) else -1.0
                        point = _shift(_shift(x, mu, smu), nu, snu)
                        total += sign * numeric.evaluate(node, point, {})
                env[var] = total / (4 * h * h)
        elif kind == VarKind.FLUX:
            env[var] = numeric.evaluate(solution.fluxes[var.indices[0]], x,
                                        fieldvals)
        elif kind == VarKind.FLUX_JET:
            alpha, mu = var.indices
            node = solution.fluxes[mu]
            env[var] = (numeric.evaluate(node, _shift(x, alpha, h), fieldvals)
                        - numeric.evaluate(node, _shift(x, alpha, -h),
                                           fieldvals)) / (2 * h)
        elif kind == VarKind.FLUX_DERIV:
            node = solution.fluxes[var.indices[0]]
            deriv = numeric.diff_field(node, _component_of(var))
            env[var] = numeric.evaluate(deriv, x, fieldvals)
        else:
            raise SolutionCoverage("no numeric rule for %s" % var)
    return env


def _samples(system: DerivedSystem, points: int, seed: int):
    rng = random.Random(seed)
    n = system.model.space.dim
    comps = system.model.components()
    out = []
    for _ in range(points):
        x = [rng.uniform(-1.0, 1.0) for _ in range(n)]
        rand_fields = {c: rng.uniform(-1.0, 1.0) for c in comps}
        out.append((x, rand_fields))
    return out


def _run_families(system: DerivedSystem, solution: Solution,
                  families: List[Family], samples, step: float
                  ) -> Tuple[List[FamilyResult], List[dict]]:
    results: List[FamilyResult] = []
    records: List[dict] = []
    for family in families:
        expr = family.equation.residual()
        variables = sorted(expr.variables(), key=lambda v: v.sort_key())
        worst = 0.0
        for index, (x, rand_fields) in enumerate(samples):
            if family.mode == "flux":
                fieldvals = dict(rand_fields)
            else:
                fieldvals = _field_values(solution, x)
            env = _env_for(variables, x, step, solution, fieldvals)
            value = expr.evaluate(env)
            residual = abs(value) if math.isfinite(value) else float("inf")
            worst = max(worst, residual)
            records.append({"family": family.name, "mode": family.mode,
                            "point": index, "step": step,
                            "residual": residual})
        results.append(FamilyResult(family.name, family.mode, len(samples),
                                    worst))
    return results, records


def verify_system(system: DerivedSystem, solution: Solution,
                  step: float = DEFAULT_STEP,
                  tolerance: float = DEFAULT_TOLERANCE,
                  points: int = DEFAULT_POINTS,
                  seed: int = 0) -> ResidualReport:
    """Check every covered equation family at seeded random points."""
    families = _families(system, solution)
    samples = _samples(system, points, seed)
    results, records = _run_families(system, solution, families, samples, step)
    return ResidualReport(step, tolerance, points, results, records)


def convergence_check(system: DerivedSystem, solution: Solution,
                      step: float = DEFAULT_ORDER_STEP,
                      points: int = 20, seed: int = 0,
                      floor: float = ORDER_FLOOR) -> List[ConvergenceRow]:
    """Halve the step and report per-family residual ratios.

    Families whose coarse residual sits below ``floor`` carry no truncation
    signal (they are exact up to rounding) and are skipped.
    """
    families = _families(system, solution)
    samples = _samples(system, points, seed)
    coarse, _ = _run_families(system, solution, families, samples, step)
    fine, _ = _run_families(system, solution, families, samples, step / 2.0)
    rows = []
    for cres, fres in zip(coarse, fine):
        if cres.max_residual < floor:
            continue
        rows.append(ConvergenceRow(cres.name, cres.max_residual,
                                   fres.max_residual))
    return rows


def format_report(report: ResidualReport, rows: List[ConvergenceRow]) -> str:
    """Human-readable verification summary."""
    lines = ["step %g, tolerance %g, %d points"
             % (report.step, report.tolerance, report.points)]
    for family in report.families:
        status = "ok" if family.max_residual <= report.tolerance else "FAIL"
        lines.append("%-28s max |residual| = %.3e  [%s]"
                     % (family.name, family.max_residual, status))
    for row in rows:
        status = "ok" if row.second_order else "FAIL"
        lines.append("%-28s halving ratio = %.2f (%.3e -> %.3e)  [%s]"
                     % (row.name, row.ratio, row.coarse, row.fine, status))
    verdict = "PASS" if report.passed else "FAIL"
    lines.append("overall max |residual| = %.3e  [%s]"
                 % (report.max_residual, verdict))
    return "\n".join(lines)
