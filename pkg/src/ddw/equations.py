"""Field equations and the Hamilton-Jacobi system of a reduced model.

Equations leave phase space and live in an extended atom vocabulary: second
jets, coordinate jets of momenta, flux components S^mu, their coordinate
jets, and formal derivatives of S^mu by field components.  Everything stays
a polynomial Expression, so substitution and comparison reuse the core
arithmetic.

Velocity equations come from grouping the momenta that project onto one
surviving momentum: the signed sum of their jets equals the derivative of the
reduced Hamiltonian.  The same grouping drives a spread substitution that
reproduces the naive per-component gradient; the factor trail records that
its signed orbit sum collapses back to the canonical right-hand side.
Momentum equations divergence the projected momentum flux of each field
component.  When the velocity system inverts, momenta become jet expressions
and the momentum equations close into a second-order system, which also
supplies the gradient embedding of the Hamilton-Jacobi flux.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, List, Optional, Tuple

from . import linalg
from .expr import Expression, Variable, VarKind, ZERO, expr_sum
from .legendre import LegendreData
from .model import Model
from .reduction import Reduction


def jet2_variable(base: str, mu: int, nu: int, comp: Tuple[int, ...]) -> Variable:
    lo, hi = (mu, nu) if mu <= nu else (nu, mu)
    return Variable(VarKind.JET2, base, (lo, hi) + comp)


def momentum_jet_variable(alpha: int, momentum: Variable) -> Variable:
    return Variable(VarKind.MOMENTUM_JET, momentum.base, (alpha,) + momentum.indices)


def flux_variable(mu: int) -> Variable:
    return Variable(VarKind.FLUX, "S", (mu,))


def flux_jet_variable(alpha: int, mu: int) -> Variable:
    return Variable(VarKind.FLUX_JET, "S", (alpha, mu))


def flux_deriv_variable(mu: int, comp: Variable) -> Variable:
    return Variable(VarKind.FLUX_DERIV, comp.base, (mu,) + comp.indices)


def _partial_of_variable(var: Variable, alpha: int) -> Expression:
    kind = var.kind
    if kind == VarKind.COORDINATE:
        return Expression.const(1 if var.indices[0] == alpha else 0)
    if kind == VarKind.FIELD:
        return Expression.var(Variable(VarKind.JET, var.base, (alpha,) + var.indices))
    if kind == VarKind.JET:
        return Expression.var(
            jet2_variable(var.base, alpha, var.indices[0], var.indices[1:]))
    if kind == VarKind.MOMENTUM:
        return Expression.var(momentum_jet_variable(alpha, var))
    if kind == VarKind.FLUX:
        return Expression.var(flux_jet_variable(alpha, var.indices[0]))
    raise ValueError("no coordinate derivative for %s" % var)


def formal_partial(expr: Expression, alpha: int) -> Expression:
    """Coordinate derivative on the extended atom vocabulary, by Leibniz."""
    out = ZERO
    for mono, coeff in expr.terms.items():
        for i, (var, exp) in enumerate(mono):
            image = _partial_of_variable(var, alpha)
            if image.is_zero():
                continue
            piece = Expression.const(coeff * exp) * image
            for j, (other, power) in enumerate(mono):
                reduced = power - 1 if j == i else power
                if reduced:
                    piece = piece * Expression.var(other) ** reduced
            out = out + piece
    return out


def _single_variable(expr: Expression) -> Variable:
    terms = list(expr.terms.items())
    if len(terms) != 1 or terms[0][1] != 1 or len(terms[0][0]) != 1 \
            or terms[0][0][0][1] != 1:
        raise ValueError("expected a bare variable, got %s" % expr)
    return terms[0][0][0][0]


def lifted_jet_rules(model: Model, rules: Dict[Variable, Expression]
                     ) -> Dict[Variable, Expression]:
    """Push substitution rules through one coordinate derivative."""
    out: Dict[Variable, Expression] = {}
    for lhs, rhs in rules.items():
        for alpha in range(model.space.dim):
            key = _single_variable(_partial_of_variable(lhs, alpha))
            out[key] = formal_partial(rhs, alpha)
    return out


@dataclass(frozen=True)
class Equation:
    """One emitted equation, read as lhs = rhs."""

    label: str
    lhs: Expression
    rhs: Expression

    def residual(self) -> Expression:
        return self.lhs - self.rhs

    def __str__(self):
        return "%s: %s = %s" % (self.label, self.lhs, self.rhs)


@dataclass
class FieldEquationSet:
    """First-order equations, their closure, and the factor bookkeeping."""

    velocity: List[Equation]
    raw_velocity: List[Equation]
    momentum: List[Equation]
    factor_trail: Dict[str, object]
    momentum_solution: Optional[Dict[Variable, Expression]]
    solution_note: str
    closed: List[Equation]


def _momentum_orbits(model: Model, legendre: LegendreData,
                     surviving: List[Variable]) -> Dict[Variable, List[Tuple[Variable, Fraction]]]:
    orbits: Dict[Variable, List[Tuple[Variable, Fraction]]] = {p: [] for p in surviving}
    for q in model.momenta():
        image = legendre.weak_reduce(Expression.var(q))
        if image.is_zero():
            continue
        terms = list(image.terms.items())
        if len(terms) != 1:
            continue
        mono, coeff = terms[0]
        if len(mono) != 1 or mono[0][1] != 1:
            continue
        target = mono[0][0]
        if target in orbits:
            orbits[target].append((q, coeff))
    return orbits


def field_equations(reduction: Reduction) -> FieldEquationSet:
    """Velocity and momentum equations of the reduced Hamiltonian system."""
    model = reduction.model
    legendre = reduction.legendre
    hstar = reduction.hamiltonian
    n = model.space.dim
    surviving = list(reduction.surviving_momenta)
    orbits = _momentum_orbits(model, legendre, surviving)

    spread = {}
    for p, orbit in orbits.items():
        if orbit:
            weight = Fraction(1, len(orbit))
            spread[p] = expr_sum(Expression.const(s * weight) * Expression.var(q)
                                 for q, s in orbit)
    hspread = hstar.substitute(spread)

    velocity: List[Equation] = []
    raw_velocity: List[Equation] = []
    trail_detail: Dict[str, Dict[str, object]] = {}
    trail_closed = True
    for p in surviving:
        orbit = orbits[p]
        lhs = expr_sum(Expression.const(s) * Expression.var(model.jet_of_momentum(q))
                       for q, s in orbit)
        rhs = hstar.diff(p)
        velocity.append(Equation("velocity(%s)" % p, lhs, rhs))
        raw = hspread.diff(p)
        raw_velocity.append(Equation("velocity_raw(%s)" % p, lhs, raw))
        orbit_sum = expr_sum(Expression.const(s) * hspread.diff(q) for q, s in orbit)
        combined = legendre.weak_reduce(orbit_sum)
        closes = combined == legendre.weak_reduce(rhs)
        trail_closed = trail_closed and closes
        trail_detail[str(p)] = {
            "raw": raw,
            "orbit_sum": combined,
            "canonical": rhs,
            "closes": closes,
        }
    factor_trail = {"closed": trail_closed, "detail": trail_detail}

    momentum: List[Equation] = []
    for comp in model.components():
        projections = []
        for alpha in range(n):
            q = Variable(VarKind.MOMENTUM, comp.base, (alpha,) + comp.indices)
            projections.append(legendre.weak_reduce(Expression.var(q)))
        lhs = expr_sum(formal_partial(proj, alpha)
                       for alpha, proj in enumerate(projections))
        rhs = -hstar.diff(comp)
        if lhs.is_zero() and rhs.is_zero():
            continue
        momentum.append(Equation("momentum(%s)" % comp, lhs, rhs))

    solution, note = _solve_velocity(model, velocity, surviving)
    closed: List[Equation] = []
    if solution is not None:
        subs: Dict[Variable, Expression] = dict(solution)
        for p, image in solution.items():
            for alpha in range(n):
                subs[momentum_jet_variable(alpha, p)] = formal_partial(image, alpha)
        for eq in momentum:
            closed.append(Equation("closed(%s)" % eq.label[len("momentum("):-1],
                                   eq.lhs.substitute(subs), eq.rhs.substitute(subs)))
    return FieldEquationSet(velocity, raw_velocity, momentum, factor_trail,
                            solution, note, closed)


def _solve_velocity(model: Model, velocity: List[Equation],
                    surviving: List[Variable]):
    """Invert the velocity equations for the momenta, if linear and regular."""
    if not velocity:
        return {}, ""
    rows: linalg.SparseMat = {}
    jet_sides: Dict[int, Expression] = {}
    for i, eq in enumerate(velocity):
        remainder = eq.rhs
        row: Dict[Variable, Fraction] = {}
        for p in surviving:
            slope = eq.rhs.diff(p)
            if slope.is_zero():
                continue
            if not slope.is_constant():
                return None, "velocity equations are not linear in the momenta"
            row[p] = slope.constant_value()
            remainder = remainder - slope * Expression.var(p)
        rows[i] = row
        jet_sides[i] = eq.lhs - remainder
    inverse = linalg.pseudoinverse(rows, surviving)
    for p in surviving:
        for q in surviving:
            total = sum((inverse.get(p, {}).get(i, Fraction(0)) * rows[i].get(q, Fraction(0))
                         for i in rows), Fraction(0))
            if total != (1 if p == q else 0):
                return None, "velocity equations do not determine the momenta"
    solution = {}
    for p in surviving:
        solution[p] = expr_sum(Expression.const(c) * jet_sides[i]
                               for i, c in sorted(inverse.get(p, {}).items()))
    for i, eq in enumerate(velocity):
        check = eq.rhs.substitute(solution)
        if check != eq.lhs:
            return None, "velocity inversion failed to reproduce the jets"
    return solution, ""


@dataclass
class HJSystem:
    """Hamilton-Jacobi equation, gradient conditions, gradient embedding."""

    equation: Equation
    conditions: List[Equation]
    embedding: List[Equation]


def hj_system(reduction: Reduction, feqs: FieldEquationSet) -> HJSystem:
    """Characteristic flux equations of the reduced Hamiltonian."""
    model = reduction.model
    n = model.space.dim
    ds_map = {q: Expression.var(flux_deriv_variable(q.indices[0], model.component_of(q)))
              for q in model.momenta()}
    divergence = expr_sum(Expression.var(flux_jet_variable(mu, mu)) for mu in range(n))
    equation = Equation("hamilton_jacobi",
                        divergence + reduction.hamiltonian.substitute(ds_map), ZERO)

    auxiliary = set(reduction.legendre.auxiliary_fields)
    conditions = []
    for q in sorted(reduction.rules, key=lambda v: v.sort_key()):
        if q.kind != VarKind.MOMENTUM or q.base in auxiliary:
            continue
        image = Expression.var(q).substitute(ds_map) \
            - reduction.rules[q].substitute(ds_map)
        conditions.append(Equation("hj_condition(%s)" % q, image, ZERO))

    embedding = []
    if feqs.momentum_solution is not None:
        for p in reduction.surviving_momenta:
            embedding.append(Equation("hj_gradient(%s)" % p,
                                      ds_map[p], feqs.momentum_solution[p]))
    return HJSystem(equation, conditions, embedding)
