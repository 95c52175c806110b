"""Covariant Legendre transform and primary constraint extraction.

For a Lagrangian at most quadratic in first derivatives with constant
velocity coefficients, the momentum map has the affine shape p = M v + b
with M rational and b a polynomial in the fields.  The pseudoinverse of M
splits phase space into solvable velocities and primary constraints:

* vhat = M+ (p - b) inverts the map on its range,
* R = (p - b) - M vhat collects the unsolvable directions; grouped per field
  component and paired with the upsilon basis these are the constraint forms,
* H = p . vhat - L(vhat) is the covariant Hamiltonian density.

The same elimination that detects the constraints is oriented into a
deterministic substitution system used to evaluate expressions on the
constraint surface (weak reduction).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, List, Optional, Tuple

from . import linalg
from .expr import Expression, Variable, VarKind, ZERO, expr_sum
from .forms import Form, Spacetime
from .model import Model


class LegendreError(Exception):
    """Raised when the Lagrangian lies outside the affine-in-velocities class."""


@dataclass
class Constraint:
    """One primary constraint: a horizontal (n-1)-form labeled by a field component."""

    component: Variable
    form: Form

    @property
    def name(self) -> str:
        return "C[%s]" % self.component

    def __repr__(self):
        return "%s = %s" % (self.name, self.form)


@dataclass
class LegendreData:
    """Everything the Legendre step produces, in one bundle."""

    model: Model
    momentum_defs: Dict[Variable, Expression]
    m_rows: linalg.SparseMat
    b_offsets: Dict[Variable, Expression]
    vhat: Dict[Variable, Expression]
    residuals: Dict[Variable, Expression]
    constraints: List[Constraint]
    hamiltonian: Expression
    weak_rules: Dict[Variable, Expression]
    auxiliary_fields: List[str]

    def weak_reduce(self, expr: Expression) -> Expression:
        """Evaluate an expression on the primary constraint surface, canonically."""
        return expr.substitute(self.weak_rules, fixpoint=True)

    def weak_reduce_form(self, form: Form) -> Form:
        return form.map_coefficients(self.weak_reduce)

    def constraint_for(self, component: Variable) -> Optional[Constraint]:
        for c in self.constraints:
            if c.component == component:
                return c
        return None


def polymomenta(model: Model) -> Dict[Variable, Expression]:
    """Momentum definitions p = dL/dv, one entry per momentum variable."""
    out = {}
    for jet in model.jets():
        p = model.momentum_of_jet(jet)
        out[p] = model.lagrangian.diff(jet)
    return out


def _split_affine(model: Model, defs: Dict[Variable, Expression]):
    """Split p = M v + b; reject velocity coefficients that depend on fields."""
    m_rows: linalg.SparseMat = {}
    b_offsets: Dict[Variable, Expression] = {}
    for p, expr in defs.items():
        row: Dict[Variable, Fraction] = {}
        b_terms: Dict = {}
        for mono, coeff in expr.terms.items():
            jets = [(v, e) for v, e in mono if v.kind == VarKind.JET]
            if not jets:
                b_terms[mono] = coeff
                continue
            if len(jets) > 1 or jets[0][1] > 1 or len(mono) > 1:
                raise LegendreError(
                    "momentum %s is not affine in velocities with constant "
                    "coefficients: offending term %s" % (p, Expression({mono: coeff})))
            jet = jets[0][0]
            row[jet] = row.get(jet, Fraction(0)) + coeff
        m_rows[p] = {k: v for k, v in row.items() if v}
        b_offsets[p] = Expression(b_terms)
    return m_rows, b_offsets


def _orient_rules(model: Model, relations: List[Expression], auxiliary: List[str]) -> Dict[Variable, Expression]:
    """Turn linear on-shell relations into a triangular substitution system.

    Pivot preference: auxiliary field components first, then momenta with the
    highest index order, never dynamical fields or coordinates.
    """
    aux = set(auxiliary)

    def pivot_priority(var: Variable):
        if var.kind == VarKind.FIELD and var.base in aux:
            cls = 2
        elif var.kind == VarKind.MOMENTUM:
            cls = 1
        else:
            cls = 0
        return (cls, var.sort_key())

    rules: Dict[Variable, Expression] = {}
    for rel in relations:
        rel = rel.substitute(rules, fixpoint=True)
        if rel.is_zero():
            continue
        candidates = []
        for var in rel.variables():
            if rel.diff(var).variables():
                continue  # only accept variables entering linearly with constant slope
            if var.kind == VarKind.FIELD and var.base not in aux:
                continue
            if var.kind in (VarKind.COORDINATE, VarKind.JET):
                continue
            candidates.append(var)
        if not candidates:
            raise LegendreError("cannot orient constraint relation %s" % rel)
        pivot = max(candidates, key=pivot_priority)
        slope = rel.diff(pivot).constant_value()
        rest = rel - Expression.const(slope) * Expression.var(pivot)
        rules[pivot] = Expression.const(Fraction(-1, 1) / slope) * rest
    # normalize so no rule mentions another pivot
    for var in list(rules):
        rules[var] = rules[var].substitute(rules, fixpoint=True)
    return rules


def legendre_transform(model: Model) -> LegendreData:
    """Full constraint analysis of the momentum map for one model."""
    defs = polymomenta(model)
    m_rows, b_offsets = _split_affine(model, defs)

    jets = model.jets()
    lag_jets = {v for v in model.lagrangian.variables()
                if v.kind == VarKind.JET}
    auxiliary = []
    for f in model.fields:
        has_jet = any(j.base == f.name for j in lag_jets)
        if not has_jet:
            auxiliary.append(f.name)

    m_pinv = linalg.pseudoinverse(m_rows, jets)

    # p - b as symbolic vector over momentum labels
    shifted = {p: Expression.var(p) - b_offsets[p] for p in defs}

    vhat: Dict[Variable, Expression] = {}
    for jet in jets:
        col = m_pinv.get(jet, {})
        vhat[jet] = expr_sum(Expression.const(c) * shifted[p] for p, c in col.items())

    residuals: Dict[Variable, Expression] = {}
    for p in defs:
        recon = expr_sum(Expression.const(c) * vhat[jet] for jet, c in m_rows[p].items())
        residuals[p] = shifted[p] - recon

    constraints = []
    for comp in model.components():
        total = Form.zero(model.space)
        for mu in range(model.space.dim):
            p = Variable(VarKind.MOMENTUM, comp.base, (mu,) + comp.indices)
            r = residuals[p]
            if not r.is_zero():
                total = total + model.space.upsilon(mu) * r
        if not total.is_zero():
            constraints.append(Constraint(component=comp, form=total))

    kinetic = expr_sum(Expression.var(p) * vhat[model.jet_of_momentum(p)] for p in defs)
    hamiltonian = kinetic - model.lagrangian.substitute(vhat)

    relations = [residuals[p] for p in sorted(residuals, key=lambda v: v.sort_key())]
    weak_rules = _orient_rules(model, [r for r in relations if not r.is_zero()], auxiliary)

    return LegendreData(
        model=model,
        momentum_defs=defs,
        m_rows=m_rows,
        b_offsets=b_offsets,
        vhat=vhat,
        residuals=residuals,
        constraints=constraints,
        hamiltonian=hamiltonian,
        weak_rules=weak_rules,
        auxiliary_fields=auxiliary,
    )
