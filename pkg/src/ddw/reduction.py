"""Second-class reduction: constraint inversion, Dirac brackets, reduced data.

The constraint bracket matrix of a purely second-class system is inverted in
the generalized sense by a matrix of constant one-forms N satisfying
C . (N ^ C) = C with the wedge taken first.  The solver turns that relation
into a sparse rational linear system, takes the minimum-norm solution, then
certifies the result with genuine form arithmetic.  Dirac brackets subtract
the correction routed through N, and the reduced two-form follows from the
constraint substitution rules applied to vertical factors.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, List, Optional, Sequence

from . import linalg
from .brackets import (FIRST_CLASS, SECOND_CLASS, UNCLASSIFIED, Classification,
                       bracket, polysymplectic)
from .expr import Expression, Variable, VarKind
from .forms import Form, bullet, form_sum
from .legendre import Constraint, LegendreData
from .model import Model


class NoSolution(ValueError):
    """Raised when the bracket matrix has no constant one-form inverse."""


class FirstClassPresent(RuntimeError):
    """Raised when reduction is attempted with first-class constraints."""


@dataclass
class PseudoInverse:
    """Constant one-form inverse of a constraint bracket matrix."""

    constraints: List[Constraint]
    matrix: List[List[Form]]
    blocks: List[List[Form]]
    wedge_sums: List[List[Form]]
    defining_relation: bool
    left_identity: bool
    right_products: List[List[Fraction]]

    def entry(self, u: int, v: int) -> Form:
        return self.blocks[u][v]


def _constant_components(entry: Form) -> List[Fraction]:
    comps = entry.upsilon_components()
    out = []
    for comp in comps:
        if not comp.is_constant():
            raise NoSolution("bracket matrix entry is not constant: %s" % entry)
        out.append(comp.constant_value())
    return out


def pseudoinverse(model: Model, constraints: Sequence[Constraint],
                  matrix: List[List[Form]]) -> PseudoInverse:
    """Minimum-norm constant solution N of C . (N ^ C) = C."""
    space = model.space
    n = space.dim
    k = len(constraints)
    comp = [[_constant_components(matrix[u][v]) for v in range(k)] for u in range(k)]

    rows: Dict[tuple, Dict[tuple, Fraction]] = {}
    rhs: Dict[tuple, Fraction] = {}
    for u in range(k):
        for x in range(k):
            for rho in range(n):
                row: Dict[tuple, Fraction] = {}
                for v in range(k):
                    cuv = comp[u][v][rho]
                    if not cuv:
                        continue
                    for w in range(k):
                        for mu in range(n):
                            cwx = comp[w][x][mu]
                            if not cwx:
                                continue
                            key = (mu, v, w)
                            row[key] = row.get(key, Fraction(0)) + cuv * cwx
                label = (u, x, rho)
                rows[label] = {key: val for key, val in row.items() if val}
                if comp[u][x][rho]:
                    rhs[label] = comp[u][x][rho]

    sol = linalg.solve_min_norm_blocked(rows, rhs)
    if sol is None:
        raise NoSolution("the generalized inverse relation has no solution")

    blocks = []
    for v in range(k):
        brow = []
        for w in range(k):
            pieces = []
            for mu in range(n):
                val = sol.get((mu, v, w))
                if val:
                    pieces.append(space.dx(mu) * Expression.const(val))
            brow.append(form_sum(space, pieces))
        blocks.append(brow)

    wedge_sums = [[form_sum(space, [blocks[u][v].wedge(matrix[v][w]) for v in range(k)])
                   for w in range(k)] for u in range(k)]
    vol = space.volume()
    left = all(wedge_sums[u][w] == (vol if u == w else Form.zero(space))
               for u in range(k) for w in range(k))

    defining = True
    for u in range(k):
        for x in range(k):
            total = form_sum(space, [bullet(matrix[u][v], wedge_sums[v][x])
                                     for v in range(k)])
            if total != matrix[u][x]:
                defining = False
    if not defining:
        raise NoSolution("solver produced a non-certifying inverse")

    right = [[sum((comp[u][v][mu] * sol.get((mu, v, x), Fraction(0))
                   for v in range(k) for mu in range(n)), Fraction(0))
              for x in range(k)] for u in range(k)]
    return PseudoInverse(list(constraints), matrix, blocks, wedge_sums,
                         defining, left, right)


def dirac_bracket(model: Model, pinv: PseudoInverse, f: Form, g: Form) -> Form:
    """Bracket of f and g minus the correction routed through the constraints."""
    cons = pinv.constraints
    space = model.space
    base = bracket(model, f, g)
    frows = [bracket(model, f, c.form) for c in cons]
    gcols = [bracket(model, c.form, g) for c in cons]
    corr = Form.zero(space)
    for u in range(len(cons)):
        if frows[u].is_zero():
            continue
        inner = form_sum(space, [pinv.blocks[u][v].wedge(gcols[v])
                                 for v in range(len(cons))])
        corr = corr + bullet(frows[u], inner)
    return base - corr


def dirac_with_constraints(model: Model, pinv: PseudoInverse, f: Form) -> List[Form]:
    """Dirac brackets of f against every constraint, sharing the wedge sums."""
    cons = pinv.constraints
    space = model.space
    frows = [bracket(model, f, c.form) for c in cons]
    out = []
    for w in range(len(cons)):
        corr = Form.zero(space)
        for u in range(len(cons)):
            if frows[u].is_zero():
                continue
            corr = corr + bullet(frows[u], pinv.wedge_sums[u][w])
        out.append(frows[w] - corr)
    return out


@dataclass
class Reduction:
    """Everything the constraint surface retains after elimination."""

    model: Model
    legendre: LegendreData
    classification: Classification
    status: str
    eliminated: List[Variable]
    surviving_fields: List[Variable]
    surviving_momenta: List[Variable]
    rules: Dict[Variable, Expression]
    hamiltonian: Expression
    omega: Form
    omega_reduced: Form
    pseudoinverse: Optional[PseudoInverse]
    certificate: Dict[str, object]


def reduce_system(model: Model, legendre: LegendreData,
                  classification: Classification) -> Reduction:
    """Eliminate constrained directions; Dirac machinery when second class."""
    first = [c for c in classification.constraints
             if classification.tags.get(c.component) == FIRST_CLASS]
    if first:
        names = ", ".join(c.name for c in first)
        raise FirstClassPresent("first-class constraints block reduction: %s" % names)

    rules = dict(legendre.weak_rules)
    omega = polysymplectic(model)
    omega_reduced = omega.substitute_vertical(rules)
    hstar = legendre.weak_reduce(legendre.hamiltonian)
    eliminated = sorted(rules, key=lambda v: v.sort_key())
    surviving_fields = [c for c in model.components() if c not in rules]
    surviving_momenta = [m for m in model.momenta() if m not in rules]

    pinv = None
    certificate: Dict[str, object] = {}
    status = classification.status
    if status == SECOND_CLASS:
        reduced_matrix = [[legendre.weak_reduce_form(entry) for entry in row]
                          for row in classification.matrix]
        pinv = pseudoinverse(model, classification.constraints, reduced_matrix)
        exact = True
        weak = True
        count = 0
        for witness in _witness_forms(model):
            for value in dirac_with_constraints(model, pinv, witness):
                count += 1
                if not value.is_zero():
                    exact = False
                    if not legendre.weak_reduce_form(value).is_zero():
                        weak = False
        certificate = {
            "mode": "dirac",
            "defining_relation": pinv.defining_relation,
            "left_identity": pinv.left_identity,
            "second_slot_exact": exact,
            "second_slot_weak": weak,
            "witness_values": count,
        }
    elif status == UNCLASSIFIED:
        certificate = {"mode": "substitution_only",
                       "reason": classification.reason}
    else:
        certificate = {"mode": "unconstrained"}

    allowed = set(surviving_fields) | set(surviving_momenta)
    certificate["hamiltonian_reduced"] = all(
        v.kind == VarKind.COORDINATE or v in allowed
        for v in hstar.variables())

    return Reduction(model, legendre, classification, status, eliminated,
                     surviving_fields, surviving_momenta, rules, hstar,
                     omega, omega_reduced, pinv, certificate)


def _witness_forms(model: Model) -> List[Form]:
    """Linear generators used to spot-check constraint centrality."""
    space = model.space
    out = []
    for comp in model.components():
        for alpha in range(space.dim):
            out.append(space.upsilon(alpha) * Expression.var(comp))
    for comp in model.components():
        pieces = []
        for alpha in range(space.dim):
            mom = Variable(VarKind.MOMENTUM, comp.base, (alpha,) + comp.indices)
            pieces.append(space.upsilon(alpha) * Expression.var(mom))
        out.append(form_sum(space, pieces))
    return out
