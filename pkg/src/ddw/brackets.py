"""Polysymplectic structure and brackets of horizontal forms.

A pure horizontal (n-1)-form F = F^mu u_mu is called Hamiltonian when, for
every field component a, the derivative of F^mu by p^nu_a is X^a delta^mu_nu
for a single multiplier X^a.  Contracting the canonical two-form fixes the
vertical vector of F: X^a along field directions and -dF^mu/dy^a along the
momentum directions p^mu_a.  The bracket of two Hamiltonian forms contracts
the vector of the first into the vertical differential of the second.  In one
dimension the multiplier may depend on momenta and every 0-form qualifies,
which recovers the ordinary Poisson bracket of mechanics.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Dict, List, Optional, Sequence

from .expr import Variable, VarKind
from .forms import Form, VerticalVector, form_sum
from .legendre import Constraint, LegendreData
from .model import Model

SECOND_CLASS = "second_class"
FIRST_CLASS = "first_class"
UNCLASSIFIED = "unclassified"


class NotHamiltonianForm(ValueError):
    """Raised when a horizontal form admits no vertical Hamiltonian vector."""


def polysymplectic(model: Model) -> Form:
    """Canonical two-form: the sum of dy^a ^ dp^alpha_a ^ u_alpha."""
    space = model.space
    pieces = []
    for comp in model.components():
        dy = Form.vertical(space, comp)
        for alpha in range(space.dim):
            mom = Variable(VarKind.MOMENTUM, comp.base, (alpha,) + comp.indices)
            pieces.append(dy.wedge(Form.vertical(space, mom)).wedge(space.upsilon(alpha)))
    return form_sum(space, pieces)


def hamiltonian_vector_field(model: Model, form: Form) -> VerticalVector:
    """Vertical vector of a Hamiltonian (n-1)-form; raises NotHamiltonianForm."""
    space = model.space
    n = space.dim
    comps = form.upsilon_components()
    vector = VerticalVector(space, {})
    for a in model.components():
        diag = [comps[mu].diff(Variable(VarKind.MOMENTUM, a.base, (mu,) + a.indices))
                for mu in range(n)]
        multiplier = diag[0]
        for mu in range(1, n):
            if diag[mu] != multiplier:
                raise NotHamiltonianForm(
                    "components %d and %d respond differently to the momenta of %s"
                    % (0, mu, a))
        for nu in range(n):
            p_nu = Variable(VarKind.MOMENTUM, a.base, (nu,) + a.indices)
            for mu in range(n):
                if mu == nu:
                    continue
                mixed = comps[mu].diff(p_nu)
                if not mixed.is_zero():
                    raise NotHamiltonianForm(
                        "component %d of the form depends on %s" % (mu, p_nu))
        if n > 1 and any(v.kind == VarKind.MOMENTUM for v in multiplier.variables()):
            raise NotHamiltonianForm(
                "multiplier for %s depends on momenta in dimension %d" % (a, n))
        if not multiplier.is_zero():
            vector.add(a, multiplier)
        for mu in range(n):
            slope = -comps[mu].diff(a)
            if not slope.is_zero():
                vector.add(Variable(VarKind.MOMENTUM, a.base, (mu,) + a.indices), slope)
    return vector


def is_hamiltonian(model: Model, form: Form) -> bool:
    try:
        hamiltonian_vector_field(model, form)
    except NotHamiltonianForm:
        return False
    return True


def bracket(model: Model, f: Form, g: Form) -> Form:
    """Bracket of two Hamiltonian (n-1)-forms, again an (n-1)-form."""
    chi = hamiltonian_vector_field(model, f)
    return g.vertical_differential().contract_vertical(chi)


def constraint_matrix(model: Model, constraints: Sequence[Constraint]) -> List[List[Form]]:
    """All pairwise constraint brackets, first slot indexing the rows."""
    vectors = [hamiltonian_vector_field(model, c.form) for c in constraints]
    differentials = [c.form.vertical_differential() for c in constraints]
    return [[dg.contract_vertical(chi) for dg in differentials] for chi in vectors]


@dataclass
class Classification:
    """Constraint bracket matrix with a class tag for every constraint."""

    constraints: List[Constraint]
    matrix: Optional[List[List[Form]]]
    tags: Dict[Variable, str]
    status: str
    reason: str = ""


def classify(model: Model, legendre: LegendreData) -> Classification:
    """Tag each primary constraint by whether its bracket row and column vanish."""
    cons = list(legendre.constraints)
    if not cons:
        return Classification(cons, [], {}, "none")
    try:
        matrix = constraint_matrix(model, cons)
    except NotHamiltonianForm as err:
        tags = {c.component: UNCLASSIFIED for c in cons}
        return Classification(cons, None, tags, UNCLASSIFIED, str(err))
    reduced = [[legendre.weak_reduce_form(entry) for entry in row] for row in matrix]
    tags = {}
    for i, c in enumerate(cons):
        central = all(reduced[i][j].is_zero() for j in range(len(cons))) and \
            all(reduced[j][i].is_zero() for j in range(len(cons)))
        tags[c.component] = FIRST_CLASS if central else SECOND_CLASS
    kinds = set(tags.values())
    if kinds == {SECOND_CLASS}:
        status = SECOND_CLASS
    elif kinds == {FIRST_CLASS}:
        status = FIRST_CLASS
    else:
        status = "mixed"
    return Classification(cons, matrix, tags, status)
