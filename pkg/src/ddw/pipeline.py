"""Staged derivation pipeline from a parsed model to emitted equations.

Each stage has a stable name so reports, partial emission, and error
messages can refer to the same vocabulary.  ``run_pipeline`` executes the
whole chain and returns a :class:`DerivedSystem`; any failure is rewrapped
as a :class:`PipelineError` carrying the stage that raised it.
"""

from dataclasses import dataclass
from typing import Dict, List, Optional, Tuple

from .brackets import Classification, classify, polysymplectic
from .equations import FieldEquationSet, HJSystem, field_equations, hj_system
from .expr import Expression, Variable, VarKind
from .forms import Form, form_sum
from .legendre import LegendreData, legendre_transform
from .model import Model
from .reduction import (FirstClassPresent, NoSolution, Reduction,
                        dirac_bracket, reduce_system)

STAGES: List[Tuple[str, str]] = [
    ("parse", "model file parsed into fields, signature, and Lagrangian"),
    ("polymomenta", "polymomentum of every field component and direction"),
    ("constraints", "primary constraints left unsolved by the momentum map"),
    ("hamiltonian", "covariant Hamiltonian density, raw and reduced"),
    ("omega", "polysymplectic form on the polymomentum phase space"),
    ("bracket_matrix", "brackets of all constraint pairs as (n-1)-forms"),
    ("classification", "first/second class tag for every constraint"),
    ("pseudoinverse", "one-form pseudoinverse of the constraint matrix"),
    ("dirac_table", "nonzero Dirac brackets of momenta with field forms"),
    ("reduction", "surviving variables, reduced structure, certificates"),
    ("field_equations", "first-order equations and their closed form"),
    ("hj_system", "Hamilton-Jacobi equation, conditions, and embedding"),
]

STAGE_NAMES = [name for name, _ in STAGES]

DiracEntry = Tuple[str, str, Form]


class PipelineError(RuntimeError):
    """A derivation stage failed; carries the stage name for reporting."""

    def __init__(self, stage: str, message: str):
        super().__init__("stage %s: %s" % (stage, message))
        self.stage = stage
        self.message = message


@dataclass
class DerivedSystem:
    """Complete derivation record for one model."""

    model: Model
    legendre: LegendreData
    omega: Form
    classification: Classification
    reduction: Reduction
    dirac_table: List[DiracEntry]
    field_eqs: FieldEquationSet
    hj: HJSystem


def _fail(stage: str, exc: Exception) -> PipelineError:
    err = PipelineError(stage, str(exc))
    err.__cause__ = exc
    return err


def _momentum_form(model: Model, comp: Variable) -> Form:
    space = model.space
    pieces = []
    for alpha in range(space.dim):
        mom = Variable(VarKind.MOMENTUM, comp.base, (alpha,) + comp.indices)
        pieces.append(space.upsilon(alpha) * Expression.var(mom))
    return form_sum(space, pieces)


def _dirac_table(reduction: Reduction) -> List[DiracEntry]:
    """Nonzero weak-reduced entries {p_a, y^b v_alpha}* in component order."""
    pinv = reduction.pseudoinverse
    if pinv is None:
        return []
    model = reduction.model
    legendre = reduction.legendre
    space = model.space
    table: List[DiracEntry] = []
    for first in model.components():
        pform = _momentum_form(model, first)
        for second in model.components():
            for alpha in range(space.dim):
                witness = space.upsilon(alpha) * Expression.var(second)
                value = legendre.weak_reduce_form(
                    dirac_bracket(model, pinv, pform, witness))
                if not value.is_zero():
                    table.append(("p(%s)" % first,
                                  "%s u[%d]" % (second, alpha),
                                  value))
    return table


def run_pipeline(model: Model) -> DerivedSystem:
    """Derive the full covariant Hamiltonian record for one model."""
    try:
        legendre = legendre_transform(model)
    except Exception as exc:
        raise _fail("polymomenta", exc)

    try:
        omega = polysymplectic(model)
    except Exception as exc:
        raise _fail("omega", exc)

    try:
        classification = classify(model, legendre)
    except Exception as exc:
        raise _fail("classification", exc)

    try:
        reduction = reduce_system(model, legendre, classification)
    except NoSolution as exc:
        raise _fail("pseudoinverse", exc)
    except FirstClassPresent as exc:
        raise _fail("reduction", exc)
    except Exception as exc:
        raise _fail("reduction", exc)

    try:
        table = _dirac_table(reduction)
    except Exception as exc:
        raise _fail("dirac_table", exc)

    try:
        feqs = field_equations(reduction)
    except Exception as exc:
        raise _fail("field_equations", exc)

    try:
        hj = hj_system(reduction, feqs)
    except Exception as exc:
        raise _fail("hj_system", exc)

    return DerivedSystem(model, legendre, omega, classification, reduction,
                         table, feqs, hj)
