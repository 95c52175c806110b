"""Canonical two-form, Hamiltonian vector fields, and the form bracket."""

from fractions import Fraction

import pytest

from ddw.brackets import (NotHamiltonianForm, bracket, classify,
                          constraint_matrix, hamiltonian_vector_field,
                          is_hamiltonian, polysymplectic)
from ddw.expr import Expression, Variable, VarKind
from ddw.forms import Form, form_sum
from ddw.legendre import legendre_transform
from ddw.parser import parse_model

MECHANICS = "dim 1; signature +; field q; lagrangian 1/2 * d(q, 0)^2;"
SCALAR = ("dim 4; signature + - - -; field phi;"
          "lagrangian 1/2 * d(phi, mu) * d(phi, mu) - 1/2 * phi^2;")


def mom(base, mu, *comp):
    return Variable(VarKind.MOMENTUM, base, (mu,) + tuple(comp))


def test_polysymplectic_mechanics():
    model = parse_model(MECHANICS)
    omega = polysymplectic(model)
    q = Variable(VarKind.FIELD, "q")
    dq = Form.vertical(model.space, q)
    dp = Form.vertical(model.space, mom("q", 0))
    assert omega == dq.wedge(dp)


def test_polysymplectic_scalar():
    model = parse_model(SCALAR)
    omega = polysymplectic(model)
    phi = Variable(VarKind.FIELD, "phi")
    dphi = Form.vertical(model.space, phi)
    expected = form_sum(model.space, [
        dphi.wedge(Form.vertical(model.space, mom("phi", a)))
            .wedge(model.space.upsilon(a))
        for a in range(4)])
    assert omega == expected


def test_vector_field_solves_structure_equation():
    # contracting the vector into the two-form reproduces the differential
    model = parse_model(SCALAR)
    omega = polysymplectic(model)
    space = model.space
    phi = Expression.var(Variable(VarKind.FIELD, "phi"))
    candidates = [
        form_sum(space, [space.upsilon(a) * Expression.var(mom("phi", a))
                         for a in range(4)]),
        Form.scalar(space, phi * phi).wedge(space.upsilon(2)),
        form_sum(space, [space.upsilon(a) * (Expression.var(mom("phi", a)) * phi)
                         for a in range(4)]),
    ]
    for f in candidates:
        chi = hamiltonian_vector_field(model, f)
        assert omega.contract_vertical(chi) == f.vertical_differential()


def test_momentum_square_not_hamiltonian_above_one_dimension():
    model = parse_model(SCALAR)
    space = model.space
    p0 = Expression.var(mom("phi", 0))
    bad = Form.scalar(space, p0 * p0).wedge(space.upsilon(0))
    assert not is_hamiltonian(model, bad)
    with pytest.raises(NotHamiltonianForm):
        hamiltonian_vector_field(model, bad)


def test_partial_momentum_aggregate_not_hamiltonian():
    # a single p^mu u_mu term fails the equal-multiplier requirement for n > 1
    model = parse_model(SCALAR)
    space = model.space
    lopsided = space.upsilon(0) * Expression.var(mom("phi", 0))
    assert not is_hamiltonian(model, lopsided)


def test_momentum_dependence_allowed_in_dimension_one():
    model = parse_model(MECHANICS)
    space = model.space
    p = Expression.var(mom("q", 0))
    f = Form.scalar(space, p * p)
    chi = hamiltonian_vector_field(model, f)
    assert chi.components[Variable(VarKind.FIELD, "q")] == 2 * p


def test_poisson_bracket_in_dimension_one():
    model = parse_model(MECHANICS)
    space = model.space
    q = Expression.var(Variable(VarKind.FIELD, "q"))
    p = Expression.var(mom("q", 0))
    fq = Form.scalar(space, q)
    fp = Form.scalar(space, p)
    assert bracket(model, fp, fq) == Form.scalar(space, Expression.const(1))
    assert bracket(model, fq, fp) == Form.scalar(space, Expression.const(-1))
    assert bracket(model, fq, fq).is_zero()


def test_constraint_matrix_palatini_block_pattern(palatini_model):
    data = legendre_transform(palatini_model)
    matrix = constraint_matrix(palatini_model, data.constraints)
    space = palatini_model.space
    ups = [space.upsilon(a) for a in range(4)]
    strengths = palatini_model.spec("P").component_tuples(4)

    def expected_entry(row, col):
        # nonzero only between an A constraint and a strength constraint
        if row < 4 and col >= 4:
            tau = row
            kappa, lam = strengths[col - 4]
            out = Form.zero(space)
            if kappa == tau:
                out = out + ups[lam]
            if lam == tau:
                out = out - ups[kappa]
            return out
        if row >= 4 and col < 4:
            return -expected_entry(col, row)
        return Form.zero(space)

    for i in range(10):
        for j in range(10):
            assert matrix[i][j] == expected_entry(i, j), (i, j)


def test_constraint_matrix_antisymmetry(palatini_model):
    data = legendre_transform(palatini_model)
    matrix = constraint_matrix(palatini_model, data.constraints)
    for i in range(10):
        for j in range(10):
            assert matrix[i][j] == -matrix[j][i]


def test_classify_palatini_second_class(palatini_model):
    data = legendre_transform(palatini_model)
    cls = classify(palatini_model, data)
    assert cls.status == "second_class"
    assert set(cls.tags.values()) == {"second_class"}
    assert len(cls.constraints) == 10


def test_classify_no_constraints():
    model = parse_model(SCALAR)
    cls = classify(model, legendre_transform(model))
    assert cls.status == "none"
    assert cls.matrix == []


def test_classify_first_class():
    model = parse_model("dim 2; signature + -; field B; lagrangian 1/2 * B^2;")
    cls = classify(model, legendre_transform(model))
    assert cls.status == "first_class"
    assert cls.tags[Variable(VarKind.FIELD, "B")] == "first_class"


def test_classify_mixed():
    model = parse_model(
        "dim 2; signature + -; field A[_mu]; field E[^mu,^nu] antisymmetric;"
        "field c; lagrangian 1/4*E[mu,nu]*E[mu,nu] - E[mu,nu]*d(A[nu],mu)"
        " + 1/2*c^2;")
    cls = classify(model, legendre_transform(model))
    assert cls.status == "mixed"
    assert cls.tags[Variable(VarKind.FIELD, "c")] == "first_class"
    assert cls.tags[Variable(VarKind.FIELD, "A", (0,))] == "second_class"


def test_classify_standard_maxwell_unclassified(standard_model):
    data = legendre_transform(standard_model)
    cls = classify(standard_model, data)
    assert cls.status == "unclassified"
    assert "respond differently" in cls.reason
    assert cls.matrix is None
    assert set(cls.tags.values()) == {"unclassified"}
