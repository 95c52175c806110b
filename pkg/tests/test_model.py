"""Field declarations: index symmetry canonicalization and component enumeration."""

import pytest

from ddw.expr import Variable, VarKind
from ddw.forms import Spacetime
from ddw.model import Model, ModelField


def antisym_field():
    return ModelField(name="P", variances=("^", "^"), symmetry="antisymmetric")


def plain_field(rank=1):
    return ModelField(name="A", variances=("_",) * rank, symmetry=None)


def test_rank():
    assert plain_field().rank == 1
    assert antisym_field().rank == 2
    assert ModelField(name="phi", variances=(), symmetry=None).rank == 0


def test_canonical_indices_plain():
    f = plain_field(2)
    assert f.canonical_indices((1, 0)) == ((1, 0), 1)


def test_canonical_indices_antisymmetric():
    f = antisym_field()
    assert f.canonical_indices((0, 1)) == ((0, 1), 1)
    assert f.canonical_indices((1, 0)) == ((0, 1), -1)
    assert f.canonical_indices((2, 2)) == (None, 0)


def test_canonical_indices_symmetric():
    f = ModelField(name="g", variances=("_", "_"), symmetry="symmetric")
    assert f.canonical_indices((1, 0)) == ((0, 1), 1)
    assert f.canonical_indices((2, 2)) == ((2, 2), 1)


def test_component_tuples():
    assert plain_field().component_tuples(4) == [(0,), (1,), (2,), (3,)]
    assert antisym_field().component_tuples(4) == \
        [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)]
    assert ModelField(name="phi", variances=(), symmetry=None).component_tuples(4) == [()]


def make_model():
    space = Spacetime(4, (1, -1, -1, -1))
    fields = [plain_field(), antisym_field()]
    from ddw.expr import ZERO
    return Model(name="m", space=space, fields=fields, lagrangian=ZERO)


def test_spec_lookup():
    model = make_model()
    assert model.spec("A").name == "A"
    with pytest.raises(KeyError):
        model.spec("missing")


def test_field_variable_canonicalizes():
    model = make_model()
    var, sign = model.field_variable("P", (1, 0))
    assert var == Variable(VarKind.FIELD, "P", (0, 1))
    assert sign == -1
    none_var, zero = model.field_variable("P", (2, 2))
    assert none_var is None and zero == 0


def test_jet_and_momentum_variables_share_layout():
    model = make_model()
    jet, sign = model.jet_variable("P", 3, (1, 0))
    assert jet == Variable(VarKind.JET, "P", (3, 0, 1))
    assert sign == -1
    mom, sign = model.momentum_variable("A", 2, (1,))
    assert mom == Variable(VarKind.MOMENTUM, "A", (2, 1))
    assert sign == 1


def test_components_enumeration():
    model = make_model()
    comps = model.components()
    assert len(comps) == 4 + 6
    assert comps[0] == Variable(VarKind.FIELD, "A", (0,))
    assert comps[-1] == Variable(VarKind.FIELD, "P", (2, 3))


def test_jets_and_momenta_counts():
    model = make_model()
    assert len(model.jets()) == 4 * 10
    assert len(model.momenta()) == 4 * 10


def test_momentum_jet_correspondence():
    model = make_model()
    for jet in model.jets():
        mom = model.momentum_of_jet(jet)
        assert mom.kind == VarKind.MOMENTUM
        assert model.jet_of_momentum(mom) == jet


def test_component_of():
    model = make_model()
    mom = Variable(VarKind.MOMENTUM, "P", (1, 0, 2))
    assert model.component_of(mom) == Variable(VarKind.FIELD, "P", (0, 2))
    jet = Variable(VarKind.JET, "A", (0, 3))
    assert model.component_of(jet) == Variable(VarKind.FIELD, "A", (3,))
