"""Exterior algebra on the polymomentum phase space: wedge, Hodge pair, bullet."""

from fractions import Fraction

import pytest

from ddw.expr import Expression, Variable, VarKind, ONE
from ddw.forms import Form, Spacetime, VerticalVector, bullet, form_sum

SP4 = Spacetime(4, (1, -1, -1, -1))
SP2 = Spacetime(2, (1, -1))
SP1 = Spacetime(1, (1,))

A0 = Variable(VarKind.FIELD, "A", (0,))
A1 = Variable(VarKind.FIELD, "A", (1,))
P00 = Variable(VarKind.MOMENTUM, "A", (0, 0))


def dx(space, i):
    return space.dx(i)


def test_spacetime_validates_signature():
    with pytest.raises(ValueError):
        Spacetime(2, (1,))
    with pytest.raises(ValueError):
        Spacetime(1, (2,))


def test_volume_and_dx():
    vol = SP4.volume()
    assert vol.coefficient((), (0, 1, 2, 3)) == ONE
    assert SP4.dx(2).coefficient((), (2,)) == ONE


def test_upsilon_alternating_signs():
    assert SP4.upsilon(0).coefficient((), (1, 2, 3)) == ONE
    assert SP4.upsilon(1).coefficient((), (0, 2, 3)) == Expression.const(-1)
    assert SP4.upsilon(2).coefficient((), (0, 1, 3)) == ONE
    assert SP4.upsilon(3).coefficient((), (0, 1, 2)) == Expression.const(-1)
    assert SP1.upsilon(0).coefficient((), ()) == ONE


def test_dx_wedge_upsilon_gives_volume():
    for alpha in range(4):
        assert SP4.dx(alpha).wedge(SP4.upsilon(alpha)) == SP4.volume()
        for beta in range(4):
            if beta != alpha:
                assert SP4.dx(beta).wedge(SP4.upsilon(alpha)).is_zero()


def test_wedge_antisymmetry_and_repeats():
    a, b = SP4.dx(0), SP4.dx(1)
    assert a.wedge(b) == -(b.wedge(a))
    assert a.wedge(a).is_zero()


def test_wedge_reorders_with_sign():
    w = SP4.dx(2).wedge(SP4.dx(0))
    assert w.coefficient((), (0, 2)) == Expression.const(-1)


def test_vertical_wedge_commutation():
    da = Form.vertical(SP4, A0)
    db = Form.vertical(SP4, A1)
    assert da.wedge(db) == -(db.wedge(da))
    assert da.wedge(da).is_zero()
    # vertical 1-form past a horizontal 1-form also picks up a sign
    h = SP4.dx(3)
    assert da.wedge(h) == -(h.wedge(da))


def test_scalar_multiplication_and_addition():
    f = SP4.dx(0) * Fraction(1, 2) + SP4.dx(0) * Fraction(1, 2)
    assert f == SP4.dx(0)
    assert (f - f).is_zero()


def test_mixed_dimension_operations_rejected():
    with pytest.raises(ValueError):
        SP4.dx(0) + SP2.dx(0)


def test_vertical_differential_of_scalar():
    f = Form.scalar(SP4, Expression.var(A0) * Expression.var(A0))
    d = f.vertical_differential()
    assert d.coefficient((A0,), ()) == 2 * Expression.var(A0)


def test_vertical_differential_squares_to_zero():
    coeff = Expression.var(A0) * Expression.var(P00) + Expression.var(A1) ** 3
    f = Form.scalar(SP4, coeff).wedge(SP4.dx(1))
    assert f.vertical_differential().vertical_differential().is_zero()


def test_contract_coordinate():
    vol = SP4.volume()
    assert vol.contract_coordinate(0) == SP4.upsilon(0)
    assert vol.contract_coordinate(1) == SP4.upsilon(1)
    # interior product is an antiderivation: second contraction flips order sign
    assert vol.contract_coordinate(0).contract_coordinate(1) == \
        -(vol.contract_coordinate(1).contract_coordinate(0))


def test_contract_vertical():
    da = Form.vertical(SP4, A0)
    vec = VerticalVector(SP4)
    vec.add(A0, Expression.const(1))
    assert da.contract_vertical(vec) == Form.scalar(SP4, ONE)
    db = Form.vertical(SP4, A1)
    assert db.contract_vertical(vec).is_zero()


def test_substitute_vertical_drops_constant_directions():
    da = Form.vertical(SP4, A0)
    dp = Form.vertical(SP4, P00)
    mixed = da.wedge(dp)
    out = mixed.substitute_vertical({P00: Expression.const(0)})
    assert out.is_zero()
    chained = mixed.substitute_vertical({P00: Expression.var(A1)})
    assert chained == da.wedge(Form.vertical(SP4, A1))


def test_hodge_is_signed_involution():
    # on an (n, signature) space ** = s * (-1)^(k(n-k)) with s the metric determinant sign
    for k_form, k in [(Form.scalar(SP4, ONE), 0), (SP4.dx(0), 1),
                      (SP4.dx(1), 1), (SP4.dx(0).wedge(SP4.dx(1)), 2),
                      (SP4.upsilon(2), 3), (SP4.volume(), 4)]:
        det_sign = -1  # (+,-,-,-) determinant
        expect = k_form * Fraction(det_sign * (-1) ** (k * (4 - k)))
        assert k_form.hodge().hodge() == expect


def test_costar_composes_with_hodge_to_metric_sign():
    # costar undoes hodge up to the metric determinant sign: -1 here
    for f in [Form.scalar(SP4, ONE), SP4.dx(0), SP4.dx(2),
              SP4.dx(0).wedge(SP4.dx(3)), SP4.upsilon(1), SP4.volume()]:
        assert f.hodge().costar() == f * Fraction(-1)
        assert f.costar().hodge() == f * Fraction(-1)
    euclid = Spacetime(2, (1, 1))
    for f in [Form.scalar(euclid, ONE), euclid.dx(0), euclid.volume()]:
        assert f.hodge().costar() == f
        assert f.costar().hodge() == f


def test_hodge_on_basis_one_forms():
    # *dx^mu = eta^{mumu} upsilon_mu for a diagonal metric
    for mu in range(4):
        eta = SP4.eta(mu)
        assert SP4.dx(mu).hodge() == SP4.upsilon(mu) * Fraction(eta)


def test_bullet_pairs_dx_with_upsilon():
    for alpha in range(4):
        for mu in range(4):
            got = bullet(SP4.dx(alpha), SP4.upsilon(mu))
            if alpha == mu:
                assert got == Form.scalar(SP4, ONE)
            else:
                assert got.is_zero()


def test_bullet_divergence_shape():
    # bullet of dx^alpha against N^mu upsilon_mu keeps only the alpha component
    n_form = form_sum(SP4, [SP4.upsilon(mu) * Expression.var(Variable(VarKind.FIELD, "N", (mu,)))
                            for mu in range(4)])
    for alpha in range(4):
        got = bullet(SP4.dx(alpha), n_form)
        assert got == Form.scalar(SP4, Expression.var(Variable(VarKind.FIELD, "N", (alpha,))))


def test_upsilon_components_round_trip():
    f = form_sum(SP4, [SP4.upsilon(mu) * Expression.var(A0) * Fraction(mu + 1)
                       for mu in range(4)])
    comps = f.upsilon_components()
    assert len(comps) == 4
    for mu, comp in enumerate(comps):
        assert comp == Expression.var(A0) * Fraction(mu + 1)
    assert Form.from_upsilon_components(SP4, comps) == f


def test_degrees_reports_vertical_horizontal_pairs():
    assert SP4.dx(0).degrees() == {(0, 1)}
    assert Form.vertical(SP4, A0).wedge(SP4.dx(1)).degrees() == {(1, 1)}
    assert Form.zero(SP4).degrees() == set()


def test_str_rendering():
    f = SP4.dx(0).wedge(SP4.dx(1)) * Fraction(-1)
    assert str(f) == "(-1) dx0^dx1"
    g = Form.vertical(SP4, A0).wedge(SP4.upsilon(0))
    assert str(g) == "dA[0]^dx1^dx2^dx3"
    assert str(Form.zero(SP4)) == "0"
