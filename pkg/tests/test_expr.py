"""Exact polynomial arithmetic over named variables."""

from fractions import Fraction

import pytest

from ddw.expr import ONE, ZERO, Expression, Variable, VarKind, expr_sum

Q = Variable(VarKind.FIELD, "q")
U = Variable(VarKind.FIELD, "u")
P = Variable(VarKind.MOMENTUM, "q", (0,))
J = Variable(VarKind.JET, "q", (0,))

q = Expression.var(Q)
u = Expression.var(U)
p = Expression.var(P)


def test_constants_behave_like_rationals():
    assert Expression.const(Fraction(1, 2)).constant_value() == Fraction(1, 2)
    assert (Expression.const(2) + Expression.const(-2)).is_zero()
    assert ZERO.is_zero() and ONE.is_constant()
    assert ONE.constant_value() == 1


def test_ring_identities():
    assert (q + u) * (q - u) == q * q - u * u
    assert (q + 1) ** 3 == q ** 3 + 3 * q ** 2 + 3 * q + 1
    assert q - q == ZERO
    assert q * ZERO == ZERO
    assert q * 1 == q


def test_fraction_coefficients_stay_exact():
    e = q * Fraction(1, 3) + q * Fraction(1, 6)
    assert e == q * Fraction(1, 2)
    third = (ONE * Fraction(1, 3)) * 3
    assert third == ONE


def test_pow_rejects_negative_exponent():
    with pytest.raises(ValueError):
        q ** -1


def test_degree_and_variables():
    e = q * q * u + p
    assert e.total_degree() == 3
    assert e.variables() == {Q, U, P}
    assert ZERO.total_degree() == 0
    assert ZERO.variables() == set()


def test_diff_respects_product_rule():
    e = q * q * u
    assert e.diff(Q) == 2 * q * u
    assert e.diff(U) == q * q
    assert e.diff(P) == ZERO


def test_substitute_single_pass():
    rules = {Q: u + 1}
    assert q.substitute(rules) == u + 1
    assert (q * q).substitute(rules) == (u + 1) * (u + 1)


def test_substitute_fixpoint_chains_rules():
    rules = {Q: u, U: p}
    assert q.substitute(rules, fixpoint=True) == p
    assert q.substitute(rules) == u


def test_evaluate_plugs_floats():
    e = q * q - u * Fraction(1, 2)
    assert e.evaluate({Q: 3.0, U: 4.0}) == pytest.approx(7.0)


def test_str_orders_terms_deterministically():
    e = u + q + ONE
    assert str(e) == "1 + q + u"
    assert str(q - u) == "q - u"
    assert str(q * Fraction(-1, 2)) == "-1/2*q"
    assert str(ZERO) == "0"


def test_variable_str_forms():
    assert str(Variable(VarKind.COORDINATE, "x", (2,))) == "x[2]"
    assert str(Variable(VarKind.FIELD, "A", (1,))) == "A[1]"
    assert str(Variable(VarKind.MOMENTUM, "A", (0, 1))) == "p(A[1],0)"
    assert str(Variable(VarKind.JET, "A", (2, 0))) == "d(A[0],2)"
    assert str(Variable(VarKind.JET2, "A", (0, 1, 2))) == "d(d(A[2],0),1)"
    assert str(Variable(VarKind.FLUX, "S", (3,))) == "S[3]"
    assert str(Variable(VarKind.FLUX_JET, "S", (0, 1))) == "d(S[1],0)"
    assert str(Variable(VarKind.FLUX_DERIV, "A", (0, 1))) == "DS(0,A[1])"
    assert str(Variable(VarKind.MOMENTUM_JET, "A", (1, 0, 2))) == "d(p(A[2],0),1)"


def test_variable_ordering_groups_by_kind():
    assert Q < P
    assert Variable(VarKind.COORDINATE, "x", (0,)) < Q
    assert Variable(VarKind.MOMENTUM, "q", (0,)) < Variable(VarKind.MOMENTUM, "q", (1,))


def test_expr_sum():
    assert expr_sum([q, u, q]) == 2 * q + u
    assert expr_sum([]) == ZERO


def test_sorted_terms_is_stable():
    e = q * u + p * 2 + ONE
    assert list(e.sorted_terms()) == list(e.sorted_terms())


def test_hash_consistent_with_eq():
    assert hash(q + u) == hash(u + q)
    assert len({q + u, u + q}) == 1
