"""Numeric expression trees: evaluation and exact field-direction derivatives."""

import math

import pytest

from ddw.numeric import (Add, Call, Coord, FieldVal, Mul, Num, Pow, diff_field,
                         evaluate, field_atoms)
from ddw.expr import Variable, VarKind

A0 = Variable(VarKind.FIELD, "A", (0,))
A1 = Variable(VarKind.FIELD, "A", (1,))


def test_evaluate_arithmetic():
    node = Add((Mul((Num(2.0), Coord(1))), Pow(Coord(0), 2)))
    assert evaluate(node, [3.0, 5.0], {}) == pytest.approx(19.0)


def test_evaluate_calls():
    x = [0.3, 0.0]
    assert evaluate(Call("sin", Coord(0)), x, {}) == pytest.approx(math.sin(0.3))
    assert evaluate(Call("cos", Coord(0)), x, {}) == pytest.approx(math.cos(0.3))
    assert evaluate(Call("exp", Coord(0)), x, {}) == pytest.approx(math.exp(0.3))


def test_evaluate_field_values():
    node = Mul((FieldVal(A0), FieldVal(A1)))
    assert evaluate(node, [0.0], {A0: 2.0, A1: -3.0}) == pytest.approx(-6.0)


def test_field_atoms():
    node = Add((FieldVal(A0), Mul((Num(2.0), Call("sin", FieldVal(A1))))))
    assert field_atoms(node) == {A0, A1}
    assert field_atoms(Coord(0)) == set()


def test_diff_field_product_rule():
    node = Mul((FieldVal(A0), FieldVal(A0)))
    d = diff_field(node, A0)
    assert evaluate(d, [0.0], {A0: 5.0}) == pytest.approx(10.0)


def test_diff_field_power_rule():
    node = Pow(FieldVal(A0), 3)
    d = diff_field(node, A0)
    assert evaluate(d, [0.0], {A0: 2.0}) == pytest.approx(12.0)


def test_diff_field_chain_rule_through_calls():
    node = Call("sin", Mul((Num(2.0), FieldVal(A0))))
    d = diff_field(node, A0)
    at = 0.7
    assert evaluate(d, [0.0], {A0: at}) == pytest.approx(2.0 * math.cos(2.0 * at))


def test_diff_field_other_variable_is_zero():
    node = Pow(FieldVal(A0), 2)
    d = diff_field(node, A1)
    assert evaluate(d, [0.0], {A0: 4.0, A1: 1.0}) == pytest.approx(0.0)


def test_diff_field_ignores_coordinates():
    node = Mul((Coord(0), FieldVal(A0)))
    d = diff_field(node, A0)
    assert evaluate(d, [2.5], {A0: 1.0}) == pytest.approx(2.5)


def test_diff_matches_finite_difference():
    node = Call("exp", Mul((FieldVal(A0), FieldVal(A1))))
    d = diff_field(node, A0)
    x = [0.0]
    vals = {A0: 0.4, A1: -0.8}
    h = 1e-6
    up = evaluate(node, x, {A0: vals[A0] + h, A1: vals[A1]})
    dn = evaluate(node, x, {A0: vals[A0] - h, A1: vals[A1]})
    assert evaluate(d, x, vals) == pytest.approx((up - dn) / (2 * h), rel=1e-8)
