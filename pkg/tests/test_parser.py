"""Model DSL, phase-expression dialect, and solution-file parsing."""

from fractions import Fraction

import pytest

from ddw import numeric
from ddw.expr import Expression, Variable, VarKind
from ddw.parser import (ParseError, parse_model, parse_phase_expression,
                        parse_solution, render_model)

SCALAR = """
dim 4;
signature + - - -;
field phi;
lagrangian 1/2 * d(phi, mu) * d(phi, mu) - 1/2 * phi^2;
"""


def jet(base, mu, *comp):
    return Expression.var(Variable(VarKind.JET, base, (mu,) + tuple(comp)))


def fld(base, *comp):
    return Expression.var(Variable(VarKind.FIELD, base, tuple(comp)))


def test_scalar_model_contraction():
    model = parse_model(SCALAR, "scalar")
    phi = fld("phi")
    expected = jet("phi", 0) ** 2 * Fraction(1, 2)
    for mu in range(1, 4):
        expected = expected - jet("phi", mu) ** 2 * Fraction(1, 2)
    expected = expected - phi * phi * Fraction(1, 2)
    assert model.lagrangian == expected
    assert model.space.dim == 4
    assert model.space.signature == (1, -1, -1, -1)


def test_signature_accepts_commas_and_spaces():
    a = parse_model("dim 2; signature + -; field u; lagrangian u^2;")
    b = parse_model("dim 2; signature +,-; field u; lagrangian u^2;")
    assert a.space.signature == b.space.signature == (1, -1)


def test_comments_are_skipped():
    text = "# heading\ndim 1;\nsignature +; # trailing\nfield q;\nlagrangian q^2;\n"
    model = parse_model(text)
    assert model.space.dim == 1


def test_named_index_must_appear_twice():
    with pytest.raises(ParseError) as err:
        parse_model("dim 2; signature + -; field A[_mu]; lagrangian A[mu];")
    assert "mu" in str(err.value)


def test_antisymmetric_components_canonicalize():
    model = parse_model(
        "dim 2; signature + -; field P[^a,^b] antisymmetric;"
        "lagrangian P[1,0] * P[0,1];")
    p01 = fld("P", 0, 1)
    assert model.lagrangian == -(p01 * p01)


def test_antisymmetric_diagonal_vanishes():
    model = parse_model(
        "dim 2; signature + -; field P[^a,^b] antisymmetric;"
        "lagrangian P[0,0] + P[0,1];")
    assert model.lagrangian == fld("P", 0, 1)


def test_reserved_field_names_rejected():
    for bad in ("x", "S", "d", "p", "DS"):
        with pytest.raises(ParseError):
            parse_model("dim 1; signature +; field %s; lagrangian 1;" % bad)


def test_duplicate_field_rejected():
    with pytest.raises(ParseError):
        parse_model("dim 1; signature +; field q; field q; lagrangian q;")


def test_symmetry_marker_requires_two_indices():
    with pytest.raises(ParseError):
        parse_model("dim 2; signature + -; field v[_a] antisymmetric; lagrangian 1;")


def test_missing_lagrangian_rejected():
    with pytest.raises(ParseError) as err:
        parse_model("dim 1; signature +; field q;")
    assert "lagrangian" in str(err.value)


def test_lagrangian_before_geometry_rejected():
    with pytest.raises(ParseError):
        parse_model("field q; lagrangian q; dim 1; signature +;")


def test_parse_error_carries_position():
    with pytest.raises(ParseError) as err:
        parse_model("dim 1;\nsignature +;\nfield A[;\nlagrangian 1;")
    assert err.value.line == 3
    assert err.value.col > 0


def test_unknown_statement():
    with pytest.raises(ParseError) as err:
        parse_model("dim 1; signature +; banana;")
    assert "banana" in str(err.value)


def test_render_model_round_trip(palatini_model, standard_model):
    for model in (palatini_model, standard_model):
        text = render_model(model)
        again = parse_model(text, model.name)
        assert again.lagrangian == model.lagrangian
        assert again.space == model.space
        assert [f.name for f in again.fields] == [f.name for f in model.fields]
        assert render_model(again) == text


def test_derivative_index_contraction_inserts_metric():
    # d(A[nu], mu) * d(A[nu], mu) contracts both pairs with the metric
    model = parse_model(
        "dim 2; signature + -; field A[_mu];"
        "lagrangian d(A[nu], mu) * d(A[nu], mu);")
    expected = (jet("A", 0, 0) ** 2
                - jet("A", 0, 1) ** 2
                - jet("A", 1, 0) ** 2
                + jet("A", 1, 1) ** 2)
    assert model.lagrangian == expected


def test_phase_expression_round_trip():
    texts = [
        "1/2*p(A[1],0)^2 - 1/2*p(A[2],1)^2",
        "d(A[1],0) - d(A[0],1)",
        "DS(0,A[1]) + DS(1,A[0])",
        "d(S[0],0) + d(S[1],1)",
        "-d(p(A[1],0),1) - d(p(A[2],0),2)",
        "d(d(A[1],0),0)",
        "0",
    ]
    for text in texts:
        expr = parse_phase_expression(text)
        assert str(expr) == text


def test_phase_expression_rejects_trailing_input():
    with pytest.raises(ParseError):
        parse_phase_expression("p(A[1],0) p(A[2],0)")


def test_parse_solution_plane_wave(plane_wave_solution):
    sol = plane_wave_solution
    assert len(sol.fields) == 4
    assert len(sol.fluxes) == 4
    a2 = Variable(VarKind.FIELD, "A", (2,))
    val = numeric.evaluate(sol.fields[a2], [0.0, 0.0, 0.0, 0.0], {})
    assert val == pytest.approx(1.0)
    flux0 = numeric.evaluate(sol.fluxes[0], [0.0, 0.0, 0.0, 0.0], {a2: 3.0})
    assert flux0 == pytest.approx(0.0)


def test_solution_field_values_must_be_coordinate_only():
    with pytest.raises(ParseError) as err:
        parse_solution("A[0] = A[1];")
    assert "coordinates" in str(err.value)


def test_solution_flux_may_reference_fields():
    sol = parse_solution("S[0] = sin(x[1]) * B[2];")
    assert 0 in sol.fluxes


def test_solution_rejects_double_assignment():
    with pytest.raises(ParseError):
        parse_solution("A[0] = 1; A[0] = 2;")
    with pytest.raises(ParseError):
        parse_solution("S[0] = 1; S[0] = 2;")


def test_solution_rejects_flux_in_expression():
    with pytest.raises(ParseError):
        parse_solution("A[0] = S[1];")
