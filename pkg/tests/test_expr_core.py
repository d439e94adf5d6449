# -*- coding: utf-8 -*-
"""
Unit tests for expressions on jets

- multi-indices and jet coordinates
- canonical forms (polynomial and rational)
- printing / re-parsing
- parse errors with positions
"""

import pytest
import sympy as sp

from src.expr_core import (
    ExpressionSyntaxError,
    JetExpression,
    MultiIndex,
    UnknownIdentifierError,
    ZeroDenominatorError,
    partial_derivative,
    print_expression,
    substitute,
)
from tests.utils import expr, jet_space


def test_multi_index_arithmetic():
    sigma = MultiIndex((2, 1))
    assert sigma.order == 3
    assert sigma.steps() == [0, 0, 1]
    assert sigma.letters(("x", "t")) == "xxt"
    assert sigma.binomial(MultiIndex((1, 1))) == 2
    assert len(sigma.sub_indices()) == 6, "(2,1) has 3 * 2 sub-indices"
    assert sigma - MultiIndex((1, 0)) == MultiIndex((1, 1))
    with pytest.raises(ValueError):
        MultiIndex((0, -1))


def test_coordinate_names_are_order_independent():
    space = jet_space()
    assert space.coordinate("u_{tx}") == space.coordinate("u_xt")
    assert space.coordinate("u_xxt").order == 3
    assert space.coordinate("x").is_independent
    assert space.u(0, MultiIndex((0, 1))).name == "u_t"


def test_unknown_coordinate():
    with pytest.raises(UnknownIdentifierError):
        jet_space().coordinate("w_x")


def test_fresh_names_avoid_declared_variables():
    space = jet_space("u", "phi")
    assert space.fresh_names("phi", 2) == ["phi1", "phi2"]
    assert space.fresh_names("psi", 1) == ["psi"]


def test_canonical_polynomials_compare_structurally():
    assert expr("u*u_x + u_x*u") == expr("2*u*u_x")
    assert expr("(u + 1)^2") == expr("u^2 + 2*u + 1")
    assert expr("u - u").is_zero
    assert hash(expr("u*u_x")) == hash(expr("u_x*u"))


def test_canonical_rational_functions():
    assert expr("(u^2 - 1)/(u - 1)") == expr("u + 1")
    e = expr("1/(2*u)")
    assert not e.is_polynomial
    assert e * expr("u") == JetExpression.constant(sp.Rational(1, 2))


@pytest.mark.parametrize(
    "text",
    ["3*u^2 + u_xx", "6*u*u_x + u_xxx", "x*u + 2*t*u_x", "-u_t", "u/(1 + u^2)", "(u + u_x)/(u - 1)"],
)
def test_printed_form_reparses_to_same_value(text):
    e = expr(text)
    assert expr(print_expression(e)) == e, f"round trip failed for {text}"


def test_printer_uses_caret_for_powers():
    assert print_expression(expr("u*u")) == "u^2"


def test_syntax_error_reports_position():
    with pytest.raises(ExpressionSyntaxError) as info:
        expr("u + * u")
    assert info.value.position > 0


def test_unknown_identifier_and_zero_denominator():
    with pytest.raises(UnknownIdentifierError):
        expr("u + w")
    with pytest.raises(ZeroDenominatorError):
        expr("u/0")


def test_partial_derivative_and_substitution():
    space = jet_space()
    e = expr("u^2*u_x")
    assert partial_derivative(e, space.coordinate("u")) == expr("2*u*u_x")
    assert partial_derivative(e, space.coordinate("u_xx")).is_zero
    assert substitute(e, {space.coordinate("u_x"): expr("u")}) == expr("u^3")
    with pytest.raises(ZeroDenominatorError):
        substitute(expr("1/u"), {space.coordinate("u"): expr("0")})
