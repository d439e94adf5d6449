# -*- coding: utf-8 -*-
"""
Unit tests for the free and restricted jet calculus

- total derivatives, Euler operator, divergences
- evolution-form check
- restriction to the infinite prolongation
"""

import pytest

from src.jet_calculus import (
    NormalFormError,
    ProlongationCapError,
    Section,
    euler_operator,
    evolutionary_derivation,
    internal_total_derivative,
    is_internal,
    is_normal_form,
    is_total_divergence,
    lie_bracket_free,
    prolong,
    require_normal_form,
    restrict_to_equation,
    target_space,
    total_derivative,
)
from src.expr_core import MultiIndex
from tests.utils import corpus_system, expr, jet_space, make_system, section


@pytest.fixture
def kdv():
    return corpus_system("kdv")


@pytest.fixture
def heat():
    return corpus_system("heat")


def test_total_derivatives():
    space = jet_space()
    assert total_derivative(expr("u*u_x"), 0, space) == expr("u_x^2 + u*u_xx")
    assert total_derivative(expr("x*u"), 0, space) == expr("u + x*u_x")
    assert total_derivative(expr("t"), 1, space) == expr("1")
    assert prolong(expr("u"), MultiIndex((2, 1)), space) == expr("u_xxt")


def test_euler_operator_of_kdv_density():
    space = jet_space()
    assert euler_operator(expr("u^3 - u_x^2/2"), space) == section("3*u^2 + u_xx")


def test_total_divergences_are_recognized():
    space = jet_space()
    assert is_total_divergence(total_derivative(expr("u^2*u_x"), 0, space), space)
    assert is_total_divergence(expr("u_x*u_xx"), space)
    assert not is_total_divergence(expr("u^2"), space)


def test_corpus_systems_are_in_evolution_form(kdv, heat):
    assert is_normal_form(kdv)[0]
    assert is_normal_form(heat)[0]
    assert kdv.describe() == ["u_t = 6*u*u_x + u_xxx"]


def test_not_solved_for_leading_derivative():
    E = make_system("bad", ["u_x = u_t"])
    ok, diagnostics = is_normal_form(E)
    assert not ok
    assert any("u_t" in d for d in diagnostics), diagnostics
    with pytest.raises(NormalFormError):
        require_normal_form(E)


def test_missing_equation_for_a_dependent_variable():
    E = make_system("half", ["u_t = v_x"], dependent="u, v")
    ok, diagnostics = is_normal_form(E)
    assert not ok
    assert any("no evolution equation for v" in d for d in diagnostics)


def test_restriction_rewrites_leading_derivatives(kdv, heat):
    assert restrict_to_equation(expr("u_t"), kdv) == expr("6*u*u_x + u_xxx")
    assert restrict_to_equation(expr("u_tt"), heat) == expr("u_xxxx")
    assert restrict_to_equation(expr("u_xt"), heat) == expr("u_xxx")
    assert restrict_to_equation(expr("u*u_x"), heat) == expr("u*u_x")
    assert is_internal(restrict_to_equation(expr("u_tt*u_xt"), kdv), kdv)


def test_internal_total_derivative(heat):
    assert internal_total_derivative(expr("u_x"), 1, heat) == expr("u_xxx")


def test_prolongation_cap(kdv):
    with pytest.raises(ProlongationCapError):
        restrict_to_equation(expr("u_tt"), kdv, cap=4)


def test_target_space_names():
    assert target_space(corpus_system("kdv")).dependent == ("v",)
    assert target_space(corpus_system("wave2")).dependent == ("v1", "v2")


def test_evolutionary_derivation_and_free_bracket():
    space = jet_space()
    assert evolutionary_derivation(section("u_x"), expr("u^2"), space) == expr("2*u*u_x")
    bracket = lie_bracket_free(section("u_x"), section("u^2"), space)
    assert bracket.is_zero, "x-translation commutes with any autonomous field"
    assert lie_bracket_free(section("u"), section("u^2"), space) == section("u^2")
    assert isinstance(bracket, Section)


@pytest.mark.parametrize("name", ["kdv", "heat", "burgers"])
@pytest.mark.parametrize("mu", [0, 1])
def test_restriction_commutes_with_total_derivatives(name, mu):
    E = corpus_system(name)
    f = expr("u*u_t + x*u_x^2 + u_xt")
    lhs = restrict_to_equation(total_derivative(f, mu, E.space), E)
    rhs = internal_total_derivative(restrict_to_equation(f, E), mu, E)
    assert lhs == rhs, f"{name}: restriction and D_{E.space.independent[mu]} do not commute"


@pytest.mark.parametrize("density", ["u^3 - u_x^2/2", "t*u^2*u_x + x*u_t", "u*u_xt"])
def test_euler_operator_kills_time_derivatives(density):
    space = jet_space()
    assert euler_operator(total_derivative(expr(density), 1, space), space).is_zero
