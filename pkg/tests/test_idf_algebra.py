# -*- coding: utf-8 -*-
"""
Unit tests for iterated differential forms

- slot sets and generator signs
- slot differentials and their splitting
- restriction, pullback along F and the Liouville lift
- parsing / printing of forms
"""

import pytest

from src.expr_core import MultiIndex
from src.idf_algebra import (
    EMPTY,
    MAX_SLOTS,
    IDForm,
    SlotMismatchError,
    SlotRangeError,
    SlotSet,
    base_generator,
    d_horizontal,
    d_K_vertical,
    d_slot,
    d_vertical,
    apply_liouville_lift,
    is_cartan,
    liouville_lift_F,
    liouville_vector_field,
    pullback_F,
    restrict_form,
    total_derivative_idf,
    vertical_generator,
    w_derivation,
    w_derivation_F,
)
from src.jet_calculus import target_space
from tests.utils import corpus_system, expr, form, jet_space

X0 = MultiIndex((0, 0))
X1 = MultiIndex((1, 0))


def V(slots, sigma=X0, nslots=1, space=None):
    space = space or jet_space()
    return IDForm.generator(vertical_generator(SlotSet.of(*slots), 0, sigma), space, nslots)


def B(slots, mu, nslots=1):
    return IDForm.generator(base_generator(SlotSet.of(*slots), mu), jet_space(), nslots)


def test_slot_sets():
    assert [str(K) for K in SlotSet.all_subsets(2)] == ["", "1", "2", "1,2"]
    K = SlotSet.of(1, 3)
    assert 3 in K and 2 not in K
    assert K.indicator(3) == (1, 0, 1)
    assert K.overlap(SlotSet.of(3)) == 1
    assert (K - SlotSet.of(1)) == SlotSet.of(3)
    with pytest.raises(SlotRangeError):
        SlotSet.of(MAX_SLOTS + 1)


def test_generator_signs():
    a, b = V([1]), V([1], X1)
    assert a * b == -(b * a), "odd generators in the same slot anticommute"
    assert (a * a).is_zero
    c, d = V([1], nslots=2), V([2], nslots=2)
    assert c * d == d * c, "generators in disjoint slots commute"
    e = V([1, 2], nslots=2)
    assert not (e * e).is_zero, "a generator of bidegree (1, 1) is even"


def test_slot_differential_of_a_coordinate():
    u = IDForm.scalar(expr("u"), jet_space(), 1)
    horizontal = B([1], 0) * expr("u_x") + B([1], 1) * expr("u_t")
    assert d_horizontal(u, 1) == horizontal
    assert d_vertical(u, 1) == V([1])
    assert d_slot(u, 1) == horizontal + V([1])
    assert form("d[1]u", 1) == d_slot(u, 1)


def test_differentials_square_to_zero():
    w = form("u^2*u_x*dv[1]u + x*d[1]t", 2)
    for i in (1, 2):
        assert d_slot(d_slot(w, i), i).is_zero
        assert d_vertical(d_vertical(w, i), i).is_zero
    assert d_slot(d_slot(w, 1), 2) == d_slot(d_slot(w, 2), 1)


def test_vertical_differential_shifts_slot_sets():
    assert d_vertical(V([1], nslots=2), 2) == V([1, 2], nslots=2)
    assert d_vertical(V([1], nslots=2), 1).is_zero
    assert d_K_vertical(expr("u^2"), SlotSet.of(1), jet_space(), 1) == V([1]) * expr("2*u")
    assert d_K_vertical(expr("u"), EMPTY, jet_space(), 0) == IDForm.scalar(expr("u"), jet_space(), 0)


def test_slot_errors():
    with pytest.raises(SlotRangeError):
        V([2], nslots=1)
    with pytest.raises(SlotRangeError):
        IDForm.zero(jet_space(), MAX_SLOTS + 1)
    with pytest.raises(SlotMismatchError):
        V([1], nslots=1) + V([1], nslots=2)
    with pytest.raises(SlotRangeError):
        d_slot(V([1]), 2)


def test_printing_and_parsing():
    w = V([1], X1) * expr("u")
    assert str(w) == "u*dv[1]u_x"
    assert form("u*dv[1]u_x", 1) == w
    assert str(V([1, 2], nslots=2)) == "dv[1,2]u"
    assert form("dv[1]x", 1).is_zero
    assert is_cartan(w) and not is_cartan(B([1], 0))


def test_restriction_of_forms():
    heat = corpus_system("heat")
    space = heat.space
    w = IDForm.generator(vertical_generator(SlotSet.of(1), 0, MultiIndex((0, 1))), space, 1)
    assert restrict_form(w * expr("u_t"), heat) == V([1], MultiIndex((2, 0))) * expr("u_xx")


def test_pullback_along_the_heat_operator():
    heat = corpus_system("heat")
    tspace = target_space(heat)
    v = IDForm.scalar(expr("v", tspace), tspace, 1)
    dv = IDForm.generator(vertical_generator(SlotSet.of(1), 0, X0), tspace, 1)
    assert pullback_F(v, heat) == IDForm.scalar(expr("u_t - u_xx"), heat.space, 1)
    expected = V([1], MultiIndex((0, 1))) - V([1], MultiIndex((2, 0)))
    assert pullback_F(dv, heat) == expected
    assert pullback_F(v * dv, heat) == pullback_F(v, heat) * pullback_F(dv, heat)


def test_liouville_field_reproduces_the_lift():
    kdv = corpus_system("kdv")
    tspace = target_space(kdv)
    dv = IDForm.generator(vertical_generator(SlotSet.of(1), 0, X0), tspace, 1)
    assert liouville_vector_field(dv) == dv
    lift = liouville_lift_F(kdv, 2)
    assert pullback_F(liouville_vector_field(dv), kdv) == lift[(0, SlotSet.of(1))].form
    assert set(lift) == {(0, EMPTY), (0, SlotSet.of(1))}
    assert liouville_lift_F(kdv, 1)[(0, EMPTY)].form == IDForm.scalar(kdv.defining_function(0), kdv.space, 0)


def test_w_derivations_are_dual_to_vertical_generators():
    heat = corpus_system("heat")
    tspace = target_space(heat)
    v2 = IDForm.scalar(expr("v^2", tspace), tspace, 1)
    dv = IDForm.generator(vertical_generator(SlotSet.of(1), 0, X0), tspace, 1)
    w = v2 * dv
    assert w_derivation(w, 0, EMPTY) == dv * expr("2*v", tspace)
    assert w_derivation(w, 0, SlotSet.of(1)) == v2
    assert w_derivation_F(v2, 0, EMPTY, heat) == IDForm.scalar(expr("2*u_t - 2*u_xx"), heat.space, 1)


def test_lift_pairs_each_form_with_its_derivation():
    kdv = corpus_system("kdv")
    tspace = target_space(kdv)
    v2 = IDForm.scalar(expr("v^2", tspace), tspace, 1)
    dv = IDForm.generator(vertical_generator(SlotSet.of(1), 0, X0), tspace, 1)
    lift = liouville_lift_F(kdv, 2)
    component = lift[(0, EMPTY)]
    assert (component.a, component.slots) == (0, EMPTY)
    assert component.derivation(v2) == w_derivation_F(v2, 0, EMPTY, kdv)
    assert lift[(0, SlotSet.of(1))].derivation(v2 * dv) == pullback_F(v2, kdv)
    w = v2 * dv
    assert apply_liouville_lift(lift, w) == pullback_F(liouville_vector_field(w), kdv)


def test_sums_print_bare_unless_a_generator_follows():
    space = jet_space()
    assert str(IDForm.scalar(expr("6*t*u_x + 1"), space, 1)) == "6*t*u_x + 1"
    assert str(V([1], X1) * expr("u + 1")) == "(u + 1)*dv[1]u_x"


def test_cartan_forms_are_stable():
    w = form("u^2*dv[1]u*dv[2]u_x + u_x*dv[1,2]u", 2)
    c = form("x*dv[2]u_t", 2)
    assert is_cartan(w) and is_cartan(c)
    for mu in (0, 1):
        assert is_cartan(total_derivative_idf(w, mu))
    for K in (SlotSet.of(1), SlotSet.of(2), SlotSet.of(1, 2)):
        assert is_cartan(d_K_vertical(w, K))
    assert is_cartan(w * c) and is_cartan(c * w)
    assert not is_cartan(d_horizontal(w, 1)), "d^h brings in d x"
