# -*- coding: utf-8 -*-
"""
Tests for the bounded-order kernel solver

- classical symmetries and cosymmetries of corpus systems
- lifted cosymmetries at levels 1 and 2
- ansatz listing, caps, span membership and the kernel table
"""

import pytest

from src.cdiff_operators import apply
from src.determining_solver import (
    AnsatzOverflowError,
    AnsatzSpace,
    cosymmetries,
    enumerate_ansatz,
    kernel_to_frame,
    lie_bracket,
    lifted_adjoint,
    lifted_cosymmetries,
    span_contains,
    symmetries,
)
from src.idf_algebra import IDForm, SlotSet, d_K_vertical
from tests.utils import corpus_system, expr, section


def assert_same_span(found, expected):
    assert len(found) == len(expected), f"dimension {len(found)} != {len(expected)}"
    for element in expected:
        assert span_contains(found, element), f"{element} missing from the kernel"


def test_kdv_cosymmetries():
    K = cosymmetries(corpus_system("kdv"), AnsatzSpace(order=2, degree=2))
    assert K.dim == 3
    assert_same_span(K.sections(), [section("1"), section("u"), section("3*u^2 + u_xx")])
    rows, cols, rank = K.dims
    assert cols - rank == 3, "kernel dimension is columns minus rank"


def test_burgers_cosymmetries():
    K = cosymmetries(corpus_system("burgers"), AnsatzSpace(order=2, degree=2))
    assert_same_span(K.sections(), [section("1")])


def test_heat_symmetries_with_explicit_xt():
    K = symmetries(corpus_system("heat"), AnsatzSpace(order=1, degree=1, explicit_xt=True))
    assert_same_span(
        K.sections(),
        [section("1"), section("x"), section("u"), section("u_x"), section("x*u + 2*t*u_x")],
    )


def test_kdv_symmetries_and_their_bracket():
    kdv = corpus_system("kdv")
    K = symmetries(kdv, AnsatzSpace(order=3, degree=2))
    assert_same_span(K.sections(), [section("u_x"), section("6*u*u_x + u_xxx")])
    a, b = K.sections()
    assert lie_bracket(a, b, kdv).is_zero


def test_level_one_lifted_cosymmetries_are_cosymmetries():
    for name, bounds in (("kdv", (2, 2)), ("heat", (1, 1))):
        E = corpus_system(name)
        A = AnsatzSpace(order=bounds[0], degree=bounds[1])
        lifted = lifted_cosymmetries(E, 1, 1, A)
        assert lifted.printed() == cosymmetries(E, A).printed(), name
        assert len(lifted.alternated) == lifted.dim


def test_level_two_heat_lifted_kernel():
    heat = corpus_system("heat")
    K = lifted_cosymmetries(heat, 2, 1, AnsatzSpace(order=1, degree=1, slot_degrees=(1,)))
    assert K.printed() == ["(0, 1)"]


@pytest.mark.parametrize("psi", ["1", "u", "3*u^2 + u_xx"])
def test_level_two_kdv_lifts_of_cosymmetries(psi):
    kdv = corpus_system("kdv")
    D = lifted_adjoint(kdv, 2, 1)
    space = kdv.space
    value = expr(psi)
    element = [d_K_vertical(value, SlotSet.of(1), space, 2), IDForm.scalar(value, space, 2)]
    assert all(w.is_zero for w in apply(D, element))


def test_ansatz_listing_is_deterministic():
    heat = corpus_system("heat")
    A = AnsatzSpace(order=1, degree=1)
    first = [str(w) for w in enumerate_ansatz(heat.space, A, 0, ())]
    assert first == ["1", "u", "u_x"]
    with_xt = enumerate_ansatz(heat.space, AnsatzSpace(order=1, degree=1, explicit_xt=True), 0, ())
    assert len(with_xt) == 9
    assert enumerate_ansatz(heat.space, AnsatzSpace.empty(), 0, ()) == []


def test_ansatz_cap():
    with pytest.raises(AnsatzOverflowError):
        cosymmetries(corpus_system("kdv"), AnsatzSpace(order=2, degree=2, cap=3))


def test_span_membership():
    basis = [section("u"), section("u_x")]
    assert span_contains(basis, section("2*u - u_x"))
    assert not span_contains(basis, section("u^2"))
    assert span_contains([], section("0"))


def test_kernel_table():
    K = cosymmetries(corpus_system("kdv"), AnsatzSpace(order=2, degree=2))
    df = kernel_to_frame(K)
    assert list(df.columns) == ["system", "label", "element", "component", "expression", "order", "degree"]
    assert set(df["element"]) == {0, 1, 2}
    assert (df["system"] == "kdv").all()
    assert (df["component"] == "F1").all()


def test_span_over_different_denominators():
    basis = [section("1/(u*(u + 1))"), section("1/u")]
    assert span_contains(basis, section("1/(u + 1)")), "1/(u+1) = 1/u - 1/(u*(u+1))"
    assert span_contains(basis, section("(2*u + 3)/(u^2 + u)"))
    assert not span_contains(basis, section("1/(u + 2)"))


def test_solver_is_deterministic():
    kdv = corpus_system("kdv")
    A = AnsatzSpace(order=2, degree=2)
    assert cosymmetries(kdv, A).printed() == cosymmetries(kdv, A).printed()
    assert symmetries(kdv, AnsatzSpace(order=3, degree=2)).printed() == symmetries(
        kdv, AnsatzSpace(order=3, degree=2)
    ).printed()


def test_larger_ansatz_keeps_earlier_kernel():
    kdv = corpus_system("kdv")
    small = cosymmetries(kdv, AnsatzSpace(order=1, degree=1))
    large = cosymmetries(kdv, AnsatzSpace(order=2, degree=2))
    assert small.dim <= large.dim
    for element in small.sections():
        assert span_contains(large.sections(), element), f"{element} lost at N=2, D=2"


def test_level_two_heat_lift_at_slot_degree_zero():
    heat = corpus_system("heat")
    K = lifted_cosymmetries(heat, 2, 1, AnsatzSpace(order=1, degree=1, slot_degrees=(0,)))
    assert K.printed() == ["(1, 0)"]


def test_kdv_galilean_symmetry_with_explicit_xt():
    kdv = corpus_system("kdv")
    K = symmetries(kdv, AnsatzSpace(order=1, degree=1, explicit_xt=True))
    assert span_contains(K.sections(), section("6*t*u_x + 1"))
    assert span_contains(K.sections(), section("u_x"))
