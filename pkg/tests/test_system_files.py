# -*- coding: utf-8 -*-
"""
Tests for the system file format: sections, defaults, golden data, errors.
"""

import pytest

from src.system_files import SystemFileError, load_system, parse_system_text
from tests.utils import expr, make_system_text, section


def test_parse_minimal_system():
    parsed = parse_system_text(make_system_text("burgers", ["u_t = u*u_x + u_xx  # viscous"]))
    E = parsed.system
    assert E.name == "burgers"
    assert E.space.independent[E.space.leading] == "t", "leading defaults to the last independent variable"
    assert E.rhs_for(0) == expr("u*u_x + u_xx")
    assert parsed.golden == {}


def test_parse_golden_sections():
    extra = "\n".join(
        [
            "[cosymmetries]",
            "order = 2",
            "degree = 2",
            "basis = 1; u; 3*u^2 + u_xx",
            "provenance = hand check",
            "",
        ]
    )
    parsed = parse_system_text(make_system_text("kdv", ["u_t = 6*u*u_x + u_xxx"], extra=extra))
    golden = parsed.golden["cosymmetries"]
    assert (golden.order, golden.degree, golden.explicit_xt, golden.exact) == (2, 2, False, True)
    assert golden.basis == (section("1"), section("u"), section("3*u^2 + u_xx"))
    assert golden.provenance == "hand check"


def test_tuple_elements_for_systems():
    extra = "[symmetries]\norder = 1\ndegree = 1\nbasis = (1, 0); (u_x, v_x)\n"
    text = make_system_text("wave2", ["u_t = v", "v_t = u_xx"], dependent="u, v", extra=extra)
    golden = parse_system_text(text).golden["symmetries"]
    assert len(golden.basis) == 2
    assert all(len(element) == 2 for element in golden.basis)


@pytest.mark.parametrize(
    "text, fragment",
    [
        ("[system]\nname = a\nindependent = x, t\ndependent = u\n", "missing [equations]"),
        ("[system]\nname = a\nindependent = x, t\n[equations]\nu_t = u\n", "needs 'dependent'"),
        ("[system]\nname = a\nindependent = x, t\ndependent = u\nleading = s\n[equations]\nu_t = u\n", "leading"),
        ("[system]\nname = a\nindependent = x, t\ndependent = u\n[equations]\nu_t = u +\n", "u_t"),
        ("[system]\nname = a\nindependent = x, t\ndependent = u\n[equations]\nu_t = w\n", "unknown identifier"),
        ("[system]\nname = a\nindependent = x, t\ndependent = u\n[equations]\n", "empty"),
    ],
)
def test_malformed_files(text, fragment):
    with pytest.raises(SystemFileError) as info:
        parse_system_text(text)
    assert fragment in str(info.value)


def test_golden_needs_bounds_and_matching_components():
    base = make_system_text("heat", ["u_t = u_xx"])
    with pytest.raises(SystemFileError):
        parse_system_text(base + "[symmetries]\nbasis = u\n")
    with pytest.raises(SystemFileError):
        parse_system_text(base + "[symmetries]\norder = 1\ndegree = 1\nbasis = (u, u_x)\n")


def test_load_system_reads_files(tmp_path):
    path = tmp_path / "heat.eq"
    path.write_text(make_system_text("heat", ["u_t = u_xx"]), encoding="utf-8")
    assert load_system(path).system.name == "heat"
    with pytest.raises(SystemFileError):
        load_system(tmp_path / "missing.eq")
