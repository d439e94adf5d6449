# -*- coding: utf-8 -*-
"""
Small builders so the tests can write systems, expressions and forms
as text.
"""

# tests/utils.py
from src.corpus import corpus_entry
from src.expr_core import JetExpression, JetSpace, parse_expression
from src.idf_algebra import IDForm, parse_idform
from src.jet_calculus import EquationSystem, Section
from src.system_files import parse_system_text


def jet_space(*dependent: str) -> JetSpace:
    """Jets over (x, t) with t leading."""
    return JetSpace(("x", "t"), dependent or ("u",))


def expr(text: str, space: JetSpace | None = None) -> JetExpression:
    return parse_expression(text, space or jet_space())


def form(text: str, nslots: int, space: JetSpace | None = None) -> IDForm:
    return parse_idform(text, space or jet_space(), nslots)


def section(*texts: str, space: JetSpace | None = None) -> Section:
    space = space or jet_space()
    return Section(tuple(parse_expression(t, space) for t in texts))


def corpus_system(name: str) -> EquationSystem:
    return corpus_entry(name).system


def make_system_text(name: str, equations: list[str], dependent: str = "u", extra: str = "") -> str:
    lines = [
        "[system]",
        f"name = {name}",
        "independent = x, t",
        f"dependent = {dependent}",
        "",
        "[equations]",
        *equations,
        "",
    ]
    return "\n".join(lines) + extra


def make_system(name: str, equations: list[str], dependent: str = "u") -> EquationSystem:
    return parse_system_text(make_system_text(name, equations, dependent)).system
