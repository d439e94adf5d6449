# -*- coding: utf-8 -*-
"""
Reading equation-system files.

    # comment
    [system]
    name = kdv
    independent = x, t
    dependent = u
    leading = t                 # optional, default: last independent

    [equations]
    u_t = 6*u*u_x + u_xxx

Optional golden sections `[symmetries]` / `[cosymmetries]` carry order,
degree, xt, a `;`-separated basis (tuples as `(a, b)`) and provenance.
"""

# src/system_files.py

from __future__ import annotations

import configparser
from dataclasses import dataclass, field
from pathlib import Path

from src.expr_core import ExpressionSyntaxError, JetSpace, parse_expression
from src.jet_calculus import EquationSystem, Section

GOLDEN_SECTIONS = ("symmetries", "cosymmetries")


class SystemFileError(ValueError):
    pass


@dataclass(frozen=True)
class GoldenBasis:
    kind: str
    order: int
    degree: int
    explicit_xt: bool
    basis: tuple[Section, ...]
    exact: bool = True
    provenance: str = ""


@dataclass
class SystemFile:
    system: EquationSystem
    golden: dict[str, GoldenBasis] = field(default_factory=dict)
    source: str = ""


def _split_names(text: str) -> tuple[str, ...]:
    return tuple(part.strip() for part in text.split(",") if part.strip())


def _parser() -> configparser.ConfigParser:
    parser = configparser.ConfigParser(
        delimiters=("=",),
        comment_prefixes=("#",),
        inline_comment_prefixes=("#",),
        interpolation=None,
    )
    parser.optionxform = str
    return parser


def parse_system_text(text: str, source: str = "<text>") -> SystemFile:
    parser = _parser()
    try:
        parser.read_string(text, source=source)
    except configparser.Error as exc:
        raise SystemFileError(f"{source}: {exc}") from None

    for section in ("system", "equations"):
        if not parser.has_section(section):
            raise SystemFileError(f"{source}: missing [{section}] section")
    header = parser["system"]
    for key in ("name", "independent", "dependent"):
        if key not in header:
            raise SystemFileError(f"{source}: [system] needs '{key}'")

    independent = _split_names(header["independent"])
    dependent = _split_names(header["dependent"])
    leading = header.get("leading", independent[-1] if independent else "")
    if leading not in independent:
        raise SystemFileError(f"{source}: leading variable '{leading}' is not independent")
    try:
        space = JetSpace(independent, dependent, independent.index(leading))
    except ValueError as exc:
        raise SystemFileError(f"{source}: {exc}") from None

    equations = []
    for lhs_text, rhs_text in parser["equations"].items():
        try:
            lhs = space.coordinate(lhs_text.strip())
            rhs = parse_expression(rhs_text, space)
        except ValueError as exc:
            raise SystemFileError(f"{source}: equation '{lhs_text} = {rhs_text}': {exc}") from None
        equations.append((lhs, rhs))
    if not equations:
        raise SystemFileError(f"{source}: [equations] is empty")

    system = EquationSystem(header["name"].strip(), space, tuple(equations))
    golden = {
        kind: _parse_golden(parser[kind], kind, space, source)
        for kind in GOLDEN_SECTIONS
        if parser.has_section(kind)
    }
    return SystemFile(system, golden, source)


def _parse_golden(section, kind: str, space: JetSpace, source: str) -> GoldenBasis:
    for key in ("order", "degree"):
        if key not in section:
            raise SystemFileError(f"{source}: [{kind}] needs '{key}'")
    try:
        elements = [e.strip() for e in section.get("basis", "").split(";") if e.strip()]
        basis = tuple(_parse_element(e, space) for e in elements)
        return GoldenBasis(
            kind=kind,
            order=section.getint("order"),
            degree=section.getint("degree"),
            explicit_xt=section.getboolean("xt", fallback=False),
            basis=basis,
            exact=section.getboolean("exact", fallback=True),
            provenance=section.get("provenance", "").strip(),
        )
    except (TypeError, ValueError, ExpressionSyntaxError) as exc:
        raise SystemFileError(f"{source}: [{kind}] {exc}") from None


def _parse_element(text: str, space: JetSpace) -> Section:
    if text.startswith("(") and text.endswith(")") and "," in text:
        parts = text[1:-1].split(",")
    else:
        parts = [text]
    if len(parts) != space.m:
        raise SystemFileError(f"element '{text}' has {len(parts)} components, expected {space.m}")
    return Section(tuple(parse_expression(part, space) for part in parts))


def load_system(path: str | Path) -> SystemFile:
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise SystemFileError(f"cannot read {path}: {exc}") from None
    return parse_system_text(text, source=str(path))
