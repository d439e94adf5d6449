# -*- coding: utf-8 -*-
"""
Total derivatives, prolongation and restriction to an evolution system.

An EquationSystem holds solved equations u^j_t = f^j. Every jet coordinate
that carries a derivative in the leading variable is rewritten through the
prolonged equations, so expressions "on E" live in internal coordinates
(x, t and u^j_sigma with sigma free of t).
"""

# src/jet_calculus.py

from __future__ import annotations

import logging
from dataclasses import dataclass
from functools import lru_cache

import sympy as sp

from src.expr_core import (
    ZERO,
    JetCoordinate,
    JetExpression,
    JetSpace,
    MultiIndex,
    apply_vector_field,
    partial_derivative,
    print_expression,
    substitute,
)

logger = logging.getLogger(__name__)

DEFAULT_PROLONGATION_CAP = 24


class NormalFormError(ValueError):
    pass


class ProlongationCapError(ValueError):
    pass


# ---------------------------------------------------------------------
# Types
# ---------------------------------------------------------------------


@dataclass(frozen=True)
class Section:
    """An m-tuple of expressions, e.g. a symmetry or cosymmetry."""

    components: tuple[JetExpression, ...]

    @classmethod
    def of(cls, *values) -> "Section":
        return cls(tuple(JetExpression.of(v) for v in values))

    @property
    def is_zero(self) -> bool:
        return all(c.is_zero for c in self.components)

    def __len__(self):
        return len(self.components)

    def __iter__(self):
        return iter(self.components)

    def __getitem__(self, j):
        return self.components[j]

    def __add__(self, other: "Section") -> "Section":
        return Section(tuple(a + b for a, b in zip(self.components, other.components)))

    def __sub__(self, other: "Section") -> "Section":
        return Section(tuple(a - b for a, b in zip(self.components, other.components)))

    def scale(self, c) -> "Section":
        return Section(tuple(c * a for a in self.components))

    def __str__(self):
        parts = [print_expression(c) for c in self.components]
        return parts[0] if len(parts) == 1 else "(" + ", ".join(parts) + ")"


@dataclass(frozen=True)
class EquationSystem:
    """
    Solved system lhs_a = rhs_a. The structure is only checked by
    `is_normal_form`; operations that need evolution form call
    `require_normal_form` first.
    """

    name: str
    space: JetSpace
    equations: tuple[tuple[JetCoordinate, JetExpression], ...]

    @property
    def r(self) -> int:
        return len(self.equations)

    def rhs_for(self, j: int) -> JetExpression:
        for lhs, rhs in self.equations:
            if lhs.index == j:
                return rhs
        raise KeyError(f"no equation for dependent variable {self.space.dependent[j]}")

    def defining_function(self, a: int) -> JetExpression:
        """F^a = lhs_a - rhs_a."""
        lhs, rhs = self.equations[a]
        return JetExpression.of(lhs) - rhs

    def defining_functions(self) -> list[JetExpression]:
        return [self.defining_function(a) for a in range(self.r)]

    def describe(self) -> list[str]:
        return [f"{lhs.name} = {print_expression(rhs)}" for lhs, rhs in self.equations]


# ---------------------------------------------------------------------
# Free-jet calculus
# ---------------------------------------------------------------------


def _total_derivative_field(e: JetExpression, mu: int, space: JetSpace) -> dict:
    field = {}
    for coord in space.coordinates_of(e):
        if coord.is_independent:
            if coord.index == mu:
                field[coord.symbol] = sp.Integer(1)
        else:
            field[coord.symbol] = space.u(coord.index, coord.sigma.shift(mu)).symbol
    return field


def total_derivative(e: JetExpression, mu: int, space: JetSpace) -> JetExpression:
    """D_mu e = de/dx^mu + sum u^j_{sigma+mu} de/du^j_sigma."""
    return apply_vector_field(e, _total_derivative_field(e, mu, space))


def prolong(e: JetExpression, sigma: MultiIndex, space: JetSpace) -> JetExpression:
    for mu in sigma.steps():
        e = total_derivative(e, mu, space)
    return e


def euler_operator(density: JetExpression, space: JetSpace) -> Section:
    """Component j is sum_sigma (-1)^|sigma| D_sigma(d density / d u^j_sigma)."""
    components = [ZERO] * space.m
    for coord in space.coordinates_of(density):
        if coord.is_independent:
            continue
        term = prolong(partial_derivative(density, coord), coord.sigma, space)
        if coord.sigma.order % 2:
            term = -term
        components[coord.index] = components[coord.index] + term
    return Section(tuple(components))


def is_total_divergence(e: JetExpression, space: JetSpace) -> bool:
    return euler_operator(e, space).is_zero


# ---------------------------------------------------------------------
# Evolution systems
# ---------------------------------------------------------------------


def _has_leading_derivative(coord: JetCoordinate, space: JetSpace) -> bool:
    return not coord.is_independent and coord.sigma.counts[space.leading] > 0


def is_normal_form(E: EquationSystem) -> tuple[bool, list[str]]:
    """
    Structural evolution-form test: each equation solved for the first
    leading derivative of its own dependent variable, one per variable,
    right-hand sides free of leading derivatives.
    """
    space = E.space
    lead = MultiIndex.unit(space.n, space.leading)
    diagnostics = []
    seen = set()
    for lhs, rhs in E.equations:
        if lhs.is_independent or lhs.sigma != lead:
            diagnostics.append(
                f"equation for {lhs.name} is not solved for {space.independent[space.leading]}-derivative "
                f"of first order"
            )
        elif lhs.index in seen:
            diagnostics.append(f"dependent variable {space.dependent[lhs.index]} solved twice")
        else:
            seen.add(lhs.index)
        offending = [c.name for c in space.coordinates_of(rhs) if _has_leading_derivative(c, space)]
        if offending:
            diagnostics.append(f"right-hand side of {lhs.name} contains {', '.join(offending)}")
    missing = [space.dependent[j] for j in range(space.m) if j not in seen]
    if missing:
        diagnostics.append(f"no evolution equation for {', '.join(missing)}")
    return not diagnostics, diagnostics


def require_normal_form(E: EquationSystem) -> None:
    ok, diagnostics = is_normal_form(E)
    if not ok:
        raise NormalFormError(f"system '{E.name}' is not in evolution form: " + "; ".join(diagnostics))


def _leading_derivative(g: JetExpression, E: EquationSystem) -> JetExpression:
    """D_t of an internal expression, result internal."""
    space = E.space
    field = {}
    for coord in space.coordinates_of(g):
        if coord.is_independent:
            if coord.index == space.leading:
                field[coord.symbol] = sp.Integer(1)
        else:
            field[coord.symbol] = prolong(E.rhs_for(coord.index), coord.sigma, space).expr
    return apply_vector_field(g, field)


@lru_cache(maxsize=4096)
def _rewrite_rule(E: EquationSystem, j: int, sigma: MultiIndex, cap: int) -> JetExpression:
    space = E.space
    if sigma.order > cap:
        raise ProlongationCapError(
            f"jet order {sigma.order} of {space.u(j, sigma).name} exceeds prolongation cap {cap}"
        )
    steps = sigma.counts[space.leading]
    spatial = sigma.shift(space.leading, -steps)
    value = prolong(E.rhs_for(j), spatial, space)
    for _ in range(steps - 1):
        value = _leading_derivative(value, E)
    top = max((c.order for c in space.coordinates_of(value)), default=0)
    if top > cap:
        raise ProlongationCapError(
            f"rewriting {space.u(j, sigma).name} reaches jet order {top}, above cap {cap}"
        )
    logger.debug("rule %s -> %s", space.u(j, sigma).name, value)
    return value


def rewrite_rule(E: EquationSystem, coord: JetCoordinate, cap: int = DEFAULT_PROLONGATION_CAP) -> JetExpression:
    return _rewrite_rule(E, coord.index, coord.sigma, cap)


def restrict_to_equation(
    e: JetExpression, E: EquationSystem, cap: int = DEFAULT_PROLONGATION_CAP
) -> JetExpression:
    """Rewrite every leading-derivative coordinate of e through the prolonged equations."""
    space = E.space
    rules = {
        coord: rewrite_rule(E, coord, cap)
        for coord in space.coordinates_of(e)
        if _has_leading_derivative(coord, space)
    }
    return substitute(e, rules)


def internal_total_derivative(e: JetExpression, mu: int, E: EquationSystem) -> JetExpression:
    return restrict_to_equation(total_derivative(e, mu, E.space), E)


def restrict_section(s: Section, E: EquationSystem) -> Section:
    return Section(tuple(restrict_to_equation(c, E) for c in s.components))


def is_internal(e: JetExpression, E: EquationSystem) -> bool:
    return not any(_has_leading_derivative(c, E.space) for c in E.space.coordinates_of(e))


def target_space(E: EquationSystem) -> JetSpace:
    """Jet space of the bundle F maps into: one dependent per equation."""
    taken = set(E.space.independent) | set(E.space.dependent)
    if E.r == 1 and "v" not in taken:
        names = ["v"]
    else:
        names = _numbered("v", E.r, E.space)
    return JetSpace(E.space.independent, tuple(names), E.space.leading)


def _numbered(stem: str, count: int, space: JetSpace) -> list[str]:
    taken = set(space.independent) | set(space.dependent)
    out, i = [], 1
    while len(out) < count:
        if f"{stem}{i}" not in taken:
            out.append(f"{stem}{i}")
        i += 1
    return out


def evolutionary_derivation(phi: Section, g: JetExpression, space: JetSpace) -> JetExpression:
    """E_phi(g) = sum D_sigma(phi^j) dg/du^j_sigma on free jets."""
    out = ZERO
    for coord in space.coordinates_of(g):
        if coord.is_independent:
            continue
        out = out + prolong(phi[coord.index], coord.sigma, space) * partial_derivative(g, coord)
    return out


def lie_bracket_free(phi1: Section, phi2: Section, space: JetSpace) -> Section:
    """{phi1, phi2} = E_phi1(phi2) - E_phi2(phi1) on free jets."""
    return Section(
        tuple(
            evolutionary_derivation(phi1, phi2[j], space) - evolutionary_derivation(phi2, phi1[j], space)
            for j in range(space.m)
        )
    )
