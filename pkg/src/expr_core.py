# -*- coding: utf-8 -*-
"""
Exact differential polynomials over the rationals in jet coordinates.

Role:
Everything above this module works with `JetExpression` values:

- MultiIndex / JetCoordinate / JetSpace: naming of x^mu and u^j_sigma

- JetExpression: canonical p/q with expanded numerator and monic denominator

- parse_expression, partial_derivative, substitute

Coordinates are plain sympy Symbols named like `x`, `u`, `u_xxt`; the
JetSpace turns a name back into a JetCoordinate.
"""

# src/expr_core.py

from __future__ import annotations

import logging
import operator
import re
from dataclasses import dataclass, field
from functools import lru_cache, reduce
from typing import Callable, Iterable, Mapping

import sympy as sp
from pyparsing import (
    Forward,
    ParseException,
    ParserElement,
    Regex,
    Suppress,
    ZeroOrMore,
    one_of,
)
from pyparsing import Opt
from sympy.printing.str import StrPrinter

logger = logging.getLogger(__name__)

NAME_PATTERN = r"[A-Za-z][A-Za-z0-9]*(?:_(?:\{[A-Za-z]+\}|[A-Za-z]+))?"


# ---------------------------------------------------------------------
# Errors
# ---------------------------------------------------------------------


class ExpressionSyntaxError(ValueError):
    """Text does not match the expression grammar."""

    def __init__(self, message: str, position: int):
        super().__init__(f"{message} (at position {position})")
        self.position = position


class UnknownIdentifierError(ValueError):
    def __init__(self, name: str, position: int | None = None):
        where = "" if position is None else f" at position {position}"
        super().__init__(f"unknown identifier '{name}'{where}")
        self.name = name
        self.position = position


class ZeroDenominatorError(ValueError):
    pass


# ---------------------------------------------------------------------
# Multi-indices and coordinates
# ---------------------------------------------------------------------


@dataclass(frozen=True)
class MultiIndex:
    """Derivative counts per independent variable, e.g. (2, 1) for xxt."""

    counts: tuple[int, ...]

    def __post_init__(self):
        if any(c < 0 for c in self.counts):
            raise ValueError(f"negative exponent in multi-index {self.counts}")

    @classmethod
    def zero(cls, n: int) -> "MultiIndex":
        return cls((0,) * n)

    @classmethod
    def unit(cls, n: int, mu: int) -> "MultiIndex":
        return cls.zero(n).shift(mu)

    @property
    def order(self) -> int:
        return sum(self.counts)

    @property
    def is_zero(self) -> bool:
        return self.order == 0

    def shift(self, mu: int, by: int = 1) -> "MultiIndex":
        counts = list(self.counts)
        counts[mu] += by
        return MultiIndex(tuple(counts))

    def __add__(self, other: "MultiIndex") -> "MultiIndex":
        return MultiIndex(tuple(a + b for a, b in zip(self.counts, other.counts)))

    def __sub__(self, other: "MultiIndex") -> "MultiIndex":
        return MultiIndex(tuple(a - b for a, b in zip(self.counts, other.counts)))

    def dominates(self, other: "MultiIndex") -> bool:
        return all(a >= b for a, b in zip(self.counts, other.counts))

    def sub_indices(self) -> list["MultiIndex"]:
        """All rho <= sigma, in sort_key order."""
        out = [MultiIndex(())]
        for c in self.counts:
            out = [MultiIndex(r.counts + (i,)) for r in out for i in range(c + 1)]
        return sorted(out, key=MultiIndex.sort_key)

    def binomial(self, rho: "MultiIndex") -> int:
        coeff = 1
        for s, r in zip(self.counts, rho.counts):
            coeff *= sp.binomial(s, r)
        return int(coeff)

    def steps(self) -> list[int]:
        """The variable indices of sigma with multiplicity, ascending."""
        return [mu for mu, c in enumerate(self.counts) for _ in range(c)]

    def letters(self, names: tuple[str, ...]) -> str:
        return "".join(names[mu] * c for mu, c in enumerate(self.counts))

    def sort_key(self) -> tuple:
        # graded lexicographic
        return (self.order, tuple(-c for c in self.counts))


@dataclass(frozen=True)
class JetCoordinate:
    """
    Either an independent variable x^mu (kind 'x', sigma None) or a jet
    coordinate u^j_sigma (kind 'u').
    """

    kind: str
    index: int
    sigma: MultiIndex | None
    name: str = field(compare=False)

    @property
    def is_independent(self) -> bool:
        return self.kind == "x"

    @property
    def symbol(self) -> sp.Symbol:
        return sp.Symbol(self.name)

    @property
    def order(self) -> int:
        return 0 if self.sigma is None else self.sigma.order

    def sort_key(self) -> tuple:
        if self.is_independent:
            return (0, 0, (0, ()), self.index)
        return (1, self.index, self.sigma.sort_key(), 0)


@dataclass(frozen=True)
class JetSpace:
    """
    Variable declarations. `leading` is the index of the evolution variable;
    by default the last declared independent variable.
    """

    independent: tuple[str, ...]
    dependent: tuple[str, ...]
    leading: int = -1

    def __post_init__(self):
        for name in self.independent:
            if not re.fullmatch(r"[A-Za-z]", name):
                raise ValueError(f"independent variable '{name}' must be a single letter")
        for name in self.dependent:
            if not re.fullmatch(r"[A-Za-z][A-Za-z0-9]*", name):
                raise ValueError(f"dependent variable '{name}' must be alphanumeric")
        clash = set(self.independent) & set(self.dependent)
        if clash or len(set(self.independent + self.dependent)) != len(self.independent) + len(self.dependent):
            raise ValueError(f"duplicate variable names in declarations: {sorted(clash)}")
        if not self.independent:
            raise ValueError("at least one independent variable is required")
        if self.leading < 0:
            object.__setattr__(self, "leading", len(self.independent) + self.leading)
        if not 0 <= self.leading < len(self.independent):
            raise ValueError(f"leading variable index {self.leading} out of range")

    @property
    def n(self) -> int:
        return len(self.independent)

    @property
    def m(self) -> int:
        return len(self.dependent)

    def index_of(self, name: str) -> int:
        try:
            return self.independent.index(name)
        except ValueError:
            raise UnknownIdentifierError(name) from None

    def x(self, mu: int) -> JetCoordinate:
        return JetCoordinate("x", mu, None, self.independent[mu])

    def u(self, j: int, sigma: MultiIndex | None = None) -> JetCoordinate:
        sigma = sigma or MultiIndex.zero(self.n)
        name = self.dependent[j]
        if not sigma.is_zero:
            name = f"{name}_{sigma.letters(self.independent)}"
        return JetCoordinate("u", j, sigma, name)

    def coordinate(self, name: str) -> JetCoordinate:
        return _coordinate_from_name(self, name)

    def coordinates_of(self, e: "JetExpression") -> list[JetCoordinate]:
        """Coordinates occurring in e, in canonical order."""
        coords = [self.coordinate(s.name) for s in e.free_symbols]
        return sorted(coords, key=JetCoordinate.sort_key)

    def is_internal(self, coord: JetCoordinate) -> bool:
        return coord.is_independent or coord.sigma.counts[self.leading] == 0

    def with_dependent(self, names: Iterable[str]) -> "JetSpace":
        return JetSpace(self.independent, self.dependent + tuple(names), self.leading)

    def fresh_names(self, stem: str, count: int) -> list[str]:
        taken = set(self.independent) | set(self.dependent)
        out, i = [], 0
        while len(out) < count:
            candidate = stem if i == 0 else f"{stem}{i}"
            if candidate not in taken:
                out.append(candidate)
                taken.add(candidate)
            i += 1
        return out


@lru_cache(maxsize=None)
def _coordinate_from_name(space: JetSpace, name: str) -> JetCoordinate:
    if name in space.independent:
        return space.x(space.independent.index(name))
    head, _, tail = name.partition("_")
    if head not in space.dependent:
        raise UnknownIdentifierError(name)
    counts = [0] * space.n
    for letter in tail.strip("{}"):
        if letter not in space.independent:
            raise UnknownIdentifierError(name)
        counts[space.independent.index(letter)] += 1
    return space.u(space.dependent.index(head), MultiIndex(tuple(counts)))


# ---------------------------------------------------------------------
# Canonical rational functions
# ---------------------------------------------------------------------


class _GrammarPrinter(StrPrinter):
    """sympy's str printer with `^` for powers."""

    def _print_Pow(self, expr, rational=False):
        return super()._print_Pow(expr, rational).replace("**", "^")


_PRINTER = _GrammarPrinter({"order": "grlex"})


def _sorted_symbols(exprs: Iterable[sp.Expr]) -> list[sp.Symbol]:
    symbols = set()
    for e in exprs:
        symbols |= e.free_symbols
    return sorted(symbols, key=lambda s: s.name)


class JetExpression:
    """
    Canonical fraction num/den: both expanded, gcd 1, den monic in grlex
    order (den == 1 for polynomials). Equality is structural on that form.
    """

    __slots__ = ("num", "den", "_hash")

    def __init__(self, num: sp.Expr, den: sp.Expr = sp.Integer(1)):
        # callers go through from_sympy unless the pair is already canonical
        self.num = num
        self.den = den
        self._hash = None

    # -- construction --------------------------------------------------

    @classmethod
    def from_sympy(cls, expr) -> "JetExpression":
        expr = sp.sympify(expr)
        num, den = sp.fraction(sp.together(expr))
        if den.free_symbols:
            return cls._from_fraction(num, den)
        if den == 0:
            raise ZeroDenominatorError(f"zero denominator in {expr}")
        return cls(sp.expand(num / den))

    @classmethod
    def _from_fraction(cls, num: sp.Expr, den: sp.Expr) -> "JetExpression":
        num, den = sp.expand(num), sp.expand(den)
        if den == 0:
            raise ZeroDenominatorError(f"zero denominator in ({num})/({den})")
        if not den.free_symbols:
            return cls(sp.expand(num / den))
        num, den = sp.fraction(sp.cancel(num / den))
        num, den = sp.expand(num), sp.expand(den)
        if not den.free_symbols:
            return cls(sp.expand(num / den))
        lead = sp.Poly(den, *_sorted_symbols([den])).LC(order="grlex")
        return cls(sp.expand(num / lead), sp.expand(den / lead))

    @classmethod
    def constant(cls, value) -> "JetExpression":
        return cls(sp.Rational(value) if not isinstance(value, sp.Basic) else value)

    @classmethod
    def of(cls, value) -> "JetExpression":
        if isinstance(value, JetExpression):
            return value
        if isinstance(value, JetCoordinate):
            return cls(value.symbol)
        if isinstance(value, (int, sp.Rational)):
            return cls(sp.Integer(value) if isinstance(value, int) else value)
        return cls.from_sympy(value)

    # -- properties ----------------------------------------------------

    @property
    def expr(self) -> sp.Expr:
        return self.num if self.den == 1 else self.num / self.den

    @property
    def is_zero(self) -> bool:
        return self.num == 0

    @property
    def is_polynomial(self) -> bool:
        return self.den == 1

    @property
    def is_constant(self) -> bool:
        return not self.num.free_symbols and not self.den.free_symbols

    @property
    def free_symbols(self) -> list[sp.Symbol]:
        return _sorted_symbols([self.num, self.den])

    # -- arithmetic ----------------------------------------------------

    def __add__(self, other):
        other = _coerce(other)
        if other is NotImplemented:
            return other
        if self.den == 1 and other.den == 1:
            return JetExpression(sp.expand(self.num + other.num))
        if self.den == other.den:
            return JetExpression._from_fraction(self.num + other.num, self.den)
        return JetExpression._from_fraction(
            self.num * other.den + other.num * self.den, self.den * other.den
        )

    __radd__ = __add__

    def __neg__(self):
        return JetExpression(-self.num, self.den)

    def __sub__(self, other):
        other = _coerce(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        other = _coerce(other)
        if other is NotImplemented:
            return other
        if self.den == 1 and other.den == 1:
            return JetExpression(sp.expand(self.num * other.num))
        return JetExpression._from_fraction(self.num * other.num, self.den * other.den)

    __rmul__ = __mul__

    def __truediv__(self, other):
        other = _coerce(other)
        if other is NotImplemented:
            return other
        if other.is_zero:
            raise ZeroDenominatorError(f"division of {self} by zero")
        if other.den == 1 and not other.num.free_symbols:
            return JetExpression(sp.expand(self.num / other.num), self.den)
        return JetExpression._from_fraction(self.num * other.den, self.den * other.num)

    def __rtruediv__(self, other):
        return _coerce(other) / self

    def __pow__(self, exponent: int):
        exponent = int(exponent)
        if exponent < 0:
            return JetExpression.constant(1) / (self ** (-exponent))
        return reduce(operator.mul, [self] * exponent, JetExpression.constant(1))

    # -- comparison / printing -----------------------------------------

    def __eq__(self, other):
        other = _coerce(other)
        if other is NotImplemented:
            return False
        return self.num == other.num and self.den == other.den

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.num, self.den))
        return self._hash

    def __str__(self):
        return print_expression(self)

    def __repr__(self):
        return f"JetExpression({print_expression(self)!r})"


def _coerce(value):
    if isinstance(value, JetExpression):
        return value
    if isinstance(value, (int, sp.Rational, sp.Integer)):
        return JetExpression(sp.Integer(value) if isinstance(value, int) else value)
    return NotImplemented


ZERO = JetExpression(sp.Integer(0))
ONE = JetExpression(sp.Integer(1))


def print_expression(e: JetExpression) -> str:
    if e.den == 1:
        return _PRINTER.doprint(e.num)
    num = _PRINTER.doprint(e.num)
    den = _PRINTER.doprint(e.den)
    if isinstance(e.num, sp.Add):
        num = f"({num})"
    if isinstance(e.den, (sp.Add, sp.Mul, sp.Pow)):
        den = f"({den})"
    return f"{num}/{den}"


# ---------------------------------------------------------------------
# Calculus on canonical forms
# ---------------------------------------------------------------------


def apply_vector_field(e: JetExpression, field_: Mapping[sp.Symbol, sp.Expr]) -> JetExpression:
    """
    sum_s field[s] * de/ds with the quotient rule on num/den. `field_` values
    must be polynomials (the corpus class); symbols missing from e are skipped.
    """
    present = set(e.num.free_symbols) | set(e.den.free_symbols)
    items = [(s, v) for s, v in field_.items() if s in present]
    if not items:
        return ZERO
    dnum = sum((v * sp.diff(e.num, s) for s, v in items), sp.Integer(0))
    if e.den == 1:
        if all(v.is_polynomial() for _, v in items):
            return JetExpression(sp.expand(dnum))
        return JetExpression.from_sympy(dnum)
    dden = sum((v * sp.diff(e.den, s) for s, v in items), sp.Integer(0))
    return JetExpression._from_fraction(dnum * e.den - e.num * dden, e.den**2)


def partial_derivative(e: JetExpression, z: JetCoordinate) -> JetExpression:
    """Formal partial derivative; every coordinate is an independent symbol."""
    return apply_vector_field(e, {z.symbol: sp.Integer(1)})


def substitute(e: JetExpression, rules: Mapping[JetCoordinate, JetExpression]) -> JetExpression:
    """Simultaneous replacement; produced terms are not rewritten again."""
    if not rules:
        return e
    table = {coord.symbol: JetExpression.of(value).expr for coord, value in rules.items()}
    num = e.num.xreplace(table)
    if e.den == 1 and all(JetExpression.of(v).is_polynomial for v in rules.values()):
        return JetExpression(sp.expand(num))
    den = e.den.xreplace(table)
    if sp.cancel(den) == 0:
        raise ZeroDenominatorError(f"substitution makes the denominator of {e} vanish")
    return JetExpression.from_sympy(num / den)


# ---------------------------------------------------------------------
# Parsing
# ---------------------------------------------------------------------


def build_grammar(
    make_name: Callable[[str, int], object],
    make_number: Callable[[int], object],
    extra_atoms: list[ParserElement] | None = None,
) -> ParserElement:
    """
    expr := term (('+'|'-') term)* ; term := factor (('*'|'/') factor)* ;
    factor := sign* base ('^' integer)? . Values are folded with the Python
    operators, so any type with +, -, *, / and ** works as an atom.
    """
    expr = Forward()

    number = Regex(r"\d+").set_parse_action(lambda s, loc, t: make_number(int(t[0])))
    name = Regex(NAME_PATTERN).set_parse_action(lambda s, loc, t: make_name(t[0], loc))
    group = Suppress("(") + expr + Suppress(")")
    base = reduce(operator.or_, (extra_atoms or []) + [number, name, group])

    power = base + Opt(Suppress("^") + Regex(r"[+-]?\d+"))
    power.set_parse_action(lambda t: t[0] ** int(t[1]) if len(t) > 1 else t[0])

    signed = ZeroOrMore(one_of("+ -")) + power
    signed.set_parse_action(lambda t: -t[-1] if list(t[:-1]).count("-") % 2 else t[-1])

    term = signed + ZeroOrMore(one_of("* /") + signed)
    term.set_parse_action(_fold_products)

    expr <<= term + ZeroOrMore(one_of("+ -") + term)
    expr.set_parse_action(lambda t: _fold(t, {"+": operator.add, "-": operator.sub}))
    return expr


def _fold(tokens, ops):
    value = tokens[0]
    for i in range(1, len(tokens), 2):
        value = ops[tokens[i]](value, tokens[i + 1])
    return value


def _fold_products(s, loc, tokens):
    value = tokens[0]
    for i in range(1, len(tokens), 2):
        rhs = tokens[i + 1]
        if tokens[i] == "*":
            value = value * rhs
            continue
        if getattr(rhs, "is_zero", False):
            raise ZeroDenominatorError(f"division by zero at position {loc}")
        value = value / rhs
    return value


@lru_cache(maxsize=32)
def _expression_parser(space: JetSpace) -> ParserElement:
    def make_name(text: str, loc: int) -> JetExpression:
        try:
            return JetExpression(space.coordinate(text).symbol)
        except UnknownIdentifierError:
            raise UnknownIdentifierError(text, loc) from None

    return build_grammar(make_name, lambda k: JetExpression(sp.Integer(k)))


def parse_expression(text: str, space: JetSpace) -> JetExpression:
    """
    Parse `text` against the declarations in `space`.

    Raises ExpressionSyntaxError (with position), UnknownIdentifierError or
    ZeroDenominatorError.
    """
    try:
        result = _expression_parser(space).parse_string(text, parse_all=True)
    except ParseException as exc:
        raise ExpressionSyntaxError(f"cannot parse {text!r}: {exc.msg}", exc.loc) from None
    return result[0]
