# -*- coding: utf-8 -*-
"""
Iterated differential forms on jets.

An IDForm is a finite sum  coefficient * g_1 * ... * g_r  where the
coefficient is a JetExpression and the g's are generators

    B_K^mu     = d_K x^mu          (HorizontalBase)
    V_K(j, s)  = d_K^v u^j_s       (VerticalJet)

indexed by a nonempty slot set K of {1..nslots}. The multi-degree of a
generator is the indicator vector of K; two generators g, h commute up to
(-1)^{|K_g & K_h|}. Monomials are stored with generators sorted by
`IDFGenerator.sort_key` and that sign absorbed into the coefficient.

Slot differentials:
    d_i^h w = sum_mu B_i^mu * D_mu(w)
    d_i^v   = graded derivation, d_i^v f = sum df/du^j_s V_i(j, s),
              d_i^v V_K = V_{K+i}, d_i^v B_K = B_{K+i}  (0 if i in K)
    d_i     = d_i^h + d_i^v
"""

# src/idf_algebra.py

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from functools import lru_cache
from itertools import combinations
from typing import Callable, Iterable

import sympy as sp
from pyparsing import ParseException, Regex

from src.expr_core import (
    ONE,
    ZERO,
    ExpressionSyntaxError,
    JetExpression,
    JetSpace,
    MultiIndex,
    NAME_PATTERN,
    UnknownIdentifierError,
    ZeroDenominatorError,
    build_grammar,
    partial_derivative,
    print_expression,
    substitute,
)
from src.jet_calculus import (
    DEFAULT_PROLONGATION_CAP,
    EquationSystem,
    prolong,
    restrict_to_equation,
    rewrite_rule,
    target_space,
    total_derivative,
)

logger = logging.getLogger(__name__)

MAX_SLOTS = 8


class SlotRangeError(ValueError):
    pass


class SlotMismatchError(ValueError):
    pass


# ---------------------------------------------------------------------
# Slot sets and generators
# ---------------------------------------------------------------------


@dataclass(frozen=True, order=True)
class SlotSet:
    """Subset of {1, ..., MAX_SLOTS} stored as a bitmask (bit i-1 for slot i)."""

    mask: int = 0

    @classmethod
    def of(cls, *slots: int) -> "SlotSet":
        mask = 0
        for i in slots:
            if not 1 <= i <= MAX_SLOTS:
                raise SlotRangeError(f"slot {i} outside 1..{MAX_SLOTS}")
            mask |= 1 << (i - 1)
        return cls(mask)

    @classmethod
    def all_subsets(cls, nslots: int) -> list["SlotSet"]:
        """Every subset of {1..nslots}, by size then lexicographically."""
        out = []
        for size in range(nslots + 1):
            out.extend(cls.of(*c) for c in combinations(range(1, nslots + 1), size))
        return out

    def __contains__(self, i: int) -> bool:
        return bool(self.mask >> (i - 1) & 1)

    def __or__(self, other: "SlotSet") -> "SlotSet":
        return SlotSet(self.mask | other.mask)

    def __sub__(self, other: "SlotSet") -> "SlotSet":
        return SlotSet(self.mask & ~other.mask)

    def __iter__(self):
        return iter(self.slots())

    def __len__(self):
        return bin(self.mask).count("1")

    def issubset(self, other: "SlotSet") -> bool:
        return self.mask & ~other.mask == 0

    def with_slot(self, i: int) -> "SlotSet":
        return self | SlotSet.of(i)

    def overlap(self, other: "SlotSet") -> int:
        return bin(self.mask & other.mask).count("1")

    def slots(self) -> list[int]:
        return [i for i in range(1, MAX_SLOTS + 1) if i in self]

    def indicator(self, nslots: int) -> tuple[int, ...]:
        return tuple(int(i in self) for i in range(1, nslots + 1))

    def __str__(self):
        return ",".join(str(i) for i in self.slots())


EMPTY = SlotSet()


@dataclass(frozen=True)
class IDFGenerator:
    """kind 'B': d_K x^index ; kind 'V': d_K^v u^index_sigma."""

    kind: str
    slots: SlotSet
    index: int
    sigma: MultiIndex | None = None

    @property
    def is_vertical(self) -> bool:
        return self.kind == "V"

    @property
    def is_odd(self) -> bool:
        return len(self.slots) % 2 == 1

    def sort_key(self) -> tuple:
        sigma_key = self.sigma.sort_key() if self.sigma is not None else (0, ())
        return (self.kind != "B", self.slots.mask, self.index, sigma_key)

    def label(self, space: JetSpace) -> str:
        if self.is_vertical:
            return f"dv[{self.slots}]{space.u(self.index, self.sigma).name}"
        return f"d[{self.slots}]{space.independent[self.index]}"


def base_generator(slots: SlotSet, mu: int) -> IDFGenerator:
    return IDFGenerator("B", slots, mu)


def vertical_generator(slots: SlotSet, j: int, sigma: MultiIndex) -> IDFGenerator:
    return IDFGenerator("V", slots, j, sigma)


def multidegree(gens: Iterable[IDFGenerator], nslots: int) -> tuple[int, ...]:
    degree = [0] * nslots
    for g in gens:
        for i in g.slots:
            degree[i - 1] += 1
    return tuple(degree)


def normal_order(gens: Iterable[IDFGenerator]) -> tuple[tuple[IDFGenerator, ...] | None, int]:
    """Sort generators, returning (monomial, sign); (None, 0) if it vanishes."""
    return _normal_order(tuple(gens))


@lru_cache(maxsize=1 << 16)
def _normal_order(gens: tuple[IDFGenerator, ...]) -> tuple[tuple[IDFGenerator, ...] | None, int]:
    gens = list(gens)
    keys = [g.sort_key() for g in gens]
    sign = 1
    for i in range(1, len(gens)):
        j = i
        while j > 0 and keys[j - 1] > keys[j]:
            if gens[j - 1].slots.overlap(gens[j].slots) % 2:
                sign = -sign
            gens[j - 1], gens[j] = gens[j], gens[j - 1]
            keys[j - 1], keys[j] = keys[j], keys[j - 1]
            j -= 1
    for a, b in zip(gens, gens[1:]):
        if a == b and a.is_odd:
            return None, 0
    return tuple(gens), sign


class _TermSum:
    """
    Collects sign * c_1 * ... * c_r per monomial and canonicalizes each
    coefficient once, in `form`. Polynomial products stay unexpanded until then.
    """

    __slots__ = ("polynomial", "rational")

    def __init__(self):
        self.polynomial: dict[tuple, list[sp.Expr]] = {}
        self.rational: dict[tuple, JetExpression] = {}

    def add(self, gens: tuple[IDFGenerator, ...], sign: int, *factors: JetExpression) -> None:
        if all(f.den == 1 for f in factors):
            self.polynomial.setdefault(gens, []).append(sp.Mul(sp.Integer(sign), *(f.num for f in factors)))
            return
        value = JetExpression.of(sign)
        for f in factors:
            value = value * f
        self.rational[gens] = self.rational.get(gens, ZERO) + value

    def form(self, space: JetSpace, nslots: int) -> "IDForm":
        terms = {gens: JetExpression(sp.expand(sp.Add(*parts))) for gens, parts in self.polynomial.items()}
        for gens, c in self.rational.items():
            terms[gens] = terms.get(gens, ZERO) + c
        return IDForm(terms, space, nslots)


# ---------------------------------------------------------------------
# Forms
# ---------------------------------------------------------------------


class IDForm:
    """
    Element of the iterated-forms algebra with `nslots` differential slots
    over the jets of `space`. Equality compares terms.
    """

    __slots__ = ("terms", "space", "nslots")

    def __init__(self, terms: dict, space: JetSpace, nslots: int):
        if not 0 <= nslots <= MAX_SLOTS:
            raise SlotRangeError(f"{nslots} slots requested, at most {MAX_SLOTS} supported")
        self.terms = {gens: c for gens, c in terms.items() if not c.is_zero}
        self.space = space
        self.nslots = nslots

    # -- construction --------------------------------------------------

    @classmethod
    def zero(cls, space: JetSpace, nslots: int) -> "IDForm":
        return cls({}, space, nslots)

    @classmethod
    def scalar(cls, value, space: JetSpace, nslots: int) -> "IDForm":
        return cls({(): JetExpression.of(value)}, space, nslots)

    @classmethod
    def generator(cls, g: IDFGenerator, space: JetSpace, nslots: int) -> "IDForm":
        if g.slots.mask == 0:
            raise SlotRangeError("generators need a nonempty slot set")
        if g.slots.mask >> nslots:
            raise SlotRangeError(f"slots {{{g.slots}}} outside 1..{nslots}")
        return cls({(g,): ONE}, space, nslots)

    @classmethod
    def monomial(cls, gens: Iterable[IDFGenerator], coefficient, space: JetSpace, nslots: int) -> "IDForm":
        ordered, sign = normal_order(gens)
        if ordered is None:
            return cls.zero(space, nslots)
        return cls({ordered: JetExpression.of(coefficient) * sign}, space, nslots)

    def like(self, terms: dict) -> "IDForm":
        return IDForm(terms, self.space, self.nslots)

    def lift(self, value) -> "IDForm":
        if isinstance(value, IDForm):
            self._check_compatible(value)
            return value
        return IDForm.scalar(value, self.space, self.nslots)

    def _check_compatible(self, other: "IDForm") -> None:
        if other.nslots != self.nslots:
            raise SlotMismatchError(f"forms with {self.nslots} and {other.nslots} slots combined")

    # -- queries -------------------------------------------------------

    @property
    def is_zero(self) -> bool:
        return not self.terms

    @property
    def is_scalar(self) -> bool:
        return all(not gens for gens in self.terms)

    def scalar_part(self) -> JetExpression:
        return self.terms.get((), ZERO)

    def degrees(self) -> set[tuple[int, ...]]:
        return {multidegree(gens, self.nslots) for gens in self.terms}

    def degree(self) -> tuple[int, ...]:
        """Multi-degree of a homogeneous form (zero vector for 0)."""
        found = self.degrees()
        if not found:
            return (0,) * self.nslots
        if len(found) > 1:
            raise ValueError(f"form {self} is not homogeneous: degrees {sorted(found)}")
        return found.pop()

    def homogeneous_components(self) -> dict[tuple[int, ...], "IDForm"]:
        parts: dict[tuple[int, ...], dict] = {}
        for gens, c in self.terms.items():
            parts.setdefault(multidegree(gens, self.nslots), {})[gens] = c
        return {deg: self.like(terms) for deg, terms in sorted(parts.items())}

    def generators(self) -> set[IDFGenerator]:
        return {g for gens in self.terms for g in gens}

    def map_coefficients(self, f: Callable[[JetExpression], JetExpression]) -> "IDForm":
        return self.like({gens: f(c) for gens, c in self.terms.items()})

    def sorted_terms(self) -> list[tuple[tuple[IDFGenerator, ...], JetExpression]]:
        return sorted(self.terms.items(), key=lambda kv: (len(kv[0]), [g.sort_key() for g in kv[0]]))

    # -- arithmetic ----------------------------------------------------

    def __add__(self, other):
        other = self.lift(other)
        terms = dict(self.terms)
        for gens, c in other.terms.items():
            terms[gens] = terms.get(gens, ZERO) + c
        return self.like(terms)

    __radd__ = __add__

    def __neg__(self):
        return self.like({gens: -c for gens, c in self.terms.items()})

    def __sub__(self, other):
        return self + (-self.lift(other))

    def __rsub__(self, other):
        return self.lift(other) - self

    def __mul__(self, other):
        if not isinstance(other, IDForm):
            factor = JetExpression.of(other)
            return self.like({gens: c * factor for gens, c in self.terms.items()})
        self._check_compatible(other)
        acc = _TermSum()
        for g1, c1 in self.terms.items():
            for g2, c2 in other.terms.items():
                gens, sign = normal_order(g1 + g2)
                if gens is not None:
                    acc.add(gens, sign, c1, c2)
        return acc.form(self.space, self.nslots)

    def __rmul__(self, other):
        # scalars commute with everything
        return self * other

    def __truediv__(self, other):
        divisor = other.scalar_part() if isinstance(other, IDForm) and other.is_scalar else other
        if isinstance(other, IDForm) and not other.is_scalar:
            raise ValueError("division by a form of positive degree")
        divisor = JetExpression.of(divisor)
        if divisor.is_zero:
            raise ZeroDenominatorError(f"division of {self} by zero")
        return self.like({gens: c / divisor for gens, c in self.terms.items()})

    def __rtruediv__(self, other):
        if not self.is_scalar:
            raise ValueError("division by a form of positive degree")
        return self.lift(JetExpression.of(other) / self.scalar_part())

    def __pow__(self, exponent: int):
        exponent = int(exponent)
        if exponent < 0:
            if not self.is_scalar:
                raise ValueError("negative power of a form of positive degree")
            return self.lift(self.scalar_part() ** exponent)
        out = self.lift(ONE)
        for _ in range(exponent):
            out = out * self
        return out

    def __eq__(self, other):
        if isinstance(other, IDForm):
            return self.terms == other.terms
        if isinstance(other, (int, JetExpression)):
            return self.terms == IDForm.scalar(other, self.space, self.nslots).terms
        return NotImplemented

    __hash__ = None

    def __str__(self):
        return print_idform(self)

    def __repr__(self):
        return f"IDForm({print_idform(self)!r}, nslots={self.nslots})"


def print_idform(w: IDForm) -> str:
    if w.is_zero:
        return "0"
    pieces = []
    for gens, c in w.sorted_terms():
        text = print_expression(c)
        labels = [g.label(w.space) for g in gens]
        negative = text.startswith("-") and not isinstance(c.expr, sp.Add)
        if negative:
            text = text[1:]
        if labels and (isinstance(c.expr, sp.Add) or not c.is_polynomial):
            text = f"({text})"
        if labels and text == "1":
            body = "*".join(labels)
        else:
            body = "*".join([text] + labels)
        pieces.append(("-" if negative else "+", body))
    out = ("-" if pieces[0][0] == "-" else "") + pieces[0][1]
    for sign, body in pieces[1:]:
        out += f" {sign} {body}"
    return out


# ---------------------------------------------------------------------
# Differentials and derivations
# ---------------------------------------------------------------------


def _check_slot(w: IDForm, i: int) -> None:
    if not 1 <= i <= w.nslots:
        raise SlotRangeError(f"slot {i} outside 1..{w.nslots}")


def apply_derivation(
    w: IDForm,
    on_coefficient: Callable[[JetExpression], IDForm],
    on_generator: Callable[[IDFGenerator], IDForm],
    sign_set: SlotSet,
) -> IDForm:
    """
    Extend a derivation from coefficients and generators. Passing a
    generator g costs (-1)^{|sign_set & K_g|}.
    """
    acc = _TermSum()
    for gens, c in w.terms.items():
        for g2, c2 in on_coefficient(c).terms.items():
            ordered, s = normal_order(g2 + gens)
            if ordered is not None:
                acc.add(ordered, s, c2)
        sign = 1
        for pos, g in enumerate(gens):
            for g2, c2 in on_generator(g).terms.items():
                ordered, s = normal_order(gens[:pos] + g2 + gens[pos + 1:])
                if ordered is not None:
                    acc.add(ordered, s * sign, c, c2)
            if g.slots.overlap(sign_set) % 2:
                sign = -sign
    return acc.form(w.space, w.nslots)


@lru_cache(maxsize=1 << 14)
def _coefficient_derivative(c: JetExpression, mu: int, space: JetSpace) -> JetExpression:
    return total_derivative(c, mu, space)


def total_derivative_idf(w: IDForm, mu: int) -> IDForm:
    """D_mu extended by D_mu(d_K x) = 0, D_mu(d_K^v u_s) = d_K^v u_{s+mu}."""
    space, nslots = w.space, w.nslots

    def on_generator(g: IDFGenerator) -> IDForm:
        if not g.is_vertical:
            return IDForm.zero(space, nslots)
        return IDForm.generator(vertical_generator(g.slots, g.index, g.sigma.shift(mu)), space, nslots)

    return apply_derivation(
        w,
        lambda c: IDForm.scalar(_coefficient_derivative(c, mu, space), space, nslots),
        on_generator,
        EMPTY,
    )


def prolong_idf(w: IDForm, sigma: MultiIndex) -> IDForm:
    for mu in sigma.steps():
        w = total_derivative_idf(w, mu)
    return w


def d_horizontal(w: IDForm, i: int) -> IDForm:
    _check_slot(w, i)
    out = IDForm.zero(w.space, w.nslots)
    for mu in range(w.space.n):
        base = IDForm.generator(base_generator(SlotSet.of(i), mu), w.space, w.nslots)
        out = out + base * total_derivative_idf(w, mu)
    return out


@lru_cache(maxsize=1 << 14)
def _jet_partials(c: JetExpression, space: JetSpace) -> tuple[tuple[int, MultiIndex, JetExpression], ...]:
    return tuple(
        (coord.index, coord.sigma, partial_derivative(c, coord))
        for coord in space.coordinates_of(c)
        if not coord.is_independent
    )


def vertical_differential_of(c: JetExpression, i: int, space: JetSpace, nslots: int) -> IDForm:
    """d_i^v of a coefficient: sum df/du^j_s V_i(j, s)."""
    if not 1 <= i <= nslots:
        raise SlotRangeError(f"slot {i} outside 1..{nslots}")
    slot = SlotSet.of(i)
    terms = {(vertical_generator(slot, j, sigma),): partial for j, sigma, partial in _jet_partials(c, space)}
    return IDForm(terms, space, nslots)


def d_vertical(w: IDForm, i: int) -> IDForm:
    _check_slot(w, i)
    space, nslots = w.space, w.nslots

    def on_generator(g: IDFGenerator) -> IDForm:
        if i in g.slots:
            return IDForm.zero(space, nslots)
        return IDForm.generator(IDFGenerator(g.kind, g.slots.with_slot(i), g.index, g.sigma), space, nslots)

    return apply_derivation(
        w,
        lambda c: vertical_differential_of(c, i, space, nslots),
        on_generator,
        SlotSet.of(i),
    )


def d_slot(w: IDForm, i: int) -> IDForm:
    return d_horizontal(w, i) + d_vertical(w, i)


def d_K_vertical(w, K: SlotSet, space: JetSpace | None = None, nslots: int | None = None) -> IDForm:
    """d_K^v as d_i^v over i in K, ascending; d_0^v is the identity."""
    if not isinstance(w, IDForm):
        w = IDForm.scalar(w, space, nslots)
    for i in K.slots():
        w = d_vertical(w, i)
    return w


def is_cartan(w: IDForm) -> bool:
    return all(g.is_vertical for gens in w.terms for g in gens)


# ---------------------------------------------------------------------
# Restriction to E
# ---------------------------------------------------------------------


def restrict_form(w: IDForm, E: EquationSystem, cap: int = DEFAULT_PROLONGATION_CAP) -> IDForm:
    """
    Coefficients go through restrict_to_equation; d_K^v u_s with a leading
    derivative in s becomes d_K^v of its rewriting rule.
    """
    space, nslots = w.space, w.nslots
    lead = space.leading
    images: dict[IDFGenerator, IDForm] = {}
    out = IDForm.zero(space, nslots)
    for gens, c in w.terms.items():
        term = IDForm.scalar(restrict_to_equation(c, E, cap), space, nslots)
        for g in gens:
            if g not in images:
                if g.is_vertical and g.sigma.counts[lead] > 0:
                    rule = rewrite_rule(E, space.u(g.index, g.sigma), cap)
                    images[g] = d_K_vertical(rule, g.slots, space, nslots)
                else:
                    images[g] = IDForm.generator(g, space, nslots)
            term = term * images[g]
        out = out + term
    return out


def is_internal_form(w: IDForm, E: EquationSystem) -> bool:
    lead = E.space.leading
    for gens, c in w.terms.items():
        if any(g.is_vertical and g.sigma.counts[lead] > 0 for g in gens):
            return False
        if any(not co.is_independent and co.sigma.counts[lead] > 0 for co in E.space.coordinates_of(c)):
            return False
    return True


# ---------------------------------------------------------------------
# Pullback, W-derivations and the Liouville lift
# ---------------------------------------------------------------------


def pullback_F(w: IDForm, E: EquationSystem) -> IDForm:
    """
    F^*: forms over the target jets (variables of target_space(E)) to forms
    over the source jets. x -> x, v^a_s -> D_s F^a, d_L x -> d_L x,
    d_K^v v^a_s -> d_K^v D_s F^a.
    """
    source, nslots = E.space, w.nslots
    tspace = target_space(E)
    if w.space != tspace:
        raise UnknownIdentifierError(",".join(w.space.dependent))
    prolonged: dict[tuple[int, MultiIndex], JetExpression] = {}

    def image_of(a: int, sigma: MultiIndex) -> JetExpression:
        if (a, sigma) not in prolonged:
            prolonged[(a, sigma)] = prolong(E.defining_function(a), sigma, source)
        return prolonged[(a, sigma)]

    out = IDForm.zero(source, nslots)
    for gens, c in w.terms.items():
        rules = {
            coord: image_of(coord.index, coord.sigma)
            for coord in tspace.coordinates_of(c)
            if not coord.is_independent
        }
        # x and t are shared by both spaces
        term = IDForm.scalar(substitute(c, rules), source, nslots)
        for g in gens:
            if g.is_vertical:
                term = term * d_K_vertical(image_of(g.index, g.sigma), g.slots, source, nslots)
            else:
                term = term * IDForm.generator(g, source, nslots)
        out = out + term
    return out


def w_derivation(w: IDForm, a: int, K: SlotSet) -> IDForm:
    """W_a^K: dual to d_K^v v^a; W_a^0 is d/dv^a on coefficients."""
    space, nslots = w.space, w.nslots
    zero = IDForm.zero(space, nslots)
    target = space.u(a)

    def on_coefficient(c: JetExpression) -> IDForm:
        if K.mask:
            return zero
        return IDForm.scalar(partial_derivative(c, target), space, nslots)

    def on_generator(g: IDFGenerator) -> IDForm:
        if g.is_vertical and g.index == a and g.sigma.is_zero and g.slots == K:
            return IDForm.scalar(ONE, space, nslots)
        return zero

    return apply_derivation(w, on_coefficient, on_generator, K)


def w_derivation_F(w: IDForm, a: int, K: SlotSet, E: EquationSystem) -> IDForm:
    return pullback_F(w_derivation(w, a, K), E)


def liouville_vector_field(w: IDForm) -> IDForm:
    """sum_{a,K} d_K^v v^a * W_a^K(w) over every slot subset."""
    space, nslots = w.space, w.nslots
    out = IDForm.zero(space, nslots)
    for a in range(space.m):
        for K in SlotSet.all_subsets(nslots):
            image = w_derivation(w, a, K)
            if image.is_zero:
                continue
            if K.mask:
                lead = IDForm.generator(vertical_generator(K, a, MultiIndex.zero(space.n)), space, nslots)
            else:
                lead = IDForm.scalar(space.u(a), space, nslots)
            out = out + lead * image
    return out


@dataclass(frozen=True)
class LiftComponent:
    """One term d_K^v F^a * (W_a^K)_F of the lifted operator."""

    a: int
    slots: SlotSet
    form: IDForm = field(compare=False)
    equation: EquationSystem = field(compare=False, repr=False)

    def derivation(self, w: IDForm) -> IDForm:
        return w_derivation_F(w, self.a, self.slots, self.equation)


def liouville_lift_F(E: EquationSystem, k: int) -> dict[tuple[int, SlotSet], LiftComponent]:
    """Components (d_K^v F^a, (W_a^K)_F), K within {1..k-1}, of the lifted operator."""
    if k < 1:
        raise SlotRangeError(f"level k={k} must be at least 1")
    nslots = k - 1
    lifted = {}
    for K in SlotSet.all_subsets(nslots):
        for a in range(E.r):
            lifted[(a, K)] = LiftComponent(a, K, d_K_vertical(E.defining_function(a), K, E.space, nslots), E)
    return lifted


def apply_liouville_lift(lift: dict[tuple[int, SlotSet], LiftComponent], w: IDForm) -> IDForm:
    """sum_{a,K} d_K^v F^a * (W_a^K)_F(w) for a form w over the target jets."""
    out = None
    for component in lift.values():
        term = component.form * component.derivation(w)
        out = term if out is None else out + term
    return out


# ---------------------------------------------------------------------
# Parsing
# ---------------------------------------------------------------------


def _slot_list(text: str) -> list[int]:
    return [int(s) for s in text.split(",")]


def parse_idform(text: str, space: JetSpace, nslots: int) -> IDForm:
    """
    Expression grammar plus generator atoms `d[1]x`, `dv[1,2]u_x` and the
    full differential `d[1]u` of a jet coordinate.
    """

    def make_name(name: str, loc: int) -> IDForm:
        try:
            return IDForm.scalar(space.coordinate(name), space, nslots)
        except UnknownIdentifierError:
            raise UnknownIdentifierError(name, loc) from None

    def make_generator(s, loc, tokens) -> IDForm:
        head, _, rest = tokens[0].partition("[")
        slots_text, _, name = rest.partition("]")
        K = SlotSet.of(*_slot_list(slots_text))
        if K.mask >> nslots:
            raise SlotRangeError(f"slots [{slots_text}] outside 1..{nslots} at position {loc}")
        try:
            coord = space.coordinate(name)
        except UnknownIdentifierError:
            raise UnknownIdentifierError(name, loc) from None
        if coord.is_independent:
            if head == "dv":
                return IDForm.zero(space, nslots)
            return IDForm.generator(base_generator(K, coord.index), space, nslots)
        if head == "dv":
            return IDForm.generator(vertical_generator(K, coord.index, coord.sigma), space, nslots)
        w = IDForm.scalar(coord, space, nslots)
        for i in K.slots():
            w = d_slot(w, i)
        return w

    generator = Regex(r"dv?\[\d+(?:,\d+)*\]" + NAME_PATTERN).set_parse_action(make_generator)
    grammar = build_grammar(
        make_name,
        lambda k: IDForm.scalar(k, space, nslots),
        extra_atoms=[generator],
    )
    try:
        result = grammar.parse_string(text, parse_all=True)
    except ParseException as exc:
        raise ExpressionSyntaxError(f"cannot parse {text!r}: {exc.msg}", exc.loc) from None
    value = result[0]
    return value if isinstance(value, IDForm) else IDForm.scalar(value, space, nslots)
