# -*- coding: utf-8 -*-
"""
C-differential operators with iterated-form coefficients.

A CDiffOperator is a matrix whose (r, c) entry is sum_sigma a_sigma D_sigma,
stored as {sigma: IDForm}. Left operators act as
(-1)^{|a_sigma| |s|} a_sigma * D_sigma(s) with total degrees, right
operators as D_sigma(s) * a_sigma; the formal adjoint of one is the
other, so the pairing psi * Delta(phi) never has to move a form past its
argument.
"""

# src/cdiff_operators.py

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field, replace
from itertools import permutations

import sympy as sp

from src.expr_core import ONE, ZERO, JetExpression, JetSpace, MultiIndex, partial_derivative
from src.idf_algebra import (
    IDForm,
    SlotRangeError,
    SlotSet,
    base_generator,
    d_K_vertical,
    print_idform,
    prolong_idf,
    restrict_form,
    vertical_generator,
)
from src.jet_calculus import (
    EquationSystem,
    Section,
    is_total_divergence,
    prolong,
    require_normal_form,
)

logger = logging.getLogger(__name__)


class ShapeMismatchError(ValueError):
    pass


class DegreeMismatchError(ValueError):
    pass


# ---------------------------------------------------------------------
# Operator type
# ---------------------------------------------------------------------


@dataclass(eq=False)
class CDiffOperator:
    space: JetSpace
    nslots: int
    rows: int
    cols: int
    entries: dict[tuple[int, int], dict[MultiIndex, IDForm]]
    row_labels: tuple[str, ...]
    col_labels: tuple[str, ...]
    row_offsets: tuple[tuple[int, ...], ...] = ()
    col_offsets: tuple[tuple[int, ...], ...] = ()
    equation: EquationSystem | None = None
    side: str = "left"
    tensor_degree: int = 0
    tensor_slot: int | None = None

    def __post_init__(self):
        self.entries = {
            rc: {s: a for s, a in entry.items() if not a.is_zero}
            for rc, entry in self.entries.items()
        }
        self.entries = {rc: entry for rc, entry in self.entries.items() if entry}
        zero = (0,) * self.nslots
        if not self.row_offsets:
            self.row_offsets = (zero,) * self.rows
        if not self.col_offsets:
            self.col_offsets = (zero,) * self.cols

    def entry(self, r: int, c: int) -> dict[MultiIndex, IDForm]:
        return self.entries.get((r, c), {})

    def coefficient(self, r: int, c: int, sigma: MultiIndex) -> IDForm:
        return self.entry(r, c).get(sigma, IDForm.zero(self.space, self.nslots))

    @property
    def order(self) -> int:
        return max((s.order for entry in self.entries.values() for s in entry), default=0)

    def map_coefficients(self, f) -> "CDiffOperator":
        entries = {rc: {s: f(a) for s, a in entry.items()} for rc, entry in self.entries.items()}
        return replace(self, entries=entries)

    def __eq__(self, other):
        if not isinstance(other, CDiffOperator):
            return NotImplemented
        return (
            (self.rows, self.cols, self.side) == (other.rows, other.cols, other.side)
            and self.entries == other.entries
        )

    def __str__(self):
        return print_operator(self)


def _add_term(entries: dict, rc: tuple[int, int], sigma: MultiIndex, a: IDForm) -> None:
    if a.is_zero:
        return
    entry = entries.setdefault(rc, {})
    entry[sigma] = entry[sigma] + a if sigma in entry else a


def _reembed(a: IDForm, nslots: int) -> IDForm:
    if a.nslots > nslots:
        raise SlotRangeError(f"coefficient with {a.nslots} slots cannot live in {nslots}")
    return IDForm(a.terms, a.space, nslots)


def identity_operator(
    space: JetSpace, size: int, nslots: int = 0, equation: EquationSystem | None = None, side: str = "left"
) -> CDiffOperator:
    zero = MultiIndex.zero(space.n)
    entries = {(i, i): {zero: IDForm.scalar(ONE, space, nslots)} for i in range(size)}
    labels = tuple(f"s{i + 1}" for i in range(size))
    return CDiffOperator(space, nslots, size, size, entries, labels, labels, equation=equation, side=side)


def scalar_operator(space: JetSpace, terms: dict[MultiIndex, JetExpression], nslots: int = 0) -> CDiffOperator:
    """1x1 operator sum terms[sigma] D_sigma."""
    entries = {(0, 0): {s: IDForm.scalar(c, space, nslots) for s, c in terms.items()}}
    return CDiffOperator(space, nslots, 1, 1, entries, ("s",), ("s",))


def block(D: CDiffOperator, rows: list[int], cols: list[int]) -> CDiffOperator:
    entries = {
        (i, j): dict(D.entry(r, c)) for i, r in enumerate(rows) for j, c in enumerate(cols) if D.entry(r, c)
    }
    return replace(
        D,
        rows=len(rows),
        cols=len(cols),
        entries=entries,
        row_labels=tuple(D.row_labels[r] for r in rows),
        col_labels=tuple(D.col_labels[c] for c in cols),
        row_offsets=tuple(D.row_offsets[r] for r in rows),
        col_offsets=tuple(D.col_offsets[c] for c in cols),
    )


# ---------------------------------------------------------------------
# Linearizations
# ---------------------------------------------------------------------


def _row_labels(E: EquationSystem) -> tuple[str, ...]:
    return tuple(f"F{a + 1}" for a in range(E.r))


def linearize(E: EquationSystem) -> CDiffOperator:
    """Entry (a, j) = sum_sigma dF^a/du^j_sigma D_sigma on free jets."""
    require_normal_form(E)
    space = E.space
    entries: dict = {}
    for a, F in enumerate(E.defining_functions()):
        for coord in space.coordinates_of(F):
            if coord.is_independent:
                continue
            _add_term(entries, (a, coord.index), coord.sigma, IDForm.scalar(partial_derivative(F, coord), space, 0))
    return CDiffOperator(space, 0, E.r, space.m, entries, _row_labels(E), space.dependent)


def lift_linearize(E: EquationSystem, k: int) -> CDiffOperator:
    """
    Linearization of the family d_K^v F^a in the variables d_L^v u^j.
    Rows (a, K) and columns (j, L) run over slot subsets K, L of
    {1..k-1} (subset-major); entry = sum_sigma d^v_{K-L}(dF^a/du^j_sigma) D_sigma
    for L within K, zero otherwise.
    """
    require_normal_form(E)
    if k < 1:
        raise SlotRangeError(f"level k={k} must be at least 1")
    space, nslots = E.space, k - 1
    subsets = SlotSet.all_subsets(nslots)
    row_index = {(a, K): i for i, (K, a) in enumerate((K, a) for K in subsets for a in range(E.r))}
    col_index = {(j, L): i for i, (L, j) in enumerate((L, j) for L in subsets for j in range(space.m))}

    partials: dict[tuple[int, int, MultiIndex], JetExpression] = {}
    for a, F in enumerate(E.defining_functions()):
        for coord in space.coordinates_of(F):
            if not coord.is_independent:
                partials[(a, coord.index, coord.sigma)] = partial_derivative(F, coord)

    entries: dict = {}
    for (a, K), r in row_index.items():
        for (j, L), c in col_index.items():
            if not L.issubset(K):
                continue
            for (a2, j2, sigma), coeff in partials.items():
                if (a2, j2) != (a, j):
                    continue
                _add_term(entries, (r, c), sigma, d_K_vertical(coeff, K - L, space, nslots))

    def label(stem: str, K: SlotSet) -> str:
        return stem if not K.mask else f"dv[{K}]{stem}"

    rows = sorted(row_index, key=row_index.get)
    cols = sorted(col_index, key=col_index.get)
    return CDiffOperator(
        space,
        nslots,
        len(rows),
        len(cols),
        entries,
        tuple(label(f"F{a + 1}", K) for a, K in rows),
        tuple(label(space.dependent[j], L) for j, L in cols),
        row_offsets=tuple(K.indicator(nslots) for _, K in rows),
        col_offsets=tuple(L.indicator(nslots) for _, L in cols),
    )


# ---------------------------------------------------------------------
# Algebra of operators
# ---------------------------------------------------------------------


def _restrict_if(a: IDForm, E: EquationSystem | None) -> IDForm:
    return a if E is None else restrict_form(a, E)


def _total_degree_parts(w: IDForm) -> dict[int, IDForm]:
    parts: dict[int, dict] = {}
    for gens, c in w.terms.items():
        parts.setdefault(sum(len(g.slots) for g in gens), {})[gens] = c
    return {deg: w.like(terms) for deg, terms in parts.items()}


def graded_product(a: IDForm, w: IDForm) -> IDForm:
    """a * w with (-1)^{|a| |w|} on each pair of parts, |.| the total degree."""
    if a.is_scalar or w.is_scalar:
        return a * w
    out = IDForm.zero(w.space, w.nslots)
    for da, pa in _total_degree_parts(a).items():
        for dw, pw in _total_degree_parts(w).items():
            term = pa * pw
            out = out + (-term if da * dw % 2 else term)
    return out


def _leibniz(a: IDForm, sigma: MultiIndex):
    """Yield (rho, binom(sigma, rho) * D_{sigma-rho}(a)) for rho <= sigma."""
    for rho in sigma.sub_indices():
        yield rho, prolong_idf(a, sigma - rho) * sigma.binomial(rho)


def adjoint(D: CDiffOperator) -> CDiffOperator:
    """
    Transpose with sum a_sigma D_sigma -> sum (-1)^|sigma| D_sigma o a_sigma,
    normal-ordered. The result acts from the other side.
    """
    entries: dict = {}
    for (r, c), entry in D.entries.items():
        for sigma, a in entry.items():
            sign = -1 if sigma.order % 2 else 1
            for rho, term in _leibniz(a, sigma):
                _add_term(entries, (c, r), rho, _restrict_if(term * sign, D.equation))
    return replace(
        D,
        rows=D.cols,
        cols=D.rows,
        entries=entries,
        row_labels=D.col_labels,
        col_labels=D.row_labels,
        row_offsets=tuple(tuple(-x for x in off) for off in D.col_offsets),
        col_offsets=tuple(tuple(-x for x in off) for off in D.row_offsets),
        side="right" if D.side == "left" else "left",
    )


def compose(D2: CDiffOperator, D1: CDiffOperator) -> CDiffOperator:
    """D2 o D1 with total derivatives moved right by Leibniz."""
    if D2.cols != D1.rows:
        raise ShapeMismatchError(f"cannot compose {D2.rows}x{D2.cols} with {D1.rows}x{D1.cols}")
    if D2.nslots != D1.nslots or D2.side != D1.side:
        raise ShapeMismatchError("composed operators must share slots and side")
    if D2.tensor_degree != D1.tensor_degree:
        raise DegreeMismatchError("composed operators must share the tensor degree")
    equation = D2.equation or D1.equation
    entries: dict = {}
    for (r, m), outer in D2.entries.items():
        for (m2, c), inner in D1.entries.items():
            if m2 != m:
                continue
            for sigma, a in outer.items():
                for tau, b in inner.items():
                    for rho, db in _leibniz(b, sigma):
                        product = graded_product(a, db) if D2.side == "left" else db * a
                        _add_term(entries, (r, c), rho + tau, _restrict_if(product, equation))
    return replace(
        D1,
        rows=D2.rows,
        entries=entries,
        row_labels=D2.row_labels,
        row_offsets=D2.row_offsets,
        equation=equation,
    )


def restrict_operator(D: CDiffOperator, E: EquationSystem) -> CDiffOperator:
    restricted = D.map_coefficients(lambda a: restrict_form(a, E))
    restricted.equation = E
    return restricted


# ---------------------------------------------------------------------
# Application
# ---------------------------------------------------------------------


def _as_form(value, D: CDiffOperator) -> IDForm:
    if isinstance(value, IDForm):
        return value
    return IDForm.scalar(value, D.space, D.nslots)


def _check_tensor_argument(w: IDForm, D: CDiffOperator) -> None:
    slot = D.tensor_slot
    for gens in w.terms:
        in_slot = [g for g in gens if slot in g.slots]
        if any(not g.is_vertical for g in in_slot):
            raise DegreeMismatchError(f"argument {w} has non-Cartan generators in slot {slot}")
        if len(in_slot) != D.tensor_degree:
            raise DegreeMismatchError(
                f"argument {w} has slot-{slot} degree {len(in_slot)}, expected {D.tensor_degree}"
            )


def apply(D: CDiffOperator, args) -> tuple[IDForm, ...]:
    """
    Evaluate D on a column of forms (or expressions / a Section). Outputs
    are restricted when the operator lives on an equation.

    Left-acting operators give (-1)^{|a| |p|} a * D_sigma(p) per
    coefficient a and argument p, by total degree; right-acting ones give
    D_sigma(p) * a.
    """
    args = list(args)
    if len(args) != D.cols:
        raise ShapeMismatchError(f"operator has {D.cols} columns, got {len(args)} arguments")
    forms = [_as_form(v, D) for v in args]
    if D.tensor_slot is not None:
        for w in forms:
            _check_tensor_argument(w, D)
    nslots = forms[0].nslots if forms else D.nslots
    out = [IDForm.zero(D.space, nslots) for _ in range(D.rows)]
    derived: dict[tuple[int, MultiIndex], IDForm] = {}
    for (r, c), entry in D.entries.items():
        for sigma, a in entry.items():
            if (c, sigma) not in derived:
                derived[(c, sigma)] = prolong_idf(forms[c], sigma)
            ds = derived[(c, sigma)]
            if ds.is_zero:
                continue
            a = _reembed(a, nslots)
            out[r] = out[r] + (graded_product(a, ds) if D.side == "left" else ds * a)
    if D.equation is not None:
        out = [restrict_form(w, D.equation) for w in out]
    return tuple(out)


def apply_section(D: CDiffOperator, s: Section) -> Section:
    """Scalar evaluation; every output must be a degree-zero form."""
    values = apply(D, list(s.components))
    for w in values:
        if not w.is_scalar:
            raise DegreeMismatchError(f"output {w} is not a scalar")
    return Section(tuple(w.scalar_part() for w in values))


# ---------------------------------------------------------------------
# Tensor extension and alternation
# ---------------------------------------------------------------------


def extend_p(D: CDiffOperator, p: int, k: int) -> CDiffOperator:
    """
    [D]_p: the same coefficients acting on arguments s * q with q a
    Cartan p-form in slot k; total derivatives hit q through the
    Lie-derivative rule of total_derivative_idf.
    """
    if p < 0:
        raise DegreeMismatchError(f"tensor degree p={p} must be non-negative")
    if D.nslots >= k:
        raise SlotRangeError(f"coefficients use {D.nslots} slots, extension slot is {k}")

    def pad(off):
        return tuple(off) + (0,) * (k - len(off))

    return replace(
        D.map_coefficients(lambda a: _reembed(a, k)),
        nslots=k,
        row_offsets=tuple(pad(o) for o in D.row_offsets),
        col_offsets=tuple(pad(o) for o in D.col_offsets),
        tensor_degree=p,
        tensor_slot=k,
    )


@dataclass(frozen=True)
class TensorTerm:
    """first (x) rest (x) coefficient: Cartan 1-form, Cartan (p-1)-form, slot-free part."""

    first: IDForm = field(compare=False)
    rest: IDForm = field(compare=False)
    coefficient: IDForm = field(compare=False)


def _slot_degree(w: IDForm, slot: int) -> set[int]:
    return {sum(1 for g in gens if slot in g.slots) for gens in w.terms}


def _require_cartan_in_slot(w: IDForm, slot: int, degree: int, what: str) -> None:
    for gens in w.terms:
        in_slot = [g for g in gens if slot in g.slots]
        if len(in_slot) != degree or any(not g.is_vertical for g in in_slot):
            raise DegreeMismatchError(f"{what} {w} is not a Cartan {degree}-form in slot {slot}")


def alt_p(terms: list[TensorTerm], p: int, slot: int) -> IDForm:
    """Skew-symmetrization: first * rest * coefficient, summed."""
    if not terms:
        raise DegreeMismatchError("alt_p needs at least one tensor term")
    out = None
    for t in terms:
        _require_cartan_in_slot(t.first, slot, 1, "first factor")
        _require_cartan_in_slot(t.rest, slot, p - 1, "second factor")
        _require_cartan_in_slot(t.coefficient, slot, 0, "coefficient")
        value = t.first * t.rest * t.coefficient
        out = value if out is None else out + value
    return out


def include_cartan(w: IDForm, p: int, slot: int) -> list[TensorTerm]:
    """Right inverse of alt_p on Cartan p-forms in `slot`."""
    _require_cartan_in_slot(w, slot, p, "form")
    space, nslots = w.space, w.nslots
    out = []
    for gens, c in w.sorted_terms():
        in_slot = [g for g in gens if slot in g.slots]
        others = [g for g in gens if slot not in g.slots]
        reordered = IDForm.monomial(in_slot + others, ONE, space, nslots)
        s = reordered.terms[gens].expr
        for i, g in enumerate(in_slot):
            eps = 1
            for h in in_slot[:i]:
                if h.slots.overlap(g.slots) % 2:
                    eps = -eps
            out.append(
                TensorTerm(
                    IDForm.generator(g, space, nslots),
                    IDForm.monomial(in_slot[:i] + in_slot[i + 1:], ONE, space, nslots),
                    IDForm.monomial(others, c * s * eps / p, space, nslots),
                )
            )
    return out


# ---------------------------------------------------------------------
# Multi-C-differential operators
# ---------------------------------------------------------------------


@dataclass(eq=False)
class MultiCDiffOperator:
    """
    Delta(phi_1..phi_l) = sum_key a_key * prod_i D_{sigma_i}(phi_i^{alpha_i}),
    keys ((alpha_1, sigma_1), ..., (alpha_l, sigma_l)).
    """

    space: JetSpace
    nslots: int
    multiplicity: int
    entries: dict[tuple[tuple[int, MultiIndex], ...], IDForm]

    def __post_init__(self):
        self.entries = {key: a for key, a in self.entries.items() if not a.is_zero}

    def __eq__(self, other):
        if not isinstance(other, MultiCDiffOperator):
            return NotImplemented
        return self.multiplicity == other.multiplicity and self.entries == other.entries

    @property
    def is_skew(self) -> bool:
        return alt_l(self) == self


def alt_l(D: MultiCDiffOperator) -> MultiCDiffOperator:
    l = D.multiplicity
    entries: dict = {}
    for key, a in D.entries.items():
        for perm in permutations(range(l)):
            sign = _permutation_sign(perm)
            inverse = [0] * l
            for i, pi in enumerate(perm):
                inverse[pi] = i
            new_key = tuple(key[inverse[i]] for i in range(l))
            term = a * JetExpression.of(sign) / math.factorial(l)
            entries[new_key] = entries[new_key] + term if new_key in entries else term
    return MultiCDiffOperator(D.space, D.nslots, l, entries)


def _permutation_sign(perm) -> int:
    perm = list(perm)
    sign = 1
    for i in range(len(perm)):
        while perm[i] != i:
            j = perm[i]
            perm[i], perm[j] = perm[j], perm[i]
            sign = -sign
    return sign


def apply_multi(D: MultiCDiffOperator, sections: list[Section]) -> IDForm:
    if len(sections) != D.multiplicity:
        raise ShapeMismatchError(f"operator takes {D.multiplicity} sections, got {len(sections)}")
    out = IDForm.zero(D.space, D.nslots)
    for key, a in D.entries.items():
        value = ONE
        for (alpha, sigma), s in zip(key, sections):
            value = value * prolong(s[alpha], sigma, D.space)
        out = out + a * value
    return out


def multi_from_cartan(w: IDForm, slot: int) -> MultiCDiffOperator:
    """
    Contract a Cartan p-form in `slot` whose slot generators are pure
    d_slot^v u^j_s with evolutionary fields E_phi_1, ..., E_phi_p.
    """
    degrees = _slot_degree(w, slot)
    if len(degrees) > 1:
        raise DegreeMismatchError(f"form {w} is not homogeneous in slot {slot}")
    p = degrees.pop() if degrees else 0
    pure = SlotSet.of(slot)
    entries: dict = {}
    for gens, c in w.terms.items():
        in_slot = [g for g in gens if slot in g.slots]
        if any(not g.is_vertical or g.slots != pure for g in in_slot):
            raise DegreeMismatchError(f"slot-{slot} generators of {w} must be d_{slot}^v u")
        others = [g for g in gens if slot not in g.slots]
        s = IDForm.monomial(in_slot + others, ONE, w.space, w.nslots).terms[gens].expr
        coefficient = IDForm.monomial(others, c * s, w.space, w.nslots)
        for perm in permutations(range(p)):
            key = tuple((in_slot[perm[i]].index, in_slot[perm[i]].sigma) for i in range(p))
            term = coefficient * _permutation_sign(perm)
            entries[key] = entries[key] + term if key in entries else term
    return MultiCDiffOperator(w.space, w.nslots, p, entries)


def cartan_from_multi(D: MultiCDiffOperator, slot: int) -> IDForm:
    pure = SlotSet.of(slot)
    out = IDForm.zero(D.space, D.nslots)
    for key, a in D.entries.items():
        gens = [vertical_generator(pure, alpha, sigma) for alpha, sigma in key]
        out = out + IDForm.monomial(gens, ONE, D.space, D.nslots) * a
    return out / math.factorial(D.multiplicity)


# ---------------------------------------------------------------------
# Checks, horizontal operator, printing
# ---------------------------------------------------------------------


def green_check(D: CDiffOperator, adjoint_op: CDiffOperator | None = None) -> bool:
    """
    psi . D(phi) - D^*(psi) . phi must be a total divergence, with fresh
    dependent variables phi, psi.
    """
    adjoint_op = adjoint_op if adjoint_op is not None else adjoint(D)
    for op in (D, adjoint_op):
        if any(not a.is_scalar for entry in op.entries.values() for a in entry.values()):
            raise DegreeMismatchError("green_check needs scalar coefficients")
    phi_names = D.space.fresh_names("phi", D.cols)
    psi_names = D.space.with_dependent(phi_names).fresh_names("psi", D.rows)
    space = D.space.with_dependent(phi_names + psi_names)
    phi = [JetExpression.of(space.coordinate(n)) for n in phi_names]
    psi = [JetExpression.of(space.coordinate(n)) for n in psi_names]

    def evaluate(op: CDiffOperator, args: list[JetExpression]) -> list[JetExpression]:
        out = [ZERO] * op.rows
        for (r, c), entry in op.entries.items():
            for sigma, a in entry.items():
                out[r] = out[r] + a.scalar_part() * prolong(args[c], sigma, space)
        return out

    left = sum((p * v for p, v in zip(psi, evaluate(D, phi))), ZERO)
    right = sum((v * f for v, f in zip(evaluate(adjoint_op, psi), phi)), ZERO)
    return is_total_divergence(left - right, space)


def horizontal_operator(space: JetSpace, slot: int, nslots: int, E: EquationSystem | None = None) -> CDiffOperator:
    """d_slot^h = sum_mu d_slot x^mu D_mu as a 1x1 operator."""
    entries = {
        (0, 0): {
            MultiIndex.unit(space.n, mu): IDForm.generator(base_generator(SlotSet.of(slot), mu), space, nslots)
            for mu in range(space.n)
        }
    }
    return CDiffOperator(space, nslots, 1, 1, entries, ("w",), ("w",), equation=E)


def _derivative_label(sigma: MultiIndex, space: JetSpace) -> str:
    parts = []
    for mu, count in enumerate(sigma.counts):
        if count:
            name = f"D{space.independent[mu]}"
            parts.append(name if count == 1 else f"{name}^{count}")
    return "*".join(parts)


def print_entry(entry: dict[MultiIndex, IDForm], space: JetSpace) -> str:
    if not entry:
        return "0"
    lead = space.leading
    order = sorted(entry, key=lambda s: (-s.counts[lead], s.order, s.sort_key()))
    pieces = []
    for sigma in order:
        a = entry[sigma]
        text = print_idform(a)
        derivative = _derivative_label(sigma, space)
        negative = False
        compound = len(a.terms) > 1 or any(not gens and isinstance(c.expr, sp.Add) for gens, c in a.terms.items())
        if not compound and text.startswith("-"):
            negative, text = True, text[1:]
        elif compound and (derivative or text.startswith("-")):
            text = f"({text})"
        if derivative:
            body = derivative if text == "1" else f"{text}*{derivative}"
        else:
            body = text
        pieces.append(("-" if negative else "+", body))
    out = ("-" if pieces[0][0] == "-" else "") + pieces[0][1]
    for sign, body in pieces[1:]:
        out += f" {sign} {body}"
    return out


def print_operator(D: CDiffOperator) -> str:
    if D.rows == 1 and D.cols == 1:
        return print_entry(D.entry(0, 0), D.space)
    lines = []
    for r in range(D.rows):
        for c in range(D.cols):
            lines.append(f"[{D.row_labels[r]}, {D.col_labels[c]}] {print_entry(D.entry(r, c), D.space)}")
    return "\n".join(lines)


def operator_to_json(D: CDiffOperator) -> dict:
    entries = []
    for (r, c) in sorted(D.entries):
        entry = D.entries[(r, c)]
        terms = [
            {"sigma": list(sigma.counts), "coefficient": print_idform(entry[sigma])}
            for sigma in sorted(entry, key=MultiIndex.sort_key)
        ]
        entries.append({"row": r, "col": c, "terms": terms})
    return {
        "rows": D.rows,
        "cols": D.cols,
        "row_labels": list(D.row_labels),
        "col_labels": list(D.col_labels),
        "side": D.side,
        "slots": D.nslots,
        "entries": entries,
    }
