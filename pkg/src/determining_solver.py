# -*- coding: utf-8 -*-
"""
Bounded-order kernels of C-differential operators on an equation.

Unknowns are finite linear combinations of ansatz monomials

    (scalar monomial in internal coordinates) * (Cartan generators)
        * (horizontal generators of one slot)

with rational coefficients. Applying the operator, restricting to E and
collecting coefficients of every resulting monomial gives a sparse linear
system over QQ, solved exactly with sympy's DomainMatrix.
"""

# src/determining_solver.py

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from itertools import combinations
from timeit import default_timer as timer

import pandas as pd
import sympy as sp
from sympy.polys.domains import QQ
from sympy.polys.matrices import DomainMatrix
from sympy.polys.monomials import itermonomials

from src.cdiff_operators import (
    CDiffOperator,
    TensorTerm,
    adjoint,
    alt_p,
    apply,
    extend_p,
    lift_linearize,
    linearize,
    restrict_operator,
)
from src.expr_core import ONE, JetExpression, JetSpace, MultiIndex
from src.idf_algebra import IDForm, IDFGenerator, SlotSet, base_generator, vertical_generator
from src.jet_calculus import (
    EquationSystem,
    Section,
    lie_bracket_free,
    restrict_section,
)
from src.validation import validate_kernel_df

logger = logging.getLogger(__name__)

DEFAULT_ANSATZ_CAP = 4000


class AnsatzOverflowError(ValueError):
    pass


class KernelVerificationError(ValueError):
    pass


# ---------------------------------------------------------------------
# Ansatz
# ---------------------------------------------------------------------


@dataclass(frozen=True)
class AnsatzSpace:
    """
    order:             max jet order N of internal coordinates
    degree:            max polynomial degree D (u-part and x,t-part separately)
    slot_degrees:      Cartan multi-degree of the unknowns, before column offsets
    horizontal_degree: number of d_slot x factors (slot = horizontal_slot, default last)
    """

    order: int
    degree: int
    slot_degrees: tuple[int, ...] = ()
    horizontal_degree: int = 0
    horizontal_slot: int | None = None
    explicit_xt: bool = False
    cap: int = DEFAULT_ANSATZ_CAP

    @classmethod
    def empty(cls) -> "AnsatzSpace":
        return cls(order=0, degree=-1)

    def describe(self) -> dict:
        return {
            "N": self.order,
            "D": self.degree,
            "c": list(self.slot_degrees),
            "q": self.horizontal_degree,
            "xt": self.explicit_xt,
        }


def _padded(degrees: tuple[int, ...], nslots: int) -> tuple[int, ...]:
    degrees = tuple(degrees)[:nslots]
    return degrees + (0,) * (nslots - len(degrees))


def _internal_sigmas(space: JetSpace, order: int) -> list[MultiIndex]:
    out = []
    for total in range(order + 1):
        free = [mu for mu in range(space.n) if mu != space.leading]
        for combo in _compositions(total, len(free)):
            counts = [0] * space.n
            for mu, c in zip(free, combo):
                counts[mu] = c
            out.append(MultiIndex(tuple(counts)))
    return sorted(set(out), key=MultiIndex.sort_key)


def _compositions(total: int, parts: int):
    if parts == 0:
        if total == 0:
            yield ()
        return
    for first in range(total, -1, -1):
        for rest in _compositions(total - first, parts - 1):
            yield (first,) + rest


def _monomial_key(space: JetSpace):
    def key(mono: sp.Expr) -> tuple:
        powers = [(s, int(p)) for s, p in mono.as_powers_dict().items() if isinstance(s, sp.Symbol)]
        weight = sum(space.coordinate(s.name).order * p for s, p in powers)
        return (weight, sum(p for _, p in powers), sp.default_sort_key(mono))

    return key


def scalar_monomials(space: JetSpace, A: AnsatzSpace) -> list[sp.Expr]:
    if A.degree < 0:
        return []
    coords = [space.u(j, s).symbol for j in range(space.m) for s in _internal_sigmas(space, A.order)]
    monomials = set(itermonomials(coords, A.degree))
    if A.explicit_xt:
        xt = [sp.Symbol(name) for name in space.independent]
        monomials = {a * b for a in monomials for b in itermonomials(xt, A.degree)}
    return sorted(monomials, key=_monomial_key(space))


def cartan_monomials(space: JetSpace, A: AnsatzSpace, nslots: int, target: tuple[int, ...]) -> list[tuple]:
    """Generator lists of vertical generators whose slot degrees sum to target."""
    if any(t < 0 for t in target):
        return []
    sigmas = _internal_sigmas(space, A.order)
    candidates = [
        vertical_generator(K, j, s)
        for K in SlotSet.all_subsets(nslots)
        if K.mask
        for j in range(space.m)
        for s in sigmas
    ]
    candidates.sort(key=IDFGenerator.sort_key)
    out = []

    def extend(start: int, chosen: list, remaining: list[int]):
        if not any(remaining):
            out.append(tuple(chosen))
            return
        for i in range(start, len(candidates)):
            g = candidates[i]
            ind = g.slots.indicator(nslots)
            if any(r < d for r, d in zip(remaining, ind)):
                continue
            nxt = i + 1 if g.is_odd else i
            extend(nxt, chosen + [g], [r - d for r, d in zip(remaining, ind)])

    extend(0, [], list(target))
    return out


def enumerate_ansatz(
    space: JetSpace, A: AnsatzSpace, nslots: int, target: tuple[int, ...]
) -> list[IDForm]:
    """Deterministic list of ansatz monomials with Cartan degree `target`."""
    scalars = scalar_monomials(space, A)
    if not scalars:
        return []
    horizontal: list[tuple] = [()]
    if A.horizontal_degree:
        slot = A.horizontal_slot or nslots
        horizontal = [
            tuple(base_generator(SlotSet.of(slot), mu) for mu in combo)
            for combo in combinations(range(space.n), A.horizontal_degree)
        ]
    basis = []
    for cartan in cartan_monomials(space, A, nslots, target):
        for hor in horizontal:
            for mono in scalars:
                w = IDForm.monomial(list(cartan) + list(hor), JetExpression(mono), space, nslots)
                if not w.is_zero:
                    basis.append(w)
    return basis


# ---------------------------------------------------------------------
# Results
# ---------------------------------------------------------------------


@dataclass
class KernelBasis:
    label: str
    operator: CDiffOperator
    ansatz: AnsatzSpace
    elements: list[tuple[IDForm, ...]]
    dims: tuple[int, int, int]
    alternated: list[IDForm] = field(default_factory=list)

    @property
    def dim(self) -> int:
        return len(self.elements)

    @property
    def is_scalar(self) -> bool:
        return all(w.is_scalar for element in self.elements for w in element)

    def sections(self) -> list[Section]:
        if not self.is_scalar:
            raise ValueError(f"{self.label} kernel has form-valued elements")
        return [Section(tuple(w.scalar_part() for w in element)) for element in self.elements]

    def printed(self) -> list[str]:
        return [print_element(element) for element in self.elements]


@dataclass
class CokernelData:
    dim: int
    representatives: list[tuple[IDForm, ...]]
    dims: tuple[int, int, int]


def print_element(element: tuple[IDForm, ...]) -> str:
    parts = [str(w) for w in element]
    return parts[0] if len(parts) == 1 else "(" + ", ".join(parts) + ")"


# ---------------------------------------------------------------------
# Linear algebra
# ---------------------------------------------------------------------


def _terms(value) -> dict:
    if isinstance(value, JetExpression):
        return {} if value.is_zero else {(): value}
    return value.terms


def _coefficient_vectors(columns: list[tuple]) -> list[dict[tuple, sp.Rational]]:
    """
    Coefficients keyed by (row, generators, monomial). Each row is first
    brought to the common denominator of its entries across all columns.
    """
    dens: dict[int, sp.Expr] = {}
    for forms in columns:
        for r, w in enumerate(forms):
            for c in _terms(w).values():
                if c.den != 1:
                    dens[r] = sp.lcm(dens.get(r, sp.Integer(1)), c.den)
    out = []
    for forms in columns:
        vector: dict[tuple, sp.Rational] = {}
        for r, w in enumerate(forms):
            common = dens.get(r)
            for gens, c in _terms(w).items():
                num = c.num if common is None else sp.expand(c.num * sp.cancel(common / c.den))
                for mono, value in num.as_coefficients_dict().items():
                    key = (r, gens, mono)
                    vector[key] = vector.get(key, 0) + sp.Rational(value)
        out.append({key: v for key, v in vector.items() if v != 0})
    return out


def _key_order(key: tuple) -> tuple:
    r, gens, mono = key
    return (r, [g.sort_key() for g in gens], sp.default_sort_key(mono))


def _to_domain_matrix(columns: list[dict], keys: list[tuple]) -> DomainMatrix:
    row_of = {key: i for i, key in enumerate(keys)}
    dod: dict[int, dict[int, object]] = {}
    for j, column in enumerate(columns):
        for key, value in column.items():
            if value != 0:
                dod.setdefault(row_of[key], {})[j] = QQ(int(value.p), int(value.q))
    return DomainMatrix(dod, (len(keys), len(columns)), QQ)


def _nullspace(columns: list[dict]) -> tuple[list[list[sp.Rational]], tuple[int, int, int]]:
    """Exact nullspace of the matrix with the given sparse columns."""
    n = len(columns)
    keys = sorted({key for column in columns for key in column}, key=_key_order)
    if not keys:
        return [[sp.Integer(int(i == j)) for i in range(n)] for j in range(n)], (0, n, 0)
    rref, pivots = _to_domain_matrix(columns, keys).rref()
    rows = rref.to_dod()
    free = [j for j in range(n) if j not in pivots]
    basis = []
    for f in free:
        vector = [sp.Integer(0)] * n
        vector[f] = sp.Integer(1)
        for i, p in enumerate(pivots):
            value = rows.get(i, {}).get(f)
            if value is not None:
                vector[p] = -QQ.to_sympy(value)
        basis.append(vector)
    return basis, (len(keys), n, len(pivots))


def _primitive(vector: list[sp.Rational]) -> list[sp.Rational]:
    """Scale to coprime integers, keeping the sign of the free coordinate."""
    nonzero = [v for v in vector if v != 0]
    if not nonzero:
        return vector
    scale = sp.Rational(math.lcm(*(int(v.q) for v in nonzero)), math.gcd(*(int(v.p) for v in nonzero)))
    return [v * scale for v in vector]


def _rank(columns: list[dict]) -> int:
    keys = sorted({key for column in columns for key in column}, key=_key_order)
    if not keys or not columns:
        return 0
    return _to_domain_matrix(columns, keys).rank()


def span_contains(elements: list, candidate) -> bool:
    """Exact membership of candidate in the QQ-span of elements."""
    *columns, target = _coefficient_vectors([_as_forms(e) for e in elements] + [_as_forms(candidate)])
    if not target:
        return True
    return _rank(columns) == _rank(columns + [target])


def _as_forms(value) -> tuple:
    if isinstance(value, Section):
        return value.components
    if isinstance(value, (IDForm, JetExpression)):
        return (value,)
    return tuple(value)


# ---------------------------------------------------------------------
# Solver
# ---------------------------------------------------------------------


def _unknowns(D: CDiffOperator, A: AnsatzSpace) -> list[tuple[int, IDForm]]:
    base = _padded(A.slot_degrees, D.nslots)
    unknowns = []
    for c in range(D.cols):
        target = tuple(b + o for b, o in zip(base, D.col_offsets[c]))
        unknowns.extend((c, w) for w in enumerate_ansatz(D.space, A, D.nslots, target))
        if len(unknowns) > A.cap:
            raise AnsatzOverflowError(f"ansatz exceeds {A.cap} unknowns (column {D.col_labels[c]})")
    return unknowns


def _image(D: CDiffOperator, c: int, w: IDForm) -> tuple[IDForm, ...]:
    args = [IDForm.zero(D.space, D.nslots) for _ in range(D.cols)]
    args[c] = w
    return apply(D, args)


def _combine(D: CDiffOperator, unknowns, vector) -> tuple[IDForm, ...]:
    out = [IDForm.zero(D.space, D.nslots) for _ in range(D.cols)]
    for (c, w), value in zip(unknowns, vector):
        if value != 0:
            out[c] = out[c] + w * value
    return tuple(out)


def solve_kernel(D: CDiffOperator, A: AnsatzSpace, label: str = "kernel") -> KernelBasis:
    """
    Kernel of D (restricted to an equation) within the span of the ansatz.
    Every returned element is re-applied and must vanish exactly.
    """
    if D.equation is None:
        raise ValueError("solve_kernel needs an operator restricted to an equation")
    start = timer()
    unknowns = _unknowns(D, A)
    columns = _coefficient_vectors([_image(D, c, w) for c, w in unknowns])
    vectors, dims = _nullspace(columns)
    elements = [_combine(D, unknowns, _primitive(v)) for v in vectors]
    for element in elements:
        if any(not w.is_zero for w in apply(D, list(element))):
            raise KernelVerificationError(f"{label} element {print_element(element)} is not annihilated")
    logger.info(
        "%s on %s: %d unknowns, %d equations, rank %d, kernel %d (%.2fs)",
        label, D.equation.name, dims[1], dims[0], dims[2], len(elements), timer() - start,
    )
    return KernelBasis(label, D, A, elements, dims)


def symmetries(E: EquationSystem, A: AnsatzSpace) -> KernelBasis:
    return solve_kernel(restrict_operator(linearize(E), E), A, label="symmetries")


def cosymmetries(E: EquationSystem, A: AnsatzSpace) -> KernelBasis:
    return solve_kernel(restrict_operator(adjoint(linearize(E)), E), A, label="cosymmetries")


def lifted_adjoint(E: EquationSystem, k: int, p: int) -> CDiffOperator:
    """[restricted adjoint of the level-k lifted linearization]_{p-1}."""
    return extend_p(restrict_operator(adjoint(lift_linearize(E, k)), E), p - 1, k)


def lifted_cosymmetries(E: EquationSystem, k: int, p: int, A: AnsatzSpace) -> KernelBasis:
    """
    Kernel of the extended lifted adjoint; `A.slot_degrees` gives the
    degrees in slots 1..k-1, slot k carries p-1. Each element is also
    alternated into a Cartan p-form in slot k.
    """
    D = lifted_adjoint(E, k, p)
    slot_degrees = _padded(A.slot_degrees, k - 1) + (p - 1,)
    ansatz = AnsatzSpace(A.order, A.degree, slot_degrees, 0, None, A.explicit_xt, A.cap)
    result = solve_kernel(D, ansatz, label=f"lifted cosymmetries k={k} p={p}")
    result.alternated = [alternate_element(D, element, k, p) for element in result.elements]
    return result


def alternate_element(D: CDiffOperator, element: tuple[IDForm, ...], k: int, p: int) -> IDForm:
    """alt_p of sum over columns (a, K) of d^v_{K+k} u^a (x) psi_(a,K)."""
    terms = []
    subsets = SlotSet.all_subsets(k - 1)
    r = len(element) // len(subsets)
    for c, w in enumerate(element):
        K = subsets[c // r]
        j = D.equation.equations[c % r][0].index
        first = IDForm.generator(vertical_generator(K.with_slot(k), j, MultiIndex.zero(D.space.n)), D.space, k)
        terms.append(TensorTerm(first, w, IDForm.scalar(ONE, D.space, k)))
    return alt_p(terms, p, k)


def lie_bracket(phi1: Section, phi2: Section, E: EquationSystem) -> Section:
    """Bracket of two sections, restricted to E."""
    return restrict_section(lie_bracket_free(phi1, phi2, E.space), E)


def truncated_cokernel(D: CDiffOperator, A: AnsatzSpace, target: AnsatzSpace | None = None) -> CokernelData:
    """
    Target ansatz modulo the image of those domain combinations whose image
    stays inside the target ansatz. Representatives are the target
    monomials that are not pivots of the image.
    """
    target = target or A
    base = _padded(target.slot_degrees, D.nslots)
    target_basis: list[tuple[int, IDForm]] = []
    for r in range(D.rows):
        degree = tuple(b + o for b, o in zip(base, D.row_offsets[r]))
        target_basis.extend((r, w) for w in enumerate_ansatz(D.space, target, D.nslots, degree))
    n = len(target_basis)
    targets = []
    for r, w in target_basis:
        element = [IDForm.zero(D.space, D.nslots) for _ in range(D.rows)]
        element[r] = w
        targets.append(tuple(element))

    unknowns = _unknowns(D, A)
    vectors = _coefficient_vectors([_image(D, c, w) for c, w in unknowns] + targets)
    images, target_vectors = vectors[: len(unknowns)], vectors[len(unknowns):]
    # image(a) = sum_i b_i target_i, solved for (a, b) together
    combos, _ = _nullspace(images + [{key: -v for key, v in t.items()} for t in target_vectors])
    offset = len(unknowns)
    image_columns = [
        {i: sp.Rational(vector[offset + i]) for i in range(n) if vector[offset + i] != 0} for vector in combos
    ]

    if image_columns and any(image_columns):
        # rows are image vectors so pivots are target positions
        dod = {}
        for row, column in enumerate(image_columns):
            for i, v in column.items():
                dod.setdefault(row, {})[i] = QQ(int(v.p), int(v.q))
        _, pivots = DomainMatrix(dod, (len(image_columns), n), QQ).rref()
    else:
        pivots = ()
    reps = [element for i, element in enumerate(targets) if i not in pivots]
    dims = (len(image_columns), n, len(pivots))
    logger.info("cokernel: target %d, image rank %d, quotient %d", n, len(pivots), n - len(pivots))
    return CokernelData(n - len(pivots), reps, dims)


def kernel_to_frame(K: KernelBasis, system: str = "") -> pd.DataFrame:
    rows = []
    for i, element in enumerate(K.elements):
        for c, w in enumerate(element):
            if w.is_zero:
                continue
            rows.append(
                {
                    "system": system or (K.operator.equation.name if K.operator.equation else ""),
                    "label": K.label,
                    "element": i,
                    "component": K.operator.col_labels[c],
                    "expression": str(w),
                    "order": K.ansatz.order,
                    "degree": K.ansatz.degree,
                }
            )
    columns = ["system", "label", "element", "component", "expression", "order", "degree"]
    return validate_kernel_df(pd.DataFrame(rows, columns=columns))
