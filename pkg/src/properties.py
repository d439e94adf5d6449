# -*- coding: utf-8 -*-
"""
Randomized property suites, reproducible by seed.

Role:
- idf_axioms:        slot differentials, products and the Leibniz rule
- pullback:          F^* is an algebra map commuting with every d_i (F = heat)
- adjoints:          Green's formula, involution, anti-homomorphism
- extension:         [.]_p respects composition and identities
- jets:              total derivatives commute, Euler kills divergences,
                     restriction is idempotent
- brackets:          KdV symmetry closure, antisymmetry, Jacobi

Each suite returns a PropertyResult; `run_selftest` runs them all.
"""

# src/properties.py

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from timeit import default_timer as timer
from typing import Callable

import numpy as np
import sympy as sp

from src.cdiff_operators import (
    CDiffOperator,
    adjoint,
    apply,
    compose,
    extend_p,
    green_check,
    identity_operator,
    linearize,
    scalar_operator,
)
from src.corpus import corpus_entry, load_corpus
from src.determining_solver import lie_bracket, span_contains
from src.expr_core import JetExpression, JetSpace, MultiIndex
from src.idf_algebra import (
    IDForm,
    SlotSet,
    base_generator,
    d_horizontal,
    d_slot,
    d_vertical,
    pullback_F,
    vertical_generator,
)
from src.jet_calculus import (
    Section,
    euler_operator,
    is_total_divergence,
    lie_bracket_free,
    restrict_to_equation,
    target_space,
    total_derivative,
)

logger = logging.getLogger(__name__)

FREE_SPACE = JetSpace(("x", "t"), ("u",))

# trial counts used by `selftest`
DEFAULT_TRIALS = {
    "idf_axioms": 1000,
    "pullback": 200,
    "adjoints": 100,
    "extension": 100,
    "jets": 100,
    "brackets": 50,
}


@dataclass
class PropertyResult:
    name: str
    trials: int
    failures: int = 0
    seconds: float = 0.0
    messages: list[str] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return self.failures == 0

    def fail(self, message: str) -> None:
        self.failures += 1
        if len(self.messages) < 5:
            self.messages.append(message)


# ---------------------------------------------------------------------
# Random objects
# ---------------------------------------------------------------------


def _symbols(space: JetSpace, order: int = 1, with_x: bool = True) -> list[sp.Symbol]:
    out = [space.x(0).symbol] if with_x else []
    for j in range(space.m):
        out.append(space.u(j).symbol)
        for mu in range(space.n):
            if order >= 1:
                out.append(space.u(j, MultiIndex.unit(space.n, mu)).symbol)
    return out


def random_polynomial(rng: np.random.Generator, symbols: list[sp.Symbol], degree: int, terms: int = 3) -> JetExpression:
    expr = sp.Integer(0)
    for _ in range(terms):
        mono = sp.Integer(int(rng.integers(-3, 4)))
        for _ in range(int(rng.integers(0, degree + 1))):
            mono *= symbols[int(rng.integers(len(symbols)))]
        expr += mono
    return JetExpression.from_sympy(expr)


def random_sigma(rng: np.random.Generator, n: int, max_order: int) -> MultiIndex:
    counts = [0] * n
    for _ in range(int(rng.integers(0, max_order + 1))):
        counts[int(rng.integers(n))] += 1
    return MultiIndex(tuple(counts))


def random_generator(rng: np.random.Generator, space: JetSpace, nslots: int):
    K = SlotSet(int(rng.integers(1, 2**nslots)))
    if rng.random() < 0.7:
        return vertical_generator(K, int(rng.integers(space.m)), random_sigma(rng, space.n, 1))
    return base_generator(K, int(rng.integers(space.n)))


def random_monomial(rng: np.random.Generator, space: JetSpace, nslots: int, max_generators: int = 2) -> IDForm:
    gens = [random_generator(rng, space, nslots) for _ in range(int(rng.integers(0, max_generators + 1)))]
    coefficient = random_polynomial(rng, _symbols(space), 3, terms=2)
    return IDForm.monomial(gens, coefficient, space, nslots)


def random_form(rng: np.random.Generator, space: JetSpace, nslots: int, terms: int = 2) -> IDForm:
    out = IDForm.zero(space, nslots)
    for _ in range(terms):
        out = out + random_monomial(rng, space, nslots)
    return out


def random_scalar_operator(rng: np.random.Generator, space: JetSpace, max_order: int = 3) -> CDiffOperator:
    terms = {}
    for _ in range(int(rng.integers(1, 4))):
        terms[random_sigma(rng, space.n, max_order)] = random_polynomial(rng, _symbols(space), 2, terms=2)
    return scalar_operator(space, terms)


def random_section(rng: np.random.Generator, space: JetSpace) -> Section:
    symbols = _symbols(space, with_x=False) + [space.u(0, MultiIndex((2,) + (0,) * (space.n - 1))).symbol]
    return Section(tuple(random_polynomial(rng, symbols, 2, terms=2) for _ in range(space.m)))


def _degree_sign(a: IDForm, b: IDForm) -> int:
    pairing = sum(x * y for x, y in zip(a.degree(), b.degree()))
    return -1 if pairing % 2 else 1


# ---------------------------------------------------------------------
# Suites
# ---------------------------------------------------------------------


def check_idf_axioms(rng: np.random.Generator, trials: int) -> PropertyResult:
    result = PropertyResult("idf_axioms", trials)
    space = FREE_SPACE
    for t in range(trials):
        k = int(rng.integers(1, 4))
        w = random_form(rng, space, k)
        a = random_monomial(rng, space, k)
        b = random_monomial(rng, space, k)
        c = random_monomial(rng, space, k)
        first = {}
        for i in range(1, k + 1):
            dh, dv = d_horizontal(w, i), d_vertical(w, i)
            first[i] = dh + dv
            hh, vv = d_horizontal(dh, i), d_vertical(dv, i)
            mixed = d_horizontal(dv, i) + d_vertical(dh, i)
            if not hh.is_zero:
                result.fail(f"trial {t}: (d_{i}^h)^2 != 0 on {w}")
            if not vv.is_zero:
                result.fail(f"trial {t}: (d_{i}^v)^2 != 0 on {w}")
            if not mixed.is_zero:
                result.fail(f"trial {t}: d_{i}^h and d_{i}^v do not anticommute on {w}")
            if not (hh + mixed + vv).is_zero:
                result.fail(f"trial {t}: d_{i}^2 != 0 on {w}")
            sign = -1 if a.degree()[i - 1] % 2 else 1
            if d_slot(a * b, i) != d_slot(a, i) * b + a * d_slot(b, i) * sign:
                result.fail(f"trial {t}: Leibniz rule for d_{i} fails on {a}, {b}")
        for i in range(1, k + 1):
            for j in range(i + 1, k + 1):
                if d_slot(first[i], j) != d_slot(first[j], i):
                    result.fail(f"trial {t}: d_{i} d_{j} != d_{j} d_{i} on {w}")
        if (a * b) * c != a * (b * c):
            result.fail(f"trial {t}: product not associative on {a}, {b}, {c}")
        if a * b != b * a * _degree_sign(a, b):
            result.fail(f"trial {t}: graded commutativity fails on {a}, {b}")
    return result


def check_pullback(rng: np.random.Generator, trials: int) -> PropertyResult:
    result = PropertyResult("pullback", trials)
    E = corpus_entry("heat").system
    tspace = target_space(E)
    for t in range(trials):
        k = int(rng.integers(1, 3))
        w = random_form(rng, tspace, k)
        v = random_monomial(rng, tspace, k)
        if pullback_F(w * v, E) != pullback_F(w, E) * pullback_F(v, E):
            result.fail(f"trial {t}: F^*(w v) != F^*(w) F^*(v) for {w}, {v}")
        for i in range(1, k + 1):
            if pullback_F(d_slot(w, i), E) != d_slot(pullback_F(w, E), i):
                result.fail(f"trial {t}: F^* does not commute with d_{i} on {w}")
    return result


def check_adjoints(rng: np.random.Generator, trials: int) -> PropertyResult:
    result = PropertyResult("adjoints", trials)
    for entry in load_corpus():
        if not green_check(linearize(entry.system)):
            result.fail(f"Green's formula fails for the linearization of {entry.name}")
    space = FREE_SPACE
    for t in range(trials):
        D1 = random_scalar_operator(rng, space)
        D2 = random_scalar_operator(rng, space)
        if not green_check(D1):
            result.fail(f"trial {t}: Green's formula fails for {D1}")
        if adjoint(adjoint(D1)) != D1:
            result.fail(f"trial {t}: adjoint is not an involution on {D1}")
        if adjoint(compose(D2, D1)) != compose(adjoint(D1), adjoint(D2)):
            result.fail(f"trial {t}: adjoint reverses composition incorrectly for {D2} o {D1}")
    return result


def _tensor_argument(rng: np.random.Generator, space: JetSpace, k: int, p: int) -> IDForm:
    gens = [vertical_generator(SlotSet.of(k), 0, MultiIndex.unit(space.n, i % space.n)) for i in range(p)]
    if p == 1:
        gens = [vertical_generator(SlotSet.of(k), 0, random_sigma(rng, space.n, 1))]
    coefficient = random_polynomial(rng, _symbols(space), 2, terms=2)
    return IDForm.monomial(gens, coefficient, space, k)


def check_extension(rng: np.random.Generator, trials: int) -> PropertyResult:
    result = PropertyResult("extension", trials)
    space = FREE_SPACE
    for t in range(trials):
        k = int(rng.integers(1, 3))
        p = int(rng.integers(1, 3))
        D1 = random_scalar_operator(rng, space, max_order=2)
        D2 = random_scalar_operator(rng, space, max_order=2)
        left = extend_p(compose(D2, D1), p, k)
        right = compose(extend_p(D2, p, k), extend_p(D1, p, k))
        if left != right:
            result.fail(f"trial {t}: [D2 o D1]_{p} != [D2]_{p} o [D1]_{p}")
        if extend_p(identity_operator(space, 1), p, k) != identity_operator(space, 1, nslots=k):
            result.fail(f"trial {t}: [id]_{p} is not the identity")
        w = _tensor_argument(rng, space, k, p)
        if w.is_zero:
            continue
        if apply(left, [w]) != apply(extend_p(D2, p, k), apply(extend_p(D1, p, k), [w])):
            result.fail(f"trial {t}: [D2 o D1]_{p} applied to {w} differs from the composite")
    return result


def check_jets(rng: np.random.Generator, trials: int) -> PropertyResult:
    result = PropertyResult("jets", trials)
    space = FREE_SPACE
    E = corpus_entry("kdv").system
    symbols = _symbols(space)
    for t in range(trials):
        f = random_polynomial(rng, symbols, 3)
        dx = total_derivative(f, 0, space)
        if total_derivative(dx, 1, space) != total_derivative(total_derivative(f, 1, space), 0, space):
            result.fail(f"trial {t}: Dx Dt != Dt Dx on {f}")
        if not euler_operator(dx, space).is_zero or not is_total_divergence(dx, space):
            result.fail(f"trial {t}: Dx({f}) not recognized as a total divergence")
        once = restrict_to_equation(f, E)
        if restrict_to_equation(once, E) != once:
            result.fail(f"trial {t}: restriction not idempotent on {f}")
    return result


def check_brackets(rng: np.random.Generator, trials: int) -> PropertyResult:
    result = PropertyResult("brackets", trials)
    kdv = corpus_entry("kdv")
    basis = list(kdv.golden["symmetries"].basis)
    for a in basis:
        for b in basis:
            if not span_contains(basis, lie_bracket(a, b, kdv.system)):
                result.fail(f"KdV bracket of {a} and {b} leaves the symmetry span")
    space = FREE_SPACE
    for t in range(trials):
        a, b, c = (random_section(rng, space) for _ in range(3))
        if not (lie_bracket_free(a, b, space) + lie_bracket_free(b, a, space)).is_zero:
            result.fail(f"trial {t}: bracket not antisymmetric on {a}, {b}")
        jacobi = (
            lie_bracket_free(a, lie_bracket_free(b, c, space), space)
            + lie_bracket_free(b, lie_bracket_free(c, a, space), space)
            + lie_bracket_free(c, lie_bracket_free(a, b, space), space)
        )
        if not jacobi.is_zero:
            result.fail(f"trial {t}: Jacobi identity fails on {a}, {b}, {c}")
    return result


SUITES: dict[str, Callable[[np.random.Generator, int], PropertyResult]] = {
    "idf_axioms": check_idf_axioms,
    "pullback": check_pullback,
    "adjoints": check_adjoints,
    "extension": check_extension,
    "jets": check_jets,
    "brackets": check_brackets,
}


def run_selftest(
    seed: int = 0, trials: dict[str, int] | None = None, suites: list[str] | None = None
) -> list[PropertyResult]:
    """Run the named suites (all by default), each with its own generator seeded from `seed`."""
    counts = {**DEFAULT_TRIALS, **(trials or {})}
    names = suites or list(SUITES)
    unknown = [n for n in names if n not in SUITES]
    if unknown:
        raise ValueError(f"unknown property suites: {unknown}")
    results = []
    for offset, name in enumerate(names):
        rng = np.random.default_rng(seed + offset)
        start = timer()
        result = SUITES[name](rng, counts[name])
        result.seconds = timer() - start
        logger.info("%s: %d trials, %d failures (%.2fs)", name, result.trials, result.failures, result.seconds)
        results.append(result)
    return results
