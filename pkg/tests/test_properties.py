# -*- coding: utf-8 -*-
"""
Run every randomized property suite with a handful of trials.
"""

import numpy as np
import pytest

from src.properties import FREE_SPACE, SUITES, random_form, random_scalar_operator, run_selftest


@pytest.mark.parametrize("name", list(SUITES))
def test_suite_passes(name):
    (result,) = run_selftest(seed=11, trials={name: 5}, suites=[name])
    assert result.name == name and result.trials == 5
    assert result.passed, result.messages


def test_seeded_generators_are_reproducible():
    first = random_form(np.random.default_rng(7), FREE_SPACE, 2)
    second = random_form(np.random.default_rng(7), FREE_SPACE, 2)
    assert first == second
    assert random_scalar_operator(np.random.default_rng(7), FREE_SPACE) == random_scalar_operator(
        np.random.default_rng(7), FREE_SPACE
    )


def test_unknown_suite():
    with pytest.raises(ValueError):
        run_selftest(suites=["nope"])


def test_default_axiom_run_stays_under_a_minute():
    (result,) = run_selftest(seed=0, suites=["idf_axioms"])
    assert result.trials == 1000
    assert result.passed, result.messages
    assert result.seconds < 60, f"1000 axiom trials took {result.seconds:.1f}s"
