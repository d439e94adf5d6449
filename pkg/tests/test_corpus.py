# -*- coding: utf-8 -*-
"""
Tests for the curated corpus: loading, golden verification, the corpus
table and agreement of exact golden bases with the solver.
"""

import pytest

from src.corpus import CorpusError, corpus_entry, corpus_frame, load_corpus
from src.determining_solver import cosymmetries, span_contains, symmetries
from tests.utils import make_system_text


@pytest.fixture(scope="module")
def corpus():
    return load_corpus(verify=True)


def test_corpus_names(corpus):
    assert [e.name for e in corpus] == ["burgers", "heat", "kdv", "transport", "wave2"]
    assert all(set(e.golden) == {"symmetries", "cosymmetries"} for e in corpus)


def test_corpus_table(corpus):
    df = corpus_frame(corpus)
    assert df["verified"].all()
    assert set(df["system"]) == {e.name for e in corpus}
    kdv = df[(df["system"] == "kdv") & (df["kind"] == "cosymmetries")]
    assert len(kdv) == 3


def test_exact_golden_bases_match_the_solver(corpus):
    solvers = {"symmetries": symmetries, "cosymmetries": cosymmetries}
    for entry in corpus:
        for kind, golden in entry.golden.items():
            found = solvers[kind](entry.system, entry.ansatz(kind)).sections()
            for element in golden.basis:
                assert span_contains(found, element), f"{entry.name} {kind}: {element}"
            if golden.exact:
                assert len(found) == len(golden.basis), f"{entry.name} {kind}"


def test_wrong_golden_element_is_rejected(tmp_path):
    extra = "[cosymmetries]\norder = 1\ndegree = 1\nbasis = 1; u\n"
    path = tmp_path / "heat.eq"
    path.write_text(make_system_text("heat", ["u_t = u_xx"], extra=extra), encoding="utf-8")
    assert corpus_entry("heat", directory=tmp_path).name == "heat"
    with pytest.raises(CorpusError, match="not annihilated"):
        corpus_entry("heat", directory=tmp_path, verify=True)


def test_corpus_errors(tmp_path):
    with pytest.raises(CorpusError):
        load_corpus(tmp_path)
    with pytest.raises(CorpusError):
        corpus_entry("missing")
    (tmp_path / "bad.eq").write_text(make_system_text("bad", ["u_x = u_t"]), encoding="utf-8")
    with pytest.raises(CorpusError):
        load_corpus(tmp_path)


def test_duplicate_names(tmp_path):
    text = make_system_text("heat", ["u_t = u_xx"])
    (tmp_path / "a.eq").write_text(text, encoding="utf-8")
    (tmp_path / "b.eq").write_text(text, encoding="utf-8")
    with pytest.raises(CorpusError, match="duplicate"):
        load_corpus(tmp_path)
