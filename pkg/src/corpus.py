# -*- coding: utf-8 -*-
"""
Curated evolution systems with golden symmetry / cosymmetry bases.

Role:
- load every data/corpus/*.eq file, check the normal form
- optionally re-verify every golden element (apply + restrict = 0)
- flatten the golden data into a validated table
"""

# src/corpus.py

from __future__ import annotations

import logging
from dataclasses import dataclass
from pathlib import Path

import pandas as pd

from src.cdiff_operators import CDiffOperator, adjoint, apply_section, linearize, restrict_operator
from src.determining_solver import AnsatzSpace
from src.jet_calculus import EquationSystem, Section, is_normal_form
from src.system_files import GoldenBasis, SystemFileError, load_system
from src.validation import validate_corpus_df

logger = logging.getLogger(__name__)

CORPUS_DIR = Path(__file__).resolve().parents[1] / "data" / "corpus"


class CorpusError(ValueError):
    pass


@dataclass
class CorpusEntry:
    name: str
    path: Path
    system: EquationSystem
    golden: dict[str, GoldenBasis]

    def source_text(self) -> str:
        return self.path.read_text(encoding="utf-8")

    def ansatz(self, kind: str) -> AnsatzSpace:
        g = self.golden[kind]
        return AnsatzSpace(order=g.order, degree=g.degree, explicit_xt=g.explicit_xt)


def golden_operator(E: EquationSystem, kind: str) -> CDiffOperator:
    """Restricted linearization for symmetries, its adjoint for cosymmetries."""
    if kind == "symmetries":
        return restrict_operator(linearize(E), E)
    if kind == "cosymmetries":
        return restrict_operator(adjoint(linearize(E)), E)
    raise CorpusError(f"unknown golden kind '{kind}'")


def is_annihilated(E: EquationSystem, kind: str, element: Section) -> bool:
    return apply_section(golden_operator(E, kind), element).is_zero


def verify_entry(entry: CorpusEntry) -> None:
    for kind, g in entry.golden.items():
        for element in g.basis:
            if not is_annihilated(entry.system, kind, element):
                raise CorpusError(f"{entry.name}: golden {kind} element {element} is not annihilated on E")
        logger.debug("%s: %d golden %s verified", entry.name, len(g.basis), kind)


def load_entry(path: str | Path, verify: bool = False) -> CorpusEntry:
    path = Path(path)
    try:
        parsed = load_system(path)
    except SystemFileError as exc:
        raise CorpusError(str(exc)) from None
    ok, diagnostics = is_normal_form(parsed.system)
    if not ok:
        raise CorpusError(f"{path.name}: " + "; ".join(diagnostics))
    entry = CorpusEntry(parsed.system.name, path, parsed.system, parsed.golden)
    if verify:
        verify_entry(entry)
    return entry


def load_corpus(directory: str | Path | None = None, verify: bool = False) -> list[CorpusEntry]:
    directory = Path(directory) if directory is not None else CORPUS_DIR
    paths = sorted(directory.glob("*.eq"))
    if not paths:
        raise CorpusError(f"no .eq files in {directory}")
    entries = [load_entry(p, verify=verify) for p in paths]
    names = [e.name for e in entries]
    if len(set(names)) != len(names):
        raise CorpusError(f"duplicate system names in {directory}: {names}")
    return entries


def corpus_entry(name: str, directory: str | Path | None = None, verify: bool = False) -> CorpusEntry:
    directory = Path(directory) if directory is not None else CORPUS_DIR
    path = directory / f"{name}.eq"
    if not path.exists():
        raise CorpusError(f"no corpus system named '{name}'")
    return load_entry(path, verify=verify)


def corpus_frame(entries: list[CorpusEntry]) -> pd.DataFrame:
    """One row per golden element, with its re-verification flag."""
    rows = []
    for entry in entries:
        for kind, g in entry.golden.items():
            for element in g.basis:
                rows.append(
                    {
                        "system": entry.name,
                        "kind": kind,
                        "order": g.order,
                        "degree": g.degree,
                        "xt": g.explicit_xt,
                        "element": str(element),
                        "verified": is_annihilated(entry.system, kind, element),
                        "exact": g.exact,
                    }
                )
    columns = ["system", "kind", "order", "degree", "xt", "element", "verified", "exact"]
    return validate_corpus_df(pd.DataFrame(rows, columns=columns))
