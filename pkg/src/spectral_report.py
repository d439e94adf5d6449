# -*- coding: utf-8 -*-
"""
Two Lines reports: the first page of the iterated spectral sequence of an
evolution system at a fixed level k and column p, at bounded order.

Role:
- q < n-1: horizontal cohomology of Cartan p-forms in slot k, truncated.
  Expected to vanish; the solved system's dimensions are kept as evidence.
- q = n-1: kernel of the extended lifted adjoint, alternated into p-forms.
- q = n:   truncated cokernel of the same operator (never certified).
- p = 0:   a note pointing to level k-1.

Also the batch runner over a directory of system files, writing one
feather table per system and a validated panel.
"""

# src/spectral_report.py

from __future__ import annotations

import gc
import glob
import logging
import os
from dataclasses import dataclass, field
from timeit import default_timer as timer

import pandas as pd
import pyarrow.feather as feather

from src.cdiff_operators import apply, horizontal_operator
from src.determining_solver import (
    AnsatzOverflowError,
    AnsatzSpace,
    KernelVerificationError,
    enumerate_ansatz,
    lifted_adjoint,
    lifted_cosymmetries,
    print_element,
    solve_kernel,
    span_contains,
    truncated_cokernel,
)
from src.idf_algebra import MAX_SLOTS, SlotRangeError
from src.jet_calculus import EquationSystem, NormalFormError, require_normal_form
from src.system_files import SystemFileError, load_system
from src.validation import validate_e1_cells_df

logger = logging.getLogger(__name__)

CELL_COLUMNS = ["system", "k", "p", "q", "kind", "dim", "rows", "cols", "rank", "certified", "basis"]


@dataclass
class E1Cell:
    q: int | None
    kind: str
    basis: list[str] = field(default_factory=list)
    dims: tuple[int, int, int] = (0, 0, 0)
    certified: bool = False
    note: str = ""

    @property
    def dim(self) -> int:
        return len(self.basis)


@dataclass
class E1Report:
    system: str
    k: int
    p: int
    n: int
    cells: list[E1Cell]
    config: dict = field(default_factory=dict)

    def cell(self, q: int | None, kind: str | None = None) -> E1Cell:
        for c in self.cells:
            if c.q == q and (kind is None or c.kind == kind):
                return c
        raise KeyError(f"no cell q={q} kind={kind} in report for {self.system}")


# ---------------------------------------------------------------------
# Cells
# ---------------------------------------------------------------------


def _slot_degrees(A: AnsatzSpace, k: int, last: int) -> tuple[int, ...]:
    """A's degrees for slots 1..k-1, then `last` for slot k."""
    head = tuple(A.slot_degrees)[: k - 1]
    return head + (0,) * (k - 1 - len(head)) + (last,)


def _cochain_ansatz(A: AnsatzSpace, k: int, p: int, q: int) -> AnsatzSpace:
    return AnsatzSpace(A.order, A.degree, _slot_degrees(A, k, p), q, k, A.explicit_xt, A.cap)


def _independent(elements: list) -> list:
    chosen = []
    for element in elements:
        if not span_contains(chosen, element):
            chosen.append(element)
    return chosen


def zero_column_note(E: EquationSystem, k: int) -> E1Cell:
    if k < 1:
        raise ValueError(f"level k={k} must be at least 1")
    if k == 1:
        text = (
            f"{E.name}: the p = 0 column at level 1 is the horizontal cohomology of E, "
            "which is not computed here"
        )
    else:
        text = (
            f"{E.name}: the p = 0 column at level {k} is the whole first page at level {k - 1}; "
            f"rerun the reports with k = {k - 1}"
        )
    return E1Cell(q=None, kind="note", note=text)


def vanishing_cell(E: EquationSystem, k: int, p: int, q: int, A: AnsatzSpace) -> E1Cell:
    """
    Horizontal q-cocycles of Cartan p-forms in slot k modulo coboundaries of
    (q-1)-cochains at the same bounds.
    """
    D = horizontal_operator(E.space, k, k, E)
    cocycles = solve_kernel(D, _cochain_ansatz(A, k, p, q), label=f"horizontal cocycles k={k} p={p} q={q}")
    boundaries = []
    if q > 0:
        lower = _cochain_ansatz(A, k, p, q - 1)
        boundaries = [apply(D, [w]) for w in enumerate_ansatz(E.space, lower, k, lower.slot_degrees)]

    classes = []
    for element in cocycles.elements:
        if not span_contains(boundaries + classes, element):
            classes.append(element)
    if classes:
        logger.warning("%s: %d horizontal classes in row q=%d at k=%d p=%d", E.name, len(classes), q, k, p)
    return E1Cell(q, "vanishing", [print_element(c) for c in classes], cocycles.dims, certified=True)


def kernel_cell(E: EquationSystem, k: int, p: int, A: AnsatzSpace) -> E1Cell:
    K = lifted_cosymmetries(E, k, p, A)
    alternated = _independent([w for w in K.alternated if not w.is_zero])
    if p == 1:
        # alternation in degree one is the identity
        if len(alternated) != K.dim:
            raise KernelVerificationError(
                f"{E.name}: alternation kept {len(alternated)} of {K.dim} lifted cosymmetries"
            )
        basis = K.printed()
    else:
        basis = [str(w) for w in alternated]
    return E1Cell(E.space.n - 1, "kernel", basis, K.dims, certified=True)


def cokernel_cell(E: EquationSystem, k: int, p: int, A: AnsatzSpace) -> E1Cell:
    D = lifted_adjoint(E, k, p)
    ansatz = AnsatzSpace(A.order, A.degree, _slot_degrees(A, k, p - 1), 0, None, A.explicit_xt, A.cap)
    C = truncated_cokernel(D, ansatz)
    return E1Cell(E.space.n, "cokernel", [print_element(r) for r in C.representatives], C.dims, certified=False)


def two_lines_report(E: EquationSystem, k: int, p: int, A: AnsatzSpace) -> E1Report:
    """All cells of column p at level k, bottom row first, after the p = 0 note."""
    require_normal_form(E)
    if p < 1:
        raise ValueError(f"column p={p} must be at least 1")
    if k > MAX_SLOTS:
        raise SlotRangeError(f"level k={k} exceeds {MAX_SLOTS} slots")
    n = E.space.n
    start = timer()
    cells = [zero_column_note(E, k)]
    cells.extend(vanishing_cell(E, k, p, q, A) for q in range(n - 1))
    cells.append(kernel_cell(E, k, p, A))
    cells.append(cokernel_cell(E, k, p, A))
    logger.info("report %s k=%d p=%d finished in %.2fs", E.name, k, p, timer() - start)
    config = {"ansatz": A.describe(), "cap": A.cap}
    return E1Report(E.name, k, p, n, cells, config)


# ---------------------------------------------------------------------
# Output
# ---------------------------------------------------------------------


def cell_to_json(cell: E1Cell) -> dict:
    out = {
        "q": cell.q,
        "kind": cell.kind,
        "basis": list(cell.basis),
        "dims": {"rows": cell.dims[0], "cols": cell.dims[1], "rank": cell.dims[2]},
        "certified": cell.certified,
    }
    if cell.note:
        out["note"] = cell.note
    return out


def report_to_json(report: E1Report, config: dict | None = None) -> dict:
    return {
        "system": report.system,
        "k": report.k,
        "p": report.p,
        "cells": [cell_to_json(c) for c in report.cells],
        "config": config if config is not None else report.config,
    }


def cells_frame(report: E1Report) -> pd.DataFrame:
    rows = []
    for c in report.cells:
        text = c.note if c.kind == "note" else "; ".join(c.basis)
        rows.append(
            {
                "system": report.system,
                "k": report.k,
                "p": report.p,
                "q": c.q,
                "kind": c.kind,
                "dim": c.dim,
                "rows": c.dims[0],
                "cols": c.dims[1],
                "rank": c.dims[2],
                "certified": c.certified,
                "basis": text or None,
            }
        )
    df = pd.DataFrame(rows, columns=CELL_COLUMNS)
    df["q"] = df["q"].astype("Int64")
    return validate_e1_cells_df(df)


# ---------------------------------------------------------------------
# Batch processing and panel building
# ---------------------------------------------------------------------


def list_system_files(system_dir: str) -> list[str]:
    """Sorted list of all .eq files under system_dir."""
    return sorted(os.path.normpath(p) for p in glob.glob(os.path.join(system_dir, "*.eq")))


def process_system_file(
        path: str,
        outpath: str,
        levels: list[int],
        columns: list[int],
        A: AnsatzSpace,
        ) -> bool:
    """
    Process a single system file:
      - parse it and check the normal form
      - build a report for every (k, p)
      - save the stacked cell table as <name>.feather

    Returns True if processed, False if skipped.
    """
    try:
        E = load_system(path).system
        require_normal_form(E)
    except (SystemFileError, NormalFormError) as exc:
        print(f"Skipping {path}: {exc}")
        return False

    frames = []
    for k in levels:
        for p in columns:
            try:
                frames.append(cells_frame(two_lines_report(E, k, p, A)))
            except AnsatzOverflowError as exc:
                print(f"Skipping {E.name} k={k} p={p}: {exc}")
    if not frames:
        return False

    table = pd.concat(frames, ignore_index=True)
    output_filename = os.path.normpath(os.path.join(outpath, f"{E.name}.feather"))
    feather.write_feather(table, output_filename)
    return True


def process_all_systems(
        system_dir: str,
        outpath: str,
        levels: list[int],
        columns: list[int],
        A: AnsatzSpace,
        limit: int | None = None,
        ) -> None:
    """Loop over all system files, build reports and save per-system tables."""
    os.makedirs(outpath, exist_ok=True)

    paths = list_system_files(system_dir)
    if limit is not None:
        paths = paths[:limit]

    total_iterations = len(paths)
    start = timer()
    for iteration, path in enumerate(paths, start=1):
        processed = process_system_file(path, outpath, levels, columns, A)
        status = "Processed" if processed else "Skipped"
        print(f"Iteration {iteration}/{total_iterations}: {status} {os.path.basename(path)}")
        gc.collect()

    end = timer()
    print(f"Finished processing all systems in {end - start:.2f} seconds.")


def build_report_panel(source_dir: str, output_path: str) -> pd.DataFrame:
    """
    Read all per-system report tables, concatenate into a panel, drop
    duplicate cells, validate and save to output_path.
    """
    all_files = sorted(os.path.normpath(p) for p in glob.glob(os.path.join(source_dir, "*.feather")))
    if not all_files:
        raise RuntimeError(
            f"No per-system report files found in: {source_dir}. "
            "Upstream processing produced zero outputs."
        )

    total_iterations = len(all_files)
    print(f"Building panel from {total_iterations} per-system report files.")

    li = []
    for i, file in enumerate(all_files, start=1):
        li.append(pd.read_feather(file))
        print(f"Read {i}/{total_iterations} files")

    panel = pd.concat(li, ignore_index=True)
    panel = panel.drop_duplicates(subset=["system", "k", "p", "q", "kind"])
    panel = validate_e1_cells_df(panel)

    panel.reset_index(drop=True).to_feather(output_path)
    print(f"Saved report panel to {output_path}")
    return panel
