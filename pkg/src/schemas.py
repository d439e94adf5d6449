# -*- coding: utf-8 -*-
"""
Data contracts for my tables

Role:
Defines Pandera schemas that describe what the report DataFrames should look like:

- KernelSchema: one row per nonzero component of a solved kernel element

- E1CellSchema: one row per (system, k, p, q) cell of a Two Lines report

- CorpusSchema: golden corpus elements with their re-verification flag

"""

# src/schemas.py

import pandas as pd
import pandera as pa             # for Field + check decorator
import pandera.pandas as pa_pd   # for DataFrameModel
from pandera.typing import Series

CELL_KINDS = ["kernel", "cokernel", "vanishing", "note"]


class KernelSchema(pa_pd.DataFrameModel):
    """
    Schema for a KernelBasis flattened to rows.
    """

    system: Series[str]
    label: Series[str]
    element: Series[int] = pa.Field(ge=0)
    component: Series[str]
    expression: Series[str]

    order: Series[int] = pa.Field(ge=0)
    # -1 marks the empty ansatz
    degree: Series[int] = pa.Field(ge=-1)

    class Config:
        strict = True
        coerce = True

    @pa.check("expression")
    def expression_not_zero(cls, s: pd.Series) -> pd.Series:
        """Zero components are dropped before tabulating."""
        return s != "0"


class E1CellSchema(pa_pd.DataFrameModel):
    """
    Schema for the cells of a Two Lines report.
    """

    system: Series[str]
    k: Series[int] = pa.Field(ge=1)
    p: Series[int] = pa.Field(ge=1)
    # the zero-column note has no row
    q: Series[pd.Int64Dtype] = pa.Field(ge=0, nullable=True)
    kind: Series[str] = pa.Field(isin=CELL_KINDS)

    dim: Series[int] = pa.Field(ge=0)
    rows: Series[int] = pa.Field(ge=0)
    cols: Series[int] = pa.Field(ge=0)
    rank: Series[int] = pa.Field(ge=0)

    certified: Series[bool]
    basis: Series[str] = pa.Field(nullable=True)

    class Config:
        strict = True
        coerce = True

    @pa.dataframe_check
    def rank_bounded_by_columns(cls, df: pd.DataFrame) -> pd.Series:
        """The rank of a determining system never exceeds its unknown count."""
        return df["rank"] <= df["cols"]

    @pa.dataframe_check
    def cokernel_never_certified(cls, df: pd.DataFrame) -> pd.Series:
        return ~((df["kind"] == "cokernel") & df["certified"])


class CorpusSchema(pa_pd.DataFrameModel):
    """
    Schema for golden symmetry / cosymmetry elements of the corpus.
    """

    system: Series[str]
    kind: Series[str] = pa.Field(isin=["symmetries", "cosymmetries"])
    order: Series[int] = pa.Field(ge=0)
    degree: Series[int] = pa.Field(ge=0)
    xt: Series[bool]
    element: Series[str]
    verified: Series[bool]

    class Config:
        strict = False  # allow extra columns if they show up
        coerce = True

    @pa.check("verified")
    def all_verified(cls, s: pd.Series) -> pd.Series:
        """Every golden element must be annihilated on its equation."""
        return s
