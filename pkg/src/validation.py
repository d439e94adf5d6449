# -*- coding: utf-8 -*-
"""
Reusable validation helpers to validate report tables. These are small
functions I can call in:
    - tests / CI (for the corpus)
    - my pipeline (for batch reports)
"""

import pandas as pd
from src.schemas import CorpusSchema, E1CellSchema, KernelSchema


def validate_kernel_df(df: pd.DataFrame) -> pd.DataFrame:
    df = df.copy()
    validated = KernelSchema.validate(df)

    if validated.duplicated(subset=["system", "label", "element", "component"]).any():
        raise ValueError("Duplicate (system, label, element, component) rows in kernel DataFrame.")

    return validated


def validate_e1_cells_df(df: pd.DataFrame) -> pd.DataFrame:
    df = df.copy()
    df = df.replace({None: pd.NA})

    validated = E1CellSchema.validate(df)

    if validated.duplicated(subset=["system", "k", "p", "q", "kind"]).any():
        raise ValueError("Duplicate (system, k, p, q, kind) combinations in E1 cell DataFrame.")

    return validated


def validate_corpus_df(df: pd.DataFrame) -> pd.DataFrame:
    df = df.copy()
    validated = CorpusSchema.validate(df)

    if validated.duplicated(subset=["system", "kind", "element"]).any():
        raise ValueError("Duplicate (system, kind, element) combinations in corpus DataFrame.")

    return validated
