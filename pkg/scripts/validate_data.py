# -*- coding: utf-8 -*-
"""
performs data validation checks on the golden corpus and on any report
panel already built (schema checks, duplicate cells, re-verification)

In Spyder IDE, execute this in console:
!python scripts/validate_data.py
"""

# scripts/validate_data.py

import os
import pandas as pd

from src.corpus import corpus_frame, load_corpus
from src.validation import validate_e1_cells_df

# allow the script to work in spyder AND the terminal
if "__file__" in globals():
    # running as a script
    BASE_DIR = os.path.dirname(os.path.dirname(__file__))
else:
    # running interactively (Spyder, Jupyter, IPython console)
    BASE_DIR = os.getcwd()


def main() -> None:
    # golden corpus: every listed element must be annihilated on its equation
    corpus_dir = os.path.join(BASE_DIR, "data", "corpus")
    entries = load_corpus(corpus_dir, verify=True)
    df_corpus = corpus_frame(entries)
    print(f"Corpus validated successfully: {len(entries)} systems, {len(df_corpus)} golden elements.")

    # report panel (optional)
    panel_path = os.path.join(BASE_DIR, "data", "processed", "report_panels", "e1_cells.feather")
    if os.path.exists(panel_path):
        df_panel = pd.read_feather(panel_path)
        validate_e1_cells_df(df_panel)
        print("Report panel validated successfully.")
    else:
        print("No e1_cells.feather found, skipping report panel validation.")


if __name__ == "__main__":
    main()
