# -*- coding: utf-8 -*-
"""
Runs the spectral_report batch over a directory of system files
"""

import argparse
from pathlib import Path

from src.determining_solver import AnsatzSpace
from src.spectral_report import (
    build_report_panel,
    process_all_systems,
    )


# define function to convert CLI arguments to structured object (argparse.Namespace)
def parse_args() -> argparse.Namespace:

    parser = argparse.ArgumentParser(
        description="Build first-page reports for every system in a directory."
    )

    parser.add_argument(
        "--system-path",
        type=str,
        default=None,
        help="Directory containing .eq files (default: data/corpus).",
    )

    parser.add_argument(
        "--k",
        type=int,
        nargs="+",
        default=[1],
        help="Levels to report on.",
    )

    parser.add_argument(
        "--p",
        type=int,
        nargs="+",
        default=[1],
        help="Columns to report on.",
    )

    parser.add_argument("--order", type=int, default=2, help="Ansatz jet order N.")
    parser.add_argument("--degree", type=int, default=2, help="Ansatz polynomial degree D.")

    parser.add_argument(
        "--limit",
        type=int,
        default=None,
        help="Process only the first N systems (dry run).",
    )

    return parser.parse_args()


def main() -> None:
    args = parse_args()

    # Project root = parent of scripts/ (robust no matter where you run from)
    project_root = Path(__file__).resolve().parents[1]

    system_path = Path(args.system_path) if args.system_path else project_root / "data" / "corpus"
    outpath = project_root / "data" / "processed" / "system_reports"
    panel_output_path = project_root / "data" / "processed" / "report_panels" / "e1_cells.feather"

    outpath.mkdir(parents=True, exist_ok=True)
    panel_output_path.parent.mkdir(parents=True, exist_ok=True)

    ansatz = AnsatzSpace(order=args.order, degree=args.degree)

    process_all_systems(
        system_dir=str(system_path),
        outpath=str(outpath),
        levels=args.k,
        columns=args.p,
        A=ansatz,
        limit=args.limit,
        )

    build_report_panel(
        source_dir=str(outpath),
        output_path=str(panel_output_path),
        )


if __name__ == "__main__":
    main()
