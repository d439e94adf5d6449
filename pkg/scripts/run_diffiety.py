# -*- coding: utf-8 -*-
"""
Command-line entry point for the jet-calculus library.

    python -m scripts.run_diffiety check data/corpus/kdv.eq
    python -m scripts.run_diffiety adjoint kdv
    python -m scripts.run_diffiety e1 kdv --k 1 --p 1 --order 2 --degree 2 --format json

A system argument is a path to a .eq file or the name of a corpus system.
Exit codes: 0 success, 1 computation error or failed check, 2 usage error.
Verbosity comes from DIFFIETY_LOG (debug|info|warning|error).
"""

import argparse
import json
import logging
import os
import sys
from dataclasses import asdict, dataclass
from pathlib import Path
from timeit import default_timer as timer

from src.cdiff_operators import (
    adjoint,
    green_check,
    lift_linearize,
    linearize,
    operator_to_json,
    print_operator,
)
from src.corpus import CORPUS_DIR, corpus_frame, load_corpus
from src.determining_solver import AnsatzSpace, cosymmetries, symmetries
from src.idf_algebra import MAX_SLOTS, liouville_lift_F, print_idform
from src.jet_calculus import is_normal_form
from src.properties import SUITES, run_selftest
from src.spectral_report import report_to_json, two_lines_report
from src.system_files import load_system

COMMANDS = [
    "check",
    "linearize",
    "adjoint",
    "symmetries",
    "cosymmetries",
    "lift",
    "e1",
    "green-check",
    "selftest",
    "corpus",
]
NEEDS_SYSTEM = set(COMMANDS) - {"selftest", "corpus"}
LOG_LEVELS = {"debug": logging.DEBUG, "info": logging.INFO, "warning": logging.WARNING, "error": logging.ERROR}


@dataclass(frozen=True)
class RunConfig:
    command: str
    input: str | None
    k: int = 1
    p: int = 1
    q: int | None = None
    order: int = 2
    degree: int = 2
    cartan: int = 0
    xt: bool = False
    format: str = "text"
    out: str | None = None
    seed: int = 0
    trials: int | None = None

    def ansatz(self) -> AnsatzSpace:
        slot_degrees = (self.cartan,) * (self.k - 1) if self.command == "e1" else ()
        return AnsatzSpace(self.order, self.degree, slot_degrees, explicit_xt=self.xt)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="run_diffiety", description="Jet calculus on evolution systems.")
    parser.add_argument("command", choices=COMMANDS)
    parser.add_argument("system", nargs="?", default=None, help="Path to a .eq file or a corpus system name.")
    parser.add_argument("--k", type=int, default=1, help="Level of iterated forms (1..8).")
    parser.add_argument("--p", type=int, default=1, help="Column of the first page (p >= 1).")
    parser.add_argument("--q", type=int, default=None, help="Only report this row.")
    parser.add_argument("--order", type=int, default=2, help="Ansatz jet order N.")
    parser.add_argument("--degree", type=int, default=2, help="Ansatz polynomial degree D.")
    parser.add_argument("--cartan", type=int, default=0, help="Cartan degree in slots 1..k-1.")
    parser.add_argument("--xt", action="store_true", help="Allow explicit dependence on independent variables.")
    parser.add_argument("--format", choices=["text", "json"], default="text")
    parser.add_argument("--out", type=str, default=None, help="Write the report here instead of stdout.")
    parser.add_argument("--seed", type=int, default=0, help="Seed for the selftest suites.")
    parser.add_argument("--trials", type=int, default=None, help="Trials per selftest suite.")
    return parser


def parse_args(argv: list[str]) -> RunConfig:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.command in NEEDS_SYSTEM and args.system is None:
        parser.error(f"{args.command} needs a system file")
    if not 1 <= args.k <= MAX_SLOTS:
        parser.error(f"--k must lie in 1..{MAX_SLOTS}, got {args.k}")
    if args.p < 1:
        parser.error(f"--p must be at least 1, got {args.p}")
    for flag in ("order", "degree", "cartan"):
        if getattr(args, flag) < 0:
            parser.error(f"--{flag} must be non-negative, got {getattr(args, flag)}")
    if args.q is not None and args.q < 0:
        parser.error(f"--q must be non-negative, got {args.q}")
    if args.trials is not None and args.trials < 1:
        parser.error(f"--trials must be positive, got {args.trials}")
    return RunConfig(
        command=args.command,
        input=args.system,
        k=args.k,
        p=args.p,
        q=args.q,
        order=args.order,
        degree=args.degree,
        cartan=args.cartan,
        xt=args.xt,
        format=args.format,
        out=args.out,
        seed=args.seed,
        trials=args.trials,
    )


def resolve_system_path(name: str) -> Path:
    path = Path(name)
    if path.exists():
        return path
    candidate = CORPUS_DIR / (name if name.endswith(".eq") else f"{name}.eq")
    return candidate if candidate.exists() else path


# ---------------------------------------------------------------------
# Commands; each returns (exit code, text, json payload)
# ---------------------------------------------------------------------


def cmd_check(config: RunConfig, E):
    ok, diagnostics = is_normal_form(E)
    lines = [f"{E.name}: {'evolution form' if ok else 'not in evolution form'}"]
    lines += [f"  {eq}" for eq in E.describe()] + [f"  ! {d}" for d in diagnostics]
    payload = {"system": E.name, "normal_form": ok, "equations": E.describe(), "diagnostics": diagnostics}
    return (0 if ok else 1), "\n".join(lines), payload


def cmd_operator(config: RunConfig, E):
    D = linearize(E) if config.command == "linearize" else adjoint(linearize(E))
    return 0, print_operator(D), {"system": E.name, "operator": operator_to_json(D)}


def cmd_kernel(config: RunConfig, E):
    A = config.ansatz()
    solve = symmetries if config.command == "symmetries" else cosymmetries
    start = timer()
    K = solve(E, A)
    elapsed = timer() - start
    basis = K.printed()
    header = f"{config.command} of {E.name} (N={A.order}, D={A.degree}, xt={A.explicit_xt}): dim {K.dim}"
    lines = [header] + [f"  {b}" for b in basis]
    lines.append(f"  system {K.dims[0]} x {K.dims[1]}, rank {K.dims[2]} ({elapsed:.2f}s)")
    payload = {
        "system": E.name,
        "kind": config.command,
        "operator": operator_to_json(K.operator),
        "ansatz": A.describe(),
        "kernel": basis,
        "dim": K.dim,
        "timing": round(elapsed, 3),
        "basis": basis,
        "dims": {"rows": K.dims[0], "cols": K.dims[1], "rank": K.dims[2]},
        "config": asdict(config),
    }
    return 0, "\n".join(lines), payload


def cmd_lift(config: RunConfig, E):
    D = lift_linearize(E, config.k)
    lift = liouville_lift_F(E, config.k)
    components = {}
    for (a, K), component in lift.items():
        label = f"F{a + 1}" if not K.mask else f"dv[{K}]F{a + 1}"
        components[label] = print_idform(component.form)
    lines = [f"lift of {E.name} at level {config.k}:"]
    lines += [f"  {label} = {text}" for label, text in components.items()]
    lines += ["linearization:", print_operator(D)]
    payload = {"system": E.name, "k": config.k, "lift": components, "operator": operator_to_json(D)}
    return 0, "\n".join(lines), payload


def cmd_e1(config: RunConfig, E):
    report = two_lines_report(E, config.k, config.p, config.ansatz())
    if config.q is not None:
        report.cells = [c for c in report.cells if c.q == config.q]
    lines = [f"first page of {E.name}, level k={report.k}, column p={report.p} (n={report.n})"]
    for c in report.cells:
        if c.kind == "note":
            lines.append(f"  p=0: {c.note}")
            continue
        flag = "" if c.certified else " [truncated, not certified]"
        lines.append(f"  q={c.q} {c.kind}: dim {c.dim} (system {c.dims[0]} x {c.dims[1]}, rank {c.dims[2]}){flag}")
        lines += [f"    {b}" for b in c.basis]
    return 0, "\n".join(lines), report_to_json(report, config=asdict(config))


def cmd_green(config: RunConfig, E):
    ok = green_check(linearize(E))
    text = f"{E.name}: Green's formula {'holds' if ok else 'FAILS'} for the linearization"
    return (0 if ok else 1), text, {"system": E.name, "green": ok}


def cmd_selftest(config: RunConfig):
    trials = {name: config.trials for name in SUITES} if config.trials is not None else None
    results = run_selftest(seed=config.seed, trials=trials)
    lines = []
    for r in results:
        status = "ok" if r.passed else "FAILED"
        lines.append(f"{r.name}: {r.trials} trials, {r.failures} failures, {r.seconds:.2f}s {status}")
        lines += [f"  {m}" for m in r.messages]
    payload = {
        "seed": config.seed,
        "suites": [{"name": r.name, "trials": r.trials, "failures": r.failures, "messages": r.messages} for r in results],
    }
    return (0 if all(r.passed for r in results) else 1), "\n".join(lines), payload


def cmd_corpus(config: RunConfig):
    entries = load_corpus(verify=True)
    df = corpus_frame(entries)
    lines = [f"{e.name}: " + "; ".join(e.system.describe()) for e in entries]
    lines += ["", df.to_string(index=False)]
    payload = {
        "systems": [{"name": e.name, "equations": e.system.describe()} for e in entries],
        "golden": df.to_dict(orient="records"),
    }
    return 0, "\n".join(lines), payload


SYSTEM_COMMANDS = {
    "check": cmd_check,
    "linearize": cmd_operator,
    "adjoint": cmd_operator,
    "symmetries": cmd_kernel,
    "cosymmetries": cmd_kernel,
    "lift": cmd_lift,
    "e1": cmd_e1,
    "green-check": cmd_green,
}


def emit(config: RunConfig, text: str, payload: dict) -> None:
    body = json.dumps(payload, indent=2) + "\n" if config.format == "json" else text + "\n"
    if config.out:
        Path(config.out).write_text(body, encoding="utf-8")
    else:
        sys.stdout.write(body)


def configure_logging() -> None:
    level = LOG_LEVELS.get(os.environ.get("DIFFIETY_LOG", "warning").lower(), logging.WARNING)
    logging.basicConfig(level=level, stream=sys.stderr, format="%(levelname)s %(name)s: %(message)s", force=True)


def run(argv: list[str] | None = None) -> int:
    configure_logging()
    try:
        config = parse_args(sys.argv[1:] if argv is None else argv)
    except SystemExit as exc:
        return int(exc.code or 0)

    try:
        if config.command in SYSTEM_COMMANDS:
            E = load_system(resolve_system_path(config.input)).system
            code, text, payload = SYSTEM_COMMANDS[config.command](config, E)
        elif config.command == "selftest":
            code, text, payload = cmd_selftest(config)
        else:
            code, text, payload = cmd_corpus(config)
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1

    emit(config, text, payload)
    return code


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
