"""
Command line: ``qlll {gen,check,brute,montecarlo,cnf}``.

Exit status is 0 whenever a command ran, whatever the verdict; it is nonzero
only for operational errors (bad input, I/O, limits). Output goes to
``--out``, else to ``$QLLL_OUTPUT_DIR/<default name>`` when that variable is
set, else to stdout.
"""
from __future__ import annotations

import argparse
import json
import os
import sys
from fractions import Fraction
from pathlib import Path

from . import __version__
from .decompose import hybrid_certificate
from .ensembles import Hypergraph, hypergraph_of, loads_hypergraph
from .harness import (GenConfig, MonteCarloConfig, generate_instance_text, rows_to_csv,
                      run_montecarlo, summary_to_json)
from .lll import (DimacsError, EmptyClauseError, classical_ksat_certificate, parse_dimacs,
                  qsat_degree_certificate)
from .matching import hall_matching
from .qsat import (MAX_BRUTE_QUBITS, BruteForceLimitError, InstanceFormatError, QsatInstance,
                   brute_force_sat_dim, find_satisfying_state, loads_instance)

OUTPUT_DIR_ENV = "QLLL_OUTPUT_DIR"


class CommandError(Exception):
    pass


def _emit(text: str, out: str | None, default_name: str) -> None:
    if out is None and os.environ.get(OUTPUT_DIR_ENV):
        out = str(Path(os.environ[OUTPUT_DIR_ENV]) / default_name)
    if out is None or out == "-":
        sys.stdout.write(text)
        return
    path = Path(out)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(text)


def _dump(obj) -> str:
    return json.dumps(obj, indent=2) + "\n"


def _read_problem(path: str) -> QsatInstance | Hypergraph:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise CommandError(f"cannot read {path}: {exc}") from None
    try:
        if text.lstrip().startswith("{"):
            return loads_instance(text)
        return loads_hypergraph(text)
    except (InstanceFormatError, ValueError) as exc:
        raise CommandError(f"{path}: {exc}") from None


def cmd_gen(args) -> None:
    try:
        cfg = GenConfig(n=args.n, k=args.k, alpha=args.alpha, seed=args.seed)
    except ValueError as exc:
        raise CommandError(str(exc)) from None
    _emit(generate_instance_text(cfg), args.out,
          f"instance_n{cfg.n}_k{cfg.k}_a{cfg.alpha}_s{cfg.seed}.json")


def cmd_check(args) -> None:
    prob = _read_problem(args.instance)
    if args.mode == "qlll":
        if not isinstance(prob, QsatInstance):
            raise CommandError("--mode qlll needs a JSON instance (projector ranks are required)")
        try:
            payload = qsat_degree_certificate(prob, args.r_max).to_dict()
        except ValueError as exc:
            raise CommandError(str(exc)) from None
    else:
        g = hypergraph_of(prob) if isinstance(prob, QsatInstance) else prob
        if args.mode == "matching":
            m = hall_matching(g.edges.tolist(), g.n_vertices)
            payload = {"kind": "matching", "verdict": "pass" if m.perfect else "fail",
                       "witness": m.to_dict()}
        else:
            try:
                payload = hybrid_certificate(prob, args.D).to_dict()
            except ValueError as exc:
                raise CommandError(str(exc)) from None
    payload["source"] = os.path.basename(args.instance)
    payload["version"] = __version__
    _emit(_dump(payload), args.out, f"certificate_{args.mode}.json")


def cmd_brute(args) -> None:
    prob = _read_problem(args.instance)
    if not isinstance(prob, QsatInstance):
        raise CommandError("brute needs a JSON instance")
    try:
        dim = brute_force_sat_dim(prob, args.max_qubits)
    except BruteForceLimitError as exc:
        raise CommandError(str(exc)) from None
    r = Fraction(dim, 2 ** prob.n_qubits)
    report = {"n_qubits": prob.n_qubits, "m": prob.m, "dim": dim, "R": str(r),
              "satisfiable": dim > 0, "version": __version__}
    if args.state_out and dim > 0:
        psi = find_satisfying_state(prob, args.max_qubits)
        Path(args.state_out).write_text(_dump(
            {"n_qubits": prob.n_qubits,
             "amplitudes": [[float(z.real), float(z.imag)] for z in psi]}))
        report["state_file"] = args.state_out
    _emit(_dump(report), args.out, "brute.json")


def cmd_montecarlo(args) -> None:
    try:
        cfg = MonteCarloConfig(mode=args.mode, n=args.n, k=args.k, alphas=tuple(args.alpha),
                               trials=args.trials, seed=args.seed, D=args.D,
                               workers=args.workers, timings=args.timings)
    except ValueError as exc:
        raise CommandError(str(exc)) from None
    rows, summary = run_montecarlo(cfg)
    _emit(rows_to_csv(rows), args.out, f"montecarlo_{cfg.mode}_s{cfg.seed}.csv")
    if args.summary or os.environ.get(OUTPUT_DIR_ENV):
        _emit(summary_to_json(summary), args.summary, f"montecarlo_{cfg.mode}_s{cfg.seed}.json")
    else:
        sys.stderr.write(summary_to_json(summary))


def cmd_cnf(args) -> None:
    try:
        f = parse_dimacs(Path(args.dimacs).read_text())
    except OSError as exc:
        raise CommandError(f"cannot read {args.dimacs}: {exc}") from None
    except DimacsError as exc:
        raise CommandError(f"{args.dimacs}: {exc}") from None
    try:
        payload = classical_ksat_certificate(f).to_dict()
    except EmptyClauseError as exc:
        payload = {"kind": "classical-ksat", "verdict": "error", "reason": str(exc)}
    except ValueError as exc:
        raise CommandError(f"{args.dimacs}: {exc}") from None
    payload["version"] = __version__
    _emit(_dump(payload), args.out, "certificate_cnf.json")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="qlll", description=__doc__.splitlines()[1])
    ap.add_argument("--version", action="version", version=f"qlll {__version__}")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gen", help="sample a random k-QSAT instance (JSON)")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--alpha", type=float, required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out")
    p.set_defaults(func=cmd_gen)

    p = sub.add_parser("check", help="certify an instance or hypergraph")
    p.add_argument("instance")
    p.add_argument("--mode", choices=("qlll", "matching", "hybrid"), default="qlll")
    p.add_argument("--r-max", type=int, default=None)
    p.add_argument("--D", type=float, default=None, help="cutoff for hybrid mode")
    p.add_argument("--out")
    p.set_defaults(func=cmd_check)

    p = sub.add_parser("brute", help="exact satisfying-space dimension (small n)")
    p.add_argument("instance")
    p.add_argument("--max-qubits", type=int, default=MAX_BRUTE_QUBITS)
    p.add_argument("--state-out")
    p.add_argument("--out")
    p.set_defaults(func=cmd_brute)

    p = sub.add_parser("montecarlo", help="seeded sweep over densities")
    p.add_argument("--mode", choices=("matching", "hybrid"), default="hybrid")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--alpha", type=float, nargs="+", required=True)
    p.add_argument("--trials", type=int, default=20)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--D", type=float, default=None)
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--timings", action="store_true",
                   help="fill ms_elapsed (makes output run-dependent)")
    p.add_argument("--out", help="CSV of trial records")
    p.add_argument("--summary", help="summary JSON (default: stderr)")
    p.set_defaults(func=cmd_montecarlo)

    p = sub.add_parser("cnf", help="classical k-SAT degree certificate for a DIMACS file")
    p.add_argument("dimacs")
    p.add_argument("--out")
    p.set_defaults(func=cmd_cnf)
    return ap


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        args.func(args)
    except CommandError as exc:
        sys.stderr.write(f"qlll {args.command}: error: {exc}\n")
        return 1
    except OSError as exc:
        sys.stderr.write(f"qlll {args.command}: I/O error: {exc}\n")
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
