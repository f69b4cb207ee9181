"""
Command-line front door.

    paulinv analyze SUPPORT [--task T] [--json]
    paulinv synth SUPPORT [--task T] [--out FILE]
    paulinv verify SUPPORT CIRCUIT [--samples N] [--seed S] [--tol X]
    paulinv robustness SUPPORT CIRCUIT --deltas 0,0.001,0.01 [--csv]
    paulinv oracle SUPPORT [--task T]

Every option can also be set through an environment variable named
``PAULINV_<OPTION>`` (upper case, dashes as underscores), e.g.
``PAULINV_SEED=7`` or ``PAULINV_MAX_QUBITS=9``; explicit flags win.

Exit codes: 0 success, 1 input error, 2 no protocol found or verification failed.
"""
from __future__ import annotations

import argparse
import json
import logging
import os
import sys
from pathlib import Path

from .pauli import DEFAULT_MAX_QUBITS, PauliError
from .planner import analyze, oracle_witness
from .program import ProgramFormatError, Task, load_program, render_program
from .simulate import HARD_MAX_QUBITS, SimulatorCapError, certify_program, robustness_sweep
from .support import DEFAULT_ORACLE_CAP, DEFAULT_SPLIT_CAP, CapExceededError, SupportFormatError, load_support

log = logging.getLogger("paulinv")

EXIT_OK = 0
EXIT_INPUT = 1
EXIT_NEGATIVE = 2
ENV_PREFIX = "PAULINV_"
SEED_MAX = 2 ** 64 - 1


class InputError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    """Usage errors are input errors (exit 1), not argparse's default 2."""

    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_INPUT, f"{self.prog}: error: {message}\n")


def _seed(text: str) -> int:
    try:
        v = int(text, 0)
    except ValueError:
        raise argparse.ArgumentTypeError(f"invalid seed {text!r}") from None
    if not 0 <= v <= SEED_MAX:
        raise argparse.ArgumentTypeError("seed must be an unsigned 64-bit integer")
    return v


def _positive_int(text: str) -> int:
    try:
        v = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"invalid integer {text!r}") from None
    if v < 1:
        raise argparse.ArgumentTypeError("must be positive")
    return v


def _tol(text: str) -> float:
    try:
        v = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"invalid tolerance {text!r}") from None
    if not 0 <= v < 1:
        raise argparse.ArgumentTypeError("tolerance must lie in [0, 1)")
    return v


def _deltas(text: str) -> list[float]:
    parts = [p.strip() for p in text.split(",") if p.strip()]
    if not parts:
        raise argparse.ArgumentTypeError("empty delta list")
    try:
        vals = [float(p) for p in parts]
    except ValueError:
        raise argparse.ArgumentTypeError(f"invalid delta list {text!r}") from None
    if any(v < 0 or v != v or v == float("inf") for v in vals):
        raise argparse.ArgumentTypeError("deltas must be finite and nonnegative")
    return vals


def _env(name: str, default):
    return os.environ.get(ENV_PREFIX + name.upper().replace("-", "_"), default)


def _env_flag(name: str) -> bool:
    return str(_env(name, "")).lower() in ("1", "true", "yes", "on")


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="paulinv", description="Query-based inversion, conjugation and transposition "
                                            "of unitaries with a known Pauli support.")
    p.add_argument("-v", "--verbose", action="store_true", help="debug logging on stderr")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def common(sp, task=True, json_flag=True):
        sp.add_argument("support", help="support file (one Pauli term per line)")
        if task:
            sp.add_argument("--task", choices=[t.value for t in Task], default=_env("task", "invert"))
        if json_flag:
            sp.add_argument("--json", action="store_true", default=_env_flag("json"), help="JSON output")
        sp.add_argument("--out", default=_env("out", None), help="write output to this file")
        sp.add_argument("--seed", type=_seed, default=_env("seed", "0"))
        sp.add_argument("--max-qubits", type=_positive_int, default=_env("max_qubits", str(DEFAULT_MAX_QUBITS)),
                        help=f"dense simulator cap (default {DEFAULT_MAX_QUBITS}, at most {HARD_MAX_QUBITS})")

    a = sub.add_parser("analyze", help="decide which protocols apply")
    common(a)
    a.add_argument("--cap", type=_positive_int, default=_env("cap", str(DEFAULT_SPLIT_CAP)),
                   help="split-search dimension cap")

    s = sub.add_parser("synth", help="synthesise a circuit program")
    common(s)
    s.add_argument("--cap", type=_positive_int, default=_env("cap", str(DEFAULT_SPLIT_CAP)))

    v = sub.add_parser("verify", help="certify a circuit program numerically")
    common(v, task=False)
    v.add_argument("circuit", help="circuit file")
    v.add_argument("--task", choices=[t.value for t in Task], default=_env("task", None),
                   help="override the task declared in the circuit file")
    v.add_argument("--samples", type=_positive_int, default=_env("samples", "100"))
    v.add_argument("--tol", type=_tol, default=_env("tol", "1e-9"))

    r = sub.add_parser("robustness", help="mean fidelity under out-of-support noise")
    common(r, task=False)
    r.add_argument("circuit", help="circuit file")
    r.add_argument("--deltas", type=_deltas, default=_env("deltas", None), required=_env("deltas", None) is None)
    r.add_argument("--samples", type=_positive_int, default=_env("samples", "1000"))
    r.add_argument("--csv", action="store_true", default=_env_flag("csv"), help="CSV output")

    o = sub.add_parser("oracle", help="brute-force single-query obstruction")
    common(o)
    o.add_argument("--cap", type=_positive_int, default=_env("cap", str(DEFAULT_ORACLE_CAP)),
                   help="maximum number of terms to enumerate")
    return p


def _emit(text: str, out: str | None) -> None:
    if out:
        Path(out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


def _dump(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=False) + "\n"


def _check_cap(args) -> None:
    if args.max_qubits > HARD_MAX_QUBITS:
        raise InputError(f"--max-qubits is at most {HARD_MAX_QUBITS}")


def cmd_analyze(args) -> int:
    support = load_support(args.support)
    summary = analyze(support, args.task, cap=args.cap, max_qubits=args.max_qubits, seed=args.seed)
    _emit(_dump(summary.to_dict()) if args.json else summary.to_text(), args.out)
    return EXIT_OK if summary.found else EXIT_NEGATIVE


def cmd_synth(args) -> int:
    support = load_support(args.support)
    summary = analyze(support, args.task, cap=args.cap, max_qubits=args.max_qubits, seed=args.seed)
    if not summary.found:
        sys.stderr.write(summary.to_text())
        return EXIT_NEGATIVE
    prog = summary.program
    text = f"# queries: {prog.query_count}\n# route: {summary.route}\n# seed: {args.seed}\n" + render_program(prog)
    if args.json:
        payload = summary.to_dict()
        if args.out:
            Path(args.out).write_text(text, encoding="utf-8")
            payload["circuit_file"] = args.out
        sys.stdout.write(_dump(payload))
    else:
        _emit(text, args.out)
        if args.out:
            sys.stdout.write(f"queries: {prog.query_count}\nwrote {args.out}\n")
    return EXIT_OK


def _load_pair(args):
    support = load_support(args.support)
    prog = load_program(args.circuit, task=getattr(args, "task", None))
    if prog.n_qubits != support.n_qubits:
        raise InputError(f"circuit acts on {prog.n_qubits} qubits but the support has {support.n_qubits}")
    if prog.query_count == 0:
        raise InputError("circuit has no QUERY steps")
    return support, prog


def cmd_verify(args) -> int:
    support, prog = _load_pair(args)
    rep = certify_program(support, prog, prog.task, samples=args.samples, seed=args.seed, tol=args.tol,
                          max_qubits=args.max_qubits)
    _emit(_dump(rep.to_dict()) if args.json else rep.to_text(), args.out)
    return EXIT_OK if rep.passed else EXIT_NEGATIVE


def cmd_robustness(args) -> int:
    support, prog = _load_pair(args)
    table = robustness_sweep(support, prog, args.deltas, samples=args.samples, seed=args.seed,
                             max_qubits=args.max_qubits)
    if args.json:
        text = _dump(table.to_dict())
    elif args.csv:
        text = table.to_csv()
    else:
        text = table.to_text()
    _emit(text, args.out)
    return EXIT_OK


def cmd_oracle(args) -> int:
    support = load_support(args.support)
    task = Task.parse(args.task)
    wit = oracle_witness(support, task, cap=args.cap)
    payload = {
        "task": task.value,
        "support_hash": support.digest(),
        "obstruction_found": wit is not None,
        "single_query": "impossible" if wit is not None else "possible",
        "witness": None if wit is None else [str(support[j]) for j in wit],
        "seed": args.seed,
    }
    if args.json:
        text = _dump(payload)
    else:
        text = f"task: {task.value}\nobstruction: {'YES' if wit is not None else 'NO'}\n"
        if wit is not None:
            text += "witness: " + ", ".join(payload["witness"]) + "\n"
        text += f"single-query {task.value}: {payload['single_query']}\n"
    _emit(text, args.out)
    return EXIT_OK


COMMANDS = {
    "analyze": cmd_analyze,
    "synth": cmd_synth,
    "verify": cmd_verify,
    "robustness": cmd_robustness,
    "oracle": cmd_oracle,
}


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        _check_cap(args)
        return COMMANDS[args.command](args)
    except (OSError, SupportFormatError, ProgramFormatError, PauliError, InputError,
            SimulatorCapError, CapExceededError, ValueError) as exc:
        sys.stderr.write(f"paulinv: error: {exc}\n")
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
