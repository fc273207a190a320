"""``tropctl`` command-line interface.

Exit status: 0 on success, 1 when the mathematics answers in the negative
(divergent star, no feedback, cap exceeded, constraint violations, volume not
computable), 2 on bad input.
"""

from __future__ import annotations

import argparse
import os
import sys
from typing import Callable, Optional

import numpy as np

from . import __version__
from .feedback import DEFAULT_FLOOR, DEFAULT_ITERATION_BOUND, solve_feedback
from .invariance import max_invariant
from .io import (
    InputError,
    dumps,
    format_matrix,
    load_json,
    matrix_from_json,
    matrix_to_json,
    require,
    semimodule_from_json,
    semimodule_to_json,
    vector_from_json,
    vector_to_json,
)
from .linalg import kleene_star
from .network import InfeasibleSpecification, NetworkSpec, simulate, synthesize
from .nmin import encode
from .semimodule import Semimodule, volume
from .twosided import TwoSidedSystem, solve_system

OK, NEGATIVE, BAD_INPUT = 0, 1, 2


class Report:
    """Collects a JSON payload and its text rendering."""

    def __init__(self):
        self.data: dict = {}
        self.lines: list[str] = []

    def put(self, key: str, value, text: Optional[str] = None):
        self.data[key] = value
        if text is not None:
            self.lines.append(text)

    def text(self, line: str):
        self.lines.append(line)

    def render(self, fmt: str) -> str:
        if fmt == "json":
            return dumps(self.data)
        return "\n".join(self.lines) + "\n"


def _threads() -> int:
    raw = os.environ.get("TROPCTL_THREADS")
    if raw is None:
        return 1
    try:
        value = int(raw)
    except ValueError:
        value = 0
    if value < 1:
        raise InputError("TROPCTL_THREADS", f"must be a positive integer, got {raw!r}")
    return value


def _semimodule_text(name: str, X: Semimodule) -> str:
    if X.is_trivial:
        return f"{name}: trivial (only the zero vector), dimension {X.dim}"
    return f"{name}: {len(X)} generators (columns), dimension {X.dim}\n{format_matrix(X.gens)}"


def _load_problem(path: str, with_k: str) -> tuple:
    """``A``, ``B`` and a semimodule, plus the Nmin encoding if requested."""
    doc = load_json(path)
    semiring = doc.get("semiring", "zmax") if isinstance(doc, dict) else "zmax"
    A_raw = require(doc, "A", path)
    B_raw = require(doc, "B", path)
    X_raw = require(doc, with_k, path)
    if semiring == "zmax":
        A = matrix_from_json(A_raw, f"{path}: A")
        B = matrix_from_json(B_raw, f"{path}: B")
        X = semimodule_from_json(X_raw, f"{path}: {with_k}")
        return A, B, X, None
    if semiring == "nmin":
        A = matrix_from_json(A_raw, f"{path}: A", allow_pos_inf=True)
        B = matrix_from_json(B_raw, f"{path}: B", allow_pos_inf=True)
        gens = require(X_raw, "generators", f"{path}: {with_k}")
        G = matrix_from_json(gens, f"{path}: {with_k}.generators", allow_pos_inf=True)
        try:
            enc = encode(A, B, G.T)
        except ValueError as exc:
            raise InputError(path, str(exc)) from exc
        return enc.A, enc.B, enc.K, enc
    raise InputError(f"{path}: semiring", f"expected 'zmax' or 'nmin', got {semiring!r}")


def _shapes(A, B, X, path):
    n = X.dim
    if A.shape != (n, n):
        raise InputError(f"{path}: A", f"must be {n}x{n} to match the semimodule, got {A.shape[0]}x{A.shape[1]}")
    if B.shape[0] != n:
        raise InputError(f"{path}: B", f"must have {n} rows, got {B.shape[0]}")


def cmd_solve(args, rep: Report) -> int:
    doc = load_json(args.input)
    D = matrix_from_json(require(doc, "D", args.input), f"{args.input}: D")
    C = matrix_from_json(require(doc, "C", args.input), f"{args.input}: C")
    if D.shape != C.shape:
        raise InputError(args.input, f"D is {D.shape[0]}x{D.shape[1]} but C is {C.shape[0]}x{C.shape[1]}")
    X = Semimodule.from_generators(solve_system(TwoSidedSystem(D, C)), D.shape[1])
    rep.put("solutions", semimodule_to_json(X), _semimodule_text("solutions", X))
    return OK


def cmd_star(args, rep: Report) -> int:
    E = matrix_from_json(load_json(args.input), args.input)
    if E.shape[0] != E.shape[1]:
        raise InputError(args.input, f"matrix must be square, got {E.shape[0]}x{E.shape[1]}")
    result = kleene_star(E)
    if result.diverged:
        rep.put("status", "diverged", "diverged: the matrix has a circuit of positive weight")
        return NEGATIVE
    rep.put("status", "converged", "converged")
    rep.put("rows", matrix_to_json(result.matrix), format_matrix(result.matrix))
    return OK


def _invariance(args, rep: Report, A, B, K, enc):
    report = max_invariant(K, A, B, args.cap)
    rep.put("cap", args.cap)
    rep.put("bound", report.bound)
    rep.put("steps", [semimodule_to_json(X) for X in report.steps])
    if report.cap_exceeded:
        rep.put("stabilized_at", None, f"did not stabilize within {args.cap} steps")
        return report, None
    K_star = report.result
    rep.put(
        "stabilized_at",
        report.stabilized_at,
        f"stabilized at step {report.stabilized_at} (X_{report.stabilized_at + 1} = X_{report.stabilized_at})",
    )
    rep.put("K_star", semimodule_to_json(K_star), _semimodule_text("K*", K_star))
    if enc is not None:
        nmin = enc.decode_generators(K_star)
        rep.put("K_star_nmin", matrix_to_json(nmin.T), "K* generators over Nmin (columns):\n" + format_matrix(nmin))
    return report, K_star


def cmd_invariant(args, rep: Report) -> int:
    A, B, K, enc = _load_problem(args.input, "K")
    _shapes(A, B, K, args.input)
    report, _ = _invariance(args, rep, A, B, K, enc)
    return NEGATIVE if report.cap_exceeded else OK


def cmd_feedback(args, rep: Report) -> int:
    A, B, X, enc = _load_problem(args.input, "X")
    _shapes(A, B, X, args.input)
    extra = {} if enc is None else {"support": enc.feedback_support, "nonpositive": True}
    result = solve_feedback(
        A, B, X, method=args.method, iteration_bound=args.iteration_bound, floor=args.floor, **extra
    )
    rep.put("method", result.method)
    if not result.found:
        verdict = "not algebraically invariant" if result.method == "elimination" else "no witness found"
        rep.put("status", verdict.replace(" ", "_"), verdict)
        return NEGATIVE
    rep.put("status", "found", f"feedback found ({result.method})")
    F = result.F if enc is None else enc.decode_feedback(result.F)
    rep.put("F", matrix_to_json(F), "F =\n" + format_matrix(F))
    rep.put("G", matrix_to_json(result.G))
    return OK


def _network(args) -> NetworkSpec:
    doc = load_json(args.input)
    if not isinstance(doc, dict):
        raise InputError(args.input, "expected a JSON object")
    if args.L is not None:
        doc["L"] = args.L
    if args.M is not None:
        doc["M"] = args.M
    try:
        return NetworkSpec.from_dict(doc)
    except (ValueError, TypeError) as exc:
        raise InputError(args.input, str(exc)) from exc


def cmd_timetable(args, rep: Report) -> int:
    spec = _network(args)
    try:
        out = synthesize(spec, args.cap)
    except InfeasibleSpecification:
        rep.put("status", "infeasible", "infeasible: the headway and connection bounds cannot be met")
        return NEGATIVE
    rep.put("A", matrix_to_json(out.A), "A =\n" + format_matrix(out.A))
    rep.put("E_star", matrix_to_json(out.E_star), "E* =\n" + format_matrix(out.E_star))
    report = out.report
    if report.cap_exceeded:
        rep.put("status", "cap_exceeded", f"did not stabilize within {args.cap} steps")
        return NEGATIVE
    rep.put("stabilized_at", report.stabilized_at, f"stabilized at step {report.stabilized_at}")
    rep.put("K_star", semimodule_to_json(out.K_star), _semimodule_text("K*", out.K_star))
    if not out.feedback.found:
        rep.put("status", "not_algebraically_invariant", "K* is not algebraically invariant")
        return NEGATIVE
    rep.put("F", matrix_to_json(out.feedback.F), "F =\n" + format_matrix(out.feedback.F))
    if out.eigen is not None:
        lam = out.eigen.eigenvalue
        rep.put("lambda", int(lam) if out.eigen.integral else str(lam), f"lambda = {lam}")
    if out.periodic is None:
        rep.put("status", "no_periodic_witness", "no periodic witness found")
        return OK
    p = out.periodic
    rep.put("status", "ok")
    rep.put(
        "periodic",
        {"lambda": p.period, "offset": vector_to_json(p.offset), "x0": vector_to_json(p.x0)},
        f"periodic timetable: u(k) = {p.period}*k + {vector_to_json(p.offset)}, "
        f"initial extended state {vector_to_json(p.x0)}",
    )
    return OK


def cmd_simulate(args, rep: Report) -> int:
    spec = _network(args)
    n = spec.n
    if args.x0 is None:
        raise InputError("--x0", "initial extended state is required")
    try:
        x0 = [int(v) for v in args.x0.split(",")]
    except ValueError as exc:
        raise InputError("--x0", "expected comma-separated integers") from exc
    if len(x0) != 2 * n:
        raise InputError("--x0", f"expected {2 * n} values, got {len(x0)}")
    feedback = timetable = None
    if args.feedback:
        feedback = matrix_from_json(load_json(args.feedback), args.feedback)
        if feedback.shape != (n, 2 * n):
            raise InputError(args.feedback, f"feedback must be {n}x{2 * n}")
    if args.timetable:
        doc = load_json(args.timetable)
        if not isinstance(doc, list):
            raise InputError(args.timetable, "expected a list of vectors")
        timetable = [vector_from_json(u, f"{args.timetable}[{i}]") for i, u in enumerate(doc)]
    if args.period is not None:
        timetable = [np.array(x0[:n], dtype=float) + k * args.period for k in range(1, args.steps + 1)]
    try:
        traj = simulate(spec, x0, args.steps, feedback=feedback, timetable=timetable)
    except ValueError as exc:
        raise InputError(args.input, str(exc)) from exc
    rep.put(
        "trajectory",
        [vector_to_json(s) for s in traj.states[1:]],
        "\n".join(f"x({k}) = {vector_to_json(s)}" for k, s in enumerate(traj.states[1:])),
    )
    rep.put(
        "violations",
        [
            {"kind": v.kind, "step": v.step, "direction": v.direction + 1, "other": v.other + 1,
             "value": v.value, "bound": v.bound}
            for v in traj.violations
        ],
    )
    if traj.violations:
        rep.text("violations:")
        for v in traj.violations:
            rep.text("  " + v.describe())
        return NEGATIVE
    rep.text("no violations")
    return OK


def cmd_volume(args, rep: Report) -> int:
    X = semimodule_from_json(load_json(args.input), args.input)
    result = volume(X)
    if not result.finite:
        rep.put("volume", None, "volume not computed: generators must be all finite")
        return NEGATIVE
    rep.put("volume", result.count, f"volume = {result.count}")
    return OK


COMMANDS: dict[str, Callable] = {
    "solve": cmd_solve,
    "star": cmd_star,
    "invariant": cmd_invariant,
    "feedback": cmd_feedback,
    "timetable": cmd_timetable,
    "simulate": cmd_simulate,
    "volume": cmd_volume,
}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=("json", "text"), default="text")
    common.add_argument("-o", "--output", help="write the report here instead of stdout")

    parser = argparse.ArgumentParser(prog="tropctl", description="Exact max-plus invariance and feedback toolkit.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="verb", required=True)

    p = sub.add_parser("solve", parents=[common], help="generators of {x : Dx = Cx}")
    p.add_argument("input", help='JSON object with matrices "D" and "C"')
    p = sub.add_parser("star", parents=[common], help="Kleene star of a square matrix")
    p.add_argument("input", help="JSON matrix")
    p = sub.add_parser("volume", parents=[common], help="volume of a semimodule")
    p.add_argument("input", help='JSON semimodule {"dim", "generators"}')

    for verb, key in (("invariant", "K"), ("feedback", "X")):
        p = sub.add_parser(verb, parents=[common], help=f'{verb} problem with "A", "B", "{key}"')
        p.add_argument("input")
        if verb == "invariant":
            p.add_argument("--cap", type=int, default=64)
        else:
            p.add_argument("--method", choices=("auto", "elimination", "minmax"), default="auto")
            p.add_argument("--floor", type=int, default=DEFAULT_FLOOR)
            p.add_argument("--iteration-bound", type=int, default=DEFAULT_ITERATION_BOUND)

    for verb in ("timetable", "simulate"):
        p = sub.add_parser(verb, parents=[common], help=f"network {verb}")
        p.add_argument("input", help="network JSON")
        p.add_argument("--L", type=int, help="override the headway bound")
        p.add_argument("--M", type=int, help="override the connection bound")
        if verb == "timetable":
            p.add_argument("--cap", type=int, default=64)
        else:
            p.add_argument("--x0", help="initial extended state x(0),x(-1), comma-separated")
            p.add_argument("--steps", type=int, default=4)
            control = p.add_mutually_exclusive_group()
            control.add_argument("--feedback", help="JSON matrix F over the extended state")
            control.add_argument("--timetable", help="JSON list of vectors u(1), u(2), ...")
            control.add_argument("--period", type=int, help="periodic timetable u(k) = x(0) + k*period")
    return parser


def main(argv: Optional[list[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return BAD_INPUT if exc.code else OK
    rep = Report()
    try:
        _threads()
        for name in ("cap", "steps", "iteration_bound"):
            if getattr(args, name, 1) < (0 if name == "steps" else 1):
                raise InputError(f"--{name.replace('_', '-')}", "out of range")
        status = COMMANDS[args.verb](args, rep)
    except InputError as exc:
        print(f"tropctl: error: {exc}", file=sys.stderr)
        return BAD_INPUT
    except OverflowError as exc:
        print(f"tropctl: error: {exc}", file=sys.stderr)
        return BAD_INPUT
    text = rep.render(args.format)
    if args.output:
        with open(args.output, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return status


if __name__ == "__main__":
    sys.exit(main())
