"""Command-line front end.

Exit codes: 0 when a verdict or solution is produced, 1 for NoSolutionFound or
an Inconclusive verdict, 2 for input and usage errors.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

import numpy as np

from . import formats, generate, solver, structure, verify
from .tensor_core import Tensor, is_diagonal, is_symmetric, symmetrize

EXIT_OK, EXIT_INCONCLUSIVE, EXIT_USAGE = 0, 1, 2


class UsageError(Exception):
    pass


def _jsonable(obj):
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    if isinstance(obj, (np.floating, np.integer)):
        return obj.item()
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, dict):
        return {k: _jsonable(v) for k, v in obj.items()}
    if hasattr(obj, "value"):
        return obj.value
    return obj


def _emit(args, payload: dict, lines: list[str]) -> None:
    if args.json:
        print(json.dumps(_jsonable(payload), indent=2))
    else:
        print("\n".join(lines))


def _fmt(v) -> str:
    return "(" + ", ".join(f"{x:.12g}" for x in np.asarray(v).reshape(-1)) + ")"


def _load_tensor(path: str) -> Tensor:
    return formats.parse_tensor(Path(path).read_text())


def _opt_settings(args) -> structure.OptimizerSettings:
    return structure.OptimizerSettings(starts=args.starts, seed=args.seed)


def cmd_analyze(args) -> int:
    A = _load_tensor(args.tensor)
    sym = is_symmetric(A)
    work = A if sym else symmetrize(A)
    tol = args.tol
    cv = structure.copositivity_verdict(work, tol, _opt_settings(args))
    payload = {
        "command": "analyze",
        "order": A.order,
        "dim": A.dim,
        "symmetric": sym,
        "diagonal": is_diagonal(A, 0.0),
        "copositivity": {"class": cv.kind, "simplex_min": cv.simplex_min, "argmin": cv.argmin, "witness": cv.witness},
        "definiteness": None,
    }
    lines = [
        f"order {A.order}, dim {A.dim}",
        f"symmetric: {sym}" + ("" if sym else " (verdicts use the symmetrized tensor)"),
        f"diagonal: {payload['diagonal']}",
        f"copositivity: {cv.kind.value} (simplex min {cv.simplex_min:.12g})",
    ]
    if cv.witness is not None:
        lines.append(f"  witness x = {_fmt(cv.witness)}")
    inconclusive = cv.kind is structure.Copositivity.INCONCLUSIVE
    if A.order % 2 == 0:
        dv = structure.definiteness_verdict(work, tol, _opt_settings(args))
        payload["definiteness"] = {
            "class": dv.kind, "lambda_min_z": dv.lambda_min_z,
            "lambda_min_h": dv.lambda_min_h, "witness": dv.witness,
        }
        lines.append(
            f"definiteness: {dv.kind.value} (lambda_min Z {dv.lambda_min_z:.12g}, H {dv.lambda_min_h:.12g})"
        )
        if dv.witness is not None:
            lines.append(f"  witness x = {_fmt(dv.witness)}")
        inconclusive |= dv.kind is structure.Definiteness.INCONCLUSIVE
    _emit(args, payload, lines)
    return EXIT_INCONCLUSIVE if inconclusive else EXIT_OK


def _instance(args) -> formats.InstanceFile:
    return formats.load_instance(*args.files)


def report_payload(rep: solver.SolveReport) -> dict:
    return {
        "command": "solve",
        "status": rep.status,
        "x": rep.x,
        "residual": rep.residual,
        "objective": rep.objective,
        "iterations": rep.iterations,
        "starts_used": rep.starts_used,
        "method": rep.method,
        "distinct_solutions": rep.distinct_solutions,
        "stagnated_starts": rep.stagnated_starts,
        "multipliers": rep.multipliers,
    }


def cmd_solve(args) -> int:
    inst = _instance(args)
    opts = solver.SolveOptions(
        method=args.method, tol=args.tol, max_iter=args.max_iter, starts=args.starts, seed=args.seed,
    )
    rep = solver.solve(inst.instance, opts)
    lines = [
        f"status: {rep.status.value}",
        f"x = {_fmt(rep.x)}",
        f"residual: {rep.residual:.3e}",
        f"distinct solutions: {len(rep.distinct_solutions)}",
    ]
    if rep.stagnated_starts:
        lines.append(f"stagnated starts: {rep.stagnated_starts}")
    _emit(args, report_payload(rep), lines)
    return EXIT_OK if rep.solved else EXIT_INCONCLUSIVE


def cmd_verify(args) -> int:
    P = _instance(args).instance
    x = formats.parse_vector(Path(args.x).read_text())
    u = formats.parse_vector(Path(args.u).read_text()) if args.u else x
    feas = verify.feasibility(P, x, args.tol)
    res = verify.complementarity_residual(P, x)
    payload = {"command": "verify", "feasible": feas, "residual": res, "solves": res <= args.tol, "kkt": None}
    lines = [f"feasible: {feas}", f"residual: {res:.3e}", f"solves: {res <= args.tol}"]
    if P.kind == "NCP":
        cert = verify.kkt_check(P, x, u, args.tol)
        payload["kkt"] = {
            "passed": cert.passed, "u": cert.u,
            "stationarity_min": cert.stationarity_min, "stationarity_comp": cert.stationarity_comp,
            "u_min": cert.u_min, "u_comp": cert.u_comp, "ineq7": cert.ineq7,
        }
        lines.append(f"kkt passed: {cert.passed} (u = {_fmt(u)})")
    _emit(args, payload, lines)
    return EXIT_OK


def _parse_floats(text: str) -> np.ndarray:
    try:
        return np.array([float(t) for t in text.replace(",", " ").split()])
    except ValueError:
        raise UsageError(f"cannot parse vector {text!r}") from None


def cmd_dreg(args) -> int:
    A = _load_tensor(args.tensor)
    d = _parse_floats(args.d) if args.d else np.ones(A.dim)
    rep = structure.d_regularity_falsifier(A, d, budget=args.budget, tol=args.tol, seed=args.seed)
    payload = {
        "command": "dreg", "d": rep.d, "verdict": rep.verdict,
        "witness": None if rep.witness is None else {"x": rep.witness[0], "t": rep.witness[1]},
        "budget_used": rep.budget_used,
    }
    lines = [f"verdict: {rep.verdict}", f"samples used: {rep.budget_used}"]
    if rep.witness is not None:
        lines.append(f"  witness x = {_fmt(rep.witness[0])}, t = {rep.witness[1]:.12g}")
    _emit(args, payload, lines)
    return EXIT_OK


def cmd_minors(args) -> int:
    A = _load_tensor(args.tensor)
    rep = structure.minor_bounds_probe(A, args.delta, samples=args.budget, seed=args.seed)
    payload = {
        "command": "minors", "delta": rep.delta, "samples": rep.samples,
        "violations": [{"x": x, "indices": [i + 1 for i in S], "minor": v} for x, S, v in rep.violations],
    }
    lines = [f"delta {rep.delta:g}, samples {rep.samples}", f"violations: {len(rep.violations)}"]
    for x, S, v in rep.violations[:10]:
        lines.append(f"  x = {_fmt(x)} minor {[i + 1 for i in S]} = {v:.6g}")
    _emit(args, payload, lines)
    return EXIT_OK


def cmd_gen(args) -> int:
    T = generate.generate(args.kind, args.order, args.dim, args.seed)
    text = formats.format_tensor(T)
    if args.output:
        Path(args.output).write_text(text)
    else:
        sys.stdout.write(text)
    if args.q_output:
        q = generate.mixed_sign_vector(args.dim, np.random.default_rng([args.seed, 1]))
        Path(args.q_output).write_text(formats.format_vector(q))
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="tensorncp", description="Tensor complementarity problems")
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--json", action="store_true", help="machine-readable output")
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    a = sub.add_parser("analyze", parents=[common], help="structure verdicts for a tensor")
    a.add_argument("tensor")
    a.add_argument("--tol", type=float, default=structure.DEFAULT_TOL)
    a.add_argument("--starts", type=int, default=64)
    a.set_defaults(func=cmd_analyze)

    s = sub.add_parser("solve", parents=[common], help="solve NCP (tensor + q files) or GNCP (gtcp file)")
    s.add_argument("files", nargs="+")
    s.add_argument("--tol", type=float, default=1e-10)
    s.add_argument("--max-iter", type=int, default=200)
    s.add_argument("--starts", type=int, default=32)
    s.add_argument("--method", choices=["fb-newton", "proj-grad", "nlp"], default="fb-newton")
    s.set_defaults(func=cmd_solve)

    v = sub.add_parser("verify", parents=[common], help="check a candidate solution")
    v.add_argument("files", nargs="+")
    v.add_argument("--x", required=True, help="vector file with the candidate")
    v.add_argument("--u", help="vector file with KKT multipliers (default: u = x)")
    v.add_argument("--tol", type=float, default=1e-8)
    v.set_defaults(func=cmd_verify)

    d = sub.add_parser("dreg", parents=[common], help="search for a d-regularity counterexample")
    d.add_argument("tensor")
    d.add_argument("--d", help="comma-separated positive direction (default all ones)")
    d.add_argument("--budget", type=int, default=2000)
    d.add_argument("--tol", type=float, default=1e-10)
    d.set_defaults(func=cmd_dreg)

    mi = sub.add_parser("minors", parents=[common], help="probe principal-minor bounds of the Jacobian")
    mi.add_argument("tensor")
    mi.add_argument("--delta", type=float, default=0.5)
    mi.add_argument("--budget", type=int, default=1000)
    mi.set_defaults(func=cmd_minors)

    g = sub.add_parser("gen", parents=[common], help="write a generated tensor")
    g.add_argument("kind", choices=generate.KINDS)
    g.add_argument("--order", type=int, default=4)
    g.add_argument("--dim", type=int, default=2)
    g.add_argument("-o", "--output")
    g.add_argument("--q-output", help="also write a mixed-sign q vector here")
    g.set_defaults(func=cmd_gen)
    return p


def run(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_OK
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING)
    try:
        return args.func(args)
    except (formats.ParseError, UsageError, OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
