"""Command-line front end.

Exit codes: 0 success, 2 invalid input, 3 infeasible gate design,
4 numerical failure.  Energies and fields are given in units of g unless
``--g`` says otherwise; ``--g-mhz`` only affects reported durations.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from .connection import analytic_connection, numeric_connection
from .dynamics import PropagationError, adiabaticity_report
from .gatedesign import (FIDELITY_THRESHOLD, TARGETS, InfeasibleDesign, design_gate,
                         verify_with_dynamics)
from .hamiltonian import SystemParams, build_hamiltonian
from .holonomy import (ControlPath, closed_form_holonomy, composition_shortcut_gap,
                       path_ordered_exponential, rotation_decomposition, rotation_sweep)
from .spectrum import closed_form_eigenvalues, numeric_eigendecomposition

EXIT_OK, EXIT_INVALID, EXIT_INFEASIBLE, EXIT_NUMERIC = 0, 2, 3, 4
FLOAT_FMT = "%.12e"


class UsageError(ValueError):
    pass


# ---------------------------------------------------------------------------
# serialisation
# ---------------------------------------------------------------------------

def _plain(obj):
    """Convert numpy / complex values into JSON-ready Python objects."""
    if isinstance(obj, dict):
        return {str(k): _plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_plain(v) for v in obj]
    if isinstance(obj, np.ndarray):
        if np.iscomplexobj(obj):
            return {"re": _plain(obj.real.tolist()), "im": _plain(obj.imag.tolist())}
        return _plain(obj.tolist())
    if isinstance(obj, (complex, np.complexfloating)):
        return {"re": float(obj.real), "im": float(obj.imag)}
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        return float(obj)
    return obj


def dumps_canonical(obj) -> str:
    """JSON with sorted keys and every float written as %.12e.

    Parsing the output and dumping it again reproduces it byte for byte.
    """
    def emit(v, indent):
        pad = "  " * (indent + 1)
        if isinstance(v, dict):
            if not v:
                return "{}"
            items = [f"{pad}{json.dumps(k)}: {emit(v[k], indent + 1)}" for k in sorted(v)]
            return "{\n" + ",\n".join(items) + "\n" + "  " * indent + "}"
        if isinstance(v, list):
            if not v:
                return "[]"
            if all(not isinstance(x, (dict, list)) for x in v):
                return "[" + ", ".join(emit(x, indent) for x in v) + "]"
            return "[\n" + ",\n".join(pad + emit(x, indent + 1) for x in v) + "\n" \
                + "  " * indent + "]"
        if isinstance(v, bool) or v is None:
            return json.dumps(v)
        if isinstance(v, float):
            if not math.isfinite(v):
                raise ValueError("non-finite float in output")
            return FLOAT_FMT % v
        return json.dumps(v, ensure_ascii=False)

    return emit(_plain(obj), 0) + "\n"


def rows_to_csv(rows: list[dict], columns: list[str]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(columns)
    for row in rows:
        out = []
        for col in columns:
            v = row.get(col, "")
            if isinstance(v, (float, np.floating)):
                v = FLOAT_FMT % v
            out.append(v)
        writer.writerow(out)
    return buf.getvalue()


def _emit(text: str, output: str | None) -> None:
    if output:
        with open(output, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _table(rows: list[dict], columns: list[str], fmt: str) -> str:
    if fmt == "csv":
        return rows_to_csv(rows, columns)
    return dumps_canonical({"columns": columns,
                            "rows": [{c: r.get(c) for c in columns} for r in rows]})


# ---------------------------------------------------------------------------
# validation helpers
# ---------------------------------------------------------------------------

def _params(args, B: float = 0.0, phi: float = 0.0, forbid_2g: bool = False):
    p = SystemParams(args.g, args.J, B, phi)
    p.validate(allow_forbidden_field=not forbid_2g)
    return p


def _grid(start: float, stop: float, step: float) -> np.ndarray:
    if step <= 0 or stop < start:
        raise UsageError("grid needs step > 0 and stop >= start")
    count = int(round((stop - start) / step)) + 1
    return start + step * np.arange(count)


def _map(fn, items, workers: int):
    if workers <= 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, items))


# ---------------------------------------------------------------------------
# commands
# ---------------------------------------------------------------------------

def cmd_spectrum(args) -> int:
    if args.B_range:
        Bs = _grid(*args.B_range)
    else:
        Bs = np.array([args.B])

    def row(B):
        p = _params(args, float(B), args.phi)
        frame = numeric_eigendecomposition(build_hamiltonian(p))
        closed, _ = closed_form_eigenvalues(p)
        out = {"g": p.g, "J": p.J, "B": p.B, "phi": p.phi}
        for k, e in enumerate(frame.energies, start=1):
            out[f"E{k}"] = float(e)
        out["max_deviation"] = float(np.max(np.abs(frame.energies - closed)))
        return out

    rows = _map(row, Bs, args.workers)
    cols = ["g", "J", "B", "phi"] + [f"E{k}" for k in range(1, 9)] + ["max_deviation"]
    _emit(_table(rows, cols, args.format or "csv"), args.output)
    return EXIT_OK


def cmd_connection(args) -> int:
    p = _params(args, args.B, args.phi)
    if p.B <= 0:
        raise UsageError("connection needs B > 0")
    a = analytic_connection(p.B, p.phi, p.g)
    n = numeric_connection(p.B, p.phi, p.g, args.delta)
    report = {
        "B": p.B, "phi": p.phi, "g": p.g, "delta": args.delta,
        "analytic": {"A_phi": a.A_phi, "A_B": a.A_B},
        "numeric": {"A_phi": n.A_phi, "A_B": n.A_B},
        "max_abs_difference": float(max(np.max(np.abs(a.A_phi - n.A_phi)),
                                        np.max(np.abs(a.A_B - n.A_B)))),
    }
    _emit(dumps_canonical(report), args.output)
    return EXIT_OK


def _decomposition(U) -> dict:
    dec = rotation_decomposition(U)
    return {"global_phase": dec.global_phase, "angle": dec.angle,
            "axis": dec.axis, "axis_defined": dec.axis_defined}


def cmd_holonomy(args) -> int:
    _params(args)
    path = ControlPath.loop(args.B0, args.B1, args.g, args.n)
    closed = closed_form_holonomy(path).U
    ordered = path_ordered_exponential(path, args.steps_per_unit).U
    audit = composition_shortcut_gap(args.B0, args.B1, args.g, args.n)
    report = {
        "B0": args.B0, "B1": args.B1, "g": args.g, "n": args.n,
        "steps_per_unit": args.steps_per_unit,
        "closed_form": closed,
        "path_ordered": ordered,
        "max_abs_difference": float(np.max(np.abs(closed - ordered))),
        "rotation": _decomposition(closed),
        "shortcut_audit": {"shortcut": audit["shortcut"],
                           "max_abs_difference": audit["max_abs_difference"],
                           "theta": audit["theta"]},
    }
    _emit(dumps_canonical(report), args.output)
    return EXIT_OK


FIG1_COLUMNS = ["B_over_g", "alpha_1_canonical", "axis_angle_from_z",
                "alpha_1_raw", "axis_angle_raw", "warning"]


def cmd_fig1(args) -> int:
    if args.g <= 0:
        raise UsageError("g must be positive")
    Bs = _grid(args.B_min, args.B_max, args.B_step) * args.g
    rows = []
    for r in rotation_sweep(Bs, args.g, n=1):
        if r["skipped"]:
            rows.append({"B_over_g": r["B_over_g"],
                         "warning": "skipped: B=2g (L=0) or B<=0"})
            continue
        rows.append({"B_over_g": r["B_over_g"],
                     "alpha_1_canonical": r["alpha_canonical"],
                     "axis_angle_from_z": r["axis_angle_from_z"],
                     "alpha_1_raw": r["alpha_raw"],
                     "axis_angle_raw": r["axis_angle_raw"],
                     "warning": ""})
    _emit(_table(rows, FIG1_COLUMNS, args.format or "csv"), args.output)
    return EXIT_OK


def cmd_simulate(args) -> int:
    if not args.T:
        raise UsageError("T list must not be empty")
    if any(T <= 0 for T in args.T):
        raise UsageError("durations must be positive")
    _params(args, args.B1, forbid_2g=True)
    path = ControlPath.loop(args.B0, args.B1, args.g, args.n, args.J)
    rows = adiabaticity_report(path, args.T, tol=args.tol, smooth=not args.naive_ramp,
                               g_mhz=args.g_mhz)
    if args.no_timing:
        for r in rows:
            r.pop("wall_clock_s")
    infid = [r["infidelity"] for r in rows]
    report = {
        "config": {"g": args.g, "J": args.J, "B0": args.B0, "B1": args.B1, "n": args.n,
                   "tol": args.tol, "smooth_ramp": not args.naive_ramp,
                   "g_mhz": args.g_mhz},
        "closed_form": closed_form_holonomy(path).U,
        "rows": rows,
        "infidelity_monotone": bool(all(b < a for a, b in zip(infid, infid[1:]))),
        "time_unit": "1/g",
    }
    _emit(dumps_canonical(report), args.output)
    return EXIT_OK


def cmd_design(args) -> int:
    if args.target == "phase" and args.theta is None:
        raise UsageError("--theta is required for the phase target")
    if args.g <= 0:
        raise UsageError("g must be positive")
    design = design_gate(args.target, args.m1, args.g, args.m2, args.theta)
    report = design.to_dict()
    report["fidelity_threshold"] = FIDELITY_THRESHOLD
    report["unitary"] = design.unitary
    status = EXIT_OK if design.passed else EXIT_NUMERIC
    if args.verify:
        _params(args, design.B_over_g * args.g, forbid_2g=True)
        check = verify_with_dynamics(design, args.g, args.J, args.T_verify)
        check.pop("aligned_gate")
        report["verification"] = check
    _emit(dumps_canonical(report), args.output)
    verdict = "PASS" if design.passed else "FAIL"
    print(f"{design.target}: B/g = {design.B_over_g:.6f}, beta = {design.beta:.6f} rad, "
          f"fidelity = {design.achieved_fidelity:.12f} [{verdict} at 1-1e-8]",
          file=sys.stderr)
    if args.verify:
        v = report["verification"]
        print(f"  dynamics at T={v['T']:g}/g: gate infidelity {v['gate_infidelity']:.3e}, "
              f"adiabatic infidelity {v['adiabatic_infidelity']:.3e}", file=sys.stderr)
    return status


# ---------------------------------------------------------------------------
# parser
# ---------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="JSON file with option values; flags override it")
    common.add_argument("--g", type=float, default=1.0, help="coupling g (default 1)")
    common.add_argument("--J", type=float, default=0.5, help="qubit 1-2 coupling")
    common.add_argument("--format", choices=("csv", "json"), default=None)
    common.add_argument("--output", "-o", default=None, help="write here instead of stdout")
    common.add_argument("--workers", type=int, default=1)

    parser = argparse.ArgumentParser(prog="su2holonomy", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("spectrum", parents=[common], help="closed-form vs numeric energies")
    p.add_argument("--B", type=float, default=1.0)
    p.add_argument("--B-range", type=float, nargs=3, metavar=("START", "STOP", "STEP"))
    p.add_argument("--phi", type=float, default=0.0)
    p.set_defaults(func=cmd_spectrum)

    p = sub.add_parser("connection", parents=[common], help="analytic vs finite-difference connection")
    p.add_argument("--B", type=float, default=1.0)
    p.add_argument("--phi", type=float, default=0.0)
    p.add_argument("--delta", type=float, default=1e-5)
    p.set_defaults(func=cmd_connection)

    p = sub.add_parser("holonomy", parents=[common], help="loop holonomy, closed form and path-ordered")
    p.add_argument("--B0", type=float, default=1.0)
    p.add_argument("--B1", type=float, default=1.0)
    p.add_argument("--n", type=int, default=1)
    p.add_argument("--steps-per-unit", type=float, default=10_000)
    p.set_defaults(func=cmd_holonomy)

    p = sub.add_parser("fig1", parents=[common], help="rotation angle/axis of one precession vs B")
    p.add_argument("--B-min", type=float, default=0.05)
    p.add_argument("--B-max", type=float, default=4.0)
    p.add_argument("--B-step", type=float, default=0.05)
    p.set_defaults(func=cmd_fig1)

    p = sub.add_parser("simulate", parents=[common], help="Schrodinger evolution around a loop")
    p.add_argument("--B0", type=float, default=1.0)
    p.add_argument("--B1", type=float, default=1.0)
    p.add_argument("--n", type=int, default=1)
    p.add_argument("--T", type=float, nargs="+", default=[50.0, 100.0, 200.0, 400.0],
                   help="total durations in units of 1/g")
    p.add_argument("--tol", type=float, default=1e-10)
    p.add_argument("--g-mhz", type=float, default=None,
                   help="coupling in MHz; adds durations in ns")
    p.add_argument("--naive-ramp", action="store_true", help="constant parameter speed")
    p.add_argument("--no-timing", action="store_true", help="omit wall-clock columns")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser(
        "design", parents=[common], help="single-turn gate design",
        description="sqrt_inot is the square root of i*X with positive real trace, "
                    "(1 + iX)/sqrt(2).")
    p.add_argument("--target", choices=TARGETS, required=False, default="hadamard")
    p.add_argument("--theta", type=float, default=None, help="phase angle in [0, 2 pi)")
    p.add_argument("--m1", type=int, default=0)
    p.add_argument("--m2", type=int, default=0)
    p.add_argument("--verify", action="store_true", help="check with Schrodinger evolution")
    p.add_argument("--T-verify", type=float, default=400.0)
    p.set_defaults(func=cmd_design)
    return parser


def _apply_config(parser: argparse.ArgumentParser, argv) -> None:
    pre = argparse.ArgumentParser(add_help=False)
    pre.add_argument("--config")
    known, _ = pre.parse_known_args(argv)
    if not known.config:
        return
    try:
        with open(known.config, encoding="utf-8") as fh:
            cfg = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise UsageError(f"cannot read config: {exc}") from exc
    if not isinstance(cfg, dict):
        raise UsageError("config must be a JSON object")
    cfg = {k.replace("-", "_"): v for k, v in cfg.items()}
    subparsers = next(a for a in parser._actions
                      if isinstance(a, argparse._SubParsersAction))
    for sp in subparsers.choices.values():
        dests = {a.dest for a in sp._actions}
        sp.set_defaults(**{k: v for k, v in cfg.items() if k in dests})


def main(argv=None) -> int:
    argv = sys.argv[1:] if argv is None else list(argv)
    parser = build_parser()
    try:
        _apply_config(parser, argv)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.func(args)
    except InfeasibleDesign as exc:
        print(f"infeasible: {exc}", file=sys.stderr)
        return EXIT_INFEASIBLE
    except (PropagationError, RuntimeError, FloatingPointError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID


if __name__ == "__main__":
    sys.exit(main())
