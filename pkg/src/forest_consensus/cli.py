"""Command-line front end: ``forest-consensus <command> --input FILE [options]``."""

from __future__ import annotations

import argparse
import json
import math
import sys
from dataclasses import dataclass, field
from fractions import Fraction
from math import lcm

import numpy as np

from . import rational as rq
from .analysis import check_corollary1, check_time_shift, consensus_verdict
from .digraph import DigraphFormatError, bicomponents, laplacian, parse_weight, read_digraph
from .dynamics import TauBoundError, cesaro_limit, degroot_iterate, perron, simulate_continuous
from .eigenprojection import (
    DEFAULT_ALPHAS,
    EigenprojectionError,
    eigenprojection_polynomial,
    eigenprojection_recursive,
    eigenprojection_resolvent,
    exact_residuals,
)
from .forest import DEFAULT_CAP, EnumerationCapExceeded, census, enumerate_max_forests, forest_matrix, forest_listing

SCHEMA = 1
COMMANDS = ("laplacian", "forests", "eigenprojection", "simulate", "degroot", "analyze")


class UsageError(Exception):
    pass


@dataclass
class RunConfig:
    command: str
    input_path: str
    output_format: str = "text"  # text | json | csv
    tol: float | None = None
    cap: int = DEFAULT_CAP
    exact: bool = False
    method: str = "recursive"
    roots: str | None = None
    alphas: tuple[float, ...] = DEFAULT_ALPHAS
    tau: Fraction | None = None
    horizon: float = 50.0
    samples: int = 11
    steps: int = 1000
    discrete: bool = False
    cesaro: bool = False
    initial_state: list[str] | None = None
    times: tuple[float, ...] = (0.0, 1.0, 5.0)
    csv_path: str | None = None
    notes: list[str] = field(default_factory=list)

    def __post_init__(self):
        if self.command not in COMMANDS:
            raise UsageError(f"unknown command {self.command!r}")
        for name in ("tol", "horizon"):
            value = getattr(self, name)
            if value is not None and not value > 0:
                raise UsageError(f"--{name} must be positive")
        for name in ("cap", "samples", "steps"):
            if getattr(self, name) < 1:
                raise UsageError(f"--{name} must be positive")
        if self.tau is not None and self.tau <= 0:
            raise UsageError("--tau must be positive")


# -- rendering -------------------------------------------------------------------


def _jnum(x):
    if isinstance(x, Fraction):
        return {"num": x.numerator, "den": x.denominator}
    if isinstance(x, (int, np.integer)):
        return {"num": int(x), "den": 1}
    return float(x)


def _jmatrix(M) -> list:
    return [[_jnum(v) for v in row] for row in M]


def _tnum(x) -> str:
    if isinstance(x, Fraction):
        return rq.format_fraction(x)
    return repr(float(x))


def _tmatrix(M) -> str:
    cells = [[_tnum(v) for v in row] for row in M]
    width = max((len(c) for row in cells for c in row), default=1)
    return "\n".join(" ".join(c.rjust(width) for c in row) for row in cells)


def _tvector(v) -> str:
    return "(" + ",".join(_tnum(x) if isinstance(x, Fraction) else format(float(x), ".12g") for x in v) + ")"


def _emit(payload: dict, text: str, config: RunConfig, out) -> None:
    if config.output_format == "json":
        payload = {"schema": SCHEMA, "command": config.command, **payload}
        if config.notes:
            payload["notes"] = list(config.notes)
        out.write(json.dumps(payload, indent=2) + "\n")
    else:
        out.write(text + ("\n" if not text.endswith("\n") else ""))


# -- shared helpers ---------------------------------------------------------------


def _initial_state(config: RunConfig, n: int) -> list[Fraction]:
    if config.initial_state is None:
        raise UsageError("this command needs an initial state (--x0 or --x0-file)")
    tokens = config.initial_state
    if len(tokens) != n:
        raise UsageError(f"initial state has {len(tokens)} entries, digraph has {n} vertices")
    state = []
    free = []
    for k, tok in enumerate(tokens, start=1):
        if tok == "*":
            free.append(k)
            state.append(Fraction(0))
        else:
            try:
                state.append(parse_weight(tok))
            except ValueError as exc:
                raise UsageError(f"bad initial state entry {tok!r}: {exc}") from None
    if free:
        config.notes.append(
            "free entries " + ",".join(map(str, free)) + " set to 0; "
            "states outside basic bicomponents do not affect the limit"
        )
    return state


def _projection(g, config: RunConfig):
    if g.n <= config.cap:
        return forest_matrix(g, config.cap)
    return eigenprojection_recursive(laplacian(g), bicomponents(g).d).exact


def _parse_roots(text: str) -> list[tuple[Fraction, int]]:
    roots = []
    for item in text.split(","):
        item = item.strip()
        if not item:
            continue
        value, _, nu = item.partition(":")
        try:
            roots.append((parse_weight(value), int(nu) if nu else 1))
        except ValueError as exc:
            raise UsageError(f"bad root {item!r} (expected value[:index]): {exc}") from None
    return roots


def _tol(config: RunConfig, default: float) -> float:
    return config.tol if config.tol is not None else default


# -- commands ------------------------------------------------------------------------


def cmd_laplacian(config: RunConfig, out) -> None:
    g = read_digraph(config.input_path)
    L = laplacian(g)
    _emit({"n": g.n, "matrix": _jmatrix(L.entries)}, _tmatrix(L.entries), config, out)


def cmd_forests(config: RunConfig, out) -> None:
    g = read_digraph(config.input_path)
    forests = enumerate_max_forests(g, config.cap)
    c = census(g, forests)
    summary = f"count={c.count}, d={c.d}, f={rq.format_fraction(c.f)}"
    payload = {
        "forests": [
            {
                "index": k,
                "weight": _jnum(fr.weight),
                "arcs": [[a.tail + 1, a.head + 1] for a in fr.arcs],
                "roots": sorted(r + 1 for r in fr.roots),
            }
            for k, fr in enumerate(forests, start=1)
        ],
        "count": c.count,
        "d": c.d,
        "f": _jnum(c.f),
    }
    _emit(payload, forest_listing(forests) + "\n" + summary, config, out)


def cmd_eigenprojection(config: RunConfig, out) -> None:
    g = read_digraph(config.input_path)
    L = laplacian(g)
    method = config.method
    if method == "forest":
        fm = forest_matrix(g, config.cap)
        matrix, exact = fm.entries, True
        residuals = dict(zip(("row_sum", "commutation", "idempotency"), exact_residuals(L.entries, fm.entries)))
        notes = [f"f={rq.format_fraction(fm.census.f)}; numerators f_ij: " + "; ".join(
            " ".join(rq.format_fraction(v) for v in row) for row in fm.census.f_matrix
        )]
    else:
        if method == "recursive":
            est = eigenprojection_recursive(L, bicomponents(g).d, exact=config.exact)
        elif method == "resolvent":
            est = eigenprojection_resolvent(L, config.alphas)
        elif method == "polynomial":
            if not config.roots:
                raise UsageError("--method polynomial requires --roots (e.g. --roots 2:1,3:1,5:3)")
            roots = _parse_roots(config.roots)
            if not config.exact:
                roots = [(float(v), nu) for v, nu in roots]
            est = eigenprojection_polynomial(L, roots, exact=config.exact)
        else:
            raise UsageError(f"unknown method {method!r}")
        exact = est.exact is not None
        matrix = est.exact if exact else est.entries
        residuals, notes = est.residuals, list(est.notes)
    lines = [f"method={method} exact={'true' if exact else 'false'}"]
    if exact:
        lines.append(f"denominator={lcm(*(Fraction(v).denominator for v in matrix.reshape(-1)))}")
    lines.append(_tmatrix(matrix))
    lines.append("residuals: " + " ".join(f"{k}={v!r}" for k, v in residuals.items()))
    lines.extend(f"note: {n}" for n in notes)
    payload = {"method": method, "exact": exact, "matrix": _jmatrix(matrix), "residuals": residuals, "method_notes": notes}
    _emit(payload, "\n".join(lines), config, out)


def cmd_simulate(config: RunConfig, out) -> None:
    g = read_digraph(config.input_path)
    L = laplacian(g)
    x0 = _initial_state(config, g.n)
    J = _projection(g, config)
    if config.discrete or config.command == "degroot":
        if config.tau is None:
            raise UsageError("discrete simulation requires --tau")
        P = perron(L, config.tau)
        if config.cesaro:
            report = cesaro_limit(P, x0, config.steps, J=J, tol=_tol(config, 1e-3))
        else:
            report = degroot_iterate(P, x0, config.steps, J=J, tol=_tol(config, 1e-9))
        extra = {"tau": _jnum(P.tau), "tau_bound": _jnum(P.bound) if math.isfinite(P.bound) else None, "strict": P.strict}
    else:
        report = simulate_continuous(L, x0, config.horizon, config.samples, J=J, tol=_tol(config, 1e-9))
        extra = {}
    csv_text = report.to_csv()
    if config.csv_path:
        with open(config.csv_path, "w", encoding="utf-8", newline="") as fh:
            fh.write(csv_text)
    verdict = (
        f"converged={'true' if report.converged else 'false'} mode={report.mode} "
        f"limit={_tvector(report.limit_estimate)} predicted={_tvector(report.predicted_limit)} "
        f"deviation={report.max_deviation:.3e}"
    )
    payload = {
        "mode": report.mode,
        **extra,
        "samples": [{"at": float(t), "state": [float(v) for v in s]} for t, s in report.samples],
        "limit": [float(v) for v in report.limit_estimate],
        "predicted_limit": [float(v) for v in report.predicted_limit],
        "deviation": report.max_deviation,
        "converged": report.converged,
        "steps_taken": report.steps_taken,
    }
    text = verdict if config.csv_path else csv_text + verdict
    _emit(payload, text, config, out)


def cmd_analyze(config: RunConfig, out) -> None:
    g = read_digraph(config.input_path)
    dec = bicomponents(g)
    basic = [sorted(v + 1 for v in dec.components[b]) for b in dec.basic]
    payload = {"basic_bicomponents": basic, "d": dec.d, "spanning_tree": dec.d == 1}
    lines = [
        "basic_bicomponents=[" + ",".join("{" + ",".join(map(str, c)) + "}" for c in basic) + "]",
        f"d={dec.d}",
        f"spanning_tree={'true' if dec.d == 1 else 'false'}",
    ]
    if config.initial_state is not None:
        x0 = _initial_state(config, g.n)
        J = _projection(g, config)
        verdict = consensus_verdict(g, J, x0, tol=_tol(config, 1e-9))
        cor1 = check_corollary1(g, J, x0, tol=_tol(config, 1e-9))
        shift = check_time_shift(laplacian(g), J, x0, config.times, tol=_tol(config, 1e-8))
        per = [(sorted(v + 1 for v in comp), val) for comp, val in verdict.per_bicomponent_values.items()]
        payload.update(
            consensus_reached=verdict.consensus_reached,
            consensus_value=_jnum(verdict.consensus_value) if verdict.consensus_reached else None,
            bicomponent_values=[{"vertices": c, "value": _jnum(v)} for c, v in per],
            limit=[_jnum(v) for v in verdict.limit],
            limit_decimal=[float(v) for v in verdict.limit],
            left_eigenvector=None if verdict.left_eigenvector is None else [_jnum(v) for v in verdict.left_eigenvector],
            corollary1={c.clause: {"status": c.status, "witnesses": c.witnesses} for c in cor1.clauses},
            time_shift={"times": shift.times, "residuals": shift.residuals, "ok": shift.ok},
        )
        lines.append(f"consensus_reached={'true' if verdict.consensus_reached else 'false'}")
        for comp, val in per:
            lines.append("{" + ",".join(map(str, comp)) + "}:" + f"{_tnum(val)} ({float(val):.12g})")
        basic_vertices = dec.basic_vertices()
        for v in range(g.n):
            if v not in basic_vertices:
                lines.append(f"vertex{v + 1}:{_tnum(verdict.limit[v])} ({float(verdict.limit[v]):.12g})")
        lines.append(f"limit={_tvector(verdict.limit)}")
        for c in cor1.clauses:
            lines.append(f"corollary1({c.clause})={c.status}")
        lines.append(f"time_shift={'pass' if shift.ok else 'fail'} max_residual={max(shift.residuals, default=0.0):.3e}")
        if not verdict.consensus_reached:
            config.notes.append("no global consensus; a quasi-consensus value via projection onto the consensus domain is not computed")
    _emit(payload, "\n".join(lines), config, out)


HANDLERS = {
    "laplacian": cmd_laplacian,
    "forests": cmd_forests,
    "eigenprojection": cmd_eigenprojection,
    "simulate": cmd_simulate,
    "degroot": cmd_simulate,
    "analyze": cmd_analyze,
}


# -- argument parsing -------------------------------------------------------------


def _global_flags(p: argparse.ArgumentParser, suppress: bool) -> None:
    d = (lambda v: argparse.SUPPRESS) if suppress else (lambda v: v)
    p.add_argument("--input", dest="input_path", default=d(None), help="digraph file")
    p.add_argument("--json", action="store_true", default=d(False), help="JSON output")
    p.add_argument("--exact", action="store_true", default=d(False), help="exact rational arithmetic")
    p.add_argument("--tol", type=float, default=d(None), help="tolerance override")
    p.add_argument("--cap", type=int, default=d(DEFAULT_CAP), help="forest enumeration vertex cap")


def _x0_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--x0", help="comma-separated initial state; '*' marks a free entry (write --x0=-1,2 when it starts with a minus)")
    p.add_argument("--x0-file", help="file with whitespace/comma separated initial state")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="forest-consensus", description=__doc__)
    _global_flags(parser, suppress=False)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("laplacian", help="print L = diag(A1) - A")
    _global_flags(p, suppress=True)

    p = sub.add_parser("forests", help="list maximum out-forests and their census")
    _global_flags(p, suppress=True)

    p = sub.add_parser("eigenprojection", help="eigenprojection of L with residuals")
    _global_flags(p, suppress=True)
    p.add_argument("--method", choices=("recursive", "resolvent", "polynomial", "forest"), default="recursive")
    p.add_argument("--roots", help="nonzero minimal-polynomial roots as value:index,... (polynomial method)")
    p.add_argument("--alphas", help="comma-separated increasing alpha schedule (resolvent method)")

    for name, help_text in (("simulate", "simulate consensus dynamics"), ("degroot", "DeGroot iterative pooling")):
        p = sub.add_parser(name, help=help_text)
        _global_flags(p, suppress=True)
        _x0_flags(p)
        p.add_argument("--horizon", type=float, default=50.0)
        p.add_argument("--samples", type=int, default=11)
        p.add_argument("--discrete", action="store_true")
        p.add_argument("--tau", help="Perron step (p/q or decimal)")
        p.add_argument("--steps", type=int, default=1000)
        p.add_argument("--cesaro", action="store_true")
        p.add_argument("--csv", dest="csv_path", help="write the trajectory CSV here")

    p = sub.add_parser("analyze", help="bicomponents, consensus verdict and structural checks")
    _global_flags(p, suppress=True)
    _x0_flags(p)
    p.add_argument("--times", default="0,1,5", help="times for the time-shift check")
    return parser


def config_from_args(args: argparse.Namespace) -> RunConfig:
    if not args.input_path:
        raise UsageError("--input is required")
    state = None
    if getattr(args, "x0", None) is not None and getattr(args, "x0_file", None) is not None:
        raise UsageError("give --x0 or --x0-file, not both")
    if getattr(args, "x0", None) is not None:
        state = [t.strip() for t in args.x0.split(",")]
    elif getattr(args, "x0_file", None) is not None:
        with open(args.x0_file, encoding="utf-8") as fh:
            state = fh.read().replace(",", " ").split()
    tau = None
    if getattr(args, "tau", None) is not None:
        try:
            tau = parse_weight(args.tau)
        except ValueError as exc:
            raise UsageError(f"bad --tau: {exc}") from None
    kwargs = {}
    if getattr(args, "alphas", None):
        kwargs["alphas"] = tuple(float(a) for a in args.alphas.split(","))
    if getattr(args, "times", None):
        kwargs["times"] = tuple(float(t) for t in args.times.split(","))
    for name in ("method", "roots", "horizon", "samples", "steps", "discrete", "cesaro", "csv_path"):
        if getattr(args, name, None) is not None:
            kwargs[name] = getattr(args, name)
    return RunConfig(
        command=args.command,
        input_path=args.input_path,
        output_format="json" if args.json else "text",
        tol=args.tol,
        cap=args.cap,
        exact=args.exact,
        tau=tau,
        initial_state=state,
        **kwargs,
    )


def main(argv=None, out=None, err=None) -> int:
    out = out or sys.stdout
    err = err or sys.stderr
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        config = config_from_args(args)
        HANDLERS[config.command](config, out)
    except UsageError as exc:
        err.write(f"usage error: {exc}\n")
        return 2
    except (DigraphFormatError, EnumerationCapExceeded, TauBoundError, EigenprojectionError, OSError, ValueError, ArithmeticError) as exc:
        err.write(f"error: {exc}\n")
        return 1
    if config.output_format != "json":
        for note in config.notes:
            err.write(f"note: {note}\n")
    return 0


if __name__ == "__main__":
    sys.exit(main())
