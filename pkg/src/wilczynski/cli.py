"""Command-line interface: ``wilczynski <command> ...``."""

from __future__ import annotations

import argparse
import json
import sys
import time
from typing import Sequence

from .deadline import Deadline
from .equations import OdeSingle, parse_equation, parse_system
from .errors import ComputationTimeout, ParseError, PreconditionError, WilczynskiError
from .examples import EXAMPLE_NAMES, example
from .expr import Expr
from .linear import seashi_reduce
from .nonlinear import extra_conditions, generalized_invariants
from .systems import theta2_nonlinear

SCHEMA = 1


class UsageError(Exception):
    pass


def _read_input(args) -> str:
    if args.eq is not None and args.eq_file is not None:
        raise UsageError("give either --eq or --eq-file, not both")
    if args.eq is not None:
        return args.eq
    if args.eq_file is not None:
        try:
            with open(args.eq_file, encoding="utf-8") as fh:
                return fh.read()
        except OSError as exc:
            raise UsageError(f"cannot read {args.eq_file}: {exc.strerror}") from None
    if sys.stdin is None or sys.stdin.isatty():
        raise UsageError("no equation given (use --eq, --eq-file or standard input)")
    return sys.stdin.read()


def _params(args) -> frozenset[str] | None:
    if not getattr(args, "params", None):
        return None
    return frozenset(p.strip() for p in args.params.split(",") if p.strip())


def _single(args) -> OdeSingle:
    text = _read_input(args).strip()
    return parse_equation(text, _params(args))


def _expr_json(e: Expr) -> dict:
    return {"text": e.to_text(), "is_zero": e.is_zero}


# ---------------------------------------------------------------------------
# commands; each returns (results, complete)


def _invariants(args, deadline):
    eq = _single(args)
    results = {}
    complete = True
    try:
        for k in range(3, eq.order + 1):
            inv = generalized_invariants(eq, deadline=deadline, weights=[k])
            results[f"W{k}"] = inv[k].value
    except ComputationTimeout:
        complete = False
    return eq.to_text(), {"invariants": results}, complete


def _check_trivial(args, deadline):
    eq = _single(args)
    conds = extra_conditions(eq)
    inv = {}
    complete = True
    try:
        for k in range(3, eq.order + 1):
            inv[f"W{k}"] = generalized_invariants(eq, deadline=deadline, weights=[k])[k].value
    except ComputationTimeout:
        complete = False
    vanish = complete and all(v.is_zero for v in inv.values())
    results = {
        "invariants": inv,
        "conditions": {c.name: c.value for c in conds},
        "wilczynski_vanish": vanish,
        "trivializable": vanish and all(c.is_zero for c in conds),
    }
    return eq.to_text(), results, complete


def _invariants_system(args, deadline):
    system = parse_system(_read_input(args), _params(args))
    theta = theta2_nonlinear(system)
    rows = theta.value.tolist()
    return system.to_text(), {"Theta2": rows, "is_zero": theta.is_zero}, True


def _reduce(args, deadline):
    if args.order < 3:
        raise UsageError("--order must be at least 3")
    try:
        red = seashi_reduce(args.order - 1, deadline=deadline)
    except ComputationTimeout:
        return f"order {args.order}", {"thetabar": {}}, False
    out = {f"thetabar{k}": th.expr for k, th in sorted(red.thetabar.items())}
    return f"order {args.order}", {"thetabar": out}, True


def _examples(args, deadline):
    try:
        spec = example(args.name, k=args.k, l=args.l, order=args.order)
    except PreconditionError as exc:
        raise UsageError(str(exc)) from None
    return spec.equation.to_text(), {"name": spec.name, "params": spec.params, "equation": spec.equation}, True


def _validate(args, deadline):
    from .oracle import cross_validate

    eq = _single(args)
    try:
        ic = [float(v) for v in args.ic.split(",")]
        a, b = (float(v) for v in args.span.split(":"))
    except ValueError:
        raise UsageError("--ic must be comma-separated numbers and --span of the form a:b") from None
    if len(ic) != eq.order:
        raise UsageError(f"--ic needs {eq.order} values for an equation of order {eq.order}")
    disc = cross_validate(eq, ic, (a, b), args.step)
    out = {
        f"W{k}": {"mode": d.mode, "error": d.error, "scale": d.scale, "constant": None if d.constant is None else str(d.constant)}
        for k, d in sorted(disc.items())
    }
    return eq.to_text(), {"discrepancies": out}, True


# ---------------------------------------------------------------------------
# rendering


def _jsonable(value):
    if isinstance(value, Expr):
        return _expr_json(value)
    if isinstance(value, OdeSingle):
        return value.to_text()
    if isinstance(value, dict):
        return {k: _jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_jsonable(v) for v in value]
    return value


def _text_lines(value, prefix="") -> list[str]:
    lines = []
    for key, v in value.items():
        if isinstance(v, dict) and key != "params":
            if v:
                lines.append(f"{prefix}{key}:")
                lines.extend(_text_lines(v, prefix + "  "))
        elif isinstance(v, Expr):
            lines.append(f"{prefix}{key} = {v.to_text()}")
        elif isinstance(v, list) and v and isinstance(v[0], list):
            lines.append(f"{prefix}{key} =")
            lines.extend(f"{prefix}  [{', '.join(e.to_text() for e in row)}]" for row in v)
        elif isinstance(v, OdeSingle):
            lines.append(f"{prefix}{key}: {v.to_text()}")
        else:
            lines.append(f"{prefix}{key}: {json.dumps(v)}")
    return lines


def _latex_name(key: str) -> str:
    for stem, sym in (("thetabar", r"\bar\theta"), ("Theta", r"\Theta"), ("W", "W")):
        if key.startswith(stem) and key[len(stem) :].isdigit():
            return f"{sym}_{{{key[len(stem):]}}}"
    return r"\mathrm{" + key.replace("_", r"\_") + "}"


def _latex_lines(value) -> list[str]:
    lines = []
    for key, v in value.items():
        if isinstance(v, dict):
            lines.extend(_latex_lines(v))
        elif isinstance(v, Expr):
            lines.append(f"{_latex_name(key)} &= {v.to_latex()}")
        elif isinstance(v, list) and v and isinstance(v[0], list):
            body = r" \\ ".join(" & ".join(e.to_latex() for e in row) for row in v)
            lines.append(f"{_latex_name(key)} &= \\begin{{pmatrix}} {body} \\end{{pmatrix}}")
        elif isinstance(v, OdeSingle):
            lines.append(v.to_latex().replace(" = ", " &= ", 1))
    return lines


def _render(fmt: str, command: str, echo: str, results: dict, complete: bool, seconds: float) -> str:
    if fmt == "json":
        report = {
            "schema": SCHEMA,
            "command": command,
            "input": echo,
            "complete": complete,
            "results": _jsonable(results),
            "timing": {"seconds": round(seconds, 6)},
        }
        return json.dumps(report, indent=2, sort_keys=False)
    if fmt == "latex":
        body = " \\\\\n".join(_latex_lines(results))
        text = "\\begin{align*}\n" + body + "\n\\end{align*}"
        return text if complete else text + "\n% incomplete: time limit exceeded"
    lines = [f"input: {echo}"] if echo else []
    lines += _text_lines(results)
    if not complete:
        lines.append("incomplete: time limit exceeded")
    return "\n".join(lines)


# ---------------------------------------------------------------------------


def _add_input(p: argparse.ArgumentParser) -> None:
    p.add_argument("--eq", help="equation text, e.g. \"y''' = (y')^3\"")
    p.add_argument("--eq-file", help="read the equation from a file")
    p.add_argument("--params", help="comma-separated names of constant parameters")


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=("text", "json", "latex"), default=None, help="default: text (json for validate)")
    common.add_argument("--timeout-seconds", type=float, default=None)

    parser = argparse.ArgumentParser(prog="wilczynski", description="Generalized Wilczynski invariants of ODEs.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("invariants", parents=[common], help="invariants W_3 .. W_{n+1} of y^(n+1) = f")
    _add_input(p)
    p.set_defaults(handler=_invariants)

    p = sub.add_parser("invariants-system", parents=[common], help="Theta_2 of a second-order system")
    _add_input(p)
    p.set_defaults(handler=_invariants_system)

    p = sub.add_parser("reduce", parents=[common], help="universal invariants for a given order")
    p.add_argument("--order", type=int, required=True, help="order N >= 3 of the equation")
    p.set_defaults(handler=_reduce)

    p = sub.add_parser("check-trivial", parents=[common], help="is the equation equivalent to y^(n+1) = 0?")
    _add_input(p)
    p.set_defaults(handler=_check_trivial)

    p = sub.add_parser("examples", help="generate example equations")
    esub = p.add_subparsers(dest="action", required=True)
    g = esub.add_parser("gen", parents=[common], help="print an example equation")
    g.add_argument("--name", choices=EXAMPLE_NAMES, required=True)
    g.add_argument("--k", type=int)
    g.add_argument("--l", type=int)
    g.add_argument("--order", type=int)
    g.set_defaults(handler=_examples)

    p = sub.add_parser("validate", parents=[common], help="compare symbolic and numerical invariants")
    _add_input(p)
    p.add_argument("--ic", required=True, help="initial values y, y', ..., e.g. \"0,0,1\"")
    p.add_argument("--span", default="0:1", help="integration interval a:b")
    p.add_argument("--step", type=float, default=1e-3)
    p.set_defaults(handler=_validate, default_format="json")
    return parser


def run(argv: Sequence[str] | None = None, stdout=None, stderr=None) -> int:
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    fmt = args.format or getattr(args, "default_format", "text")
    deadline = Deadline(args.timeout_seconds)
    command = args.command if args.command != "examples" else "examples gen"
    start = time.perf_counter()
    try:
        echo, results, complete = args.handler(args, deadline)
    except (UsageError, ParseError) as exc:
        print(f"wilczynski {command}: error: {exc}", file=stderr)
        return 2
    except (WilczynskiError, ArithmeticError) as exc:
        print(f"wilczynski {command}: {type(exc).__name__}: {exc}", file=stderr)
        return 1
    print(_render(fmt, command, echo, results, complete, time.perf_counter() - start), file=stdout)
    return 0 if complete else 1


def main() -> None:
    sys.exit(run())

