"""Command-line interface: every pipeline stage as a JSON report.

Four subcommands: `newton` (polyhedron + dual fan of a polynomial),
`resolve` (full verification of a built-in family), `jets` (truncated
jet equations, optionally relative to a deformation parameter) and
`deform-jet` (lift an m-jet through f + sum_l s^l g_l).

JSON is the single source of truth; `--format text` is a plain rendering
of the same data and `--format dot` emits the canonical DOT graph where
one exists (the Newton fan's ray-adjacency graph, the exceptional dual
graph).  Exit codes are a stable contract: 0 success, 1 a verified
mismatch (discrepancies, failed deformation hypotheses), 2 usage or
parse errors.  All output is deterministic for a fixed seed; the
NASHTOR_THREADS environment variable controls the chart worker pool.
"""

from __future__ import annotations

import argparse
import json
import random
import re
import sys
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

from .families import (family1_spec, family2_spec, verification_report_json,
                       verify)
from .fan import fan_dot, fan_json, newton_fan
from .jets import (check_deform_hypotheses, deform_jet, deformation_residual,
                   jet_equations, jet_system_json, relative_jet_equations)
from .newton import newton_polyhedron, polyhedron_json
from .poly import (INFINITY, ParseError, SparsePolynomial, TruncatedSeries,
                   format_polynomial, parse_polynomial)
from .resolution import dual_graph_dot


@dataclass(frozen=True)
class CliConfig:
    """One invocation: a single command plus output plumbing."""

    command: str
    input: Optional[str]
    format: str = "json"
    seed: int = 0
    output: Optional[str] = None


# ---------------------------------------------------------------------------
# small serialization helpers


def _order_json(v):
    if v is INFINITY:
        return "infinity"
    if isinstance(v, Fraction):
        return int(v) if v.denominator == 1 else str(v)
    return int(v)


def _series_text(series: TruncatedSeries) -> str:
    terms = {(k,): c for k, c in enumerate(series.coeffs) if c != 0}
    return format_polynomial(SparsePolynomial(1, terms), ("t",))


def _series_from_text(text: str, m: int) -> TruncatedSeries:
    poly = parse_polynomial(text, var_names=("t",))
    return TruncatedSeries(m, [poly.coefficient((k,))
                               for k in range(m + 1)])


def _append_var(f: SparsePolynomial) -> SparsePolynomial:
    return SparsePolynomial(f.n_vars + 1,
                            {e + (0,): c for e, c in f.terms.items()})


def _parse_input(text: str) -> SparsePolynomial:
    # ring size is read off the largest x-index mentioned, so "x1^2+x3"
    # lives in three variables
    indices = [int(d) for d in re.findall(r"x(\d+)", text)]
    return parse_polynomial(text, n_vars=max(indices, default=1))


# ---------------------------------------------------------------------------
# command handlers: return (exit code, report dict, dot text or None)


def _cmd_newton(ns):
    f = _parse_input(ns.polynomial)
    fan = newton_fan(f)
    report = {
        "report_version": 1,
        "polynomial": format_polynomial(f),
        "newton_polyhedron": polyhedron_json(newton_polyhedron(f)),
        "newton_fan": fan_json(fan),
    }
    return 0, report, fan_dot(fan)


def _cmd_resolve(ns):
    if ns.family == 1:
        if ns.p is None:
            raise ValueError("--family 1 requires --p and --q")
        spec = family1_spec(ns.p, ns.q)
    else:
        if ns.p is not None:
            raise ValueError("--family 2 takes only --q")
        spec = family2_spec(ns.q)
    report = verify(spec)
    data = verification_report_json(spec, report)
    dot = None
    if report.dual_graph is not None:
        dot = dual_graph_dot(report.dual_graph)
    data["dual_graph_dot"] = dot
    return (1 if report.discrepancies else 0), data, dot


def _cmd_jets(ns):
    f = _parse_input(ns.polynomial)
    if ns.s_poly is None:
        system = jet_equations(f, ns.m)
    else:
        g = parse_polynomial(ns.s_poly, n_vars=f.n_vars)
        n = f.n_vars
        s_mono = SparsePolynomial(n + 1, {(0,) * n + (1,): Fraction(1)})
        family = _append_var(f) + s_mono * _append_var(g)
        system = relative_jet_equations(family, ns.m, [n])
    data = {"report_version": 1}
    data.update(jet_system_json(system))
    return 0, data, None


def _cmd_deform_jet(ns):
    f = _parse_input(ns.polynomial)
    n = f.n_vars
    if ns.s_degree < 1:
        raise ValueError("--s-degree must be >= 1")
    parts = [part.strip() for part in ns.phi.split(",")]
    if len(parts) != n:
        raise ValueError(
            f"--phi needs {n} comma-separated entries, got {len(parts)}")
    phi = tuple(_series_from_text(part, ns.m) for part in parts)
    g_list = [parse_polynomial(text, n_vars=n) for text in (ns.g or [])]

    hyp = check_deform_hypotheses(f, g_list, phi, ns.m)
    report = {
        "report_version": 1,
        "polynomial": format_polynomial(f),
        "m": ns.m,
        "s_degree": ns.s_degree,
        "g": [format_polynomial(g) for g in g_list],
        "phi": [_series_text(p) for p in phi],
        "hypotheses": {
            "ok": hyp.ok,
            "min_order_equality": hyp.min_order_equality,
            "g_order_bound": hyp.g_order_bound,
            "nu_f": _order_json(hyp.nu_f),
            "contact_orders": [_order_json(o) for o in hyp.contact_orders],
            "g_orders": [_order_json(o) for o in hyp.g_orders],
            "failures": list(hyp.failures),
        },
        "deformation": None,
        "residual_zero": None,
    }
    if not hyp.ok:
        return 1, report, None
    try:
        deformation = deform_jet(f, g_list, phi, ns.m, ns.s_degree)
    except ValueError as err:
        # an obstruction found mid-construction is a verified mismatch,
        # not a usage error
        report["error"] = str(err)
        return 1, report, None
    residual_zero = deformation_residual(f, g_list, deformation).is_zero()
    report["deformation"] = {
        "pivot_index": deformation.pivot_index,
        "psi": [[_series_text(w) for w in stage]
                for stage in deformation.psi],
    }
    report["residual_zero"] = residual_zero
    return (0 if residual_zero else 1), report, None


_HANDLERS = {
    "newton": _cmd_newton,
    "resolve": _cmd_resolve,
    "jets": _cmd_jets,
    "deform-jet": _cmd_deform_jet,
}


# ---------------------------------------------------------------------------
# plumbing


def _text_lines(value, indent=0):
    pad = "  " * indent
    if isinstance(value, dict):
        out = []
        for key in sorted(value):
            inner = value[key]
            if isinstance(inner, (dict, list)) and inner:
                out.append(f"{pad}{key}:")
                out.extend(_text_lines(inner, indent + 1))
            else:
                out.append(f"{pad}{key}: {json.dumps(inner)}")
        return out
    if isinstance(value, list):
        out = []
        for inner in value:
            if isinstance(inner, (dict, list)) and inner:
                out.append(f"{pad}-")
                out.extend(_text_lines(inner, indent + 1))
            else:
                out.append(f"{pad}- {json.dumps(inner)}")
        return out
    return [f"{pad}{json.dumps(value)}"]


def _render(report: dict, dot: Optional[str], fmt: str) -> Optional[str]:
    if fmt == "json":
        return json.dumps(report, indent=2, sort_keys=True) + "\n"
    if fmt == "dot":
        return dot
    return "\n".join(_text_lines(report)) + "\n"


def _emit(text: str, output: Optional[str]):
    if output:
        with open(output, "w") as fh:
            fh.write(text)
        print(f"wrote {output}", file=sys.stderr)
    else:
        sys.stdout.write(text)


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="nashtor",
        description="Newton polyhedra, toric resolutions and jet spaces "
                    "in exact arithmetic")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--format", choices=("json", "dot", "text"),
                       default="json")
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--output", default=None,
                       help="write the report here instead of stdout")

    newton = sub.add_parser(
        "newton", help="Newton polyhedron and dual fan of a polynomial")
    newton.add_argument("polynomial")
    common(newton)

    resolve = sub.add_parser(
        "resolve", help="verify the resolution of a built-in family")
    resolve.add_argument("--family", type=int, choices=(1, 2), required=True)
    resolve.add_argument("--p", type=int, default=None)
    resolve.add_argument("--q", type=int, required=True)
    common(resolve)

    jets = sub.add_parser("jets", help="truncated jet equations")
    jets.add_argument("polynomial")
    jets.add_argument("--m", type=int, required=True)
    jets.add_argument("--s-poly", dest="s_poly", default=None,
                      help="emit equations of f + s*G instead, s scalar")
    common(jets)

    deform = sub.add_parser(
        "deform-jet", help="lift an m-jet through f + sum_l s^l g_l")
    deform.add_argument("polynomial")
    deform.add_argument("--m", type=int, required=True)
    deform.add_argument("--phi", required=True,
                        help="comma-separated t-polynomials, one per "
                             "variable")
    deform.add_argument("--g", action="append", default=None,
                        help="deformation term g_l (repeat for l = 1, 2, "
                             "...)")
    deform.add_argument("--s-degree", dest="s_degree", type=int, default=1)
    common(deform)
    return parser


def main(argv=None) -> int:
    parser = _build_parser()
    try:
        ns = parser.parse_args(argv)
    except SystemExit as err:
        return err.code if isinstance(err.code, int) else 2
    config = CliConfig(command=ns.command,
                       input=getattr(ns, "polynomial", None),
                       format=ns.format, seed=ns.seed, output=ns.output)
    random.seed(config.seed)
    try:
        code, report, dot = _HANDLERS[config.command](ns)
    except ParseError as err:
        print(f"parse error: {err}", file=sys.stderr)
        return 2
    except ValueError as err:
        print(f"error: {err}", file=sys.stderr)
        return 2
    rendered = _render(report, dot, config.format)
    if rendered is None:
        print("no DOT rendering for this command", file=sys.stderr)
        return 2
    _emit(rendered, config.output)
    return code


if __name__ == "__main__":
    sys.exit(main())
