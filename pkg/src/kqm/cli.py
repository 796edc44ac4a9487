"""Command-line front end: ``kqm COMMAND [FILE] [flags]``.

Reads a problem file (or standard input), prints a JSON document on standard
output.  Solver outputs are problem files themselves, so ``verify`` can be
run on them directly.

Exit status: 0 success or verified, 2 certified nonexistence or infeasible,
1 usage or schema error.
"""

from __future__ import annotations

import argparse
import sys
from decimal import Decimal, localcontext
from fractions import Fraction

from . import serialize as ser
from .compops import Infeasible, characterize_1q3, complete_single_branch, is_kqm, solve_circuit
from .errors import AdmissibilityError, ConstructionError, KqmError, SchemaError
from .exact import alt_diff, fmt
from .graph import to_dot
from .shift import (AltDiffNonzero, InterpolantMismatch, NonexistenceCertificate, alpha_frame,
                    check_shift, complete_shift)
from .verify import defect_suite
from .wcompops import complete_single_branch_weighted, is_kqm_weighted, solve_weighted_circuit

OK, INFEASIBLE, USAGE = 0, 2, 1
EXTRA_WEIGHTS = 4     # completed squared weights listed beyond the fixed prefix


class Failure(Exception):
    """Mathematical infeasibility; the payload is still printed."""

    def __init__(self, doc: dict):
        super().__init__("infeasible")
        self.doc = doc


def sqrt_digits(x: Fraction, digits: int) -> str:
    with localcontext() as ctx:
        ctx.prec = digits + 10
        root = (Decimal(x.numerator) / Decimal(x.denominator)).sqrt()
        return str(round(root, digits))


def require(payload: dict, *keys):
    for key in keys:
        if key not in payload:
            raise SchemaError(f"'{key}' is required for this command", ser.path_of(key))


def expect_kind(doc: dict, *kinds):
    if doc["kind"] not in kinds:
        raise SchemaError(f"this command needs kind {' or '.join(kinds)}, got {doc['kind']}", "$.kind")


# ---------------------------------------------------------------------------
# Commands
# ---------------------------------------------------------------------------

def certificate_json(cert: NonexistenceCertificate) -> dict:
    cond = cert.failing_condition
    if isinstance(cond, AltDiffNonzero):
        return {"alt_diff": {"n": cond.n, "value": fmt(cond.value)}}
    if isinstance(cond, InterpolantMismatch):
        return {"interpolant_mismatch": {"node": cond.node, "expected": fmt(cond.expected),
                                         "got": fmt(cond.got)}}
    return {"positivity": {"witness": cond.witness}}


def cmd_complete_shift(doc, options, args):
    expect_kind(doc, "shift")
    problem = ser.shift_problem(doc["payload"], options)
    c = complete_shift(problem)
    if isinstance(c, NonexistenceCertificate):
        raise Failure({"kind": "shift", "payload": doc["payload"], "options": options,
                       "result": {"status": "nonexistent", "certificate": certificate_json(c)}})
    count = len(c.squared_prefix) + EXTRA_WEIGHTS
    sq = c.squared_weights(count)
    result = {"status": "completed", "strict": c.strict, "w": ser.fmts(c.w.coeffs),
              "squared_weights": ser.fmts(sq),
              "t": None if c.t_used is None else fmt(c.t_used)}
    digits = args.approx or options.get("approx_digits")
    if digits:
        result["approx_weights"] = [sqrt_digits(x, digits) for x in sq]
    return {"kind": "shift", "payload": ser.completion_payload(doc["payload"], c),
            "options": options, "result": result}


def cmd_check_shift(doc, options, args):
    expect_kind(doc, "shift")
    payload = doc["payload"]
    m, k = payload["m"], payload["k"]
    c = ser.shift_completion(payload)
    if c is not None:
        horizon = args.depth or options.get("depth") or k + m + 8
        ok, first = check_shift(c, m, k, horizon)
        result = {"ok": ok, "first_failure": first, "horizon": horizon, "scope": "completion"}
    else:
        frame = alpha_frame(ser.rats(payload["weights"]), k)
        diffs = [alt_diff(frame, m, n) for n in range(len(frame) - m)]
        first = next((n for n, d in enumerate(diffs) if d != 0), None)
        result = {"ok": first is None, "first_failure": first, "scope": "data",
                  "alt_diffs": ser.fmts(diffs)}
    out = {"kind": "shift", "payload": payload, "options": options, "result": result}
    if not result["ok"]:
        raise Failure(out)
    return out


def _graph_out(doc, options, mu, result, pi=None, extra=None):
    payload = ser.model_payload(mu, doc["payload"], pi)
    payload.update(extra or {})
    return {"kind": doc["kind"], "payload": payload, "options": options, "result": result}


def cmd_solve_circuit(doc, options, args):
    expect_kind(doc, "graph")
    require(doc["payload"], "m", "k")
    mu = ser.measure_model(doc["payload"])
    m, k = doc["payload"]["m"], doc["payload"]["k"]
    fam = solve_circuit(mu, m, k)
    if isinstance(fam, Infeasible):
        raise Failure({**doc, "options": options, "result": {"status": "infeasible", **fam.to_json()}})
    mu = mu.with_circuit_masses(fam.sample())
    return _graph_out(doc, options, mu, {"status": "solved", "family": fam.to_json(),
                                         "translation_invariant": fam.translation_invariant})


def cmd_characterize(doc, options, args):
    expect_kind(doc, "graph")
    if args.kappa is None:
        raise SchemaError("characterize requires --kappa 2|3|4", "$")
    mu = ser.measure_model(doc["payload"])
    literal = args.literal or options.get("literal", False)
    ch = characterize_1q3(mu, args.kappa, literal=literal)
    if isinstance(ch, Infeasible):
        raise Failure({**doc, "options": options, "result": {"status": "infeasible", **ch.to_json()}})
    mu = mu.with_circuit_masses(ch.sample())
    return _graph_out(doc, options, mu, {"status": "solved", "characterization": ch.to_json()},
                      extra={"m": 3, "k": 1})


def _t_of(options):
    t = options.get("t", "auto")
    return t if t == "auto" else ser.rat(t)


def cmd_complete_branch(doc, options, args):
    expect_kind(doc, "graph", "weighted")
    payload = doc["payload"]
    require(payload, "initial_masses", "k")
    b = ser.rats(payload["initial_masses"])
    k, m = payload["k"], len(b)
    filler = ser.rat(options.get("filler", 1))
    if doc["kind"] == "weighted":
        pi = ser.weight_function({**payload, "kappa": 1, "etas": [1]})
        try:
            mu = complete_single_branch_weighted(b, pi, k, m, t=_t_of(options), filler=filler)
        except ConstructionError as exc:
            raise Failure({**doc, "options": options,
                           "result": {"status": "infeasible", "reason": str(exc)}}) from exc
        order = m + 1
        return _graph_out(doc, options, mu, {"status": "completed", "order": order}, pi,
                          extra={"m": order})
    mu = complete_single_branch(b, k, m, t=_t_of(options), filler=filler)
    order = m + 2 if m >= 2 else 2
    return _graph_out(doc, options, mu, {"status": "completed", "order": order}, extra={"m": order})


def cmd_solve_weighted(doc, options, args):
    expect_kind(doc, "weighted")
    require(doc["payload"], "m", "k")
    mu = ser.measure_model(doc["payload"])
    pi = ser.weight_function(doc["payload"])
    m, k = doc["payload"]["m"], doc["payload"]["k"]
    fam = solve_weighted_circuit(mu, pi, m, k)
    if isinstance(fam, Infeasible):
        raise Failure({**doc, "options": options, "result": {"status": "infeasible", **fam.to_json()}})
    mu = mu.with_circuit_masses(fam.sample())
    return _graph_out(doc, options, mu, {"status": "solved", "family": fam.to_json(),
                                         "translation_invariant": fam.translation_invariant}, pi)


def cmd_verify(doc, options, args):
    if doc["kind"] == "shift":
        require(doc["payload"], "squared_weights", "tail_poly", "tail_from")
        return cmd_check_shift(doc, options, args)
    payload = doc["payload"]
    require(payload, "m", "k")
    mu = ser.measure_model(payload, need_circuit=True)
    m, k = payload["m"], payload["k"]
    depth = args.depth or options.get("depth")
    if doc["kind"] == "weighted":
        pi = ser.weight_function(payload)
        report = defect_suite(mu, m, k, pi, depth)
        criterion = is_kqm_weighted(mu, pi, m, k)
    else:
        report = defect_suite(mu, m, k, None, depth)
        criterion = is_kqm(mu, m, k)
    out = {"kind": doc["kind"], "payload": payload, "options": options,
           "result": {"defects": report.to_json(), "criterion": criterion.to_json(),
                      "verified": report.all_zero}}
    if not report.all_zero:
        raise Failure(out)
    return out


def cmd_export_graph(doc, options, args):
    expect_kind(doc, "graph", "weighted")
    mu = ser.measure_model(doc["payload"])
    depth = args.depth or options.get("depth") or 4
    return to_dot(mu.graph, depth, mu)


COMMANDS = {
    "complete-shift": cmd_complete_shift,
    "check-shift": cmd_check_shift,
    "solve-circuit": cmd_solve_circuit,
    "characterize": cmd_characterize,
    "complete-branch": cmd_complete_branch,
    "solve-weighted": cmd_solve_weighted,
    "verify": cmd_verify,
    "export-graph": cmd_export_graph,
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="kqm", description="k-quasi-m-isometry solvers and checks")
    parser.add_argument("command", choices=sorted(COMMANDS))
    parser.add_argument("file", nargs="?", default="-", help="problem file, '-' for standard input")
    parser.add_argument("--depth", type=int, help="verification depth or export depth")
    parser.add_argument("--t", help="extension value p/q (overrides options.t)")
    parser.add_argument("--kappa", type=int, choices=(2, 3, 4), help="circuit length for characterize")
    parser.add_argument("--approx", type=int, metavar="N", help="decimal digits for completed weights")
    parser.add_argument("--export-graph", metavar="PATH", help="also write a Graphviz file")
    parser.add_argument("--literal", action="store_true",
                        help="characterize with the published closed forms verbatim")
    return parser


def run(argv=None, stdin=None, stdout=None, stderr=None) -> int:
    stdin = stdin or sys.stdin
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return USAGE if exc.code else OK
    try:
        if args.file == "-":
            text = stdin.read()
        else:
            with open(args.file, encoding="utf-8") as fh:
                text = fh.read()
    except OSError as exc:
        print(f"error: {exc}", file=stderr)
        return USAGE
    try:
        doc = ser.loads(text)
        options = dict(doc.get("options", {}))
        if args.t is not None:
            options["t"] = args.t
            ser.validate({**doc, "options": options})
        out = COMMANDS[args.command](doc, options, args)
        status = OK
    except Failure as f:
        out, status = f.doc, INFEASIBLE
    except AdmissibilityError as exc:
        print(f"infeasible: {exc}", file=stderr)
        out, status = {**doc, "result": {"status": "inadmissible", "reason": str(exc)}}, INFEASIBLE
    except SchemaError as exc:
        print(f"error: {exc}", file=stderr)
        return USAGE
    except (KqmError, ValueError) as exc:
        print(f"error: $.payload: {exc}", file=stderr)
        return USAGE
    if isinstance(out, str):
        stdout.write(out)
    else:
        stdout.write(ser.dumps(out))
        if args.export_graph and out.get("kind") in ("graph", "weighted"):
            mu = ser.measure_model(out["payload"])
            with open(args.export_graph, "w", encoding="utf-8") as fh:
                fh.write(to_dot(mu.graph, args.depth or 4, mu))
    if args.command == "export-graph" and args.export_graph:
        with open(args.export_graph, "w", encoding="utf-8") as fh:
            fh.write(out)
    return status


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
