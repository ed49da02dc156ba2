"""``gq``: command-line front end.

Exit codes: 0 success, 1 a requested condition fails (the report carries a
witness), 2 parse or usage error, 3 internal invariant violation.
"""
from __future__ import annotations

import argparse
import json
import os
import sys
from dataclasses import dataclass, field

from . import __version__
from .dvb import (DVBFiber, DVBSubalgebraSpec, check_quot2, pike_verify,
                  quotient_dvb)
from .errors import ConditionFailed, InternalInvariantError, UsageError
from .grading import fmt_q
from .nilpotent import (GradedSubalgebra, check_closed, check_condition,
                        check_weak_condition, saturate)
from .parser import ParseError, parse_polynomial, parse_problem
from .polyalg import Derivation
from .quotient import split_sequence, staged_quotient

EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_INTERNAL = 0, 1, 2, 3


# ---------------------------------------------------------------- report plumbing

def key(k) -> str:
    """Multi-index → "1,0"."""
    return ",".join(str(int(x)) for x in k)


def dims_json(d: dict) -> dict:
    return {key(k): int(v) for k, v in sorted(d.items())}


def subspace_fields(ring, degree, S) -> list:
    return [str(Derivation.from_vector(ring, degree, row)) for row in S.rows]


@dataclass
class Report:
    kind: str
    input: dict = field(default_factory=dict)
    validation: dict = field(default_factory=dict)
    quotient: dict | None = None
    stages: list = field(default_factory=list)
    properties: dict = field(default_factory=dict)
    exit_code: int = EXIT_OK

    def as_json(self) -> dict:
        return {"kind": self.kind, "input": self.input, "validation": self.validation,
                "quotient": self.quotient, "stages": self.stages,
                "properties": self.properties, "version": __version__}


def _use_color(stream) -> bool:
    mode = os.environ.get("GQ_COLOR", "auto").lower()
    if mode not in ("auto", "always", "never"):
        raise UsageError(f"GQ_COLOR must be auto, always or never (got {mode!r})")
    if mode == "auto":
        return hasattr(stream, "isatty") and stream.isatty()
    return mode == "always"


def _paint(text: str, color: bool) -> str:
    if not color:
        return text
    if text in ("true", "ok", "pass"):
        return f"\x1b[32m{text}\x1b[0m"
    if text in ("false", "fail"):
        return f"\x1b[31m{text}\x1b[0m"
    return text


def render_text(obj, color: bool, indent: int = 0) -> list:
    pad = "  " * indent
    lines = []
    if isinstance(obj, dict):
        for k in sorted(obj):
            v = obj[k]
            if isinstance(v, (dict, list)) and v:
                lines.append(f"{pad}{k}:")
                lines.extend(render_text(v, color, indent + 1))
            else:
                lines.append(f"{pad}{k}: {_scalar_text(v, color)}")
    elif isinstance(obj, list):
        for v in obj:
            if isinstance(v, (dict, list)) and v:
                lines.append(f"{pad}-")
                lines.extend(render_text(v, color, indent + 1))
            else:
                lines.append(f"{pad}- {_scalar_text(v, color)}")
    else:
        lines.append(pad + _scalar_text(obj, color))
    return lines


def _scalar_text(v, color) -> str:
    if v is None:
        return "-"
    if isinstance(v, bool):
        return _paint("true" if v else "false", color)
    if isinstance(v, (dict, list)):
        return "{}" if isinstance(v, dict) else "[]"
    return str(v)


def emit(report: Report, fmt: str, out=None) -> None:
    out = out or sys.stdout
    if fmt == "json":
        out.write(json.dumps(report.as_json(), sort_keys=True, indent=2, ensure_ascii=False) + "\n")
    else:
        out.write("\n".join(render_text(report.as_json(), _use_color(out))) + "\n")


# ---------------------------------------------------------------- shared pieces

def _load(path: str, kinds) -> "ProblemFile":
    pf = parse_problem(path)
    if pf.kind not in kinds:
        raise UsageError(f"{path}: this command expects kind {' or '.join(kinds)}, got {pf.kind}")
    return pf


def _subalgebra(pf) -> GradedSubalgebra:
    return GradedSubalgebra(pf.ring, [X for _, X in pf.generators])


def _h_json(h: GradedSubalgebra) -> dict:
    return {key(d): [str(X) for X in h.basis[d]] for d in h.ordered_degrees()}


def _closure_json(cl) -> dict:
    out = {"closed": cl.closed}
    if not cl.closed:
        X, Y, Z = cl.witness
        out["witness"] = {"X": str(X), "Y": str(Y), "bracket": str(Z)}
    return out


def _condition_json(rep, ring) -> dict:
    out = {"holds": rep.holds, "failures": []}
    for k, lhs, rhs in rep.failures:
        out["failures"].append({"degree": key(k), "lhs_dim": lhs.dim, "rhs_dim": rhs.dim,
                                "lhs_basis": subspace_fields(ring, k, lhs),
                                "rhs_basis": subspace_fields(ring, k, rhs)})
    return out


def _quotient_json(q) -> dict:
    kernel = None
    if q.kernel is not None:
        kernel = {"dims": dims_json(q.kernel.dims),
                  "parametrization": {nm: str(p) for nm, p in sorted(q.kernel.parametrization.items())}}
    return {"source_dims": dims_json(q.source_dims()),
            "quotient_dims": dims_json(q.quotient_dims()),
            "kernel_dims": dims_json(q.kernel_dims()),
            "vars": [[nm, key(w)] for nm, w in zip(q.quotient_ring.names, q.quotient_ring.weights)],
            "pullbacks": {nm: str(q.pullbacks[nm]) for nm in q.quotient_ring.names},
            "kernel": kernel}


def _stages_json(q) -> list:
    return [{"index": key(s.index), "rank": s.rank, "eliminated": list(s.eliminated)} for s in q.stages]


def _quotient_properties(q) -> dict:
    src, qd, kd = q.source_dims(), q.quotient_dims(), q.kernel_dims()
    balance = all(src.get(w, 0) == qd.get(w, 0) + kd.get(w, 0) for w in set(src) | set(qd) | set(kd))
    j = split_sequence(q)
    return {"dims_balance": balance,
            "split_section": {nm: str(j[nm]) for nm in q.source.names},
            "split_identity": True}


# ---------------------------------------------------------------- commands

def cmd_check(args) -> Report:
    pf = _load(args.file, ("graded_quotient", "dvb"))
    h = _subalgebra(pf)
    rep = Report("check", pf.echo())
    cl = check_closed(h)
    rep.validation["closure"] = _closure_json(cl)
    rep.validation["h"] = _h_json(h)
    weak = check_weak_condition(h)
    rep.validation["weak_condition"] = _condition_json(weak, pf.ring)
    if not cl:
        rep.exit_code = EXIT_FAIL
        return rep
    cond = check_condition(h, assume_closed=True)
    rep.validation["condition"] = _condition_json(cond, pf.ring)
    if not cond:
        rep.exit_code = EXIT_FAIL
    return rep


def cmd_saturate(args) -> Report:
    pf = _load(args.file, ("graded_quotient", "dvb"))
    h = _subalgebra(pf)
    rep = Report("saturate", pf.echo())
    cl = check_closed(h)
    rep.validation["closure"] = _closure_json(cl)
    weak = check_weak_condition(h)
    rep.validation["weak_condition"] = _condition_json(weak, pf.ring)
    if not cl or not weak:
        rep.exit_code = EXIT_FAIL
        return rep
    s = saturate(h)
    rep.validation["saturated"] = _h_json(s)
    rep.validation["saturated_closure"] = _closure_json(check_closed(s))
    cond = check_condition(s)
    rep.validation["saturated_condition"] = _condition_json(cond, pf.ring)
    rep.properties["contains_input"] = h.issubalgebra_of(s)
    if not cond:
        raise InternalInvariantError("saturation does not satisfy the quotient condition")
    return rep


def _run_quotient(rep: Report, ring, h) -> None:
    cl = check_closed(h)
    rep.validation["closure"] = _closure_json(cl)
    if not cl:
        rep.exit_code = EXIT_FAIL
        return
    cond = check_condition(h, assume_closed=True)
    rep.validation["condition"] = _condition_json(cond, ring)
    if not cond:
        rep.exit_code = EXIT_FAIL
        return
    q = staged_quotient(ring, h, check=False)
    rep.quotient = _quotient_json(q)
    rep.stages = _stages_json(q)
    rep.properties.update(_quotient_properties(q))


def cmd_quotient(args) -> Report:
    pf = _load(args.file, ("graded_quotient", "dvb"))
    rep = Report("quotient", pf.echo())
    h = _subalgebra(pf)
    rep.validation["h"] = _h_json(h)
    _run_quotient(rep, pf.ring, h)
    return rep


def cmd_dvb(args) -> Report:
    pf = _load(args.file, ("dvb",))
    D = DVBFiber(*pf.ranks)
    h = _subalgebra(pf)
    rep = Report("dvb", pf.echo())
    rep.validation["h"] = _h_json(h)
    spec = DVBSubalgebraSpec.from_subalgebra(D, h)
    for d in h.degrees():
        if d not in ((-1, 0), (0, -1), (-1, -1)):
            raise UsageError(f"DVB subalgebras live in degrees (-1,0), (0,-1), (-1,-1); got {d}")
    q2 = check_quot2(spec)
    rep.validation["quot2"] = {"fat_a": q2.fat_a_ok, "fat_b": q2.fat_b_ok, "closed": q2.closed,
                               "g_cprime_criterion": q2.gc_criterion, "valid": q2.valid,
                               "reason": q2.reason}
    if not q2.valid:
        rep.exit_code = EXIT_FAIL
        return rep
    qr = quotient_dvb(spec)
    rep.quotient = _quotient_json(qr.result)
    rep.quotient["ranks"] = list(qr.ranks)
    rep.quotient["removed"] = list(qr.side_ranks_removed)
    rep.stages = _stages_json(qr.result)
    rep.properties.update(_quotient_properties(qr.result))
    rep.properties["ranks_formula"] = tuple(
        r + s for r, s in zip(qr.ranks, qr.side_ranks_removed)) == tuple(pf.ranks)
    if not args.no_pike:
        pk = pike_verify(spec)
        rep.properties["pike"] = {"vertical_first": pk.vertical_first,
                                  "horizontal_first": pk.horizontal_first,
                                  "degrees": [key(k) for k in pk.degrees_checked]}
        if not pk.ok:
            raise InternalInvariantError("iterated quotients disagree with the direct quotient")
    return rep


def _parse_set_arg(text: str | None, label: str) -> frozenset:
    if text is None or text.strip() in ("", "-", "{}"):
        return frozenset()
    try:
        return frozenset(int(x) for x in text.replace(" ", "").strip("{}").split(",") if x)
    except ValueError:
        raise UsageError(f"{label} must be a comma-separated list of integers") from None


def _twist_from_args(texts, m: int, n: int) -> dict:
    from .geom.jets import chart_ring
    from .geom.normal import chart_names
    names = chart_names(m)
    C = chart_ring(names, n)
    out = {}
    for t in texts or []:
        if "->" not in t:
            raise UsageError("twist must read 'u_k -> polynomial'")
        lhs, rhs = t.split("->", 1)
        nm = lhs.strip()
        if nm not in names:
            raise UsageError(f"unknown chart coordinate {nm!r}")
        out[nm] = parse_polynomial(rhs, C)
    return out


def _diffeo(twist: dict, m: int, weights):
    from .geom.jets import FiltrationDiffeo, chart_ring
    from .geom.normal import chart_names
    if not twist:
        return None
    names = chart_names(m)
    C = chart_ring(names, len(weights[0]))
    corr = {nm: img.change_ring(C) - C.var(nm) for nm, img in twist.items()}
    return FiltrationDiffeo(names, weights, corr)


def _normal_inputs(args, kind, keys):
    if args.file:
        pf = _load(args.file, (kind,))
        return pf.dim, [pf.sets.get(k, frozenset()) for k in keys], pf.twist, pf.method, pf.echo()
    if args.dim is None:
        raise UsageError("give a problem file or --dim")
    sets = [_parse_set_arg(getattr(args, k.lower()), k) for k in keys]
    n = 2 if kind == "double_normal" else 1
    twist = _twist_from_args(args.twist, args.dim, n)
    echo = {"kind": kind, "dim": args.dim, **{k: sorted(s) for k, s in zip(keys, sets)}}
    if twist:
        echo["twist"] = {k: str(v) for k, v in sorted(twist.items())}
    return args.dim, sets, twist, None, echo


def _first_sample(runs) -> dict | None:
    if not runs:
        return None
    r = runs[0]
    q = r.result
    return {"base_point": [fmt_q(c) for _, c in sorted(r.base_values.items())],
            "vars": [[nm, key(w)] for nm, w in zip(q.quotient_ring.names, q.quotient_ring.weights)],
            "pullbacks": {nm: str(q.pullbacks[nm]) for nm in q.quotient_ring.names}}


def cmd_dnb(args) -> Report:
    from .geom.normal import (dnb_weights, double_normal_gr,
                              double_normal_subquotient, flip)
    m, (I1, I2), twist, method, echo = _normal_inputs(args, "double_normal", ("I1", "I2"))
    method = args.method or method or "both"
    rep = Report("dnb", echo)
    phi = _diffeo(twist, m, dnb_weights(m, I1, I2))
    reports = {}
    if method in ("gr", "both"):
        reports["gr"] = double_normal_gr(m, I1, I2)
    if method in ("subquotient", "both"):
        reports["subquotient"] = double_normal_subquotient(m, I1, I2, twist=phi, oracle=args.oracle)
    main = reports.get("subquotient") or reports["gr"]
    rep.quotient = {"sides": list(main.sides), "core": main.core, "excess": main.excess,
                    "base_dim": main.base_dim, "graded_dims": dims_json(main.graded_dims),
                    "span_dims": dims_json(main.span_dims), "method": method}
    if "subquotient" in reports:
        rep.quotient["sample"] = _first_sample(reports["subquotient"].samples)
        rep.quotient["twist"] = reports["subquotient"].twist
    props = {"ranks_formula": (tuple(main.sides) == (len(I2 - I1), len(I1 - I2))
                               and main.core == len(I1 & I2) and main.excess == main.core)}
    if len(reports) == 2:
        props["methods_agree"] = reports["gr"].summary() == reports["subquotient"].summary()
    props["flip_symmetry"] = flip(reports.get("gr") or double_normal_gr(m, I1, I2)).summary() == \
        double_normal_gr(m, I2, I1).summary()
    rep.properties = props
    if not all(props.values()):
        raise InternalInvariantError(f"double normal bundle checks failed: {props}")
    return rep


def cmd_wnb(args) -> Report:
    from .geom.normal import weighted_normal_order2, wnb_weights
    m, (I, J), twist, method, echo = _normal_inputs(args, "weighted_normal", ("I", "J"))
    method = args.method or method or "both"
    rep = Report("wnb", echo)
    phi = _diffeo(twist, m, wnb_weights(m, I, J))
    reports = {}
    if method in ("gr", "both"):
        reports["gr"] = weighted_normal_order2(m, I, J, method="gr")
    if method in ("subquotient", "both"):
        reports["subquotient"] = weighted_normal_order2(m, I, J, twist=phi, method="subquotient",
                                                        oracle=args.oracle)
    main = reports.get("subquotient") or reports["gr"]
    rep.quotient = {"graded_dims": dims_json(main.graded_dims),
                    "span_dims": dims_json(main.span_dims), "method": method}
    props = {}
    if "subquotient" in reports:
        sq = reports["subquotient"]
        rep.quotient.update({"kernel_dims": dims_json(sq.kernel_dims),
                             "total_dims": dims_json(sq.total_dims),
                             "linear_ranks": dims_json(sq.linear_ranks),
                             "sample": _first_sample(sq.samples), "twist": sq.twist})
        props["exact_sequence"] = bool(sq.exact_sequence_ok)
    if len(reports) == 2:
        g, s = reports["gr"], reports["subquotient"]
        props["methods_agree"] = (g.graded_dims, g.span_dims) == (s.graded_dims, s.span_dims)
    rep.properties = props
    if not all(props.values()):
        raise InternalInvariantError(f"weighted normal bundle checks failed: {props}")
    return rep


VERIFY_DEFAULTS = {"exp-bch": 200, "condition": 200, "oracle": 100, "dvb": 100, "pike": 100,
                   "lifts": 200, "double-normal": 20, "weighted-normal": 20}


def cmd_verify(args) -> Report:
    from .suites import SUITES
    names = args.suite or list(SUITES)
    for nm in names:
        if nm not in SUITES:
            raise UsageError(f"unknown suite {nm!r} (choose from {', '.join(SUITES)})")
    rep = Report("verify", {"seed": args.seed, "cases": args.cases, "suites": names})
    ok = True
    for nm in names:
        n = args.cases if args.cases is not None else VERIFY_DEFAULTS[nm]
        if nm == "double-normal":
            res = SUITES[nm](args.seed, twists=n, max_m=args.max_m or 5,
                              twist_scope=args.twist_scope)
        elif nm == "weighted-normal":
            res = SUITES[nm](args.seed, twists=n, max_m=args.max_m or 4)
        else:
            res = SUITES[nm](args.seed, n)
        d = res.as_dict()
        d["stats"] = {str(k): v for k, v in d["stats"].items()}
        rep.properties[nm] = d
        ok = ok and res.ok
    rep.validation["all_passed"] = ok
    if not ok:
        rep.exit_code = EXIT_FAIL
    return rep


# ---------------------------------------------------------------- argument parsing

def build_parser() -> argparse.ArgumentParser:
    # subcommands must not reset a --format given before the command name
    fmt = argparse.ArgumentParser(add_help=False)
    fmt.add_argument("--format", choices=("json", "text"), default=argparse.SUPPRESS,
                     help="output format (default: text)")
    p = argparse.ArgumentParser(prog="gq", description="Quotients of multigraded bundles by nilpotent group actions.")
    p.add_argument("--format", choices=("json", "text"), default=None, help="output format (default: text)")
    p.add_argument("--version", action="version", version=f"gq {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    for name, helptext in (("check", "closure, quotient condition and its weak form"),
                           ("saturate", "replace h by P(E)·h ∩ g when the weak condition holds"),
                           ("quotient", "quotient in stages")):
        sp = sub.add_parser(name, parents=[fmt], help=helptext)
        sp.add_argument("file")

    sp = sub.add_parser("dvb", parents=[fmt], help="double vector bundle subalgebra: criterion, quotient, decomposition check")
    sp.add_argument("file")
    sp.add_argument("--no-pike", action="store_true", help="skip the iterated-quotient comparison")

    for name, sets, helptext in (("dnb", ("n1", "n2"), "double normal bundle of coordinate submanifolds"),
                                 ("wnb", ("i", "j"), "order-2 weighted normal bundle")):
        sp = sub.add_parser(name, parents=[fmt], help=helptext)
        sp.add_argument("file", nargs="?")
        sp.add_argument("--dim", type=int)
        for s in sets:
            sp.add_argument(f"--{s}", metavar="LIST", help="comma-separated coordinate indices")
        sp.add_argument("--twist", action="append", metavar="'uk -> poly'")
        sp.add_argument("--method", choices=("gr", "subquotient", "both"))
        sp.add_argument("--oracle", action="store_true", help="also run the brute-force invariant oracle")

    sp = sub.add_parser("verify", parents=[fmt], help="randomized property suites")
    sp.add_argument("--seed", type=int, required=True)
    sp.add_argument("--cases", type=int, help="cases per suite (twists per configuration for the normal-bundle suites)")
    sp.add_argument("--suite", action="append", help="run only this suite (repeatable)")
    sp.add_argument("--max-m", type=int, help="largest chart dimension for the normal-bundle suites")
    sp.add_argument("--twist-scope", choices=("all", "class"), default="all",
                    help="double-normal twists per configuration (all) or per symmetry class")
    return p


COMMANDS = {"check": cmd_check, "saturate": cmd_saturate, "quotient": cmd_quotient, "dvb": cmd_dvb,
            "dnb": cmd_dnb, "wnb": cmd_wnb, "verify": cmd_verify}


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:  # argparse reports usage errors with exit status 2
        return int(exc.code or 0)
    fmt = args.format or "text"
    if args.command == "dnb":
        args.i1, args.i2 = args.n1, args.n2
    try:
        report = COMMANDS[args.command](args)
        code = report.exit_code
    except ConditionFailed as exc:
        report = Report(args.command, validation={"error": {"type": "condition", "message": str(exc)}})
        code = EXIT_FAIL
    except (ParseError, UsageError) as exc:
        report = Report(args.command, validation={"error": {"type": "usage", "message": str(exc)}})
        code = EXIT_USAGE
    except InternalInvariantError as exc:
        report = Report(args.command, validation={"error": {"type": "internal", "message": str(exc)}})
        code = EXIT_INTERNAL
    except Exception as exc:  # anything unexpected is an internal failure, never a silent pass
        report = Report(args.command, validation={"error": {"type": "internal",
                                                            "message": f"{type(exc).__name__}: {exc}"}})
        code = EXIT_INTERNAL
    try:
        emit(report, fmt)
    except UsageError as exc:  # bad GQ_COLOR
        sys.stderr.write(f"gq: {exc}\n")
        return EXIT_USAGE
    if code == EXIT_USAGE and fmt == "text":
        sys.stderr.write(f"gq: {report.validation['error']['message']}\n")
    return code


def entry() -> None:
    sys.exit(main())


if __name__ == "__main__":
    entry()
