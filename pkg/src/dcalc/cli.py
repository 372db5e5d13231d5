"""Command-line front end: ``dcalc <subcommand> DOC [flags]``.

Exit codes: 0 success, 1 input or schema error, 2 budget or truncation
insufficient, 3 internal invariant violated, 4 a requested property check
came out false.
"""
from __future__ import annotations

import argparse
import json
import sys
import traceback
from fractions import Fraction

from .algpres import FinAlgebra, MultSet, PolyAlgebra, QuotPres
from .docs import DocError, load_algebra, load_tensor
from .exactcore import BudgetError, ExactError, InvariantError, MPoly, RatExpr, get_budget, parse_expr

EXIT_OK, EXIT_INPUT, EXIT_BUDGET, EXIT_INVARIANT, EXIT_CHECK = 0, 1, 2, 3, 4

LIFT = "x^a xi^b -> x^a d^b (coefficients left); d^[a] = d^a / a! in positive characteristic"
EXTERIOR = "alternating: x∧x = 0 is imposed, not only x∧y = -y∧x"


class CheckFailed(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        sys.stderr.write(f"{self.prog}: error: {message}\n")
        sys.exit(EXIT_INPUT)


def _jsonable(x):
    if isinstance(x, Fraction):
        return str(x)
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    if isinstance(x, dict):
        return {str(k): _jsonable(v) for k, v in x.items()}
    if isinstance(x, (MPoly, RatExpr)):
        return repr(x)
    if isinstance(x, (bool, int, float, str)) or x is None:
        return x
    if hasattr(x, "to_json"):
        return _jsonable(x.to_json())
    return repr(x)


def _conventions(truncation=None) -> dict:
    from .riemann import CONVENTIONS, default_calibration
    cal = default_calibration()
    return {"truncation_degree": truncation, "exterior_power": EXTERIOR, "operator_lift": LIFT,
            "levi_civita": CONVENTIONS["levi_civita"], "curvature": CONVENTIONS["curvature"],
            "antisymmetrization": CONVENTIONS["antisymmetrization"],
            "antisymmetrization_calibration": cal.to_json()}


# ---------------------------------------------------------------------------
# flag parsing helpers

def _ints(text, name):
    try:
        return [int(t) for t in text.split(",") if t.strip()]
    except ValueError:
        raise DocError(f"--{name} expects comma-separated integers", f"--{name}") from None


def _poly_algebra(L):
    A = L.algebra
    if isinstance(A, QuotPres):
        A = A.base
    if not isinstance(A, PolyAlgebra):
        raise DocError("this subcommand needs a polynomial document", "/kind")
    return A


def parse_operator(A: PolyAlgebra, text: str):
    """'a1,..,an:coeff; ...' with plain powers d^a (converted to divided powers)."""
    from .diffop import NFOperator
    terms = {}
    for part in text.split(";"):
        if not part.strip():
            continue
        if ":" not in part:
            raise DocError(f"operator term {part!r} needs 'exponents:coefficient'", "--operator")
        exps, coeff = part.split(":", 1)
        alpha = tuple(_ints(exps, "operator"))
        if len(alpha) != A.nvars:
            raise DocError(f"exponent {alpha} must have {A.nvars} entries", "--operator")
        c = parse_expr(coeff, A.vars, A.F)
        if not c.den.is_const():
            raise DocError("operator coefficients must be polynomials", "--operator")
        c = c.num * A.F.inv(c.den.const_term())
        terms[alpha] = terms[alpha] + c if alpha in terms else c
    return NFOperator.from_weyl(A, terms)


def _poly_list(A, text, name):
    out = []
    for t in text.split(","):
        r = parse_expr(t, A.vars, A.F)
        if not r.den.is_const():
            raise DocError(f"--{name} entries must be polynomials", f"--{name}")
        out.append(r.num * A.F.inv(r.den.const_term()))
    return out


# ---------------------------------------------------------------------------
# handlers: each returns (results, status)

def cmd_spectrum(L, a):
    from .spectrum import enumerate_spectrum
    pts = enumerate_spectrum(L.algebra, a.budget)
    return {"points": [h.to_json() for h in pts], "n_points": len(pts)}, "ok"


def _point(L, a):
    from .spectrum import check_point
    if a.point is None:
        raise DocError("--point is required", "--point")
    vals = [Fraction(v) for v in a.point.split(",")]
    A = L.algebra
    h = check_point(A, vals)
    if h is None:
        raise DocError(f"{a.point} is not a k-point", "--point")
    return h


def cmd_tangent(L, a):
    from .spectrum import tangent_space
    h = _point(L, a)
    T = tangent_space(L.algebra, h)
    A = L.algebra
    if isinstance(A, (PolyAlgebra, QuotPres)):
        basis = [{v: str(c) for v, c in zip(A.vars, xi.values)} for xi in T]
    else:
        basis = [[str(c) for c in xi.values] for xi in T]
    return {"point": h.to_json(), "dim": len(T), "basis": basis}, "ok"


def cmd_ghosts(L, a):
    from .spectrum import ghosts, module_ghosts
    res = {"algebra": ghosts(L.algebra).to_json()}
    if L.doc.get("module"):
        res["module"] = module_ghosts(L.module()).to_json()
    return res, "ok"


def cmd_flow(L, a):
    from .spectrum import enumerate_spectrum, induced_map, nilpotent_flow
    A = _poly_algebra(L)
    if a.vector is None:
        raise DocError("--vector gives the images X(x_i), comma separated", "--vector")
    X = _poly_list(A, a.vector, "vector")
    if len(X) != A.nvars:
        raise DocError(f"--vector needs {A.nvars} entries", "--vector")
    t = Fraction(a.t)
    fl = nilpotent_flow(A, X, t)
    res = {"t": str(t), "nilpotency": fl.nilpotency, "method": fl.method,
           "images": [repr(p) for p in fl.endo.images], "naive_series_is_hom": fl.naive_is_hom,
           "naive_witness": fl.naive_witness}
    if A.F.p is not None:
        pts = enumerate_spectrum(A, a.budget)
        f = induced_map(fl.endo)
        res["induced_map"] = [[h.to_json(), f(h).to_json()] for h in pts]
    return res, "ok"


def cmd_diff(L, a):
    from .diffop import DiffSpace, nf_diff_space
    k = a.order if a.order is not None else 1
    A = L.algebra
    if isinstance(A, PolyAlgebra):
        gens = nf_diff_space(A, k)
        return {"order": k, "free_generators": [repr(g) for g in gens], "rank": len(gens)}, "ok"
    P = L.module()
    dims = [DiffSpace(P, P, j, "recursive").dim for j in range(k + 1)]
    S = DiffSpace(P, P, k, "recursive")
    res = {"order": k, "dims": dims, "dim": S.dim, "basis": [[str(x) for x in v] for v in S.vectors]}
    status = "ok"
    if len(set(dims)) == 1 and L.fin().dim == P.dim:
        status = "ok: Diff_k = Diff_0 for every computed k (Boolean triviality)"
    return res, status


def cmd_localize(L, a):
    from .diffop import localize_op
    A = _poly_algebra(L)
    if a.operator is None or a.fraction is None:
        raise DocError("--operator and --fraction are required", "--operator")
    op = parse_operator(A, a.operator)
    fr = parse_expr(a.fraction, A.vars, A.F)
    gens = _poly_list(A, a.denominators, "denominators") if a.denominators else [fr.den]
    S = MultSet(A, gens)
    k = op.order if a.order is None else a.order
    val = localize_op(op, S, k)(RatExpr(fr.num, fr.den, reduce=False))
    alt = localize_op(op, S, k + 1)(RatExpr(fr.num, fr.den, reduce=False))
    res = {"operator": repr(op), "fraction": repr(fr), "certificate": k, "value": repr(val),
           "value_with_certificate_k_plus_1": repr(alt), "certificates_agree": val == alt}
    if A.F.p is None:
        oracle = op.apply_rational(fr)
        res["quotient_rule"] = repr(oracle)
        res["agree"] = val == oracle
        if not res["agree"]:
            raise CheckFailed(res)
    return res, "ok"


def cmd_symbol(L, a):
    from .symbols import symbol
    A = _poly_algebra(L)
    if a.operator is None:
        raise DocError("--operator is required", "--operator")
    op = parse_operator(A, a.operator)
    s = symbol(op, a.order)
    res = {"operator": repr(op), "order": s.degree if a.order is None else a.order, "symbol": repr(s)}
    if A.F.p is None:
        res["plain"] = repr(s.to_plain())
    return res, "ok"


def cmd_poisson(L, a):
    from .symbols import canonical_bracket, poisson, symbol
    A = _poly_algebra(L)
    if a.operator is None or a.operator2 is None:
        raise DocError("--operator and --operator2 are required", "--operator")
    s, t = symbol(parse_operator(A, a.operator)), symbol(parse_operator(A, a.operator2))
    b = poisson(s, t)
    res = {"s": repr(s), "t": repr(t), "bracket": repr(b)}
    if A.F.p is None:
        can = canonical_bracket(s.to_plain(), t.to_plain(), A)
        res["canonical"] = repr(can)
        res["agree"] = b.to_plain() == can
        if not res["agree"]:
            raise CheckFailed(res)
    return res, "ok"


def cmd_thm_ham(L, a):
    from .gallery import SEED, poisson_canonical, pullback_identity
    seed = a.seed if a.seed is not None else SEED
    trials = a.trials or 20
    r1 = poisson_canonical(trials, seed)
    r2 = pullback_identity(trials, seed)
    res = {"seed": seed, "poisson_equals_canonical": r1, "pullback_identity": r2}
    if not (r1["passed"] and r2["passed"]):
        raise CheckFailed(res)
    return res, "ok"


def cmd_dfunctor(L, a):
    from .dfunctors import frak_derivations, multi_derivations, splitting_check
    A, P = L.fin(), L.module()
    sig = _ints(a.signature, "signature") if a.signature else [1]
    T, Tf = multi_derivations(A, P, sig), frak_derivations(A, P, sig)
    res = {"signature": sig, "dim_D": T.dim, "dim_frakD": Tf.dim,
           "D_basis": [[str(x) for x in v] for v in T.vectors]}
    if a.order is not None:
        res["splitting"] = splitting_check(A, P, a.order)
        if not res["splitting"]["additive"]:
            raise CheckFailed(res)
    return res, "ok"


def _complex_json(c) -> dict:
    return {"dims": c.dims, "dd_zero": c.is_complex(), "homology": c.homology_dims(),
            "labels": getattr(c, "labels", None)}


def cmd_spencer(L, a):
    from .dfunctors import spencer_complex
    n = a.order if a.order is not None else 1
    r = spencer_complex(L.fin(), L.module(), n, a.budget)
    return {"n": n, "complex": _complex_json(r["complex"])}, "ok"


def cmd_jet(L, a):
    from .jetsforms import JetModule, jet_duality_check
    k = a.order if a.order is not None else 1
    A, P = L.fin(), L.module()
    J = JetModule(A, P, k)
    d = jet_duality_check(A, P, P, k)
    res = {"k": k, "dim_jet": J.dim, "duality": d}
    if not (d["dims_equal"] and d["universal"]):
        raise CheckFailed(res)
    return res, "ok"


def cmd_forms(L, a):
    from .jetsforms import forms_checks, kahler_forms
    top = a.degree if a.degree is not None else 2
    f = kahler_forms(L.fin(), top, a.budget)
    checks = forms_checks(f)
    res = {"top": top, "dims": f.dims, "checks": checks}
    if not all(v for k, v in checks.items() if k != "convention"):
        raise CheckFailed(res)
    return res, "ok"


def cmd_derham(L, a):
    from .jetsforms import de_rham_complex
    top = a.degree if a.degree is not None else 2
    return {"complex": _complex_json(de_rham_complex(L.fin(), top))}, "ok"


def cmd_jet_spencer(L, a):
    from .jetsforms import jet_spencer_complex
    n = a.order if a.order is not None else 1
    return {"n": n, "complex": _complex_json(jet_spencer_complex(L.fin(), n)["complex"])}, "ok"


def cmd_berezinian(L, a):
    from .jetsforms import adjoint_module
    B = adjoint_module(L.fin(), L.module(), a.degree)
    res = B.to_json()
    res["dd_zero"] = B.complex.is_complex()
    return res, "ok"


def cmd_graded_diff(L, a):
    from .graded import graded_diff_space
    G = L.graded()
    k = a.order if a.order is not None else 1
    S = graded_diff_space(G, k=k, derivations=a.derivations)
    return {"order": k, "derivations_only": a.derivations, "dim": S.dim,
            "degree_dims": {str(h): d for h, d in sorted(S.degree_dims().items(), key=lambda t: str(t[0]))},
            "vector_degrees": [str(h) for h in S.vector_degrees],
            "basis": [[str(x) for x in v] for v in S.vectors]}, "ok"


def _algebroid(L):
    from .graded import AlgebroidData, tautological_algebroid
    from .docs import _conv
    entry = L.doc.get("algebroid")
    if entry is None:
        raise DocError("document needs an 'algebroid' entry", "/algebroid")
    A = L.fin()
    if entry.get("tautological"):
        return tautological_algebroid(A)
    if "bracket" not in entry or "anchor" not in entry:
        raise DocError("algebroid needs bracket and anchor (or tautological: true)", "/algebroid")
    return AlgebroidData(A, L.module(), _conv(entry["bracket"]), _conv(entry["anchor"]))


def cmd_algebroid(L, a):
    from .graded import algebroid_check
    r = algebroid_check(_algebroid(L))
    if not r["ok"]:
        raise CheckFailed(r)
    return r, "ok"


def cmd_diole(L, a):
    from .docs import _conv
    from .graded import algebroid_to_diole_bracket, diole_poisson_check, make_diole
    entry = L.doc.get("diole_bracket")
    if entry is not None:
        D = make_diole(L.fin(), L.module())
        table, degree = _conv(entry["table"]), entry["degree"]
        if len(table) != D.dim:
            raise DocError(f"bracket table must be {D.dim}-dimensional", "/diole_bracket/table")
    else:
        data = _algebroid(L)
        D = make_diole(data.A, data.P)
        table, degree = algebroid_to_diole_bracket(data), -1
    r = diole_poisson_check(D, table, degree)
    if not r["ok"]:
        raise CheckFailed(r)
    return r, "ok"


def cmd_connection(L, a):
    from .docs import _conv
    from .graded import ConnectionData, _diff1, connection_check, trivial_connection
    entry = L.doc.get("connection") or {"trivial": True}
    A = L.fin()
    if entry.get("trivial", False) and "kappa" not in entry:
        data = trivial_connection(A)
    elif "kappa" in entry:
        data = ConnectionData(A, L.module(), _conv(entry["kappa"]), _diff1(A))
    else:
        raise DocError("connection needs kappa or trivial: true", "/connection")
    right = entry.get("right", False) if a.side is None else a.side == "right"
    r = connection_check(data, right)
    if not r["ok"]:
        raise CheckFailed(r)
    return r, "ok"


def cmd_levicivita(T, a):
    from .riemann import christoffel_data
    f = christoffel_data(T)
    res = f.to_json()
    res["metric_compatible"] = f.metric_compatibility() if all(
        (T.tau[i][j] - T.tau[j][i]).is_zero() for i in range(T.n) for j in range(T.n)) else None
    return res, "ok"


def cmd_curvature(T, a):
    from .riemann import christoffel_data, curvature
    c = curvature(christoffel_data(T))
    n = T.n
    R = {f"{al + 1},{i + 1},{j + 1},{k + 1}": repr(c.R[al][i][j][k].to_rat())
         for al in range(n) for i in range(n) for j in range(n) for k in range(n) if not c.R[al][i][j][k].is_zero()}
    ratio = c.ricci_ratio_to_metric()
    return {"R": R, "ricci": [[repr(x) for x in r] for r in c.ricci_rat()], "scalar": repr(c.scalar()),
            "flat": c.is_flat(), "antisymmetric": c.antisymmetric(), "bianchi": c.bianchi(),
            "ricci_over_metric": str(ratio) if ratio is not None else None}, "ok"


def cmd_ricci_tau(T, a):
    from .riemann import ricci_tau_residual
    r = ricci_tau_residual(T)
    if not r["decomposition_identity"]:
        raise CheckFailed(r)
    return r, "ok"


def cmd_gallery(_, a):
    from .gallery import run_gallery
    only = a.only.split(",") if a.only else None
    r = run_gallery(only)
    if not r["scenarios"]:
        raise DocError(f"--only {a.only} matches no scenario", "--only")
    failing = [k for k, v in r["scenarios"].items() if not v["passed"]]
    r["failing"] = failing
    if failing:
        raise CheckFailed(r)
    return r, "ok"


ALGEBRA_COMMANDS = {
    "spectrum": cmd_spectrum, "tangent": cmd_tangent, "ghosts": cmd_ghosts, "flow": cmd_flow,
    "diff": cmd_diff, "localize": cmd_localize, "symbol": cmd_symbol, "poisson": cmd_poisson,
    "dfunctor": cmd_dfunctor, "spencer": cmd_spencer, "jet": cmd_jet, "forms": cmd_forms,
    "derham": cmd_derham, "jet-spencer": cmd_jet_spencer, "berezinian": cmd_berezinian,
    "graded-diff": cmd_graded_diff, "diole": cmd_diole, "algebroid-check": cmd_algebroid,
    "connection-check": cmd_connection,
}
TENSOR_COMMANDS = {"levicivita": cmd_levicivita, "curvature": cmd_curvature, "ricci-tau": cmd_ricci_tau}
NODOC_COMMANDS = {"thm-ham-check": cmd_thm_ham, "gallery": cmd_gallery}


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="dcalc", description="Exact differential calculus over commutative algebras.")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)
    for name in list(ALGEBRA_COMMANDS) + list(TENSOR_COMMANDS) + list(NODOC_COMMANDS):
        s = sub.add_parser(name)
        if name in ALGEBRA_COMMANDS or name in TENSOR_COMMANDS:
            s.add_argument("doc", help="JSON document path or inline JSON")
        s.add_argument("--order", type=int)
        s.add_argument("--degree", type=int)
        s.add_argument("--signature")
        s.add_argument("--point")
        s.add_argument("--format", choices=["json", "text"], default="json")
        s.add_argument("--budget", type=int)
        s.add_argument("--seed", type=int)
        s.add_argument("--trials", type=int)
        s.add_argument("--operator", help="terms 'a1,..,an:coeff' separated by ';' (plain powers)")
        s.add_argument("--operator2")
        s.add_argument("--fraction")
        s.add_argument("--denominators")
        s.add_argument("--vector", help="images of the coordinates under a vector field")
        s.add_argument("--t", default="1")
        s.add_argument("--side", choices=["left", "right"])
        s.add_argument("--derivations", action="store_true")
        s.add_argument("--only")
    return p


def _render_text(report: dict) -> str:
    lines = [f"operation: {report['operation']}", f"status: {report['status']}", f"summary: {report['summary']}"]

    def walk(prefix, x):
        if isinstance(x, dict):
            for k in sorted(x):
                walk(f"{prefix}.{k}" if prefix else str(k), x[k])
        else:
            lines.append(f"{prefix} = {json.dumps(x, ensure_ascii=False)}")
    walk("results", report.get("results"))
    return "\n".join(lines)


def _summary(results) -> str:
    if not isinstance(results, dict):
        return ""
    keys = [k for k in ("dim", "dims", "n_points", "graded_dims", "ok", "all_passed") if k in results]
    return ", ".join(f"{k}={json.dumps(_jsonable(results[k]))}" for k in keys)


def run(argv=None) -> tuple:
    """(exit code, report dict)."""
    args = build_parser().parse_args(argv)
    if args.budget is not None:
        get_budget(args.budget)
    cmd = args.command
    report = {"operation": cmd, "input": None, "configuration": None, "results": None,
              "status": None, "summary": ""}
    flags = {k: v for k, v in sorted(vars(args).items()) if k not in ("doc", "command", "format") and v is not None
             and v is not False}
    code = EXIT_OK
    try:
        truncation = None
        if cmd in ALGEBRA_COMMANDS:
            L = load_algebra(args.doc)
            report["input"] = L.doc
            truncation = L.truncation
            results, status = ALGEBRA_COMMANDS[cmd](L, args)
        elif cmd in TENSOR_COMMANDS:
            T = load_tensor(args.doc)
            report["input"] = T.to_json()
            results, status = TENSOR_COMMANDS[cmd](T, args)
        else:
            results, status = NODOC_COMMANDS[cmd](None, args)
        report["results"], report["status"] = results, status
        report["configuration"] = {"flags": flags, "budget": get_budget(args.budget),
                                   "conventions": _conventions(truncation)}
    except CheckFailed as e:
        code = EXIT_CHECK
        report["results"], report["status"] = e.args[0], "check failed"
    except DocError as e:
        code = EXIT_INPUT
        report["status"], report["error"] = "input error", {"message": str(e), "path": e.path}
    except BudgetError as e:
        code = EXIT_BUDGET
        report["status"], report["error"] = "budget exceeded", {"message": str(e), "parameter": e.parameter}
    except InvariantError as e:
        code = EXIT_INVARIANT
        report["status"], report["error"] = "invariant violated", {"message": str(e), "witness": e.witness}
    except ExactError as e:
        code = EXIT_INPUT
        extra = {k: v for k, v in vars(e).items() if v is not None}
        report["status"], report["error"] = "input error", {"message": str(e), "path": None, **extra}
    except Exception as e:  # a bug by definition
        code = EXIT_INVARIANT
        report["status"] = "internal error"
        report["error"] = {"message": f"{type(e).__name__}: {e}",
                           "witness": traceback.format_exc().strip().splitlines()[-3:]}
    report["summary"] = _summary(report["results"])
    return code, _jsonable(report)


def main(argv=None) -> int:
    code, report = run(argv)
    fmt = "json"
    argv = sys.argv[1:] if argv is None else argv
    if "--format" in argv:
        i = argv.index("--format")
        fmt = argv[i + 1] if i + 1 < len(argv) else "json"
    elif any(a == "--format=text" for a in argv):
        fmt = "text"
    if fmt == "text":
        print(_render_text(report))
    else:
        print(json.dumps(report, sort_keys=True, indent=1, ensure_ascii=False))
    return code


if __name__ == "__main__":
    sys.exit(main())
