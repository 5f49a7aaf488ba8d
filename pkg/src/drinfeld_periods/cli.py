"""Command line interface.

    drinfeld-periods [--config cfg.json] periods
    drinfeld-periods third-kind --alpha 1,1 --omega 1
    drinfeld-periods verify --suite all
    drinfeld-periods dump exp --terms 6

Machine output is deterministic JSON on stdout (sorted keys, exact
rationals as strings, infinite valuations as "inf"); a human-readable table
goes to stderr.  Exit status is 0 iff every requested check passes; errors
produce a JSON error report and status 2.
"""

from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction

from .anderson import agf_build, omega_build
from .cinf import INF, PuiseuxApprox
from .config import SUITES, Session, load_config
from .errors import DrinfeldError, ValidationError

__all__ = ["main", "build_parser", "run", "to_jsonable"]

STREAMS = ("exp", "log", "ftau", "gdelta", "omega", "agf")


def to_jsonable(obj):
    """Convert results to plain JSON values, deterministically."""
    if isinstance(obj, PuiseuxApprox):
        return obj.to_json()
    if isinstance(obj, Fraction):
        return str(obj)
    if isinstance(obj, float) and obj == INF:
        return "inf"
    if isinstance(obj, dict):
        return {str(k): to_jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [to_jsonable(v) for v in obj]
    if hasattr(obj, "to_list"):
        return obj.to_list()
    if hasattr(obj, "to_json"):
        return obj.to_json()
    return obj


def dumps(obj) -> str:
    return json.dumps(to_jsonable(obj), sort_keys=True, separators=(",", ":"))


def _parse_poly(text: str):
    text = text.strip()
    if text.startswith("["):
        val = json.loads(text)
    else:
        val = [int(c) for c in text.split(",") if c.strip()]
    if not isinstance(val, list) or not val:
        raise ValidationError("polynomial must be a nonempty coefficient list", field="alpha")
    return val


def build_parser():
    ap = argparse.ArgumentParser(prog="drinfeld-periods",
                                 description="Certified periods of rank-2 Drinfeld modules.")
    ap.add_argument("--config", help="JSON session configuration (defaults when omitted)")
    ap.add_argument("--quiet", action="store_true", help="suppress the table on stderr")
    # also accepted after the subcommand
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--quiet", action="store_true", default=argparse.SUPPRESS, help=argparse.SUPPRESS)
    sub = ap.add_subparsers(dest="command", required=True)
    sub.add_parser("periods", parents=[common], help="period lattice, quasi-periods, pi~ and xi")
    tk = sub.add_parser("third-kind", parents=[common], help="lambda_0 for delta_t = alpha tau")
    tk.add_argument("--alpha", required=True, help="coefficients of alpha in theta, low degree first")
    tk.add_argument("--omega", type=int, choices=(1, 2), default=1)
    tk.add_argument("--branch", type=int, default=0, help="logarithm branch (0 = principal)")
    vf = sub.add_parser("verify", parents=[common], help="run a verification suite")
    vf.add_argument("--suite", choices=SUITES, default="all")
    dp = sub.add_parser("dump", parents=[common], help="coefficients of a stream")
    dp.add_argument("stream", choices=STREAMS)
    dp.add_argument("--terms", type=int, default=6)
    dp.add_argument("--deg", type=int, default=None, help="t-degree cap for omega/agf (default D)")
    dp.add_argument("--u", default="0", help="agf argument as a polynomial in theta")
    dp.add_argument("--alpha", default=None, help="gdelta alpha (default: first configured alpha)")
    return ap


def _lattice_json(lat):
    out = {
        "omega1": lat.omega1,
        "omega2": lat.omega2,
        "Ftau_omega1": lat.ftau1,
        "Ftau_omega2": lat.ftau2,
        "pi_tilde": lat.pi_tilde,
        "xi": lat.xi.lc(),
        "legendre_residual_valuation": lat.legendre_residual().residual_valuation(),
    }
    meta = {
        "torsion_root_indices": [t.root_index for t in lat.towers],
        "tower_valuations": [[x.val() for x in t.levels] for t in lat.towers],
        "order": "poly_roots order: valuation, then leading-coefficient tuple",
    }
    base = lat if lat.twist is None else lat.twist.nu_lattice
    meta["xi_candidates"] = base.meta["xi_candidates"]
    if lat.twist is not None:
        meta["twist"] = {"eps": lat.twist.eps, "candidate_index": lat.twist.candidate_index,
                         "candidates": lat.meta["twist_candidates"]}
    out["branch_metadata"] = meta
    return out


def run(command: str, S: Session, args) -> tuple[dict, bool]:
    cfg = S.cfg
    if command == "periods":
        return {"config": cfg.to_dict(), **_lattice_json(S.lattice)}, True
    if command == "third-kind":
        from .periods import verify_third_kind
        alpha = _parse_poly(args.alpha)
        from .config import _check_poly
        _check_poly(cfg, "alpha", alpha)
        lat = S.lattice
        r = verify_third_kind(lat, S.poly(alpha), lat.periods[args.omega - 1], branch=args.branch)
        ok = r["residual_valuation"] >= S.ctx.threshold
        rep = {"config": cfg.to_dict(), "alpha": alpha, "omega": args.omega, "branch": args.branch,
               "lambda0": r["lambda0"], "u": r["u"], "residual_valuation": r["residual_valuation"],
               "threshold": S.ctx.threshold, "pass": ok, "coordinates": r["coordinates"]}
        return rep, ok
    if command == "verify":
        from .checks import run_suite
        checks = run_suite(S, args.suite)
        ok = all(c["pass"] for c in checks)
        return {"config": cfg.to_dict(), "suite": args.suite, "checks": checks, "pass": ok}, ok
    if command == "dump":
        return _dump(S, args), True
    raise ValidationError(f"unknown command {command!r}", field="command")  # pragma: no cover


def _dump(S: Session, args):
    M = S.module
    n = args.terms
    if n < 1:
        raise ValidationError("--terms must be positive", field="terms")
    deg = S.cfg.D if args.deg is None else args.deg
    out = {"config": S.cfg.to_dict(), "stream": args.stream, "terms": n}
    if args.stream in ("exp", "log", "ftau"):
        st = getattr(M, args.stream)
        out["coefficients"] = [{"i": i, "valuation": st.vbound(i) if st.vbound(i) == INF
                                else Fraction(st.vbound(i), S.ctx.m), "value": st.coeff(i)} for i in range(n)]
    elif args.stream == "gdelta":
        a = _parse_poly(args.alpha) if args.alpha else S.cfg.alphas[0]
        st = M.gdelta(S.poly(a))
        out["alpha"] = a
        out["coefficients"] = [{"i": i, "value": st.coeff(i)} for i in range(n)]
    elif args.stream == "omega":
        Om = omega_build(S.ctx, deg, S.cfg.I)
        out["coefficients"] = [{"k": k, "value": Om.coeff(k)} for k in range(min(n, deg + 1))]
    else:
        u = S.poly(_parse_poly(args.u))
        agf, ser = agf_build(M, u, None, deg)
        out["u"] = _parse_poly(args.u)
        out["rational_terms"] = {str(i): r for i, r in sorted(agf.terms.items())}
        out["coefficients"] = [{"k": k, "value": ser.coeff(k)} for k in range(min(n, deg + 1))]
    return out


def _table(report: dict) -> str:
    lines = []
    if "checks" in report:
        w = max((len(c["name"]) for c in report["checks"]), default=4)
        lines.append(f"{'check':<{w}}  {'residual':>10}  {'threshold':>9}  result")
        for c in report["checks"]:
            rv = c["residual_valuation"]
            th = c["threshold"]
            lines.append(f"{c['name']:<{w}}  {str(rv) if rv is not None else '-':>10}  "
                         f"{str(th) if th is not None else '-':>9}  {'PASS' if c['pass'] else 'FAIL'}")
        lines.append(f"overall: {'PASS' if report['pass'] else 'FAIL'}")
    else:
        for k in sorted(report):
            if k == "config":
                continue
            v = report[k]
            if isinstance(v, PuiseuxApprox):
                v = repr(v)
            elif isinstance(v, (dict, list)):
                v = "..."
            lines.append(f"{k}: {v}")
    return "\n".join(lines)


def main(argv=None) -> int:
    ap = build_parser()
    args = ap.parse_args(argv)
    try:
        cfg = load_config(args.config)
        suite = args.suite if args.command == "verify" else None
        S = Session(cfg, suite)
        report, ok = run(args.command, S, args)
    except DrinfeldError as exc:
        sys.stdout.write(dumps({"command": args.command, **exc.payload}) + "\n")
        if not args.quiet:
            sys.stderr.write(f"error: {exc}\n")
        return 2
    except (OSError, json.JSONDecodeError, TypeError) as exc:
        sys.stdout.write(dumps({"command": args.command, "error": type(exc).__name__, "message": str(exc)}) + "\n")
        if not args.quiet:
            sys.stderr.write(f"error: {exc}\n")
        return 2
    sys.stdout.write(dumps(report) + "\n")
    if not args.quiet:
        sys.stderr.write(_table(report) + "\n")
    return 0 if ok else 1


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
