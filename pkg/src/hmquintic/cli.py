"""The hmq command-line front end.

Subcommands: count, trace-table, verify, census, cone, group-check,
euler-factor.  Every report carries provenance (epsilon and sqrt(5)
choices, policy, code version, backend) and exits with a distinct status
per failure family.
"""
from __future__ import annotations

import argparse
import json
import sys
import time
from typing import List, Optional

from . import __version__, backend, cohomology, counting, galois, hmq
from .ff import BadPrime, fifth_root_of_unity, legendre, sqrt_mod

EXIT_OK = 0
EXIT_GENERIC = 1
EXIT_BAD_PRIME = 2
EXIT_MISMATCH = 3
EXIT_ELIMINATION_GAP = 4
EXIT_AMBIGUOUS = 5
EXIT_MISSING_DATA = 6
EXIT_PROPERTY = 7

TABLE_PRIMES = (29, 31, 37, 43, 47, 59, 83)


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="hmq",
        description="Point counts, trace tables, node census, and the "
                    "modularity certificate for the resolved quintic at "
                    "y = (2:-1:0:0:-1).")
    ap.add_argument("--version", action="version", version=__version__)
    sub = ap.add_subparsers(dest="command", required=True)

    def add_common(sp, prime=False, primes=False):
        if prime:
            sp.add_argument("--prime", type=int, required=True)
        if primes:
            sp.add_argument("--prime", type=int)
            sp.add_argument("--primes", type=str,
                            help="comma-separated prime list")
        sp.add_argument("--threads", type=int, default=None)
        sp.add_argument("--policy", default="naive",
                        choices=["paper", "naive", "naive_quadric"])
        sp.add_argument("--cache", dest="cache_dir", default=".hmq_cache")
        sp.add_argument("--format", dest="output_format", default="text",
                        choices=["text", "csv", "structured"])
        sp.add_argument("--out", dest="out", default=None)

    sp = sub.add_parser("count", help="count points on one variety")
    add_common(sp, prime=True)
    sp.add_argument("--variety", default="resolved",
                    choices=["xprime", "rank3", "e2", "resolved"])

    sp = sub.add_parser("trace-table", help="Frobenius trace rows")
    add_common(sp, primes=True)
    sp.add_argument("--h-override", dest="h_override", type=int, default=None)

    sp = sub.add_parser("verify", help="run the full isomorphism certificate")
    add_common(sp)
    sp.add_argument("--no-compute", dest="no_compute", action="store_true",
                    help="use cached counts only")

    sp = sub.add_parser("census", help="rational node census")
    add_common(sp, prime=True)

    sp = sub.add_parser("cone", help="tangent-cone classes per node orbit")
    add_common(sp, prime=True)

    sp = sub.add_parser("group-check", help="deviation group verification")
    add_common(sp)

    sp = sub.add_parser("euler-factor", help="local H^3 factor at good p")
    add_common(sp, prime=True)
    return ap


def provenance(p: Optional[int], policy: str) -> dict:
    prov = {"policy": policy, "version": __version__,
            "backend": backend.NAME, "epsilon": None, "sqrt5": None}
    if p is not None and p not in (2, 5, 11):
        eps = fifth_root_of_unity(p)
        prov["epsilon"] = eps.value if eps is not None else None
        if p != 2 and legendre(5, p) == 1:
            prov["sqrt5"] = sqrt_mod(5, p)
    return prov


# ------------------------------------------------------------------ handlers

def cmd_count(args) -> tuple:
    p = args.prime
    policy = counting.normalize_policy(args.policy)
    cache = counting.CountCache(args.cache_dir)
    if args.variety == "xprime":
        n = counting.count_xprime(p, threads=args.threads)
        cache.append("xprime", p, policy, n)
        outputs = {"n_xprime": n}
    elif args.variety == "rank3":
        pentagon, e2c, overlap = counting.count_rank3(p, threads=args.threads)
        total = pentagon + e2c - overlap
        cache.append("rank3", p, policy, total)
        outputs = {"pentagon_component": pentagon, "e2_component": e2c,
                   "overlap": overlap, "n_rank3": total}
    elif args.variety == "e2":
        ap_val = hmq.e2_point_count(p)
        cache.append("e2", p, policy, ap_val)
        outputs = {"a_p": ap_val}
    else:
        res = counting.resolved_count(p, policy=policy, threads=args.threads,
                                      cache_dir=args.cache_dir)
        outputs = {"n_xprime": res.n_xprime, "n_rank3": res.n_rank3,
                   "pentagon_component": res.pentagon_component,
                   "e2_component": res.e2_component, "overlap": res.overlap,
                   "n_nodes_defined": res.n_nodes_defined,
                   "n_rulings_split": res.n_rulings_split,
                   "resolved_count": res.resolved_count, "policy": res.policy}
    return EXIT_OK, outputs, None


def _parse_primes(args) -> List[int]:
    if getattr(args, "primes", None):
        return [int(tok) for tok in args.primes.split(",") if tok.strip()]
    if getattr(args, "prime", None):
        return [args.prime]
    raise ValueError("provide --prime or --primes")


def cmd_trace_table(args) -> tuple:
    primes = _parse_primes(args)
    policy = counting.normalize_policy(args.policy)
    rows = []
    for p in primes:
        rows.append(cohomology.trace_pipeline(
            p, h_override=args.h_override, policy=policy,
            threads=args.threads, cache_dir=args.cache_dir,
            require_form=False))
    outputs = {"rows": [
        {"p": r.p, "count": r.resolved_count, "h": r.h_used,
         "trH3": r.tr_h3, "apE2": r.a_p_e2, "trV": r.tr_v,
         "apF": r.a_p_f, "matched": r.matched} for r in rows]}
    code = EXIT_OK
    if any(r.p in TABLE_PRIMES and r.matched is False for r in rows):
        code = EXIT_MISMATCH
    return code, outputs, rows


def cmd_verify(args) -> tuple:
    policy = counting.normalize_policy(args.policy)
    rows = [cohomology.trace_pipeline(
        p, policy=policy, threads=args.threads, cache_dir=args.cache_dir,
        no_compute=args.no_compute, require_form=True)
        for p in TABLE_PRIMES]
    geometric = galois.geometric_trace_source(rows)
    form = galois.form_trace_source(TABLE_PRIMES)
    cert = galois.run_serre_schuett(geometric, form)
    out_path = args.out or "certificate.json"
    galois.write_certificate(cert, out_path)
    outputs = {"verdict": cert.verdict, "failing_step": cert.failing_step,
               "certificate_path": str(out_path)}
    code = EXIT_OK if cert.verdict == "isomorphic" else EXIT_MISMATCH
    return code, outputs, None


def cmd_census(args) -> tuple:
    records = hmq.singular_census(args.prime, threads=args.threads)
    per_class = {c: 0 for c in hmq.CLASS_ORDER}
    for rec in records:
        per_class[rec.orbit_class] += 1
    outputs = {"size": len(records), "per_class": per_class,
               "records": [
                   {"class": rec.orbit_class,
                    "x": list(rec.point.x.coords),
                    "z": list(rec.point.z.coords),
                    "cone_rank": rec.cone_rank,
                    "disc_class": rec.disc_class} for rec in records]}
    return EXIT_OK, outputs, records


def cmd_cone(args) -> tuple:
    p = args.prime
    records = hmq.singular_census(p, threads=args.threads)
    by_class = {}
    for rec in records:
        by_class.setdefault(rec.orbit_class, rec)
    outputs = {"legendre_5": legendre(5, p), "classes": {
        cls: {"cone_rank": rec.cone_rank, "disc_class": rec.disc_class}
        for cls, rec in sorted(by_class.items(),
                               key=lambda kv: hmq.CLASS_ORDER.index(kv[0]))}}
    return EXIT_OK, outputs, None


def cmd_group_check(args) -> tuple:
    report = galois.tilde_group_check()
    return EXIT_OK, report, None


def cmd_euler_factor(args) -> tuple:
    p = args.prime
    entry = cohomology.form_coefficient(p)
    if entry is None:
        raise cohomology.MissingFormCoefficient(f"no a_p(f) on file for p={p}")
    a_p_f = entry[0]
    a_p_e2 = hmq.e2_point_count(p)
    f1, f2 = cohomology.euler_factor_h3(p, a_p_f, a_p_e2)
    outputs = {"a_p_f": a_p_f, "a_p_e2": a_p_e2,
               "factor_f": list(f1), "factor_g": list(f2),
               "factor_f_str": cohomology.format_factor(f1),
               "factor_g_str": cohomology.format_factor(f2),
               "product": list(
                   cohomology.euler_product_coefficients(p, a_p_f, a_p_e2))}
    return EXIT_OK, outputs, None


HANDLERS = {
    "count": cmd_count,
    "trace-table": cmd_trace_table,
    "verify": cmd_verify,
    "census": cmd_census,
    "cone": cmd_cone,
    "group-check": cmd_group_check,
    "euler-factor": cmd_euler_factor,
}


# ----------------------------------------------------------------- rendering

def _fmt_value(v) -> str:
    if isinstance(v, (dict, list)):
        return json.dumps(v)
    return str(v)


def render_text(report: dict) -> str:
    lines = [f"command: {report['command']}"]
    for k, v in report["inputs"].items():
        lines.append(f"  {k}: {_fmt_value(v)}")
    outputs = report["outputs"]
    if "rows" in outputs:
        header = cohomology.TABLE_COLUMNS
        widths = [max(len(h), 8) for h in header]
        lines.append("  " + "  ".join(h.rjust(w) for h, w in
                                      zip(header, widths)))
        for row in outputs["rows"]:
            cells = [row["p"], row["count"], row["h"], row["trH3"],
                     row["apE2"], row["trV"],
                     "n/a" if row["apF"] is None else row["apF"],
                     "n/a" if row["matched"] is None else
                     ("true" if row["matched"] else "false")]
            lines.append("  " + "  ".join(str(c).rjust(w) for c, w in
                                          zip(cells, widths)))
    elif "records" in outputs:
        lines.append(f"  nodes: {outputs['size']}")
        lines.append(f"  per_class: {_fmt_value(outputs['per_class'])}")
        for rec in outputs["records"]:
            lines.append(
                f"  {rec['class']:>9}  x={tuple(rec['x'])}  "
                f"z={tuple(rec['z'])}  cone_rank={rec['cone_rank']}  "
                f"disc={rec['disc_class']}")
    else:
        for k, v in outputs.items():
            lines.append(f"  {k}: {_fmt_value(v)}")
    prov = report["provenance"]
    lines.append("  provenance: " + json.dumps(prov))
    lines.append(f"  seconds: {report['timing']['seconds']:.3f}")
    return "\n".join(lines) + "\n"


def render_csv(report: dict, rows_obj) -> str:
    outputs = report["outputs"]
    if rows_obj is not None and "rows" in outputs:
        return cohomology.table_csv(rows_obj)
    if rows_obj is not None and "records" in outputs:
        lines = ["class,x,z,cone_rank,disc_class"]
        for rec in outputs["records"]:
            x = " ".join(map(str, rec["x"]))
            z = " ".join(map(str, rec["z"]))
            lines.append(f"{rec['class']},{x},{z},{rec['cone_rank']},"
                         f"{rec['disc_class']}")
        return "\n".join(lines) + "\n"
    lines = ["key,value"]
    for k, v in outputs.items():
        lines.append(f"{k},{json.dumps(v) if isinstance(v, (dict, list)) else v}")
    return "\n".join(lines) + "\n"


def emit(report: dict, rows_obj, fmt: str, out_path: Optional[str]) -> None:
    if fmt == "text":
        payload = render_text(report)
    elif fmt == "csv":
        payload = render_csv(report, rows_obj)
    else:
        payload = json.dumps(report, indent=2, default=str) + "\n"
    sys.stdout.write(payload)
    if out_path and report["command"] != "verify":
        with open(out_path, "w", encoding="utf-8") as fh:
            fh.write(payload)


# --------------------------------------------------------------------- main

def main(argv: Optional[List[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    handler = HANDLERS[args.command]
    inputs = {k: v for k, v in vars(args).items()
              if k not in ("command",) and v is not None}
    p = getattr(args, "prime", None)
    try:
        start = time.perf_counter()
        code, outputs, rows_obj = handler(args)
        elapsed = time.perf_counter() - start
        report = {
            "command": args.command,
            "inputs": inputs,
            "outputs": outputs,
            "timing": {"seconds": elapsed},
            "provenance": provenance(
                p, counting.normalize_policy(args.policy)),
        }
        emit(report, rows_obj, args.output_format, args.out)
        return code
    except BadPrime as exc:
        print(f"error: bad prime: {exc}", file=sys.stderr)
        return EXIT_BAD_PRIME
    except galois.EliminationGap as exc:
        print(f"error: elimination gap: {exc}", file=sys.stderr)
        return EXIT_ELIMINATION_GAP
    except (cohomology.NoSolution, cohomology.AmbiguousSolution) as exc:
        print(f"error: Betti/trace solver: {exc}", file=sys.stderr)
        return EXIT_AMBIGUOUS
    except (cohomology.MissingTrace,
            cohomology.MissingFormCoefficient) as exc:
        print(f"error: missing data: {exc}", file=sys.stderr)
        return EXIT_MISSING_DATA
    except (galois.PropertyFailure, galois.NoField, galois.MultipleFields,
            hmq.UnclassifiedSingular, hmq.DegenerateCone,
            counting.CensusMismatch, counting.ComponentMismatch) as exc:
        print(f"error: property failure: {exc}", file=sys.stderr)
        return EXIT_PROPERTY
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_GENERIC


if __name__ == "__main__":
    sys.exit(main())
