"""Command-line surface.

Subcommands: lattice | module | free | stablefree | cohomology | classify
| compare | search | catalog.  Catalog names are accepted anywhere a FILE
is expected.  Exit codes: 0 success, 1 usage or parse error, 2 a verdict
stayed undecided under the budget, 3 internal invariant breach (a bug).
"""

from __future__ import annotations

import argparse
import os
import sys

from . import report
from .arrangement import ArrangementError, catalog, catalog_names, resolve_arrangement
from .classify import ClassifyOptions, classify
from .fields import FieldError, parse_field
from .groebner import BudgetExceeded
from .lattice import intersection_lattice, lattices_isomorphic
from .resolution import InvariantError

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_UNDECIDED = 2
EXIT_INTERNAL = 3


def _build_parser():
    p = argparse.ArgumentParser(
        prog="logfree",
        description="logarithmic vector fields of hyperplane arrangements: "
        "freeness, stable freeness, lattice invariants",
    )
    p.add_argument("--json", action="store_true", help="machine output (logfree-report/1)")
    p.add_argument("--field", default=None, help="override field: Q or F<p>")
    p.add_argument("--budget", type=int, default=None, help="reduction-step cap")
    p.add_argument("--cache", default=None, help="cache directory (search only)")
    p.add_argument("--timings", action="store_true", help="include timings in output")
    sub = p.add_subparsers(dest="command", required=True)

    for name, hlp in [
        ("lattice", "intersection lattice and combinatorial invariants"),
        ("module", "generators and Betti data of the log module"),
        ("free", "freeness verdict with exponents and Saito certificate"),
        ("stablefree", "stable freeness (Coanda criterion)"),
        ("classify", "full dossier"),
    ]:
        q = sub.add_parser(name, help=hlp)
        q.add_argument("file", help="arrangement file or catalog name")

    q = sub.add_parser("cohomology", help="dimension table of intermediate cohomology")
    q.add_argument("file")
    q.add_argument("--window", nargs=2, type=int, metavar=("A", "B"), default=None)

    q = sub.add_parser("compare", help="lattice isomorphism plus property comparison")
    q.add_argument("file1")
    q.add_argument("file2")

    q = sub.add_parser("search", help="enumerate, group by lattice class, test invariance")
    q.add_argument("--n", type=int, required=True)
    q.add_argument("--k", type=int, required=True)
    q.add_argument("--property", dest="prop", default="free",
                   choices=["free", "stablyfree"])
    q.add_argument("--pool", default=None,
                   help="rational coefficient pool, e.g. '-2..2' (default: use --field Fp)")
    q.add_argument("--processes", type=int, default=None)
    q.add_argument("--cohomology", action="store_true",
                   help="attach cohomology tables per member (slow)")
    q.add_argument("--max", type=int, default=None, help="hard enumeration cap")
    q.add_argument("--essential", action="store_true", help="essential arrangements only")
    q.add_argument("--progress", action="store_true")

    sub.add_parser("catalog", help="list named arrangements")
    return p


def _field_of(args):
    return parse_field(args.field) if args.field else None


def _emit(args, doc: dict, human: str) -> None:
    if args.json:
        sys.stdout.write(report.to_machine(doc))
    else:
        sys.stdout.write(human)


def _dossier(args, path: str):
    A = resolve_arrangement(path, field=_field_of(args))
    opts = ClassifyOptions(
        mode="full",
        with_cohomology=True,
        budget=args.budget,
        with_timings=args.timings,
    )
    return A, classify(A, opts)


def _cmd_lattice(args) -> int:
    A = resolve_arrangement(args.file, field=_field_of(args))
    lat = intersection_lattice(A)
    doc = {
        "schema": report.SCHEMA,
        "kind": "lattice",
        "name": A.name,
        "field": A.field.name,
        "n": A.n,
        "k": A.k,
        "lattice": {
            "rank_counts": {str(r): c for r, c in sorted(lat.rank_counts().items())},
            "size": len(lat.flats),
            "complement_betti": lat.complement_betti_numbers(),
            "characteristic_polynomial": lat.characteristic_polynomial(),
            "whitney_numbers": {str(r): c for r, c in sorted(lat.whitney_numbers().items())},
            "canonical_hash": lat.canonical_hash(),
            "essential_rank": A.essential_rank(),
            "bottom_element_included": True,
        },
        "flat_list": [
            {"rank": F.rank, "atoms": sorted(F.atoms)} for F in lat.flats
        ],
    }
    _emit(args, doc, report.render_lattice(doc))
    return EXIT_OK


def _cmd_classify_like(args, want: str) -> int:
    A, dossier = _dossier(args, args.file)
    doc = report.dossier_to_dict(dossier)
    if want == "cohomology" and getattr(args, "window", None):
        opts = ClassifyOptions(mode="full", with_cohomology=True,
                               window=tuple(args.window), budget=args.budget)
        dossier = classify(A, opts)
        doc = report.dossier_to_dict(dossier)
    if want == "classify":
        human = report.render_dossier(doc)
    elif want == "module":
        human = report.render_dossier(doc)
    elif want == "free":
        line = "FREE, exponents {%s}" % ", ".join(map(str, dossier.exponents)) if (
            dossier.free
        ) else ("NOT FREE" if dossier.free is False else dossier.undecided_reason)
        human = "%s\ncertificate: %s\n" % (line, dossier.saito_certificate)
    elif want == "stablefree":
        if dossier.stably_free is None:
            line = dossier.undecided_reason
        else:
            line = "STABLY FREE" if dossier.stably_free else "NOT STABLY FREE"
        if dossier.stably_free_note:
            line += " [%s]" % dossier.stably_free_note
        human = line + "\n"
    elif want == "cohomology":
        human = "\n".join(report.render_cohomology(doc["cohomology"])) + "\n"
    else:
        raise AssertionError(want)
    _emit(args, doc, human)
    if dossier.undecided_reason:
        return EXIT_UNDECIDED
    return EXIT_OK


def _cmd_compare(args) -> int:
    A1 = resolve_arrangement(args.file1, field=_field_of(args))
    A2 = resolve_arrangement(args.file2, field=_field_of(args))
    L1 = intersection_lattice(A1)
    L2 = intersection_lattice(A2)
    iso = lattices_isomorphic(L1, L2)
    opts = ClassifyOptions(mode="full", with_cohomology=False, budget=args.budget)
    d1 = classify(A1, opts)
    d2 = classify(A2, opts)
    doc = {
        "schema": report.SCHEMA,
        "kind": "compare",
        "first": {"name": A1.name or args.file1, "lattice_hash": d1.lattice_hash},
        "second": {"name": A2.name or args.file2, "lattice_hash": d2.lattice_hash},
        "isomorphic": iso.isomorphic,
        "atom_map": list(iso.atom_map) if iso.atom_map else None,
        "certificate": iso.certificate,
        "property_comparison": {
            "free": {"first": d1.free, "second": d2.free},
            "stably_free": {"first": d1.stably_free, "second": d2.stably_free},
        },
    }
    _emit(args, doc, report.render_compare(doc))
    return EXIT_OK


def _cmd_search(args) -> int:
    from .harness import ResultCache, enumerate_arrangements, group_and_check

    prop = "stably_free" if args.prop == "stablyfree" else "free"
    field = _field_of(args)
    pool = None
    if args.pool:
        lo, hi = args.pool.split("..")
        pool = list(range(int(lo), int(hi) + 1))
        from .fields import QQ

        field = field or QQ
    if field is None and pool is None:
        raise ArrangementError("search needs --field F<p> or --pool a..b")
    arrs = list(
        enumerate_arrangements(
            args.n, args.k, field=field, coeff_pool=pool,
            essential_only=args.essential, max_count=args.max,
        )
    )
    cache = ResultCache(args.cache) if (args.cache or os.environ.get("LOGFREE_CACHE")) else None
    progress = None
    if args.progress:
        def progress(done, total):
            if done % 500 == 0 or done == total:
                sys.stderr.write(f"\rclassified {done}/{total}")
                sys.stderr.flush()
                if done == total:
                    sys.stderr.write("\n")
    reports = group_and_check(
        arrs, prop, with_cohomology=args.cohomology, budget=args.budget,
        processes=args.processes, cache=cache, progress=progress,
    )
    doc = {
        "schema": report.SCHEMA,
        "kind": "search",
        "field": (field.name if field else "Q"),
        "field_note": report.FIELD_DISCLAIMER,
        "n": args.n,
        "k": args.k,
        "property": prop,
        "arrangement_count": len(arrs),
        "classes": [r.to_dict() for r in reports],
    }
    _emit(args, doc, report.render_search(doc))
    return EXIT_OK


def _cmd_catalog(args) -> int:
    doc = {
        "schema": report.SCHEMA,
        "kind": "catalog",
        "patterns": catalog_names(),
        "examples": ["boolean-2", "concurrent-3", "generic-4-2",
                     "nearpencil-5-2", "braid-4"],
    }
    human = "catalog name patterns:\n" + "\n".join(
        "  " + n for n in doc["patterns"]
    ) + "\nexamples: " + ", ".join(doc["examples"]) + "\n"
    _emit(args, doc, human)
    return EXIT_OK


def main(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_OK
    try:
        if args.command == "lattice":
            return _cmd_lattice(args)
        if args.command in ("classify", "module", "free", "stablefree", "cohomology"):
            return _cmd_classify_like(args, args.command)
        if args.command == "compare":
            return _cmd_compare(args)
        if args.command == "search":
            return _cmd_search(args)
        if args.command == "catalog":
            return _cmd_catalog(args)
        parser.error(f"unknown command {args.command}")
    except (ArrangementError, FieldError, OSError) as exc:
        line = getattr(exc, "line", None)
        loc = f" (line {line})" if line else ""
        sys.stderr.write(f"error{loc}: {exc}\n")
        return EXIT_USAGE
    except BudgetExceeded as exc:
        sys.stderr.write(f"undecided (budget): {exc}\n")
        return EXIT_UNDECIDED
    except (InvariantError, AssertionError) as exc:
        sys.stderr.write(f"internal invariant breach: {exc}\n")
        return EXIT_INTERNAL
    return EXIT_OK


def entry():
    sys.exit(main())


if __name__ == "__main__":
    entry()
