"""Report rendering: one in-memory dossier, two faithful views.

The machine document is canonical JSON (sorted keys, fixed separators,
trailing newline) under the versioned schema `logfree-report/1`; parsing
and reserializing is byte-identical.  The human tables are generated from
the same dictionary so every number shown also appears in the machine
document.
"""

from __future__ import annotations

import json

SCHEMA = "logfree-report/1"

FIELD_DISCLAIMER = (
    "verdicts are exact over the stated field; finite-field results do not "
    "certify characteristic zero"
)

EXPONENT_CONVENTION = (
    "exponents are the degrees d_i of a free basis of the kernel module "
    "(Euler field excluded); the sheaf splits as (+) O(-d_i); over good "
    "characteristic they sum to k-1"
)


def to_machine(doc: dict) -> str:
    """Canonical JSON: stable ordering, byte-identical round trips."""
    return json.dumps(doc, sort_keys=True, separators=(",", ":")) + "\n"


def round_trip(text: str) -> str:
    return to_machine(json.loads(text))


def _coh_table_dict(rep) -> dict:
    return {
        "window": list(rep.window),
        "window_provenance": rep.window_provenance,
        "convention": rep.convention,
        "vanishing": {str(i): v for i, v in sorted(rep.vanishing.items())},
        "table": {
            str(i): {str(d): v for d, v in sorted(row.items())}
            for i, row in sorted(rep.table.items())
        },
    }


def dossier_to_dict(d) -> dict:
    doc = {
        "schema": SCHEMA,
        "kind": "dossier",
        "name": d.name,
        "field": d.field,
        "field_note": FIELD_DISCLAIMER,
        "n": d.n,
        "k": d.k,
        "forms": d.forms,
        "lattice": {
            "rank_counts": {str(r): c for r, c in sorted(d.lattice_rank_counts.items())},
            "size": d.lattice_size,
            "complement_betti": list(d.complement_betti),
            "characteristic_polynomial": list(d.characteristic_polynomial),
            "whitney_numbers": {
                str(r): c for r, c in sorted(d.whitney_numbers.items())
            },
            "canonical_hash": d.lattice_hash,
            "essential_rank": d.essential_rank,
            "bottom_element_included": True,
        },
        "module": {
            "generator_degrees": list(d.generator_degrees),
            "rank": d.module_rank,
            "betti": {f"{i},{j}": c for (i, j), c in sorted(d.betti.items())},
            "regularity": d.regularity,
            "projective_dimension": d.projective_dimension,
        },
        "locally_free": d.locally_free,
        "free": d.free,
        "exponents": d.exponents,
        "exponent_convention": EXPONENT_CONVENTION,
        "saito_certificate": d.saito_certificate,
        "stably_free": d.stably_free,
        "stably_free_note": d.stably_free_note,
        "free_method": d.free_method,
        "notes": list(d.notes),
        "undecided_reason": d.undecided_reason,
    }
    if d.cohomology is not None:
        doc["cohomology"] = _coh_table_dict(d.cohomology)
    if d.timings:
        doc["timings"] = {k: round(v, 6) for k, v in sorted(d.timings.items())}
    return doc


# ---------------------------------------------------------------------------
# Human rendering
# ---------------------------------------------------------------------------


def _verdict_str(value, undecided_reason: str = "") -> str:
    if value is None:
        return undecided_reason or "undecided"
    return "yes" if value else "no"


def render_dossier(doc: dict) -> str:
    lines = []
    name = doc.get("name") or "(unnamed)"
    lines.append(f"arrangement {name}: {doc['k']} hyperplanes in P^{doc['n']} over {doc['field']}")
    for f in doc["forms"]:
        lines.append("  [" + " ".join(f) + "]")
    lat = doc["lattice"]
    lines.append(
        "lattice: %d flats (incl. bottom); per-rank %s; essential rank %d"
        % (
            lat["size"],
            " ".join(f"r{r}:{c}" for r, c in lat["rank_counts"].items()),
            lat["essential_rank"],
        )
    )
    lines.append(
        "  complement Betti numbers: (%s)" % ", ".join(map(str, lat["complement_betti"]))
    )
    lines.append(
        "  characteristic polynomial coeffs (low to high): %s"
        % lat["characteristic_polynomial"]
    )
    lines.append("  canonical hash: %s" % lat["canonical_hash"])
    mod = doc["module"]
    if mod["generator_degrees"]:
        lines.append(
            "module: %d generators in degrees %s"
            % (len(mod["generator_degrees"]), mod["generator_degrees"])
        )
    if mod["betti"]:
        lines.append("  Betti table (i,j: count): %s" % mod["betti"])
    if mod["regularity"] is not None:
        lines.append(
            "  regularity %s, projective dimension %s"
            % (mod["regularity"], mod["projective_dimension"])
        )
    lines.append("locally free: %s" % _verdict_str(doc["locally_free"]))
    free_line = "free: %s" % _verdict_str(doc["free"], doc.get("undecided_reason", ""))
    if doc["free"] and doc["exponents"] is not None:
        free_line += ", exponents {%s}" % ", ".join(map(str, doc["exponents"]))
    lines.append(free_line)
    lines.append("  saito certificate: %s" % doc["saito_certificate"])
    st_line = "stably free: %s" % _verdict_str(doc["stably_free"], doc.get("undecided_reason", ""))
    if doc["stably_free_note"]:
        st_line += f" [{doc['stably_free_note']}]"
    lines.append(st_line)
    if doc["notes"]:
        for nline in doc["notes"]:
            lines.append("note: %s" % nline)
    if "cohomology" in doc:
        lines.extend(render_cohomology(doc["cohomology"]))
    lines.append("field note: %s" % doc["field_note"])
    return "\n".join(lines) + "\n"


def render_cohomology(coh: dict) -> list:
    lines = []
    lo, hi = coh["window"]
    lines.append(
        "cohomology table h^i(F(d)), window d in [%d, %d] (%s):"
        % (lo, hi, coh["window_provenance"])
    )
    header = "  i\\d |" + "".join(f"{d:>5}" for d in range(lo, hi + 1))
    lines.append(header)
    lines.append("  " + "-" * (len(header) - 2))
    for i in sorted(coh["table"], key=int):
        row = coh["table"][i]
        cells = "".join(f"{row[str(d)]:>5}" for d in range(lo, hi + 1))
        flag = ""
        if i in coh["vanishing"]:
            flag = "  (H^%s_* = 0)" % i if coh["vanishing"][i] else "  (H^%s_* != 0)" % i
        lines.append(f"  {i:>3} |{cells}{flag}")
    lines.append("  convention: %s" % coh["convention"])
    return lines


def render_lattice(doc: dict) -> str:
    lat = doc["lattice"]
    lines = [
        "lattice of %s (%d hyperplanes in P^%d over %s)"
        % (doc.get("name") or "(unnamed)", doc["k"], doc["n"], doc["field"]),
        "flats per rank (bottom element included): %s"
        % " ".join(f"r{r}:{c}" for r, c in lat["rank_counts"].items()),
        "total flats: %d" % lat["size"],
        "complement Betti numbers: (%s)" % ", ".join(map(str, lat["complement_betti"])),
        "characteristic polynomial coeffs (low to high): %s"
        % lat["characteristic_polynomial"],
        "Whitney numbers (per rank): %s" % lat["whitney_numbers"],
        "canonical hash: %s" % lat["canonical_hash"],
    ]
    if "flat_list" in doc:
        lines.append("flats by rank (atom sets):")
        for item in doc["flat_list"]:
            lines.append("  rank %d: {%s}" % (item["rank"], ",".join(map(str, item["atoms"]))))
    return "\n".join(lines) + "\n"


def render_compare(doc: dict) -> str:
    lines = [
        "comparing %s and %s" % (doc["first"]["name"], doc["second"]["name"]),
        "lattices %s" % ("ISOMORPHIC" if doc["isomorphic"] else "NOT isomorphic"),
    ]
    if doc["isomorphic"]:
        lines.append("atom map (first -> second): %s" % doc["atom_map"])
    else:
        lines.append("certificate: %s" % doc["certificate"])
    if "property_comparison" in doc:
        for prop, vals in sorted(doc["property_comparison"].items()):
            lines.append(
                "%s: %s vs %s" % (prop, vals["first"], vals["second"])
            )
    return "\n".join(lines) + "\n"


def render_search(doc: dict) -> str:
    lines = [
        "search over %s: n=%d, k=%d, property=%s"
        % (doc["field"], doc["n"], doc["k"], doc["property"]),
        "arrangements: %d in %d lattice classes"
        % (doc["arrangement_count"], len(doc["classes"])),
    ]
    n_violation = sum(1 for c in doc["classes"] if c["verdict"] == "VIOLATION")
    n_inconc = sum(1 for c in doc["classes"] if c["verdict"] == "inconclusive")
    lines.append(
        "verdicts: %d consistent, %d VIOLATION, %d inconclusive"
        % (len(doc["classes"]) - n_violation - n_inconc, n_violation, n_inconc)
    )
    for c in doc["classes"]:
        if c["verdict"] == "VIOLATION":
            lines.append("VIOLATION in class %s:" % c["class_hash"])
            for m in c["members"]:
                lines.append(
                    "  forms %s: free=%s stably_free=%s"
                    % (m["forms"], m["free"], m["stably_free"])
                )
    lines.append("note: %s" % doc["field_note"])
    return "\n".join(lines) + "\n"
