"""Enumeration harness: stress-test combinatorial invariance of freeness.

Arrangements are enumerated over a finite field (or a rational coefficient
pool), classified, grouped by lattice isomorphism class, and each class is
checked for consistency of the chosen property.  A VIOLATION record for
`free` would be a counterexample to the freeness-is-combinatorial
conjecture over that field; for `stably_free`, to its stable variant.
Finite-field sweeps are evidence-gathering only: no claim is made about
characteristic zero.
"""

from __future__ import annotations

import hashlib
import itertools
import json
import os
import struct
from dataclasses import dataclass, field as dfield
from fractions import Fraction

from .arrangement import Arrangement
from .classify import ClassifyOptions, Dossier, classify
from .fields import PrimeField, QQ
from .report import dossier_to_dict

CACHE_ENV = "LOGFREE_CACHE"
DEFAULT_CACHE_DIR = "./logfree-cache"


class TruncatedEnumeration(RuntimeError):
    def __init__(self, cap):
        super().__init__(f"enumeration truncated at hard cap {cap}")
        self.cap = cap


def projective_forms(field, n: int):
    """All normalized nonzero coefficient vectors (first nonzero coeff 1)."""
    if isinstance(field, PrimeField):
        p = field.p
        forms = []
        for lead in range(n + 1):
            head = (0,) * lead + (1,)
            for tail in itertools.product(range(p), repeat=n - lead):
                forms.append(head + tail)
        return forms
    raise ValueError("projective enumeration needs a finite field")


def pool_forms(field, n: int, pool):
    """Normalized forms with coefficients drawn from a finite pool."""
    seen = set()
    out = []
    for raw in itertools.product(list(pool), repeat=n + 1):
        if all(field.is_zero(field(c)) for c in raw):
            continue
        vals = tuple(field(c) for c in raw)
        lead = next(c for c in vals if not field.is_zero(c))
        inv = field.inv(lead)
        nf = tuple(field.mul(inv, c) for c in vals)
        if nf not in seen:
            seen.add(nf)
            out.append(nf)
    return out


def enumerate_arrangements(n: int, k: int, field=None, coeff_pool=None,
                           essential_only: bool = False,
                           max_count: int | None = None):
    """All arrangements of k pairwise non-proportional forms, in a fixed
    deterministic order.  A hard cap raises TruncatedEnumeration."""
    if n < 1 or k < 1:
        raise ValueError("need n >= 1 and k >= 1")
    if field is not None and isinstance(field, PrimeField):
        forms = projective_forms(field, n)
    elif coeff_pool is not None:
        field = field or QQ
        forms = pool_forms(field, n, coeff_pool)
    else:
        raise ValueError("enumeration needs a prime field or a coefficient pool")
    forms = sorted(forms, key=lambda f: tuple(str(c) for c in f))
    count = 0
    for combo in itertools.combinations(forms, k):
        A = Arrangement(field, n, combo)
        if essential_only and A.essential_rank() != n + 1:
            continue
        count += 1
        if max_count is not None and count > max_count:
            raise TruncatedEnumeration(max_count)
        yield A


@dataclass
class ClassReport:
    class_hash: str
    n: int
    k: int
    rank_counts: dict
    members: list                      # list of member dicts
    verdict: str                       # consistent | VIOLATION | inconclusive
    property_name: str
    cohomology_equal: dict = dfield(default_factory=dict)  # i -> bool

    def to_dict(self) -> dict:
        return {
            "class_hash": self.class_hash,
            "n": self.n,
            "k": self.k,
            "rank_counts": {str(r): c for r, c in sorted(self.rank_counts.items())},
            "members": self.members,
            "verdict": self.verdict,
            "property": self.property_name,
            "cohomology_equal": {
                str(i): v for i, v in sorted(self.cohomology_equal.items())
            },
        }


def _member_record(d: Dossier, prop: str) -> dict:
    rec = {
        "forms": d.forms,
        "free": d.free,
        "stably_free": d.stably_free,
        "exponents": d.exponents,
        "undecided": bool(d.undecided_reason),
    }
    if d.cohomology is not None:
        rec["cohomology"] = {
            str(i): {str(dd): v for dd, v in sorted(row.items())}
            for i, row in sorted(d.cohomology.table.items())
        }
    return rec


def _property_value(d: Dossier, prop: str):
    if d.undecided_reason:
        return None
    return d.free if prop == "free" else d.stably_free


def _classify_one(args):
    forms, n, field_name, prop, with_cohomology, budget = args
    from .fields import parse_field

    field = parse_field(field_name)
    A = Arrangement(field, n, forms)
    mode = "fast" if (not with_cohomology and (prop == "free" or n <= 3)) else "full"
    opts = ClassifyOptions(mode=mode, with_cohomology=with_cohomology, budget=budget)
    d = classify(A, opts)
    return dossier_to_dict(d), d.lattice_hash, _property_value(d, prop), _member_record(d, prop)


def group_and_check(arrangements, prop: str = "free",
                    with_cohomology: bool = False,
                    budget: int | None = None,
                    processes: int | None = None,
                    cache: "ResultCache | None" = None,
                    progress=None):
    """Classify, group by lattice class, and check per-class consistency."""
    if prop not in ("free", "stably_free"):
        raise ValueError("property must be 'free' or 'stably_free'")
    jobs = []
    arrangements = list(arrangements)
    for A in arrangements:
        jobs.append((A.forms, A.n, A.field.name, prop, with_cohomology, budget))

    # cache lookups happen up front; the parent process is the single writer
    results: list = [None] * len(jobs)
    pending = []
    for idx, job in enumerate(jobs):
        if cache is not None:
            hit = cache.get(cache_key(job))
            if hit is not None:
                results[idx] = tuple(hit)
                continue
        pending.append(idx)

    done = len(jobs) - len(pending)
    if processes and processes > 1 and pending:
        import multiprocessing as mp

        with mp.Pool(processes) as pool:
            outs = pool.imap(_classify_one, [jobs[i] for i in pending], chunksize=64)
            for idx, out in zip(pending, outs):
                results[idx] = out
                done += 1
                if progress:
                    progress(done, len(jobs))
    else:
        for idx in pending:
            results[idx] = _classify_one(jobs[idx])
            done += 1
            if progress:
                progress(done, len(jobs))
    if cache is not None:
        for idx in pending:
            cache.put(cache_key(jobs[idx]), list(results[idx]))

    groups: dict = {}
    for (dossier_dict, lhash, value, member) in results:
        groups.setdefault(lhash, []).append((value, member, dossier_dict))

    reports = []
    for lhash in sorted(groups):
        bucket = groups[lhash]
        values = [v for (v, _, _) in bucket]
        decided = [v for v in values if v is not None]
        if any(v is None for v in values) and len(set(decided)) <= 1:
            verdict = "inconclusive"
        elif len(set(decided)) > 1:
            verdict = "VIOLATION"
        else:
            verdict = "consistent"
        first = bucket[0][2]
        rank_counts = {
            int(r): c for r, c in first["lattice"]["rank_counts"].items()
        }
        rep = ClassReport(
            class_hash=lhash,
            n=first["n"],
            k=first["k"],
            rank_counts=rank_counts,
            members=[m for (_, m, _) in bucket],
            verdict=verdict,
            property_name=prop,
        )
        if with_cohomology:
            rep.cohomology_equal = _cohomology_equality(rep.members)
        reports.append(rep)
    return reports


def _cohomology_equality(members) -> dict:
    rows: dict = {}
    tables = [m.get("cohomology") for m in members]
    if any(t is None for t in tables):
        return {}
    if not tables:
        return {}
    keys = set()
    for t in tables:
        keys.update(int(i) for i in t.keys())
    for i in sorted(keys):
        vals = {json.dumps(t.get(str(i), {}), sort_keys=True) for t in tables}
        rows[i] = len(vals) <= 1
    return rows


def cohomology_by_class(reports) -> list:
    """Observational table for the lattice-determination question."""
    out = []
    for rep in reports:
        out.append(
            {
                "class_hash": rep.class_hash,
                "members": len(rep.members),
                "cohomology_equal": {
                    str(i): v for i, v in sorted(rep.cohomology_equal.items())
                },
            }
        )
    return out


# ---------------------------------------------------------------------------
# Append-only result cache with per-record checksums
# ---------------------------------------------------------------------------


def cache_key(job) -> str:
    forms, n, field_name, prop, with_cohomology, budget = job
    payload = json.dumps(
        {
            "field": field_name,
            "n": n,
            "forms": sorted(tuple(str(c) for c in f) for f in forms),
            "prop": prop,
            "cohomology": bool(with_cohomology),
        },
        sort_keys=True,
    )
    return hashlib.sha256(payload.encode()).hexdigest()


class ResultCache:
    """Length-prefixed records: [u32 length][payload][sha256]; corrupt
    tails are quarantined, never silently reused."""

    MAGIC = b"LFC1"

    def __init__(self, directory: str | None = None):
        directory = directory or os.environ.get(CACHE_ENV) or DEFAULT_CACHE_DIR
        self.directory = directory
        os.makedirs(directory, exist_ok=True)
        self.path = os.path.join(directory, "results.lfc")
        self._mem: dict = {}
        self._load()

    def _load(self):
        if not os.path.exists(self.path):
            return
        with open(self.path, "rb") as fh:
            blob = fh.read()
        pos = 0
        good_until = 0
        while pos + 8 <= len(blob):
            if blob[pos : pos + 4] != self.MAGIC:
                break
            (length,) = struct.unpack(">I", blob[pos + 4 : pos + 8])
            end = pos + 8 + length + 32
            if end > len(blob):
                break
            payload = blob[pos + 8 : pos + 8 + length]
            digest = blob[pos + 8 + length : end]
            if hashlib.sha256(payload).digest() != digest:
                break
            try:
                record = json.loads(payload.decode())
                self._mem[record["key"]] = record["value"]
            except (ValueError, KeyError):
                break
            pos = end
            good_until = end
        if good_until < len(blob):
            quarantine = self.path + ".quarantine"
            with open(quarantine, "ab") as fh:
                fh.write(blob[good_until:])
            with open(self.path, "wb") as fh:
                fh.write(blob[:good_until])

    def get(self, key: str):
        return self._mem.get(key)

    def put(self, key: str, value):
        if key in self._mem:
            return
        self._mem[key] = value
        payload = json.dumps({"key": key, "value": value}, sort_keys=True).encode()
        rec = self.MAGIC + struct.pack(">I", len(payload)) + payload + hashlib.sha256(
            payload
        ).digest()
        with open(self.path, "ab") as fh:
            fh.write(rec)

    def __len__(self):
        return len(self._mem)
