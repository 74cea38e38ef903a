"""Groebner engine for submodules of graded free modules.

Everything is computed over terms-dicts mapping (component, exponent
tuple) to field elements, so ring ideals are just the rank-1 case.  The
module order is term-over-position extended by degrevlex; resolution
steps use Schreyer orders induced by the previous basis.

Syzygies are obtained Schreyer-style: S-vector reductions over the final
basis yield a generating set of the syzygy module (a Groebner basis for
the induced order), transported back to arbitrary generating sets by the
standard transformation-matrix bookkeeping.
"""

from __future__ import annotations

import heapq
from typing import Callable, Sequence

from .modules import FreeModule, GradedMap, Vec, vecs_to_columns
from .poly import (
    Poly,
    content_normalize,
    grevlex_key,
    mono_deg,
    mono_div,
    mono_divides,
    mono_lcm,
    mono_mul,
    monomials_of_degree,
)


class BudgetExceeded(RuntimeError):
    """A computation hit its explicit work cap; verdicts become 'undecided'."""


class Budget:
    """Work meter shared across one classification task."""

    def __init__(self, max_reductions: int | None = None):
        self.max_reductions = max_reductions
        self.reductions = 0

    def tick(self, amount: int = 1):
        self.reductions += amount
        if self.max_reductions is not None and self.reductions > self.max_reductions:
            raise BudgetExceeded(
                f"reduction budget {self.max_reductions} exhausted"
            )


_FREE_BUDGET = Budget()


def top_key(term):
    """Term-over-position degrevlex key on (component, exponents)."""
    return (grevlex_key(term[1]), -term[0])


def make_schreyer_key(prev_key: Callable, leads: Sequence[tuple]) -> Callable:
    """Order on the free module over a basis G induced by lt(G).

    (a, m) is compared by prev_key(m * lt(G_a)), ties to the smaller index.
    """
    lead_comps = [lt[0] for lt in leads]
    lead_exps = [lt[1] for lt in leads]

    def key(term):
        a, exps = term
        return (prev_key((lead_comps[a], mono_mul(exps, lead_exps[a]))), -a)

    return key


class GBElem:
    __slots__ = ("terms", "lead", "track")

    def __init__(self, terms: dict, lead: tuple, track):
        self.terms = terms
        self.lead = lead
        self.track = track  # coordinates over the original generators, or None


def _vec_lead(terms: dict, key) -> tuple:
    return max(terms, key=key)


def _monic(terms: dict, lead: tuple, fld, track=None):
    lc = terms[lead]
    if lc == fld.one:
        return terms, track
    inv = fld.inv(lc)
    new = {k: fld.mul(inv, c) for k, c in terms.items()}
    if track is not None:
        track = [
            {e: fld.mul(inv, c) for e, c in row.items()} for row in track
        ]
    return new, track


def _axpy_term(fld, target: dict, coeff, exps: tuple, source: dict):
    """target -= coeff * x^exps * source, in place."""
    for (gc, ge), gv in source.items():
        kk = (gc, mono_mul(ge, exps))
        s = fld.sub(target.get(kk, fld.zero), fld.mul(coeff, gv))
        if fld.is_zero(s):
            target.pop(kk, None)
        else:
            target[kk] = s


def _axpy_poly_term(fld, target: dict, coeff, exps: tuple, source: dict):
    """Same as _axpy_term for plain polynomial dicts keyed by exponents."""
    for ge, gv in source.items():
        kk = mono_mul(ge, exps)
        s = fld.sub(target.get(kk, fld.zero), fld.mul(coeff, gv))
        if fld.is_zero(s):
            target.pop(kk, None)
        else:
            target[kk] = s


def normal_form(
    terms: dict,
    basis: Sequence[GBElem],
    key,
    fld,
    budget: Budget | None = None,
    want_quotients: bool = False,
):
    """Full normal form of a vector against monic reducers.

    Returns (remainder, quotients); quotients[a] is the polynomial dict
    multiplying basis[a] (only when requested).
    """
    budget = budget or _FREE_BUDGET
    work = dict(terms)
    rem: dict = {}
    quots = [{} for _ in basis] if want_quotients else None
    leads = [g.lead for g in basis]
    while work:
        lt = _vec_lead(work, key)
        c = work[lt]
        comp, exps = lt
        hit = -1
        for idx in range(len(basis)):
            gc, ge = leads[idx]
            if gc == comp and mono_divides(ge, exps):
                hit = idx
                break
        if hit < 0:
            rem[lt] = c
            del work[lt]
            continue
        budget.tick()
        q = mono_div(exps, leads[hit][1])
        _axpy_term(fld, work, c, q, basis[hit].terms)
        if want_quotients:
            qd = quots[hit]
            s = fld.add(qd.get(q, fld.zero), c)
            if fld.is_zero(s):
                qd.pop(q, None)
            else:
                qd[q] = s
    return rem, quots


def _track_combine(fld, track_i, track_j, mi_exps, mj_exps, ngens):
    """x^mi * track_i - x^mj * track_j, as a fresh coordinate row list."""
    out = [dict() for _ in range(ngens)]
    for s in range(ngens):
        row = out[s]
        for e, c in track_i[s].items():
            row[mono_mul(e, mi_exps)] = c
        for e, c in track_j[s].items():
            kk = mono_mul(e, mj_exps)
            v = fld.sub(row.get(kk, fld.zero), c)
            if fld.is_zero(v):
                row.pop(kk, None)
            else:
                row[kk] = v
    return out


def _track_axpy(fld, target_rows, coeff, exps, source_rows):
    for s in range(len(target_rows)):
        row = target_rows[s]
        for e, c in source_rows[s].items():
            kk = mono_mul(e, exps)
            v = fld.sub(row.get(kk, fld.zero), fld.mul(coeff, c))
            if fld.is_zero(v):
                row.pop(kk, None)
            else:
                row[kk] = v


def _reduce_spair(
    fld, key, basis, i, j, budget, track: bool
):
    """Reduce the S-vector of basis[i], basis[j]; return (remainder, trackrow
    or quotient record).  Leads are monic."""
    gi, gj = basis[i], basis[j]
    ci, ei = gi.lead
    cj, ej = gj.lead
    assert ci == cj
    lcm = mono_lcm(ei, ej)
    mi = mono_div(lcm, ei)
    mj = mono_div(lcm, ej)
    work: dict = {}
    for (gc, ge), gv in gi.terms.items():
        work[(gc, mono_mul(ge, mi))] = gv
    for (gc, ge), gv in gj.terms.items():
        kk = (gc, mono_mul(ge, mj))
        v = fld.sub(work.get(kk, fld.zero), gv)
        if fld.is_zero(v):
            work.pop(kk, None)
        else:
            work[kk] = v
    if track:
        trackrow = _track_combine(
            fld,
            gi.track,
            gj.track,
            mi,
            mj,
            len(gi.track),
        )
    else:
        trackrow = None
    syz = {i: {mi: fld.one}, j: {mj: fld.neg(fld.one)}} if not track else None
    leads = [g.lead for g in basis]
    while work:
        lt = _vec_lead(work, key)
        c = work[lt]
        comp, exps = lt
        hit = -1
        for idx in range(len(basis)):
            gc, ge = leads[idx]
            if gc == comp and mono_divides(ge, exps):
                hit = idx
                break
        if hit < 0:
            # only relevant while building a basis; element is new
            return work, trackrow, syz
        budget.tick()
        q = mono_div(exps, leads[hit][1])
        _axpy_term(fld, work, c, q, basis[hit].terms)
        if track:
            _track_axpy(fld, trackrow, c, q, basis[hit].track)
        else:
            # syzygy = m_i e_i - m_j e_j - sum (c x^q) e_hit
            row = syz.setdefault(hit, {})
            s = fld.sub(row.get(q, fld.zero), c)
            if fld.is_zero(s):
                row.pop(q, None)
            else:
                row[q] = s
    return {}, trackrow, syz


def _pair_degree(basis, module: FreeModule, i: int, j: int) -> int:
    ci, ei = basis[i].lead
    _, ej = basis[j].lead
    return mono_deg(mono_lcm(ei, ej)) + module.shifts[ci]


def buchberger(
    vec_list: Sequence[dict],
    module: FreeModule,
    key,
    budget: Budget | None = None,
    track: bool = False,
    use_product_criterion: bool | None = None,
):
    """Monic Groebner basis of the submodule generated by vec_list.

    Returns list[GBElem].  With ``track`` each element carries its
    coordinates over the input generators.  The product (coprime-lcm)
    criterion is only sound for rank-1 modules and is enabled there by
    default.
    """
    fld = module.ring.field
    budget = budget or _FREE_BUDGET
    if use_product_criterion is None:
        use_product_criterion = module.rank == 1

    basis: list[GBElem] = []
    pairs: list = []  # heap of (degree, i, j)

    def push_pairs(t: int):
        ct, et = basis[t].lead
        # Gebauer-Moeller style minimization of new pairs
        cand = []
        for i in range(t):
            ci, ei = basis[i].lead
            if ci != ct:
                continue
            lcm = mono_lcm(ei, et)
            cand.append((lcm, i))
        keep = []
        for lcm, i in cand:
            redundant = False
            for lcm2, i2 in cand:
                if i2 == i:
                    continue
                if mono_divides(lcm2, lcm) and lcm2 != lcm:
                    redundant = True
                    break
            if not redundant:
                keep.append((lcm, i))
        seen = set()
        for lcm, i in keep:
            if lcm in seen:
                continue
            seen.add(lcm)
            if use_product_criterion and lcm == mono_mul(
                basis[i].lead[1], basis[t].lead[1]
            ):
                continue
            heapq.heappush(pairs, (_pair_degree(basis, module, i, t), i, t))

    for idx, terms in enumerate(vec_list):
        if not terms:
            continue
        lead = _vec_lead(terms, key)
        tr = None
        if track:
            tr = [dict() for _ in vec_list]
            tr[idx] = {(0,) * module.ring.nvars: fld.one}
        terms2, tr = _monic(dict(terms), lead, fld, tr)
        basis.append(GBElem(terms2, lead, tr))
        push_pairs(len(basis) - 1)

    while pairs:
        _, i, j = heapq.heappop(pairs)
        budget.tick()
        rem, trackrow, _ = _reduce_spair(fld, key, basis, i, j, budget, track)
        if not rem:
            continue
        lead = _vec_lead(rem, key)
        rem, trackrow = _monic(rem, lead, fld, trackrow)
        basis.append(GBElem(rem, lead, trackrow))
        push_pairs(len(basis) - 1)

    return basis


def minimalize_basis(basis: list) -> list:
    """Drop elements whose lead is divisible by another lead."""
    order = sorted(range(len(basis)), key=lambda a: grevlex_key(basis[a].lead[1]))
    keep: list[GBElem] = []
    for a in order:
        ca, ea = basis[a].lead
        if any(
            g.lead[0] == ca and mono_divides(g.lead[1], ea) for g in keep
        ):
            continue
        keep.append(basis[a])
    return keep


def interreduce(basis: list, key, fld, budget: Budget | None = None) -> list:
    """Tail-reduce a minimal basis into the reduced Groebner basis."""
    basis = minimalize_basis(basis)
    out = []
    for a, g in enumerate(basis):
        others = basis[:a] + basis[a + 1 :]
        rem, _ = normal_form(g.terms, others, key, fld, budget)
        lead = _vec_lead(rem, key)
        rem, _tr = _monic(rem, lead, fld, None)
        out.append(GBElem(rem, lead, None))  # tracking is stale after tail reduction
    out.sort(key=lambda g: (g.lead[0], grevlex_key(g.lead[1])))
    return out


class ModuleGB:
    """Reduced Groebner basis of a submodule, with membership testing."""

    def __init__(self, module: FreeModule, elems: list, budget: Budget | None = None):
        self.module = module
        self.key = top_key
        self.elems = elems
        self.budget = budget

    @classmethod
    def of(cls, vecs: Sequence[Vec], module: FreeModule | None = None,
           budget: Budget | None = None) -> "ModuleGB":
        if module is None:
            if not vecs:
                raise ValueError("cannot infer module from empty input")
            module = vecs[0].module
        fld = module.ring.field
        raw = buchberger([v.terms for v in vecs], module, top_key, budget)
        red = interreduce(raw, top_key, fld, budget)
        return cls(module, red, budget)

    def vectors(self) -> list:
        return [Vec(self.module, dict(g.terms)) for g in self.elems]

    def reduce(self, v: Vec) -> Vec:
        rem, _ = normal_form(
            v.terms, self.elems, self.key, self.module.ring.field, self.budget
        )
        return Vec(self.module, rem)

    def contains(self, v: Vec) -> bool:
        return not self.reduce(v).terms

    def lead_terms(self) -> list:
        return [g.lead for g in self.elems]

    def divide(self, v: Vec):
        """(quotients, remainder): v = sum q_a * G_a + remainder."""
        rem, quots = normal_form(
            v.terms,
            self.elems,
            self.key,
            self.module.ring.field,
            self.budget,
            want_quotients=True,
        )
        ring = self.module.ring
        qpolys = [Poly(ring, q) for q in quots]
        return qpolys, Vec(self.module, rem)


def groebner_basis(vecs: Sequence[Vec], module: FreeModule | None = None,
                   budget: Budget | None = None) -> list:
    """Reduced Groebner basis, as vectors (spec surface for the engine)."""
    gb = ModuleGB.of(vecs, module, budget)
    return gb.vectors()


def minimal_lead_terms(vecs: Sequence[Vec], module: FreeModule,
                       budget: Budget | None = None) -> list:
    """Lead terms of a minimal Groebner basis (cheaper than a reduced GB;
    enough for Hilbert-series work)."""
    raw = buchberger([v.terms for v in vecs], module, top_key, budget)
    return [g.lead for g in minimalize_basis(raw)]


def _syzygies_of_basis(basis, module, key, fld, budget, syz_module):
    """S-pair syzygies over a fixed Groebner basis (Schreyer generators)."""
    out = []
    n = len(basis)
    for i in range(n):
        for j in range(i + 1, n):
            if basis[i].lead[0] != basis[j].lead[0]:
                continue
            rem, _, syz = _reduce_spair(fld, key, basis, i, j, budget, track=False)
            if rem:
                raise AssertionError("S-vector of a Groebner basis must reduce to 0")
            terms = {}
            for a, row in syz.items():
                for e, c in row.items():
                    terms[(a, e)] = c
            if terms:
                out.append(Vec(syz_module, terms))
    return out


def syzygy_module(vecs: Sequence[Vec], module: FreeModule | None = None,
                  budget: Budget | None = None):
    """Generators of the relation module of ``vecs``.

    Returns (syzygies, syz_free) with syzygies in the free module whose
    i-th basis generator corresponds to vecs[i] (shift = its degree);
    relations hold exactly: sum_i syz_i * vecs[i] = 0.
    """
    vecs = list(vecs)
    if module is None:
        if not vecs:
            raise ValueError("cannot infer module from empty input")
        module = vecs[0].module
    ring = module.ring
    fld = ring.field
    budget = budget or _FREE_BUDGET
    shifts = []
    for v in vecs:
        shifts.append(v.degree() if v.terms else 0)
    syz_free = FreeModule(ring, shifts)

    nonzero_idx = [i for i, v in enumerate(vecs) if v.terms]
    result: list[Vec] = []
    # zero generators contribute unit syzygies
    for i, v in enumerate(vecs):
        if not v.terms:
            result.append(syz_free.basis_vec(i))
    if not nonzero_idx:
        return result, syz_free

    sub = [vecs[i] for i in nonzero_idx]
    basis = buchberger([v.terms for v in sub], module, top_key, budget, track=True)
    t = len(basis)
    gb_free = FreeModule(ring, [
        Vec(module, g.terms).degree() for g in basis
    ])
    sigma = _syzygies_of_basis(basis, module, top_key, fld, budget, gb_free)

    # coordinates of the originals over the basis (rows of C)
    gbelems = basis
    c_rows = []
    for v in sub:
        rem, quots = normal_form(v.terms, gbelems, top_key, fld, budget,
                                 want_quotients=True)
        if rem:
            raise AssertionError("generator does not reduce to zero on its own basis")
        c_rows.append(quots)

    # T: coordinates of basis elements over the originals
    t_rows = [g.track for g in gbelems]

    def to_fullvec(coords_by_sub):
        terms = {}
        for local_s, pd in enumerate(coords_by_sub):
            gi = nonzero_idx[local_s]
            for e, c in pd.items():
                terms[(gi, e)] = c
        return Vec(syz_free, terms)

    # sigma * T
    for s in sigma:
        coords = [dict() for _ in sub]
        for (a, e), c in s.terms.items():
            for srow in range(len(sub)):
                for e2, c2 in t_rows[a][srow].items():
                    kk = mono_mul(e, e2)
                    v = fld.add(coords[srow].get(kk, fld.zero), fld.mul(c, c2))
                    if fld.is_zero(v):
                        coords[srow].pop(kk, None)
                    else:
                        coords[srow][kk] = v
        vec = to_fullvec(coords)
        if vec.terms:
            result.append(vec)

    # rows of (I - C T)
    for srow in range(len(sub)):
        coords = [dict() for _ in sub]
        coords[srow][(0,) * ring.nvars] = fld.one
        for a in range(t):
            qa = c_rows[srow][a]
            if not qa:
                continue
            for scol in range(len(sub)):
                row_t = t_rows[a][scol]
                if not row_t:
                    continue
                for e1, c1 in qa.items():
                    for e2, c2 in row_t.items():
                        kk = mono_mul(e1, e2)
                        v = fld.sub(
                            coords[scol].get(kk, fld.zero), fld.mul(c1, c2)
                        )
                        # note: subtracting C*T from I
                        if fld.is_zero(v):
                            coords[scol].pop(kk, None)
                        else:
                            coords[scol][kk] = v
        vec = to_fullvec(coords)
        if vec.terms:
            result.append(vec)

    # verify exactness cheaply and dedupe
    seen = set()
    unique = []
    for s in result:
        fs = frozenset(s.terms.items())
        if fs in seen:
            continue
        seen.add(fs)
        unique.append(s)
    return unique, syz_free


def apply_syzygy(syz: Vec, vecs: Sequence[Vec], module: FreeModule) -> Vec:
    """Evaluate a relation against the generators (must be zero)."""
    out = module.zero()
    for (i, e), c in syz.terms.items():
        out = out + vecs[i].mul_term(e, c)
    return out


def kernel_gens(phi: GradedMap, budget: Budget | None = None):
    """Generators of ker(phi) for a map of free modules."""
    syz, free = syzygy_module(list(phi.columns), phi.target, budget)
    assert free.shifts == phi.source.shifts
    return [Vec(phi.source, s.terms) for s in syz]


def schreyer_step(basis, module: FreeModule, key, budget: Budget | None = None):
    """One resolution step: syzygies of a Groebner basis, with the induced
    Schreyer data ready for iteration.

    Returns (used_basis, new_basis, new_module, new_key).  ``used_basis``
    is the minimalized, descending-lex-sorted basis the syzygies refer to
    (callers must take it as the matrix of this step); new_basis is
    already a Groebner basis for new_key (Schreyer's theorem).
    """
    fld = module.ring.field
    budget = budget or _FREE_BUDGET
    # Sorting leads descending-lex makes each syzygy step drop the first
    # variable still present, which bounds the iteration depth by nvars.
    basis = minimalize_basis(basis)
    basis = sorted(basis, key=lambda g: (g.lead[0], g.lead[1]), reverse=True)
    new_module = FreeModule(
        module.ring, [Vec(module, g.terms).degree() for g in basis]
    )
    skey = make_schreyer_key(key, [g.lead for g in basis])
    sigma = _syzygies_of_basis(basis, module, key, fld, budget, new_module)
    new_basis = []
    for s in sigma:
        lead = _vec_lead(s.terms, skey)
        terms, _ = _monic(dict(s.terms), lead, fld, None)
        new_basis.append(GBElem(terms, lead, None))
    return basis, new_basis, new_module, skey


# ---------------------------------------------------------------------------
# Hilbert series helpers on lead-term data
# ---------------------------------------------------------------------------


def _interreduce_monomials(gens: list) -> tuple:
    gens = sorted(set(gens), key=lambda e: (mono_deg(e), e))
    keep = []
    for g in gens:
        if not any(mono_divides(h, g) for h in keep):
            keep.append(g)
    return tuple(keep)


_HILB_CACHE: dict = {}


def hilbert_numerator_ideal(gens, nvars: int) -> dict:
    """K-polynomial of S/I for a monomial ideal I: dict degree -> coeff.

    HS_{S/I}(t) = (sum_d coeff[d] t^d) / (1-t)^nvars.
    """
    gens = _interreduce_monomials(list(gens))
    return dict(_hilb_rec(gens, nvars))


def _hilb_rec(gens: tuple, nvars: int) -> dict:
    if not gens:
        return {0: 1}
    if any(mono_deg(g) == 0 for g in gens):
        return {}
    cached = _HILB_CACHE.get((gens, nvars))
    if cached is not None:
        return cached
    if len(gens) == 1:
        out = {0: 1, mono_deg(gens[0]): -1}
        _HILB_CACHE[(gens, nvars)] = out
        return out
    # pure powers with pairwise disjoint support: product formula
    supports = [tuple(i for i, e in enumerate(g) if e) for g in gens]
    if all(len(s) == 1 for s in supports) and len(
        {s[0] for s in supports}
    ) == len(gens):
        out = {0: 1}
        for g in gens:
            d = mono_deg(g)
            nxt: dict = {}
            for k, c in out.items():
                nxt[k] = nxt.get(k, 0) + c
                nxt[k + d] = nxt.get(k + d, 0) - c
            out = {k: c for k, c in nxt.items() if c}
        _HILB_CACHE[(gens, nvars)] = out
        return out
    # pivot on the most frequent variable among generators of degree >= 2
    # (a pivot that is itself a generator would not shrink the ideal)
    counts = [0] * nvars
    for g in gens:
        for i, e in enumerate(g):
            if e:
                counts[i] += 1
    piv = -1
    best = -1
    for g in gens:
        if mono_deg(g) >= 2:
            for i, e in enumerate(g):
                if e and counts[i] > best:
                    best = counts[i]
                    piv = i
    if piv < 0:
        raise AssertionError("unreachable: interreduced degree-1 generators")
    pivot = tuple(1 if i == piv else 0 for i in range(nvars))
    # S/I: 0 -> S/(I:x)(-1) -> S/I -> S/(I + x) -> 0
    colon = _interreduce_monomials(
        [tuple(e - p if e >= p else 0 for e, p in zip(g, pivot)) for g in gens]
    )
    plus = _interreduce_monomials(list(gens) + [pivot])
    a = _hilb_rec(colon, nvars)
    b = _hilb_rec(plus, nvars)
    out = dict(b)
    for k, c in a.items():
        out[k + 1] = out.get(k + 1, 0) + c
    out = {k: c for k, c in out.items() if c}
    _HILB_CACHE[(gens, nvars)] = out
    return out


def hilbert_numerator_submodule(lead_terms, module: FreeModule) -> dict:
    """K-polynomial numerator of a submodule N from its lead module.

    HS_N(t) = (sum coeff[d] t^d)/(1-t)^nvars where the lead module is
    (+)_c I_c e_c with I_c monomial ideals; shifts enter as t^shift.
    """
    nvars = module.ring.nvars
    per_comp: dict = {}
    for comp, exps in lead_terms:
        per_comp.setdefault(comp, []).append(exps)
    out: dict = {}
    for comp, gens in per_comp.items():
        num = hilbert_numerator_ideal(gens, nvars)
        s = module.shifts[comp]
        # HS of the ideal I_c = (1 - HN_{S/I_c}) / (1-t)^nvars
        out[s] = out.get(s, 0) + 1
        for k, c in num.items():
            out[k + s] = out.get(k + s, 0) - c
    return {k: c for k, c in out.items() if c}


def quotient_dim_in_degree(lead_terms, module: FreeModule, d: int) -> int:
    """dim_k of (F/N)_d from the lead module of N (standard monomials)."""
    nvars = module.ring.nvars
    per_comp: dict = {}
    for comp, exps in lead_terms:
        per_comp.setdefault(comp, []).append(exps)
    total = 0
    for comp in range(module.rank):
        dd = d - module.shifts[comp]
        if dd < 0:
            continue
        gens = per_comp.get(comp, [])
        for m in monomials_of_degree(nvars, dd):
            if not any(mono_divides(g, m) for g in gens):
                total += 1
    return total


def submodule_dim_in_degree(lead_terms, module: FreeModule, d: int) -> int:
    """dim_k N_d from lead terms (free ambient dims minus quotient)."""
    nvars = module.ring.nvars
    amb = 0
    for s in module.shifts:
        dd = d - s
        if dd >= 0:
            amb += len(monomials_of_degree(nvars, dd))
    return amb - quotient_dim_in_degree(lead_terms, module, d)
