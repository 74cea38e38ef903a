"""Minimal graded free resolutions, Betti tables, Hilbert series.

The raw resolution is built by iterated Schreyer syzygy steps; it is then
minimalized by cancelling unit (degree-0) entries with row/column
operations mirrored onto the neighbouring matrices, so consecutive maps
keep composing to zero exactly.
"""

from __future__ import annotations

import math
from fractions import Fraction
from typing import Sequence

from .groebner import (
    Budget,
    ModuleGB,
    hilbert_numerator_ideal,
    quotient_dim_in_degree,
    schreyer_step,
    top_key,
)
from .modules import FreeModule, GradedMap, GradedModule, Vec
from .poly import Poly


class InvariantError(RuntimeError):
    """An internal exact invariant failed; always a bug, never an input error."""


MAX_EXTRA_STEPS = 3


def _raw_resolution(M: GradedModule, budget: Budget | None = None):
    """Schreyer resolution as a list of (matrix columns, source shifts).

    Matrix i maps F_{i+1} -> F_i with F_0 = M.gens; columns are Vec's.
    """
    ring = M.ring
    if not M.relations:
        return []
    gb = ModuleGB.of(list(M.relations), M.gens, budget)
    basis = gb.elems
    module = M.gens
    key = top_key
    mats = []
    step_cap = ring.nvars + 1 + MAX_EXTRA_STEPS
    for _ in range(step_cap):
        used, nxt, new_module, new_key = schreyer_step(basis, module, key, budget)
        mats.append(([Vec(module, dict(g.terms)) for g in used], module))
        if not nxt:
            return mats
        basis, module, key = nxt, new_module, new_key
    raise InvariantError("Schreyer resolution failed to terminate")


class _Complex:
    """Mutable chain of matrices for minimalization.

    shifts[0] are the generator degrees of F_0; mats[i] is a dense
    rows x cols grid of Poly, mapping F_{i+1} (cols) to F_i (rows).
    """

    def __init__(self, ring, shifts0, mats_with_shifts):
        self.ring = ring
        self.shifts = [list(shifts0)]
        self.mats = []
        for columns, src_module in mats_with_shifts:
            rows = len(self.shifts[-1])
            col_shifts = [c.degree() if c.terms else None for c in columns]
            # zero columns in a Schreyer step cannot occur; guard anyway
            grid = [[ring.zero() for _ in columns] for _ in range(rows)]
            for j, col in enumerate(columns):
                for i in range(rows):
                    grid[i][j] = col.component(i)
            self.mats.append(grid)
            self.shifts.append([d if d is not None else 0 for d in col_shifts])

    def entry_is_unit(self, i, r, c):
        p = self.mats[i][r][c]
        if len(p.terms) != 1:
            return False
        (exps, coef), = p.terms.items()
        return all(e == 0 for e in exps)

    def _col_op(self, i, c_dst, c_src, q: Poly):
        """col_dst -= q * col_src on mats[i]; mirror row op on mats[i+1]."""
        grid = self.mats[i]
        for r in range(len(grid)):
            if grid[r][c_src].terms:
                grid[r][c_dst] = grid[r][c_dst] - q * grid[r][c_src]
        if i + 1 < len(self.mats):
            nxt = self.mats[i + 1]
            # basis change inverse: row_src += q * row_dst
            for j in range(len(nxt[0]) if nxt else 0):
                if nxt[c_dst][j].terms:
                    nxt[c_src][j] = nxt[c_src][j] + q * nxt[c_dst][j]

    def _row_op(self, i, r_dst, r_src, q: Poly):
        """row_dst -= q * row_src on mats[i]; mirror col op on mats[i-1]."""
        grid = self.mats[i]
        for j in range(len(grid[0]) if grid else 0):
            if grid[r_src][j].terms:
                grid[r_dst][j] = grid[r_dst][j] - q * grid[r_src][j]
        if i > 0:
            prv = self.mats[i - 1]
            for rr in range(len(prv)):
                if prv[rr][r_dst].terms:
                    prv[rr][r_src] = prv[rr][r_src] + q * prv[rr][r_dst]

    def _delete(self, i, r, c):
        """Remove basis row r of F_i and column c of F_{i+1}-side of mats[i]."""
        grid = self.mats[i]
        fld = self.ring.field
        # neighbours must already be zero in the struck line (composition == 0)
        if i + 1 < len(self.mats):
            for j in range(len(self.mats[i + 1][0]) if self.mats[i + 1] else 0):
                if self.mats[i + 1][c][j].terms:
                    raise InvariantError("nonzero row survived unit cancellation")
        if i > 0:
            for rr in range(len(self.mats[i - 1])):
                if self.mats[i - 1][rr][r].terms:
                    raise InvariantError("nonzero column survived unit cancellation")
        for row in grid:
            del row[c]
        del grid[r]
        del self.shifts[i][r]
        del self.shifts[i + 1][c]
        if i + 1 < len(self.mats):
            del self.mats[i + 1][c]
        if i > 0:
            for rr in range(len(self.mats[i - 1])):
                del self.mats[i - 1][rr][r]

    def prune(self):
        fld = self.ring.field
        changed = True
        while changed:
            changed = False
            for i in range(len(self.mats)):
                grid = self.mats[i]
                if not grid or not grid[0]:
                    continue
                found = None
                for r in range(len(grid)):
                    for c in range(len(grid[0])):
                        if self.entry_is_unit(i, r, c):
                            found = (r, c)
                            break
                    if found:
                        break
                if not found:
                    continue
                r, c = found
                (exps, u), = grid[r][c].terms.items()
                uinv = fld.inv(u)
                # clear row r via column ops
                for c2 in range(len(grid[0])):
                    if c2 != c and grid[r][c2].terms:
                        q = grid[r][c2].scale(uinv)
                        self._col_op(i, c2, c, q)
                # clear column c via row ops
                for r2 in range(len(grid)):
                    if r2 != r and grid[r2][c].terms:
                        q = grid[r2][c].scale(uinv)
                        self._row_op(i, r2, r, q)
                self._delete(i, r, c)
                changed = True
        # drop trailing empty matrices
        while self.mats and (not self.shifts[len(self.mats)]):
            self.mats.pop()
            self.shifts.pop()

    def to_maps(self):
        ring = self.ring
        modules = [FreeModule(ring, tuple(s)) for s in self.shifts]
        maps = []
        for i, grid in enumerate(self.mats):
            cols = []
            for j in range(len(self.shifts[i + 1])):
                cols.append(
                    modules[i].vec_from_polys([grid[r][j] for r in range(len(grid))])
                )
            maps.append(GradedMap(modules[i + 1], modules[i], cols))
        return modules, maps


class Resolution:
    """Minimal free resolution 0 <- M <- F_0 <- F_1 <- ... <- F_len <- 0."""

    def __init__(self, modules: Sequence[FreeModule], maps: Sequence[GradedMap],
                 minimal: bool = True):
        self.modules = list(modules)
        self.maps = list(maps)
        self.minimal = minimal

    @property
    def length(self) -> int:
        return len(self.modules) - 1

    def betti(self) -> dict:
        """{(i, j): rank of degree-j part of F_i}, zero entries omitted."""
        table: dict = {}
        for i, mod in enumerate(self.modules):
            for d in mod.shifts:
                table[(i, d)] = table.get((i, d), 0) + 1
        return table

    def regularity(self) -> int:
        """Castelnuovo-Mumford regularity from the Betti table."""
        return max(j - i for (i, j) in self.betti())

    def projective_dimension(self) -> int:
        return self.length

    def verify_complex(self) -> bool:
        """d_i o d_{i+1} = 0, exactly."""
        for i in range(len(self.maps) - 1):
            if not self.maps[i].compose(self.maps[i + 1]).is_zero():
                return False
        return True

    def verify_minimal(self) -> bool:
        for phi in self.maps:
            for j in range(phi.source.rank):
                for i in range(phi.target.rank):
                    p = phi.entry(i, j)
                    if p.terms and p.degree() == 0:
                        return False
        return True

    def betti_rows(self):
        """Betti table grouped for display: list of (i, {j: count})."""
        table = self.betti()
        out = []
        for i in range(self.length + 1):
            row = {j: c for (ii, j), c in table.items() if ii == i}
            out.append((i, dict(sorted(row.items()))))
        return out


def minimal_free_resolution(M: GradedModule, budget: Budget | None = None) -> Resolution:
    raw = _raw_resolution(M, budget)
    cx = _Complex(M.ring, M.gens.shifts, raw)
    cx.prune()
    modules, maps = cx.to_maps()
    res = Resolution(modules, maps, minimal=True)
    if not res.verify_complex():
        raise InvariantError("resolution maps do not compose to zero")
    if not res.verify_minimal():
        raise InvariantError("pruned resolution still has unit entries")
    if res.length > M.ring.nvars:
        raise InvariantError("resolution longer than the Hilbert bound")
    return res


def is_free_module(M: GradedModule, budget: Budget | None = None):
    """Degrees d_1..d_r of a free basis, or None when M is not free."""
    res = minimal_free_resolution(M, budget)
    if res.length == 0:
        return sorted(res.modules[0].shifts)
    return None


# ---------------------------------------------------------------------------
# Hilbert series / polynomials
# ---------------------------------------------------------------------------


class HilbertSeries:
    """HS_M(t) = numerator / (1-t)^nvars, numerator with integer coeffs."""

    def __init__(self, numerator: dict, nvars: int):
        self.numerator = {int(k): int(v) for k, v in numerator.items() if v}
        self.nvars = nvars

    def rank(self) -> int:
        """Generic rank = numerator evaluated at t = 1."""
        return sum(self.numerator.values())

    def reduced(self) -> tuple:
        """Cancel (1-t) factors: returns (numerator dict, remaining power)."""
        num = dict(self.numerator)
        power = self.nvars
        while power > 0 and num:
            # try dividing numerator by (1-t)
            quot: dict = {}
            acc = 0
            ok = True
            for d in range(0, max(num) + 1):
                acc += num.get(d, 0)
                quot[d] = acc
            if acc != 0:
                ok = False
            if not ok:
                break
            num = {d: c for d, c in quot.items() if c}
            # note: sum_{e<=d} num[e] gives the quotient of division by (1-t)
            power -= 1
        return num, power

    def dimension_at(self, d: int) -> int:
        """dim_k M_d, summing numerator against binomials."""
        total = 0
        n = self.nvars - 1
        for j, c in self.numerator.items():
            if d - j >= 0:
                total += c * math.comb(d - j + n, n)
        return total

    def polynomial(self):
        """Hilbert polynomial as a list of Fraction coefficients in d."""
        n = self.nvars - 1
        coeffs = [Fraction(0)] * (n + 1)
        for j, c in self.numerator.items():
            # C(d - j + n, n) = prod_{t=1..n} (d - j + t) / n!
            poly = [Fraction(1)]
            for t in range(1, n + 1):
                # multiply by (d + (t - j))
                shift = Fraction(t - j)
                new = [Fraction(0)] * (len(poly) + 1)
                for a, co in enumerate(poly):
                    new[a + 1] += co
                    new[a] += co * shift
                poly = new
            fact = Fraction(math.factorial(n))
            for a, co in enumerate(poly):
                coeffs[a] += Fraction(c) * co / fact
        return coeffs

    def polynomial_value(self, d: int) -> Fraction:
        coeffs = self.polynomial()
        val = Fraction(0)
        for a, co in enumerate(coeffs):
            val += co * Fraction(d) ** a
        return val

    def is_polynomial_zero(self) -> bool:
        """True iff the Hilbert polynomial vanishes (finite length module)."""
        return all(c == 0 for c in self.polynomial())

    def __eq__(self, other):
        return (
            isinstance(other, HilbertSeries)
            and self.nvars == other.nvars
            and self.numerator == other.numerator
        )

    def format(self) -> str:
        if not self.numerator:
            return "0"
        parts = []
        for d in sorted(self.numerator):
            c = self.numerator[d]
            if d == 0:
                parts.append(f"{c}")
            else:
                parts.append(f"{c}*t^{d}" if c != 1 else f"t^{d}")
        return f"({' + '.join(parts)}) / (1-t)^{self.nvars}".replace("+ -", "- ")


def hilbert_series_from_betti(betti: dict, nvars: int) -> HilbertSeries:
    num: dict = {}
    for (i, j), c in betti.items():
        num[j] = num.get(j, 0) + (-1) ** i * c
    return HilbertSeries({k: v for k, v in num.items() if v}, nvars)


def hilbert_series(M: GradedModule, budget: Budget | None = None,
                   resolution: Resolution | None = None) -> HilbertSeries:
    """Hilbert series of M with numerator read off the Betti table."""
    if resolution is None:
        resolution = minimal_free_resolution(M, budget)
    return hilbert_series_from_betti(resolution.betti(), M.ring.nvars)


def hilbert_series_from_presentation(M: GradedModule,
                                     budget: Budget | None = None) -> HilbertSeries:
    """Same series computed from a Groebner basis of the relations.

    Independent of the resolution path; used for cross-checks and for the
    fast lanes.
    """
    nvars = M.ring.nvars
    num: dict = {}
    if not M.relations:
        for s in M.gens.shifts:
            num[s] = num.get(s, 0) + 1
        return HilbertSeries(num, nvars)
    gb = ModuleGB.of(list(M.relations), M.gens, budget)
    per_comp: dict = {}
    for comp, exps in gb.lead_terms():
        per_comp.setdefault(comp, []).append(exps)
    for comp in range(M.gens.rank):
        hn = hilbert_numerator_ideal(per_comp.get(comp, []), nvars)
        s = M.gens.shifts[comp]
        for k, c in hn.items():
            num[k + s] = num.get(k + s, 0) + c
    return HilbertSeries({k: v for k, v in num.items() if v}, nvars)


def graded_piece_dimension(M: GradedModule, d: int,
                           budget: Budget | None = None,
                           _gb_cache: dict | None = None) -> int:
    """dim_k M_d via standard monomials of the relation lead module."""
    if not M.relations:
        return quotient_dim_in_degree([], M.gens, d)
    if _gb_cache is not None and "gb" in _gb_cache:
        gb = _gb_cache["gb"]
    else:
        gb = ModuleGB.of(list(M.relations), M.gens, budget)
        if _gb_cache is not None:
            _gb_cache["gb"] = gb
    return quotient_dim_in_degree(gb.lead_terms(), M.gens, d)
