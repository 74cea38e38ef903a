"""Sparse multivariate polynomials over an exact field.

Terms are stored as a dict mapping exponent tuples to nonzero field
elements; the zero polynomial is the empty dict.  The active monomial
order is degree-reverse-lexicographic throughout the ring layer (module
orders live in :mod:`logfree.groebner`).
"""

from __future__ import annotations

import itertools
from functools import lru_cache
from typing import Iterable

from .fields import QQ, PrimeField


_GREVLEX_CACHE: dict = {}


def grevlex_key(exps: tuple) -> tuple:
    """Sort key realizing degrevlex: m1 > m2 iff key(m1) > key(m2)."""
    key = _GREVLEX_CACHE.get(exps)
    if key is None:
        key = (sum(exps), tuple(-e for e in reversed(exps)))
        _GREVLEX_CACHE[exps] = key
    return key


def mono_mul(a: tuple, b: tuple) -> tuple:
    return tuple(map(int.__add__, a, b))


def mono_divides(a: tuple, b: tuple) -> bool:
    """True when monomial a divides monomial b."""
    for x, y in zip(a, b):
        if x > y:
            return False
    return True


def mono_div(a: tuple, b: tuple) -> tuple:
    """Quotient a/b; caller guarantees divisibility."""
    return tuple(x - y for x, y in zip(a, b))


def mono_lcm(a: tuple, b: tuple) -> tuple:
    return tuple(x if x > y else y for x, y in zip(a, b))


def mono_deg(a: tuple) -> int:
    return sum(a)


@lru_cache(maxsize=None)
def monomials_of_degree(nvars: int, d: int) -> tuple:
    """All exponent tuples of total degree d in nvars variables."""
    if d < 0:
        return ()
    if nvars == 1:
        return ((d,),)
    out = []
    for first in range(d, -1, -1):
        for rest in monomials_of_degree(nvars - 1, d - first):
            out.append((first,) + rest)
    return tuple(out)


class PolyRing:
    """Polynomial ring k[x_0..x_n] in n+1 variables with degrevlex order."""

    def __init__(self, field, nvars: int, varnames: Iterable[str] | None = None):
        if nvars < 1:
            raise ValueError("need at least one variable")
        self.field = field
        self.nvars = nvars
        if varnames is None:
            if nvars <= 3:
                varnames = ("x", "y", "z")[:nvars]
            else:
                varnames = tuple(f"x{i}" for i in range(nvars))
        self.varnames = tuple(varnames)
        if len(self.varnames) != nvars:
            raise ValueError("variable name count mismatch")
        self._zero_exp = (0,) * nvars

    def zero(self) -> "Poly":
        return Poly(self, {})

    def one(self) -> "Poly":
        return Poly(self, {self._zero_exp: self.field.one})

    def const(self, c) -> "Poly":
        c = self.field(c)
        if self.field.is_zero(c):
            return self.zero()
        return Poly(self, {self._zero_exp: c})

    def variable(self, i: int) -> "Poly":
        exps = [0] * self.nvars
        exps[i] = 1
        return Poly(self, {tuple(exps): self.field.one})

    def gens(self) -> tuple:
        return tuple(self.variable(i) for i in range(self.nvars))

    def monomial(self, exps: tuple, coeff=None) -> "Poly":
        c = self.field.one if coeff is None else self.field(coeff)
        if self.field.is_zero(c):
            return self.zero()
        return Poly(self, {tuple(exps): c})

    def linear_form(self, coeffs) -> "Poly":
        """The linear form sum(coeffs[i] * x_i)."""
        if len(coeffs) != self.nvars:
            raise ValueError("coefficient vector length mismatch")
        terms = {}
        for i, c in enumerate(coeffs):
            c = self.field(c)
            if not self.field.is_zero(c):
                exps = [0] * self.nvars
                exps[i] = 1
                terms[tuple(exps)] = c
        return Poly(self, terms)

    def from_terms(self, terms: dict) -> "Poly":
        clean = {e: c for e, c in terms.items() if not self.field.is_zero(c)}
        return Poly(self, clean)

    def __eq__(self, other):
        return (
            isinstance(other, PolyRing)
            and other.field == self.field
            and other.nvars == self.nvars
        )

    def __hash__(self):
        return hash((self.field, self.nvars))

    def __repr__(self):
        return f"{self.field.name}[{','.join(self.varnames)}]"


class Poly:
    """Immutable-by-convention sparse polynomial."""

    __slots__ = ("ring", "terms")

    def __init__(self, ring: PolyRing, terms: dict):
        self.ring = ring
        self.terms = terms

    # -- structure ---------------------------------------------------------

    def is_zero(self) -> bool:
        return not self.terms

    def __bool__(self):
        return bool(self.terms)

    def __len__(self):
        return len(self.terms)

    def degree(self) -> int:
        """Total degree (max over terms); -1 for the zero polynomial."""
        if not self.terms:
            return -1
        return max(mono_deg(e) for e in self.terms)

    def homogeneous_degree(self) -> int:
        """Degree if homogeneous, else raises.  Zero counts as any degree (-1)."""
        if not self.terms:
            return -1
        degs = {mono_deg(e) for e in self.terms}
        if len(degs) != 1:
            raise ValueError("polynomial is not homogeneous")
        return degs.pop()

    def is_homogeneous(self) -> bool:
        if not self.terms:
            return True
        return len({mono_deg(e) for e in self.terms}) == 1

    def lead(self) -> tuple:
        """(exponent tuple, coefficient) of the degrevlex-largest term."""
        exps = max(self.terms, key=grevlex_key)
        return exps, self.terms[exps]

    # -- arithmetic --------------------------------------------------------

    def _check(self, other: "Poly"):
        if self.ring != other.ring:
            raise ValueError("operands from different rings")

    def __add__(self, other: "Poly") -> "Poly":
        self._check(other)
        fld = self.ring.field
        out = dict(self.terms)
        for e, c in other.terms.items():
            s = fld.add(out.get(e, fld.zero), c)
            if fld.is_zero(s):
                out.pop(e, None)
            else:
                out[e] = s
        return Poly(self.ring, out)

    def __neg__(self) -> "Poly":
        neg = self.ring.field.neg
        return Poly(self.ring, {e: neg(c) for e, c in self.terms.items()})

    def __sub__(self, other: "Poly") -> "Poly":
        return self + (-other)

    def __mul__(self, other):
        if not isinstance(other, Poly):
            return self.scale(other)
        self._check(other)
        fld = self.ring.field
        out: dict = {}
        if len(self.terms) > len(other.terms):
            big, small = self.terms, other.terms
        else:
            big, small = other.terms, self.terms
        for e1, c1 in small.items():
            for e2, c2 in big.items():
                e = mono_mul(e1, e2)
                s = fld.add(out.get(e, fld.zero), fld.mul(c1, c2))
                if fld.is_zero(s):
                    out.pop(e, None)
                else:
                    out[e] = s
        return Poly(self.ring, out)

    def __rmul__(self, other):
        return self.scale(other)

    def scale(self, c) -> "Poly":
        fld = self.ring.field
        c = fld(c)
        if fld.is_zero(c):
            return self.ring.zero()
        return Poly(self.ring, {e: fld.mul(c, v) for e, v in self.terms.items()})

    def mul_term(self, exps: tuple, coeff) -> "Poly":
        fld = self.ring.field
        if fld.is_zero(coeff):
            return self.ring.zero()
        return Poly(
            self.ring,
            {mono_mul(e, exps): fld.mul(coeff, v) for e, v in self.terms.items()},
        )

    def __pow__(self, k: int) -> "Poly":
        if k < 0:
            raise ValueError("negative power")
        result = self.ring.one()
        base = self
        while k:
            if k & 1:
                result = result * base
            base = base * base if k > 1 else base
            k >>= 1
        return result

    def __eq__(self, other):
        if not isinstance(other, Poly):
            return NotImplemented
        return self.ring == other.ring and self.terms == other.terms

    def __hash__(self):
        return hash((self.ring, frozenset(self.terms.items())))

    # -- calculus / substitution -------------------------------------------

    def partial(self, i: int) -> "Poly":
        """Partial derivative with respect to the i-th variable."""
        fld = self.ring.field
        out = {}
        for e, c in self.terms.items():
            if e[i] == 0:
                continue
            d = fld.mul(c, fld(e[i]))
            if fld.is_zero(d):
                continue
            ne = list(e)
            ne[i] -= 1
            key = tuple(ne)
            s = fld.add(out.get(key, fld.zero), d)
            if fld.is_zero(s):
                out.pop(key, None)
            else:
                out[key] = s
        return Poly(self.ring, out)

    def substitute_linear(self, matrix) -> "Poly":
        """Apply x_i -> sum_j matrix[i][j] x_j and expand."""
        ring = self.ring
        images = [ring.linear_form(row) for row in matrix]
        if len(images) != ring.nvars:
            raise ValueError("matrix size mismatch")
        result = ring.zero()
        for e, c in self.terms.items():
            term = ring.const(c)
            for i, power in enumerate(e):
                for _ in range(power):
                    term = term * images[i]
            result = result + term
        return result

    def coefficient(self, exps: tuple):
        return self.terms.get(tuple(exps), self.ring.field.zero)

    # -- presentation -------------------------------------------------------

    def sorted_terms(self):
        return sorted(self.terms.items(), key=lambda t: grevlex_key(t[0]), reverse=True)

    def __repr__(self):
        return self.format()

    def format(self) -> str:
        if not self.terms:
            return "0"
        fld = self.ring.field
        names = self.ring.varnames
        parts = []
        for e, c in self.sorted_terms():
            factors = []
            for i, p in enumerate(e):
                if p == 1:
                    factors.append(names[i])
                elif p > 1:
                    factors.append(f"{names[i]}^{p}")
            mono = "*".join(factors)
            cs = fld.format(c)
            if mono:
                if cs == "1":
                    parts.append(mono)
                elif cs == "-1":
                    parts.append(f"-{mono}")
                else:
                    parts.append(f"{cs}*{mono}")
            else:
                parts.append(cs)
        out = parts[0]
        for p in parts[1:]:
            out += f" - {p[1:]}" if p.startswith("-") else f" + {p}"
        return out


def content_normalize(p: Poly) -> Poly:
    """Normalize for use as a reducer: monic over F_p, content 1 with a
    positive-leading sign over Q.  Keeps rational coefficient growth tame."""
    if p.is_zero():
        return p
    fld = p.ring.field
    if isinstance(fld, PrimeField):
        _, lc = p.lead()
        if lc == 1:
            return p
        return p.scale(fld.inv(lc))
    if fld == QQ:
        import math

        nums = [c.numerator for c in p.terms.values()]
        dens = [c.denominator for c in p.terms.values()]
        g = 0
        for v in nums:
            g = math.gcd(g, v)
        l = 1
        for v in dens:
            l = l * v // math.gcd(l, v)
        factor = QQ(l) / QQ(g)
        _, lc = p.lead()
        if lc < 0:
            factor = -factor
        return p.scale(factor)
    return p


def euler_pairing(polys, vecs_ring: PolyRing) -> Poly:
    """sum_i x_i * polys[i]; used for Euler-identity checks."""
    result = vecs_ring.zero()
    for i, p in enumerate(polys):
        result = result + vecs_ring.variable(i) * p
    return result


def product(polys, ring: PolyRing) -> Poly:
    out = ring.one()
    for p in polys:
        out = out * p
    return out


def random_homogeneous(ring: PolyRing, degree: int, rng, density: float = 0.7) -> Poly:
    """Random homogeneous polynomial for regression tests (seeded rng)."""
    terms = {}
    for e in monomials_of_degree(ring.nvars, degree):
        if rng.random() < density:
            if ring.field == QQ:
                c = ring.field(rng.randint(-3, 3))
            else:
                c = ring.field(rng.randrange(ring.field.p))
            if not ring.field.is_zero(c):
                terms[e] = c
    return Poly(ring, terms)
