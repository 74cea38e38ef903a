"""Graded free modules, their elements, maps, and finite presentations.

A free module F = S(-d_1) + ... + S(-d_r) is recorded by its shift tuple
(d_1..d_r): the i-th basis generator has degree d_i.  Elements are sparse
dicts mapping (component, exponent tuple) to nonzero field elements, so
the whole Groebner layer can treat ring and module computations the same
way (a ring is a rank-1 module with shift 0).
"""

from __future__ import annotations

from typing import Iterable, Sequence

from .poly import Poly, PolyRing, mono_deg, mono_mul


class GradingError(ValueError):
    """Degree bookkeeping violation (inhomogeneous entry, shift mismatch)."""


class FreeModule:
    __slots__ = ("ring", "shifts")

    def __init__(self, ring: PolyRing, shifts: Sequence[int]):
        self.ring = ring
        self.shifts = tuple(int(s) for s in shifts)

    @property
    def rank(self) -> int:
        return len(self.shifts)

    def zero(self) -> "Vec":
        return Vec(self, {})

    def basis_vec(self, i: int) -> "Vec":
        if not 0 <= i < self.rank:
            raise IndexError(i)
        return Vec(self, {(i, (0,) * self.ring.nvars): self.ring.field.one})

    def vec_from_polys(self, polys: Sequence[Poly]) -> "Vec":
        if len(polys) != self.rank:
            raise ValueError("component count mismatch")
        terms = {}
        for i, p in enumerate(polys):
            if p.ring != self.ring:
                raise ValueError("component from wrong ring")
            for e, c in p.terms.items():
                terms[(i, e)] = c
        return Vec(self, terms)

    def twist(self, d: int) -> "FreeModule":
        """F(d): shifts drop by d (generators move to degree shift - d)."""
        return FreeModule(self.ring, tuple(s - d for s in self.shifts))

    def dual(self) -> "FreeModule":
        """Hom(F, S): shifts negate."""
        return FreeModule(self.ring, tuple(-s for s in self.shifts))

    def __eq__(self, other):
        return (
            isinstance(other, FreeModule)
            and other.ring == self.ring
            and other.shifts == self.shifts
        )

    def __hash__(self):
        return hash((self.ring, self.shifts))

    def __repr__(self):
        return f"Free({self.ring}, shifts={list(self.shifts)})"


class Vec:
    """Sparse element of a graded free module."""

    __slots__ = ("module", "terms")

    def __init__(self, module: FreeModule, terms: dict):
        self.module = module
        self.terms = terms

    def is_zero(self) -> bool:
        return not self.terms

    def __bool__(self):
        return bool(self.terms)

    def degree(self) -> int:
        """Common degree of all terms (term degree + component shift).

        Raises GradingError on inhomogeneous input; -1 for zero."""
        if not self.terms:
            return -1
        shifts = self.module.shifts
        degs = {mono_deg(e) + shifts[i] for (i, e) in self.terms}
        if len(degs) != 1:
            raise GradingError("vector is not homogeneous")
        return degs.pop()

    def is_homogeneous(self) -> bool:
        try:
            self.degree()
            return True
        except GradingError:
            return False

    def component(self, i: int) -> Poly:
        ring = self.module.ring
        return Poly(ring, {e: c for (j, e), c in self.terms.items() if j == i})

    def components(self) -> list:
        return [self.component(i) for i in range(self.module.rank)]

    def __add__(self, other: "Vec") -> "Vec":
        if self.module != other.module:
            raise ValueError("vectors from different modules")
        fld = self.module.ring.field
        out = dict(self.terms)
        for key, c in other.terms.items():
            s = fld.add(out.get(key, fld.zero), c)
            if fld.is_zero(s):
                out.pop(key, None)
            else:
                out[key] = s
        return Vec(self.module, out)

    def __neg__(self) -> "Vec":
        neg = self.module.ring.field.neg
        return Vec(self.module, {k: neg(c) for k, c in self.terms.items()})

    def __sub__(self, other: "Vec") -> "Vec":
        return self + (-other)

    def scale(self, c) -> "Vec":
        fld = self.module.ring.field
        c = fld(c)
        if fld.is_zero(c):
            return Vec(self.module, {})
        return Vec(self.module, {k: fld.mul(c, v) for k, v in self.terms.items()})

    def mul_term(self, exps: tuple, coeff) -> "Vec":
        """Multiply by the ring term coeff * x^exps."""
        fld = self.module.ring.field
        if fld.is_zero(coeff):
            return Vec(self.module, {})
        return Vec(
            self.module,
            {
                (i, mono_mul(e, exps)): fld.mul(coeff, c)
                for (i, e), c in self.terms.items()
            },
        )

    def mul_poly(self, p: Poly) -> "Vec":
        out = self.module.zero()
        for e, c in p.terms.items():
            out = out + self.mul_term(e, c)
        return out

    def __eq__(self, other):
        if not isinstance(other, Vec):
            return NotImplemented
        return self.module == other.module and self.terms == other.terms

    def __hash__(self):
        return hash((self.module, frozenset(self.terms.items())))

    def __repr__(self):
        comps = ", ".join(p.format() for p in self.components())
        return f"({comps})"


class GradedMap:
    """Homogeneous map between free modules, stored column-wise.

    Column j is the image of the j-th source basis generator and must be
    homogeneous of degree source.shifts[j]; equivalently every matrix
    entry (i, j) is homogeneous of degree shifts_src[j] - shifts_tgt[i].
    """

    __slots__ = ("source", "target", "columns")

    def __init__(self, source: FreeModule, target: FreeModule, columns: Sequence[Vec]):
        if len(columns) != source.rank:
            raise GradingError("column count does not match source rank")
        for j, col in enumerate(columns):
            if col.module != target:
                raise GradingError(f"column {j} lives in the wrong module")
            if col.is_zero():
                continue
            try:
                d = col.degree()
            except GradingError as exc:
                raise GradingError(f"column {j} is not homogeneous") from exc
            if d != source.shifts[j]:
                raise GradingError(
                    f"column {j} has degree {d}, expected {source.shifts[j]}"
                )
        self.source = source
        self.target = target
        self.columns = tuple(columns)

    @classmethod
    def from_matrix(cls, source: FreeModule, target: FreeModule, rows) -> "GradedMap":
        """Build from a rows-of-polys matrix (rows indexed by target)."""
        cols = []
        for j in range(source.rank):
            cols.append(target.vec_from_polys([rows[i][j] for i in range(target.rank)]))
        return cls(source, target, cols)

    def entry(self, i: int, j: int) -> Poly:
        return self.columns[j].component(i)

    def apply(self, v: Vec) -> Vec:
        if v.module != self.source:
            raise ValueError("vector not in source module")
        out = self.target.zero()
        for (j, e), c in v.terms.items():
            out = out + self.columns[j].mul_term(e, c)
        return out

    def transpose(self) -> "GradedMap":
        """The dual map Hom(target,S) -> Hom(source,S)."""
        src = self.target.dual()
        tgt = self.source.dual()
        cols = []
        for i in range(src.rank):
            terms = {}
            for j in range(tgt.rank):
                p = self.entry(i, j)
                for e, c in p.terms.items():
                    terms[(j, e)] = c
            cols.append(Vec(tgt, terms))
        return GradedMap(src, tgt, cols)

    def compose(self, other: "GradedMap") -> "GradedMap":
        """self o other (apply other first)."""
        if other.target != self.source:
            raise ValueError("composition mismatch")
        cols = [self.apply(c) for c in other.columns]
        return GradedMap(other.source, self.target, cols)

    def is_zero(self) -> bool:
        return all(c.is_zero() for c in self.columns)

    def __repr__(self):
        return f"GradedMap({self.source.rank} -> {self.target.rank})"


class GradedModule:
    """Finitely presented graded module: cokernel of relations -> F0.

    ``gens`` is the covering free module (one shift per generator);
    ``relations`` are homogeneous vectors in it whose span is divided out.
    """

    __slots__ = ("gens", "relations")

    def __init__(self, gens: FreeModule, relations: Sequence[Vec] = ()):
        rels = []
        for r in relations:
            if r.module != gens:
                raise GradingError("relation lives in the wrong free module")
            if r.is_zero():
                continue
            if not r.is_homogeneous():
                raise GradingError("relation is not homogeneous")
            rels.append(r)
        self.gens = gens
        self.relations = tuple(rels)

    @classmethod
    def free(cls, ring: PolyRing, shifts: Sequence[int]) -> "GradedModule":
        return cls(FreeModule(ring, shifts), ())

    @classmethod
    def from_map(cls, phi: GradedMap) -> "GradedModule":
        """Cokernel of phi."""
        return cls(phi.target, phi.columns)

    @property
    def ring(self) -> PolyRing:
        return self.gens.ring

    def generator_degrees(self) -> tuple:
        return self.gens.shifts

    def relation_degrees(self) -> tuple:
        return tuple(r.degree() for r in self.relations)

    def presentation_map(self) -> GradedMap:
        src = FreeModule(self.ring, self.relation_degrees())
        return GradedMap(src, self.gens, self.relations)

    def __repr__(self):
        return (
            f"GradedModule(gens={list(self.gens.shifts)}, "
            f"rels={list(self.relation_degrees())})"
        )


def vecs_to_columns(vecs: Iterable[Vec]) -> "GradedMap":
    """Package homogeneous vectors of a common free module as a map."""
    vecs = list(vecs)
    if not vecs:
        raise ValueError("need at least one vector")
    target = vecs[0].module
    src = FreeModule(target.ring, tuple(v.degree() for v in vecs))
    return GradedMap(src, target, vecs)
