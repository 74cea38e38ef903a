"""Intersection lattices of arrangements and their combinatorics.

Flats are intersections of hyperplanes, ordered by reverse inclusion and
ranked by codimension; each flat is labelled by the maximal set of
hyperplanes containing it, so the whole poset structure reduces to the
family of atom sets.  Projectively empty intersections (codimension n+1,
only the origin of the cone) are excluded from the element list but kept
for the characteristic/Poincare polynomials of essential arrangements.

The lattice includes the bottom element (the ambient space, empty
intersection); isomorphism verdicts are unaffected by this choice.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field as dfield

from .arrangement import Arrangement


def _rref(field, rows):
    """Reduced row echelon form; returns tuple of nonzero row tuples."""
    rows = [list(r) for r in rows]
    if not rows:
        return ()
    ncols = len(rows[0])
    rank = 0
    for col in range(ncols):
        piv = None
        for r in range(rank, len(rows)):
            if not field.is_zero(rows[r][col]):
                piv = r
                break
        if piv is None:
            continue
        rows[rank], rows[piv] = rows[piv], rows[rank]
        inv = field.inv(rows[rank][col])
        rows[rank] = [field.mul(inv, v) for v in rows[rank]]
        for r in range(len(rows)):
            if r != rank and not field.is_zero(rows[r][col]):
                c = rows[r][col]
                rows[r] = [
                    field.sub(v, field.mul(c, w)) for v, w in zip(rows[r], rows[rank])
                ]
        rank += 1
    return tuple(tuple(r) for r in rows[:rank])


def _in_rowspan(field, rref_rows, vec):
    """Membership of vec in the span of reduced rows."""
    v = list(vec)
    for row in rref_rows:
        piv = next(i for i, x in enumerate(row) if not field.is_zero(x))
        c = v[piv]
        if field.is_zero(c):
            continue
        v = [field.sub(a, field.mul(c, b)) for a, b in zip(v, row)]
    return all(field.is_zero(a) for a in v)


@dataclass
class Flat:
    rank: int                 # codimension of the subspace
    atoms: frozenset          # maximal set of hyperplane indices containing it
    rref: tuple               # canonical equations (rows spanning the conormal)


class Lattice:
    """Intersection lattice; elements are the projectively nonempty flats."""

    def __init__(self, n: int, k: int, flats: list, central_top: Flat | None):
        self.n = n
        self.k = k
        # sorted for determinism: by (rank, sorted atom list)
        self.flats = sorted(flats, key=lambda F: (F.rank, sorted(F.atoms)))
        self.central_top = central_top  # rank n+1 flat of the cone, if essential
        self._mobius = None
        self._canonical = None

    # -- basic structure ----------------------------------------------------

    def rank_counts(self) -> dict:
        out: dict = {}
        for F in self.flats:
            out[F.rank] = out.get(F.rank, 0) + 1
        return out

    def atoms(self) -> list:
        return [F for F in self.flats if F.rank == 1]

    def flats_with_top(self) -> list:
        if self.central_top is not None:
            return self.flats + [self.central_top]
        return list(self.flats)

    def leq(self, F1: Flat, F2: Flat) -> bool:
        """F1 <= F2 iff F1 contains F2 as subspaces iff atoms nest."""
        return F1.atoms <= F2.atoms

    # -- Moebius function and polynomials ------------------------------------

    def mobius(self) -> dict:
        """mu(bottom, X) for every X in the central lattice (top included)."""
        if self._mobius is not None:
            return self._mobius
        elems = self.flats_with_top()
        mob: dict = {}
        for idx, X in enumerate(elems):
            if X.rank == 0:
                mob[idx] = 1
                continue
            total = 0
            for jdx, Y in enumerate(elems):
                # maximal atom labels make Y < X the same as strict inclusion
                if jdx != idx and Y.atoms < X.atoms:
                    total += mob[jdx]
            mob[idx] = -total
        self._mobius = mob
        return mob

    def whitney_numbers(self) -> dict:
        """Sum of mu over each rank of the central lattice."""
        mob = self.mobius()
        out: dict = {}
        for idx, X in enumerate(self.flats_with_top()):
            out[X.rank] = out.get(X.rank, 0) + mob[idx]
        return out

    def characteristic_polynomial(self) -> list:
        """chi(t) of the central (cone) arrangement; coeffs low-to-high in t."""
        mob = self.mobius()
        coeffs = [0] * (self.n + 2)
        for idx, X in enumerate(self.flats_with_top()):
            coeffs[self.n + 1 - X.rank] += mob[idx]
        while len(coeffs) > 1 and coeffs[-1] == 0:
            coeffs.pop()
        return coeffs

    def poincare_polynomial(self) -> list:
        """Poincare polynomial of the projective complement (coeffs in t).

        The central complement fibers over the projective one with fiber
        k^*, so pi_central(t) = (1+t) * pi_projective(t); the division is
        exact and checked.
        """
        mob = self.mobius()
        central = [0] * (self.n + 2)
        for idx, X in enumerate(self.flats_with_top()):
            central[X.rank] += mob[idx] * (-1) ** X.rank
        while len(central) > 1 and central[-1] == 0:
            central.pop()
        # divide by (1 + t)
        quotient = []
        rem = 0
        carry = list(central)
        out = [0] * (len(carry) - 1 if len(carry) > 1 else 1)
        work = list(carry)
        for d in range(len(work) - 1, 0, -1):
            out[d - 1] = work[d]
            work[d - 1] -= work[d]
            work[d] = 0
        if work[0] != 0:
            raise AssertionError("Poincare polynomial not divisible by (1+t)")
        if not out:
            out = [0]
        return out

    def complement_betti_numbers(self) -> list:
        return self.poincare_polynomial()

    # -- canonical labeling ----------------------------------------------------

    def _flat_families(self):
        """Nontrivial atom sets by rank (rank >= 2 flats determine the rest)."""
        fams = []
        for F in self.flats_with_top():
            if F.rank >= 2:
                fams.append((F.rank, F.atoms))
        return fams

    def canonical_labeling(self):
        """(permutation, encoding): relabeling of atoms minimizing the
        encoded flat family; invariant under any initial atom order."""
        if self._canonical is not None:
            return self._canonical
        k = self.k
        fams = self._flat_families()

        def refine(colors):
            while True:
                sigs = []
                for a in range(k):
                    sig = sorted(
                        (rank, len(atoms), tuple(sorted(colors[b] for b in atoms)))
                        for (rank, atoms) in fams
                        if a in atoms
                    )
                    sigs.append((colors[a], tuple(sig)))
                ranks = sorted(set(sigs))
                new = [ranks.index(s) for s in sigs]
                if new == colors:
                    return colors
                colors = new

        def encode(perm):
            # perm[a] = new position of atom a
            enc = sorted(
                (rank, tuple(sorted(perm[a] for a in atoms))) for rank, atoms in fams
            )
            return tuple(enc)

        best = [None]

        def assign(colors):
            classes: dict = {}
            for a in range(k):
                classes.setdefault(colors[a], []).append(a)
            nonsingleton = [c for c, mem in classes.items() if len(mem) > 1]
            if not nonsingleton:
                order = sorted(range(k), key=lambda a: colors[a])
                perm = [0] * k
                for pos, a in enumerate(order):
                    perm[a] = pos
                enc = encode(perm)
                if best[0] is None or enc < best[0][0]:
                    best[0] = (enc, tuple(perm))
                return
            target = min(nonsingleton)
            for a in classes[target]:
                newcolors = list(colors)
                newcolors[a] = -1  # individualize below every other color
                normalized = refine(_normalize_colors(newcolors))
                assign(normalized)

        def _normalize_colors(colors):
            ranks = sorted(set(colors))
            return [ranks.index(c) for c in colors]

        start = refine([0] * k)
        assign(start)
        self._canonical = (best[0][1], best[0][0])
        return self._canonical

    def canonical_hash(self) -> str:
        _, enc = self.canonical_labeling()
        payload = json.dumps(
            {"n": self.n, "k": self.k, "flats": [[r, list(s)] for r, s in enc]},
            sort_keys=True,
        )
        return hashlib.sha256(payload.encode()).hexdigest()

    def invariant_vector(self) -> tuple:
        """Cheap isomorphism invariants used for mismatch certificates."""
        rc = tuple(sorted(self.rank_counts().items()))
        sizes = tuple(
            sorted((F.rank, len(F.atoms)) for F in self.flats_with_top())
        )
        wh = tuple(sorted(self.whitney_numbers().items()))
        return (self.k, rc, sizes, wh)


@dataclass
class IsoResult:
    isomorphic: bool
    atom_map: tuple | None = None     # atom i of L1 -> atom_map[i] of L2
    certificate: str = ""


def intersection_lattice(A: Arrangement) -> Lattice:
    """All nonempty flats, labelled by maximal atom sets, via incremental
    closure (intersect existing flats with one hyperplane at a time)."""
    field = A.field
    k = A.k
    forms = [list(f) for f in A.forms]
    bottom = Flat(0, frozenset(), ())
    by_key = {(): bottom}
    frontier = [bottom]
    while frontier:
        new_frontier = []
        for F in frontier:
            for i in range(k):
                if i in F.atoms:
                    continue
                rows = list(F.rref) + [forms[i]]
                rr = _rref(field, rows)
                rank = len(rr)
                if rank == F.rank:
                    continue  # hyperplane already contains the flat
                if rr in by_key:
                    continue
                flat = Flat(rank, frozenset(), rr)
                by_key[rr] = flat
                new_frontier.append(flat)
        frontier = new_frontier
    # maximal atom labels
    flats = []
    central_top = None
    for rr, F in by_key.items():
        atoms = frozenset(
            i for i in range(k) if _in_rowspan(field, rr, forms[i])
        )
        flat = Flat(F.rank, atoms, rr)
        if F.rank == A.n + 1:
            central_top = flat
        else:
            flats.append(flat)
    return Lattice(A.n, k, flats, central_top)


def lattices_isomorphic(L1: Lattice, L2: Lattice) -> IsoResult:
    """Explicit atom bijection extending to a poset isomorphism, or a
    certified mismatch naming the distinguishing invariant."""
    if L1.k != L2.k:
        return IsoResult(False, None, f"atom counts differ: {L1.k} vs {L2.k}")
    inv1, inv2 = L1.invariant_vector(), L2.invariant_vector()
    if inv1[1] != inv2[1]:
        return IsoResult(
            False, None,
            f"flat counts per rank differ: {dict(inv1[1])} vs {dict(inv2[1])}",
        )
    if inv1[2] != inv2[2]:
        return IsoResult(False, None, "flat-size multisets per rank differ")
    if inv1[3] != inv2[3]:
        return IsoResult(
            False, None,
            f"Whitney numbers differ: {dict(inv1[3])} vs {dict(inv2[3])}",
        )
    perm1, enc1 = L1.canonical_labeling()
    perm2, enc2 = L2.canonical_labeling()
    if enc1 != enc2:
        return IsoResult(False, None, "canonical flat families differ")
    # atom a of L1 -> position perm1[a] -> atom of L2 with that position
    inv_perm2 = [0] * L2.k
    for a, pos in enumerate(perm2):
        inv_perm2[pos] = a
    atom_map = tuple(inv_perm2[perm1[a]] for a in range(L1.k))
    return IsoResult(True, atom_map, "canonical forms agree")


def verify_isomorphism(L1: Lattice, L2: Lattice, atom_map) -> bool:
    fams1 = {(r, frozenset(atom_map[a] for a in s)) for r, s in L1._flat_families()}
    fams2 = {(r, s) for r, s in L2._flat_families()}
    return fams1 == fams2
