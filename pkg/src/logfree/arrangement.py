"""Hyperplane arrangements in projective n-space and their log modules.

An arrangement is a list of pairwise non-proportional linear forms in
n+1 variables over an exact field.  The module of logarithmic vector
fields is the kernel of the row map given by the partial derivatives of
the defining polynomial f = prod f_i, i.e. derivations annihilating f.
Note this kernel convention omits the Euler field (the Euler contraction
gives k*f, not 0); exponents of free arrangements then sum to k-1 in
good characteristic.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .fields import QQ, FieldError, parse_field
from .groebner import Budget, syzygy_module
from .modules import FreeModule, GradedMap, GradedModule, Vec
from .poly import Poly, PolyRing, product


class ArrangementError(ValueError):
    """Invalid arrangement data (zero forms, repeated hyperplanes, ...)."""

    def __init__(self, message: str, line: int | None = None):
        super().__init__(message)
        self.line = line


def normalize_form(field, coeffs):
    """Scale so the first nonzero coefficient is 1; reject the zero form."""
    vals = tuple(field(c) for c in coeffs)
    lead = None
    for c in vals:
        if not field.is_zero(c):
            lead = c
            break
    if lead is None:
        raise ArrangementError("hyperplane form is identically zero")
    inv = field.inv(lead)
    return tuple(field.mul(inv, c) for c in vals)


class Arrangement:
    """k distinct hyperplanes in P^n over an exact field."""

    def __init__(self, field, n: int, forms: Sequence[Sequence], name: str | None = None):
        if n < 1:
            raise ArrangementError("ambient dimension must be at least 1")
        if not forms:
            raise ArrangementError("an arrangement needs at least one hyperplane")
        self.field = field
        self.n = n
        normalized = []
        seen = set()
        for idx, row in enumerate(forms):
            if len(row) != n + 1:
                raise ArrangementError(
                    f"form {idx} has {len(row)} coefficients, expected {n + 1}"
                )
            nf = normalize_form(field, row)
            if nf in seen:
                raise ArrangementError(
                    f"form {idx} is proportional to an earlier hyperplane"
                )
            seen.add(nf)
            normalized.append(nf)
        self.forms = tuple(normalized)
        self.name = name
        self._ring = PolyRing(field, n + 1, tuple(f"x{i}" for i in range(n + 1)))

    @property
    def k(self) -> int:
        return len(self.forms)

    @property
    def ring(self) -> PolyRing:
        return self._ring

    def linear_forms(self) -> list:
        return [self._ring.linear_form(c) for c in self.forms]

    def essential_rank(self) -> int:
        """Rank of the coefficient matrix (n+1 means essential)."""
        rows = [list(f) for f in self.forms]
        return _row_rank(self.field, rows)

    def sorted_key(self) -> tuple:
        """Canonical identity under hyperplane permutation."""
        return tuple(sorted(tuple(str(c) for c in f) for f in self.forms))

    def permuted(self, perm: Sequence[int]) -> "Arrangement":
        return Arrangement(
            self.field, self.n, [self.forms[i] for i in perm], name=self.name
        )

    def coordinate_change(self, matrix) -> "Arrangement":
        """Substitute x -> matrix * x; forms pick up the matrix on the right."""
        fld = self.field
        m = [[fld(v) for v in row] for row in matrix]
        size = self.n + 1
        if len(m) != size or any(len(r) != size for r in m):
            raise ArrangementError("coordinate change must be (n+1)x(n+1)")
        if _row_rank(fld, [row[:] for row in m]) != size:
            raise ArrangementError("coordinate change must be invertible")
        new_forms = []
        for f in self.forms:
            new = [fld.zero] * size
            for j in range(size):
                acc = fld.zero
                for i in range(size):
                    acc = fld.add(acc, fld.mul(f[i], m[i][j]))
                new[j] = acc
            new_forms.append(new)
        return Arrangement(self.field, self.n, new_forms, name=self.name)

    def __repr__(self):
        nm = f" '{self.name}'" if self.name else ""
        return f"Arrangement{nm}(n={self.n}, k={self.k}, {self.field.name})"


def _row_rank(field, rows) -> int:
    rows = [list(r) for r in rows]
    rank = 0
    ncols = len(rows[0]) if rows else 0
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
    return rank


# ---------------------------------------------------------------------------
# Defining polynomial, Jacobian map, log tangent module
# ---------------------------------------------------------------------------


def defining_polynomial(A: Arrangement) -> Poly:
    """f = product of the linear forms; homogeneous of degree k, squarefree."""
    return product(A.linear_forms(), A.ring)


def jacobian_row(A: Arrangement) -> list:
    f = defining_polynomial(A)
    return [f.partial(i) for i in range(A.n + 1)]


def jacobian_map(A: Arrangement) -> GradedMap:
    """The partials row, S^{n+1} -> S(k-1)."""
    partials = jacobian_row(A)
    source = FreeModule(A.ring, (0,) * (A.n + 1))
    target = FreeModule(A.ring, (-(A.k - 1),))
    cols = [target.vec_from_polys([p]) for p in partials]
    return GradedMap(source, target, cols)


@dataclass
class LogTangentModule:
    """Kernel of the Jacobian row with both views: embedded and presented."""

    arrangement: Arrangement
    ambient: FreeModule           # S^{n+1}
    kernel_gens: list             # vectors spanning the kernel inside S^{n+1}
    module: GradedModule          # finite presentation of the kernel

    @property
    def rank(self) -> int:
        return self.arrangement.n

    def generator_degrees(self) -> list:
        return [v.degree() for v in self.kernel_gens]


def log_tangent_module(A: Arrangement, budget: Budget | None = None) -> LogTangentModule:
    """T_A as a module: saturated (second syzygy), rank n; every generator
    contracts to zero against the Jacobian row, exactly."""
    from .fastfree import minimal_generator_subset

    phi = jacobian_map(A)
    syz, syz_free = syzygy_module(list(phi.columns), phi.target, budget)
    raw = [Vec(phi.source, s.terms) for s in syz]
    gens = minimal_generator_subset(raw, phi.source)
    rels, rel_free = syzygy_module(gens, phi.source, budget)
    F0 = FreeModule(A.ring, tuple(v.degree() for v in gens))
    module = GradedModule(F0, [Vec(F0, s.terms) for s in rels])
    lt = LogTangentModule(A, phi.source, gens, module)
    for g in gens:
        if not phi.apply(g).is_zero():
            raise AssertionError("kernel generator does not annihilate the Jacobian")
    return lt


# ---------------------------------------------------------------------------
# Catalog of named arrangements
# ---------------------------------------------------------------------------


def _generic_forms(n: int, k: int):
    """Moment-curve coefficients (1, t, t^2, ..): any n+1 forms independent."""
    forms = []
    for j in range(k):
        t = j + 1
        forms.append(tuple(Fraction(t) ** i for i in range(n + 1)))
    return forms


def _braid_forms(m: int):
    """Braid A_m essentialized in P^{m-2}: x_i - x_j with x_{m-1} = 0."""
    nv = m - 1
    forms = []
    for i in range(m - 1):
        for j in range(i + 1, m):
            row = [0] * nv
            if j < m - 1:
                row[i] = 1
                row[j] = -1
            else:
                row[i] = 1
            forms.append(tuple(row))
    return forms


def catalog_names() -> list:
    return [
        "boolean-<n>",
        "concurrent-3",
        "generic-<k>-<n>",
        "nearpencil-<k>-2",
        "braid-<m>",
    ]


def catalog(name: str, field=QQ) -> Arrangement:
    """Named arrangements with exact rational coefficients."""
    parts = name.split("-")
    try:
        if parts[0] == "boolean" and len(parts) == 2:
            n = int(parts[1])
            forms = []
            for i in range(n + 1):
                row = [0] * (n + 1)
                row[i] = 1
                forms.append(row)
            return Arrangement(field, n, forms, name=name)
        if name == "concurrent-3":
            return Arrangement(field, 2, [(1, 0, 0), (0, 1, 0), (1, 1, 0)], name=name)
        if parts[0] == "generic" and len(parts) == 3:
            k, n = int(parts[1]), int(parts[2])
            if k < 1 or n < 1:
                raise ArrangementError(f"bad catalog parameters in {name!r}")
            return Arrangement(field, n, _generic_forms(n, k), name=name)
        if parts[0] == "nearpencil" and len(parts) == 3 and parts[2] == "2":
            k = int(parts[1])
            if k < 3:
                raise ArrangementError("near-pencil needs k >= 3")
            forms = [(1, Fraction(j), 0) for j in range(k - 1)]
            forms.append((0, 0, 1))
            return Arrangement(field, 2, forms, name=name)
        if parts[0] == "braid" and len(parts) == 2:
            m = int(parts[1])
            if m < 3:
                raise ArrangementError("braid-<m> needs m >= 3")
            return Arrangement(field, m - 2, _braid_forms(m), name=name)
    except (ValueError, IndexError):
        pass
    raise ArrangementError(
        f"unknown catalog name {name!r}; known patterns: {', '.join(catalog_names())}"
    )


# ---------------------------------------------------------------------------
# File format
# ---------------------------------------------------------------------------
#
#   P <n> <field>          field = Q or F<p>
#   c0 c1 ... cn           one hyperplane per line, integers or num/den
#   # comments and blank lines allowed


def parse_arrangement_text(text: str, name: str | None = None) -> Arrangement:
    header = None
    forms = []
    field = None
    n = None
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if header is None:
            bits = line.split()
            if len(bits) != 3 or bits[0] != "P":
                raise ArrangementError(
                    f"line {lineno}: expected header 'P <n> <field>'", line=lineno
                )
            try:
                n = int(bits[1])
            except ValueError:
                raise ArrangementError(
                    f"line {lineno}: bad dimension {bits[1]!r}", line=lineno
                )
            try:
                field = parse_field(bits[2])
            except FieldError as exc:
                raise ArrangementError(f"line {lineno}: {exc}", line=lineno)
            header = line
            continue
        bits = line.split()
        if len(bits) != n + 1:
            raise ArrangementError(
                f"line {lineno}: expected {n + 1} coefficients, got {len(bits)}",
                line=lineno,
            )
        row = []
        for b in bits:
            try:
                value = Fraction(b)
            except (ValueError, ZeroDivisionError):
                raise ArrangementError(
                    f"line {lineno}: malformed coefficient {b!r}", line=lineno
                )
            try:
                row.append(field(value))
            except ZeroDivisionError:
                raise ArrangementError(
                    f"line {lineno}: coefficient {b!r} has no image in {field.name}",
                    line=lineno,
                )
        forms.append(row)
    if header is None:
        raise ArrangementError("empty arrangement file (no header)", line=1)
    if not forms:
        raise ArrangementError("arrangement file lists no hyperplanes", line=1)
    try:
        return Arrangement(field, n, forms, name=name)
    except ArrangementError:
        raise


def parse_arrangement_file(path: str) -> Arrangement:
    with open(path, "r", encoding="utf-8") as fh:
        text = fh.read()
    return parse_arrangement_text(text, name=None)


def serialize_arrangement(A: Arrangement) -> str:
    lines = [f"P {A.n} {A.field.name}"]
    for f in A.forms:
        lines.append(" ".join(str(c) for c in f))
    return "\n".join(lines) + "\n"


def resolve_arrangement(spec: str, field=None) -> Arrangement:
    """Accept a file path or a catalog name anywhere a FILE is expected."""
    import os

    if os.path.exists(spec):
        A = parse_arrangement_file(spec)
        if field is not None and field != A.field:
            return Arrangement(field, A.n, [list(f) for f in A.forms], name=A.name)
        return A
    return catalog(spec, field=field or QQ)
