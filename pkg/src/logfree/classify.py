"""Single entry point: the full dossier of one arrangement.

Combines the lattice invariants, the logarithmic module, its Betti data,
the local-freeness check, the freeness verdict (with the Saito
determinant as an independent certificate), the stable-freeness verdict,
and the cohomology table.  Resource caps surface as explicit
"undecided (budget)" outcomes, never as wrong verdicts.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field as dfield

from .arrangement import Arrangement, defining_polynomial, log_tangent_module
from .cohomology import (
    CohomologyReport,
    coanda_stably_free,
    cohomology_table,
    default_window,
    ext_is_finite_length,
    ext_is_zero,
    horrocks_split,
)
from .fastfree import (
    FreeVerdict,
    euler_saito_certificate,
    fast_free_verdict,
    minimal_generator_subset,
)
from .fields import PrimeField
from .groebner import Budget, BudgetExceeded
from .lattice import intersection_lattice
from .resolution import (
    hilbert_series_from_betti,
    is_free_module,
    minimal_free_resolution,
)


@dataclass
class ClassifyOptions:
    mode: str = "full"               # "full" or "fast"
    with_cohomology: bool = True
    window: tuple | None = None
    budget: int | None = None        # max reduction steps
    with_timings: bool = False


@dataclass
class Dossier:
    name: str | None
    field: str
    n: int
    k: int
    forms: list

    lattice_rank_counts: dict = dfield(default_factory=dict)
    lattice_size: int = 0
    complement_betti: list = dfield(default_factory=list)
    characteristic_polynomial: list = dfield(default_factory=list)
    whitney_numbers: dict = dfield(default_factory=dict)
    lattice_hash: str = ""
    essential_rank: int = 0

    generator_degrees: list = dfield(default_factory=list)
    module_rank: int = 0
    betti: dict = dfield(default_factory=dict)
    regularity: int | None = None
    projective_dimension: int | None = None

    locally_free: bool | None = None
    free: bool | None = None                # None = undecided
    exponents: list | None = None
    saito_certificate: str = "not attempted"
    stably_free: bool | None = None
    stably_free_note: str = ""
    free_method: str = ""
    cohomology: CohomologyReport | None = None
    notes: list = dfield(default_factory=list)
    undecided_reason: str = ""
    timings: dict = dfield(default_factory=dict)

    def exponent_sum_matches(self) -> bool | None:
        if not self.free or self.exponents is None:
            return None
        return sum(self.exponents) == self.k - 1


def _lattice_section(A: Arrangement, dossier: Dossier):
    lat = intersection_lattice(A)
    dossier.lattice_rank_counts = lat.rank_counts()
    dossier.lattice_size = len(lat.flats)
    dossier.complement_betti = lat.complement_betti_numbers()
    dossier.characteristic_polynomial = lat.characteristic_polynomial()
    dossier.whitney_numbers = lat.whitney_numbers()
    dossier.lattice_hash = lat.canonical_hash()
    dossier.essential_rank = A.essential_rank()
    return lat


def classify(A: Arrangement, options: ClassifyOptions | None = None) -> Dossier:
    options = options or ClassifyOptions()
    budget = Budget(options.budget) if options.budget else Budget()
    t_start = time.perf_counter()
    dossier = Dossier(
        name=A.name,
        field=A.field.name,
        n=A.n,
        k=A.k,
        forms=[[str(c) for c in f] for f in A.forms],
    )
    char = getattr(A.field, "char", 0)

    t0 = time.perf_counter()
    _lattice_section(A, dossier)
    dossier.timings["lattice"] = time.perf_counter() - t0

    try:
        if options.mode == "fast" and A.n <= 3:
            _classify_fast(A, dossier, budget, options)
        else:
            _classify_full(A, dossier, budget, options)
    except BudgetExceeded as exc:
        dossier.undecided_reason = f"undecided (budget): {exc}"
        dossier.free = None
        dossier.stably_free = None

    # bookkeeping invariants
    if dossier.free:
        if dossier.stably_free is False:
            raise AssertionError("free arrangement classified as not stably free")
        if dossier.exponents is not None and sum(dossier.exponents) != A.k - 1:
            if char and A.k % char == 0:
                dossier.notes.append(
                    f"exponent sum {sum(dossier.exponents)} != k-1 = {A.k - 1}: "
                    f"characteristic {char} divides k (bad-characteristic effect)"
                )
            else:
                raise AssertionError("free exponents do not sum to k-1")
    dossier.timings["total"] = time.perf_counter() - t_start
    if not options.with_timings:
        dossier.timings = {}
    return dossier


def _classify_fast(A: Arrangement, dossier: Dossier, budget: Budget,
                   options: ClassifyOptions):
    """Hilbert-series-certified freeness; n <= 3 keeps Coanda vacuous."""
    t0 = time.perf_counter()
    fv = fast_free_verdict(A, budget)
    dossier.timings["free"] = time.perf_counter() - t0
    dossier.free = fv.free
    dossier.exponents = fv.exponents
    dossier.free_method = f"fast: {fv.method}"
    if A.n == 2:
        dossier.locally_free = True
        dossier.notes.append(
            "locally free automatically: rank-2 reflexive sheaf on a surface"
        )
    dossier.stably_free = True
    dossier.stably_free_note = "vacuous range (n <= 3)"
    if fv.free:
        dossier.generator_degrees = list(fv.exponents)


def _classify_full(A: Arrangement, dossier: Dossier, budget: Budget,
                   options: ClassifyOptions):
    n, k = A.n, A.k

    t0 = time.perf_counter()
    lt = log_tangent_module(A, budget)
    dossier.timings["module"] = time.perf_counter() - t0
    dossier.generator_degrees = sorted(v.degree() for v in lt.kernel_gens)
    dossier.module_rank = lt.rank

    t0 = time.perf_counter()
    res = minimal_free_resolution(lt.module, budget)
    dossier.timings["resolution"] = time.perf_counter() - t0
    dossier.betti = res.betti()
    dossier.regularity = res.regularity()
    dossier.projective_dimension = res.length

    free = res.length == 0
    dossier.free = free
    dossier.exponents = sorted(res.modules[0].shifts) if free else None
    dossier.free_method = "resolution length"

    # Saito determinant as an independent certificate
    mingens = minimal_generator_subset(lt.kernel_gens, lt.ambient)
    status, scalar = (
        euler_saito_certificate(A, mingens)
        if len(mingens) == n
        else ("inconclusive", None)
    )
    if free:
        if status == "certified":
            dossier.saito_certificate = f"certified (det = {scalar} * f)"
        else:
            char = getattr(A.field, "char", 0)
            if char and k % char == 0:
                dossier.saito_certificate = (
                    "inconclusive (char divides k: Euler determinant vanishes)"
                )
            else:
                raise AssertionError(
                    "free module but Saito determinant not certified"
                )
    else:
        if status == "certified":
            raise AssertionError("Saito certificate fired on a non-free module")
        dossier.saito_certificate = "inconclusive (module not free)"

    t0 = time.perf_counter()
    locally_free = all(
        ext_is_finite_length(lt.module, j, budget, res)
        for j in range(1, res.length + 1)
    )
    dossier.locally_free = locally_free
    dossier.timings["locally_free"] = time.perf_counter() - t0

    t0 = time.perf_counter()
    split = horrocks_split(lt.module, n, budget, res, locally_free=locally_free)
    if split.splits != free:
        raise AssertionError("Horrocks verdict disagrees with resolution length")
    st = coanda_stably_free(lt.module, n, budget, res, locally_free=locally_free)
    dossier.stably_free = st.stably_free
    dossier.stably_free_note = st.note
    if not locally_free:
        dossier.notes.append(
            "verdicts are module-level only: sheaf not certified locally free"
        )
    dossier.timings["criteria"] = time.perf_counter() - t0

    if options.with_cohomology:
        t0 = time.perf_counter()
        window = options.window or default_window(k, n)
        rep = cohomology_table(
            lt.module, n, window, budget, res,
            provenance=(
                "default [-(k+n), k+n]" if options.window is None
                else "caller-specified"
            ),
        )
        hs = hilbert_series_from_betti(res.betti(), A.ring.nvars)
        for d in range(window[0], window[1] + 1):
            chi = rep.euler_characteristic(d)
            hp = hs.polynomial_value(d)
            if chi != hp:
                raise AssertionError(
                    f"Euler characteristic {chi} != Hilbert polynomial {hp} at twist {d}"
                )
        dossier.cohomology = rep
        dossier.timings["cohomology"] = time.perf_counter() - t0


def saito_check(A: Arrangement, generators) -> tuple:
    """Public surface of the determinant certificate.

    ``generators`` are n candidate elements of the log module; the check
    assembles the Euler field with them and compares det against c*f.
    Returns (ok, scalar): determinant 0 or a non-multiple is inconclusive,
    never a refutation.
    """
    status, scalar = euler_saito_certificate(A, list(generators))
    return status == "certified", scalar
