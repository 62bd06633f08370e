"""Product correlations of n-party +-1 outcome arrays and parity systems.

A mean of N*M products of +-1 values can only land on the lattice
{-1 + 2k/(NM)}; hitting -1 (or +1) exactly pins every single product.
Product constraints over +-1 observables map to linear systems over
GF(2) -- encode v = +-1 as the bit s = (1 - v)/2, so products become
sums and -1 targets become 1-bits.  Gaussian elimination then decides
satisfiability, returning either a witness assignment or a certificate:
a subset of constraints whose combination forces +1 = -1 because every
variable appears an even number of times while the required products
multiply to -1.
"""

from __future__ import annotations

import json
from collections import Counter
from dataclasses import dataclass
from fractions import Fraction
from typing import Mapping, Sequence

import numpy as np

#: Exhaustive enumeration is capped here for tractability.
MAX_ENUM_VARIABLES = 24

_ENUM_BLOCK = 1 << 16


@dataclass(frozen=True)
class OutcomeArray:
    """parties x N x M array of +-1 outcomes.

    ``settings`` records the analyzer parameters of the parties beyond the
    first (shift, angle, ...) as metadata; it does not enter any
    computation here.
    """

    outcomes: np.ndarray
    settings: tuple[float, ...] = ()

    def __post_init__(self) -> None:
        arr = np.asarray(self.outcomes)
        if arr.ndim != 3:
            raise ValueError(f"outcomes must be parties x N x M, got shape {arr.shape}")
        parties, n, m = arr.shape
        if parties < 2:
            raise ValueError(f"need >= 2 parties, got {parties}")
        if n < 1 or m < 1:
            raise ValueError(f"N and M must be >= 1, got {n} x {m}")
        if not np.all(np.abs(arr) == 1):
            raise ValueError("every outcome must be exactly +1 or -1")
        if self.settings and len(self.settings) != parties - 1:
            raise ValueError(
                f"expected {parties - 1} settings (one per party beyond the first), "
                f"got {len(self.settings)}"
            )
        frozen = arr.astype(np.int8)
        frozen.flags.writeable = False
        object.__setattr__(self, "outcomes", frozen)
        object.__setattr__(self, "settings", tuple(float(s) for s in self.settings))

    @property
    def parties(self) -> int:
        return self.outcomes.shape[0]

    @property
    def N(self) -> int:
        return self.outcomes.shape[1]

    @property
    def M(self) -> int:
        return self.outcomes.shape[2]

    def cell_products(self) -> np.ndarray:
        """The N x M array of per-cell outcome products."""
        return np.prod(self.outcomes, axis=0, dtype=np.int64)


def triple_mean(arr: OutcomeArray) -> Fraction:
    """Exact mean (1/(NM)) * sum over cells of the per-cell product."""
    return Fraction(int(arr.cell_products().sum()), arr.N * arr.M)


def achievable_values(n: int, m: int) -> tuple[Fraction, ...]:
    """The lattice {-1 + 2k/(NM) : k = 0..NM} of achievable product means."""
    if n < 1 or m < 1:
        raise ValueError(f"N and M must be >= 1, got {n} x {m}")
    nm = n * m
    return tuple(Fraction(2 * k - nm, nm) for k in range(nm + 1))


def nearest_achievable(target: float, n: int, m: int) -> tuple[Fraction, float]:
    """Nearest lattice point to a target correlation, and its distance.

    Finite +-1 data can only average onto the lattice, so a generic target
    (e.g. a harmonic value) is approached but not attained.
    """
    if n < 1 or m < 1:
        raise ValueError(f"N and M must be >= 1, got {n} x {m}")
    nm = n * m
    k = min(nm, max(0, round((target + 1.0) * nm / 2.0)))
    best = Fraction(2 * k - nm, nm)
    return best, abs(float(best) - target)


@dataclass(frozen=True)
class PerfectCorrelationReport:
    """Verdict on whether a product mean equals a +-1 target exactly."""

    holds: bool
    target: int
    mean: Fraction
    violating_cells: tuple[tuple[int, int], ...]
    explanation: str

    def __bool__(self) -> bool:
        return self.holds


def perfect_correlation_witness(arr: OutcomeArray, target: int) -> PerfectCorrelationReport:
    """Check a product mean against a perfect (anti)correlation target.

    A mean of -1 is attainable only when every per-cell product is -1
    (an average of +-1 terms cannot cancel its way to an endpoint), so
    the violating cells are the complete explanation; dually for +1.
    """
    if target not in (1, -1):
        raise ValueError(f"target must be +1 or -1, got {target!r}")
    products = arr.cell_products()
    mean = Fraction(int(products.sum()), arr.N * arr.M)
    bad = np.argwhere(products != target)
    cells = tuple((int(j), int(k)) for j, k in bad)
    holds = mean == target
    if holds:
        explanation = (
            f"mean = {target:+d}: every one of the {arr.N * arr.M} cell products "
            f"equals {target:+d}"
        )
    else:
        shown = ", ".join(str(c) for c in cells[:8])
        suffix = ", ..." if len(cells) > 8 else ""
        explanation = (
            f"mean = {mean} != {target:+d}: {len(cells)} of {arr.N * arr.M} cell "
            f"products differ (cells {shown}{suffix})"
        )
    return PerfectCorrelationReport(
        holds=holds,
        target=target,
        mean=mean,
        violating_cells=cells,
        explanation=explanation,
    )


@dataclass(frozen=True)
class ParitySystem:
    """Product constraints over +-1 variables.

    Each constraint requires the product of a non-empty subset of the
    declared variables to equal +1 or -1.
    """

    variables: tuple[str, ...]
    constraints: tuple[tuple[tuple[str, ...], int], ...]

    def __post_init__(self) -> None:
        variables = tuple(str(v) for v in self.variables)
        if len(set(variables)) != len(variables):
            raise ValueError("duplicate variable names")
        declared = set(variables)
        normalized = []
        for i, (vs, product) in enumerate(self.constraints):
            vs = tuple(str(v) for v in vs)
            if not vs:
                raise ValueError(f"constraint {i} references no variables")
            if len(set(vs)) != len(vs):
                raise ValueError(f"constraint {i} repeats a variable")
            undeclared = sorted(set(vs) - declared)
            if undeclared:
                raise ValueError(f"constraint {i} references undeclared {undeclared}")
            if product not in (1, -1):
                raise ValueError(f"constraint {i} product must be +1 or -1, got {product!r}")
            normalized.append((vs, int(product)))
        object.__setattr__(self, "variables", variables)
        object.__setattr__(self, "constraints", tuple(normalized))

    def to_json(self) -> str:
        doc = {
            "variables": list(self.variables),
            "constraints": [
                {"vars": list(vs), "product": product} for vs, product in self.constraints
            ],
        }
        return json.dumps(doc, indent=2)

    @classmethod
    def from_json(cls, text: str) -> "ParitySystem":
        doc = json.loads(text)
        try:
            variables = tuple(doc["variables"])
            constraints = tuple(
                (tuple(c["vars"]), int(c["product"])) for c in doc["constraints"]
            )
        except (KeyError, TypeError) as exc:
            raise ValueError(f"malformed parity-system document: {exc}") from exc
        return cls(variables=variables, constraints=constraints)


@dataclass(frozen=True)
class ParityVerdict:
    """Outcome of deciding a parity system.

    SAT verdicts carry a witness assignment.  UNSAT verdicts from the
    GF(2) elimination carry a certificate (constraint indices whose
    combination is inconsistent); the brute-force enumerator reports
    UNSAT without one.
    """

    satisfiable: bool
    witness: dict[str, int] | None = None
    certificate: tuple[int, ...] | None = None

    def __post_init__(self) -> None:
        if self.satisfiable:
            if self.witness is None or self.certificate is not None:
                raise ValueError("SAT verdicts carry a witness and no certificate")
        else:
            if self.witness is not None:
                raise ValueError("UNSAT verdicts carry no witness")


def build_ghz_parity_system() -> ParitySystem:
    """Three-party x/y-observable system with an unsatisfiable sign pattern.

    The first three constraints force the product Ax*Bx*Cx to +1 (each
    variable appears twice across them, and their targets multiply to +1)
    while the fourth demands -1: an odd number of -1s cannot cancel.
    """
    return ParitySystem(
        variables=("Ax", "Ay", "Bx", "By", "Cx", "Cy"),
        constraints=(
            (("Ax", "By", "Cy"), 1),
            (("Ay", "Bx", "Cy"), 1),
            (("Ay", "By", "Cx"), 1),
            (("Ax", "Bx", "Cx"), -1),
        ),
    )


def verify_witness(system: ParitySystem, assignment: Mapping[str, int]) -> bool:
    """True iff the assignment satisfies every constraint of the system."""
    for vs, product in system.constraints:
        p = 1
        for v in vs:
            p *= assignment[v]
        if p != product:
            return False
    return True


def verify_certificate(system: ParitySystem, indices: Sequence[int]) -> bool:
    """True iff the indexed constraints combine to the contradiction +1 = -1.

    Valid certificates mention every variable an even number of times
    (so the left-hand sides cancel to +1) while the right-hand products
    multiply to -1.
    """
    counts: Counter[str] = Counter()
    rhs = 1
    for i in indices:
        vs, product = system.constraints[i]
        counts.update(vs)
        rhs *= product
    return bool(indices) and all(c % 2 == 0 for c in counts.values()) and rhs == -1


def solve_parity(system: ParitySystem) -> ParityVerdict:
    """Decide a parity system by GF(2) Gaussian elimination.

    Constraint rows are int bitsets over the variables plus a right-hand
    bit, augmented with a provenance bitset over the original constraint
    indices.  SAT: pivot variables are read off the reduced rows with all
    free variables set to +1.  UNSAT: the provenance of the inconsistent
    row 0 = 1 is the certificate.  Either answer is re-verified by
    substitution / parity recount before it is returned.
    """
    index = {v: i for i, v in enumerate(system.variables)}
    work: list[list[int]] = []
    for ci, (vs, product) in enumerate(system.constraints):
        mask = 0
        for v in vs:
            mask |= 1 << index[v]
        rhs = 1 if product == -1 else 0
        work.append([mask, rhs, 1 << ci])

    n_vars = len(system.variables)
    pivot_row_of: dict[int, int] = {}
    rank = 0
    for col in range(n_vars):
        sel = next(
            (i for i in range(rank, len(work)) if (work[i][0] >> col) & 1), None
        )
        if sel is None:
            continue
        work[rank], work[sel] = work[sel], work[rank]
        for i in range(len(work)):
            if i != rank and (work[i][0] >> col) & 1:
                work[i][0] ^= work[rank][0]
                work[i][1] ^= work[rank][1]
                work[i][2] ^= work[rank][2]
        pivot_row_of[col] = rank
        rank += 1

    for mask, rhs, provenance in work:
        if mask == 0 and rhs == 1:
            certificate = tuple(
                i for i in range(len(system.constraints)) if (provenance >> i) & 1
            )
            if not verify_certificate(system, certificate):
                raise RuntimeError("internal error: elimination produced a bad certificate")
            return ParityVerdict(satisfiable=False, certificate=certificate)

    # reduced row echelon + free variables at bit 0 (+1) makes each pivot
    # value just the row's right-hand bit
    witness = {}
    for i, v in enumerate(system.variables):
        bit = work[pivot_row_of[i]][1] if i in pivot_row_of else 0
        witness[v] = 1 - 2 * bit
    if not verify_witness(system, witness):
        raise RuntimeError("internal error: elimination produced a bad witness")
    return ParityVerdict(satisfiable=True, witness=witness)


def _parity16_table() -> np.ndarray:
    t = np.arange(1 << 16, dtype=np.uint16)
    t ^= t >> 8
    t ^= t >> 4
    t ^= t >> 2
    t ^= t >> 1
    return (t & 1).astype(np.uint8)


_PARITY16: np.ndarray | None = None


def enumerate_parity(system: ParitySystem) -> ParityVerdict:
    """Brute-force oracle: try all 2^n +-1 assignments.

    Assignments are scanned in lexicographic variable order with +1
    before -1, so the first satisfying one is returned when SAT.  This
    path is deliberately independent of the GF(2) elimination and reports
    UNSAT without a certificate.
    """
    global _PARITY16
    n = len(system.variables)
    if n > MAX_ENUM_VARIABLES:
        raise ValueError(
            f"enumeration is capped at {MAX_ENUM_VARIABLES} variables, got {n}"
        )
    if _PARITY16 is None:
        _PARITY16 = _parity16_table()
    index = {v: i for i, v in enumerate(system.variables)}
    # bit (n-1-i) of the assignment integer encodes variable i; set bit = -1
    masks = []
    targets = []
    for vs, product in system.constraints:
        mask = 0
        for v in vs:
            mask |= 1 << (n - 1 - index[v])
        masks.append(np.uint32(mask))
        targets.append(np.uint8(1 if product == -1 else 0))

    total = 1 << n
    for start in range(0, total, _ENUM_BLOCK):
        block = np.arange(start, min(start + _ENUM_BLOCK, total), dtype=np.uint32)
        ok = np.ones(block.shape, dtype=bool)
        for mask, target in zip(masks, targets):
            x = block & mask
            parity = _PARITY16[x & np.uint32(0xFFFF)] ^ _PARITY16[x >> np.uint32(16)]
            ok &= parity == target
        hits = np.flatnonzero(ok)
        if hits.size:
            first = start + int(hits[0])
            witness = {
                v: 1 - 2 * ((first >> (n - 1 - i)) & 1)
                for i, v in enumerate(system.variables)
            }
            return ParityVerdict(satisfiable=True, witness=witness)
    return ParityVerdict(satisfiable=False)
