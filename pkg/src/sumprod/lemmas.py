"""Constructive covering, subset-extraction, witness and bucket machinery.

Every operation here returns a certificate that tests can re-check
independently: translate lists, explicit subsets, witness quadruples, or
exact integer inequalities.  All argmax selections tie-break toward the
smallest element/index so certificates are deterministic.
"""

from __future__ import annotations

import math
import os
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .core import (
    MINUS,
    PLUS,
    FSet,
    _require_nonempty,
    _require_same_field,
    _rotate,
    negate,
    rep_fn,
    scale,
    sumset,
)
from .energy import _mult_mask, multiplicative_energy
from .errors import (
    BadEpsilon,
    BadParameters,
    EmptyDecomposition,
    EmptyOperand,
    GuardExceeded,
    RatioSetFull,
    TooSmall,
)
from .core import ratio_set

LN100 = math.log(100.0)

# Desk-scale guards for the exhaustive existential searches.
KATZ_SHEN_MAX_BASE = 14
KATZ_SHEN_MAX_TERMS = 3

# max_j 16^j |Y_j|^3  >=  CHANG_CONSTANT * Ex(Y,Z)^4 / (|Y|^4 * max(m, |Z|))
# where m is the largest bucket size; see chang_floor_holds for the proof.
CHANG_CONSTANT_DEN = 400_000


def _guards_lifted() -> bool:
    return os.environ.get("SPW_GUARD_OVERRIDE") == "1"


def _check_guard(condition: bool, message: str) -> None:
    if not condition and not _guards_lifted():
        raise GuardExceeded(message)


@dataclass(frozen=True)
class CoverResult:
    """Greedy 99%-covering of B1 by translates of B2 (offsets c: c +/- B2)."""

    mode: str
    translates: tuple[int, ...]
    covered: FSet
    ratio_k: Fraction
    budget: int
    b1_card: int
    b2_card: int


def greedy_cover(B1: FSet, B2: FSet, mode: str = PLUS) -> CoverResult:
    """Cover 99% (in cardinality) of B1 with translates of B2.

    mode=plus uses translates c+B2 and the doubling ratio |B1+B2|/|B2|;
    mode=minus uses c-B2 and |B1-B2|/|B2|.  Each greedy step covers at
    least |U|/K of the uncovered part U: the covering counts r(c) =
    |(c+B2) cap U| satisfy sum_c r = |U||B2| and sum_c r^2 =
    sum_d r_{U+B2}(d)^2 >= (|U||B2|)^2/|U+B2|, so the best translate
    covers >= sum r^2 / sum r >= |U||B2|/|U+B2| >= |U|/K elements
    (symmetrically for minus).  Hence ceil(ln(100) * K) + 1 steps always
    suffice; both the coverage and the budget are asserted on every run.
    """
    field = _require_same_field(B1, B2)
    _require_nonempty(B1, B2)
    if mode not in (PLUS, MINUS):
        raise ValueError(f"bad mode {mode!r}")
    p, full = field.p, field.full_mask
    op = sumset(B1, B2, mode)
    ratio_k = Fraction(op.card, B2.card)
    budget = math.ceil(LN100 * float(ratio_k)) + 1
    base = B2.mask if mode == PLUS else negate(B2).mask
    uncovered = B1.mask
    covered_mask = 0
    translates: list[int] = []
    # stop once <= 1% of B1 is uncovered (exact integer comparison)
    while 100 * uncovered.bit_count() > B1.card:
        best_c, best_gain = -1, 0
        for c in range(p):
            gain = (_rotate(base, c, p, full) & uncovered).bit_count()
            if gain > best_gain:
                best_c, best_gain = c, gain
        translates.append(best_c)
        hit = _rotate(base, best_c, p, full) & uncovered
        covered_mask |= hit
        uncovered &= ~hit
    covered = field.fset_from_mask(covered_mask)
    assert 100 * (B1.card - covered.card) <= B1.card, "coverage invariant broken"
    assert len(translates) <= budget, "covering budget exceeded"
    return CoverResult(mode, tuple(translates), covered, ratio_k, budget, B1.card, B2.card)


def _submasks(mask: int):
    sub = mask
    while True:
        yield sub
        if sub == 0:
            return
        sub = (sub - 1) & mask


def katz_shen_subset(
    B0: FSet, Bs: Sequence[FSet], eps: Fraction | float
) -> tuple[FSet, Fraction]:
    """Exhaustive Katz-Shen subset extraction at desk scale.

    Returns the X in B0 with |X| >= (1-eps)|B0| minimizing
    |X+B1+...+Bk| / (prod_i(|Bi+B0|/|B0|) * |X|), plus that minimum as an
    exact rational.  Guarded to |B0| <= 14 and k <= 3 (exhaustive over
    all 2^|B0| subsets).
    """
    _require_nonempty(B0)
    field = _require_same_field(B0, *Bs) if Bs else B0.field
    eps = Fraction(eps)
    if not 0 < eps < 1:
        raise BadEpsilon(f"eps must be in (0, 1), got {eps}")
    _check_guard(B0.card <= KATZ_SHEN_MAX_BASE, f"|B0|={B0.card} exceeds exhaustive guard")
    _check_guard(len(Bs) <= KATZ_SHEN_MAX_TERMS, f"k={len(Bs)} exceeds exhaustive guard")
    if not Bs:
        return B0, Fraction(1)
    threshold = (1 - eps) * B0.card
    tail = Bs[0]
    for extra in Bs[1:]:
        tail = sumset(tail, extra)
    denom = Fraction(1)
    for Bi in Bs:
        denom *= Fraction(sumset(Bi, B0).card, B0.card)
    best_ratio: Fraction | None = None
    best_mask = 0
    for sub in _submasks(B0.mask):
        card = sub.bit_count()
        if card == 0 or card < threshold:
            continue
        X = field.fset_from_mask(sub)
        ratio = Fraction(sumset(X, tail).card) / (denom * card)
        if best_ratio is None or ratio < best_ratio or (ratio == best_ratio and sub < best_mask):
            best_ratio, best_mask = ratio, sub
    assert best_ratio is not None  # X = B0 always qualifies
    return field.fset_from_mask(best_mask), best_ratio


@dataclass(frozen=True)
class GkWitness:
    """A quadruple (a,b,c,d), a != b, with its measured witness cardinality."""

    quadruple: tuple[int, int, int, int]
    variant: str
    expr_card: int
    target_num: int
    target_den: int


def _witness_card(P: FSet, d1: int, d2: int, variant: str) -> int:
    first = scale(P, d1)
    inner = sumset(first, first, PLUS if variant == "plus_plus" else MINUS)
    return sumset(inner, scale(P, d2)).card


def gk_witness(
    A1: FSet, variant: str = "plus_plus", probes: Sequence[FSet] | None = None
) -> GkWitness:
    """Exhaustive search for the best quadruple (a,b,c,d), a != b.

    Maximizes the minimum over probes of |(b-a)P +/- (b-a)P + (d-c)P|;
    ties break toward the lexicographically smallest quadruple.
    """
    if A1.card < 2:
        raise TooSmall("gk_witness needs |A1| >= 2")
    if variant not in ("plus_plus", "plus_minus"):
        raise ValueError(f"bad variant {variant!r}")
    if ratio_set(A1).card == A1.field.p:
        raise RatioSetFull("ratio set equals F_p; use xi_search instead")
    if probes is None:
        probes = [A1]
    for P in probes:
        if P.mask & ~A1.mask:
            raise ValueError("probes must be subsets of A1")
        _require_nonempty(P)
    p = A1.field.p
    els = sorted(A1)
    cache: dict[tuple[int, int], int] = {}
    best_score = -1
    best_quad = (0, 0, 0, 0)
    for a in els:
        for b in els:
            if a == b:
                continue
            d1 = (b - a) % p
            for c in els:
                for d in els:
                    d2 = (d - c) % p
                    key = (d1, d2)
                    score = cache.get(key)
                    if score is None:
                        score = min(_witness_card(P, d1, d2, variant) for P in probes)
                        cache[key] = score
                    if score > best_score:
                        best_score = score
                        best_quad = (a, b, c, d)
    return GkWitness(best_quad, variant, best_score, A1.card**2, 1)


def xi_search(A1: FSet) -> tuple[int, int]:
    """Scan all xi in F_p* for the minimizer of E+(A1, xi*A1).

    Uses E+(A, xi*A) = sum_e r_{A-A}(e) * r_{A-A}(xi*e).  The returned
    minimum always satisfies the exact averaging bound
    energy * (p-1) <= |A1|^2 (p-1) + |A1|^4.
    """
    _require_nonempty(A1)
    p = A1.field.p
    r = rep_fn(A1, A1, MINUS).counts
    best_xi, best_energy = 0, None
    for xi in range(1, p):
        e_val = sum(r[e] * r[xi * e % p] for e in range(p) if r[e])
        if best_energy is None or e_val < best_energy:
            best_xi, best_energy = xi, e_val
    assert best_energy is not None
    n = A1.card
    assert best_energy * (p - 1) <= n * n * (p - 1) + n**4, "xi averaging bound broken"
    return best_xi, best_energy


def bucket_index(v: int) -> int:
    """Dyadic bucket of an intersection count: N_1={1,2}, N_j=(2^(j-1), 2^j]."""
    if v < 1:
        raise ValueError("bucket_index needs v >= 1")
    return max(1, (v - 1).bit_length())


@dataclass(frozen=True)
class BucketDecomposition:
    """Pivot, dyadic buckets, and both sides of the bucket inequality."""

    pivot: int
    buckets: dict[int, FSet]
    s_sum: int
    energy: int
    lhs: int
    rhs_num: int
    rhs_den: int
    js_seq: dict[int, int]
    y_card: int
    z_card: int

    @property
    def max_bucket_card(self) -> int:
        return max((b.card for b in self.buckets.values()), default=0)

    @property
    def nonempty(self) -> dict[int, FSet]:
        return {j: b for j, b in self.buckets.items() if b.card}


def chang_decompose(Y: FSet, Z: FSet) -> BucketDecomposition:
    """Dyadic bucket decomposition of Y by |y0*Z cap y*Z| around the best pivot.

    The pivot maximizes the row sum, so s_sum * |Y| >= Ex(Y,Z) exactly.
    """
    field = _require_same_field(Y, Z)
    _require_nonempty(Y, Z)
    masks = {y: _mult_mask(y, Z) for y in Y}
    pivot, s_sum = -1, -1
    for y0 in sorted(Y):
        row = sum((masks[y0] & masks[y]).bit_count() for y in Y)
        if row > s_sum:
            pivot, s_sum = y0, row
    e_val = multiplicative_energy(Y, Z).value
    assert s_sum * Y.card >= e_val, "pivot pigeonhole broken"
    j_max = max(1, (Z.card - 1).bit_length())
    bucket_masks = {j: 0 for j in range(1, j_max + 1)}
    for y in Y:
        v = (masks[pivot] & masks[y]).bit_count()
        if v:
            bucket_masks[bucket_index(v)] |= 1 << y
    buckets = {j: field.fset_from_mask(m) for j, m in bucket_masks.items()}
    lhs = max((16**j * b.card**3 for j, b in buckets.items() if b.card), default=0)
    # size classes run to ceil(log2 |Y|) so every nonempty bucket lands in one
    s_max = max(1, (Y.card - 1).bit_length())
    js_seq = {
        s: max((j for j, b in buckets.items() if b.card and bucket_index(b.card) == s), default=0)
        for s in range(1, s_max + 1)
    }
    return BucketDecomposition(
        pivot=pivot,
        buckets=buckets,
        s_sum=s_sum,
        energy=e_val,
        lhs=lhs,
        rhs_num=e_val**4,
        rhs_den=Y.card**4 * Z.card,
        js_seq=js_seq,
        y_card=Y.card,
        z_card=Z.card,
    )


def chang_floor_holds(d: BucketDecomposition) -> bool:
    """Exact, provable floor for the bucket inequality.

    Claim: with L = max_j 16^j |Y_j|^3 and m = max_j |Y_j|,

        400000 * L * |Y|^4 * max(m, |Z|)  >=  Ex(Y,Z)^4.

    Proof sketch (all steps exact): Ex/|Y| <= s_sum <= sum_j 2^j |Y_j|.
    Grouping buckets by the dyadic class s of their size and writing
    j_s for the largest bucket index in class s,

        sum_j 2^j |Y_j| <= 2 * sum_{s} 2^s 2^{j_s},

    and since 2^s <= 2|Y_{j_s}|,

        2^s 2^{j_s} = 2^{0.75s} 2^{0.25s} 2^{j_s}
                   <= 2^{0.75} L^{1/4} 2^{0.25s}.

    The geometric sum over occupied classes s is at most
    c1 * (2m)^{1/4} with c1 = 2^{1/4}/(2^{1/4}-1), so

        Ex <= 4*c1 * |Y| * L^{1/4} * m^{1/4},

    i.e. Ex^4 <= (4*c1)^4 * |Y|^4 * L * m with (4*c1)^4 < 400000.
    Replacing m by max(m, |Z|) only weakens the right side.  The plain
    |Z|-form (rhs_den = |Y|^4 |Z|) follows whenever m <= |Z|; it is NOT
    universal (take Z a multiplicative Sidon set and Y = F_p*: the ratio
    decays like 16/|Z|), so only the max(m,|Z|) form is asserted.
    """
    scale_card = max(d.max_bucket_card, d.z_card)
    return CHANG_CONSTANT_DEN * d.lhs * d.y_card**4 * scale_card >= d.energy**4


def select_j0(d: BucketDecomposition) -> tuple[int, int]:
    """Bucket index maximizing 2^j |Y_j| plus its certificate value.

    certificate * 2 * (number of bucket slots) >= s_sum, exactly.
    """
    best_j, best_val = 0, -1
    for j in sorted(d.buckets):
        if d.buckets[j].card == 0:
            continue
        val = 2**j * d.buckets[j].card
        if val > best_val:
            best_j, best_val = j, val
    if best_j == 0:
        raise EmptyDecomposition("no nonempty bucket")
    assert best_val * 2 * len(d.buckets) >= d.s_sum, "j0 pigeonhole broken"
    return best_j, best_val


@dataclass(frozen=True)
class PlunneckeAudit:
    """Both Pluennecke-Ruzsa checks as exact integer comparisons."""

    k: int
    lhs_doubling: int  # |A+A| * |B|
    rhs_doubling: int  # |A+B|^2
    lhs_iterated: int  # |kB| * |A|^(k-1)
    rhs_iterated: int  # |A+B|^k

    @property
    def doubling_ok(self) -> bool:
        return self.lhs_doubling <= self.rhs_doubling

    @property
    def iterated_ok(self) -> bool:
        return self.lhs_iterated <= self.rhs_iterated

    @property
    def passed(self) -> bool:
        return self.doubling_ok and self.iterated_ok


def plunnecke_audit(A: FSet, B: FSet, k: int = 4) -> PlunneckeAudit:
    """Check |A+A||B| <= |A+B|^2 and |kB||A|^(k-1) <= |A+B|^k exactly."""
    _require_same_field(A, B)
    _require_nonempty(A, B)
    if not 2 <= k <= 6:
        raise BadParameters(f"k must be in [2, 6], got {k}")
    ab = sumset(A, B).card
    kb = B
    for _ in range(k - 1):
        kb = sumset(kb, B)
    return PlunneckeAudit(
        k=k,
        lhs_doubling=sumset(A, A).card * B.card,
        rhs_doubling=ab**2,
        lhs_iterated=kb.card * A.card ** (k - 1),
        rhs_iterated=ab**k,
    )
