"""Proof chains as pipelines of exact checks and diagnostic ratios.

Each pipeline mirrors one proof: constant-free consequences of counting,
Cauchy-Schwarz, pigeonholing or set containment become *exact* steps that
must pass for every input, while steps whose statements carry unspecified
universal constants are *diagnostic* steps that only report the measured
ratio.  Square roots of the modulus are avoided by squaring both sides;
dyadic logs use max(1, ceil(log2 n)) so every ratio stays a positive
exact rational.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

from .core import (
    MINUS,
    PLUS,
    FSet,
    _require_nonempty,
    _require_same_field,
    negate,
    product_set,
    ratio_set,
    scale,
    signed_combination,
    sumset,
)
from .energy import _mult_mask, multiplicative_energy
from .lemmas import (
    BucketDecomposition,
    chang_decompose,
    greedy_cover,
    gk_witness,
    katz_shen_subset,
    plunnecke_audit,
    select_j0,
    xi_search,
)

EXACT = "exact"
DIAGNOSTIC = "diagnostic"

# retained fraction per subset extraction; two applications keep >= 1/2
EXTRACTION_KEEP = math.sqrt(2.0) / 2.0
EXHAUSTIVE_EXTRACTION_LIMIT = 14


def _dyadic_log(n: int) -> int:
    """ceil(log2 n), floored at 1 so diagnostic ratios stay positive."""
    return max(1, (n - 1).bit_length())


@dataclass(frozen=True)
class ChainStep:
    name: str
    lhs_num: int
    lhs_den: int
    rhs_num: int
    rhs_den: int
    kind: str
    passed: bool | None

    @property
    def ratio(self) -> Fraction:
        return Fraction(self.lhs_num * self.rhs_den, self.lhs_den * self.rhs_num)


def exact_step(name: str, lhs: int, rhs: int, lhs_den: int = 1, rhs_den: int = 1) -> ChainStep:
    ok = lhs * rhs_den <= rhs * lhs_den
    return ChainStep(name, lhs, lhs_den, rhs, rhs_den, EXACT, ok)


def diag_step(name: str, lhs: int, rhs: int, lhs_den: int = 1, rhs_den: int = 1) -> ChainStep:
    return ChainStep(name, lhs, lhs_den, rhs, rhs_den, DIAGNOSTIC, None)


@dataclass(frozen=True)
class ChainReport:
    theorem: str
    sign: str | None
    inputs: dict
    steps: tuple[ChainStep, ...]
    case: str | None = None
    final_num: int = 1
    final_den: int = 1
    final_is_squared: bool = False
    warnings: tuple[str, ...] = ()

    @property
    def violation(self) -> bool:
        return any(s.kind == EXACT and not s.passed for s in self.steps)

    @property
    def final_ratio(self) -> float:
        r = self.final_num / self.final_den
        return math.sqrt(r) if self.final_is_squared else r


def _signed(A: FSet, sign: str) -> FSet:
    return A if sign == PLUS else negate(A)


def _strip_zero(S: FSet) -> FSet:
    """Drop 0 before multiplicative steps unless the set is exactly {0}.

    The multiplicative-energy floor is false for 0-containing sets under
    the 0*Z = {0} convention, so the chains take the standard reduction
    to S \\ {0}; it costs at most half the set, recorded as the exact
    step |S| <= 2|S*|.
    """
    if 0 in S and S.card > 1:
        return S.field.fset_from_mask(S.mask & ~1)
    return S


def extract_half_subset(A: FSet, sign: str, keep: float = EXTRACTION_KEEP) -> tuple[FSet, str]:
    """A subset Z of A with 2|Z| >= |A| controlling |Z s A s A s A|.

    Two exhaustive subset extractions (each keeping a sqrt(2)/2 fraction)
    when |A| is small enough; otherwise a greedy element-removal descent
    minimizing |X + A + A| (labeled heuristic).
    """
    sA = _signed(A, sign)
    if A.card <= EXHAUSTIVE_EXTRACTION_LIMIT:
        eps = 1.0 - keep
        X1, _ = katz_shen_subset(A, [sA, sA, sA], eps)
        Z, _ = katz_shen_subset(X1, [sA, sA, sA], eps)
        return Z, "exhaustive"
    T2 = sumset(sA, sA)
    X = A
    while 2 * (X.card - 1) >= A.card:
        best_x, best_card = -1, None
        for x in X:
            rest = X.field.fset_from_mask(X.mask ^ (1 << x))
            card = sumset(rest, T2).card
            if best_card is None or card < best_card:
                best_x, best_card = x, card
        X = X.field.fset_from_mask(X.mask ^ (1 << best_x))
    return X, "heuristic"


def _front_end(A: FSet, sign: str, steps: list[ChainStep]) -> tuple[FSet, FSet, FSet, BucketDecomposition]:
    """Shared Z-extraction and decomposition used by the small/large chains."""
    Z, label = extract_half_subset(A, sign)
    steps.append(exact_step(f"subset extraction ({label}): |A| <= 2|Z|", A.card, 2 * Z.card))
    z4 = signed_combination([(Z, PLUS), (Z, sign), (Z, sign), (Z, sign)])
    za3 = signed_combination([(Z, PLUS), (A, sign), (A, sign), (A, sign)])
    steps.append(exact_step("containment: |ZsZsZsZ| <= |ZsAsAsA|", z4.card, za3.card))
    asa = sumset(A, A, sign)
    steps.append(
        diag_step("growth comparison: |ZsAsAsA| vs |AsA|^3/|A|^2", za3.card * A.card**2, asa.card**3)
    )
    Zs = _strip_zero(Z)
    steps.append(exact_step("zero removal: |Z| <= 2|Z*|", Z.card, 2 * Zs.card))
    d = chang_decompose(Zs, Zs)
    steps.append(exact_step("pivot pigeonhole: Ex(Z*,Z*) <= s_sum*|Z*|", d.energy, d.s_sum * Zs.card))
    zz = product_set(Zs, Zs)
    steps.append(exact_step("energy floor: |Z*|^4 <= Ex(Z*,Z*)*|Z*Z*|", Zs.card**4, d.energy * zz.card))
    zsz = sumset(Zs, Zs, sign)
    z4s = signed_combination([(Zs, PLUS), (Zs, sign), (Zs, sign), (Zs, sign)])
    steps.append(
        diag_step("bucket bound: max 16^j|Z_j|^3 vs |ZsZ|^5 |ZsZsZsZ|", d.lhs, zsz.card**5 * z4s.card)
    )
    return Zs, z4, asa, d


def _inputs(A: FSet, B: FSet | None = None) -> dict:
    out = {"p": A.field.p, "a": list(A), "a_card": A.card}
    if B is not None:
        out["b"] = list(B)
        out["b_card"] = B.card
    return out


def chain_small(A: FSet, sign: str = PLUS) -> ChainReport:
    """Small-set chain: |AsA|^8 |AA|^4 against |A|^13."""
    _require_nonempty(A)
    warnings = []
    p = A.field.p
    if A.card**2 > p:
        warnings.append("|A|^2 > p: small-set hypothesis not met")
    steps: list[ChainStep] = []
    Z, _, asa, d = _front_end(A, sign, steps)
    aa = product_set(A, A)
    steps.append(
        diag_step("bucket target: max 16^j|Z_j|^3 vs |A|^11/|AA|^4", d.lhs * aa.card**4, A.card**11)
    )
    final_num = asa.card**8 * aa.card**4
    final_den = A.card**13
    steps.append(diag_step("final: |AsA|^8 |AA|^4 vs |A|^13", final_num, final_den))
    return ChainReport(
        theorem="T11",
        sign=sign,
        inputs=_inputs(A),
        steps=tuple(steps),
        final_num=final_num,
        final_den=final_den,
        warnings=tuple(warnings),
    )


def chain_large(A: FSet, sign: str = PLUS) -> ChainReport:
    """Large-set chain: spade/club case split on the ratio set of Z_j0."""
    _require_nonempty(A)
    warnings = []
    p = A.field.p
    if A.card**2 < p:
        warnings.append("|A|^2 < p: large-set hypothesis not met")
    steps: list[ChainStep] = []
    Z, _, asa, d = _front_end(A, sign, steps)
    j0, cert = select_j0(d)
    steps.append(
        exact_step("j0 pigeonhole: s_sum <= 2*J*2^j0*|Z_j0|", d.s_sum, 2 * len(d.buckets) * cert)
    )
    zj0 = d.buckets[j0]
    ratio_proper = zj0.card < 2 or ratio_set(zj0).card < p
    small_bucket = zj0.card**2 <= p
    case = "spade" if (ratio_proper or small_bucket) else "club"
    aa = product_set(A, A)
    spade_lhs = (asa.card**8 * aa.card**4) ** 2 * p
    spade_rhs = A.card**28
    steps.append(diag_step("(spade, squared): (|AsA|^8|AA|^4)^2 p vs |A|^28", spade_lhs, spade_rhs))
    club_lhs = asa.card**7 * aa.card**4
    club_rhs = A.card**10 * p
    steps.append(diag_step("(club): |AsA|^7|AA|^4 vs |A|^10 p", club_lhs, club_rhs))
    if case == "spade":
        final_num, final_den, squared = spade_lhs, spade_rhs, True
    else:
        final_num, final_den, squared = club_lhs, club_rhs, False
    return ChainReport(
        theorem="T12",
        sign=sign,
        inputs=_inputs(A),
        steps=tuple(steps),
        case=case,
        final_num=final_num,
        final_den=final_den,
        final_is_squared=squared,
        warnings=tuple(warnings),
    )


def _xi_quadruple(Aj: FSet, xi: int) -> tuple[int, int, int, int]:
    """Lexicographically first (a,b,c,d) in Aj with a != b and d-c = xi(b-a)."""
    p = Aj.field.p
    els = sorted(Aj)
    for a in els:
        for b in els:
            if a == b:
                continue
            target = xi * (b - a) % p
            for c in els:
                d = (c + target) % p
                if d in Aj:
                    return (a, b, c, d)
    raise ValueError("ratio set is not full; no xi quadruple exists")


def _bucket_construction(
    A: FSet, B: FSet, a0: int, j: int, Aj: FSet, steps: list[ChainStep]
) -> None:
    """The covering construction of one bucket: covers, retention, product bound."""
    p = A.field.p
    tag = f"bucket j={j}"
    ab = sumset(A, B)
    b4 = signed_combination([(B, PLUS)] * 4)
    steps.append(
        diag_step(
            f"{tag} ceiling: 16^j|A_j|^3 vs |A+A||A+B|^4|4B|",
            16**j * Aj.card**3,
            sumset(A, A).card * ab.card**4 * b4.card,
        )
    )
    ratio_full = Aj.card >= 2 and ratio_set(Aj).card == p
    steps.append(
        diag_step(
            f"{tag} (a/c): 16^j|A_j|^3 vs |A+B|^10/(|A|^3|B|)",
            16**j * Aj.card**3 * A.card**3 * B.card,
            ab.card**10,
        )
    )
    if ratio_full:
        steps.append(
            diag_step(
                f"{tag} (b): 16^j min(|A_j|^2, p) vs |A+B|^8/|A|^3",
                16**j * min(Aj.card**2, p) * A.card**3,
                ab.card**8,
            )
        )
    if Aj.card < 2:
        return
    if ratio_full:
        xi, _ = xi_search(Aj)
        a, b, c, d = _xi_quadruple(Aj, xi)
    else:
        a, b, c, d = gk_witness(Aj, "plus_plus", [Aj]).quadruple
    d1 = (b - a) % p
    d2 = (d - c) % p
    counts = []
    covered_masks = []
    quad_signed = [(-a) % p, b, (-c) % p, d]
    for x, u in zip((a, b, c, d), quad_signed):
        S = A.field.fset_from_mask(_mult_mask(x, B) & _mult_mask(a0, B))
        target = scale(Aj, u)
        cover = greedy_cover(target, S, MINUS)
        counts.append(len(cover.translates))
        covered_masks.append(cover.covered.mask)
        steps.append(
            exact_step(
                f"{tag} cover budget (x={x}): translates <= ceil(ln100*K)+1",
                len(cover.translates),
                cover.budget,
            )
        )
        steps.append(
            diag_step(f"{tag} translate count (x={x}) vs |A+B|/2^j", counts[-1] * 2**j, ab.card)
        )
    keep_mask = 0
    for t in Aj:
        images = (t * quad_signed[0] % p, t * quad_signed[1] % p, t * quad_signed[2] % p, t * quad_signed[3] % p)
        if all(cm >> img & 1 for cm, img in zip(covered_masks, images)):
            keep_mask |= 1 << t
    Ap = A.field.fset_from_mask(keep_mask)
    steps.append(exact_step(f"{tag} retention: 4|A_j| <= 5|A'|", 4 * Aj.card, 5 * Ap.card))
    if Ap.card == 0:
        return
    parts = [scale(Ap, u) for u in quad_signed]
    lhs4 = sumset(sumset(sumset(parts[0], parts[1]), parts[2]), parts[3]).card
    n_prod = counts[0] * counts[1] * counts[2] * counts[3]
    steps.append(
        exact_step(f"{tag} four-cover product: |-aA'+bA'-cA'+dA'| <= n_a n_b n_c n_d |4B|", lhs4, n_prod * b4.card)
    )
    two_term = sumset(scale(Ap, d1), scale(Ap, d2))
    three_term = sumset(sumset(scale(Ap, d1), scale(Ap, d1)), scale(Ap, d2))
    if ratio_full:
        steps.append(
            diag_step(
                f"{tag} two-term growth (xi route): |(b-a)A'+(d-c)A'| vs min(|A_j|^2, p)",
                two_term.card,
                min(Aj.card**2, p),
            )
        )
    else:
        steps.append(
            diag_step(f"{tag} three-term growth: |(b-a)A'+(b-a)A'+(d-c)A'| vs |A_j|^2", three_term.card, Aj.card**2)
        )
    steps.append(
        diag_step(
            f"{tag} doubling transfer: 3-term sum vs (|A'+A'|/|A'|)|(b-a)A'+(d-c)A'|",
            three_term.card * Ap.card,
            sumset(Ap, Ap).card * two_term.card,
        )
    )


def prop51_audit(A: FSet, B: FSet) -> ChainReport:
    """Per-bucket covering construction behind the different-set estimates."""
    _require_same_field(A, B)
    _require_nonempty(A, B)
    steps: list[ChainStep] = []
    As = _strip_zero(A)
    Bs = _strip_zero(B)
    steps.append(exact_step("zero removal: |A| <= 2|A*|", A.card, 2 * As.card))
    steps.append(exact_step("zero removal: |B| <= 2|B*|", B.card, 2 * Bs.card))
    d = chang_decompose(As, Bs)
    a0 = d.pivot
    ab_prod = product_set(As, Bs)
    steps.append(exact_step("a0 pigeonhole: Ex(A*,B*) <= s_sum*|A*|", d.energy, d.s_sum * As.card))
    steps.append(
        exact_step(
            "energy floor: |A*|^2|B*|^2 <= Ex(A*,B*)*|A*B*|",
            As.card**2 * Bs.card**2,
            d.energy * ab_prod.card,
        )
    )
    steps.append(
        exact_step("a0 row: |A*||B*|^2 <= s_sum*|A*B*|", As.card * Bs.card**2, d.s_sum * ab_prod.card)
    )
    for j, Aj in sorted(d.nonempty.items()):
        _bucket_construction(As, Bs, a0, j, Aj, steps)
    pa = plunnecke_audit(A, B, 4)
    steps.append(exact_step("PR doubling: |A+A||B| <= |A+B|^2", pa.lhs_doubling, pa.rhs_doubling))
    steps.append(exact_step("PR iterated: |4B||A|^3 <= |A+B|^4", pa.lhs_iterated, pa.rhs_iterated))
    ab = sumset(As, Bs)
    final_num = d.lhs * As.card**3 * Bs.card
    final_den = ab.card**10
    steps.append(
        diag_step("final (a): max 16^j|A_j|^3 vs |A+B|^10/(|A|^3|B|)", final_num, final_den)
    )
    return ChainReport(
        theorem="P51",
        sign=None,
        inputs=_inputs(A, B),
        steps=tuple(steps),
        final_num=final_num,
        final_den=final_den,
    )


def chain_unbalanced(A: FSet, B: FSet, theorem: str = "T13") -> ChainReport:
    """Different-set chains: bucket pigeonhole plus the ratio-set case split."""
    if theorem not in ("T13", "T14"):
        raise ValueError(f"bad theorem {theorem!r}")
    base = prop51_audit(A, B)
    steps = list(base.steps)
    p = A.field.p
    d = chang_decompose(_strip_zero(A), _strip_zero(B))
    j0, cert = select_j0(d)
    steps.append(
        exact_step("j0 pigeonhole: s_sum <= 2*J*2^j0*|A_j0|", d.s_sum, 2 * len(d.buckets) * cert)
    )
    aj0 = d.buckets[j0]
    ratio_proper = aj0.card < 2 or ratio_set(aj0).card < p
    case = "spade" if (ratio_proper or aj0.card**2 <= p) else "club"
    ab = sumset(A, B).card
    abp = product_set(A, B).card
    lg_b = _dyadic_log(B.card)
    lg_a = _dyadic_log(A.card)
    t13_num = ab**10 * abp**4 * lg_b**4
    t13_den = A.card**6 * B.card**9
    steps.append(diag_step("T1.3: |A+B|^10|AB|^4 Lg(B)^4 vs |A|^6|B|^9", t13_num, t13_den))
    steps.append(
        diag_step(
            "T1.3 (symmetric): |A+B|^10|AB|^4 Lg(A)^4 vs |B|^6|A|^9",
            ab**10 * abp**4 * lg_a**4,
            B.card**6 * A.card**9,
        )
    )
    spade_num = (ab**10 * abp**4 * lg_b**4) ** 2 * p
    spade_den = (A.card**7 * B.card**9) ** 2
    club_num = ab**8 * abp**4 * lg_b**4
    club_den = p * A.card**3 * B.card**8
    steps.append(
        diag_step("T1.4 (spade, squared): (|A+B|^10|AB|^4 Lg^4)^2 p vs (|A|^7|B|^9)^2", spade_num, spade_den)
    )
    steps.append(diag_step("T1.4 (club): |A+B|^8|AB|^4 Lg^4 vs p|A|^3|B|^8", club_num, club_den))
    if theorem == "T13":
        final_num, final_den, squared = t13_num, t13_den, False
    elif case == "spade":
        final_num, final_den, squared = spade_num, spade_den, True
    else:
        final_num, final_den, squared = club_num, club_den, False
    return ChainReport(
        theorem=theorem,
        sign=None,
        inputs=_inputs(A, B),
        steps=tuple(steps),
        case=case,
        final_num=final_num,
        final_den=final_den,
        final_is_squared=squared,
    )


def chain_balanced(A: FSet, B: FSet) -> ChainReport:
    """Comparable-size chain: |A+B|^10 |AB|^4 against |A|^15."""
    _require_same_field(A, B)
    _require_nonempty(A, B)
    warnings = []
    lo, hi = sorted((A.card, B.card))
    if hi > 2 * lo:
        warnings.append("|A| and |B| differ by more than a factor of 2")
    steps: list[ChainStep] = []
    As = _strip_zero(A)
    Bs = _strip_zero(B)
    steps.append(exact_step("zero removal: |A| <= 2|A*|", A.card, 2 * As.card))
    steps.append(exact_step("zero removal: |B| <= 2|B*|", B.card, 2 * Bs.card))
    d = chang_decompose(As, Bs)
    abp = product_set(As, Bs)
    steps.append(exact_step("pivot pigeonhole: Ex(A*,B*) <= s_sum*|A*|", d.energy, d.s_sum * As.card))
    steps.append(
        exact_step(
            "energy floor: |A*|^2|B*|^2 <= Ex(A*,B*)*|A*B*|",
            As.card**2 * Bs.card**2,
            d.energy * abp.card,
        )
    )
    steps.append(
        diag_step("bucket lemma: max 16^j|A_j|^3 vs Ex(A,B)^4/|A|^5", d.lhs * As.card**5, d.energy**4)
    )
    ab = sumset(A, B)
    steps.append(
        diag_step("bucket bound (c): max 16^j|A_j|^3 vs |A+B|^10/|A|^4", d.lhs * A.card**4, ab.card**10)
    )
    final_num = ab.card**10 * abp.card**4
    final_den = A.card**15
    steps.append(diag_step("final: |A+B|^10|AB|^4 vs |A|^15", final_num, final_den))
    return ChainReport(
        theorem="T15",
        sign=None,
        inputs=_inputs(A, B),
        steps=tuple(steps),
        final_num=final_num,
        final_den=final_den,
        warnings=tuple(warnings),
    )


def energy_bound_audit(A: FSet) -> ChainReport:
    """Remark diagnostics: Ex(A,A)^4 against the mixed-sumset right sides."""
    _require_nonempty(A)
    e4 = multiplicative_energy(A, A).value ** 4
    n = A.card
    a_plus = sumset(A, A, PLUS).card
    a_minus = sumset(A, A, MINUS).card
    mixed = signed_combination([(A, PLUS), (A, PLUS), (A, MINUS), (A, MINUS)]).card
    plus4 = signed_combination([(A, PLUS)] * 4).card
    minus4 = signed_combination([(A, PLUS), (A, MINUS), (A, MINUS), (A, MINUS)]).card
    lg = _dyadic_log(n)
    steps = [
        diag_step("log form: Ex^4 vs |A|^5|A-A|^5|A+A-A-A| Lg^4", e4, n**5 * a_minus**5 * mixed * lg**4),
        diag_step("log-free form: Ex^4 vs |A|^5|A-A|^5|A+A-A-A|", e4, n**5 * a_minus**5 * mixed),
        diag_step("(byproduct, plus): Ex^4 vs |A|^5|A+A|^5|A+A+A+A|", e4, n**5 * a_plus**5 * plus4),
        diag_step("(byproduct, minus): Ex^4 vs |A|^5|A-A|^5|A-A-A-A|", e4, n**5 * a_minus**5 * minus4),
        diag_step("(byproduct 2, plus): Ex^4 vs |A|^3|A+A|^8", e4, n**3 * a_plus**8),
        diag_step("(byproduct 2, minus): Ex^4 vs |A|^3|A-A|^8", e4, n**3 * a_minus**8),
    ]
    final_num = e4
    final_den = n**5 * a_minus**5 * mixed
    return ChainReport(
        theorem="REMARK",
        sign=None,
        inputs=_inputs(A),
        steps=tuple(steps),
        final_num=final_num,
        final_den=final_den,
    )
