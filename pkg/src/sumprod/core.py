"""Prime-field context and exact set arithmetic.

Sets are fixed-width membership bitmasks indexed by residue, so sumsets are
shift-OR rotations of Python big ints and cardinalities are popcounts.
Product sets reduce to cyclic sumsets in the discrete-log domain; 0 is
handled by an explicit side rule because the log map excludes it.

All operations are pure functions of immutable inputs.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import Iterable, Iterator, Sequence

import numpy as np

from .errors import (
    CompositeModulus,
    EmptyOperand,
    FieldMismatch,
    ModulusTooSmall,
    TooSmall,
    ZeroDilation,
)

PLUS = "plus"
MINUS = "minus"

# numpy bincount beats the pure-Python loop once the pair count is nontrivial
_NUMPY_PAIR_THRESHOLD = 1024


def _is_prime(n: int) -> bool:
    # Deterministic trial division; documented limit p < 2**63.
    if n < 2:
        return False
    if n < 4:
        return True
    if n % 2 == 0:
        return False
    i = 3
    while i * i <= n:
        if n % i == 0:
            return False
        i += 2
    return True


def _prime_factors(n: int) -> list[int]:
    out = []
    d = 2
    while d * d <= n:
        if n % d == 0:
            out.append(d)
            while n % d == 0:
                n //= d
        d += 1
    if n > 1:
        out.append(n)
    return out


@dataclass(frozen=True)
class PrimeField:
    """F_p with exp/dlog tables for the smallest primitive root g.

    exp_table[k] = g**k mod p for k in [0, p-1); dlog_table inverts it,
    with dlog_table[0] = -1 as a sentinel (0 has no discrete log).
    """

    p: int
    g: int
    exp_table: tuple[int, ...]
    dlog_table: tuple[int, ...]

    @property
    def full_mask(self) -> int:
        return (1 << self.p) - 1

    def inv(self, x: int) -> int:
        """Multiplicative inverse of nonzero x."""
        x %= self.p
        if x == 0:
            raise ZeroDivisionError("0 has no inverse")
        q = self.p - 1
        return self.exp_table[(q - self.dlog_table[x]) % q]

    def fset(self, elements: Iterable[int]) -> "FSet":
        mask = 0
        for e in elements:
            mask |= 1 << (e % self.p)
        return FSet(self, mask, mask.bit_count())

    def fset_from_mask(self, mask: int) -> "FSet":
        if mask >> self.p:
            raise ValueError("mask has bits at index >= p")
        return FSet(self, mask, mask.bit_count())

    def full_set(self) -> "FSet":
        return self.fset_from_mask(self.full_mask)

    def __repr__(self) -> str:  # tables are bulky and fully determined by p
        return f"PrimeField(p={self.p}, g={self.g})"


@lru_cache(maxsize=64)
def make_field(p: int) -> PrimeField:
    """Build the PrimeField for an odd prime p (smallest primitive root)."""
    if p < 3:
        raise ModulusTooSmall(f"modulus must be >= 3, got {p}")
    if not _is_prime(p):
        raise CompositeModulus(f"{p} is not prime")
    factors = _prime_factors(p - 1)
    g = 2
    while any(pow(g, (p - 1) // q, p) == 1 for q in factors):
        g += 1
    exp_table = [1] * (p - 1)
    for k in range(1, p - 1):
        exp_table[k] = exp_table[k - 1] * g % p
    dlog_table = [-1] * p
    for k, v in enumerate(exp_table):
        dlog_table[v] = k
    return PrimeField(p, g, tuple(exp_table), tuple(dlog_table))


@dataclass(frozen=True)
class FSet:
    """A subset of F_p as a p-bit membership mask with cached cardinality."""

    field: PrimeField
    mask: int
    card: int

    def elements(self) -> tuple[int, ...]:
        return tuple(self)

    def __iter__(self) -> Iterator[int]:
        m = self.mask
        while m:
            low = m & -m
            yield low.bit_length() - 1
            m ^= low

    def __contains__(self, x: int) -> bool:
        return bool(self.mask >> (x % self.field.p) & 1)

    def __len__(self) -> int:
        return self.card

    def __eq__(self, other: object) -> bool:
        return (
            isinstance(other, FSet)
            and self.field.p == other.field.p
            and self.mask == other.mask
        )

    def __hash__(self) -> int:
        return hash((self.field.p, self.mask))

    def __repr__(self) -> str:
        return f"FSet(p={self.field.p}, {{{', '.join(map(str, self))}}})"


@dataclass(frozen=True)
class RepFn:
    """Representation function counts[d] = #{(a, b): a +/- b = d}."""

    field: PrimeField
    counts: tuple[int, ...]
    total: int

    def __getitem__(self, d: int) -> int:
        return self.counts[d % self.field.p]


def _require_same_field(*sets: FSet) -> PrimeField:
    field = sets[0].field
    for s in sets[1:]:
        if s.field.p != field.p:
            raise FieldMismatch(f"operands over p={field.p} and p={s.field.p}")
    return field


def _require_nonempty(*sets: FSet) -> None:
    for s in sets:
        if s.card == 0:
            raise EmptyOperand("operation requires nonempty operands")


def _rotate(mask: int, k: int, p: int, full: int) -> int:
    """Cyclic left rotation of a p-bit mask: bit i -> bit (i + k) mod p."""
    k %= p
    if k == 0:
        return mask
    return ((mask << k) | (mask >> (p - k))) & full


def sumset(A: FSet, B: FSet, sign: str = PLUS, method: str = "bitmask") -> FSet:
    """A + B or A - B in F_p.

    The bitmask method ORs cyclic rotations of A's mask, one per element
    of B; the naive method is a double loop kept as the permanent oracle.
    """
    field = _require_same_field(A, B)
    _require_nonempty(A, B)
    if sign not in (PLUS, MINUS):
        raise ValueError(f"bad sign {sign!r}")
    p = field.p
    if method == "naive":
        if sign == PLUS:
            out = {(a + b) % p for a in A for b in B}
        else:
            out = {(a - b) % p for a in A for b in B}
        return field.fset(out)
    if method != "bitmask":
        raise ValueError(f"bad method {method!r}")
    if sign == PLUS and B.card > A.card:
        A, B = B, A
    full = field.full_mask
    acc = 0
    am = A.mask
    if sign == PLUS:
        for b in B:
            acc |= _rotate(am, b, p, full)
    else:
        for b in B:
            acc |= _rotate(am, p - b if b else 0, p, full)
    return field.fset_from_mask(acc)


def negate(A: FSet) -> FSet:
    """-A = {-a mod p}."""
    return dilate(A, A.field.p - 1)


def signed_combination(terms: Sequence[tuple[FSet, str]], method: str = "bitmask") -> FSet:
    """Fold sumset over (set, sign) terms: {sum of eps_i * a_i}."""
    if not terms:
        raise EmptyOperand("signed_combination requires at least one term")
    first, first_sign = terms[0]
    _require_nonempty(first)
    acc = negate(first) if first_sign == MINUS else first
    for s, sign in terms[1:]:
        acc = sumset(acc, s, sign, method=method)
    return acc


def pattern_combination(A: FSet, pattern: str, method: str = "bitmask") -> FSet:
    """signed_combination of one set against a sign string like '++--'."""
    signs = {"+": PLUS, "-": MINUS}
    try:
        terms = [(A, signs[c]) for c in pattern]
    except KeyError:
        raise ValueError(f"bad sign pattern {pattern!r}") from None
    return signed_combination(terms, method=method)


def product_set(A: FSet, B: FSet, method: str = "log") -> FSet:
    """AB = {ab mod p}.

    The log method strips 0, maps nonzero elements through dlog, takes a
    cyclic sumset modulo p-1 and maps back; 0 enters the product set iff
    0 is in one operand (the other being nonempty per precondition).
    """
    field = _require_same_field(A, B)
    _require_nonempty(A, B)
    p = field.p
    if method == "naive":
        return field.fset((a * b) % p for a in A for b in B)
    if method != "log":
        raise ValueError(f"bad method {method!r}")
    q = p - 1
    full_q = (1 << q) - 1
    la = 0
    for a in A:
        if a:
            la |= 1 << field.dlog_table[a]
    acc = 0
    if la:
        for b in B:
            if b:
                k = field.dlog_table[b]
                acc |= ((la << k) | (la >> (q - k))) & full_q if k else la
    mask = 0
    m = acc
    while m:
        low = m & -m
        mask |= 1 << field.exp_table[low.bit_length() - 1]
        m ^= low
    if 0 in A or 0 in B:
        mask |= 1
    return field.fset_from_mask(mask)


def dilate(A: FSet, u: int) -> FSet:
    """u*A for u != 0; a bijection, so the cardinality is preserved."""
    field = A.field
    u %= field.p
    if u == 0:
        raise ZeroDilation("dilation factor must be nonzero")
    if u == 1:
        return A
    return field.fset(u * a % field.p for a in A)


def scale(A: FSet, u: int) -> FSet:
    """u*A with the convention 0*A = {0}; used by witness expressions."""
    if u % A.field.p == 0:
        return A.field.fset([0])
    return dilate(A, u)


def ratio_set(A: FSet) -> FSet:
    """{(a-b)/(c-d) : a,b,c,d in A, c != d}.

    Zero numerators are allowed, zero denominators excluded.  Equals
    {n/d : n in A-A, d in (A-A)\\{0}}.
    """
    if A.card < 2:
        raise TooSmall("ratio_set needs |A| >= 2")
    field = A.field
    diff = sumset(A, A, MINUS)
    nums = diff.elements()
    mask = 0
    for d in diff:
        if d == 0:
            continue
        dinv = field.inv(d)
        for n in nums:
            mask |= 1 << (n * dinv % field.p)
    return field.fset_from_mask(mask)


def rep_fn(A: FSet, B: FSet, sign: str = PLUS) -> RepFn:
    """counts[d] = #{(a, b) in A x B : a +/- b = d}."""
    field = _require_same_field(A, B)
    _require_nonempty(A, B)
    if sign not in (PLUS, MINUS):
        raise ValueError(f"bad sign {sign!r}")
    p = field.p
    if A.card * B.card >= _NUMPY_PAIR_THRESHOLD:
        a = np.fromiter(A, dtype=np.int64, count=A.card)
        b = np.fromiter(B, dtype=np.int64, count=B.card)
        d = a[:, None] + b[None, :] if sign == PLUS else a[:, None] - b[None, :]
        counts = np.bincount(d.ravel() % p, minlength=p)
        return RepFn(field, tuple(int(c) for c in counts), A.card * B.card)
    counts = [0] * p
    if sign == PLUS:
        for a in A:
            for b in B:
                counts[(a + b) % p] += 1
    else:
        for a in A:
            for b in B:
                counts[(a - b) % p] += 1
    return RepFn(field, tuple(counts), A.card * B.card)
