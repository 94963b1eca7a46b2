"""Extremal-set exploration for the objective max{|A+A|, |AA|}.

The symmetry group is dilations only: translation preserves |A+A| but not
|AA| and inversion preserves |AA| but not |A+A|, so dilation is the only
map that leaves the objective invariant.  Canonical form is the smallest
mask (as an integer) among all dilates.
"""

from __future__ import annotations

import json
import math
import os
import random
import tempfile
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from itertools import combinations, islice

from .core import FSet, dilate, make_field, product_set, ratio_set, sumset
from .errors import BadParameters, EmptyOperand, GuardExceeded
from .lemmas import _guards_lifted

CLASS_GUARD = 10**8
CHECKPOINT_EVERY = 10**6


def objective(A: FSet) -> int:
    """max{|A+A|, |AA|}."""
    return max(sumset(A, A).card, product_set(A, A).card)


def canonical_form(A: FSet) -> FSet:
    """Smallest mask among the dilates {uA : u in F_p*}; idempotent."""
    if A.card == 0:
        raise EmptyOperand("canonical_form needs a nonempty set")
    field = A.field
    best = A.mask
    for u in range(2, field.p):
        m = dilate(A, u).mask
        if m < best:
            best = m
    return field.fset_from_mask(best)


@dataclass(frozen=True)
class SearchRecord:
    p: int
    n: int
    best_value: int
    witnesses: tuple[FSet, ...]
    mode: str
    seed: int | None
    classes_visited: int

    @property
    def exponent(self) -> float:
        """log(best_value)/log(n); decimal metadata only."""
        if self.n <= 1:
            return float("nan")
        return math.log(self.best_value) / math.log(self.n)


def _class_count_guard(p: int, n: int) -> None:
    classes = math.comb(p, n) // (p - 1)
    if classes > CLASS_GUARD and not _guards_lifted():
        raise GuardExceeded(f"~{classes} dilation classes exceed the {CLASS_GUARD} guard")


def _scan_range(p: int, n: int, start: int, stop: int | None) -> tuple[int | None, list[int], int]:
    """Scan combination indices [start, stop): (best, witness masks, classes)."""
    field = make_field(p)
    best: int | None = None
    witnesses: list[int] = []
    classes = 0
    for combo in islice(combinations(range(p), n), start, stop):
        mask = 0
        for e in combo:
            mask |= 1 << e
        A = field.fset_from_mask(mask)
        if canonical_form(A).mask != mask:
            continue
        classes += 1
        val = objective(A)
        if best is None or val < best:
            best, witnesses = val, [mask]
        elif val == best:
            witnesses.append(mask)
    return best, witnesses, classes


def _write_checkpoint(path: str, state: dict) -> None:
    # temp file + rename so a crash never leaves a torn checkpoint
    d = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=d, suffix=".tmp")
    try:
        with os.fdopen(fd, "w") as fh:
            json.dump(state, fh, sort_keys=True)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def exhaustive_extremal(
    p: int,
    n: int,
    *,
    workers: int = 1,
    checkpoint_path: str | None = None,
    checkpoint_every: int = CHECKPOINT_EVERY,
    max_steps: int | None = None,
) -> SearchRecord:
    """Exact minimum of max{|A+A|,|AA|} over |A| = n, one set per dilation class.

    With a checkpoint_path the cursor/best state is written atomically
    every checkpoint_every enumerated subsets and the run resumes from an
    existing file; a resumed run is bit-identical to an uninterrupted one.
    max_steps stops early after that many subsets (checkpoint then holds
    the cursor); it exists to exercise resumption deterministically.
    """
    if n < 1 or n > p:
        raise BadParameters(f"need 1 <= n <= p, got n={n}, p={p}")
    field = make_field(p)
    _class_count_guard(p, n)
    if workers > 1:
        if checkpoint_path is not None:
            raise BadParameters("checkpointing is only supported in the serial path")
        total = math.comb(p, n)
        chunk = -(-total // workers)
        bounds = [(i, min(i + chunk, total)) for i in range(0, total, chunk)]
        best: int | None = None
        witnesses: list[int] = []
        classes = 0
        with ProcessPoolExecutor(max_workers=workers) as pool:
            for b, w, c in pool.map(_scan_range, *zip(*[(p, n, lo, hi) for lo, hi in bounds])):
                classes += c
                if b is None:
                    continue
                if best is None or b < best:
                    best, witnesses = b, list(w)
                elif b == best:
                    witnesses.extend(w)
        assert best is not None
        return SearchRecord(
            p, n, best, tuple(field.fset_from_mask(m) for m in sorted(witnesses)),
            "exhaustive", None, classes,
        )
    cursor = 0
    best = None
    witnesses = []
    classes = 0
    if checkpoint_path and os.path.exists(checkpoint_path):
        with open(checkpoint_path) as fh:
            state = json.load(fh)
        if state["p"] != p or state["n"] != n or state["mode"] != "exhaustive":
            raise BadParameters("checkpoint does not match this search")
        cursor = state["cursor"]
        best = state["best_value"]
        witnesses = list(state["witnesses"])
        classes = state["classes_visited"]
    steps = 0
    for combo in islice(combinations(range(p), n), cursor, None):
        if max_steps is not None and steps >= max_steps:
            break
        steps += 1
        cursor += 1
        mask = 0
        for e in combo:
            mask |= 1 << e
        A = field.fset_from_mask(mask)
        if canonical_form(A).mask == mask:
            classes += 1
            val = objective(A)
            if best is None or val < best:
                best, witnesses = val, [mask]
            elif val == best:
                witnesses.append(mask)
        if checkpoint_path and cursor % checkpoint_every == 0:
            _write_checkpoint(
                checkpoint_path,
                {
                    "p": p, "n": n, "mode": "exhaustive", "cursor": cursor,
                    "best_value": best, "witnesses": witnesses, "seed": None,
                    "classes_visited": classes,
                },
            )
    if checkpoint_path:
        _write_checkpoint(
            checkpoint_path,
            {
                "p": p, "n": n, "mode": "exhaustive", "cursor": cursor,
                "best_value": best, "witnesses": witnesses, "seed": None,
                "classes_visited": classes,
            },
        )
    if max_steps is not None and best is None:
        raise BadParameters("max_steps exhausted before any class was visited")
    assert best is not None
    return SearchRecord(
        p, n, best, tuple(field.fset_from_mask(m) for m in sorted(witnesses)),
        "exhaustive", None, classes,
    )


def anneal_extremal(
    p: int,
    n: int,
    seed: int = 0,
    iters: int = 10_000,
    t0: float = 2.0,
    cooling: float = 0.995,
) -> SearchRecord:
    """Seed-deterministic simulated annealing over n-subsets of F_p.

    Starts from the progression {1..n}; a move swaps one element in/out;
    Metropolis acceptance on the objective difference with geometric
    cooling.  iters counts objective evaluations, so iters=1 reports the
    initial set unchanged.
    """
    if n < 1 or n > p - 1:
        raise BadParameters(f"need 1 <= n <= p-1, got n={n}, p={p}")
    if iters < 1:
        raise BadParameters("iters must be >= 1")
    field = make_field(p)
    rng = random.Random(seed)
    current = set(range(1, n + 1))
    cur_val = objective(field.fset(current))
    best_val = cur_val
    best_mask = canonical_form(field.fset(current)).mask
    temp = t0
    for _ in range(iters - 1):
        out_pool = sorted(set(range(p)) - current)
        if not out_pool:
            break
        drop = rng.choice(sorted(current))
        add = rng.choice(out_pool)
        proposal = current - {drop} | {add}
        val = objective(field.fset(proposal))
        delta = val - cur_val
        if delta <= 0 or rng.random() < math.exp(-delta / temp):
            current, cur_val = proposal, val
            if val < best_val:
                best_val = val
                best_mask = canonical_form(field.fset(current)).mask
        temp *= cooling
    return SearchRecord(
        p, n, best_val, (field.fset_from_mask(best_mask),), "anneal", seed, iters
    )


@dataclass(frozen=True)
class RatioScanEntry:
    n: int
    proper_exists: bool | None  # None: not applicable (n < 2)
    witness: FSet | None


@dataclass(frozen=True)
class RatioScanTable:
    p: int
    entries: tuple[RatioScanEntry, ...]
    max_proper_n: int
    sqrt_p: float

    @property
    def max_witness(self) -> FSet | None:
        for e in reversed(self.entries):
            if e.proper_exists:
                return e.witness
        return None


def ratio_threshold_scan(p: int) -> RatioScanTable:
    """Largest n with some |A| = n whose ratio set is a proper subset of F_p.

    Exhaustive over dilation classes (ratio sets are dilation invariant).
    Properness is subset-monotone, so the scan stops at the first size
    with no proper witness.
    """
    field = make_field(p)
    entries: list[RatioScanEntry] = [RatioScanEntry(1, None, None)]
    max_n = 0
    for n in range(2, p + 1):
        _class_count_guard(p, n)
        witness = None
        for combo in combinations(range(p), n):
            mask = 0
            for e in combo:
                mask |= 1 << e
            A = field.fset_from_mask(mask)
            if canonical_form(A).mask != mask:
                continue
            if ratio_set(A).card < p:
                witness = A
                break
        entries.append(RatioScanEntry(n, witness is not None, witness))
        if witness is None:
            break
        max_n = n
    return RatioScanTable(p, tuple(entries), max_n, math.sqrt(p))
