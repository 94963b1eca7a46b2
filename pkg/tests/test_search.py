import json
import math
from itertools import combinations

import pytest

from sumprod.core import make_field
from sumprod.errors import BadParameters, EmptyOperand, GuardExceeded
from sumprod.search import (
    anneal_extremal,
    canonical_form,
    exhaustive_extremal,
    objective,
    ratio_threshold_scan,
)

F5 = make_field(5)
F7 = make_field(7)


def naive_minimum(p: int, n: int) -> int:
    """Canonicalization-free enumerator: the independent oracle."""
    field = make_field(p)
    return min(
        objective(field.fset(combo)) for combo in combinations(range(p), n)
    )


class TestCanonicalForm:
    def test_examples(self):
        assert sorted(canonical_form(F5.fset([2, 4]))) == [1, 2]
        A = F7.fset([0, 1])
        assert canonical_form(A) == A  # already canonical

    def test_idempotent_and_objective_preserving(self):
        for elements in ([3, 5, 6], [1, 4], [0, 2, 3, 6]):
            A = F7.fset(elements)
            C = canonical_form(A)
            assert canonical_form(C) == C
            assert objective(C) == objective(A)
            assert C.mask == min(
                F7.fset(u * a % 7 for a in A).mask for u in range(1, 7)
            )

    def test_empty(self):
        with pytest.raises(EmptyOperand):
            canonical_form(F7.fset([]))


class TestExhaustive:
    def test_trivial_and_derived(self):
        assert exhaustive_extremal(7, 1).best_value == 1
        assert exhaustive_extremal(7, 2).best_value == 3

    def test_matches_naive_oracle(self):
        for p, n in ((7, 3), (11, 3), (13, 4)):
            rec = exhaustive_extremal(p, n)
            assert rec.best_value == naive_minimum(p, n)

    def test_witness_invariants(self):
        rec = exhaustive_extremal(11, 3)
        for w in rec.witnesses:
            assert w.card == 3
            assert objective(w) == rec.best_value
            assert canonical_form(w) == w

    def test_bad_parameters(self):
        with pytest.raises(BadParameters):
            exhaustive_extremal(7, 0)

    def test_guard(self):
        with pytest.raises(GuardExceeded):
            exhaustive_extremal(101, 23)

    def test_checkpoint_resume_bit_identical(self, tmp_path):
        ck = tmp_path / "ck.json"
        full = exhaustive_extremal(11, 3)
        exhaustive_extremal(11, 3, checkpoint_path=str(ck), checkpoint_every=7, max_steps=30)
        state = json.loads(ck.read_text())
        assert state["cursor"] == 30 and state["mode"] == "exhaustive"
        resumed = exhaustive_extremal(11, 3, checkpoint_path=str(ck))
        assert resumed.best_value == full.best_value
        assert resumed.witnesses == full.witnesses
        assert resumed.classes_visited == full.classes_visited

    def test_checkpoint_mismatch(self, tmp_path):
        ck = tmp_path / "ck.json"
        exhaustive_extremal(7, 2, checkpoint_path=str(ck))
        with pytest.raises(BadParameters):
            exhaustive_extremal(7, 3, checkpoint_path=str(ck))

    def test_parallel_matches_serial(self):
        serial = exhaustive_extremal(11, 4)
        parallel = exhaustive_extremal(11, 4, workers=3)
        assert parallel.best_value == serial.best_value
        assert parallel.witnesses == serial.witnesses
        assert parallel.classes_visited == serial.classes_visited


class TestAnneal:
    def test_never_below_exhaustive(self):
        floor = exhaustive_extremal(13, 4).best_value
        for seed in range(5):
            assert anneal_extremal(13, 4, seed=seed, iters=300).best_value >= floor

    def test_iters_one_is_initial_set(self):
        field = make_field(13)
        rec = anneal_extremal(13, 4, seed=9, iters=1)
        assert rec.best_value == objective(field.fset([1, 2, 3, 4]))

    def test_seed_deterministic(self):
        a = anneal_extremal(13, 5, seed=3, iters=400)
        b = anneal_extremal(13, 5, seed=3, iters=400)
        assert (a.best_value, a.witnesses) == (b.best_value, b.witnesses)

    def test_ap_start_bound_p31(self):
        field = make_field(31)
        ap = field.fset(range(1, 7))
        assert objective(ap) == 17
        assert anneal_extremal(31, 6, seed=42, iters=200).best_value <= 17

    def test_bad_parameters(self):
        with pytest.raises(BadParameters):
            anneal_extremal(7, 7)
        with pytest.raises(BadParameters):
            anneal_extremal(7, 2, iters=0)

    def test_witness_is_canonical(self):
        rec = anneal_extremal(11, 3, seed=1, iters=100)
        (w,) = rec.witnesses
        assert canonical_form(w) == w and w.card == 3


class TestRatioScan:
    def test_p7(self):
        t = ratio_threshold_scan(7)
        assert t.max_proper_n == 2
        assert t.entries[0].proper_exists is None  # n=1 not applicable
        assert t.entries[1].proper_exists is True
        assert t.entries[2].proper_exists is False
        assert t.max_witness is not None

    def test_p11_vs_sqrt(self):
        t = ratio_threshold_scan(11)
        assert t.sqrt_p == math.sqrt(11)
        assert t.max_proper_n >= 2

    def test_witness_really_proper(self):
        from sumprod.core import ratio_set

        t = ratio_threshold_scan(13)
        w = t.max_witness
        assert ratio_set(w).card < 13
        assert w.card == t.max_proper_n
