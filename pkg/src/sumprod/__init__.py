"""Exact workbench for sum-product growth over prime fields."""

from .core import (
    MINUS,
    PLUS,
    FSet,
    PrimeField,
    RepFn,
    dilate,
    make_field,
    negate,
    pattern_combination,
    product_set,
    ratio_set,
    rep_fn,
    scale,
    signed_combination,
    sumset,
)
from .energy import (
    ADDITIVE,
    MULTIPLICATIVE,
    EnergyReport,
    additive_energy,
    energy,
    intersection_count,
    multiplicative_energy,
)
from .lemmas import (
    BucketDecomposition,
    CoverResult,
    GkWitness,
    PlunneckeAudit,
    bucket_index,
    chang_decompose,
    chang_floor_holds,
    greedy_cover,
    gk_witness,
    katz_shen_subset,
    plunnecke_audit,
    select_j0,
    xi_search,
)
from .chains import (
    ChainReport,
    ChainStep,
    chain_balanced,
    chain_large,
    chain_small,
    chain_unbalanced,
    energy_bound_audit,
    extract_half_subset,
    prop51_audit,
)
from .search import (
    RatioScanEntry,
    RatioScanTable,
    SearchRecord,
    anneal_extremal,
    canonical_form,
    exhaustive_extremal,
    objective,
    ratio_threshold_scan,
)
from . import errors

__all__ = [
    "PLUS",
    "MINUS",
    "FSet",
    "PrimeField",
    "RepFn",
    "make_field",
    "sumset",
    "negate",
    "signed_combination",
    "pattern_combination",
    "product_set",
    "dilate",
    "scale",
    "ratio_set",
    "rep_fn",
    "ADDITIVE",
    "MULTIPLICATIVE",
    "EnergyReport",
    "additive_energy",
    "multiplicative_energy",
    "energy",
    "intersection_count",
    "CoverResult",
    "greedy_cover",
    "katz_shen_subset",
    "GkWitness",
    "gk_witness",
    "xi_search",
    "bucket_index",
    "BucketDecomposition",
    "chang_decompose",
    "chang_floor_holds",
    "select_j0",
    "PlunneckeAudit",
    "plunnecke_audit",
    "ChainStep",
    "ChainReport",
    "chain_small",
    "chain_large",
    "prop51_audit",
    "chain_unbalanced",
    "chain_balanced",
    "energy_bound_audit",
    "extract_half_subset",
    "SearchRecord",
    "canonical_form",
    "objective",
    "exhaustive_extremal",
    "anneal_extremal",
    "RatioScanEntry",
    "RatioScanTable",
    "ratio_threshold_scan",
    "errors",
]
