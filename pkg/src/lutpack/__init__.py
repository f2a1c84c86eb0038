"""lutpack: lookup-table compression with don't-care optimization.

Compresses a dense 2^w_in-entry table into a bias table, a set of unique
sub-tables, and index/shift tables that regenerate the rest, optionally
splitting off plainly stored low output bits.  Entries marked as don't
cares may be rewritten to increase sub-table self-similarity.  Plans can
be emitted as synthesizable Verilog.
"""
from .decompose import (
    SimilarityState,
    all_unique_state,
    assemble,
    select_unique,
    similarity_matrix,
    split_bias,
)
from .dontcare import FreezeMask, match_with_dontcares, reduce_unique
from .errors import (
    AddressError,
    BoundsError,
    FormatError,
    InvariantError,
    LutPackError,
    UsageError,
)
from .mask import care_fraction, mask_from_observations
from .model import (
    CareMask,
    Decomposition,
    Plan,
    Table,
    evaluate,
    identity_decomposition,
    reconstruction_table,
    reconstruction_values,
)
from .search import (
    ConfigCost,
    CostReport,
    SearchConfig,
    compress,
    cost_bits,
    cost_components,
    cost_pluts,
    plain_cost_bits,
    table_pluts,
)
from .verify import VerifyReport, interpret_verilog, oracle_min_ust, verify_plan

__version__ = "0.1.0"

__all__ = [
    "AddressError",
    "BoundsError",
    "CareMask",
    "ConfigCost",
    "CostReport",
    "Decomposition",
    "FormatError",
    "FreezeMask",
    "InvariantError",
    "LutPackError",
    "Plan",
    "SearchConfig",
    "SimilarityState",
    "Table",
    "UsageError",
    "VerifyReport",
    "all_unique_state",
    "assemble",
    "care_fraction",
    "compress",
    "cost_bits",
    "cost_components",
    "cost_pluts",
    "evaluate",
    "identity_decomposition",
    "interpret_verilog",
    "mask_from_observations",
    "match_with_dontcares",
    "oracle_min_ust",
    "plain_cost_bits",
    "reconstruction_table",
    "reconstruction_values",
    "reduce_unique",
    "select_unique",
    "similarity_matrix",
    "split_bias",
    "table_pluts",
    "verify_plan",
]
