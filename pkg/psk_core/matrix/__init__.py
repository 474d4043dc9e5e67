"""Matrix model, exact oracles and file format."""

from .io import dumps_matrix, loads_matrix, read_matrix, read_metadata_jsonl, write_matrix, write_metadata_jsonl
from .models import DEFAULT_MAX_ENTRY, HeavyHitterSet, IndexPair, MatrixStats, SparseIntMatrix
from .oracle import (
    col_support,
    heavy_hitters_exact,
    join_size,
    l1_via_marginals,
    linf_norm,
    lp_norm,
    lp_norm_pow,
    multiply,
    naive_multiply,
    row_support,
    sandwich_holds,
)

__all__ = [
    "DEFAULT_MAX_ENTRY",
    "HeavyHitterSet",
    "IndexPair",
    "MatrixStats",
    "SparseIntMatrix",
    "col_support",
    "dumps_matrix",
    "heavy_hitters_exact",
    "join_size",
    "l1_via_marginals",
    "linf_norm",
    "loads_matrix",
    "lp_norm",
    "lp_norm_pow",
    "multiply",
    "naive_multiply",
    "read_matrix",
    "read_metadata_jsonl",
    "row_support",
    "sandwich_holds",
    "write_matrix",
    "write_metadata_jsonl",
]
