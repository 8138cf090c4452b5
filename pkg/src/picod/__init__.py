"""Decentralized, individually secure pliable index coding with circular-shift side information."""

from .code import CodeRow, LinearCode, deserialize, row_range, serialize, validate
from .field import FieldScalar, in_rowspan, info_symbols, rank
from .instance import (
    CentralizedBounds,
    Instance,
    Regime,
    RegimeClassification,
    centralized_bounds,
    classify,
    gap_report,
    scalar_lower_bound,
)
from .schemes import build_best
from .search import SearchOutcome, SearchStatus, build_pool, min_length_search, prove_lower_bound
from .verify import Status, check_no_basis_vector, check_range_accounting, leakage_profile, verify

__version__ = "0.1.0"
