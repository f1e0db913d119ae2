"""Universal quantum data compression by basis search, LZ condensation and smeared truncation."""

from .linalg import (
    fidelity_general,
    fidelity_pure_mixed,
    partial_trace,
    shannon_entropy,
    tensor_product,
    von_neumann_entropy,
)
from .lz import as_permutation, empirical_rate, lz_decode, lz_encode, lz_parse
from .source import SignalEnsemble, condensation_rate, effective_source, mismatch_entropy

__version__ = "0.1.0"

__all__ = [
    "SignalEnsemble",
    "as_permutation",
    "condensation_rate",
    "effective_source",
    "empirical_rate",
    "fidelity_general",
    "fidelity_pure_mixed",
    "lz_decode",
    "lz_encode",
    "lz_parse",
    "mismatch_entropy",
    "partial_trace",
    "shannon_entropy",
    "tensor_product",
    "von_neumann_entropy",
]
