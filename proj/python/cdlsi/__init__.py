"""Python bindings for the C-DLSI federated retrieval engine."""

from ._cdlsi import (
    CdlsiError,
    Engine,
    avg_precision_at,
    bench,
    precision_at,
    svd,
    synthetic_corpus,
    tokenize,
)

__all__ = [
    "CdlsiError",
    "Engine",
    "avg_precision_at",
    "bench",
    "precision_at",
    "svd",
    "synthetic_corpus",
    "tokenize",
]
