"""Input validation helpers shared across estimators and functions."""

from __future__ import annotations

from typing import Sequence

import numpy as np

from .types import EmbeddingMatrix


def as_float_matrix(X, name: str = "X") -> np.ndarray:
    """Coerce an array-like or EmbeddingMatrix to a finite 2-D float64 array."""
    if isinstance(X, EmbeddingMatrix):
        return X.data
    arr = np.asarray(X, dtype=np.float64)
    if arr.ndim != 2:
        raise ValueError(f"{name} must be 2-D, got shape {arr.shape}")
    if arr.size and not np.isfinite(arr).all():
        raise ValueError(f"{name} contains NaN or Inf entries")
    return arr


def check_bilingual_labels(
    labels: Sequence[str], n_rows: int, min_per_language: int = 1
) -> tuple[np.ndarray, tuple[str, str]]:
    """Validate per-row language labels: right length, exactly two languages.

    Returns the labels as an array plus the language pair in sorted order.
    """
    arr = np.asarray(labels)
    if arr.shape != (n_rows,):
        raise ValueError(f"expected {n_rows} language labels, got shape {arr.shape}")
    uniq = sorted(set(arr.tolist()))
    if len(uniq) != 2:
        raise ValueError(f"expected exactly 2 languages, found {len(uniq)}: {uniq}")
    for lang in uniq:
        count = int((arr == lang).sum())
        if count < min_per_language:
            raise ValueError(
                f"language {lang!r} has {count} rows, need at least {min_per_language}"
            )
    return arr, (uniq[0], uniq[1])
