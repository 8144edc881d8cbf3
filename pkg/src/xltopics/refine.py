"""Dimension refinement for bilingual document embeddings.

Multilingual encoders leak language identity into a subset of embedding
dimensions, which makes K-means split documents by language instead of by
subject.  The refiners here neutralize that:

* ``svd``    keeps the rank-r representation ``U @ diag(S)``
* ``usvd``   keeps only ``U``, so every reduced dimension has unit column norm
             and no single dimension can dominate the distance computation
* ``svdlr``  keeps ``U @ diag(S)`` but deletes the one column whose values
             differ most between the two languages (largest |t|)
* ``oe``     passthrough baseline (original embedding)

Language-dependent dimensions are detected with a per-dimension two-sample
Welch t-test between the language subpopulations.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin

from .types import EmbeddingMatrix
from .validation import as_float_matrix, check_bilingual_labels

REFINE_METHODS = ("oe", "svd", "usvd", "svdlr")

_OVERSAMPLE = 10
_POWER_ITERATIONS = 4
_T_EPSILON = 1e-12


@dataclass
class SvdResult:
    """Rank-r factorization ``A ~ U @ diag(S) @ Vt`` with deterministic signs."""

    U: np.ndarray
    S: np.ndarray
    Vt: np.ndarray
    r: int


@dataclass
class LddReport:
    """Per-dimension language-separation statistics.

    ``sorted_dims`` orders dimension indices by |t| descending, ties broken
    by lower index.  ``languages`` records which group was subtracted from
    which: ``t = mean(first) - mean(second)`` scaled by the Welch factor.
    """

    t_statistics: np.ndarray
    abs_t: np.ndarray
    mean_l1: np.ndarray
    mean_l2: np.ndarray
    sorted_dims: np.ndarray
    languages: tuple[str, str]


@dataclass
class RefinedEmbeddings:
    """Refined representation plus the metadata needed to audit the run."""

    ids: tuple[str, ...]
    data: np.ndarray
    method: str
    r_requested: int
    removed_dim: int | None = None
    singular_values: np.ndarray | None = None


def truncated_svd(E, r: int, seed: int) -> SvdResult:
    """Seeded randomized truncated SVD.

    Uses a Gaussian test matrix with oversampling 10 and 4 QR-stabilized
    power iterations, then flips signs so the largest-magnitude entry of
    each right singular vector is positive.  Deterministic given
    ``(E, r, seed)``; at full rank it matches a dense SVD to solver
    precision.
    """
    A = as_float_matrix(E, "E")
    m, d = A.shape
    if m == 0:
        raise ValueError("cannot decompose an empty matrix")
    max_rank = min(m, d)
    if not 1 <= r <= max_rank:
        raise ValueError(f"rank r={r} out of range [1, {max_rank}] for a {m}x{d} matrix")

    rng = np.random.default_rng(seed)
    n_probe = min(r + _OVERSAMPLE, max_rank)
    omega = rng.standard_normal((d, n_probe))
    Q, _ = np.linalg.qr(A @ omega)
    for _ in range(_POWER_ITERATIONS):
        Q, _ = np.linalg.qr(A.T @ Q)
        Q, _ = np.linalg.qr(A @ Q)
    B = Q.T @ A
    Ub, S, Vt = np.linalg.svd(B, full_matrices=False)
    U = Q @ Ub
    U, S, Vt = U[:, :r], S[:r], Vt[:r]

    # Sign convention: largest-|entry| of each right singular vector positive.
    anchor = np.argmax(np.abs(Vt), axis=1)
    flip = np.sign(Vt[np.arange(r), anchor])
    flip[flip == 0] = 1.0
    return SvdResult(U=U * flip, S=S, Vt=Vt * flip[:, None], r=r)


def ldd_t_statistics(X, labels: Sequence[str]) -> LddReport:
    """Welch t-statistic of every dimension between the two language groups.

    ``t_i = (mean_1 - mean_2) / sqrt(s1^2/n1 + s2^2/n2 + 1e-12)`` with sample
    variances; the epsilon keeps constant dimensions at t = 0 instead of 0/0.
    Groups are ordered by sorted language code.
    """
    X = as_float_matrix(X)
    arr, (l1, l2) = check_bilingual_labels(labels, X.shape[0], min_per_language=2)
    g1 = X[arr == l1]
    g2 = X[arr == l2]
    mean1 = g1.mean(axis=0)
    mean2 = g2.mean(axis=0)
    var1 = g1.var(axis=0, ddof=1)
    var2 = g2.var(axis=0, ddof=1)
    t = (mean1 - mean2) / np.sqrt(var1 / g1.shape[0] + var2 / g2.shape[0] + _T_EPSILON)
    abs_t = np.abs(t)
    # |t| descending, ties by lower dimension index: lexsort on (index, -|t|).
    order = np.lexsort((np.arange(t.size), -abs_t))
    return LddReport(
        t_statistics=t,
        abs_t=abs_t,
        mean_l1=mean1,
        mean_l2=mean2,
        sorted_dims=order,
        languages=(l1, l2),
    )


def refine(
    emb: EmbeddingMatrix,
    method: str,
    r: int,
    labels: Sequence[str] | None = None,
    seed: int = 0,
) -> RefinedEmbeddings:
    """Produce the refined representation for one of the four methods.

    ``oe`` copies the input unchanged; ``svd``/``usvd``/``svdlr`` decompose at
    rank ``r``.  ``svdlr`` additionally needs per-document language labels to
    locate and delete the most language-dependent column of ``U @ diag(S)``.
    """
    if method not in REFINE_METHODS:
        raise ValueError(f"unknown refinement method {method!r}, expected one of {REFINE_METHODS}")
    if method == "oe":
        return RefinedEmbeddings(
            ids=emb.ids, data=emb.data.copy(), method="oe", r_requested=r
        )
    svd = truncated_svd(emb, r, seed)
    if method == "svd":
        data = svd.U * svd.S
    elif method == "usvd":
        data = svd.U.copy()
    else:  # svdlr
        if r < 2:
            raise ValueError("svdlr needs r >= 2: it removes one of the r columns")
        if labels is None:
            raise ValueError("svdlr requires per-document language labels")
        scaled = svd.U * svd.S
        report = ldd_t_statistics(scaled, labels)
        removed = int(report.sorted_dims[0])
        data = np.delete(scaled, removed, axis=1)
        return RefinedEmbeddings(
            ids=emb.ids,
            data=data,
            method="svdlr",
            r_requested=r,
            removed_dim=removed,
            singular_values=svd.S.copy(),
        )
    return RefinedEmbeddings(
        ids=emb.ids,
        data=data,
        method=method,
        r_requested=r,
        singular_values=svd.S.copy(),
    )


def export_dimension_histograms(
    X, labels: Sequence[str], top_n: int = 3, bins: int = 50
) -> dict:
    """Per-language value histograms for the most language-dependent dimensions.

    Returns a JSON-serializable dict ``{"dims": [{dim, t, bin_edges, counts}]}``
    where counts holds one integer list per language over shared bin edges.
    Constant dimensions get their degenerate range widened so every value
    lands in a single bin.
    """
    if top_n < 1:
        raise ValueError("top_n must be >= 1")
    if bins < 2:
        raise ValueError("bins must be >= 2")
    X = as_float_matrix(X)
    arr, (l1, l2) = check_bilingual_labels(labels, X.shape[0], min_per_language=2)
    report = ldd_t_statistics(X, labels)
    dims = report.sorted_dims[: min(top_n, X.shape[1])]
    out = {"dims": []}
    for dim in dims:
        values = X[:, dim]
        lo, hi = float(values.min()), float(values.max())
        if lo == hi:
            pad = max(abs(lo) * 1e-9, 1e-9)
            lo, hi = lo - pad, hi + pad
        edges = np.linspace(lo, hi, bins + 1)
        counts = {}
        for lang in (l1, l2):
            hist, _ = np.histogram(values[arr == lang], bins=edges)
            counts[lang] = hist.astype(int).tolist()
        out["dims"].append(
            {
                "dim": int(dim),
                "t": float(report.t_statistics[dim]),
                "bin_edges": edges.tolist(),
                "counts": counts,
            }
        )
    return out


class DimensionRefiner(BaseEstimator, TransformerMixin):
    """Sklearn-style transformer wrapping :func:`refine`.

    ``fit_transform(X, y)`` returns the exact refined representation of the
    fitted matrix (``y`` carries language labels, required for ``svdlr``).
    ``transform`` projects new rows into the fitted space via the right
    singular vectors.

    Attributes set by fit: ``svd_`` (except ``oe``), ``removed_dim_``,
    ``singular_values_``, ``n_features_in_``.
    """

    def __init__(self, method: str = "usvd", rank: int = 100, seed: int = 0):
        self.method = method
        self.rank = rank
        self.seed = seed

    def fit(self, X, y=None):
        self.fit_transform(X, y)
        return self

    def fit_transform(self, X, y=None):
        ids = X.ids if isinstance(X, EmbeddingMatrix) else None
        data = as_float_matrix(X)
        if ids is None:
            ids = tuple(str(i) for i in range(data.shape[0]))
            emb = EmbeddingMatrix(ids=ids, data=data)
        else:
            emb = X
        refined = refine(emb, self.method, self.rank, labels=y, seed=self.seed)
        self.n_features_in_ = data.shape[1]
        self.removed_dim_ = refined.removed_dim
        self.singular_values_ = refined.singular_values
        if self.method == "oe":
            self.svd_ = None
        else:
            self.svd_ = truncated_svd(emb, self.rank, self.seed)
        self.embedding_ = refined.data
        return refined.data

    def transform(self, X):
        if not hasattr(self, "n_features_in_"):
            raise ValueError("DimensionRefiner is not fitted yet")
        data = as_float_matrix(X)
        if data.shape[1] != self.n_features_in_:
            raise ValueError(
                f"X has {data.shape[1]} features, fitted with {self.n_features_in_}"
            )
        if self.method == "oe":
            return data.copy()
        projected = data @ self.svd_.Vt.T
        if self.method == "usvd":
            return projected / self.svd_.S
        if self.method == "svdlr":
            return np.delete(projected, self.removed_dim_, axis=1)
        return projected
